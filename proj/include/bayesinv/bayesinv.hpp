/*
 * Copyright 2026 The bayesinv Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#ifndef BAYESINV_BAYESINV_HPP
#define BAYESINV_BAYESINV_HPP

#include "bayesinv/calibration.hpp"
#include "bayesinv/density.hpp"
#include "bayesinv/errors.hpp"
#include "bayesinv/fd_priors.hpp"
#include "bayesinv/forward_ops.hpp"
#include "bayesinv/gp.hpp"
#include "bayesinv/grid.hpp"
#include "bayesinv/io.hpp"
#include "bayesinv/kernels.hpp"
#include "bayesinv/linear_posterior.hpp"
#include "bayesinv/monte_carlo.hpp"
#include "bayesinv/poisson.hpp"
#include "bayesinv/random.hpp"
#include "bayesinv/spectral.hpp"
#include "bayesinv/spline.hpp"
#include "bayesinv/version.hpp"

#endif  // BAYESINV_BAYESINV_HPP
