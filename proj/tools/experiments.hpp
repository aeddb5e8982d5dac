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

#ifndef BAYESINV_TOOLS_EXPERIMENTS_HPP
#define BAYESINV_TOOLS_EXPERIMENTS_HPP

// Experiment commands behind bayesinv_cli. Every command renders all of its
// artifacts in memory first; files are written only after it succeeded.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <Eigen/Core>

#include "bayesinv/bayesinv.hpp"
#include "json.hpp"

namespace bayesinv::cli {

using json = nlohmann::ordered_json;
using Params = std::map<std::string, std::string>;

struct CommandSpec {
  std::string name;
  std::string help;
  Params defaults;
  std::map<std::string, std::string> docs;
};

inline const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = {
      {"demo-linear",
       "Simulate a linear inverse problem, fit the Gaussian posterior, write truth/data/posterior CSVs",
       {{"n", "100"},
        {"kernel", "deblur"},
        {"prior", "smooth-zero"},
        {"truth", "smooth"},
        {"sigma", "0.01"},
        {"tilde_sigma", "auto"},
        {"psi", "0.05"},
        {"height", "0.1"},
        {"diffusion", "0.5"},
        {"velocity", "1"},
        {"x_obs", "1"},
        {"horizon", "2"},
        {"jumps", "0.5"},
        {"jump_weight", "0.1"},
        {"write_operator", "false"}},
       {{"kernel", "deblur | seismic | gravity | diffraction | groundwater"},
        {"prior", "smooth-interior | smooth-zero | smooth-soft | nonsmooth | jump"},
        {"truth", "smooth | piecewise"},
        {"tilde_sigma", "prior scale; auto = 10/n^2 (smooth) or 3/n (first-difference)"},
        {"jumps", "comma-separated jump locations as fractions of the domain"},
        {"write_operator", "also write operator.csv and operator.json"}}},
      {"gp",
       "Gaussian process regression with a built-in kernel; reports the representer residual",
       {{"kernel", "ou"},
        {"n", "20"},
        {"sigma", "0.1"},
        {"b", "1"},
        {"spectral_b", "1,1"},
        {"sigma2_theta", "1"},
        {"points", "101"},
        {"data", ""}},
       {{"kernel", "ou | se | brownian | spline | spectral"},
        {"b", "OU rate or squared-exponential bandwidth"},
        {"spectral_b", "penalty coefficients b_0,...,b_M for the spectral kernel"},
        {"sigma2_theta", "process scale of the spline kernel"},
        {"data", "optional CSV with columns x,y; simulated from sin(2 pi x) if empty"}}},
      {"calibrate",
       "Linear calibration: estimators, confidence set and Bayesian posterior of the unknown covariate",
       {{"source", "simulate"},
        {"prior", "hoadley"},
        {"n", "15"},
        {"m", "1"},
        {"intercept", "0"},
        {"beta", "1"},
        {"sigma", "0.5"},
        {"x_tilde", "0.5"},
        {"level", "0.05"},
        {"data", ""},
        {"y_new", ""},
        {"prior_mean", "0"},
        {"prior_sd", "1"},
        {"points", "401"}},
       {{"source", "simulate | file | linear-demo"},
        {"prior", "hoadley | flat | normal"},
        {"data", "CSV with columns x,y (source=file)"},
        {"y_new", "comma-separated new responses (source=file)"},
        {"level", "confidence-set alpha"}}},
      {"inconsistency",
       "Poisson leave-one-out posterior of a covariate for growing n",
       {{"theta", "1"}, {"n_values", "100,1000,10000,100000"}, {"held_out", "9"}, {"points", "400"}},
       {{"n_values", "comma-separated increasing sample sizes"},
        {"held_out", "0-based index of the held-out pair"}}},
      {"coverage",
       "Monte Carlo coverage of the calibration confidence set",
       {{"n", "30"},
        {"m", "1"},
        {"intercept", "0"},
        {"beta", "5"},
        {"sigma", "1"},
        {"x_tilde", "0.5"},
        {"level", "0.05"},
        {"replications", "10000"},
        {"workers", "0"}},
       {{"workers", "worker threads (0 = all cores); does not change the output"}}},
      {"risk",
       "Monte Carlo risk of the classical and inverse calibration estimators",
       {{"n", "20"},
        {"m", "1"},
        {"intercept", "0"},
        {"beta", "1"},
        {"sigma", "1"},
        {"x_tilde", "0.5"},
        {"level", "0.05"},
        {"replications", "10000"},
        {"workers", "0"}},
       {{"workers", "worker threads (0 = all cores); does not change the output"}}},
  };
  return specs;
}

inline const CommandSpec& find_command(const std::string& name) {
  for (const auto& c : command_specs())
    if (c.name == name) return c;
  std::string valid;
  for (const auto& c : command_specs()) valid += (valid.empty() ? "" : ", ") + c.name;
  throw UsageError("unknown command '" + name + "'; valid commands: " + valid);
}

struct ExperimentConfig {
  std::string command;
  std::uint64_t seed = 1;
  std::string output_dir = "out";
  Params params;
};

/// Flat JSON object of scalars. A "seed" entry is returned separately.
struct FileConfig {
  Params params;
  std::optional<std::uint64_t> seed;
};

inline FileConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw UsageError("config file '" + path + "' must hold a JSON object");
  FileConfig out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto& v = it.value();
    std::string s;
    if (v.is_string()) {
      s = v.get<std::string>();
    } else if (v.is_number_integer() || v.is_number_unsigned() || v.is_number_float() || v.is_boolean()) {
      s = v.dump();
    } else if (v.is_array()) {
      for (const auto& e : v) s += (s.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
    } else {
      throw UsageError("config key '" + it.key() + "' must be a scalar or a list");
    }
    if (it.key() == "seed") {
      try {
        out.seed = std::stoull(s);
      } catch (const std::exception&) {
        throw UsageError("config key 'seed' must be a non-negative integer");
      }
      continue;
    }
    out.params[it.key()] = s;
  }
  return out;
}

/// defaults < file < flags.
inline ExperimentConfig merge_config(const std::string& command, std::uint64_t seed, const std::string& out,
                                     const Params& file, const Params& flags) {
  const CommandSpec& spec = find_command(command);
  ExperimentConfig cfg{command, seed, out, spec.defaults};
  for (const Params* layer : {&file, &flags}) {
    for (const auto& [k, v] : *layer) {
      if (!spec.defaults.count(k)) throw UsageError("unknown parameter '" + k + "' for command " + command);
      cfg.params[k] = v;
    }
  }
  return cfg;
}

class ParamReader {
 public:
  explicit ParamReader(const Params& p) : p_(p) {}

  const std::string& text(const std::string& key) const {
    auto it = p_.find(key);
    if (it == p_.end()) throw UsageError("missing parameter '" + key + "'");
    return it->second;
  }

  double real(const std::string& key) const { return parse_real(key, text(key)); }

  long integer(const std::string& key) const {
    const std::string& s = text(key);
    try {
      std::size_t used = 0;
      const long v = std::stol(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("parameter '" + key + "' must be an integer, got '" + s + "'");
  }

  std::size_t count(const std::string& key, long min) const {
    const long v = integer(key);
    if (v < min) throw UsageError("parameter '" + key + "' must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  bool flag(const std::string& key) const {
    const std::string& s = text(key);
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw UsageError("parameter '" + key + "' must be true or false");
  }

  std::vector<double> reals(const std::string& key) const {
    std::vector<double> out;
    std::istringstream is(text(key));
    std::string cell;
    while (std::getline(is, cell, ','))
      if (!cell.empty()) out.push_back(parse_real(key, cell));
    return out;
  }

  std::string choice(const std::string& key, const std::vector<std::string>& valid) const {
    const std::string& s = text(key);
    if (std::find(valid.begin(), valid.end(), s) != valid.end()) return s;
    std::string list;
    for (const auto& v : valid) list += (list.empty() ? "" : ", ") + v;
    throw UsageError("invalid " + key + " '" + s + "'; valid names: " + list);
  }

 private:
  static double parse_real(const std::string& key, const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size() && std::isfinite(v)) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("parameter '" + key + "' must be a finite number, got '" + s + "'");
  }

  const Params& p_;
};

/// Files produced by one run, in write order.
struct Artifacts {
  std::vector<std::pair<std::string, std::string>> files;

  void add(std::string name, std::string content) { files.emplace_back(std::move(name), std::move(content)); }
  void add_csv(std::string name, const io::Table& t) { add(std::move(name), io::to_csv(t)); }
  void add_json(std::string name, const json& j) { add(std::move(name), j.dump(2) + "\n"); }
  const std::string& get(const std::string& name) const {
    for (const auto& f : files)
      if (f.first == name) return f.second;
    throw UsageError("no artifact named " + name);
  }
};

/// null for non-finite values, which JSON cannot represent.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json manifest(const ExperimentConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["seed"] = cfg.seed;
  j["version"] = kVersion;
  json p = json::object();
  for (const auto& [k, v] : cfg.params) p[k] = v;
  j["params"] = p;
  return j;
}

inline json operator_header(const forward::ForwardOperator& op) {
  json j;
  j["kernel_tag"] = forward::tag_name(op.kernel_tag());
  auto grid = [](const Grid& g) { return json{{"a", g.a()}, {"b", g.b()}, {"n", g.size()}}; };
  j["row_grid"] = grid(op.row_grid());
  j["col_grid"] = grid(op.col_grid());
  json params = json::object();
  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, forward::tag::GaussianBlur>) params["psi"] = t.psi;
        if constexpr (std::is_same_v<T, forward::tag::Gravity>) params["h"] = t.h;
        if constexpr (std::is_same_v<T, forward::tag::Groundwater>) {
          params["diffusion"] = t.diffusion;
          params["velocity"] = t.velocity;
          params["x_obs"] = t.x_obs;
          params["horizon"] = t.horizon;
        }
        if constexpr (std::is_same_v<T, forward::tag::Custom>) params["name"] = t.name;
      },
      op.kernel_tag());
  j["parameters"] = params;
  return j;
}

inline json prior_header(const priors::PrecisionRoot& root) {
  json j;
  j["variant"] = priors::variant_name(root.variant());
  j["dimension"] = root.dimension();
  j["rows"] = root.matrix().rows();
  j["tilde_sigma"] = root.tilde_sigma();
  j["boundary_delta"] = root.boundary_delta() ? json(*root.boundary_delta()) : json(nullptr);
  json jumps = json::array();
  for (const auto& jp : root.jumps()) jumps.push_back({{"index", jp.index}, {"weight", jp.weight}});
  j["jumps"] = jumps;
  return j;
}

// ---------------------------------------------------------------- demo-linear

inline forward::ForwardOperator build_operator(const std::string& kernel, std::size_t n, const ParamReader& p) {
  if (kernel == "deblur") return forward::make_gaussian_blur(Grid(0.0, 1.0, n), p.real("psi"));
  if (kernel == "seismic") return forward::make_travel_time(Grid(0.0, 1.0, n));
  if (kernel == "gravity") return forward::make_gravity(Grid(0.0, 1.0, n), p.real("height"));
  if (kernel == "diffraction")
    return forward::make_diffraction(Grid(-std::numbers::pi / 2.0, std::numbers::pi / 2.0, n));
  const double horizon = p.real("horizon");
  return forward::make_groundwater(Grid(0.0, horizon, n), p.real("diffusion"), p.real("velocity"), p.real("x_obs"),
                                   horizon);
}

inline priors::PrecisionRoot build_prior(const std::string& prior, std::size_t n, const ParamReader& p) {
  const bool smooth = prior.rfind("smooth", 0) == 0;
  double ts = 0.0;
  const double nn = static_cast<double>(n);
  if (p.text("tilde_sigma") == "auto") {
    ts = smooth ? 10.0 / (nn * nn) : 3.0 / nn;
  } else {
    ts = p.real("tilde_sigma");
  }
  if (prior == "smooth-interior") return priors::build_smooth_interior(n, ts);
  if (prior == "smooth-zero") return priors::build_smooth_zero_boundary(n, ts);
  if (prior == "smooth-soft") return priors::build_smooth_soft_boundary(n, ts);
  if (prior == "nonsmooth") return priors::build_nonsmooth(n, ts);
  std::vector<priors::Jump> jumps;
  const double w = p.real("jump_weight");
  for (double f : p.reals("jumps")) {
    if (!(f > 0.0 && f < 1.0)) throw UsageError("jump locations must be fractions in (0, 1)");
    jumps.push_back({static_cast<std::size_t>(std::lround(f * nn)), w});
  }
  return priors::build_jump(n, jumps, ts);
}

/// Ground truth on the unit coordinate u in [0, 1).
inline double truth_function(const std::string& name, double u) {
  if (name == "smooth") return std::sin(2.0 * std::numbers::pi * u);
  if (u < 0.3) return 0.0;
  if (u < 0.6) return 1.0;
  return 0.4;
}

inline Artifacts cmd_demo_linear(const ExperimentConfig& cfg) {
  const ParamReader p(cfg.params);
  const std::string kernel = p.choice("kernel", {"deblur", "seismic", "gravity", "diffraction", "groundwater"});
  const std::string prior_name =
      p.choice("prior", {"smooth-interior", "smooth-zero", "smooth-soft", "nonsmooth", "jump"});
  const std::string truth_name = p.choice("truth", {"smooth", "piecewise"});
  const std::size_t n = p.count("n", 3);
  const double sigma = p.real("sigma");
  if (!(sigma > 0.0)) throw UsageError("parameter 'sigma' must be positive");
  const bool write_op = p.flag("write_operator");

  const forward::ForwardOperator op = build_operator(kernel, n, p);
  const priors::PrecisionRoot prior = build_prior(prior_name, n, p);
  const Grid& cols = op.col_grid();
  Eigen::VectorXd theta(op.cols());
  for (Eigen::Index j = 0; j < theta.size(); ++j) {
    const double u = (cols.node(static_cast<std::size_t>(j)) - cols.a()) / (cols.b() - cols.a());
    theta(j) = truth_function(truth_name, u);
  }
  const Eigen::VectorXd clean = forward::apply(op, theta);
  const Eigen::VectorXd y = forward::simulate_data(op, theta, sigma, cfg.seed);
  const posterior::GaussianPosterior post = posterior::fit(op, prior, y, sigma);
  const Eigen::VectorXd sd = posterior::posterior_sd(post);
  const double z = 1.959963984540054;

  const double nn = static_cast<double>(n);
  const double rmse_map = std::sqrt((post.mean() - theta).squaredNorm() / nn);
  const double noise_rmse = std::sqrt((y - clean).squaredNorm() / nn);
  std::optional<double> rmse_data;
  if (op.row_grid() == op.col_grid()) rmse_data = std::sqrt((y - theta).squaredNorm() / nn);

  Artifacts a;
  const Eigen::VectorXd xc = cols.nodes();
  const Eigen::VectorXd xr = op.row_grid().nodes();
  a.add_csv("truth.csv", io::columns_table({"x", "theta"}, {xc, theta}));
  a.add_csv("data.csv", io::columns_table({"x", "y", "y_clean"}, {xr, y, clean}));
  const Eigen::VectorXd lo = post.mean() - z * sd;
  const Eigen::VectorXd hi = post.mean() + z * sd;
  a.add_csv("posterior.csv", io::columns_table({"x", "mean", "sd", "lower", "upper"}, {xc, post.mean(), sd, lo, hi}));

  json s;
  s["command"] = cfg.command;
  s["kernel"] = kernel;
  s["prior"] = prior_name;
  s["truth"] = truth_name;
  s["n"] = n;
  s["sigma"] = sigma;
  s["tilde_sigma"] = prior.tilde_sigma();
  s["rmse_map"] = number(rmse_map);
  s["rmse_data"] = rmse_data ? number(*rmse_data) : json(nullptr);
  s["noise_rmse"] = number(noise_rmse);
  s["objective_at_map"] = number(posterior::tikhonov_objective(post, post.mean(), y));
  s["objective_at_truth"] = number(posterior::tikhonov_objective(post, theta, y));
  s["band_level"] = 0.95;
  s["operator"] = operator_header(op);
  s["prior_root"] = prior_header(prior);
  a.add_json("summary.json", s);
  if (write_op) {
    a.add_csv("operator.csv", io::matrix_table(op.matrix()));
    a.add_json("operator.json", operator_header(op));
  }
  return a;
}

// ------------------------------------------------------------------------ gp

inline gp::CovarianceKernel build_gp_kernel(const std::string& name, const ParamReader& p) {
  if (name == "ou") return gp::ornstein_uhlenbeck(p.real("b"));
  if (name == "se") return gp::squared_exponential(p.real("b"));
  if (name == "brownian") return gp::brownian_motion();
  if (name == "spline") return spline::spline_covariance_kernel(2).scaled(p.real("sigma2_theta"));
  return gp::spectral_numeric(p.reals("spectral_b"));
}

inline Artifacts cmd_gp(const ExperimentConfig& cfg) {
  const ParamReader p(cfg.params);
  const std::string kname = p.choice("kernel", {"ou", "se", "brownian", "spline", "spectral"});
  const double sigma = p.real("sigma");
  if (!(sigma > 0.0)) throw UsageError("parameter 'sigma' must be positive");
  const std::size_t points = p.count("points", 2);
  const gp::CovarianceKernel kernel = build_gp_kernel(kname, p);

  Eigen::VectorXd x;
  Eigen::VectorXd y;
  const std::string& path = p.text("data");
  if (!path.empty()) {
    const io::Table t = io::read_csv(path);
    const auto xs = t.values("x");
    const auto ys = t.values("y");
    x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    y = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    if (x.size() == 0) throw IoError("data file '" + path + "' has no rows");
  } else {
    const std::size_t n = p.count("n", 1);
    Rng rng = make_rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> xs(n);
    for (auto& v : xs) v = unif(rng);
    std::sort(xs.begin(), xs.end());
    x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(n));
    y.resize(x.size());
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = std::sin(2.0 * std::numbers::pi * x(i)) + sigma * normal(rng);
  }

  const gp::GPRegressionFit fit = gp::gp_fit(x, y, kernel, sigma);
  const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(points), 0.0, 1.0);
  Eigen::VectorXd mean(grid.size());
  Eigen::VectorXd sd(grid.size());
  double representer = 0.0;
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const gp::GpPrediction pr = gp::gp_predict(fit, grid(i));
    mean(i) = pr.mean;
    sd(i) = std::sqrt(pr.variance);
    representer = std::max(representer, std::abs(pr.mean - gp::representer_mean(fit, grid(i))));
  }
  Eigen::MatrixXd a = gp::gram(kernel, x);
  a.diagonal().array() += sigma * sigma;
  const double solve_residual = (a * fit.coefficients() - y).norm() / std::max(y.norm(), 1e-300);

  std::optional<double> spline_gap;
  if (kname == "spline") {
    const spline::SplineFit sf =
        spline::spline_fit(x, y, sigma * sigma, p.real("sigma2_theta"), {2, /*vague_polynomial=*/false});
    double gap = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
      gap = std::max(gap, std::abs(gp::gp_predict(fit, x(i)).mean - spline::spline_predict(sf, x(i))));
    spline_gap = gap;
  }

  Artifacts out;
  out.add_csv("training.csv", io::columns_table({"x", "y"}, {x, y}));
  out.add_csv("predictions.csv", io::columns_table({"x", "mean", "sd"}, {grid, mean, sd}));
  json s;
  s["command"] = cfg.command;
  s["kernel"] = kernel.name();
  s["n"] = x.size();
  s["sigma"] = sigma;
  s["representer_residual"] = number(representer);
  s["solve_residual"] = number(solve_residual);
  s["condition_estimate"] = number(fit.condition_estimate());
  s["warning"] = fit.warning() ? json(*fit.warning()) : json(nullptr);
  s["spline_consistency"] = spline_gap ? number(*spline_gap) : json(nullptr);
  out.add_json("summary.json", s);
  return out;
}

// ----------------------------------------------------------------- calibrate

/// Normalized integral of \p d by tanh-sinh quadrature, split at a few quantiles.
inline double density_integral(const Density1D& d) {
  const auto [lo, hi] = d.effective_support();
  std::vector<double> cuts{lo};
  for (double q : {1e-3, 0.5, 1.0 - 1e-3}) cuts.push_back(d.quantile(q));
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  boost::math::quadrature::tanh_sinh<double> integrator;
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    if (!(cuts[k + 1] > cuts[k])) continue;
    total += integrator.integrate([&](double t) { return d.pdf(t); }, cuts[k], cuts[k + 1], 1e-12);
  }
  return total;
}

inline Artifacts cmd_calibrate(const ExperimentConfig& cfg) {
  const ParamReader p(cfg.params);
  const std::string source = p.choice("source", {"simulate", "file", "linear-demo"});
  const std::string prior_name = p.choice("prior", {"hoadley", "flat", "normal"});
  const double level = p.real("level");
  if (!(level > 0.0 && level < 1.0)) throw UsageError("parameter 'level' must lie in (0, 1)");
  const std::size_t points = p.count("points", 2);

  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::VectorXd y_new;
  std::optional<double> x_true;
  if (source == "linear-demo") {
    x = Eigen::Vector3d(-1.0, 0.0, 1.0);
    y = Eigen::Vector3d(0.0, 1.0, 2.0);
    y_new = Eigen::VectorXd::Constant(1, 2.0);
  } else if (source == "file") {
    const std::string& path = p.text("data");
    if (path.empty()) throw UsageError("source=file needs --data <csv with columns x,y>");
    const io::Table t = io::read_csv(path);
    const auto xs = t.values("x");
    const auto ys = t.values("y");
    x = Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    y = Eigen::Map<const Eigen::VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
    const auto yn = p.reals("y_new");
    if (yn.empty()) throw UsageError("source=file needs --y_new with at least one response");
    y_new = Eigen::Map<const Eigen::VectorXd>(yn.data(), static_cast<Eigen::Index>(yn.size()));
  } else {
    monte_carlo::CalibrationSimConfig sim;
    sim.n = p.count("n", 3);
    sim.m = p.count("m", 1);
    sim.alpha = p.real("intercept");
    sim.beta = p.real("beta");
    sim.sigma = p.real("sigma");
    sim.x_tilde = p.real("x_tilde");
    monte_carlo::validate(sim);
    Rng rng = make_rng(cfg.seed);
    const calibration::CalibrationData d = monte_carlo::simulate_calibration(sim, rng);
    x = d.x().array() + d.offset();
    y = d.y();
    y_new = d.y_new();
    x_true = sim.x_tilde;
  }

  const calibration::CalibrationData data = calibration::CalibrationData::from_raw(x, y, y_new);
  const calibration::CalibrationEstimates est = calibration::fit_calibration(data);
  const double off = data.offset();

  json s;
  s["command"] = cfg.command;
  s["source"] = source;
  s["n"] = est.n;
  s["m"] = est.m;
  s["x_offset"] = off;
  s["x_true"] = x_true ? json(*x_true) : json(nullptr);
  json e;
  e["alpha_hat"] = number(est.alpha_hat);
  e["beta_hat"] = number(est.beta_hat);
  e["gamma_hat"] = number(est.gamma_hat);
  e["delta_hat"] = number(est.delta_hat);
  e["x_classical"] = number(est.x_classical + off);
  e["x_inverse"] = number(est.x_inverse + off);
  e["sigma2_1"] = number(est.sigma2_1);
  e["sigma2_2"] = est.sigma2_2 ? number(*est.sigma2_2) : json(nullptr);
  e["sigma2_pooled"] = number(est.sigma2_pooled);
  e["f_stat"] = number(est.f_stat);
  e["f_stat_infinite"] = std::isinf(est.f_stat);
  s["estimates"] = e;
  s["estimates_units"] = "alpha_hat and gamma_hat refer to centered x; x_classical and x_inverse are in raw x units";

  if (est.m == 1) {
    const calibration::ConfidenceSet set = calibration::confidence_set(est, level);
    json c;
    c["level"] = level;
    c["kind"] = calibration::kind_name(set.kind);
    c["lower"] = set.kind == calibration::ConfidenceSet::Kind::WholeLine ? json(nullptr) : number(set.lower + off);
    c["upper"] = set.kind == calibration::ConfidenceSet::Kind::WholeLine ? json(nullptr) : number(set.upper + off);
    c["uninformative"] = set.uninformative;
    s["confidence_set"] = c;
  } else {
    s["confidence_set"] = nullptr;
  }

  Artifacts out;
  out.add_csv("data.csv", io::columns_table({"x", "y"}, {x, y}));
  if (std::isinf(est.f_stat)) {
    s["posterior"] = json{{"status", "undefined: residual variance is zero (perfect fit)"}};
  } else {
    calibration::Prior prior = calibration::flat_prior();
    if (prior_name == "hoadley") {
      prior = calibration::hoadley_informative_prior(est);
    } else if (prior_name == "normal") {
      const double mu = p.real("prior_mean") - off;
      const double sd = p.real("prior_sd");
      if (!(sd > 0.0)) throw UsageError("parameter 'prior_sd' must be positive");
      prior = {[mu, sd](double v) { return -0.5 * (v - mu) * (v - mu) / (sd * sd); }, "normal"};
    }
    Density1D post = [&] {
      try {
        return calibration::hoadley_posterior(data, prior);
      } catch (const NormalizationFailure& err) {
        throw NormalizationFailure(std::string(err.what()) + " (prior '" + prior_name +
                                   "' is not integrable against the likelihood, whose tails decay like 1/|x|; "
                                   "use a proper prior such as hoadley or normal)");
      }
    }();
    const double lo = post.quantile(1e-4);
    const double hi = post.quantile(1.0 - 1e-4);
    const Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(points), lo, hi);
    Eigen::VectorXd dens(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) dens(i) = post.pdf(grid(i));
    const Eigen::VectorXd raw = grid.array() + off;
    out.add_csv("posterior.csv", io::columns_table({"x", "density"}, {raw, dens}));
    json ps;
    ps["status"] = "ok";
    ps["prior"] = prior_name;
    ps["mean"] = number(post.mean() + off);
    ps["sd"] = number(post.sd());
    ps["median"] = number(post.quantile(0.5) + off);
    ps["integral"] = number(density_integral(post));
    if (prior_name == "hoadley" && est.m == 1) {
      const calibration::TPosterior t = calibration::hoadley_t_posterior(est);
      ps["t_form"] = json{{"location", t.location + off}, {"scale", t.scale}, {"df", t.df}};
    }
    s["posterior"] = ps;
  }
  out.add_json("estimates.json", s);
  return out;
}

// ------------------------------------------------------------- inconsistency

inline Artifacts cmd_inconsistency(const ExperimentConfig& cfg) {
  const ParamReader p(cfg.params);
  const double theta = p.real("theta");
  std::vector<std::size_t> ns;
  for (double v : p.reals("n_values")) {
    if (!(v >= 3.0) || v != std::floor(v)) throw UsageError("n_values must be integers >= 3");
    ns.push_back(static_cast<std::size_t>(v));
  }
  if (ns.empty()) throw UsageError("n_values is empty");
  const std::size_t held = p.count("held_out", 0);
  const std::size_t points = p.count("points", 2);

  std::vector<poisson::InconsistencyRow> rows;
  try {
    rows = poisson::inconsistency_experiment(theta, ns, cfg.seed, held);
  } catch (const NormalizationFailure& err) {
    throw NormalizationFailure(std::string(err.what()) +
                               " (increase the smallest n or theta so the remaining counts exceed the held-out count)");
  }

  Artifacts out;
  io::Table t{{"n", "x_true", "y_held", "posterior_mean", "posterior_sd", "posterior_sd_quadrature"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({static_cast<double>(r.n), r.x_true, static_cast<double>(r.y_held), r.mean, r.sd_closed,
                      r.sd_quadrature});
  out.add_csv("table.csv", t);

  const poisson::PoissonSample sample = poisson::simulate_poisson_sequence(theta, ns.back(), cfg.seed);
  const std::vector<double>& xs = sample.x;
  const std::vector<std::int64_t>& ys = sample.y;
  json curves = json::array();
  double xmax = 0.0;
  for (const auto& r : rows) xmax = std::max(xmax, r.mean + 8.0 * r.sd_closed);
  for (std::size_t n : ns) {
    const poisson::XvalPosterior post = poisson::poisson_xval_posterior(
        std::span<const double>(xs.data(), n), std::span<const std::int64_t>(ys.data(), n), held);
    Eigen::VectorXd gx(static_cast<Eigen::Index>(points));
    Eigen::VectorXd gd(gx.size());
    for (Eigen::Index i = 0; i < gx.size(); ++i) {
      gx(i) = xmax * static_cast<double>(i + 1) / static_cast<double>(points);
      gd(i) = post.density.pdf(gx(i));
    }
    const Eigen::VectorXd truth = Eigen::VectorXd::Constant(gx.size(), xs[held]);
    const std::string name = "density_n" + std::to_string(n) + ".csv";
    out.add_csv(name, io::columns_table({"x", "density", "x_true"}, {gx, gd, truth}));
    curves.push_back(name);
  }

  json s;
  s["command"] = cfg.command;
  s["theta"] = theta;
  s["held_out"] = held;
  s["x_true"] = rows.front().x_true;
  s["y_held"] = rows.front().y_held;
  s["sd_ratio_last_over_first"] = number(rows.back().sd_closed / rows.front().sd_closed);
  double gap = 0.0;
  for (const auto& r : rows) gap = std::max(gap, std::abs(r.sd_quadrature - r.sd_closed) / r.sd_closed);
  s["max_relative_sd_gap_quadrature_vs_closed"] = number(gap);
  s["density_files"] = curves;
  out.add_json("summary.json", s);
  return out;
}

// ------------------------------------------------------------ coverage, risk

inline monte_carlo::CalibrationSimConfig sim_config(const ParamReader& p) {
  monte_carlo::CalibrationSimConfig c;
  c.n = p.count("n", 3);
  c.m = p.count("m", 1);
  c.alpha = p.real("intercept");
  c.beta = p.real("beta");
  c.sigma = p.real("sigma");
  c.x_tilde = p.real("x_tilde");
  c.level = p.real("level");
  c.replications = p.count("replications", 2);
  monte_carlo::validate(c);
  return c;
}

inline io::Table replication_table(const std::vector<monte_carlo::ReplicationRecord>& recs) {
  io::Table t{{"replication", "x_classical", "x_inverse", "set_kind", "lower", "upper", "covered"}, {}};
  t.rows.reserve(recs.size());
  for (const auto& r : recs) {
    const bool whole = r.kind == calibration::ConfidenceSet::Kind::WholeLine;
    const double inf = std::numeric_limits<double>::infinity();
    t.rows.push_back({static_cast<double>(r.replication), r.x_classical, r.x_inverse, static_cast<double>(r.kind),
                      whole ? -inf : r.lower, whole ? inf : r.upper, r.covered ? 1.0 : 0.0});
  }
  return t;
}

inline Artifacts cmd_coverage(const ExperimentConfig& cfg) {
  const ParamReader p(cfg.params);
  const auto c = sim_config(p);
  if (c.m != 1) throw UsageError("coverage: the confidence set is defined for m = 1");
  const auto workers = static_cast<unsigned>(p.count("workers", 0));
  const auto recs = monte_carlo::run_replications(c, cfg.seed, workers);
  const auto sum = monte_carlo::summarize_coverage(recs);
  Artifacts out;
  out.add_csv("replications.csv", replication_table(recs));
  json s;
  s["command"] = cfg.command;
  s["replications"] = sum.replications;
  s["level"] = c.level;
  s["coverage"] = sum.coverage;
  s["intervals"] = sum.intervals;
  s["complements"] = sum.complements;
  s["whole_lines"] = sum.whole_lines;
  s["set_kind_codes"] = json{{"0", "interval"}, {"1", "complement"}, {"2", "whole_line"}};
  out.add_json("summary.json", s);
  return out;
}

inline Artifacts cmd_risk(const ExperimentConfig& cfg) {
  const ParamReader p(cfg.params);
  const auto c = sim_config(p);
  const auto workers = static_cast<unsigned>(p.count("workers", 0));
  const auto recs = monte_carlo::run_replications(c, cfg.seed, workers);
  const auto r = monte_carlo::summarize_risk(recs, c.x_tilde);
  Artifacts out;
  out.add_csv("replications.csv", replication_table(recs));
  json s;
  s["command"] = cfg.command;
  s["replications"] = r.replications;
  s["x_tilde"] = c.x_tilde;
  s["mse_inverse_first_half"] = number(r.mse_inverse_half);
  s["mse_inverse_full"] = number(r.mse_inverse_full);
  s["mse_inverse_relative_change"] = number(std::abs(r.mse_inverse_half - r.mse_inverse_full) / r.mse_inverse_full);
  s["mse_classical_first_half"] = number(r.mse_classical_half);
  s["mse_classical_full"] = number(r.mse_classical_full);
  s["max_abs_classical"] = number(r.max_abs_classical);
  s["median_abs_classical"] = number(r.median_abs_classical);
  s["max_over_median_classical"] = number(r.max_abs_classical / r.median_abs_classical);
  out.add_json("summary.json", s);
  return out;
}

// ------------------------------------------------------------------- driver

/// Runs the command and returns its artifacts (manifest included) without
/// touching the file system.
inline Artifacts run(const ExperimentConfig& cfg) {
  find_command(cfg.command);
  Artifacts a;
  if (cfg.command == "demo-linear") a = cmd_demo_linear(cfg);
  if (cfg.command == "gp") a = cmd_gp(cfg);
  if (cfg.command == "calibrate") a = cmd_calibrate(cfg);
  if (cfg.command == "inconsistency") a = cmd_inconsistency(cfg);
  if (cfg.command == "coverage") a = cmd_coverage(cfg);
  if (cfg.command == "risk") a = cmd_risk(cfg);
  a.add_json("manifest.json", manifest(cfg));
  return a;
}

inline void write_artifacts(const std::string& dir, const Artifacts& a) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
  for (const auto& [name, content] : a.files) io::write_text((std::filesystem::path(dir) / name).string(), content);
}

/// Exit status: 0 success, 2 usage error, 3 I/O error, 1 any other failure.
inline int execute(const ExperimentConfig& cfg, std::ostream& log = std::cout, std::ostream& err = std::cerr) {
  try {
    const Artifacts a = run(cfg);
    write_artifacts(cfg.output_dir, a);
    log << "wrote " << a.files.size() << " files to " << cfg.output_dir << "\n";
    return 0;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace bayesinv::cli

#endif  // BAYESINV_TOOLS_EXPERIMENTS_HPP
