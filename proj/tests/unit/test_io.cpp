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


#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "bayesinv/io.hpp"

namespace {

using namespace bayesinv;
using namespace bayesinv::io;

TEST(Csv, RoundTripsExactly) {
  const Eigen::VectorXd a = (Eigen::VectorXd(3) << 0.1, 1.0 / 3.0, -2e-300).finished();
  const Eigen::VectorXd b = (Eigen::VectorXd(3) << std::numeric_limits<double>::infinity(),
                             -std::numeric_limits<double>::infinity(), 7.0)
                                .finished();
  const Table t = columns_table({"a", "b"}, {a, b});
  std::istringstream in(to_csv(t));
  const Table back = parse_csv(in);
  EXPECT_EQ(back.header, t.header);
  ASSERT_EQ(back.rows.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.rows[i][0], a(static_cast<Eigen::Index>(i)));
    EXPECT_EQ(back.rows[i][1], b(static_cast<Eigen::Index>(i)));
  }
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST(Csv, ToleratesWhitespaceAndCrLf) {
  std::istringstream in("x , y\r\n1, 2\r\n\r\n3 ,4.5\n");
  const Table t = parse_csv(in);
  EXPECT_EQ(t.values("y"), (std::vector<double>{2.0, 4.5}));
  EXPECT_EQ(t.column("x"), 0u);
}

TEST(Csv, Errors) {
  std::istringstream bad("x,y\n1,abc\n");
  EXPECT_THROW(parse_csv(bad), IoError);
  std::istringstream ragged("x,y\n1\n");
  EXPECT_THROW(parse_csv(ragged), IoError);
  std::istringstream empty("");
  EXPECT_THROW(parse_csv(empty), IoError);
  std::istringstream ok("x\n1\n");
  EXPECT_THROW(parse_csv(ok).column("y"), IoError);
  EXPECT_THROW(read_csv("/nonexistent/dir/data.csv"), IoError);
  Table t{{"a", "b"}, {{1.0}}};
  EXPECT_THROW(to_csv(t), ShapeError);
  EXPECT_THROW(columns_table({"a"}, {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2)}), ShapeError);
}

TEST(Csv, MatrixTable) {
  const Eigen::MatrixXd m = (Eigen::MatrixXd(2, 3) << 1, 2, 3, 4, 5, 6).finished();
  const Table t = matrix_table(m);
  EXPECT_EQ(t.header, (std::vector<std::string>{"c0", "c1", "c2"}));
  EXPECT_EQ(t.rows[1][2], 6.0);
}

}  // namespace
