// Copyright 2026 The Homodyne Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef HOMODYNE_SRC_LEAST_SQUARES_H_
#define HOMODYNE_SRC_LEAST_SQUARES_H_

#include <functional>

#include <Eigen/Dense>

namespace homodyne::internal {

// Residual vector r(x) and its Jacobian dr/dx.
struct LeastSquaresProblem {
  int n_params = 0;
  int n_residuals = 0;
  std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> residuals;
  std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)> jacobian;
};

struct LeastSquaresResult {
  Eigen::VectorXd x;
  double rss = 0.0;
  int status = 0;
  int evaluations = 0;
  bool converged = false;
};

// Levenberg-Marquardt (MINPACK lmder via Eigen). `max_iterations` bounds
// the number of Jacobian evaluations.
LeastSquaresResult solve_least_squares(const LeastSquaresProblem& problem,
                                       Eigen::VectorXd x0, int max_iterations);

// Covariance s^2 (J^T J)^-1 with s^2 = rss / (n - p).
Eigen::MatrixXd scaled_covariance(const Eigen::MatrixXd& jacobian, double rss);

// Condition number of J^T J after scaling every column to unit norm;
// infinity if a column vanishes.
double normal_matrix_condition(const Eigen::MatrixXd& jacobian);

}  // namespace homodyne::internal

#endif  // HOMODYNE_SRC_LEAST_SQUARES_H_
