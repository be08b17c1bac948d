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

#include "least_squares.h"

#include <cmath>
#include <limits>

#include <unsupported/Eigen/NonLinearOptimization>

namespace homodyne::internal {
namespace {

struct Functor {
  const LeastSquaresProblem* problem;

  int inputs() const { return problem->n_params; }
  int values() const { return problem->n_residuals; }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& fvec) const {
    problem->residuals(x, fvec);
    return fvec.allFinite() ? 0 : -1;
  }
  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& fjac) const {
    problem->jacobian(x, fjac);
    return fjac.allFinite() ? 0 : -1;
  }
};

}  // namespace

LeastSquaresResult solve_least_squares(const LeastSquaresProblem& problem,
                                       Eigen::VectorXd x0, int max_iterations) {
  Functor functor{&problem};
  Eigen::LevenbergMarquardt<Functor> lm(functor);
  lm.parameters.ftol = 1e-15;
  lm.parameters.xtol = 1e-15;
  lm.parameters.maxfev = max_iterations * (problem.n_params + 1);
  const auto status = lm.minimize(x0);

  LeastSquaresResult result;
  result.x = x0;
  result.status = static_cast<int>(status);
  result.evaluations = static_cast<int>(lm.nfev);
  Eigen::VectorXd r(problem.n_residuals);
  problem.residuals(result.x, r);
  result.rss = r.squaredNorm();
  using Space = Eigen::LevenbergMarquardtSpace::Status;
  result.converged = std::isfinite(result.rss) &&
                     status != Space::ImproperInputParameters &&
                     status != Space::TooManyFunctionEvaluation &&
                     status != Space::UserAsked && status != Space::NotStarted &&
                     status != Space::Running;
  return result;
}

Eigen::MatrixXd scaled_covariance(const Eigen::MatrixXd& jacobian, double rss) {
  const double dof = static_cast<double>(jacobian.rows() - jacobian.cols());
  const Eigen::MatrixXd normal = jacobian.transpose() * jacobian;
  const double s2 = dof > 0 ? rss / dof : std::numeric_limits<double>::quiet_NaN();
  return s2 * normal.ldlt().solve(
                  Eigen::MatrixXd::Identity(normal.rows(), normal.cols()));
}

double normal_matrix_condition(const Eigen::MatrixXd& jacobian) {
  Eigen::MatrixXd scaled = jacobian;
  for (Eigen::Index c = 0; c < scaled.cols(); ++c) {
    const double norm = scaled.col(c).norm();
    if (!(norm > 0.0)) return std::numeric_limits<double>::infinity();
    scaled.col(c) /= norm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled);
  const auto& s = svd.singularValues();
  const double smallest = s(s.size() - 1);
  if (!(smallest > 0.0)) return std::numeric_limits<double>::infinity();
  const double ratio = s(0) / smallest;
  return ratio * ratio;
}

}  // namespace homodyne::internal
