/*
 * Copyright 2026 The Uplift Policy Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef UPLIFT_LINEAR_H_
#define UPLIFT_LINEAR_H_

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "uplift/tree.h"

namespace uplift {

// Centered second-moment statistics of (X, y); enough to solve least squares
// and lasso for any penalty without touching rows again.
struct Gram {
  double n = 0.0;
  double y_mean = 0.0;
  double y_css = 0.0;           // sum (y - y_mean)^2
  Eigen::VectorXd x_mean;
  Eigen::MatrixXd cxx;          // centered X'X
  Eigen::VectorXd cxy;          // centered X'y
};

Gram ComputeGram(const Eigen::MatrixXd& x, std::span<const double> y);
// Weighted 0/1 rows: weight[g] copies of row g with outcome sum ysum[g].
Gram ComputeGram(const FeatureRows& rows, std::span<const double> weight,
                 std::span<const double> ysum, std::span<const double> yysum);

struct LinearFit {
  double intercept = 0.0;
  Eigen::VectorXd coef;
  int sweeps = 0;
};

inline constexpr double kOlsJitter = 1e-8;

// Least squares with an unpenalized intercept. The normal equations get a
// 1e-8 ridge so rank-deficient dummy designs still solve.
LinearFit SolveOls(const Gram& g);

// Lasso on standardized columns (population standard deviation):
//   minimize 1/(2n) ||y - b0 - Z b||^2 + lambda ||b||_1
// by covariance-update coordinate descent until the largest coefficient
// change is below `tolerance`. Coefficients come back on the original
// column scale. Constant columns get coefficient 0.
LinearFit SolveLasso(const Gram& g, double lambda, double tolerance = 1e-7,
                     const LinearFit* warm_start = nullptr,
                     int max_sweeps = 100000);

// Smallest penalty at which every coefficient is zero:
// max_j |<z_j, y - ybar>| / n.
double LassoLambdaMax(const Gram& g);

// `count` log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> LassoLambdaPath(double lambda_max, int count = 98,
                                    double ratio = 1e-5);

LinearFit FitOlsDense(const Eigen::MatrixXd& x, std::span<const double> y);
LinearFit FitLassoDense(const Eigen::MatrixXd& x, std::span<const double> y,
                        double lambda);

}  // namespace uplift

#endif  // UPLIFT_LINEAR_H_
