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

#include "uplift/linear.h"

#include <cmath>

#include "uplift/error.h"

namespace uplift {

Gram ComputeGram(const Eigen::MatrixXd& x, std::span<const double> y) {
  if (x.rows() != static_cast<Eigen::Index>(y.size())) {
    throw DataError("design and outcome lengths differ");
  }
  if (x.rows() == 0) throw DataError("least squares needs at least one row");
  Gram g;
  g.n = static_cast<double>(x.rows());
  Eigen::Map<const Eigen::VectorXd> yv(y.data(), y.size());
  g.y_mean = yv.mean();
  g.x_mean = x.colwise().mean().transpose();
  Eigen::MatrixXd xc = x.rowwise() - g.x_mean.transpose();
  Eigen::VectorXd yc = yv.array() - g.y_mean;
  g.cxx = xc.transpose() * xc;
  g.cxy = xc.transpose() * yc;
  g.y_css = yc.squaredNorm();
  return g;
}

Gram ComputeGram(const FeatureRows& rows, std::span<const double> weight,
                 std::span<const double> ysum, std::span<const double> yysum) {
  const int p = rows.num_columns();
  Gram g;
  Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(p, p);
  Eigen::VectorXd xs = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd xty = Eigen::VectorXd::Zero(p);
  double n = 0.0, sy = 0.0, syy = 0.0;
  for (int r = 0; r < rows.size(); ++r) {
    const double w = weight[r];
    if (w <= 0.0) continue;
    n += w;
    sy += ysum[r];
    syy += yysum[r];
    auto active = rows.row(r);
    for (int a : active) {
      xs[a] += w;
      xty[a] += ysum[r];
      for (int b : active) xtx(a, b) += w;
    }
  }
  if (n <= 0.0) throw DataError("least squares needs at least one row");
  g.n = n;
  g.y_mean = sy / n;
  g.x_mean = xs / n;
  g.cxx = xtx - n * g.x_mean * g.x_mean.transpose();
  g.cxy = xty - n * g.y_mean * g.x_mean;
  g.y_css = std::max(0.0, syy - n * g.y_mean * g.y_mean);
  return g;
}

LinearFit SolveOls(const Gram& g) {
  const Eigen::Index p = g.cxx.rows();
  LinearFit fit;
  if (p == 0) {
    fit.coef = Eigen::VectorXd();
    fit.intercept = g.y_mean;
    return fit;
  }
  Eigen::MatrixXd a = g.cxx;
  a.diagonal().array() += kOlsJitter;
  fit.coef = a.ldlt().solve(g.cxy);
  fit.intercept = g.y_mean - g.x_mean.dot(fit.coef);
  return fit;
}

namespace {

struct Standardized {
  Eigen::VectorXd sd;       // 0 marks a constant column
  Eigen::MatrixXd corr;     // standardized covariance
  Eigen::VectorXd target;   // <z_j, y - ybar> / n
};

Standardized Standardize(const Gram& g) {
  const Eigen::Index p = g.cxx.rows();
  Standardized s;
  s.sd.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double var = g.cxx(j, j) / g.n;
    s.sd[j] = var > 1e-14 ? std::sqrt(var) : 0.0;
  }
  s.corr = Eigen::MatrixXd::Zero(p, p);
  s.target = Eigen::VectorXd::Zero(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (s.sd[j] == 0.0) continue;
    s.target[j] = g.cxy[j] / (g.n * s.sd[j]);
    for (Eigen::Index k = 0; k < p; ++k) {
      if (s.sd[k] == 0.0) continue;
      s.corr(j, k) = g.cxx(j, k) / (g.n * s.sd[j] * s.sd[k]);
    }
  }
  return s;
}

double SoftThreshold(double z, double lambda) {
  if (z > lambda) return z - lambda;
  if (z < -lambda) return z + lambda;
  return 0.0;
}

}  // namespace

LinearFit SolveLasso(const Gram& g, double lambda, double tolerance,
                     const LinearFit* warm_start, int max_sweeps) {
  if (!(lambda >= 0.0)) throw ConfigError("lasso penalty must be >= 0");
  const Eigen::Index p = g.cxx.rows();
  const Standardized s = Standardize(g);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  if (warm_start != nullptr && warm_start->coef.size() == p) {
    b = warm_start->coef.cwiseProduct(s.sd);
  }
  // grad = target - corr * b, kept current across coordinate updates.
  Eigen::VectorXd grad = s.target - s.corr * b;
  LinearFit fit;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (s.sd[j] == 0.0) continue;
      const double cjj = s.corr(j, j);
      const double updated = SoftThreshold(grad[j] + cjj * b[j], lambda) / cjj;
      const double delta = updated - b[j];
      if (delta == 0.0) continue;
      grad -= delta * s.corr.col(j);
      b[j] = updated;
      max_change = std::max(max_change, std::abs(delta));
    }
    fit.sweeps = sweep + 1;
    if (max_change < tolerance) break;
  }
  fit.coef.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    fit.coef[j] = s.sd[j] == 0.0 ? 0.0 : b[j] / s.sd[j];
  }
  fit.intercept = g.y_mean - g.x_mean.dot(fit.coef);
  return fit;
}

double LassoLambdaMax(const Gram& g) {
  const Standardized s = Standardize(g);
  return s.target.size() == 0 ? 0.0 : s.target.cwiseAbs().maxCoeff();
}

std::vector<double> LassoLambdaPath(double lambda_max, int count, double ratio) {
  if (count < 1) throw ConfigError("lambda path needs at least one value");
  std::vector<double> path;
  if (count == 1) return {lambda_max};
  const double hi = std::log(lambda_max);
  const double lo = std::log(lambda_max * ratio);
  for (int k = 0; k < count; ++k) {
    path.push_back(std::exp(hi + (lo - hi) * k / (count - 1)));
  }
  return path;
}

LinearFit FitOlsDense(const Eigen::MatrixXd& x, std::span<const double> y) {
  return SolveOls(ComputeGram(x, y));
}

LinearFit FitLassoDense(const Eigen::MatrixXd& x, std::span<const double> y,
                        double lambda) {
  return SolveLasso(ComputeGram(x, y), lambda);
}

}  // namespace uplift
