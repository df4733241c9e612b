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

#include "uplift/stats.h"

#include <cmath>
#include <limits>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "uplift/error.h"

namespace uplift {
namespace {

struct Moments {
  double n = 0, mean = 0, var = 0;  // unbiased variance
};

Moments Describe(std::span<const double> x) {
  Moments m;
  m.n = static_cast<double>(x.size());
  if (x.empty()) return m;
  double s = 0;
  for (double v : x) s += v;
  m.mean = s / m.n;
  double ss = 0;
  for (double v : x) ss += (v - m.mean) * (v - m.mean);
  m.var = x.size() > 1 ? ss / (m.n - 1) : 0.0;
  return m;
}

// t for a mean difference with standard error se.
void Finish(TTestResult* r) {
  if (r->std_error > 0) {
    r->t = r->mean_diff / r->std_error;
  } else if (r->mean_diff == 0) {
    r->t = 0;
  } else {
    r->t = std::copysign(std::numeric_limits<double>::infinity(), r->mean_diff);
  }
  r->p_value = StudentTwoSidedP(r->t, r->df);
}

}  // namespace

double StudentTwoSidedP(double t, double df) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return 0.0;
  if (t == 0) return 1.0;
  if (!(df > 0)) return std::numeric_limits<double>::quiet_NaN();
  boost::math::students_t dist(df);
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

TTestResult WelchTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw DataError("Welch t-test needs at least two units per group");
  }
  const Moments ma = Describe(a), mb = Describe(b);
  TTestResult r;
  r.mean_diff = ma.mean - mb.mean;
  const double va = ma.var / ma.n, vb = mb.var / mb.n;
  r.std_error = std::sqrt(va + vb);
  const double den = va * va / (ma.n - 1) + vb * vb / (mb.n - 1);
  r.df = den > 0 ? (va + vb) * (va + vb) / den : ma.n + mb.n - 2;
  Finish(&r);
  return r;
}

TTestResult PairedTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("paired samples differ in length");
  if (a.size() < 2) throw DataError("paired t-test needs at least two pairs");
  std::vector<double> d(a.size());
  for (size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const Moments m = Describe(d);
  TTestResult r;
  r.mean_diff = m.mean;
  r.std_error = std::sqrt(m.var / m.n);
  r.df = m.n - 1;
  Finish(&r);
  return r;
}

ChiSquareResult ChiSquareIndependence(std::span<const int64_t> table, int rows,
                                      int cols) {
  if (static_cast<int64_t>(table.size()) != int64_t{rows} * cols) {
    throw DataError("contingency table has the wrong size");
  }
  std::vector<double> rs(rows, 0), cs(cols, 0);
  double total = 0;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double v = static_cast<double>(table[r * cols + c]);
      rs[r] += v;
      cs[c] += v;
      total += v;
    }
  }
  ChiSquareResult out;
  int live_rows = 0, live_cols = 0;
  for (double v : rs) live_rows += v > 0;
  for (double v : cs) live_cols += v > 0;
  out.df = static_cast<double>((live_rows - 1) * (live_cols - 1));
  if (out.df <= 0) return out;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (rs[r] == 0 || cs[c] == 0) continue;
      const double e = rs[r] * cs[c] / total;
      const double d = static_cast<double>(table[r * cols + c]) - e;
      out.statistic += d * d / e;
    }
  }
  boost::math::chi_squared dist(out.df);
  out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
  return out;
}

}  // namespace uplift
