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

#ifndef UPLIFT_STATS_H_
#define UPLIFT_STATS_H_

#include <cstdint>
#include <span>
#include <vector>

namespace uplift {

struct TTestResult {
  double mean_diff = 0.0;
  double std_error = 0.0;
  double t = 0.0;
  double df = 0.0;
  double p_value = 1.0;  // two-sided
};

// Two-sided p-value of a Student t statistic. Infinite t gives 0.
double StudentTwoSidedP(double t, double df);

// Welch unequal-variance test of mean(a) - mean(b).
TTestResult WelchTTest(std::span<const double> a, std::span<const double> b);

// Paired test on a - b. With zero spread the statistic is 0 when the mean
// difference is 0 (p = 1) and infinite otherwise (p = 0).
TTestResult PairedTTest(std::span<const double> a, std::span<const double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

// Pearson test of independence on a rows x cols contingency table.
// Empty rows and columns are dropped.
ChiSquareResult ChiSquareIndependence(std::span<const int64_t> table, int rows,
                                      int cols);

}  // namespace uplift

#endif  // UPLIFT_STATS_H_
