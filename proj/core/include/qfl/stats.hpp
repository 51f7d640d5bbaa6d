// Copyright 2026 The qfl authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

namespace qfl {

/// One-sample Kolmogorov-Smirnov statistic against Uniform[0, hi).
double ks_statistic_uniform(std::vector<double> samples, double hi);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b);

/**
 * Asymptotic Kolmogorov p-value Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 l^2}
 * evaluated at lambda = (sqrt(n_eff) + 0.12 + 0.11/sqrt(n_eff)) * d.
 */
double ks_p_value(double d, double n_effective);

/// Upper regularized incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// Chi-squared survival function with `dof` degrees of freedom.
double chi2_p_value(double x, int dof);

/// Chi-squared p-value for uniform bits: counts n0/n1 against a fair coin.
double chi2_bit_p_value(std::uint64_t n0, std::uint64_t n1);

/// Chi-squared p-value of bin counts against the uniform multinomial.
double chi2_uniform_bins_p_value(const std::vector<std::uint64_t> &counts);

}  // namespace qfl
