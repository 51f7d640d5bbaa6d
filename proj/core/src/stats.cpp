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

#include "qfl/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qfl {

double ks_statistic_uniform(std::vector<double> samples, double hi) {
  if (samples.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = samples[i] / hi;
    d = std::max(d, std::abs((i + 1) / n - cdf));
    d = std::max(d, std::abs(cdf - i / n));
  }
  return d;
}

double ks_statistic_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0.0;
  std::size_t i = 0, j = 0;
  // Consume whole tie groups before comparing the empirical CDFs, so
  // atom-valued samples are handled correctly.
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

double ks_p_value(double d, double n_effective) {
  const double sn = std::sqrt(n_effective);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

// Series and continued-fraction evaluation of the incomplete gamma
// functions (Numerical Recipes style).
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_p_value(double x, int dof) {
  if (dof < 1) throw std::invalid_argument("chi2: dof < 1");
  return gamma_q(dof / 2.0, x / 2.0);
}

double chi2_bit_p_value(std::uint64_t n0, std::uint64_t n1) {
  const double n = static_cast<double>(n0 + n1);
  if (n == 0.0) throw std::invalid_argument("chi2: no samples");
  const double expected = n / 2.0;
  const double x = (n0 - expected) * (n0 - expected) / expected +
                   (n1 - expected) * (n1 - expected) / expected;
  return chi2_p_value(x, 1);
}

double chi2_uniform_bins_p_value(const std::vector<std::uint64_t> &counts) {
  if (counts.size() < 2) throw std::invalid_argument("chi2: need >=2 bins");
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  if (n == 0.0) throw std::invalid_argument("chi2: no samples");
  const double expected = n / counts.size();
  double x = 0.0;
  for (auto c : counts) {
    x += (c - expected) * (c - expected) / expected;
  }
  return chi2_p_value(x, static_cast<int>(counts.size()) - 1);
}

}  // namespace qfl
