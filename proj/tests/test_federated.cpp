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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qfl/federated.hpp"
#include "test_helpers.hpp"

using namespace qfl;

namespace {
std::vector<LabeledSample> toy_dataset(int n_qubits, int count, Rng &rng) {
  std::vector<LabeledSample> data;
  for (int i = 0; i < count; ++i) {
    LabeledSample s{test::random_state(n_qubits, rng), {0.0, 0.0}};
    s.label[i % 2] = 1.0;
    data.push_back(std::move(s));
  }
  return data;
}
}  // namespace

TEST_CASE("schedule: single client, reproducibility, multinomial bounds") {
  Rng rng(1);
  const auto ones = make_schedule(20, 1, rng);
  for (int s : ones) CHECK(s == 0);

  Rng a(2), b(2);
  CHECK(make_schedule(1000, 7, a) == make_schedule(1000, 7, b));

  Rng c(3);
  const int T = 100000, N = 10;
  const auto big = make_schedule(T, N, c);
  std::vector<int> counts(N, 0);
  for (int s : big) ++counts[s];
  const double expected = static_cast<double>(T) / N;
  const double sigma = std::sqrt(T * 0.1 * 0.9);
  for (int k = 0; k < N; ++k) {
    CHECK(std::abs(counts[k] - expected) < 3.0 * sigma);
  }
}

TEST_CASE("per-element clipping follows the max formula") {
  GradientVector g;
  g.values = {0.02, -0.02, 0.005};
  const auto clipped = clip_gradient(g, 0.01);
  CHECK(clipped.values[0] == doctest::Approx(0.01));
  CHECK(clipped.values[1] == doctest::Approx(-0.01));
  CHECK(clipped.values[2] == doctest::Approx(0.005));

  // Every element ends inside [-R, R].
  Rng rng(4);
  GradientVector big;
  big.values.resize(100);
  for (auto &v : big.values) v = rng.normal();
  const auto c = clip_gradient(big, 0.01);
  for (double v : c.values) {
    CHECK(std::abs(v) <= 0.01 + 1e-15);
  }

  // L2 mode caps the vector norm instead.
  const auto l2 = clip_gradient(big, 0.5, ClipMode::kL2);
  double norm = 0.0;
  for (double v : l2.values) norm += v * v;
  CHECK(std::sqrt(norm) <= 0.5 + 1e-12);
}

TEST_CASE("dp noise: infinity is the identity, variance matches (2R/mu)^2") {
  GradientVector g;
  g.values = {0.004, -0.002, 0.0};
  Rng rng(5);
  const auto same = add_dp_noise(g, 0.01, std::numeric_limits<double>::infinity(),
                                 rng);
  CHECK(same.values == g.values);

  const double R = 0.01, mu = 1.0;
  const int n = 100000;
  GradientVector zero;
  zero.values.assign(1, 0.0);
  Rng rng2(6);
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = add_dp_noise(zero, R, mu, rng2).values[0];
    sum += v;
    sum_sq += v * v;
  }
  const double variance = sum_sq / n - (sum / n) * (sum / n);
  const double expected = (2.0 * R / mu) * (2.0 * R / mu);
  CHECK(std::abs(variance - expected) / expected < 0.05);

  // Laplace option with the same scale parameter has variance 2*(2R/mu)^2.
  Rng rng3(7);
  sum = sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v =
        add_dp_noise(zero, R, mu, rng3, DpNoiseKind::kLaplace).values[0];
    sum += v;
    sum_sq += v * v;
  }
  const double lap_var = sum_sq / n - (sum / n) * (sum / n);
  CHECK(std::abs(lap_var - 2.0 * expected) / (2.0 * expected) < 0.05);

  // Seeded reproducibility.
  Rng a(8), b(8);
  CHECK(add_dp_noise(g, R, mu, a).values == add_dp_noise(g, R, mu, b).values);

  // Monotone privacy knob: smaller mu, larger perturbation scale.
  double prev = 0.0;
  for (double m : {8.0, 4.0, 2.0, 1.0}) {
    const double scale = 2.0 * R / m;
    CHECK(scale > prev);
    prev = scale;
  }
}

TEST_CASE("N=1 federation with no noise reduces to single-party training") {
  Rng data_rng(9);
  auto data = toy_dataset(2, 12, data_rng);
  const auto tpl = build_classifier(2, 2, {0});

  TrainConfig single_cfg;
  single_cfg.iterations = 8;
  single_cfg.batch_size = 4;
  single_cfg.learning_rate = 0.01;
  const auto single = train_single(data, data, tpl, single_cfg, 77);

  FederationConfig fed_cfg;
  fed_cfg.n_clients = 1;
  fed_cfg.iterations = 8;
  fed_cfg.batch_size = 4;
  fed_cfg.learning_rate = 0.01;
  fed_cfg.clip_bound = 1e9;  // clipping inactive
  fed_cfg.noise_mu = std::numeric_limits<double>::infinity();
  std::vector<ClientShard> shards;
  shards.emplace_back(0, data, 77);
  const auto fed = federated_train(shards, tpl, fed_cfg, data, 77);

  REQUIRE(single.params.theta.size() == fed.params.theta.size());
  for (std::size_t j = 0; j < single.params.theta.size(); ++j) {
    CHECK(single.params.theta[j] == fed.params.theta[j]);
  }
}

TEST_CASE("uploaded updates honor the clip bound before noise") {
  Rng data_rng(10);
  auto data = toy_dataset(2, 8, data_rng);
  const auto tpl = build_classifier(2, 2, {0});
  Rng init(11, rng_tag::kParamInit);
  const auto params = init_params(tpl, init);

  FederationConfig cfg;
  cfg.n_clients = 1;
  cfg.batch_size = 4;
  cfg.clip_bound = 0.01;
  cfg.noise_mu = std::numeric_limits<double>::infinity();  // isolate clipping
  ClientShard shard(0, data, 12);
  const auto update = shard.compute_update(tpl, params, cfg, cfg.noise_mu);
  for (double v : update.grad.values) {
    CHECK(std::abs(v) <= cfg.clip_bound + 1e-15);
  }
}

TEST_CASE("federated training runs with per-client noise and heterogeneous mu") {
  Rng data_rng(13);
  auto data = toy_dataset(2, 40, data_rng);
  const auto tpl = build_classifier(2, 2, {0});

  FederationConfig cfg;
  cfg.n_clients = 4;
  cfg.iterations = 10;
  cfg.batch_size = 4;
  cfg.learning_rate = 0.01;
  cfg.clip_bound = 0.01;
  cfg.per_client_mu = std::vector<double>{1.0, 0.9, 0.8, 0.7};
  Rng shard_rng(14);
  auto split_data = data;
  std::vector<ClientShard> shards;
  for (int c = 0; c < 4; ++c) {
    std::vector<LabeledSample> shard_samples(split_data.begin() + c * 8,
                                             split_data.begin() + (c + 1) * 8);
    shards.emplace_back(c, std::move(shard_samples), 15);
  }
  std::vector<LabeledSample> validation(split_data.begin() + 32, split_data.end());
  const auto res = federated_train(shards, tpl, cfg, validation, 15);
  REQUIRE(res.history.size() == 10);
  for (const auto &r : res.history) {
    CHECK(r.client_id >= 0);
    CHECK(r.client_id < 4);
    CHECK(r.mu_used == doctest::Approx((*cfg.per_client_mu)[r.client_id]));
  }
  // Schedule recorded alongside.
  CHECK(res.schedule.size() == 10);
}

TEST_CASE("federated_train validates shard count and batch size") {
  Rng data_rng(16);
  auto data = toy_dataset(2, 8, data_rng);
  const auto tpl = build_classifier(2, 1, {0});
  FederationConfig cfg;
  cfg.n_clients = 2;
  cfg.batch_size = 4;
  std::vector<ClientShard> shards;
  shards.emplace_back(0, data, 1);
  std::vector<LabeledSample> validation;
  CHECK_THROWS_AS(federated_train(shards, tpl, cfg, validation, 1),
                  std::exception);
  CHECK_THROWS_AS(ClientShard(0, {}, 1), std::exception);
}
