#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "p2ptrust/errors.hpp"
#include "p2ptrust/estimator.hpp"

using namespace p2ptrust;

TEST_CASE("first sample seeds the exponential average") {
  const auto s = update_ema(EstimatorState(0.1), 0.7);
  CHECK(s.ema_mean() == 0.7);
  CHECK(s.sample_count() == 1);
}

TEST_CASE("exponential average update rule") {
  auto s = update_ema(EstimatorState(0.1), 1.0);
  s = update_ema(s, 0.0);
  CHECK(s.ema_mean() == doctest::Approx(0.9));

  auto forget = update_ema(update_ema(EstimatorState(1.0), 0.9), 0.42);
  CHECK(forget.ema_mean() == 0.42);
}

TEST_CASE("update_ema leaves its input untouched") {
  const EstimatorState before = update_ema(EstimatorState(0.5), 0.2);
  const EstimatorState after = update_ema(before, 1.0);
  CHECK(before.sample_count() == 1);
  CHECK(before.ema_mean() == 0.2);
  CHECK(after.sample_count() == 2);
}

TEST_CASE("estimator state rejects bad inputs") {
  CHECK_THROWS_AS(EstimatorState(0.0), DomainError);
  CHECK_THROWS_AS(EstimatorState(1.5), DomainError);
  CHECK_THROWS_AS(EstimatorState(0.1, 0), DomainError);
  CHECK_THROWS_AS(update_ema(EstimatorState(0.1), 1.01), DomainError);
  CHECK_THROWS_AS(update_ema(EstimatorState(0.1), -0.01), DomainError);
  CHECK_THROWS_AS(update_ema(EstimatorState(0.1), std::nan("")), DomainError);
}

TEST_CASE("exponential average matches explicit geometric weights") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double alpha : {0.1, 0.01, 0.001, 0.3, 1.0}) {
    for (int k = 1; k <= 20; ++k) {
      std::vector<double> xs(k);
      for (auto& x : xs) x = u(gen);
      EstimatorState s(alpha);
      for (double x : xs) {
        s = update_ema(s, x);
        REQUIRE(s.ema_mean() >= 0.0);
        REQUIRE(s.ema_mean() <= 1.0);
      }
      CHECK(std::abs(s.ema_mean() - oracle::ema_direct(xs, alpha)) <= 1e-12);
    }
  }
}

TEST_CASE("blue estimate divides the running mean by 1 - C") {
  auto s = update_ema(EstimatorState(0.1), 0.5);
  CHECK(blue_estimate(s, compute_noise_model(0.5, 1, 1)).value == 0.5);
  CHECK(blue_estimate(s, NoiseModel{0, 0, 0.5, 1}).value == 1.0);

  auto t = update_ema(EstimatorState(0.1), 0.3);
  const auto e = blue_estimate(t, compute_noise_model(2, 1, 1));
  CHECK(e.correction == doctest::Approx(0.5));
  CHECK(e.raw_mean == 0.3);
  CHECK(e.value == doctest::Approx(0.6));
}

TEST_CASE("blue estimate errors") {
  CHECK_THROWS_AS(blue_estimate(EstimatorState(0.1), NoiseModel{}), NoSamplesError);
  const auto s = update_ema(EstimatorState(0.1), 0.5);
  CHECK_THROWS_AS(blue_estimate(s, NoiseModel{0, 0, 1.0, 1}), DomainError);
  CHECK_THROWS_AS(blue_estimate(s, NoiseModel{0, 0, -0.1, 1}), DomainError);
}

TEST_CASE("blue estimate ignores sigma and is monotone in C") {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    EstimatorState s(0.2);
    for (int i = 0; i < 1 + trial % 15; ++i) s.push(u(gen));
    const double c = 0.9 * u(gen);
    const double a = blue_estimate(s, NoiseModel{0, 0, c, 0.01}).value;
    CHECK(a == blue_estimate(s, NoiseModel{0, 0, c, 1.0}).value);
    CHECK(a == blue_estimate(s, NoiseModel{0, 0, c, 100.0}).value);
    CHECK(blue_estimate(s, NoiseModel{0, 0, std::min(0.99, c + 0.05), 1}).value >= a);
  }
}

TEST_CASE("arithmetic blue estimate agrees with the matrix form") {
  std::mt19937_64 gen(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + static_cast<int>(u(gen) * 100);
    const double c = 0.6 * u(gen);
    std::vector<double> xs(n);
    EstimatorState s(0.1);
    for (auto& x : xs) {
      x = (1.0 - c) * u(gen);
      s.push(x);
    }
    const double closed = blue_estimate(s, NoiseModel{0, 0, c, 0.3}, MeanKind::arithmetic).value;
    const double matrix = std::clamp(oracle::blue_matrix(xs, c, 0.3), 0.0, 1.0);
    CHECK(std::abs(closed - matrix) <= 1e-12 * std::max(1.0, std::abs(matrix)));
  }
}

TEST_CASE("arithmetic blue estimate recovers A from biased samples") {
  std::mt19937_64 gen(77);
  for (double a : {0.2, 0.5, 0.9}) {
    for (double c : {0.0, 0.25, 0.5}) {
      // uniform noise with mean c*a and standard deviation 0.05
      const double half = 0.05 * std::sqrt(3.0);
      std::uniform_real_distribution<double> w(c * a - half, c * a + half);
      EstimatorState s(0.1);
      for (int i = 0; i < 10000; ++i) s.push(a - w(gen));
      const double est = blue_estimate(s, NoiseModel{0, 0, c, 0.05}, MeanKind::arithmetic).value;
      CHECK(std::abs(est - a) < 3 * 0.05 / 100.0 / (1 - c));
    }
  }
}

TEST_CASE("baseline averages the last window of samples") {
  CHECK(baseline_estimate(update_ema(EstimatorState(0.1), 0.5)) == 0.5);

  EstimatorState s(0.1);
  for (double x : {1, 1, 1, 1, 1, 0, 0, 0, 0, 0}) s.push(x);
  CHECK(baseline_estimate(s) == 0.5);

  EstimatorState t(0.1);
  t.push(0.0);
  t.push(0.0);
  for (int i = 0; i < 10; ++i) t.push(1.0);
  CHECK(t.window_size() == 10);
  CHECK(baseline_estimate(t) == 1.0);

  CHECK_THROWS_AS(baseline_estimate(EstimatorState(0.1)), NoSamplesError);
}

TEST_CASE("baseline equals the brute-force mean of the retained samples") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t window : {1u, 3u, 10u}) {
    EstimatorState s(0.1, window);
    std::vector<double> all;
    for (int i = 0; i < 60; ++i) {
      all.push_back(u(gen));
      s.push(all.back());
      const std::size_t keep = std::min(window, all.size());
      const std::vector<double> tail(all.end() - static_cast<std::ptrdiff_t>(keep), all.end());
      CHECK(s.window() == tail);
      CHECK(baseline_estimate(s) == doctest::Approx(oracle::mean(tail)).epsilon(1e-14));
    }
  }
}

TEST_CASE("noise model branches") {
  CHECK(compute_noise_model(2, 2, 1).c == doctest::Approx(0.75));
  CHECK(compute_noise_model(0.5, 1, 1).c == 0.0);
  CHECK(compute_noise_model(1, 1, 1).c == 0.0);
  // continuity at the branch point
  CHECK(compute_noise_model(1.0 + 1e-12, 1, 1).c < 1e-11);
  CHECK_THROWS_AS(compute_noise_model(-1, 1, 1), DomainError);
  CHECK_THROWS_AS(compute_noise_model(1, -1, 1), DomainError);
  CHECK_THROWS_AS(compute_noise_model(1, 1, 0), DomainError);

  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const auto n = compute_noise_model(u(gen), u(gen), 1);
    REQUIRE(n.c >= 0.0);
    REQUIRE(n.c < 1.0);
  }
}

TEST_CASE("C1 and C2 ratios") {
  CHECK(estimate_c1(200, 100) == 2.0);
  CHECK(estimate_c1(100, 100) == 1.0);
  CHECK(estimate_c1(0, 100) == 0.0);
  CHECK_THROWS_AS(estimate_c1(10, 0), DomainError);

  CHECK(estimate_c2_global(500, 1000) == 0.5);
  CHECK(estimate_c2_global(1000, 1000) == 1.0);
  CHECK(estimate_c2_global(0, 1000) == 0.0);
  CHECK_THROWS_AS(estimate_c2_global(10, 0), DomainError);

  const std::vector<CapacityReport> two{{100, 200}, {300, 200}};
  CHECK(estimate_c2_neighborhood(two) == 1.0);
  const std::vector<CapacityReport> one{{0, 100}};
  CHECK(estimate_c2_neighborhood(one) == 0.0);
  const std::vector<CapacityReport> idle{{10, 0}, {5, 0}};
  CHECK_THROWS_AS(estimate_c2_neighborhood(idle), DomainError);
  CHECK_THROWS_AS(estimate_c2_neighborhood({}), DomainError);
}

TEST_CASE("neighbourhood C2 over the whole network equals the global ratio") {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 500.0);
  std::vector<CapacityReport> reports(20);
  double shared = 0.0;
  double requests = 0.0;
  for (auto& r : reports) {
    r = {u(gen), u(gen) + 1.0};
    shared += r.shared_capacity;
    requests += r.requests;
  }
  CHECK(estimate_c2_neighborhood(reports) == estimate_c2_global(shared, requests));
}
