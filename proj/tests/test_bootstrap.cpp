#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "cojump/bootstrap.hpp"
#include "cojump/errors.hpp"
#include "cojump/harness.hpp"
#include "oracles.hpp"

using namespace cojump;

namespace {

// series-1 interval lengths 1,1,2,1,1
ObservationScheme uneven_scheme() {
  return ObservationScheme::make({0, 1, 2, 4, 5, 6}, {0, 3, 6}, 6.0, 1.0);
}

PathInstance instance(const char* name, double n, std::uint64_t index) {
  return simulate_instance(find_scenario(name), n, 2024, index, HarnessConfig{});
}

}  // namespace

TEST(ShiftLaw, EqualLengthsGiveUniformShifts) {
  const auto s = gen_equidistant_scheme(50, 1.0);
  Rng rng(1);
  std::array<int, 3> counts{};
  const int draws = 1000000;
  for (int d = 0; d < draws; ++d) {
    const long k = sample_shift_index(s, 0.5, Component::Two, 1, rng);
    ASSERT_GE(k, -1);
    ASSERT_LE(k, 1);
    ++counts[static_cast<std::size_t>(k + 1)];
  }
  for (int c : counts) EXPECT_NEAR(static_cast<double>(c) / draws, 1.0 / 3.0, 0.01 / 3.0);
}

TEST(ShiftLaw, ProportionalToLength) {
  const auto law = shift_law(uneven_scheme(), 3.0, Component::One, 1);
  EXPECT_EQ(law.center, 2u);
  EXPECT_EQ(law.shifts, (std::vector<long>{-1, 0, 1}));
  EXPECT_DOUBLE_EQ(law.probabilities[0], 0.25);
  EXPECT_DOUBLE_EQ(law.probabilities[1], 0.5);
  EXPECT_DOUBLE_EQ(law.probabilities[2], 0.25);
}

TEST(ShiftLaw, BoundaryShiftsAreDroppedAndRenormalized) {
  const auto law = shift_law(uneven_scheme(), 0.5, Component::One, 2);
  EXPECT_EQ(law.center, 0u);
  EXPECT_EQ(law.shifts, (std::vector<long>{0, 1, 2}));
  EXPECT_DOUBLE_EQ(law.probabilities[0], 0.25);
  EXPECT_DOUBLE_EQ(law.probabilities[2], 0.5);
  const auto end = shift_law(uneven_scheme(), 5.5, Component::One, 2);
  EXPECT_EQ(end.shifts, (std::vector<long>{-2, -1, 0}));
  EXPECT_THROW(shift_law(uneven_scheme(), 0.0, Component::One, 1), DomainError);
}

TEST(EtaHat, SynchronousGridIsChiSquaredOne) {
  const std::size_t n = 1000;
  const auto s = gen_equidistant_scheme(n, 1.0);
  const EtaHatLaw law(s, 0.4321, Component::One, 6);
  for (std::size_t q = 0; q < law.shifts().shifts.size(); ++q) {
    ASSERT_EQ(law.weights(q).size(), 1u);
    EXPECT_NEAR(law.weights(q)[0], 1.0, 1e-12);
  }
  Rng rng(12);
  std::vector<double> xs(100000);
  for (auto& x : xs) x = law.draw(rng);
  EXPECT_LT(oracle::ks_one_sample(xs, oracle::chi2_1_cdf), 0.01);
}

TEST(EtaHat, ZeroNormalsGiveZero) {
  Rng rng(3);
  const auto s = gen_poisson_scheme(200, 1.0, 2.0, 1.0, rng);
  const EtaHatLaw law(s, 0.5, Component::One, 5);
  for (std::size_t q = 0; q < law.shifts().shifts.size(); ++q) {
    const std::vector<double> zeros(law.weights(q).size(), 0.0);
    EXPECT_EQ(law.evaluate(q, zeros), 0.0);
  }
}

TEST(EtaHat, ContributorsOverlapTheShiftedInterval) {
  // s = 3 sits in series-2 interval (0,3]; shift +1 moves to (3,6],
  // which meets series-1 intervals (2,4], (4,5], (5,6]
  const auto s = uneven_scheme();
  const EtaHatLaw law(s, 3.0, Component::One, 1);
  ASSERT_EQ(law.shifts().shifts, (std::vector<long>{0, 1}));
  EXPECT_DOUBLE_EQ(law.shifts().probabilities[0], 0.5);
  const auto w0 = law.weights(0);
  const auto w1 = law.weights(1);
  EXPECT_EQ(std::vector<double>(w0.begin(), w0.end()), (std::vector<double>{1, 1, 2}));
  EXPECT_EQ(std::vector<double>(w1.begin(), w1.end()), (std::vector<double>{2, 1, 1}));
  const std::vector<double> u{1.0, 2.0, 0.5};
  EXPECT_DOUBLE_EQ(law.evaluate(1, u), 2.0 + 4.0 + 0.25);
}

TEST(DHat, NoJumpsGivesZero) {
  const auto in = instance("I-j", 100, 0).inputs;
  const DHatSampler sampler(in, {}, {}, {}, {}, {3, 10, 0.05});
  Rng rng(4);
  for (int m = 0; m < 10; ++m) EXPECT_EQ(sampler.draw(rng), 0.0);
  EXPECT_TRUE(sampler.terms().empty());
}

TEST(DHat, SingleProductWithForcedEta) {
  const auto s = gen_equidistant_scheme(10, 1.0);
  const TestInputs in{s, {std::vector<double>(10, 0.0), std::vector<double>(10, 0.0)}};
  const std::vector<DetectedJump> j1{{3, 1.0}};
  const std::vector<double> v1{4.0};
  const DHatSampler sampler(in, j1, {}, v1, {}, {2, 10, 0.05});
  ASSERT_EQ(sampler.terms().size(), 1u);
  EXPECT_EQ(sampler.terms()[0].jump_component, Component::One);
  EXPECT_DOUBLE_EQ(sampler.terms()[0].weight, 4.0);
  EXPECT_DOUBLE_EQ(sampler.evaluate(std::vector<double>{0.25}), 1.0);
}

TEST(DHat, MeanMatchesConditionalExpectation) {
  const auto inst = instance("II-m", 400, 3);
  const auto& in = inst.inputs;
  const auto cfg = TestConfig::defaults(400);
  const auto j1 = detect_jumps(in, Component::One, cfg.trunc);
  const auto j2 = detect_jumps(in, Component::Two, cfg.trunc);
  ASSERT_FALSE(j1.empty() && j2.empty());
  const auto v1 = spot_vols_at_jumps(in, Component::One, j1, cfg.spot, cfg.trunc);
  const auto v2 = spot_vols_at_jumps(in, Component::Two, j2, cfg.spot, cfg.trunc);
  const DHatSampler sampler(in, j1, j2, v1, v2, cfg.boot);

  // E[eta] = sum over support of p_q * sum of weights, computed from the raw scheme
  double expected = 0.0;
  for (const auto& t : sampler.terms()) {
    const Component jc = t.jump_component;
    const Component ec = other(jc);
    const double s = in.scheme.right(jc, t.index);
    const auto law = shift_law(in.scheme, s, jc, cfg.boot.K_n);
    const auto& g = in.scheme.grid(ec);
    double mean_eta = 0.0;
    for (std::size_t q = 0; q < law.shifts.size(); ++q) {
      const auto j = static_cast<std::size_t>(static_cast<long>(law.center) + law.shifts[q]);
      const double a = in.scheme.left(jc, j);
      const double b = in.scheme.right(jc, j);
      double span = 0.0;
      for (std::size_t i = 0; i + 1 < g.size(); ++i)
        if (g[i] < b && a < g[i + 1] && g[i + 1] <= in.scheme.horizon)
          span += in.scheme.n * (g[i + 1] - g[i]);
      mean_eta += law.probabilities[q] * span;
    }
    expected += t.weight * mean_eta;
  }
  Rng rng(8);
  const int draws = 100000;
  double sum = 0.0;
  for (int m = 0; m < draws; ++m) {
    const double d = sampler.draw(rng);
    ASSERT_GE(d, 0.0);
    sum += d;
  }
  EXPECT_NEAR(sum / draws, expected, 0.01 * expected);
}

TEST(QuantileHat, Examples) {
  std::vector<double> xs(10);
  std::iota(xs.begin(), xs.end(), 1.0);
  EXPECT_EQ(quantile_hat(xs, 0.3), 8.0);
  EXPECT_EQ(quantile_hat(xs, 1.0), 1.0);
  EXPECT_EQ(quantile_hat(xs, 0.1), 10.0);
  EXPECT_EQ(quantile_hat(xs, 0.05), 10.0);
  EXPECT_EQ(quantile_hat(xs, 0.0), 10.0);
  EXPECT_THROW(quantile_hat(std::vector<double>{}, 0.5), DomainError);
}

TEST(QuantileHat, MatchesSortOracle) {
  Rng rng(55);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(200);
    std::vector<double> xs(n);
    for (auto& x : xs) x = static_cast<double>(rng.below(20));
    const double alpha = rng.uniform();
    auto sorted = xs;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const auto rank = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n)));
    const double expected = rank == 0 ? sorted.front() : sorted[rank - 1];
    EXPECT_EQ(quantile_hat(xs, alpha), expected);
  }
}

TEST(QuantileHat, NondecreasingAsAlphaDecreases) {
  Rng rng(9);
  std::vector<double> xs(400);
  for (auto& x : xs) x = rng.exponential(1.0);
  double prev = -1.0;
  for (double alpha = 1.0; alpha >= 0.0; alpha -= 0.01) {
    const double q = quantile_hat(xs, std::max(alpha, 0.0));
    EXPECT_GE(q, prev);
    prev = q;
  }
}

TEST(RunTest, DegenerateBootstrapWithoutJumps) {
  ModelParams p;
  p.sigma1 = p.sigma2 = std::sqrt(8e-5);
  p.rho = 0.3;
  Rng rng(71);
  auto s = gen_poisson_scheme(400, 1.0, 2.0, 1.0, rng);
  std::vector<double> times(s.times[0]);
  times.insert(times.end(), s.times[1].begin(), s.times[1].end());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  const auto path = simulate_path(p, times.back(), times, {}, rng);
  const auto in = TestInputs::from_path(s, path);
  const auto cfg = TestConfig::defaults(400);
  ASSERT_TRUE(detect_jumps(in, Component::One, cfg.trunc).empty());
  ASSERT_TRUE(detect_jumps(in, Component::Two, cfg.trunc).empty());
  const auto r = run_test(in, cfg.trunc, cfg.spot, cfg.boot, Rng(5));
  EXPECT_EQ(r.Q, 0.0);
  for (double d : r.d_hat_samples) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(r.reject, r.nVf > r.A);
}

TEST(RunTest, ScaleInvarianceInN) {
  const auto cfg = TestConfig::defaults(400);
  for (std::uint64_t k = 0; k < 20; ++k) {
    const auto inst = instance(k % 2 ? "I-m" : "II-d0", 400, k);
    auto doubled = inst.inputs;
    doubled.scheme.n *= 2.0;
    const auto a = run_test(inst.inputs, cfg.trunc, cfg.spot, cfg.boot, inst.bootstrap_rng);
    const auto b = run_test(doubled, cfg.trunc, cfg.spot, cfg.boot, inst.bootstrap_rng);
    EXPECT_EQ(a.reject, b.reject);
    EXPECT_EQ(b.nVf, 2.0 * a.nVf);
    EXPECT_EQ(b.A, 2.0 * a.A);
    EXPECT_EQ(b.Q, 2.0 * a.Q);
    EXPECT_EQ(a.c_n, b.c_n);
  }
}

TEST(RunTest, DecisionFormsAgreeAndRunsAreDeterministic) {
  const auto cfg = TestConfig::defaults(400);
  int rejects = 0;
  int ties = 0;
  for (std::uint64_t k = 0; k < 30; ++k) {
    const auto inst = instance(k % 3 ? "II-j" : "I-d1", 400, k);
    for (double alpha : {0.01, 0.05, 0.25, 0.5}) {
      BootstrapConfig bc = cfg.boot;
      bc.alpha = alpha;
      const auto r = run_test(inst.inputs, cfg.trunc, cfg.spot, bc, inst.bootstrap_rng);
      ASSERT_TRUE(r.phi_tilde.has_value());
      EXPECT_EQ(r.reject, r.nVf > r.A + r.Q);
      // the divided form can only disagree through rounding at an exact tie
      if (std::abs(*r.phi_tilde - r.c_n) > 1e-12 * r.c_n)
        EXPECT_EQ(r.reject, *r.phi_tilde > r.c_n);
      else
        ++ties;
      const auto again = run_test(inst.inputs, cfg.trunc, cfg.spot, bc, inst.bootstrap_rng);
      EXPECT_EQ(r.d_hat_samples, again.d_hat_samples);
      EXPECT_EQ(r.Q, again.Q);
      rejects += r.reject;
    }
  }
  EXPECT_GT(rejects, 0);
  EXPECT_LT(ties, 30 * 4);
}

TEST(RunTest, UndefinedStatisticIsFlagged) {
  const auto s = gen_equidistant_scheme(10, 1.0);
  const TestInputs in{s, {std::vector<double>(10, 0.0), std::vector<double>(10, 0.1)}};
  const auto cfg = TestConfig::defaults(10);
  const auto r = run_test(in, cfg.trunc, cfg.spot, cfg.boot, Rng(1));
  EXPECT_FALSE(r.phi_tilde.has_value());
  EXPECT_TRUE(r.diagnostics.phi_undefined);
  EXPECT_FALSE(r.reject);
  EXPECT_TRUE(std::isnan(r.c_n));
}

TEST(DHat, OnlyJumpingComponentContributes) {
  Scenario sc = find_scenario("I-d0");
  sc.params.drivers[static_cast<int>(Driver::Second)] = JumpDriverSpec::none();
  const auto cfg = TestConfig::defaults(400);
  int checked = 0;
  for (std::uint64_t k = 0; k < 40; ++k) {
    const auto inst = simulate_instance(sc, 400, 5, k, HarnessConfig{});
    EXPECT_TRUE(inst.path.jumps[1].empty());
    const auto j1 = detect_jumps(inst.inputs, Component::One, cfg.trunc);
    const auto j2 = detect_jumps(inst.inputs, Component::Two, cfg.trunc);
    if (!j2.empty()) continue;
    const auto v1 = spot_vols_at_jumps(inst.inputs, Component::One, j1, cfg.spot, cfg.trunc);
    const DHatSampler sampler(inst.inputs, j1, j2, v1, {}, cfg.boot);
    EXPECT_EQ(sampler.terms().size(), j1.size());
    for (const auto& t : sampler.terms()) EXPECT_EQ(t.jump_component, Component::One);
    ++checked;
  }
  EXPECT_GT(checked, 10);
}
