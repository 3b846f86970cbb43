#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "cojump/errors.hpp"
#include "cojump/sampling.hpp"
#include "oracles.hpp"

using namespace cojump;

namespace {

ObservationScheme small_scheme() {
  // series 1 intervals (0,2], (2,5]; series 2 intervals (0,3], (3,6]
  return ObservationScheme::make({0, 2, 5}, {0, 3, 6}, 5.0, 1.0);
}

}  // namespace

TEST(Scheme, MakeTruncatesAfterHorizonAndValidates) {
  const auto s = ObservationScheme::make({0, 0.4, 0.9, 1.2, 1.5}, {0, 1.0, 2.0}, 1.0, 10);
  EXPECT_EQ(s.times[0], (std::vector<double>{0, 0.4, 0.9, 1.2}));
  EXPECT_EQ(s.times[1], (std::vector<double>{0, 1.0}));
  EXPECT_THROW(ObservationScheme::make({0, 0.5}, {0, 1.0}, 1.0, 1), ParameterError);
  EXPECT_THROW(ObservationScheme::make({0.1, 1.5}, {0, 1.0}, 1.0, 1), ParameterError);
  EXPECT_THROW(ObservationScheme::make({0, 0.5, 0.5, 1.0}, {0, 1.0}, 1.0, 1), ParameterError);
}

TEST(Scheme, EquidistantGrid) {
  const auto s = gen_equidistant_scheme(4, 1.0);
  const std::vector<double> expected{0, 0.25, 0.5, 0.75, 1.0};
  EXPECT_EQ(s.times[0], expected);
  EXPECT_EQ(s.times[1], expected);
  EXPECT_DOUBLE_EQ(s.mesh(), 0.25);
  EXPECT_EQ(s.n, 4.0);
  const auto g = merge(s);
  for (std::size_t k = 1; k < g.merged_times.size(); ++k) EXPECT_DOUBLE_EQ(g.deltas[k], 0.25);
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t k = 0; k < g.merged_times.size(); ++k) {
      EXPECT_EQ(g.back[c][k], 0.0);
      EXPECT_EQ(g.fwd[c][k], 0.0);
    }
}

TEST(Scheme, PoissonCountsAndGaps) {
  Rng rng(11);
  double total = 0.0;
  const int draws = 1000;
  for (int d = 0; d < draws; ++d) {
    const auto s = gen_poisson_scheme(100, 1.0, 2.0, 1.0, rng);
    const auto inside = static_cast<double>(s.complete_count(Component::One));
    if (d == 0) EXPECT_NEAR(inside, 100.0, 30.0);
    total += inside;
    ASSERT_EQ(s.times[0].front(), 0.0);
    ASSERT_GE(s.times[0].back(), 1.0);
    ASSERT_LT(s.times[0][s.times[0].size() - 2], 1.0);
  }
  EXPECT_NEAR(total / draws, 100.0, 1.0);

  // gap mean at rate 200
  const auto s = gen_poisson_scheme(100, 2.0, 2.0, 500.0, rng);
  const auto& t = s.times[0];
  EXPECT_GT(t.size(), 90000u);
  EXPECT_NEAR(t.back() / static_cast<double>(t.size() - 1), 1.0 / 200.0, 0.02 / 200.0);
}

TEST(Scheme, PoissonIsDeterministic) {
  Rng a(5);
  Rng b(5);
  const auto sa = gen_poisson_scheme(300, 1.0, 2.0, 1.0, a);
  const auto sb = gen_poisson_scheme(300, 1.0, 2.0, 1.0, b);
  EXPECT_EQ(sa.times, sb.times);
}

TEST(Merge, HandEvaluatedExample) {
  const auto g = merge(small_scheme());
  EXPECT_EQ(g.merged_times, (std::vector<double>{0, 2, 3, 5, 6}));
  // T_2 = 3
  EXPECT_EQ(g.deltas[2], 1.0);
  EXPECT_EQ(g.back[0][2], 1.0);
  EXPECT_EQ(g.fwd[0][2], 2.0);
  EXPECT_EQ(g.back[1][2], 0.0);
  EXPECT_EQ(g.fwd[1][2], 0.0);
  EXPECT_LE(g.merged_times.size(), 3u + 3u - 1u);
  // past the last series-1 time there is no forward observation
  EXPECT_TRUE(std::isinf(g.fwd[0][4]));
}

TEST(Merge, SpansAreUnionsOfWholeIntervals) {
  Rng rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = gen_poisson_scheme(40, 1.0, 2.0, 1.0, rng);
    const auto g = merge(s);
    const IntervalIndex idx(s);
    ASSERT_LE(g.merged_times.size(), s.times[0].size() + s.times[1].size() - 1);
    for (std::size_t k = 1; k < g.merged_times.size(); ++k) {
      for (Component c : {Component::One, Component::Two}) {
        const std::size_t l = slot(c);
        ASSERT_GE(g.back[l][k], 0.0);
        ASSERT_GE(g.fwd[l][k], 0.0);
        if (std::isinf(g.fwd[l][k])) continue;
        const double span = g.back[l][k - 1] + g.deltas[k] + g.fwd[l][k];
        const auto& t = s.grid(c);
        const double up = *std::lower_bound(t.begin(), t.end(), g.merged_times[k]);
        const double down = *(std::upper_bound(t.begin(), t.end(), g.merged_times[k - 1]) - 1);
        EXPECT_NEAR(span, up - down, 1e-12);
        const double own = g.back[l][k] + g.fwd[l][k];
        if (own != 0.0) {
          const auto pos = idx.locate(c, g.merged_times[k]);
          EXPECT_NEAR(own, s.length(c, pos.index), 1e-12);
        }
      }
    }
  }
}

TEST(OverlapPairs, SynchronousGridPairsDiagonal) {
  const auto s = gen_equidistant_scheme(3, 1.0);
  EXPECT_EQ(overlap_pairs(s), (std::vector<IndexPair>{{0, 0}, {1, 1}, {2, 2}}));
}

TEST(OverlapPairs, SmallAsynchronousExample) {
  // (0,2]&(0,3], (2,5]&(0,3], (2,5]&(3,6]; (0,2]&(3,6] do not meet
  EXPECT_EQ(overlap_pairs(small_scheme()), (std::vector<IndexPair>{{0, 0}, {1, 0}, {1, 1}}));
}

TEST(OverlapPairs, TouchingEndpointsDoNotOverlap) {
  const auto s = ObservationScheme::make({0, 1, 2}, {0, 1, 2}, 2.0, 1.0);
  EXPECT_EQ(overlap_pairs(s).size(), 2u);
}

TEST(OverlapPairs, MatchesBruteForce) {
  Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    const auto s = gen_poisson_scheme(30, 1.0, 2.0, 1.0, rng);
    EXPECT_EQ(overlap_pairs(s), oracle::brute_overlap_pairs(s));
  }
}

TEST(GnHn, EquidistantEqualsT) {
  for (std::size_t n : {10u, 64u, 1000u}) {
    const auto s = gen_equidistant_scheme(n, 1.0);
    const auto r = gn_hn(s, 1.0);
    EXPECT_NEAR(r.g, 1.0, 1e-12);
    EXPECT_NEAR(r.h, 1.0, 1e-12);
  }
}

TEST(GnHn, GDominatedByH) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = gen_poisson_scheme(200, 1.0, 2.0, 1.0, rng);
    const auto g = merge(s);
    for (double t : {0.1, 0.37, 0.5, 0.99, 1.0}) {
      const auto r = gn_hn(g, s.n, t);
      EXPECT_LE(r.g, r.h);
    }
  }
}

TEST(GnHn, MatchesCellwiseBruteForce) {
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto s = gen_poisson_scheme(50, 1.0, 2.0, 1.0, rng);
    std::vector<double> cells(s.times[0]);
    cells.insert(cells.end(), s.times[1].begin(), s.times[1].end());
    std::sort(cells.begin(), cells.end());
    cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
    const auto enclosing = [&](Component c, double a, double b) {
      const auto& t = s.grid(c);
      for (std::size_t i = 0; i + 1 < t.size(); ++i)
        if (t[i] <= a && b <= t[i + 1]) return t[i + 1] - t[i];
      return 0.0;
    };
    for (double t : {0.3, 0.77, 1.0}) {
      double g = 0.0;
      double h = 0.0;
      for (std::size_t k = 1; k < cells.size() && cells[k] <= t; ++k) {
        const double d = cells[k] - cells[k - 1];
        g += d * d;
        h += enclosing(Component::One, cells[k - 1], cells[k]) *
             enclosing(Component::Two, cells[k - 1], cells[k]);
      }
      const auto r = gn_hn(s, t);
      EXPECT_NEAR(r.g, s.n * g, 1e-12);
      EXPECT_NEAR(r.h, s.n * h, 1e-10);
    }
  }
}

TEST(IntervalIndex, LocatesWithLeftOpenConvention) {
  Rng rng(31);
  const auto s = gen_poisson_scheme(100, 1.0, 2.0, 1.0, rng);
  const IntervalIndex idx(s);
  const double mesh = s.mesh();
  for (int k = 1; k <= 997; ++k) {
    const double x = k / 1000.0;
    for (Component c : {Component::One, Component::Two}) {
      const auto pos = idx.locate(c, x);
      ASSERT_LT(s.left(c, pos.index), x);
      ASSERT_LE(x, s.right(c, pos.index));
      ASSERT_LE(pos.tau_minus, x);
      ASSERT_LE(x, pos.tau_plus);
      const auto o = idx.locate(other(c), x);
      const bool at_obs = s.right(other(c), o.index) == x;
      if (!at_obs) EXPECT_GE(idx.overlap_span(c, x) + 1e-15, s.length(other(c), o.index));
      if (x < 0.8) EXPECT_LE(idx.overlap_span(c, x), 3.0 * mesh + 1e-15);
    }
  }
  // an observation time belongs to the interval it closes
  const double t3 = s.times[0][3];
  EXPECT_EQ(idx.locate(Component::One, t3).index, 2u);
  EXPECT_THROW(idx.locate(Component::One, 0.0), DomainError);
}

TEST(EtaN, SynchronousGridUsesContainingInterval) {
  const auto s = gen_equidistant_scheme(4, 1.0);
  const std::vector<double> w{0.1, -0.3, 0.7, 0.2};
  EXPECT_DOUBLE_EQ(eta_n(s, w, 0.6, Component::One), 0.49);
  EXPECT_DOUBLE_EQ(eta_n(s, w, 0.1, Component::Two), 0.01);
}

TEST(EtaN, SumsOverlappingIntervals) {
  // series-2 interval (0,3] meets series-1 intervals (0,1], (1,2], (2,4]
  const auto s = ObservationScheme::make({0, 1, 2, 4, 6}, {0, 3, 6}, 6.0, 1.0);
  const std::vector<double> w{1.0, -2.0, 0.5, 9.0};
  EXPECT_DOUBLE_EQ(eta_n(s, w, 2.5, Component::One), 5.25);
  const std::vector<double> zero(4, 0.0);
  EXPECT_EQ(eta_n(s, zero, 2.5, Component::One), 0.0);
  EXPECT_THROW(eta_n(s, w, 0.0, Component::One), DomainError);
}

TEST(EtaDirectPoisson, MeanEqualsMeanTotalSpan) {
  Rng rng(2);
  const int draws = 1000000;
  double sum = 0.0;
  for (int d = 0; d < draws; ++d) {
    const double e = eta_direct_poisson(1.0, 2.0, rng);
    ASSERT_GE(e, 0.0);
    sum += e;
  }
  EXPECT_NEAR(sum / draws, 3.0, 0.03);
}

TEST(EtaDirectPoisson, MatchesScaledEtaOnPoissonSchemes) {
  const double n = 2000;
  Rng rng(90);
  std::vector<double> scheme_draws;
  while (scheme_draws.size() < 100000) {
    const auto s = gen_poisson_scheme(n, 1.0, 2.0, 1.0, rng);
    std::vector<double> w(s.interval_count(Component::One));
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = std::sqrt(s.length(Component::One, i)) * rng.normal();
    // well separated points keep the draws nearly independent
    for (int k = 0; k < 1000 && scheme_draws.size() < 100000; ++k) {
      const double x = 0.05 + 0.9 * (k + rng.uniform()) / 1000.0;
      scheme_draws.push_back(n * eta_n(s, w, x, Component::One));
    }
  }
  std::vector<double> direct(100000);
  for (auto& d : direct) d = eta_direct_poisson(1.0, 2.0, rng);
  EXPECT_LT(oracle::ks_two_sample(scheme_draws, direct), 0.02);
}
