#include "cojump/statistics.hpp"

#include <algorithm>
#include <string>

#include "cojump/errors.hpp"

namespace cojump {

namespace {

std::vector<double> differences(std::span<const double> prices) {
  std::vector<double> d(prices.size() - 1);
  for (std::size_t i = 0; i + 1 < prices.size(); ++i) d[i] = prices[i + 1] - prices[i];
  return d;
}

}  // namespace

TestInputs TestInputs::from_prices(ObservationScheme scheme, std::span<const double> prices1,
                                   std::span<const double> prices2) {
  scheme.validate();
  if (prices1.size() != scheme.times[0].size() || prices2.size() != scheme.times[1].size())
    throw ParameterError("price count must match the number of observation times");
  TestInputs in;
  in.incr = {differences(prices1), differences(prices2)};
  in.scheme = std::move(scheme);
  return in;
}

TestInputs TestInputs::from_path(ObservationScheme scheme, const PathRecord& path) {
  std::array<std::vector<double>, 2> prices;
  for (std::size_t c = 0; c < 2; ++c) {
    prices[c].reserve(scheme.times[c].size());
    for (double t : scheme.times[c]) prices[c].push_back(path.value_at(t)[c]);
  }
  return from_prices(std::move(scheme), prices[0], prices[1]);
}

void TestInputs::validate() const {
  scheme.validate();
  for (Component c : {Component::One, Component::Two}) {
    if (increments(c).size() != scheme.interval_count(c))
      throw ParameterError("increment count must match the interval count");
  }
}

void TruncationConfig::validate() const {
  if (!(beta > 0.0)) throw ParameterError("truncation beta must be > 0");
  if (!(varpi > 0.0 && varpi < 0.5)) throw ParameterError("truncation varpi must lie in (0, 1/2)");
}

void SpotVolConfig::validate(double horizon) const {
  if (!(b_n > 0.0 && b_n <= horizon)) throw ParameterError("spot window b_n must lie in (0, T]");
}

double v_cross(const TestInputs& inputs) {
  const auto x1 = inputs.increments(Component::One);
  const auto x2 = inputs.increments(Component::Two);
  double sum = 0.0;
  for (const auto& p : overlap_pairs(inputs.scheme)) {
    const double a = x1[p.i] * x2[p.j];
    sum += a * a;
  }
  return sum;
}

double v_fourth(const TestInputs& inputs, Component c) {
  const auto x = inputs.increments(c);
  const std::size_t m = inputs.scheme.complete_count(c);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double q = x[i] * x[i];
    sum += q * q;
  }
  return sum;
}

std::optional<double> phi_tilde(const TestInputs& inputs) {
  const double v1 = v_fourth(inputs, Component::One);
  const double v2 = v_fourth(inputs, Component::Two);
  if (!(v1 > 0.0) || !(v2 > 0.0)) return std::nullopt;
  return v_cross(inputs) / std::sqrt(v1 * v2);
}

double a_trunc(const TestInputs& inputs, const TruncationConfig& cfg) {
  const auto x1 = inputs.increments(Component::One);
  const auto x2 = inputs.increments(Component::Two);
  const auto& s = inputs.scheme;
  double sum = 0.0;
  for (const auto& p : overlap_pairs(s)) {
    if (std::abs(x1[p.i]) <= cfg.threshold(s.length(Component::One, p.i)) &&
        std::abs(x2[p.j]) <= cfg.threshold(s.length(Component::Two, p.j))) {
      const double a = x1[p.i] * x2[p.j];
      sum += a * a;
    }
  }
  return s.n * sum;
}

SpotVolEstimate spot_vol(const TestInputs& inputs, double s, Component c,
                         const SpotVolConfig& cfg, const TruncationConfig& trunc) {
  const auto& sch = inputs.scheme;
  if (!(s >= 0.0 && s <= sch.horizon)) throw DomainError("spot time must lie in [0, T]");
  const double lo = std::max(0.0, s - cfg.b_n);
  const double hi = std::min(sch.horizon, s + cfg.b_n);
  const auto& t = sch.grid(c);
  const auto x = inputs.increments(c);

  // intervals i whose right endpoint t[i+1] lies in [lo, hi]
  const auto from = std::lower_bound(t.begin() + 1, t.end(), lo);
  const auto to = std::upper_bound(from, t.end(), hi);
  SpotVolEstimate est;
  if (from == to || !(hi > lo)) {
    est.empty_window = true;
    return est;
  }
  double sum = 0.0;
  for (auto it = from; it != to; ++it) {
    const auto i = static_cast<std::size_t>(it - t.begin()) - 1;
    if (cfg.truncated && std::abs(x[i]) > trunc.threshold(sch.length(c, i))) continue;
    sum += x[i] * x[i];
  }
  est.value = sum / (hi - lo);
  return est;
}

std::vector<DetectedJump> detect_jumps(const TestInputs& inputs, Component c,
                                       const TruncationConfig& trunc) {
  const auto x = inputs.increments(c);
  const std::size_t m = inputs.scheme.complete_count(c);
  std::vector<DetectedJump> out;
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(x[i]) > trunc.threshold(inputs.scheme.length(c, i))) out.push_back({i, x[i]});
  }
  return out;
}

}  // namespace cojump
