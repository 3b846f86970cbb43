#include "cojump/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cojump/errors.hpp"

namespace cojump {

void BootstrapConfig::validate() const {
  if (K_n < 1) throw ParameterError("K_n must be >= 1");
  if (M_n < 1) throw ParameterError("M_n must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in [0, 1]");
}

TestConfig TestConfig::defaults(double n) {
  if (!(n >= 1.0)) throw ParameterError("n must be >= 1");
  TestConfig cfg;
  cfg.spot.b_n = 1.0 / std::sqrt(n);
  cfg.boot.K_n = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::log(n))));
  cfg.boot.M_n = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n)));
  return cfg;
}

void TestConfig::validate(double horizon) const {
  trunc.validate();
  spot.validate(horizon);
  boot.validate();
}

ShiftLaw shift_law(const ObservationScheme& scheme, double s, Component c, std::size_t K) {
  const IntervalIndex index(scheme);
  ShiftLaw law;
  law.center = index.locate(c, s).index;
  const long count = static_cast<long>(scheme.interval_count(c));
  const long center = static_cast<long>(law.center);
  const long k_max = static_cast<long>(K);
  double total = 0.0;
  for (long k = -k_max; k <= k_max; ++k) {
    const long idx = center + k;
    if (idx < 0 || idx >= count) continue;
    const double w = scheme.length(c, static_cast<std::size_t>(idx));
    law.shifts.push_back(k);
    law.probabilities.push_back(w);
    total += w;
  }
  if (law.shifts.empty() || !(total > 0.0)) throw DomainError("empty shift support");
  for (double& p : law.probabilities) p /= total;
  return law;
}

long sample_shift_index(const ObservationScheme& scheme, double s, Component c, std::size_t K,
                        Rng& rng) {
  const auto law = shift_law(scheme, s, c, K);
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t q = 0; q < law.shifts.size(); ++q) {
    acc += law.probabilities[q];
    if (u < acc) return law.shifts[q];
  }
  return law.shifts.back();
}

EtaHatLaw::EtaHatLaw(const ObservationScheme& scheme, double s, Component c, std::size_t K)
    : law_(shift_law(scheme, s, other(c), K)) {
  const Component o = other(c);
  const IntervalIndex index(scheme);
  const std::size_t complete = scheme.complete_count(c);
  cumulative_.reserve(law_.shifts.size());
  weights_.reserve(law_.shifts.size());
  double acc = 0.0;
  for (std::size_t q = 0; q < law_.shifts.size(); ++q) {
    acc += law_.probabilities[q];
    cumulative_.push_back(acc);
    const auto j = static_cast<std::size_t>(static_cast<long>(law_.center) + law_.shifts[q]);
    auto [first, last] = index.overlapping(c, scheme.left(o, j), scheme.right(o, j));
    last = std::min(last, complete);
    std::vector<double> w;
    for (std::size_t i = first; i < last; ++i) w.push_back(scheme.n * scheme.length(c, i));
    weights_.push_back(std::move(w));
  }
  cumulative_.back() = std::numeric_limits<double>::infinity();
}

std::size_t EtaHatLaw::pick(Rng& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return static_cast<std::size_t>(it - cumulative_.begin());
}

double EtaHatLaw::draw(Rng& rng) const {
  const auto& w = weights_[pick(rng)];
  double sum = 0.0;
  for (double wi : w) {
    const double u = rng.normal();
    sum += wi * u * u;
  }
  return sum;
}

double EtaHatLaw::evaluate(std::size_t support_index, std::span<const double> normals) const {
  const auto& w = weights_.at(support_index);
  if (normals.size() != w.size()) throw ParameterError("one normal per contributing interval");
  double sum = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * normals[i] * normals[i];
  return sum;
}

double sample_eta_hat(const ObservationScheme& scheme, double s, Component c,
                      const BootstrapConfig& cfg, Rng& rng) {
  return EtaHatLaw(scheme, s, c, cfg.K_n).draw(rng);
}

std::vector<double> spot_vols_at_jumps(const TestInputs& inputs, Component c,
                                       std::span<const DetectedJump> jumps,
                                       const SpotVolConfig& spot, const TruncationConfig& trunc,
                                       std::size_t* empty_windows) {
  std::vector<double> out;
  out.reserve(jumps.size());
  for (const auto& j : jumps) {
    const double s = inputs.scheme.right(c, j.index);
    const auto est = spot_vol(inputs, s, other(c), spot, trunc);
    if (est.empty_window && empty_windows) ++*empty_windows;
    out.push_back(est.value);
  }
  return out;
}

DHatSampler::DHatSampler(const TestInputs& inputs, std::span<const DetectedJump> jumps1,
                         std::span<const DetectedJump> jumps2, std::span<const double> spot_vols1,
                         std::span<const double> spot_vols2, const BootstrapConfig& cfg) {
  if (spot_vols1.size() != jumps1.size() || spot_vols2.size() != jumps2.size())
    throw ParameterError("one spot volatility per detected jump");
  const auto add = [&](Component c, std::span<const DetectedJump> jumps,
                       std::span<const double> vols) {
    for (std::size_t p = 0; p < jumps.size(); ++p) {
      const double s = inputs.scheme.right(c, jumps[p].index);
      terms_.push_back({c, jumps[p].index, jumps[p].size * jumps[p].size * vols[p]});
      laws_.emplace_back(inputs.scheme, s, other(c), cfg.K_n);
    }
  };
  add(Component::One, jumps1, spot_vols1);
  add(Component::Two, jumps2, spot_vols2);
}

double DHatSampler::draw(Rng& rng) const {
  double sum = 0.0;
  for (std::size_t p = 0; p < terms_.size(); ++p) sum += terms_[p].weight * laws_[p].draw(rng);
  return sum;
}

double DHatSampler::evaluate(std::span<const double> etas) const {
  if (etas.size() != terms_.size()) throw ParameterError("one eta per term");
  double sum = 0.0;
  for (std::size_t p = 0; p < terms_.size(); ++p) sum += terms_[p].weight * etas[p];
  return sum;
}

double sample_d_hat(const TestInputs& inputs, std::span<const DetectedJump> jumps1,
                    std::span<const DetectedJump> jumps2, std::span<const double> spot_vols1,
                    std::span<const double> spot_vols2, const BootstrapConfig& cfg, Rng& rng) {
  return DHatSampler(inputs, jumps1, jumps2, spot_vols1, spot_vols2, cfg).draw(rng);
}

double quantile_hat(std::span<const double> samples, double alpha) {
  if (samples.empty()) throw DomainError("quantile of an empty sample");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in [0, 1]");
  const std::size_t n = samples.size();
  // alpha * n may land a hair below an intended integer
  auto rank = static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n) + 1e-9));
  rank = std::min(rank, n);
  if (rank == 0) return *std::max_element(samples.begin(), samples.end());
  std::vector<double> v(samples.begin(), samples.end());
  const auto nth = v.begin() + static_cast<std::ptrdiff_t>(n - rank);
  std::nth_element(v.begin(), nth, v.end());
  return *nth;
}

TestEvaluation evaluate_test(const TestInputs& inputs, const TestConfig& cfg, const Rng& rng) {
  inputs.validate();
  cfg.validate(inputs.scheme.horizon);

  TestEvaluation ev;
  ev.n = inputs.scheme.n;
  ev.v_cross = v_cross(inputs);
  ev.v_fourth1 = v_fourth(inputs, Component::One);
  ev.v_fourth2 = v_fourth(inputs, Component::Two);
  ev.nVf = ev.n * ev.v_cross;
  ev.A = a_trunc(inputs, cfg.trunc);
  if (ev.v_fourth1 > 0.0 && ev.v_fourth2 > 0.0)
    ev.phi_tilde = ev.v_cross / std::sqrt(ev.v_fourth1 * ev.v_fourth2);

  const auto jumps1 = detect_jumps(inputs, Component::One, cfg.trunc);
  const auto jumps2 = detect_jumps(inputs, Component::Two, cfg.trunc);
  ev.diagnostics.jumps1 = jumps1.size();
  ev.diagnostics.jumps2 = jumps2.size();
  ev.diagnostics.phi_undefined = !ev.phi_tilde.has_value();
  if (!ev.phi_tilde) return ev;

  // Spot variances are fixed across replications.
  const auto vols1 = spot_vols_at_jumps(inputs, Component::One, jumps1, cfg.spot, cfg.trunc,
                                        &ev.diagnostics.empty_spot_windows);
  const auto vols2 = spot_vols_at_jumps(inputs, Component::Two, jumps2, cfg.spot, cfg.trunc,
                                        &ev.diagnostics.empty_spot_windows);
  const DHatSampler sampler(inputs, jumps1, jumps2, vols1, vols2, cfg.boot);

  ev.d_hat_samples.resize(cfg.boot.M_n);
  for (std::size_t m = 0; m < cfg.boot.M_n; ++m) {
    Rng rep = rng.derive(static_cast<std::uint64_t>(m));
    ev.d_hat_samples[m] = sampler.draw(rep);
  }
  return ev;
}

TestReport decide(const TestEvaluation& ev, double alpha) {
  TestReport r;
  r.alpha = alpha;
  r.phi_tilde = ev.phi_tilde;
  r.nVf = ev.nVf;
  r.A = ev.A;
  r.d_hat_samples = ev.d_hat_samples;
  r.diagnostics = ev.diagnostics;
  if (!ev.phi_tilde) {
    r.c_n = std::numeric_limits<double>::quiet_NaN();
    r.reject = false;
    return r;
  }
  r.Q = quantile_hat(ev.d_hat_samples, alpha);
  r.c_n = (r.A + r.Q) / (ev.n * std::sqrt(ev.v_fourth1 * ev.v_fourth2));
  // same as phi_tilde > c_n, without the rounding of the division at ties
  r.reject = r.nVf > r.A + r.Q;
  return r;
}

TestReport run_test(const TestInputs& inputs, const TruncationConfig& trunc,
                    const SpotVolConfig& spot, const BootstrapConfig& cfg, const Rng& rng) {
  const TestConfig tc{trunc, spot, cfg};
  return decide(evaluate_test(inputs, tc, rng), cfg.alpha);
}

}  // namespace cojump
