#include "cojump/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cojump/errors.hpp"

namespace cojump {

void JumpDriverSpec::validate() const {
  if (!(kappa >= 0.0) || !std::isfinite(kappa))
    throw ParameterError("jump intensity kappa must be finite and >= 0");
  if (!active()) return;
  if (!(l > 0.0)) throw ParameterError("jump mark lower bound l must be > 0");
  if (!(h > l)) throw ParameterError("jump mark upper bound h must exceed l");
}

void ModelParams::validate() const {
  if (!(std::abs(rho) <= 1.0)) throw ParameterError("rho must lie in [-1, 1]");
  if (!(sigma1 >= 0.0) || !(sigma2 >= 0.0))
    throw ParameterError("diffusion coefficients must be >= 0");
  if (!(x0[0] > 0.0) || !(x0[1] > 0.0)) throw ParameterError("x0 must be strictly positive");
  for (const auto& d : drivers) d.validate();
}

const std::array<double, 2>& PathRecord::value_at(double t) const {
  auto it = std::lower_bound(event_times.begin(), event_times.end(), t);
  if (it == event_times.end() || *it != t)
    throw DomainError("time " + std::to_string(t) + " is not an event time of the path");
  return values[static_cast<std::size_t>(it - event_times.begin())];
}

std::vector<JumpEvent> simulate_jumps(const ModelParams& params, double horizon, Rng& rng) {
  if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
  for (const auto& d : params.drivers) d.validate();

  Rng local(rng.engine()());
  Rng times = local.derive("times");
  Rng marks = local.derive("marks");

  std::vector<JumpEvent> out;
  for (int i = 0; i < 3; ++i) {
    const auto& spec = params.drivers[static_cast<std::size_t>(i)];
    if (!spec.active()) continue;
    const auto count = times.poisson(spec.kappa * horizon);
    for (std::uint64_t c = 0; c < count; ++c) {
      JumpEvent ev;
      ev.time = horizon * times.uniform_open_left();
      ev.driver = static_cast<Driver>(i);
      const double magnitude = spec.l + (spec.h - spec.l) * marks.uniform();
      ev.mark = marks.coin() ? magnitude : -magnitude;
      out.push_back(ev);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });
  return out;
}

PathRecord simulate_path(const ModelParams& params, double horizon,
                         std::span<const double> eval_times,
                         std::span<const JumpEvent> jumps, Rng& rng) {
  params.validate();
  for (std::size_t i = 0; i < eval_times.size(); ++i) {
    const double t = eval_times[i];
    if (!(t >= 0.0 && t <= horizon))
      throw DomainError("evaluation time " + std::to_string(t) + " outside [0, horizon]");
    if (i > 0 && !(t > eval_times[i - 1]))
      throw DomainError("evaluation times must be strictly increasing");
  }

  std::vector<JumpEvent> js(jumps.begin(), jumps.end());
  for (auto& j : js) {
    if (!(j.time > 0.0 && j.time <= horizon)) throw DomainError("jump time outside (0, horizon]");
    while (std::binary_search(eval_times.begin(), eval_times.end(), j.time))
      j.time = std::nextafter(j.time, -std::numeric_limits<double>::infinity());
  }
  std::stable_sort(js.begin(), js.end(),
                   [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });

  const double s1 = params.sigma1;
  const double s2 = params.sigma2;
  const double rho = params.rho;
  const double rho_c = std::sqrt(std::max(0.0, 1.0 - rho * rho));

  PathRecord rec;
  rec.event_times.reserve(eval_times.size() + js.size());
  rec.values.reserve(eval_times.size() + js.size());

  std::array<double, 2> x = params.x0;
  double now = 0.0;

  auto advance = [&](double t) {
    const double dt = t - now;
    if (dt > 0.0) {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      const double sd = std::sqrt(dt);
      const double dw1 = sd * z1;
      const double dw2 = sd * (rho * z1 + rho_c * z2);
      x[0] *= std::exp(s1 * dw1 - 0.5 * s1 * s1 * dt);
      x[1] *= std::exp(s2 * dw2 - 0.5 * s2 * s2 * dt);
    }
    now = t;
  };
  auto record = [&](double t) {
    if (!rec.event_times.empty() && rec.event_times.back() == t) {
      rec.values.back() = x;
    } else {
      rec.event_times.push_back(t);
      rec.values.push_back(x);
    }
  };

  std::size_t ie = 0;
  std::size_t ij = 0;
  while (ie < eval_times.size() || ij < js.size()) {
    const bool take_jump =
        ij < js.size() && (ie == eval_times.size() || js[ij].time < eval_times[ie]);
    if (take_jump) {
      const JumpEvent& j = js[ij++];
      advance(j.time);
      rec.jump_times.push_back(j.time);
      rec.left_limits.push_back(x);
      const auto& spec = params.driver(j.driver);
      const double factor = spec.alpha * j.mark;
      const bool hits1 = j.driver != Driver::Second;
      const bool hits2 = j.driver != Driver::First;
      if (hits1 && factor != 0.0) {
        rec.jumps[0].push_back({j.time, x[0] * factor});
        x[0] *= 1.0 + factor;
      }
      if (hits2 && factor != 0.0) {
        rec.jumps[1].push_back({j.time, x[1] * factor});
        x[1] *= 1.0 + factor;
      }
      record(j.time);
    } else {
      const double t = eval_times[ie++];
      advance(t);
      record(t);
    }
  }
  return rec;
}

std::optional<double> jump_correlation(std::span<const ComponentJump> jumps1,
                                       std::span<const ComponentJump> jumps2) {
  double b1 = 0.0;
  double b2 = 0.0;
  for (const auto& j : jumps1) b1 += std::pow(j.size, 4);
  for (const auto& j : jumps2) b2 += std::pow(j.size, 4);
  if (jumps1.empty() || jumps2.empty() || b1 == 0.0 || b2 == 0.0) return std::nullopt;

  // Sizes at equal times are accumulated first; lists are sorted by time.
  double b = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < jumps1.size() && j < jumps2.size()) {
    const double t = std::min(jumps1[i].time, jumps2[j].time);
    double d1 = 0.0;
    double d2 = 0.0;
    while (i < jumps1.size() && jumps1[i].time == t) d1 += jumps1[i++].size;
    while (j < jumps2.size() && jumps2[j].time == t) d2 += jumps2[j++].size;
    b += d1 * d1 * d2 * d2;
  }
  return b / std::sqrt(b1 * b2);
}

std::optional<double> jump_correlation(const PathRecord& path) {
  return jump_correlation(path.jumps[0], path.jumps[1]);
}

}  // namespace cojump
