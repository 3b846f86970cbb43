#include "cojump/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cojump/errors.hpp"

namespace cojump {

namespace {

void truncate_after_horizon(std::vector<double>& t, double horizon) {
  auto it = std::lower_bound(t.begin(), t.end(), horizon);
  if (it != t.end()) t.erase(it + 1, t.end());
}

void validate_grid(const std::vector<double>& t, double horizon, const char* name) {
  if (t.size() < 2) throw ParameterError(std::string(name) + ": need at least two times");
  if (t.front() != 0.0) throw ParameterError(std::string(name) + ": first time must be 0");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (!(t[i] > t[i - 1]))
      throw ParameterError(std::string(name) + ": times not strictly increasing at index " +
                           std::to_string(i));
  }
  if (!(t.back() >= horizon))
    throw ParameterError(std::string(name) + ": last time must be >= horizon");
  if (t.size() >= 3 && t[t.size() - 2] >= horizon)
    throw ParameterError(std::string(name) + ": only one time >= horizon may be retained");
}

}  // namespace

ObservationScheme ObservationScheme::make(std::vector<double> times1, std::vector<double> times2,
                                          double horizon, double n) {
  ObservationScheme s;
  truncate_after_horizon(times1, horizon);
  truncate_after_horizon(times2, horizon);
  s.times = {std::move(times1), std::move(times2)};
  s.horizon = horizon;
  s.n = n;
  s.validate();
  return s;
}

void ObservationScheme::validate() const {
  if (!(horizon > 0.0)) throw ParameterError("scheme horizon must be positive");
  if (!(n > 0.0) || !std::isfinite(n)) throw ParameterError("scheme scale n must be positive");
  validate_grid(times[0], horizon, "times1");
  validate_grid(times[1], horizon, "times2");
}

std::size_t ObservationScheme::complete_count(Component c) const {
  const auto& t = grid(c);
  // intervals i with t[i+1] <= horizon
  const auto last = std::upper_bound(t.begin() + 1, t.end(), horizon);
  return static_cast<std::size_t>(last - (t.begin() + 1));
}

double ObservationScheme::mesh() const {
  double m = 0.0;
  for (const auto& t : times)
    for (std::size_t i = 1; i < t.size(); ++i)
      m = std::max(m, std::min(t[i], horizon) - std::min(t[i - 1], horizon));
  return m;
}

ObservationScheme gen_poisson_scheme(double n, double lambda1, double lambda2, double horizon,
                                     Rng& rng) {
  if (!(n >= 1.0)) throw ParameterError("Poisson scheme needs n >= 1");
  if (!(lambda1 > 0.0) || !(lambda2 > 0.0)) throw ParameterError("intensities must be positive");
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
  ObservationScheme s;
  s.horizon = horizon;
  s.n = n;
  const std::array<double, 2> rates{n * lambda1, n * lambda2};
  for (std::size_t c = 0; c < 2; ++c) {
    auto& t = s.times[c];
    t.reserve(static_cast<std::size_t>(rates[c] * horizon * 1.2) + 16);
    t.push_back(0.0);
    while (t.back() < horizon) t.push_back(t.back() + rng.exponential(rates[c]));
  }
  return s;
}

ObservationScheme gen_equidistant_scheme(std::size_t n, double horizon) {
  if (n < 1) throw ParameterError("equidistant scheme needs n >= 1");
  if (!(horizon > 0.0)) throw ParameterError("horizon must be positive");
  std::vector<double> t(n + 1);
  for (std::size_t i = 0; i <= n; ++i)
    t[i] = i == n ? horizon : horizon * static_cast<double>(i) / static_cast<double>(n);
  ObservationScheme s;
  s.times = {t, t};
  s.horizon = horizon;
  s.n = static_cast<double>(n);
  return s;
}

MergedGrid merge(const ObservationScheme& scheme) {
  const auto& a = scheme.times[0];
  const auto& b = scheme.times[1];
  MergedGrid g;
  g.merged_times.reserve(a.size() + b.size());
  std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(g.merged_times));
  g.merged_times.erase(std::unique(g.merged_times.begin(), g.merged_times.end()),
                       g.merged_times.end());

  const std::size_t k_count = g.merged_times.size();
  g.deltas.assign(k_count, 0.0);
  for (std::size_t c = 0; c < 2; ++c) {
    g.back[c].assign(k_count, 0.0);
    g.fwd[c].assign(k_count, 0.0);
  }
  std::array<std::size_t, 2> p{0, 0};  // first index with t >= T_k
  for (std::size_t k = 0; k < k_count; ++k) {
    const double tk = g.merged_times[k];
    if (k > 0) g.deltas[k] = tk - g.merged_times[k - 1];
    for (std::size_t c = 0; c < 2; ++c) {
      const auto& t = scheme.times[c];
      while (p[c] < t.size() && t[p[c]] < tk) ++p[c];
      if (p[c] < t.size()) {
        g.fwd[c][k] = t[p[c]] - tk;
        const double prev = t[p[c]] == tk ? tk : t[p[c] - 1];
        g.back[c][k] = tk - prev;
      } else {
        g.fwd[c][k] = std::numeric_limits<double>::infinity();
        g.back[c][k] = tk - t.back();
      }
    }
  }
  return g;
}

IntervalPosition IntervalIndex::locate(Component c, double s) const {
  const auto& t = scheme_->grid(c);
  if (!(s > 0.0) || s > t.back())
    throw DomainError("point " + std::to_string(s) + " is not inside any observation interval");
  const auto it = std::lower_bound(t.begin(), t.end(), s);
  const auto p = static_cast<std::size_t>(it - t.begin());
  IntervalPosition pos;
  pos.index = p - 1;
  pos.tau_plus = t[p];
  pos.tau_minus = t[p] == s ? s : t[p - 1];
  return pos;
}

double IntervalIndex::overlap_span(Component c, double s) const {
  const auto& t = scheme_->grid(c);
  const auto o = locate(other(c), s);
  // tau_+^(c)(tau_+^(other)(s)) - tau_-^(c)(tau_-^(other)(s))
  const auto up = std::lower_bound(t.begin(), t.end(), o.tau_plus);
  const double hi = up == t.end() ? std::numeric_limits<double>::infinity() : *up;
  const auto down = std::upper_bound(t.begin(), t.end(), o.tau_minus);
  const double lo = *(down - 1);
  return hi - lo;
}

std::pair<std::size_t, std::size_t> IntervalIndex::overlapping(Component c, double a,
                                                                double b) const {
  const auto& t = scheme_->grid(c);
  // interval i = (t[i], t[i+1]] meets (a, b] iff t[i] < b and a < t[i+1]
  const auto first_right = std::upper_bound(t.begin() + 1, t.end(), a);
  const std::size_t first = static_cast<std::size_t>(first_right - (t.begin() + 1));
  const auto left_end = std::lower_bound(t.begin(), t.end() - 1, b);
  const std::size_t last = static_cast<std::size_t>(left_end - t.begin());
  return {first, std::max(first, last)};
}

std::vector<IndexPair> overlap_pairs(const ObservationScheme& scheme) {
  const auto& a = scheme.times[0];
  const auto& c = scheme.times[1];
  const std::size_t n1 = a.size() - 1;
  const std::size_t n2 = c.size() - 1;
  std::vector<IndexPair> out;
  out.reserve(n1 + n2);
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < n1 && j < n2) {
    const double r1 = a[i + 1];
    const double r2 = c[j + 1];
    if (std::min(r1, r2) > scheme.horizon) break;
    if (a[i] < r2 && c[j] < r1) out.push_back({i, j});
    if (r1 < r2) {
      ++i;
    } else if (r2 < r1) {
      ++j;
    } else {
      ++i;
      ++j;
    }
  }
  return out;
}

GnHn gn_hn(const MergedGrid& grid, double n, double t) {
  GnHn r;
  for (std::size_t k = 1; k < grid.merged_times.size() && grid.merged_times[k] <= t; ++k) {
    const double d = grid.deltas[k];
    r.g += d * d;
    const double span1 = grid.back[0][k - 1] + d + grid.fwd[0][k];
    const double span2 = grid.back[1][k - 1] + d + grid.fwd[1][k];
    r.h += span1 * span2;
  }
  r.g *= n;
  r.h *= n;
  return r;
}

GnHn gn_hn(const ObservationScheme& scheme, double t) {
  if (!(t >= 0.0 && t <= scheme.horizon)) throw DomainError("t must lie in [0, horizon]");
  return gn_hn(merge(scheme), scheme.n, t);
}

double eta_n(const ObservationScheme& scheme, std::span<const double> increments, double s,
             Component c) {
  if (increments.size() != scheme.interval_count(c))
    throw ParameterError("increment count does not match the interval count");
  IntervalIndex index(scheme);
  const Component o = other(c);
  const auto pos = index.locate(o, s);
  auto [first, last] =
      index.overlapping(c, scheme.left(o, pos.index), scheme.right(o, pos.index));
  last = std::min(last, scheme.complete_count(c));
  double sum = 0.0;
  for (std::size_t i = first; i < last; ++i) sum += increments[i] * increments[i];
  return sum;
}

double eta_direct_poisson(double lambda_own, double lambda_other, Rng& rng) {
  if (!(lambda_own > 0.0) || !(lambda_other > 0.0))
    throw ParameterError("intensities must be positive");
  const double back_own = rng.exponential(lambda_own);
  const double fwd_own = rng.exponential(lambda_own);
  const double span_other = rng.exponential(lambda_other) + rng.exponential(lambda_other);
  const auto inside = rng.poisson(lambda_own * span_other);

  std::vector<double> r;
  r.reserve(inside + 2);
  r.push_back(0.0);
  for (std::uint64_t j = 0; j < inside; ++j) r.push_back(back_own + rng.uniform() * span_other);
  r.push_back(back_own + span_other + fwd_own);
  std::sort(r.begin(), r.end());

  double eta = 0.0;
  for (std::size_t j = 1; j < r.size(); ++j) {
    const double z = rng.normal();
    eta += (r[j] - r[j - 1]) * z * z;
  }
  return eta;
}

}  // namespace cojump
