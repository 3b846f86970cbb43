#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "cojump/rng.hpp"

namespace cojump {

enum class Component : int { One = 1, Two = 2 };

constexpr Component other(Component c) noexcept {
  return c == Component::One ? Component::Two : Component::One;
}
constexpr std::size_t slot(Component c) noexcept { return c == Component::One ? 0 : 1; }

/// Two increasing grids of observation times. Interval i (0-based) of a
/// component is the half-open (t[i], t[i+1]]. Each grid starts at 0 and keeps
/// exactly one time >= horizon.
struct ObservationScheme {
  std::array<std::vector<double>, 2> times;
  double horizon = 1.0;
  /// Asymptotic scale label; statistics that multiply by n read it from here.
  double n = 1.0;

  /// Truncates each grid after its first time >= horizon, then validates.
  static ObservationScheme make(std::vector<double> times1, std::vector<double> times2,
                                double horizon, double n);

  const std::vector<double>& grid(Component c) const { return times[slot(c)]; }
  std::size_t interval_count(Component c) const { return grid(c).size() - 1; }
  double left(Component c, std::size_t i) const { return grid(c)[i]; }
  double right(Component c, std::size_t i) const { return grid(c)[i + 1]; }
  double length(Component c, std::size_t i) const { return right(c, i) - left(c, i); }
  /// Number of intervals whose right endpoint is <= horizon.
  std::size_t complete_count(Component c) const;
  /// max over intervals of |I ^ [0, horizon]|.
  double mesh() const;

  /// Throws ParameterError on a malformed scheme.
  void validate() const;
};

ObservationScheme gen_poisson_scheme(double n, double lambda1, double lambda2, double horizon,
                                     Rng& rng);
ObservationScheme gen_equidistant_scheme(std::size_t n, double horizon);

/// Sorted union of both grids with distances to the neighbouring observations
/// of each component. Forward distances past a component's last time are +inf.
struct MergedGrid {
  std::vector<double> merged_times;
  std::vector<double> deltas;  // deltas[0] = 0
  std::array<std::vector<double>, 2> back;
  std::array<std::vector<double>, 2> fwd;
};

MergedGrid merge(const ObservationScheme& scheme);

struct IntervalPosition {
  std::size_t index = 0;  // s lies in (t[index], t[index+1]]
  double tau_minus = 0.0;  // last observation <= s
  double tau_plus = 0.0;   // first observation >= s
};

/// Locates points among the observation intervals of a scheme. Holds a
/// reference; the scheme must outlive it.
class IntervalIndex {
 public:
  explicit IntervalIndex(const ObservationScheme& scheme) : scheme_(&scheme) {}

  /// Throws DomainError unless 0 < s <= last time of the component.
  IntervalPosition locate(Component c, double s) const;
  /// Total length of the c-intervals overlapping the other component's
  /// interval around s.
  double overlap_span(Component c, double s) const;
  /// Half-open index range [first, last) of c-intervals intersecting (a, b].
  std::pair<std::size_t, std::size_t> overlapping(Component c, double a, double b) const;

 private:
  const ObservationScheme* scheme_;
};

struct IndexPair {
  std::size_t i = 0;  // component-1 interval (0-based)
  std::size_t j = 0;  // component-2 interval (0-based)
  friend bool operator==(const IndexPair&, const IndexPair&) = default;
  friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// All pairs of intersecting intervals with min right endpoint <= horizon,
/// by a linear two-pointer sweep, ordered by (i, j).
std::vector<IndexPair> overlap_pairs(const ObservationScheme& scheme);

struct GnHn {
  double g = 0.0;
  double h = 0.0;
};

GnHn gn_hn(const ObservationScheme& scheme, double t);
GnHn gn_hn(const MergedGrid& grid, double n, double t);

/// Sum of squared Brownian increments of component c over the c-intervals
/// (complete within the horizon) that overlap the other component's interval
/// containing s. `increments` is indexed like the c-intervals.
double eta_n(const ObservationScheme& scheme, std::span<const double> increments, double s,
             Component c);

/// One draw from the limiting law of n * eta for Poisson sampling with
/// intensities lambda_own (the summed component) and lambda_other.
double eta_direct_poisson(double lambda_own, double lambda_other, Rng& rng);

}  // namespace cojump
