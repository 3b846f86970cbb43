#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cojump/rng.hpp"

namespace cojump {

/// Compound Poisson jump driver with marks uniform on [-h,-l] u [l,h].
/// The driver multiplies the components it hits by (1 + alpha * mark).
struct JumpDriverSpec {
  double alpha = 0.0;
  double kappa = 0.0;  // intensity per unit time
  double l = 0.05;
  double h = 0.7484;

  /// A driver that never fires.
  static JumpDriverSpec none() { return {}; }

  bool active() const noexcept { return kappa > 0.0; }
  /// Throws ParameterError unless kappa >= 0 and, for an active driver, 0 < l < h.
  void validate() const;
};

enum class Driver : int { First = 0, Second = 1, Common = 2 };

/// Multiplicative bivariate jump diffusion: each component is a driftless
/// geometric Brownian motion with correlated drivers, hit by driver 1
/// (component 1 only), driver 2 (component 2 only) and driver 3 (both).
struct ModelParams {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double rho = 0.0;
  std::array<JumpDriverSpec, 3> drivers{};
  std::array<double, 2> x0{1.0, 1.0};

  const JumpDriverSpec& driver(Driver d) const { return drivers[static_cast<int>(d)]; }
  void validate() const;
};

struct JumpEvent {
  double time = 0.0;
  Driver driver = Driver::First;
  double mark = 0.0;
};

struct ComponentJump {
  double time = 0.0;
  double size = 0.0;
};

/// Exact realization of the model at a set of event times.
struct PathRecord {
  std::vector<double> event_times;
  std::vector<std::array<double, 2>> values;
  /// X_{s-} at each jump event, in the order of `jump_times`.
  std::vector<double> jump_times;
  std::vector<std::array<double, 2>> left_limits;
  /// Per-component jump lists (time, Delta X), sorted by time.
  std::array<std::vector<ComponentJump>, 2> jumps;

  /// Value at an exact event time; throws DomainError if `t` is not one.
  const std::array<double, 2>& value_at(double t) const;
};

/// Draws the jump events of all three drivers on (0, horizon], sorted by time.
std::vector<JumpEvent> simulate_jumps(const ModelParams& params, double horizon, Rng& rng);

/// Exact event-driven simulation at `eval_times` (sorted, inside [0, horizon])
/// with the given jumps. A jump time that coincides with an evaluation time
/// is moved one ulp to the left so it falls inside the interval it closes.
PathRecord simulate_path(const ModelParams& params, double horizon,
                         std::span<const double> eval_times,
                         std::span<const JumpEvent> jumps, Rng& rng);

/// Realized correlation of squared jumps, sum (dX1 dX2)^2 / sqrt(sum dX1^4 sum dX2^4).
/// Empty when either component has no jumps.
std::optional<double> jump_correlation(const PathRecord& path);

/// Same functional on explicit jump lists; common jumps are those at equal times.
std::optional<double> jump_correlation(std::span<const ComponentJump> jumps1,
                                       std::span<const ComponentJump> jumps2);

}  // namespace cojump
