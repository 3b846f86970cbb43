#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cojump/model.hpp"
#include "cojump/sampling.hpp"

namespace cojump {

/// Observed increments aligned with the observation intervals of a scheme.
struct TestInputs {
  ObservationScheme scheme;
  std::array<std::vector<double>, 2> incr;

  /// Increments are differences of `prices[c]`, which holds one value per grid time.
  static TestInputs from_prices(ObservationScheme scheme, std::span<const double> prices1,
                                std::span<const double> prices2);
  /// Samples a simulated path at the scheme's grid times.
  static TestInputs from_path(ObservationScheme scheme, const PathRecord& path);

  std::span<const double> increments(Component c) const { return incr[slot(c)]; }
  double length(Component c, std::size_t i) const { return scheme.length(c, i); }
  void validate() const;
};

struct TruncationConfig {
  double beta = 0.03;
  double varpi = 0.49;

  double threshold(double interval_length) const { return beta * std::pow(interval_length, varpi); }
  void validate() const;
};

struct SpotVolConfig {
  double b_n = 0.1;
  bool truncated = false;

  void validate(double horizon) const;
};

/// Hayashi-Yoshida type sum of (dX1)^2 (dX2)^2 over overlapping interval pairs.
double v_cross(const TestInputs& inputs);
/// Sum of fourth powers of the complete increments of one component.
double v_fourth(const TestInputs& inputs, Component c);
/// v_cross / sqrt(v_fourth(1) v_fourth(2)); empty when either fourth-power sum is zero.
std::optional<double> phi_tilde(const TestInputs& inputs);
/// n times the overlap sum restricted to pairs where both increments are
/// within their truncation thresholds.
double a_trunc(const TestInputs& inputs, const TruncationConfig& cfg);

struct SpotVolEstimate {
  double value = 0.0;
  bool empty_window = false;
};

/// Local realized variance of component c on [s - b_n, s + b_n] clipped to
/// [0, horizon], normalized by the clipped window length.
SpotVolEstimate spot_vol(const TestInputs& inputs, double s, Component c,
                         const SpotVolConfig& cfg, const TruncationConfig& trunc);

struct DetectedJump {
  std::size_t index = 0;  // interval of the component
  double size = 0.0;
};

/// Complete intervals whose increment exceeds its truncation threshold.
std::vector<DetectedJump> detect_jumps(const TestInputs& inputs, Component c,
                                       const TruncationConfig& trunc);

}  // namespace cojump
