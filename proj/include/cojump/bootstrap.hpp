#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "cojump/rng.hpp"
#include "cojump/sampling.hpp"
#include "cojump/statistics.hpp"

namespace cojump {

struct BootstrapConfig {
  std::size_t K_n = 1;  // half-width of the local resampling window, in intervals
  std::size_t M_n = 1;  // bootstrap replications
  double alpha = 0.05;

  void validate() const;
};

/// Tuning of the whole test. `defaults(n)` gives beta = 0.03, varpi = 0.49,
/// b_n = 1/sqrt(n), K_n = floor(ln n), M_n = n.
struct TestConfig {
  TruncationConfig trunc;
  SpotVolConfig spot;
  BootstrapConfig boot;

  static TestConfig defaults(double n);
  void validate(double horizon) const;
};

/// Distribution of the shift k in [-K, K] around the c-interval containing s,
/// proportional to the length of the shifted interval. Shifts leaving the
/// grid are dropped and the rest renormalized.
struct ShiftLaw {
  std::size_t center = 0;
  std::vector<long> shifts;
  std::vector<double> probabilities;
};

ShiftLaw shift_law(const ObservationScheme& scheme, double s, Component c, std::size_t K);
long sample_shift_index(const ObservationScheme& scheme, double s, Component c, std::size_t K,
                        Rng& rng);

/// Bootstrap law of n * eta for component c at time s. A draw picks a shift of
/// the other component's interval around s and returns n * sum |I| U^2 over
/// the complete c-intervals overlapping the shifted interval.
class EtaHatLaw {
 public:
  EtaHatLaw(const ObservationScheme& scheme, double s, Component c, std::size_t K);

  double draw(Rng& rng) const;
  /// Value for the given support entry with explicit standard normals, one per weight.
  double evaluate(std::size_t support_index, std::span<const double> normals) const;

  const ShiftLaw& shifts() const { return law_; }
  /// n * |I| for each c-interval contributing under a support entry.
  std::span<const double> weights(std::size_t support_index) const {
    return weights_[support_index];
  }

 private:
  std::size_t pick(Rng& rng) const;

  ShiftLaw law_;
  std::vector<double> cumulative_;
  std::vector<std::vector<double>> weights_;
};

double sample_eta_hat(const ObservationScheme& scheme, double s, Component c,
                      const BootstrapConfig& cfg, Rng& rng);

/// Squared spot volatility of the other component at the right endpoint of
/// each detected jump interval of component c.
std::vector<double> spot_vols_at_jumps(const TestInputs& inputs, Component c,
                                       std::span<const DetectedJump> jumps,
                                       const SpotVolConfig& spot, const TruncationConfig& trunc,
                                       std::size_t* empty_windows = nullptr);

/// Draws of the bootstrap cross term
///   sum_i (dX1_i)^2 sigma2^2(t_i) eta2(t_i) + sum_j (dX2_j)^2 sigma1^2(t_j) eta1(t_j)
/// over detected jumps, with fresh eta draws per replication.
class DHatSampler {
 public:
  struct Term {
    Component jump_component;
    std::size_t index;
    double weight;  // (jump size)^2 * spot variance of the other component
  };

  DHatSampler(const TestInputs& inputs, std::span<const DetectedJump> jumps1,
              std::span<const DetectedJump> jumps2, std::span<const double> spot_vols1,
              std::span<const double> spot_vols2, const BootstrapConfig& cfg);

  double draw(Rng& rng) const;
  /// Sum of weight * eta over terms for given eta values.
  double evaluate(std::span<const double> etas) const;
  const std::vector<Term>& terms() const { return terms_; }

 private:
  std::vector<Term> terms_;
  std::vector<EtaHatLaw> laws_;
};

double sample_d_hat(const TestInputs& inputs, std::span<const DetectedJump> jumps1,
                    std::span<const DetectedJump> jumps2, std::span<const double> spot_vols1,
                    std::span<const double> spot_vols2, const BootstrapConfig& cfg, Rng& rng);

/// The floor(alpha N)-th largest sample; the maximum when floor(alpha N) = 0.
double quantile_hat(std::span<const double> samples, double alpha);

struct TestDiagnostics {
  std::size_t jumps1 = 0;
  std::size_t jumps2 = 0;
  std::size_t empty_spot_windows = 0;
  bool phi_undefined = false;
};

/// Everything in a test that does not depend on the level alpha.
struct TestEvaluation {
  double n = 1.0;
  std::optional<double> phi_tilde;
  double v_cross = 0.0;
  double v_fourth1 = 0.0;
  double v_fourth2 = 0.0;
  double nVf = 0.0;
  double A = 0.0;
  std::vector<double> d_hat_samples;  // replication m at position m
  TestDiagnostics diagnostics;
};

struct TestReport {
  double alpha = 0.05;
  std::optional<double> phi_tilde;
  double nVf = 0.0;
  double A = 0.0;
  double Q = 0.0;
  double c_n = 0.0;  // NaN when phi_tilde is undefined
  bool reject = false;
  std::vector<double> d_hat_samples;
  TestDiagnostics diagnostics;
};

/// Replication m uses `rng.derive(m)`, so draws do not depend on evaluation order.
TestEvaluation evaluate_test(const TestInputs& inputs, const TestConfig& cfg, const Rng& rng);
TestReport decide(const TestEvaluation& eval, double alpha);

TestReport run_test(const TestInputs& inputs, const TruncationConfig& trunc,
                    const SpotVolConfig& spot, const BootstrapConfig& cfg, const Rng& rng);

}  // namespace cojump
