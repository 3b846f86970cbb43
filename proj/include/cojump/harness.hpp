#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cojump/bootstrap.hpp"
#include "cojump/model.hpp"
#include "cojump/sampling.hpp"
#include "cojump/statistics.hpp"

namespace cojump {

struct Scenario {
  std::string name;
  ModelParams params;
  bool requires_common_jump_filter = false;
};

/// The twelve benchmark settings: *-j common jumps only, *-m mixed,
/// *-d0 disjoint with independent Brownian motions, *-d1 disjoint with
/// perfectly correlated ones.
const std::vector<Scenario>& scenario_registry();
/// Throws ParameterError listing the valid names when `name` is unknown.
const Scenario& find_scenario(std::string_view name);

struct HarnessConfig {
  double lambda1 = 1.0;
  double lambda2 = 2.0;
  double horizon = 1.0;
  /// Empty means TestConfig::defaults(n).
  std::optional<TestConfig> tuning;
  std::size_t workers = 1;

  TestConfig tuning_for(double n) const { return tuning ? *tuning : TestConfig::defaults(n); }
};

/// One simulated (path, scheme) pair. Path `index` under `master_seed` draws
/// from substreams "jumps", "scheme", "brownian" and "bootstrap" of
/// Rng(master_seed).derive(index).
struct PathInstance {
  std::vector<JumpEvent> jumps;
  ObservationScheme scheme;
  PathRecord path;
  TestInputs inputs;
  Rng bootstrap_rng{0};
};

PathInstance simulate_instance(const Scenario& scenario, double n, std::uint64_t master_seed,
                               std::uint64_t index, const HarnessConfig& cfg);

/// Draws jumps until the common driver fires at least once when the scenario
/// asks for it.
std::vector<JumpEvent> draw_scenario_jumps(const Scenario& scenario, double horizon, Rng& rng);

struct RejectionCurve {
  std::string scenario;
  double n = 0.0;
  std::vector<double> alpha_grid;
  std::vector<double> rejection_rate;  // NaN when every path was undefined
  std::vector<std::size_t> rejections;
  std::size_t n_paths = 0;
  std::size_t n_undefined = 0;
  std::uint64_t master_seed = 0;
  double wall_time = 0.0;  // seconds
};

/// Monte Carlo rejection frequencies. The bootstrap draws of a path are shared
/// by every level in `alpha_grid`; paths with undefined statistic are counted
/// in n_undefined and left out of the rates.
RejectionCurve run_scenario(const Scenario& scenario, double n, std::size_t n_paths,
                            std::span<const double> alpha_grid, std::uint64_t master_seed,
                            const HarnessConfig& cfg);

inline constexpr std::string_view kCurveCsvHeader =
    "scenario,n,alpha,rejection_rate,n_paths,n_undefined,master_seed";

void write_curves_csv(std::ostream& os, std::span<const RejectionCurve> curves);

}  // namespace cojump
