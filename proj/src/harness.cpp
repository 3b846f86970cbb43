#include "cojump/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <thread>

#include "cojump/errors.hpp"
#include "cojump/io.hpp"

namespace cojump {

namespace {

constexpr double kSigma = 0.0089442719099991587;  // sqrt(8e-5)

struct JumpBand {
  double kappa;
  double h;
};
constexpr JumpBand kBandI{1.0, 0.7484};
constexpr JumpBand kBandII{5.0, 0.3187};
constexpr JumpBand kBandIII{25.0, 0.1238};

JumpDriverSpec driver_for(JumpBand b) { return {0.01, b.kappa, 0.05, b.h}; }

Scenario make(std::string name, double rho, bool d1, bool d2, bool d3, JumpBand band) {
  Scenario s;
  s.name = std::move(name);
  s.params.sigma1 = kSigma;
  s.params.sigma2 = kSigma;
  s.params.rho = rho;
  s.params.drivers[0] = d1 ? driver_for(band) : JumpDriverSpec::none();
  s.params.drivers[1] = d2 ? driver_for(band) : JumpDriverSpec::none();
  s.params.drivers[2] = d3 ? driver_for(band) : JumpDriverSpec::none();
  s.requires_common_jump_filter = d3;
  return s;
}

std::vector<Scenario> build_registry() {
  std::vector<Scenario> r;
  const std::pair<const char*, JumpBand> bands[] = {
      {"I", kBandI}, {"II", kBandII}, {"III", kBandIII}};
  for (const auto& [p, b] : bands) r.push_back(make(std::string(p) + "-j", 0.0, false, false, true, b));
  for (const auto& [p, b] : bands) r.push_back(make(std::string(p) + "-m", 0.5, true, true, true, b));
  for (const auto& [p, b] : bands) r.push_back(make(std::string(p) + "-d0", 0.0, true, true, false, b));
  for (const auto& [p, b] : bands) r.push_back(make(std::string(p) + "-d1", 1.0, true, true, false, b));
  return r;
}

}  // namespace

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> registry = build_registry();
  return registry;
}

const Scenario& find_scenario(std::string_view name) {
  for (const auto& s : scenario_registry())
    if (s.name == name) return s;
  std::string msg = "unknown scenario '" + std::string(name) + "'; valid names:";
  for (const auto& s : scenario_registry()) msg += " " + s.name;
  throw ParameterError(msg);
}

std::vector<JumpEvent> draw_scenario_jumps(const Scenario& scenario, double horizon, Rng& rng) {
  for (;;) {
    auto jumps = simulate_jumps(scenario.params, horizon, rng);
    if (!scenario.requires_common_jump_filter) return jumps;
    const bool common = std::any_of(jumps.begin(), jumps.end(),
                                    [](const JumpEvent& j) { return j.driver == Driver::Common; });
    if (common) return jumps;
  }
}

PathInstance simulate_instance(const Scenario& scenario, double n, std::uint64_t master_seed,
                               std::uint64_t index, const HarnessConfig& cfg) {
  const Rng root = Rng(master_seed).derive(index);
  Rng jump_rng = root.derive("jumps");
  Rng scheme_rng = root.derive("scheme");
  Rng brownian_rng = root.derive("brownian");

  PathInstance inst;
  inst.jumps = draw_scenario_jumps(scenario, cfg.horizon, jump_rng);
  inst.scheme = gen_poisson_scheme(n, cfg.lambda1, cfg.lambda2, cfg.horizon, scheme_rng);

  std::vector<double> eval;
  const auto& t1 = inst.scheme.times[0];
  const auto& t2 = inst.scheme.times[1];
  eval.reserve(t1.size() + t2.size());
  std::merge(t1.begin(), t1.end(), t2.begin(), t2.end(), std::back_inserter(eval));
  eval.erase(std::unique(eval.begin(), eval.end()), eval.end());

  inst.path = simulate_path(scenario.params, eval.back(), eval, inst.jumps, brownian_rng);
  inst.inputs = TestInputs::from_path(inst.scheme, inst.path);
  inst.bootstrap_rng = root.derive("bootstrap");
  return inst;
}

RejectionCurve run_scenario(const Scenario& scenario, double n, std::size_t n_paths,
                            std::span<const double> alpha_grid, std::uint64_t master_seed,
                            const HarnessConfig& cfg) {
  if (n_paths < 1) throw ParameterError("n_paths must be >= 1");
  for (double a : alpha_grid)
    if (!(a >= 0.0 && a <= 1.0)) throw ParameterError("alpha values must lie in [0, 1]");
  const TestConfig tuning = cfg.tuning_for(n);
  tuning.validate(cfg.horizon);

  const auto start = std::chrono::steady_clock::now();

  std::vector<std::vector<unsigned char>> outcome(n_paths);
  std::vector<unsigned char> undefined(n_paths, 0);
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t p = next++; p < n_paths; p = next++) {
      const auto inst = simulate_instance(scenario, n, master_seed, p, cfg);
      const auto ev = evaluate_test(inst.inputs, tuning, inst.bootstrap_rng);
      auto& row = outcome[p];
      row.assign(alpha_grid.size(), 0);
      if (!ev.phi_tilde) {
        undefined[p] = 1;
        continue;
      }
      for (std::size_t a = 0; a < alpha_grid.size(); ++a)
        row[a] = decide(ev, alpha_grid[a]).reject ? 1 : 0;
    }
  };
  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, n_paths));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  RejectionCurve curve;
  curve.scenario = scenario.name;
  curve.n = n;
  curve.alpha_grid.assign(alpha_grid.begin(), alpha_grid.end());
  curve.rejections.assign(alpha_grid.size(), 0);
  curve.n_paths = n_paths;
  curve.master_seed = master_seed;
  for (std::size_t p = 0; p < n_paths; ++p) {
    if (undefined[p]) {
      ++curve.n_undefined;
      continue;
    }
    for (std::size_t a = 0; a < alpha_grid.size(); ++a) curve.rejections[a] += outcome[p][a];
  }
  const std::size_t defined = n_paths - curve.n_undefined;
  for (std::size_t a = 0; a < alpha_grid.size(); ++a) {
    curve.rejection_rate.push_back(defined == 0 ? std::numeric_limits<double>::quiet_NaN()
                                                : static_cast<double>(curve.rejections[a]) /
                                                      static_cast<double>(defined));
  }
  curve.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return curve;
}

void write_curves_csv(std::ostream& os, std::span<const RejectionCurve> curves) {
  os << kCurveCsvHeader << '\n';
  for (const auto& c : curves) {
    for (std::size_t a = 0; a < c.alpha_grid.size(); ++a) {
      os << c.scenario << ',' << format_double(c.n) << ',' << format_double(c.alpha_grid[a]) << ','
         << format_double(c.rejection_rate[a]) << ',' << c.n_paths << ',' << c.n_undefined << ','
         << c.master_seed << '\n';
    }
  }
}

}  // namespace cojump
