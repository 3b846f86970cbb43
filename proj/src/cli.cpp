#include "cojump/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "cojump/bootstrap.hpp"
#include "cojump/errors.hpp"
#include "cojump/harness.hpp"
#include "cojump/io.hpp"

namespace cojump::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Kind { Int, Double, Bool, String, DoubleList, StringList };

struct Key {
  std::string name;
  Kind kind;
  json fallback;  // null: resolved later or required
};

/// A subcommand's keys, each settable from the config file or a flag.
struct Command {
  std::vector<Key> keys;
  std::map<std::string, std::string> flag_values;
  std::string config_file;
};

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + text + "'");
  }
}

json from_flag(const Key& k, const std::string& text) {
  switch (k.kind) {
    case Kind::Int: {
      const double v = to_double(k.name, text);
      if (v != std::floor(v) || v < 0)
        throw ConfigError("key '" + k.name + "': expected a nonnegative integer");
      return json(static_cast<std::uint64_t>(v));
    }
    case Kind::Double:
      return json(to_double(k.name, text));
    case Kind::Bool:
      if (text == "true" || text == "1") return json(true);
      if (text == "false" || text == "0") return json(false);
      throw ConfigError("key '" + k.name + "': expected true or false");
    case Kind::String:
      return json(text);
    case Kind::DoubleList: {
      json arr = json::array();
      for (const auto& item : split(text)) arr.push_back(to_double(k.name, item));
      return arr;
    }
    case Kind::StringList: {
      json arr = json::array();
      for (const auto& item : split(text)) arr.push_back(item);
      return arr;
    }
  }
  return json();
}

void check_kind(const Key& k, json& v) {
  const auto fail = [&](const char* what) {
    throw ConfigError("key '" + k.name + "': expected " + what);
  };
  if (v.is_null()) return;
  switch (k.kind) {
    case Kind::Int:
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
        fail("a nonnegative integer");
      break;
    case Kind::Double:
      if (!v.is_number()) fail("a number");
      break;
    case Kind::Bool:
      if (!v.is_boolean()) fail("true or false");
      break;
    case Kind::String:
      if (!v.is_string() && !v.is_object()) fail("a string");
      break;
    case Kind::DoubleList:
      if (v.is_number()) v = json::array({v});
      if (!v.is_array()) fail("a list of numbers");
      for (const auto& e : v)
        if (!e.is_number()) fail("a list of numbers");
      break;
    case Kind::StringList:
      if (v.is_string()) v = json::array({v});
      if (!v.is_array()) fail("a list of strings");
      for (const auto& e : v)
        if (!e.is_string()) fail("a list of strings");
      break;
  }
}

/// defaults < config file < flags
json resolve(const Command& cmd) {
  json resolved = json::object();
  for (const auto& k : cmd.keys) resolved[k.name] = k.fallback;

  if (!cmd.config_file.empty()) {
    std::ifstream in(cmd.config_file);
    if (!in) throw ConfigError("cannot open config file '" + cmd.config_file + "'");
    json file;
    try {
      file = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError("config file '" + cmd.config_file + "': " + e.what());
    }
    if (!file.is_object()) throw ConfigError("config file must hold a JSON object");
    for (auto& [name, value] : file.items()) {
      const auto it = std::find_if(cmd.keys.begin(), cmd.keys.end(),
                                   [&](const Key& k) { return k.name == name; });
      if (it == cmd.keys.end()) throw ConfigError("unknown config key '" + name + "'");
      resolved[name] = value;
    }
  }
  for (const auto& [name, text] : cmd.flag_values) {
    const auto it = std::find_if(cmd.keys.begin(), cmd.keys.end(),
                                 [&](const Key& k) { return k.name == name; });
    resolved[name] = from_flag(*it, text);
  }
  for (const auto& k : cmd.keys) check_kind(k, resolved[k.name]);
  return resolved;
}

template <class T>
T get(const json& cfg, const std::string& key) {
  const auto& v = cfg.at(key);
  if (v.is_null()) throw ConfigError("missing required key '" + key + "'");
  return v.get<T>();
}

std::string describe(const Key& k) {
  static const char* names[] = {"integer", "number", "true/false", "text",
                                "comma-separated numbers", "comma-separated names"};
  std::string d = names[static_cast<int>(k.kind)];
  if (!k.fallback.is_null()) {
    const auto& f = k.fallback;
    d += " (default " + (f.is_string() ? f.get<std::string>() : f.dump()) + ")";
  }
  return d;
}

void register_flags(CLI::App* sub, Command& cmd) {
  sub->add_option("--config", cmd.config_file, "JSON file with default values for any key");
  for (const auto& k : cmd.keys) {
    if (k.name == "model") continue;  // config file only
    sub->add_option_function<std::string>(
        "--" + k.name, [&cmd, name = k.name](const std::string& v) { cmd.flag_values[name] = v; },
        describe(k));
  }
}

std::uint64_t seed_of(const json& cfg) { return get<std::uint64_t>(cfg, "seed"); }

TestConfig tuning_from(const json& cfg, double n) {
  TestConfig tc = TestConfig::defaults(n);
  tc.trunc.beta = get<double>(cfg, "beta");
  tc.trunc.varpi = get<double>(cfg, "varpi");
  if (!cfg.at("b_n").is_null()) tc.spot.b_n = get<double>(cfg, "b_n");
  tc.spot.truncated = get<bool>(cfg, "truncated_spot");
  if (!cfg.at("K_n").is_null()) tc.boot.K_n = get<std::size_t>(cfg, "K_n");
  if (!cfg.at("M_n").is_null()) tc.boot.M_n = get<std::size_t>(cfg, "M_n");
  return tc;
}

json tuning_echo(const TestConfig& tc) {
  return {{"beta", tc.trunc.beta},   {"varpi", tc.trunc.varpi}, {"b_n", tc.spot.b_n},
          {"truncated_spot", tc.spot.truncated}, {"K_n", tc.boot.K_n}, {"M_n", tc.boot.M_n}};
}

std::vector<Key> tuning_keys() {
  return {{"beta", Kind::Double, 0.03},          {"varpi", Kind::Double, 0.49},
          {"b_n", Kind::Double, nullptr},        {"truncated_spot", Kind::Bool, false},
          {"K_n", Kind::Int, nullptr},           {"M_n", Kind::Int, nullptr}};
}

ModelParams model_from_json(const json& m, const ModelParams& base) {
  ModelParams p = base;
  const auto num = [&](const json& obj, const char* key, double& field) {
    if (obj.contains(key)) {
      if (!obj[key].is_number()) throw ConfigError(std::string("model key '") + key + "' must be a number");
      field = obj[key].get<double>();
    }
  };
  for (const auto& [key, _] : m.items()) {
    static const char* allowed[] = {"sigma1", "sigma2", "rho", "x0", "drivers"};
    if (std::find(std::begin(allowed), std::end(allowed), key) == std::end(allowed))
      throw ConfigError("unknown model key '" + key + "'");
  }
  num(m, "sigma1", p.sigma1);
  num(m, "sigma2", p.sigma2);
  num(m, "rho", p.rho);
  if (m.contains("x0")) p.x0 = m["x0"].get<std::array<double, 2>>();
  if (m.contains("drivers")) {
    const auto& d = m["drivers"];
    if (!d.is_array() || d.size() != 3) throw ConfigError("model key 'drivers' needs 3 entries");
    for (std::size_t i = 0; i < 3; ++i) {
      JumpDriverSpec s{};
      s.alpha = 0.0;
      num(d[i], "alpha", s.alpha);
      num(d[i], "kappa", s.kappa);
      num(d[i], "l", s.l);
      num(d[i], "h", s.h);
      p.drivers[i] = s;
    }
  }
  p.validate();
  return p;
}

json model_to_json(const ModelParams& p) {
  json drivers = json::array();
  for (const auto& d : p.drivers)
    drivers.push_back({{"alpha", d.alpha}, {"kappa", d.kappa}, {"l", d.l}, {"h", d.h}});
  return {{"sigma1", p.sigma1}, {"sigma2", p.sigma2}, {"rho", p.rho}, {"x0", p.x0},
          {"drivers", drivers}};
}

void write_file(const fs::path& file, const std::string& content) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write '" + file.string() + "'");
  os << content;
  if (!os) throw std::runtime_error("write failed for '" + file.string() + "'");
}

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream os;
  fn(os);
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Command& cmd, std::ostream& out) {
  json cfg = resolve(cmd);
  const auto& scenario_name = get<std::string>(cfg, "scenario");
  Scenario scenario = find_scenario(scenario_name);
  if (!cfg.at("model").is_null()) {
    if (!cfg["model"].is_object()) throw ConfigError("key 'model': expected an object");
    scenario.name = "custom";
    scenario.params = model_from_json(cfg["model"], scenario.params);
    scenario.requires_common_jump_filter = get<bool>(cfg, "common_jump_filter");
  }
  const double n = get<double>(cfg, "n");
  HarnessConfig hc;
  hc.lambda1 = get<double>(cfg, "lambda1");
  hc.lambda2 = get<double>(cfg, "lambda2");
  hc.horizon = get<double>(cfg, "T");
  const auto path_index = get<std::uint64_t>(cfg, "path");
  const fs::path dir = get<std::string>(cfg, "out");

  const auto inst = simulate_instance(scenario, n, seed_of(cfg), path_index, hc);
  fs::create_directories(dir);
  for (std::size_t c = 0; c < 2; ++c) {
    const auto& t = inst.scheme.times[c];
    std::vector<double> prices;
    for (double x : t) prices.push_back(inst.path.value_at(x)[c]);
    const auto tag = std::to_string(c + 1);
    write_file(dir / ("scheme" + tag + ".csv"), render([&](std::ostream& os) { write_scheme_csv(os, t); }));
    write_file(dir / ("prices" + tag + ".csv"),
               render([&](std::ostream& os) { write_price_csv(os, t, prices); }));
  }
  write_file(dir / "jumps.csv", render([&](std::ostream& os) { write_jumps_csv(os, inst.path); }));

  json echo = cfg;
  echo["model"] = model_to_json(scenario.params);
  echo["common_jump_filter"] = scenario.requires_common_jump_filter;
  const auto phi = jump_correlation(inst.path);
  echo["jump_correlation"] = phi ? json(*phi) : json(nullptr);
  write_file(dir / "config.json", echo.dump(2) + "\n");
  out << echo.dump(2) << '\n';
  return 0;
}

int cmd_test(const Command& cmd, std::ostream& out) {
  json cfg = resolve(cmd);
  const auto p1 = read_price_csv(fs::path(get<std::string>(cfg, "prices1")));
  const auto p2 = read_price_csv(fs::path(get<std::string>(cfg, "prices2")));

  double horizon = cfg.at("T").is_null() ? std::min(p1.times.back(), p2.times.back())
                                         : get<double>(cfg, "T");
  if (!(horizon > 0.0)) throw ConfigError("key 'T': horizon must be positive");
  if (p1.times.back() < horizon || p2.times.back() < horizon)
    throw ConfigError("key 'T': both series must reach the horizon");

  double n = 0.0;
  if (cfg.at("n").is_null()) {
    n = static_cast<double>(
        std::upper_bound(p1.times.begin(), p1.times.end(), horizon) - p1.times.begin());
  } else {
    n = get<double>(cfg, "n");
  }
  auto scheme = ObservationScheme::make(p1.times, p2.times, horizon, n);
  const std::span<const double> pr1(p1.prices.data(), scheme.times[0].size());
  const std::span<const double> pr2(p2.prices.data(), scheme.times[1].size());
  const auto inputs = TestInputs::from_prices(std::move(scheme), pr1, pr2);

  const TestConfig tc = tuning_from(cfg, n);
  const double alpha = get<double>(cfg, "alpha");
  const Rng rng = Rng(seed_of(cfg)).derive("bootstrap");
  const auto report = decide(evaluate_test(inputs, tc, rng), alpha);

  json echo = cfg;
  echo["T"] = horizon;
  echo["n"] = n;
  echo.update(tuning_echo(tc));
  json result = report_to_json(report);
  result["config"] = echo;
  out << result.dump(2) << '\n';

  if (!cfg.at("draws").is_null())
    write_file(get<std::string>(cfg, "draws"),
               render([&](std::ostream& os) { write_draws_csv(os, report.d_hat_samples); }));
  return 0;
}

int cmd_mc(const Command& cmd, std::ostream& out) {
  json cfg = resolve(cmd);
  const auto names = get<std::vector<std::string>>(cfg, "scenario");
  const auto ns = get<std::vector<double>>(cfg, "n");
  const auto alphas = get<std::vector<double>>(cfg, "alpha");
  const auto paths = get<std::size_t>(cfg, "paths");
  if (names.empty()) throw ConfigError("key 'scenario': need at least one scenario");
  if (ns.empty()) throw ConfigError("key 'n': need at least one value");
  if (paths < 1) throw ConfigError("key 'paths': need at least one path");
  for (double n : ns)
    if (!(n >= 1.0)) throw ConfigError("key 'n': values must be >= 1");
  for (double a : alphas)
    if (!(a >= 0.0 && a <= 1.0)) throw ConfigError("key 'alpha': values must lie in [0, 1]");

  std::vector<const Scenario*> scenarios;
  for (const auto& name : names) scenarios.push_back(&find_scenario(name));

  HarnessConfig hc;
  hc.lambda1 = get<double>(cfg, "lambda1");
  hc.lambda2 = get<double>(cfg, "lambda2");
  hc.horizon = get<double>(cfg, "T");
  hc.workers = std::max<std::size_t>(1, get<std::size_t>(cfg, "workers"));

  std::vector<RejectionCurve> curves;
  json per_run = json::array();
  for (const auto* sc : scenarios) {
    for (double n : ns) {
      hc.tuning = tuning_from(cfg, n);
      curves.push_back(run_scenario(*sc, n, paths, alphas, seed_of(cfg), hc));
      per_run.push_back({{"scenario", sc->name}, {"n", n}, {"tuning", tuning_echo(*hc.tuning)}});
    }
  }

  const std::string csv = render([&](std::ostream& os) { write_curves_csv(os, curves); });
  const auto target = get<std::string>(cfg, "out");
  if (target == "-") {
    out << csv;
  } else {
    write_file(target, csv);
  }
  if (!cfg.at("json").is_null()) {
    json side = {{"config", cfg}, {"runs", per_run}};
    side["config"].erase("workers");
    write_file(get<std::string>(cfg, "json"), side.dump(2) + "\n");
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Test for common jumps under asynchronous observations"};
  app.require_subcommand(1);

  Command sim;
  sim.keys = {{"scenario", Kind::String, "I-j"},
              {"model", Kind::String, nullptr},
              {"common_jump_filter", Kind::Bool, true},
              {"n", Kind::Double, 400.0},
              {"lambda1", Kind::Double, 1.0},
              {"lambda2", Kind::Double, 2.0},
              {"T", Kind::Double, 1.0},
              {"seed", Kind::Int, 1},
              {"path", Kind::Int, 0},
              {"out", Kind::String, nullptr}};
  auto* sim_cmd = app.add_subcommand("simulate", "simulate one path and write scheme/price/jump CSVs");
  register_flags(sim_cmd, sim);

  Command tst;
  tst.keys = {{"prices1", Kind::String, nullptr},
              {"prices2", Kind::String, nullptr},
              {"T", Kind::Double, nullptr},
              {"n", Kind::Double, nullptr},
              {"alpha", Kind::Double, 0.05},
              {"seed", Kind::Int, 1},
              {"draws", Kind::String, nullptr}};
  for (auto& k : tuning_keys()) tst.keys.push_back(k);
  auto* tst_cmd = app.add_subcommand("test", "run the test on two 'time,price' CSV files");
  register_flags(tst_cmd, tst);

  Command mc;
  mc.keys = {{"scenario", Kind::StringList, nullptr},
             {"n", Kind::DoubleList, json::array({100.0})},
             {"paths", Kind::Int, 1000},
             {"alpha", Kind::DoubleList, json::array({0.05})},
             {"seed", Kind::Int, 1},
             {"workers", Kind::Int, 1},
             {"lambda1", Kind::Double, 1.0},
             {"lambda2", Kind::Double, 2.0},
             {"T", Kind::Double, 1.0},
             {"out", Kind::String, "-"},
             {"json", Kind::String, nullptr}};
  for (auto& k : tuning_keys()) mc.keys.push_back(k);
  auto* mc_cmd = app.add_subcommand("mc", "Monte Carlo rejection curves, CSV output");
  register_flags(mc_cmd, mc);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(sim, out);
    if (tst_cmd->parsed()) return cmd_test(tst, out);
    if (mc_cmd->parsed()) return cmd_mc(mc, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace cojump::cli
