#include "cojump/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace cojump {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

IngestError::IngestError(const std::string& source, std::size_t line, const std::string& msg)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}

namespace {

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t b = 0;
  while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
  return s.substr(b);
}

double parse_number(const std::string& field, const std::string& source, std::size_t line) {
  const std::string f = strip(field);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (ec != std::errc() || ptr != f.data() + f.size() || f.empty() || !std::isfinite(v))
    throw IngestError(source, line, "not a finite number: '" + f + "'");
  return v;
}

/// Reads two-column CSV rows after checking the header.
template <class Row>
void read_two_columns(std::istream& in, const std::string& source, const std::string& header,
                      Row&& row) {
  std::string text;
  if (!std::getline(in, text)) throw IngestError(source, 1, "missing header '" + header + "'");
  if (strip(text) != header)
    throw IngestError(source, 1, "expected header '" + header + "', got '" + strip(text) + "'");
  std::size_t line = 1;
  while (std::getline(in, text)) {
    ++line;
    text = strip(text);
    if (text.empty()) continue;
    const auto comma = text.find(',');
    if (comma == std::string::npos)
      throw IngestError(source, line, "expected 2 columns, found 1");
    if (text.find(',', comma + 1) != std::string::npos)
      throw IngestError(source, line, "expected 2 columns, found more");
    row(line, text.substr(0, comma), text.substr(comma + 1));
  }
}

void check_time(std::vector<double>& times, double t, const std::string& source,
                std::size_t line) {
  if (times.empty() && t != 0.0) throw IngestError(source, line, "first time must be 0");
  if (!times.empty() && !(t > times.back()))
    throw IngestError(source, line, "time " + format_double(t) + " is not after previous time " +
                                        format_double(times.back()));
  times.push_back(t);
}

std::ifstream open_in(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IngestError(file.string(), 0, "cannot open file");
  return in;
}

}  // namespace

PriceSeries read_price_csv(std::istream& in, const std::string& source) {
  PriceSeries s;
  read_two_columns(in, source, "time,price",
                   [&](std::size_t line, const std::string& a, const std::string& b) {
                     check_time(s.times, parse_number(a, source, line), source, line);
                     s.prices.push_back(parse_number(b, source, line));
                   });
  if (s.times.size() < 2) throw IngestError(source, 0, "need at least two observations");
  return s;
}

PriceSeries read_price_csv(const std::filesystem::path& file) {
  auto in = open_in(file);
  return read_price_csv(in, file.string());
}

void write_price_csv(std::ostream& os, std::span<const double> times,
                     std::span<const double> prices) {
  os << "time,price\n";
  for (std::size_t i = 0; i < times.size(); ++i)
    os << format_double(times[i]) << ',' << format_double(prices[i]) << '\n';
}

std::vector<double> read_scheme_csv(std::istream& in, const std::string& source) {
  std::vector<double> times;
  read_two_columns(in, source, "index,time",
                   [&](std::size_t line, const std::string& a, const std::string& b) {
                     const double idx = parse_number(a, source, line);
                     if (idx != static_cast<double>(times.size()))
                       throw IngestError(source, line, "index out of sequence");
                     check_time(times, parse_number(b, source, line), source, line);
                   });
  if (times.size() < 2) throw IngestError(source, 0, "need at least two observation times");
  return times;
}

std::vector<double> read_scheme_csv(const std::filesystem::path& file) {
  auto in = open_in(file);
  return read_scheme_csv(in, file.string());
}

void write_scheme_csv(std::ostream& os, std::span<const double> times) {
  os << "index,time\n";
  for (std::size_t i = 0; i < times.size(); ++i) os << i << ',' << format_double(times[i]) << '\n';
}

void write_jumps_csv(std::ostream& os, const PathRecord& path) {
  os << "component,time,size\n";
  for (std::size_t c = 0; c < 2; ++c)
    for (const auto& j : path.jumps[c])
      os << (c + 1) << ',' << format_double(j.time) << ',' << format_double(j.size) << '\n';
}

void write_draws_csv(std::ostream& os, std::span<const double> draws) {
  os << "m,d_hat\n";
  for (std::size_t m = 0; m < draws.size(); ++m) os << m << ',' << format_double(draws[m]) << '\n';
}

nlohmann::json report_to_json(const TestReport& r) {
  nlohmann::json j;
  j["alpha"] = r.alpha;
  j["phi_tilde"] = r.phi_tilde ? nlohmann::json(*r.phi_tilde) : nlohmann::json(nullptr);
  j["nVf"] = r.nVf;
  j["A"] = r.A;
  j["Q"] = r.Q;
  j["c_n"] = std::isfinite(r.c_n) ? nlohmann::json(r.c_n) : nlohmann::json(nullptr);
  j["reject"] = r.reject;
  j["diagnostics"] = {{"jumps1", r.diagnostics.jumps1},
                      {"jumps2", r.diagnostics.jumps2},
                      {"empty_spot_windows", r.diagnostics.empty_spot_windows},
                      {"phi_undefined", r.diagnostics.phi_undefined}};
  j["n_draws"] = r.d_hat_samples.size();
  return j;
}

}  // namespace cojump
