#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cojump/bootstrap.hpp"
#include "cojump/model.hpp"

namespace cojump {

/// 17 significant digits; "nan" / "inf" / "-inf" for non-finite values.
std::string format_double(double x);

/// Malformed external data. what() names the source and line.
class IngestError : public std::runtime_error {
 public:
  IngestError(const std::string& source, std::size_t line, const std::string& msg);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct PriceSeries {
  std::vector<double> times;
  std::vector<double> prices;
};

// Price files: header "time,price"; times start at 0 and strictly increase.
PriceSeries read_price_csv(std::istream& in, const std::string& source = "<stream>");
PriceSeries read_price_csv(const std::filesystem::path& file);
void write_price_csv(std::ostream& os, std::span<const double> times,
                     std::span<const double> prices);

// Scheme files: header "index,time", index counting from 0.
std::vector<double> read_scheme_csv(std::istream& in, const std::string& source = "<stream>");
std::vector<double> read_scheme_csv(const std::filesystem::path& file);
void write_scheme_csv(std::ostream& os, std::span<const double> times);

// True jumps: header "component,time,size".
void write_jumps_csv(std::ostream& os, const PathRecord& path);

// Bootstrap draws: header "m,d_hat".
void write_draws_csv(std::ostream& os, std::span<const double> draws);

/// Report fields under their type names. phi_tilde and c_n are null when
/// the statistic is undefined; draws are left out (see write_draws_csv).
nlohmann::json report_to_json(const TestReport& report);

}  // namespace cojump
