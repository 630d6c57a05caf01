#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "gossip/core.hpp"

namespace gossip {

inline constexpr const char* kVersion = "0.1.0";

/// Shortest round-trip decimal form.
std::string format_double(double value);

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> columns);
  void header(const std::vector<std::string>& columns);

  template <typename... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    (write_field(fields, first), ...);
    out_ << '\n';
  }

 private:
  void separator(bool& first);
  void write_field(double value, bool& first);
  void write_field(const std::string& value, bool& first);
  void write_field(const char* value, bool& first);
  template <typename Int>
    requires std::is_integral_v<Int>
  void write_field(Int value, bool& first) {
    separator(first);
    out_ << value;
  }

  std::ostream& out_;
};

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, std::size_t col) const;
};

CsvTable read_csv(const std::filesystem::path& path);

/// Comma-separated list of reals.
std::vector<double> parse_real_list(const std::string& text);
/// count evenly spaced times on [0, horizon], endpoints included.
std::vector<double> even_schedule(double horizon, int count);

}  // namespace gossip
