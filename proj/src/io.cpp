#include "gossip/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gossip/error.hpp"

namespace gossip {

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

void CsvWriter::header(std::initializer_list<std::string_view> columns) {
  bool first = true;
  for (auto column : columns) {
    separator(first);
    out_ << column;
  }
  out_ << '\n';
}

void CsvWriter::header(const std::vector<std::string>& columns) {
  bool first = true;
  for (const auto& column : columns) {
    separator(first);
    out_ << column;
  }
  out_ << '\n';
}

void CsvWriter::separator(bool& first) {
  if (!first) out_ << ',';
  first = false;
}

void CsvWriter::write_field(double value, bool& first) {
  separator(first);
  out_ << format_double(value);
}

void CsvWriter::write_field(const std::string& value, bool& first) {
  separator(first);
  out_ << value;
}

void CsvWriter::write_field(const char* value, bool& first) {
  separator(first);
  out_ << value;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw Error(Errc::io, "missing CSV column '" + name + "'");
}

double CsvTable::number(std::size_t row, std::size_t col) const {
  const std::string& text = rows.at(row).at(col);
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    throw Error(Errc::io, "not a number in CSV: '" + text + "'");
  }
  return value;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string item;
  std::istringstream in(line);
  while (std::getline(in, item, ',')) fields.push_back(item);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error(Errc::io, "empty CSV " + path.string());
  table.header = split_line(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != table.header.size()) throw Error(Errc::io, "ragged row in " + path.string());
    table.rows.push_back(std::move(fields));
  }
  return table;
}

std::vector<double> parse_real_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    item = first == std::string::npos ? "" : item.substr(first, last - first + 1);
    double value = 0.0;
    const auto result = std::from_chars(item.data(), item.data() + item.size(), value);
    if (result.ec != std::errc() || result.ptr != item.data() + item.size()) {
      throw Error(Errc::invalid_config, "not a number: '" + item + "'");
    }
    out.push_back(value);
  }
  return out;
}

std::vector<double> even_schedule(double horizon, int count) {
  if (count < 1) throw Error(Errc::invalid_config, "schedule needs at least one time");
  if (count == 1 || horizon == 0.0) return {horizon};
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = horizon * i / (count - 1);
  out.back() = horizon;
  return out;
}

}  // namespace gossip
