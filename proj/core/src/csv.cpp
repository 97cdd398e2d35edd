#include "pathwise/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pathwise {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, delimiter)) out.push_back(field);
  if (!line.empty() && line.back() == delimiter) out.emplace_back();
  return out;
}

double parse_double(const std::string& field, std::size_t row) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    while (pos < field.size() && (field[pos] == ' ' || field[pos] == '\r')) ++pos;
    if (pos != field.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("csv: row " + std::to_string(row) + ": bad numeric field '" + field + "'");
  }
}

}  // namespace

void write_csv(std::ostream& out, const HilbertPath& path, char delimiter) {
  out << 't';
  for (std::size_t i = 0; i < path.modes; ++i) out << delimiter << "mode_" << i;
  out << '\n';
  for (std::size_t k = 0; k < path.grid.nodes; ++k) {
    out << format_double(path.grid.time(k));
    const auto row = path.node(k);
    for (std::size_t i = 0; i < path.modes; ++i) out << delimiter << format_double(row[i]);
    out << '\n';
  }
}

void write_csv(std::ostream& out, const ScalarPath& path, char delimiter) {
  write_csv(out, as_hilbert(path), delimiter);
}

namespace {

void write_file_impl(const std::string& filename, const auto& path, char delimiter) {
  std::ofstream out(filename);
  if (!out) throw std::invalid_argument("csv: cannot open '" + filename + "' for writing");
  write_csv(out, path, delimiter);
  if (!out) throw std::runtime_error("csv: write to '" + filename + "' failed");
}

}  // namespace

void write_csv_file(const std::string& filename, const HilbertPath& path, char delimiter) {
  write_file_impl(filename, path, delimiter);
}

void write_csv_file(const std::string& filename, const ScalarPath& path, char delimiter) {
  write_file_impl(filename, path, delimiter);
}

HilbertPath read_csv(std::istream& in, char delimiter) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line, delimiter);
  if (header.empty() || header[0] != "t") {
    throw std::invalid_argument("csv: header must start with 't'");
  }
  const std::size_t modes = header.size() - 1;
  if (modes == 0) throw std::invalid_argument("csv: no mode columns");
  for (std::size_t i = 0; i < modes; ++i) {
    if (header[i + 1] != "mode_" + std::to_string(i)) {
      throw std::invalid_argument("csv: unexpected column name '" + header[i + 1] + "'");
    }
  }

  std::vector<double> times;
  std::vector<double> data;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto fields = split_line(line, delimiter);
    if (fields.size() != modes + 1) {
      throw std::invalid_argument("csv: row " + std::to_string(row) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(modes + 1));
    }
    times.push_back(parse_double(fields[0], row));
    for (std::size_t i = 0; i < modes; ++i) data.push_back(parse_double(fields[i + 1], row));
  }
  if (times.size() < 2) throw std::invalid_argument("csv: need at least two rows to recover the grid");

  HilbertPath path;
  path.grid.t0 = times.front();
  path.grid.nodes = times.size();
  path.grid.dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
  if (!(path.grid.dt > 0.0)) throw std::invalid_argument("csv: time column is not increasing");
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double expect = path.grid.time(k);
    if (std::abs(times[k] - expect) > 1e-9 * std::max(1.0, std::abs(expect))) {
      throw std::invalid_argument("csv: time column is not a uniform grid at row " + std::to_string(k + 1));
    }
  }
  path.modes = modes;
  path.data = std::move(data);
  return path;
}

HilbertPath read_csv_file(const std::string& filename, char delimiter) {
  std::ifstream in(filename);
  if (!in) throw std::invalid_argument("csv: cannot open '" + filename + "'");
  return read_csv(in, delimiter);
}

void write_table(std::ostream& out, const Table& table, char delimiter) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out << delimiter;
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << delimiter;
      out << row[i];
    }
    out << '\n';
  }
}

}  // namespace pathwise
