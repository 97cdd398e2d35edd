#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pathwise/path.hpp"

namespace pathwise {

// CSV layout for paths: header "t,mode_0,...,mode_{N-1}", one row per node,
// every number printed with 17 significant digits (round-trips IEEE doubles).
// A ScalarPath serializes as a 1-mode path.

void write_csv(std::ostream& out, const HilbertPath& path, char delimiter = ',');
void write_csv(std::ostream& out, const ScalarPath& path, char delimiter = ',');
void write_csv_file(const std::string& filename, const HilbertPath& path, char delimiter = ',');
void write_csv_file(const std::string& filename, const ScalarPath& path, char delimiter = ',');

// Parses the layout above; throws std::invalid_argument on malformed input
// (bad header, ragged rows, non-uniform time column).
HilbertPath read_csv(std::istream& in, char delimiter = ',');
HilbertPath read_csv_file(const std::string& filename, char delimiter = ',');

// Small numeric report table (certification suites, convergence studies).
struct Table {
  std::vector<std::string> columns;
  // Cells are preformatted strings so a table can mix ids and numbers.
  std::vector<std::vector<std::string>> rows;
};

void write_table(std::ostream& out, const Table& table, char delimiter = ',');

// Full-precision double formatting used everywhere in serialized output.
std::string format_double(double v);

}  // namespace pathwise
