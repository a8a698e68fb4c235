#pragma once

// File formats.
//
// Dataset CSV: header `id,choice,d_<name>...,a_<name>_<label>...`. Agent
// covariate names may contain underscores; alternative covariate names may
// not, since the label starts after the first underscore that follows
// `a_`. Category order is the first appearance of each label among the `a_`
// columns, or among the choices when there are none.
//
// Draw files: <prefix>.csv holds one row per retained draw with columns
// b (1-based), alpha2, log_kernel, beta_*, sigma_<i>_<j> for i <= j;
// <prefix>.meta.json holds everything else.

#include "smnp/core.hpp"
#include "smnp/draws.hpp"

#include <fstream>
#include <iosfwd>
#include <string>
#include <vector>

namespace smnp {

ChoiceDataset parse_dataset(std::istream& in, const std::string& source = "<stream>");
ChoiceDataset read_dataset(const std::string& path);
void write_dataset(const ChoiceDataset& data, std::ostream& out);
void write_dataset(const ChoiceDataset& data, const std::string& path);

/// Accepts "dir/name", "dir/name.csv" or "dir/name.meta.json".
std::string draw_prefix(const std::string& path);

/// `digits` significant digits; 17 round-trips every double exactly.
void write_draws(const DrawStore& store, const std::string& prefix, int digits = 17);
DrawStore read_draws(const std::string& path);

/// Formats with %.<digits>g.
std::string format_double(double x, int digits = 17);

/// Minimal CSV writer for the result tables. Cells are not quoted.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header, int digits = 17);
  CsvWriter& cell(const std::string& text);
  CsvWriter& cell(double value);
  CsvWriter& cell(long long value);
  /// Throws if the row has the wrong number of cells or the write failed.
  void end_row();

 private:
  std::ofstream out_;
  std::string path_;
  std::string row_;
  std::size_t columns_;
  std::size_t in_row_ = 0;
  int digits_;
};

}  // namespace smnp
