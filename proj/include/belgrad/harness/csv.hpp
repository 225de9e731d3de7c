#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "belgrad/stats.hpp"
#include "belgrad/types.hpp"

namespace belgrad::harness {

/// One result line: name,params,value,stderr,n_paths,dt,seed. Deterministic
/// quantities carry stderr 0, n_paths 0 and dt 0.
struct CsvRow {
  std::string name;
  std::string params;
  double value = 0.0;
  double stderr_ = 0.0;
  std::size_t n_paths = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;
};

/// 17 significant digits; "nan", "inf" and "-inf" for the non-finite values.
std::string format_number(double x);
/// Shortest representation that reads back to the same double.
std::string format_short(double x);

/// "key=value;key=value", the params column. Values never contain commas.
class Params {
 public:
  Params& add(const std::string& key, const std::string& value);
  Params& add(const std::string& key, double value);
  Params& add(const std::string& key, int value);
  Params& add(const std::string& key, const Vec& value);  // components joined by ':'
  const std::string& str() const { return text_; }

 private:
  std::string text_;
};

CsvRow estimate_row(const std::string& name, const std::string& params, const Estimate& e, double dt,
                    std::uint64_t seed);
CsvRow exact_row(const std::string& name, const std::string& params, double value);

/// Writes the rows with the header line and LF endings, and a gnuplot script
/// with the same stem next to it. Throws std::runtime_error on IO failure.
void write_results_csv(const std::filesystem::path& file, const std::vector<CsvRow>& rows, const std::string& title);

/// A free-form table; plot_columns are 1-based (x, y) pairs for the script.
void write_table_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows, const std::string& title,
                     const std::vector<std::pair<int, int>>& plot_columns);

}  // namespace belgrad::harness
