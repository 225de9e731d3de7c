#include "belgrad/harness/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace belgrad::harness {

namespace {

std::ofstream open_for_write(const std::filesystem::path& file) {
  if (file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create " + file.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& file) {
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::string non_finite(double x) {
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

void write_plot_script(const std::filesystem::path& csv, const std::string& title,
                       const std::vector<std::string>& plot_lines) {
  std::filesystem::path script = csv;
  script.replace_extension(".gp");
  std::ofstream out = open_for_write(script);
  out << "set datafile separator ','\n";
  out << "set key autotitle columnhead\n";
  out << "set title '" << title << "'\n";
  out << "set terminal pngcairo size 900,600\n";
  std::filesystem::path png = csv.filename();
  png.replace_extension(".png");
  out << "set output '" << png.string() << "'\n";
  out << "plot ";
  for (std::size_t i = 0; i < plot_lines.size(); ++i) out << (i ? ", \\\n     " : "") << plot_lines[i];
  out << "\n";
  finish(out, script);
}

}  // namespace

std::string format_number(double x) {
  if (!std::isfinite(x)) return non_finite(x);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_short(double x) {
  if (!std::isfinite(x)) return non_finite(x);
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

Params& Params::add(const std::string& key, const std::string& value) {
  if (value.find(',') != std::string::npos || value.find(';') != std::string::npos)
    throw std::invalid_argument("param values may not contain ',' or ';'");
  if (!text_.empty()) text_ += ';';
  text_ += key + "=" + value;
  return *this;
}

Params& Params::add(const std::string& key, double value) { return add(key, format_short(value)); }

Params& Params::add(const std::string& key, int value) { return add(key, std::to_string(value)); }

Params& Params::add(const std::string& key, const Vec& value) {
  std::string s;
  for (int i = 0; i < value.size(); ++i) s += (i ? ":" : "") + format_short(value[i]);
  return add(key, s);
}

CsvRow estimate_row(const std::string& name, const std::string& params, const Estimate& e, double dt,
                    std::uint64_t seed) {
  return CsvRow{name, params, e.value, e.stderr(), e.n_paths, dt, seed};
}

CsvRow exact_row(const std::string& name, const std::string& params, double value) {
  return CsvRow{name, params, value, 0.0, 0, 0.0, 0};
}

void write_results_csv(const std::filesystem::path& file, const std::vector<CsvRow>& rows, const std::string& title) {
  std::ofstream out = open_for_write(file);
  out << "name,params,value,stderr,n_paths,dt,seed\n";
  for (const CsvRow& r : rows) {
    out << r.name << ',' << r.params << ',' << format_number(r.value) << ',' << format_number(r.stderr_) << ','
        << r.n_paths << ',' << format_short(r.dt) << ',' << r.seed << '\n';
  }
  finish(out, file);
  write_plot_script(file, title,
                    {"'" + file.filename().string() + "' using 0:3:4 with yerrorbars title 'value +- stderr'"});
}

void write_table_csv(const std::filesystem::path& file, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows, const std::string& title,
                     const std::vector<std::pair<int, int>>& plot_columns) {
  std::ofstream out = open_for_write(file);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw std::invalid_argument("table row width does not match header");
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  finish(out, file);
  std::vector<std::string> lines;
  for (auto [xc, yc] : plot_columns)
    lines.push_back("'" + file.filename().string() + "' using " + std::to_string(xc) + ":" + std::to_string(yc) +
                    " with linespoints");
  write_plot_script(file, title, lines);
}

}  // namespace belgrad::harness
