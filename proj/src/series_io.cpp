#include "cmar/series_io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace cmar {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    size_t start = field.find_first_not_of(' ');
    out.push_back(start == std::string::npos ? "" : field.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

double parse_value(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("series csv: bad " + what + " '" + s + "'");
  }
}

MatrixSeries read_long(std::istream& in) {
  // t -> cell map; shape inferred from the largest indices seen.
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::tuple<int, int, double>>> cells;
  int d1 = 0, d2 = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 4) throw std::runtime_error("series csv: long row needs 4 fields");
    const int r = static_cast<int>(parse_value(f[1], "row index"));
    const int c = static_cast<int>(parse_value(f[2], "col index"));
    if (r < 1 || c < 1) throw std::runtime_error("series csv: long indices are 1-based");
    if (cells.find(f[0]) == cells.end()) order.push_back(f[0]);
    cells[f[0]].emplace_back(r, c, parse_value(f[3], "value"));
    d1 = std::max(d1, r);
    d2 = std::max(d2, c);
  }
  if (order.empty()) throw std::runtime_error("series csv: no data rows");

  MatrixSeries s;
  s.d1 = d1;
  s.d2 = d2;
  for (const auto& t : order) {
    MatrixXd m = MatrixXd::Constant(d1, d2, std::numeric_limits<double>::quiet_NaN());
    for (const auto& [r, c, v] : cells[t]) m(r - 1, c - 1) = v;
    if (!m.allFinite())
      throw std::runtime_error("series csv: step '" + t + "' is missing cells");
    s.values.push_back(std::move(m));
    s.index.push_back(t);
  }
  s.validate();
  return s;
}

MatrixSeries read_wide(std::istream& in, const std::vector<std::string>& header) {
  // Header cells v_<row>_<col> fix the shape; order must be column-major.
  int d1 = 0, d2 = 0;
  for (size_t i = 1; i < header.size(); ++i) {
    int r = 0, c = 0;
    if (std::sscanf(header[i].c_str(), "v_%d_%d", &r, &c) != 2 || r < 1 || c < 1)
      throw std::runtime_error("series csv: bad wide header cell '" + header[i] + "'");
    d1 = std::max(d1, r);
    d2 = std::max(d2, c);
  }
  if (static_cast<int>(header.size()) != 1 + d1 * d2)
    throw std::runtime_error("series csv: wide header is not a full d1 x d2 grid");

  MatrixSeries s;
  s.d1 = d1;
  s.d2 = d2;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != header.size())
      throw std::runtime_error("series csv: wide row width mismatch");
    MatrixXd m(d1, d2);
    for (size_t i = 1; i < header.size(); ++i) {
      int r = 0, c = 0;
      std::sscanf(header[i].c_str(), "v_%d_%d", &r, &c);
      m(r - 1, c - 1) = parse_value(f[i], "value");
    }
    s.values.push_back(std::move(m));
    s.index.push_back(f[0]);
  }
  if (s.values.empty()) throw std::runtime_error("series csv: no data rows");
  s.validate();
  return s;
}

}  // namespace

MatrixSeries read_series_csv(std::istream& in) {
  std::string header_line;
  if (!std::getline(in, header_line)) throw std::runtime_error("series csv: empty file");
  auto header = split_csv_line(header_line);
  if (header.empty() || header[0] != "t")
    throw std::runtime_error("series csv: header must start with 't'");
  if (header.size() == 4 && header[1] == "row" && header[2] == "col" && header[3] == "value")
    return read_long(in);
  if (header.size() >= 2 && header[1].rfind("v_", 0) == 0) return read_wide(in, header);
  throw std::runtime_error("series csv: unrecognized header '" + header_line + "'");
}

MatrixSeries read_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("series csv: cannot open '" + path + "'");
  return read_series_csv(in);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string label_for(const MatrixSeries& s, int t) {
  return s.index.empty() ? std::to_string(t + 1) : s.index[t];
}

}  // namespace

void write_series_csv_wide(const MatrixSeries& series, std::ostream& out) {
  out << "t";
  for (int c = 1; c <= series.d2; ++c)
    for (int r = 1; r <= series.d1; ++r) out << ",v_" << r << "_" << c;
  out << "\n";
  for (int t = 0; t < series.length(); ++t) {
    out << label_for(series, t);
    for (int c = 0; c < series.d2; ++c)
      for (int r = 0; r < series.d1; ++r) out << "," << format_double(series.values[t](r, c));
    out << "\n";
  }
}

void write_series_csv_long(const MatrixSeries& series, std::ostream& out) {
  out << "t,row,col,value\n";
  for (int t = 0; t < series.length(); ++t)
    for (int c = 0; c < series.d2; ++c)
      for (int r = 0; r < series.d1; ++r)
        out << label_for(series, t) << "," << (r + 1) << "," << (c + 1) << ","
            << format_double(series.values[t](r, c)) << "\n";
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    out << contents;
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

void write_series_csv(const MatrixSeries& series, const std::string& path, bool wide) {
  std::ostringstream out;
  if (wide)
    write_series_csv_wide(series, out);
  else
    write_series_csv_long(series, out);
  write_file_atomic(path, out.str());
}

}  // namespace cmar
