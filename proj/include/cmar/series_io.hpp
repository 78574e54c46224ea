// CSV persistence for MatrixSeries. Two layouts are accepted and
// auto-detected by header:
//   long:  t,row,col,value            (one cell per line, 1-based indices)
//   wide:  t,v_1_1,...,v_d1_d2        (one step per line, column-major cells)
// The t column holds ISO-8601 dates or integer step labels.
#pragma once

#include <iosfwd>
#include <string>

#include "cmar/model.hpp"

namespace cmar {

MatrixSeries read_series_csv(const std::string& path);
MatrixSeries read_series_csv(std::istream& in);

void write_series_csv_wide(const MatrixSeries& series, std::ostream& out);
void write_series_csv_long(const MatrixSeries& series, std::ostream& out);

// Writes atomically (temp file + rename). Default layout is wide.
void write_series_csv(const MatrixSeries& series, const std::string& path, bool wide = true);

// Atomic text-file write used by every CSV/JSON emitter.
void write_file_atomic(const std::string& path, const std::string& contents);

// Format a double with enough digits to round-trip exactly.
std::string format_double(double v);

}  // namespace cmar
