#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "fcpd/shape_space.hpp"

namespace fcpd {

/// Reads a CSV series: one value per line, or `t,value` rows whose t column
/// must count up by exactly one. A non-numeric first line is taken as a
/// header. Blank lines are ignored. Throws InvalidData (with the line number
/// for malformed rows).
TimeSeries ingest_csv(std::istream& in);
TimeSeries ingest_csv_file(const std::filesystem::path& path);

/// Zero mean, unit population variance (divisor N). Throws InsufficientData
/// for fewer than 2 points and InvalidData for zero variance.
TimeSeries normalize(const TimeSeries& series);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace fcpd
