#include "fcpd/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <string_view>
#include <vector>

#include "fcpd/errors.hpp"

namespace fcpd {

namespace {

std::string_view trim(std::string_view s) {
  const auto blank = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && blank(s.front())) s.remove_prefix(1);
  while (!s.empty() && blank(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

std::optional<double> parse_number(std::string_view field) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc() || ptr != field.data() + field.size()) return std::nullopt;
  return v;
}

[[noreturn]] void row_error(std::size_t line, const std::string& message) {
  throw InvalidData("line " + std::to_string(line) + ": " + message);
}

}  // namespace

TimeSeries ingest_csv(std::istream& in) {
  std::vector<double> values;
  std::string raw;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  bool first_content = true;
  std::optional<double> previous_t;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    std::vector<std::optional<double>> parsed;
    parsed.reserve(fields.size());
    bool numeric = true;
    for (auto f : fields) {
      parsed.push_back(parse_number(f));
      numeric = numeric && parsed.back().has_value();
    }
    if (first_content) {
      first_content = false;
      if (!numeric) continue;  // header
    }
    if (columns == 0) {
      columns = fields.size();
      if (columns != 1 && columns != 2) {
        row_error(line_no, "expected 1 or 2 columns, found " + std::to_string(columns));
      }
    }
    if (fields.size() != columns) {
      row_error(line_no, "expected " + std::to_string(columns) + " columns, found " + std::to_string(fields.size()));
    }
    if (!numeric) {
      row_error(line_no, "non-numeric value");
    }
    const double y = *parsed.back();
    if (!std::isfinite(y)) {
      row_error(line_no, "value is not finite");
    }
    if (columns == 2) {
      const double t = *parsed.front();
      if (!std::isfinite(t) || std::floor(t) != t) {
        row_error(line_no, "time index must be an integer");
      }
      if (previous_t && t != *previous_t + 1.0) {
        row_error(line_no, "time index jumps from " + format_double(*previous_t) + " to " + format_double(t) +
                               "; samples must be equidistant with step 1");
      }
      previous_t = t;
    }
    values.push_back(y);
  }
  if (values.empty()) {
    throw InvalidData("input contains no observations");
  }
  return TimeSeries(std::move(values));
}

TimeSeries ingest_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidData("cannot open input file '" + path.string() + "'");
  }
  return ingest_csv(in);
}

TimeSeries normalize(const TimeSeries& series) {
  if (series.size() < 2) {
    throw InsufficientData("normalization needs at least 2 points");
  }
  const auto n = static_cast<long double>(series.size());
  long double mean = 0;
  for (double v : series.values()) mean += v;
  mean /= n;
  long double var = 0;
  for (double v : series.values()) var += (v - mean) * (v - mean);
  var /= n;
  if (!(var > 0)) {
    throw InvalidData("cannot normalize: series has zero variance");
  }
  const long double sd = std::sqrt(var);
  std::vector<double> out;
  out.reserve(series.size());
  for (double v : series.values()) out.push_back(static_cast<double>((v - mean) / sd));
  return TimeSeries(std::move(out));
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace fcpd
