#include "bgcd/csv.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string_view>
#include <vector>

namespace bgcd {

CsvError::CsvError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

void write_grid_csv(std::ostream& out, const GridFunction& f) {
  out << "x,value\n";
  const auto xs = f.xs();
  const auto ys = f.ys();
  for (std::size_t i = 0; i < xs.size(); ++i)
    out << format_double(xs[i]) << ',' << format_double(ys[i]) << '\n';
}

void write_grid_csv(const std::filesystem::path& path, const GridFunction& f) {
  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_grid_csv(out, f);
  if (!out)
    throw std::runtime_error("write failed: " + path.string());
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' '))
    s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ')
    s.remove_prefix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  double v = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, v);
  if (ec != std::errc() || ptr != end || field.empty())
    throw CsvError(line, "not a number: '" + std::string(field) + "'");
  return v;
}

} // namespace

GridFunction read_grid_csv(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || trim(line) != "x,value")
    throw CsvError(1, "expected header 'x,value'");

  std::vector<double> xs, ys;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = trim(line);
    if (row.empty())
      continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos)
      throw CsvError(lineno, "expected two comma-separated fields");
    xs.push_back(parse_number(row.substr(0, comma), lineno));
    ys.push_back(parse_number(row.substr(comma + 1), lineno));
    if (xs.size() > 1 && !(xs.back() > xs[xs.size() - 2]))
      throw CsvError(lineno, "x values must be strictly increasing");
  }
  try {
    return GridFunction(std::move(xs), std::move(ys));
  } catch (const std::invalid_argument& e) {
    throw CsvError(lineno, e.what());
  }
}

GridFunction read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path.string());
  return read_grid_csv(in);
}

} // namespace bgcd
