#pragma once

#include "bgcd/funcspace.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

namespace bgcd {

/// Parse failure in a grid CSV; `line()` is 1-based (the header is line 1).
class CsvError : public std::runtime_error {
public:
  CsvError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

/// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

/// Writes `x,value` rows in ascending x.
void write_grid_csv(std::ostream& out, const GridFunction& f);
void write_grid_csv(const std::filesystem::path& path, const GridFunction& f);

/// Reads the format written by write_grid_csv. Throws CsvError on malformed
/// input and std::runtime_error if the file cannot be opened.
GridFunction read_grid_csv(std::istream& in);
GridFunction read_grid_csv(const std::filesystem::path& path);

} // namespace bgcd
