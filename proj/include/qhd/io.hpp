#pragma once
///
/// Artifact output: CSV tables with unit-annotated headers, run-metadata
/// JSON, atomic writes (temp file + rename in the target directory).
///
/// Numbers are printed with %.17g so that identical runs produce
/// byte-identical files.

#include <string>
#include <vector>

namespace qhd {

struct CsvColumn {
  std::string name;
  std::string unit;
  const std::vector<double>* data = nullptr;
};

/// Writes "# name: unit" comment lines, then a header row, then the data.
/// All columns must have equal length.  Throws IOError on filesystem
/// problems; the final path only ever appears complete.
void write_csv(const std::string& path, const std::vector<CsvColumn>& cols);

/// Reads back a CSV written by write_csv (comments skipped).  Returns
/// column-major data; throws IOError on malformed input.
struct CsvTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};
CsvTable read_csv(const std::string& path);

/// Atomic text write used by both CSV and JSON emitters.
void write_text_atomic(const std::string& path, const std::string& content);

std::string read_text(const std::string& path);

/// Fixed-format double (%.17g), the single formatting choice for artifacts.
std::string format_double(double v);

}  // namespace qhd
