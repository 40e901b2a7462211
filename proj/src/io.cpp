#include "qhd/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qhd/errors.hpp"

namespace fs = std::filesystem;

namespace qhd {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  std::error_code ec;
  if (!target.parent_path().empty()) {
    fs::create_directories(target.parent_path(), ec);
    if (ec)
      throw IOError("cannot create directory " +
                    target.parent_path().string() + ": " + ec.message());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IOError("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp, ec);
      throw IOError("write failed for " + tmp.string());
    }
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IOError("cannot rename " + tmp.string() + " to " + path + ": " +
                  ec.message());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IOError("read failed for " + path);
  return ss.str();
}

void write_csv(const std::string& path, const std::vector<CsvColumn>& cols) {
  if (cols.empty()) throw IOError("write_csv: no columns for " + path);
  const std::size_t rows = cols.front().data ? cols.front().data->size() : 0;
  for (const CsvColumn& c : cols) {
    if (!c.data) throw IOError("write_csv: null column '" + c.name + "'");
    if (c.data->size() != rows)
      throw IOError("write_csv: column '" + c.name + "' has " +
                    std::to_string(c.data->size()) + " rows, expected " +
                    std::to_string(rows));
  }
  std::ostringstream out;
  for (const CsvColumn& c : cols)
    out << "# " << c.name << ": " << (c.unit.empty() ? "-" : c.unit) << "\n";
  for (std::size_t j = 0; j < cols.size(); ++j)
    out << cols[j].name << (j + 1 < cols.size() ? "," : "\n");
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out << format_double((*cols[j].data)[i])
          << (j + 1 < cols.size() ? "," : "\n");
  write_text_atomic(path, out.str());
}

CsvTable read_csv(const std::string& path) {
  const std::string text = read_text(path);
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  bool header_done = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      parts.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (!header_done) {
      table.names = parts;
      table.columns.assign(parts.size(), {});
      header_done = true;
      continue;
    }
    if (parts.size() != table.names.size())
      throw IOError(path + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(table.names.size()) + " fields, got " +
                    std::to_string(parts.size()));
    for (std::size_t j = 0; j < parts.size(); ++j) {
      char* end = nullptr;
      const double v = std::strtod(parts[j].c_str(), &end);
      if (end == parts[j].c_str() || *end != '\0')
        throw IOError(path + ":" + std::to_string(line_no) +
                      ": bad number '" + parts[j] + "'");
      table.columns[j].push_back(v);
    }
  }
  if (!header_done) throw IOError(path + ": no header row");
  return table;
}

}  // namespace qhd
