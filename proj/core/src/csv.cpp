#include "impacteq/csv.hpp"

#include <cstdio>
#include <fstream>

#include "impacteq/config.hpp"
#include "impacteq/version.hpp"

namespace impacteq {

std::string csv_num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.12g", v);
  return b;
}

namespace {

std::string escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char ch : cell) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

}  // namespace

std::vector<std::string> metadata_comments(const RunConfig& cfg) {
  std::vector<std::string> out;
  out.push_back(std::string("tool_version=") + kVersion);
  out.push_back("config_hash=" + config_hash(cfg));
  out.push_back("steps_per_year=" + std::to_string(cfg.steps_per_year));
  out.push_back("horizon_T=" + csv_num(cfg.model.T));
  out.push_back("seed=" + std::to_string(cfg.seed));
  return out;
}

std::string render_csv(const CsvTable& table) {
  std::string out;
  for (const std::string& c : table.comments) {
    out += "# ";
    out += c;
    out += '\n';
  }
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += escape(table.columns[i]);
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += escape(row[i]);
    }
    out += '\n';
  }
  return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  out << render_csv(table);
}

}  // namespace impacteq
