#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace impacteq {

struct RunConfig;

// Deterministic 12-significant-digit rendering used by every artifact.
std::string csv_num(double v);

struct CsvTable {
  std::vector<std::string> comments;  // written as leading '# ' lines
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::initializer_list<std::string> cells) {
    rows.emplace_back(cells);
  }
  void add_numeric_row(std::initializer_list<double> cells) {
    std::vector<std::string> row;
    for (double v : cells) row.push_back(csv_num(v));
    rows.push_back(std::move(row));
  }
};

// Provenance block carried by every artifact: tool version, config hash,
// mesh resolution, seed.
std::vector<std::string> metadata_comments(const RunConfig& cfg);

std::string render_csv(const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace impacteq
