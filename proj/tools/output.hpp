#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace fredholm::cli {

/// 17-significant-digit text, enough to parse back to exactly the same
/// double.
std::string fmt17(double v);

/// One output table: header row plus string cells, written as RFC-4180 CSV
/// without quoting (no cell we emit contains commas or newlines).
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells);
};

/// Writes the table to dir/name, creating dir if needed.
void write_csv(const std::filesystem::path& dir, const std::string& name, const Csv& table);

/// Writes j (2-space indented, trailing newline) to dir/name.
void write_json(const std::filesystem::path& dir, const std::string& name,
                const nlohmann::json& j);

}  // namespace fredholm::cli
