#include "output.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <utility>

namespace fredholm::cli {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void Csv::add_row(std::vector<std::string> cells) {
  if (cells.size() != header.size())
    throw std::logic_error("Csv::add_row: cell count does not match the header");
  rows.push_back(std::move(cells));
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = dir / name;
  std::ofstream out(path, std::ios::binary);  // binary keeps line endings identical everywhere
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

void write_csv(const std::filesystem::path& dir, const std::string& name, const Csv& table) {
  std::ofstream out = open_for_write(dir, name);
  for (std::size_t j = 0; j < table.header.size(); ++j)
    out << (j ? "," : "") << table.header[j];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t j = 0; j < row.size(); ++j) out << (j ? "," : "") << row[j];
    out << '\n';
  }
  if (!out) throw std::runtime_error("short write on " + (dir / name).string());
}

void write_json(const std::filesystem::path& dir, const std::string& name,
                const nlohmann::json& j) {
  std::ofstream out = open_for_write(dir, name);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("short write on " + (dir / name).string());
}

}  // namespace fredholm::cli
