#include "output.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "rrk/errors.hpp"

namespace rrk::cli {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc{}) throw Error(ErrorKind::IoError, "number formatting failed");
  return {buf, end};
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c > 0) out += ',';
    out += table.columns[c];
  }
  out += '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += format_double(row[c]);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::filesystem::path> csv_paths(const ExperimentReport& report) {
  std::vector<std::filesystem::path> paths;
  if (report.tables.size() == 1) {
    paths.emplace_back(report.spec.output + ".csv");
  } else {
    for (const auto& t : report.tables) paths.emplace_back(report.spec.output + "_" + t.name + ".csv");
  }
  return paths;
}

std::filesystem::path json_path(const std::string& output) { return output + ".json"; }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void write_report(const ExperimentReport& report) {
  const auto paths = csv_paths(report);
  nlohmann::json files = nlohmann::json::array();
  for (std::size_t k = 0; k < report.tables.size(); ++k) {
    write_text(paths[k], to_csv(report.tables[k]));
    files.push_back(paths[k].string());
  }
  nlohmann::json doc = {{"status", "ok"},
                        {"version", std::string(kVersion)},
                        {"spec", to_json(report.spec)},
                        {"summary", report.summary},
                        {"csv", files},
                        {"wall_time_s", report.wall_time}};
  write_text(json_path(report.spec.output), doc.dump(2) + "\n");
}

void write_failure(const std::string& output, const nlohmann::json& spec_echo, const std::string& kind,
                   const std::string& message, const nlohmann::json& step) {
  nlohmann::json doc = {{"status", "error"},
                        {"version", std::string(kVersion)},
                        {"spec", spec_echo},
                        {"error", {{"kind", kind}, {"message", message}, {"step", step}}}};
  write_text(json_path(output), doc.dump(2) + "\n");
}

}  // namespace rrk::cli
