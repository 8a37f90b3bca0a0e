#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"
#include "json.hpp"

namespace rrk::cli {

/// Column-labelled numeric table, written as one CSV file.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<Table> tables;
  nlohmann::json summary = nlohmann::json::object();
  double wall_time = 0.0;  // seconds; JSON only, never in CSV
};

/// Shortest decimal text that parses back to the same double; "nan", "inf", "-inf".
[[nodiscard]] std::string format_double(double x);

[[nodiscard]] std::string to_csv(const Table& table);

/// <output>.csv for a single table, <output>_<name>.csv otherwise.
[[nodiscard]] std::vector<std::filesystem::path> csv_paths(const ExperimentReport& report);
[[nodiscard]] std::filesystem::path json_path(const std::string& output);

/// Writes every table and the JSON summary. Throws IoError.
void write_report(const ExperimentReport& report);

/// Summary for a failed run, carrying the error kind and failing step.
void write_failure(const std::string& output, const nlohmann::json& spec_echo, const std::string& kind,
                   const std::string& message, const nlohmann::json& step);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace rrk::cli
