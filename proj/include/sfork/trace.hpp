#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "sfork/distribution.hpp"

namespace sfork {

// Malformed or unusable trace input. Distinct from usage errors so the CLI
// can map it to its own exit code.
struct TraceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TraceRecord {
  std::string task_id;
  double schedule_ts = 0.0;
  double finish_ts = 0.0;
};

enum class TimestampUnit { seconds, microseconds };

struct TraceIngestResult {
  DistributionModel model;          // Empirical over task durations
  std::size_t accepted_rows = 0;
  std::size_t rejected_rows = 0;    // finish < schedule or unparsable fields
  std::vector<std::size_t> rejected_row_numbers;  // 1-based, header is row 1
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline std::string trim(const std::string &s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline std::optional<double> parse_timestamp(const std::string &raw,
                                             TimestampUnit unit) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  try {
    std::size_t consumed = 0;
    const double value = std::stod(s, &consumed);
    if (consumed != s.size() || !(value >= 0.0)) return std::nullopt;
    return unit == TimestampUnit::seconds ? value : value / 1e6;
  } catch (const std::exception &) {
    return std::nullopt;
  }
}

}  // namespace detail

// Reads `task_id,schedule_ts,finish_ts` CSV (extra columns are ignored) and
// builds an Empirical model over the finish-minus-schedule durations. Rows
// with finish < schedule or unparsable timestamps are skipped and reported
// by row number.
inline TraceIngestResult ingest_trace(std::istream &in,
                                      TimestampUnit unit = TimestampUnit::seconds) {
  std::string line;
  if (!std::getline(in, line)) {
    throw TraceError("trace: empty file");
  }
  const auto header = detail::split_csv_line(line);
  std::size_t id_col = header.size(), sched_col = header.size(),
              finish_col = header.size();
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string name = detail::trim(header[i]);
    if (name == "task_id") id_col = i;
    if (name == "schedule_ts") sched_col = i;
    if (name == "finish_ts") finish_col = i;
  }
  if (id_col >= header.size() || sched_col >= header.size() ||
      finish_col >= header.size()) {
    throw TraceError(
        "trace: malformed header at row 1, expected columns "
        "task_id,schedule_ts,finish_ts");
  }

  TraceIngestResult result{empirical({0.0, 0.0}), 0, 0, {}};
  std::vector<double> durations;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split_csv_line(line);
    const std::size_t needed =
        std::max(finish_col, std::max(id_col, sched_col)) + 1;
    std::optional<double> sched, finish;
    if (fields.size() >= needed) {
      sched = detail::parse_timestamp(fields[sched_col], unit);
      finish = detail::parse_timestamp(fields[finish_col], unit);
    }
    if (!sched || !finish || *finish < *sched) {
      ++result.rejected_rows;
      result.rejected_row_numbers.push_back(row);
      continue;
    }
    durations.push_back(*finish - *sched);
  }
  if (durations.empty()) {
    throw TraceError("trace: no valid rows");
  }
  if (durations.size() < 2) {
    throw TraceError("trace: need at least 2 valid rows to build a model");
  }
  result.accepted_rows = durations.size();
  result.model = empirical(std::move(durations));
  return result;
}

inline TraceIngestResult ingest_trace_file(const std::string &path,
                                           TimestampUnit unit = TimestampUnit::seconds) {
  std::ifstream in(path);
  if (!in) {
    throw TraceError("trace: cannot open file: " + path);
  }
  return ingest_trace(in, unit);
}

}  // namespace sfork
