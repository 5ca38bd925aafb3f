#pragma once

#include <algorithm>
#include <array>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include "credulous/credulity.hpp"
#include "credulous/eval.hpp"
#include "credulous/features.hpp"
#include "credulous/learners/spec.hpp"

namespace cred {

inline constexpr std::array<const char*, 5> kTableMetricColumns{"accuracy", "precision", "recall", "F1", "AUC"};

inline std::string feature_set_label(std::string_view schema_id) {
  if (schema_id == "all_features") return "ALL_features";
  if (schema_id == "botometer_plus") return "Botometer+";
  if (schema_id == "class_a_minus") return "ClassA-";
  return std::string(schema_id);
}

inline std::string algorithm_label_for(std::string_view name) {
  const auto a = parse_algorithm(name);
  return a ? std::string(algorithm_label(*a)) : std::string(name);
}

struct TableRow {
  std::string group;  // feature set, or partition name
  std::string name;   // learner
  FoldMetrics metrics;
};

namespace detail {

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

inline std::string render_table(const std::array<std::string, 2>& key_headers, std::span<const TableRow> rows) {
  std::vector<std::array<std::string, 7>> cells;
  cells.push_back({key_headers[0], key_headers[1], kTableMetricColumns[0], kTableMetricColumns[1],
                   kTableMetricColumns[2], kTableMetricColumns[3], kTableMetricColumns[4]});
  for (const auto& r : rows)
    cells.push_back({r.group, r.name, fixed(r.metrics.accuracy_percent, 2), fixed(r.metrics.precision, 2),
                     fixed(r.metrics.recall, 2), fixed(r.metrics.f1, 2), fixed(r.metrics.auc, 2)});
  std::array<std::size_t, 7> width{};
  for (const auto& row : cells)
    for (std::size_t c = 0; c < 7; ++c) width[c] = std::max(width[c], row[c].size());

  std::string out;
  auto emit = [&](const std::array<std::string, 7>& row) {
    std::string line;
    for (std::size_t c = 0; c < 7; ++c) {
      const auto pad = std::string(width[c] - row[c].size(), ' ');
      line += c < 2 ? row[c] + pad : pad + row[c];  // keys left, metrics right
      if (c + 1 < 7) line += "  ";
    }
    out += line + "\n";
  };
  emit(cells.front());
  std::size_t total = 2 * 6;
  for (auto w : width) total += w;
  out += std::string(total, '-') + "\n";
  for (std::size_t i = 1; i < cells.size(); ++i) emit(cells[i]);
  return out;
}

}  // namespace detail

/// One row per (feature set, learner): accuracy in percent, the rest in [0, 1].
inline std::string render_results_table(std::span<const EvalReport> reports) {
  std::vector<TableRow> rows;
  for (const auto& r : reports)
    rows.push_back({feature_set_label(r.feature_set), algorithm_label_for(r.learner), r.mean});
  return detail::render_table({"features", "alg"}, rows);
}

inline std::string render_results_table(std::span<const CredulousReport> reports) {
  std::vector<TableRow> rows;
  for (const auto& r : reports) rows.push_back({feature_set_label(r.feature_set), algorithm_label_for(r.learner), r.mean});
  return detail::render_table({"features", "alg"}, rows);
}

/// Per-partition means followed by the aggregate mean and stddev rows.
inline std::string render_partition_table(const CredulousReport& r) {
  std::vector<TableRow> rows;
  const auto alg = algorithm_label_for(r.learner);
  for (std::size_t p = 0; p < r.partitions.size(); ++p)
    rows.push_back({"partition " + std::to_string(p), alg, r.partitions[p].report.mean});
  rows.push_back({"mean", alg, r.mean});
  rows.push_back({"stddev", alg, r.stddev});
  return detail::render_table({"fold", "alg"}, rows);
}

}  // namespace cred
