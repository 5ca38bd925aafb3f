#pragma once

#include <unistd.h>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "credulous/datamodel.hpp"
#include "credulous/random.hpp"

namespace testing_support {

using namespace cred;

inline Timestamp ts(const char* s) { return *parse_timestamp(s); }

inline const Timestamp kCapture = ts("2020-01-01T00:00:00Z");

/// Small valid snapshot: created 100 days before kCapture.
inline AccountSnapshot make_snapshot(const std::string& id) {
  AccountSnapshot s;
  s.account_id = id;
  s.screen_name = "user" + id;
  s.created_at = kCapture - std::chrono::days{100};
  s.statuses_count = 50;
  s.followers_count = 10;
  s.friends_count = 20;
  return s;
}

/// Dataset named "test" with features f0..f{dims-1}; ids are "a000", "a001", ...
inline Dataset make_dataset(const std::vector<std::vector<double>>& rows, const std::vector<int>& labels,
                            const std::string& schema_id = "test") {
  Dataset d;
  d.schema.schema_id = schema_id;
  const std::size_t dims = rows.empty() ? 0 : rows.front().size();
  for (std::size_t j = 0; j < dims; ++j) d.schema.feature_names.push_back("f" + std::to_string(j));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "a%03zu", i);
    d.instances.push_back({id, {schema_id, rows[i]}, labels[i] ? ClassLabel::Positive : ClassLabel::Negative});
  }
  return d;
}

/// Two Gaussian blobs of `n` per class, `dims` features, centres at 0 and `gap`.
inline Dataset gaussian_blobs(std::size_t n, std::size_t dims, double gap, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const int y = i % 2 == 0 ? 1 : 0;
    std::vector<double> r(dims);
    for (auto& v : r) v = standard_normal(rng) + (y ? gap : 0.0);
    rows.push_back(std::move(r));
    labels.push_back(y);
  }
  return make_dataset(rows, labels);
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("credulous_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& leaf = "") const { return leaf.empty() ? path_.string() : (path_ / leaf).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support
