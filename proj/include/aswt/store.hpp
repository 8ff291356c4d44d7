#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace aswt {

inline constexpr int kResultSchema = 1;

struct ResultRecord {
  std::string spec_hash;
  std::string spec_name;
  unsigned p = 0, k = 0;
  std::optional<std::uint64_t> d;  // basic towers only
  unsigned level = 0;
  std::uint64_t genus = 0;
  std::vector<std::uint64_t> a;    // a^(1..R)
  double wall_time = 0;
  std::string tool_version;
  std::string timestamp;           // UTC, ISO 8601

  bool operator==(const ResultRecord&) const = default;
};

std::string to_json(const ResultRecord& r);
ResultRecord record_from_json(const std::string& line);
std::string utc_timestamp();

// Line-delimited records, append only.  Queries keep the latest record for each
// (spec_hash, level, R).
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path file) : file_(std::move(file)) {}

  const std::filesystem::path& path() const { return file_; }
  void append(const ResultRecord& r);
  std::vector<ResultRecord> load() const;
  std::vector<ResultRecord> query(const std::optional<std::string>& spec_hash = std::nullopt,
                                  const std::optional<unsigned>& level = std::nullopt) const;

 private:
  std::filesystem::path file_;
  mutable std::mutex mu_;
};

}  // namespace aswt
