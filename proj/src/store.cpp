#include "aswt/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <tuple>

#include "aswt/error.hpp"
#include "json.hpp"

namespace aswt {

using nlohmann::json;

std::string to_json(const ResultRecord& r) {
  json j;
  j["schema"] = kResultSchema;
  j["spec_hash"] = r.spec_hash;
  j["spec_name"] = r.spec_name;
  j["p"] = r.p;
  j["k"] = r.k;
  j["d"] = r.d ? json(*r.d) : json(nullptr);
  j["level"] = r.level;
  j["genus"] = r.genus;
  j["a"] = r.a;
  j["wall_time"] = r.wall_time;
  j["tool_version"] = r.tool_version;
  j["timestamp"] = r.timestamp;
  return j.dump();
}

ResultRecord record_from_json(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, std::string("result record: ") + e.what());
  }
  if (!j.is_object() || !j.contains("schema")) fail(ErrorCode::parse, "result record without schema");
  if (j["schema"] != kResultSchema)
    fail(ErrorCode::parse, "result record schema " + j["schema"].dump() + " is not supported");
  try {
    ResultRecord r;
    r.spec_hash = j.at("spec_hash").get<std::string>();
    r.spec_name = j.at("spec_name").get<std::string>();
    r.p = j.at("p").get<unsigned>();
    r.k = j.at("k").get<unsigned>();
    if (!j.at("d").is_null()) r.d = j.at("d").get<std::uint64_t>();
    r.level = j.at("level").get<unsigned>();
    r.genus = j.at("genus").get<std::uint64_t>();
    r.a = j.at("a").get<std::vector<std::uint64_t>>();
    r.wall_time = j.at("wall_time").get<double>();
    r.tool_version = j.at("tool_version").get<std::string>();
    r.timestamp = j.at("timestamp").get<std::string>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::parse, std::string("result record: ") + e.what());
  }
}

std::string utc_timestamp() {
  std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void ResultStore::append(const ResultRecord& r) {
  std::lock_guard lock(mu_);
  if (file_.has_parent_path()) std::filesystem::create_directories(file_.parent_path());
  const std::string line = to_json(r) + "\n";
  int fd = ::open(file_.c_str(), O_WRONLY | O_APPEND | O_CREAT, 0644);
  if (fd < 0) fail(ErrorCode::io, "cannot open " + file_.string());
  // an exclusive lock keeps concurrent writers from interleaving lines
  ::flock(fd, LOCK_EX);
  std::size_t off = 0;
  while (off < line.size()) {
    ssize_t w = ::write(fd, line.data() + off, line.size() - off);
    if (w <= 0) {
      ::flock(fd, LOCK_UN);
      ::close(fd);
      fail(ErrorCode::io, "write failed on " + file_.string());
    }
    off += static_cast<std::size_t>(w);
  }
  ::flock(fd, LOCK_UN);
  ::close(fd);
}

std::vector<ResultRecord> ResultStore::load() const {
  std::lock_guard lock(mu_);
  std::vector<ResultRecord> out;
  std::ifstream in(file_);
  if (!in) return out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(record_from_json(line));
  return out;
}

std::vector<ResultRecord> ResultStore::query(const std::optional<std::string>& spec_hash,
                                             const std::optional<unsigned>& level) const {
  std::map<std::tuple<std::string, unsigned, std::size_t>, std::size_t> latest;
  auto all = load();
  std::vector<ResultRecord> out;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const auto& r = all[i];
    if (spec_hash && r.spec_hash != *spec_hash) continue;
    if (level && r.level != *level) continue;
    auto key = std::make_tuple(r.spec_hash, r.level, r.a.size());
    auto it = latest.find(key);
    if (it == latest.end()) {
      latest[key] = out.size();
      out.push_back(r);
    } else {
      out[it->second] = r;
    }
  }
  return out;
}

}  // namespace aswt
