#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace mlmod::cli {

// 9 significant digits, the format of every numeric CSV cell.
std::string fmt(double x);

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header);
  Csv& operator<<(double x);
  Csv& operator<<(const std::string& s);
  Csv& operator<<(const char* s) { return *this << std::string(s); }
  Csv& operator<<(std::size_t n);
  Csv& operator<<(int n);
  void end_row();
  const std::string& str() const { return text_; }
  void save(const std::string& path) const;

 private:
  void sep();
  std::string text_;
  bool row_start_ = true;
};

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

std::string sha256_file(const std::string& path);

// One manifest.json per output directory; written last so its digests and
// duration cover the whole command.
class Manifest {
 public:
  Manifest(std::string command, std::vector<std::string> argv);
  void param(const std::string& key, nlohmann::json v) { params_[key] = std::move(v); }
  void seed(std::uint64_t s) { seed_ = s; }
  void input(const std::string& path);
  void write(const std::string& dir) const;

 private:
  std::string command_;
  std::vector<std::string> argv_;
  nlohmann::json params_ = nlohmann::json::object();
  std::uint64_t seed_ = 0;
  std::map<std::string, std::string> inputs_;
  std::chrono::steady_clock::time_point start_;
};

const char* version();

}  // namespace mlmod::cli
