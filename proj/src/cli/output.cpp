#include <cstdio>
#include <fstream>

#include "internal.hpp"
#include "mlmod/network.hpp"

namespace mlmod::cli {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

Csv::Csv(const std::vector<std::string>& header) {
  for (const auto& h : header) *this << h;
  end_row();
}

void Csv::sep() {
  if (!row_start_) text_ += ',';
  row_start_ = false;
}

Csv& Csv::operator<<(double x) {
  sep();
  text_ += fmt(x);
  return *this;
}

Csv& Csv::operator<<(const std::string& s) {
  sep();
  if (s.find_first_of(",\"\n") == std::string::npos) {
    text_ += s;
  } else {
    text_ += '"';
    for (char c : s) {
      if (c == '"') text_ += '"';
      text_ += c;
    }
    text_ += '"';
  }
  return *this;
}

Csv& Csv::operator<<(std::size_t n) {
  sep();
  text_ += std::to_string(n);
  return *this;
}

Csv& Csv::operator<<(int n) {
  sep();
  text_ += std::to_string(n);
  return *this;
}

void Csv::end_row() {
  text_ += '\n';
  row_start_ = true;
}

void Csv::save(const std::string& path) const { write_text_file(path, text_); }

void write_json(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

nlohmann::json read_json(const std::string& path) {
  try {
    return nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
}

}  // namespace mlmod::cli
