#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "mlmod/evaluation.hpp"

namespace mlmod {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cur += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    auto b = f.find_first_not_of(" \t"), e = f.find_last_not_of(" \t");
    f = b == std::string::npos ? "" : f.substr(b, e - b + 1);
  }
  return out;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string fmt_bound(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

MetadataTable parse_metadata(const std::string& csv, const std::vector<std::string>& binned,
                             double bin_width) {
  if (!(bin_width > 0.0)) throw ValidationError("bin width must be positive");
  std::istringstream in(csv);
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    header = split_csv(line);
    break;
  }
  if (header.empty()) throw ParseError("metadata file has no header");

  int id_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto h = lower(header[c]);
    if (h == "node" || h == "id") {
      id_col = static_cast<int>(c);
      break;
    }
  }
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (static_cast<int>(c) != id_col) cols.push_back(c);
  for (const auto& b : binned)
    if (std::find(header.begin(), header.end(), b) == header.end())
      throw ValidationError("binned column '" + b + "' not in metadata header");

  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> ids;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    auto f = split_csv(line);
    if (f.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, got " +
                           std::to_string(f.size()),
                       lineno);
    if (id_col >= 0) {
      const auto& s = f[id_col];
      long long v = -1;
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
        throw ParseError("bad node id '" + s + "'", lineno);
      ids.push_back(static_cast<std::size_t>(v));
    } else {
      ids.push_back(rows.size());
    }
    rows.push_back(std::move(f));
  }
  const std::size_t n = rows.size();
  std::vector<std::size_t> row_of(n, SIZE_MAX);
  for (std::size_t r = 0; r < n; ++r) {
    if (ids[r] >= n) throw ValidationError("node id " + std::to_string(ids[r]) + " out of range");
    if (row_of[ids[r]] != SIZE_MAX) throw ValidationError("duplicate node id " + std::to_string(ids[r]));
    row_of[ids[r]] = r;
  }

  MetadataTable table;
  for (std::size_t c : cols) {
    MetadataColumn col;
    col.name = header[c];
    bool bin = std::find(binned.begin(), binned.end(), col.name) != binned.end();
    std::map<std::string, Label> code_of;
    std::map<long long, Label> bin_code;
    col.codes.resize(n);
    for (std::size_t node = 0; node < n; ++node) {
      const std::string& v = rows[row_of[node]][c];
      if (bin && !v.empty()) {
        double x = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || ptr != v.data() + v.size())
          throw ValidationError("column '" + col.name + "' has non-numeric value '" + v + "'");
        auto k = static_cast<long long>(std::floor(x / bin_width));
        auto [it, fresh] = bin_code.try_emplace(k, static_cast<Label>(col.categories.size()));
        if (fresh)
          col.categories.push_back("[" + fmt_bound(k * bin_width) + "," +
                                   fmt_bound((k + 1) * bin_width) + ")");
        col.codes[node] = it->second;
      } else {
        auto [it, fresh] = code_of.try_emplace(v, static_cast<Label>(col.categories.size()));
        if (fresh) col.categories.push_back(v);
        col.codes[node] = it->second;
      }
    }
    table.columns.push_back(std::move(col));
  }
  return table;
}

MetadataTable load_metadata(const std::string& path, const std::vector<std::string>& binned,
                            double bin_width) {
  return parse_metadata(read_text_file(path), binned, bin_width);
}

}  // namespace mlmod
