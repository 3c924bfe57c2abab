#pragma once

// Tabular results, CSV/JSON serialization and run manifests.

#include <openssl/evp.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace anderson_lab {

using json = nlohmann::json;

inline constexpr std::string_view kCodeVersion = "0.1.0";

/// Every float leaves the program through this: 17 significant digits.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_bool(bool b) { return b ? "true" : "false"; }

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("not a number: " + s);
  return v;
}

/// A named table of pre-formatted cells.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) {
    if (row.size() != columns.size()) throw std::logic_error("table " + name + ": row width mismatch");
    rows.push_back(std::move(row));
  }

  [[nodiscard]] std::size_t column(std::string_view c) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == c) return i;
    throw std::out_of_range("table " + name + ": no column " + std::string(c));
  }

  bool operator==(const Table&) const = default;
};

namespace detail {

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

/// A cell as a JSON scalar: booleans and numbers when they parse, else text.
inline json cell_json(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  if (s == "nan" || s == "inf" || s == "-inf") return s;
  if (!s.empty() && s.find_first_not_of("+-0123456789") == std::string::npos) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(s, &used);
      if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
  }
  try {
    return parse_double(s);
  } catch (const std::exception&) {
    return s;
  }
}

}  // namespace detail

inline std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += detail::csv_escape(cells[i]);
    }
    out += '\n';
  };
  line(t.columns);
  for (const auto& r : t.rows) line(r);
  return out;
}

inline Table parse_csv(std::string_view text, std::string name) {
  Table t;
  t.name = std::move(name);
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("csv " + t.name + ": missing header");
  t.columns = detail::csv_split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    t.add(detail::csv_split(line));
  }
  return t;
}

inline json to_json(const Table& t) {
  json rows = json::array();
  for (const auto& r : t.rows) {
    json obj = json::object();
    for (std::size_t i = 0; i < r.size(); ++i) obj[t.columns[i]] = detail::cell_json(r[i]);
    rows.push_back(std::move(obj));
  }
  return {{"columns", t.columns}, {"rows", std::move(rows)}};
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

/// Hex SHA-256 of a byte string.
inline std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

/// nlohmann objects keep keys sorted, so dump() is already canonical.
inline std::string config_digest(const json& config) { return sha256_hex(config.dump()); }

inline std::string utc_timestamp(std::chrono::system_clock::time_point t = std::chrono::system_clock::now()) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct RunManifest {
  std::uint64_t seed = 0;
  std::string config_digest;
  std::string code_version{kCodeVersion};
  unsigned workers = 1;
  std::string command;
  std::string started;
  std::string finished;

  [[nodiscard]] json to_json() const {
    return {{"seed", seed},       {"config_digest", config_digest}, {"code_version", code_version},
            {"workers", workers}, {"command", command},             {"started", started},
            {"finished", finished}};
  }
};

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string() + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

/// JSON document for a set of tables plus summary fields and manifest.
inline json report_json(const std::vector<Table>& tables, const json& summary, const RunManifest& manifest) {
  json doc;
  doc["manifest"] = manifest.to_json();
  doc["summary"] = summary;
  json t = json::object();
  for (const auto& tab : tables) t[tab.name] = to_json(tab);
  doc["tables"] = std::move(t);
  return doc;
}

/// Writes <stem>_<table>.csv per table (format csv or both), <stem>.json
/// (json or both) and always <stem>_manifest.json; returns the paths written.
inline std::vector<std::filesystem::path> persist_tables(const std::vector<Table>& tables, const json& summary,
                                                         const RunManifest& manifest, const std::filesystem::path& dir,
                                                         const std::string& stem, std::string_view format = "both") {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  if (format != "json") {
    for (const auto& t : tables) {
      written.push_back(dir / (stem + "_" + t.name + ".csv"));
      write_text(written.back(), to_csv(t));
    }
  }
  if (format != "csv") {
    written.push_back(dir / (stem + ".json"));
    write_text(written.back(), report_json(tables, summary, manifest).dump(2) + "\n");
  }
  written.push_back(dir / (stem + "_manifest.json"));
  write_text(written.back(), manifest.to_json().dump(2) + "\n");
  return written;
}

}  // namespace anderson_lab
