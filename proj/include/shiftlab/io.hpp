#pragma once

// Serialization (JSON for series and sets, CSV tables) and the plain-text
// experiment configuration: key = value lines under [section] headers.

#include <cstdio>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "shiftlab/core.hpp"
#include "shiftlab/domain.hpp"
#include "shiftlab/series.hpp"

namespace shiftlab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// JSON

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
          "json: complex numbers are [re, im] pairs");
  return {j[0].get<double>(), j[1].get<double>()};
}

/// Array of [re, im] pairs, index 0 first.
inline json to_json(const PowerSeries& f) {
  json a = json::array();
  for (cplx c : f.coeffs()) a.push_back(to_json(c));
  return a;
}

inline PowerSeries series_from_json(const json& j) {
  require(j.is_array() && !j.empty(), "json: a series is a non-empty array of [re, im] pairs");
  std::vector<cplx> c;
  for (const auto& e : j) c.push_back(complex_from_json(e));
  return PowerSeries(std::move(c));
}

inline json to_json(const TrigPolynomial& f) {
  json a = json::array();
  for (cplx c : f.coeff_vector()) a.push_back(to_json(c));
  return {{"min_index", f.min_index()}, {"coeffs", a}};
}

inline TrigPolynomial trig_from_json(const json& j) {
  require(j.is_object() && j.contains("min_index") && j.contains("coeffs"),
          "json: a trigonometric polynomial needs min_index and coeffs");
  require(j["min_index"].is_number_integer(), "json: min_index must be an integer");
  std::vector<cplx> c;
  require(j["coeffs"].is_array() && !j["coeffs"].empty(), "json: coeffs must be a non-empty array");
  for (const auto& e : j["coeffs"]) c.push_back(complex_from_json(e));
  return TrigPolynomial(std::move(c), j["min_index"].get<long>());
}

/// {"arcs": [[t1, t2], ...], "points": [angle, ...]}
inline json to_json(const CompactCircleSet& E) {
  json arcs = json::array(), pts = json::array();
  for (const auto& a : E.arcs()) arcs.push_back(json::array({a.start, a.end}));
  for (const auto& p : E.points()) pts.push_back(p.angle);
  return {{"arcs", arcs}, {"points", pts}};
}

inline CompactCircleSet set_from_json(const json& j) {
  require(j.is_object(), "json: a set is an object with arcs and points");
  std::vector<Arc> arcs;
  std::vector<CirclePoint> pts;
  if (j.contains("arcs"))
    for (const auto& a : j["arcs"]) {
      require(a.is_array() && a.size() == 2, "json: arcs are [t1, t2] pairs");
      arcs.push_back({a[0].get<double>(), a[1].get<double>()});
    }
  if (j.contains("points"))
    for (const auto& p : j["points"]) pts.push_back({p.get<double>(), std::nullopt});
  return CompactCircleSet(std::move(arcs), std::move(pts));
}

// ---------------------------------------------------------------------------
// CSV

/// Round-trip formatting: 17 significant digits.
inline std::string format_number(double x) {
  char b[40];
  std::snprintf(b, sizeof b, "%.17g", x);
  return b;
}

class CsvTable {
 public:
  using Cell = std::variant<double, long long, std::string>;

  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {
    require(!header_.empty(), "CsvTable: empty header");
  }

  CsvTable& add(std::vector<Cell> row) {
    require(row.size() == header_.size(), "CsvTable: row width does not match the header");
    rows_.push_back(std::move(row));
    return *this;
  }

  const std::vector<std::string>& header() const { return header_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<Cell>& row(std::size_t i) const { return rows_.at(i); }

  void write(std::ostream& os) const {
    write_row(os, header_);
    for (const auto& r : rows_) {
      std::vector<std::string> s;
      for (const auto& c : r) s.push_back(cell_text(c));
      write_row(os, s);
    }
  }

  std::string str() const {
    std::ostringstream os;
    write(os);
    return os.str();
  }

  void save(const std::string& path) const {
    std::ofstream f(path, std::ios::binary);
    require(static_cast<bool>(f), "CsvTable: cannot open " + path);
    write(f);
  }

 private:
  static std::string cell_text(const Cell& c) {
    if (auto d = std::get_if<double>(&c)) return format_number(*d);
    if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
    return std::get<std::string>(c);
  }
  static std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"') out += '"';
      out += ch;
    }
    return out + "\"";
  }
  static void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << quote(cells[i]);
    os << '\n';
  }

  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

// ---------------------------------------------------------------------------
// Configuration

/// Invalid configuration; carries the source line (0 when not tied to one).
class ConfigError : public InvalidInput {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg)
      : InvalidInput(source + (line > 0 ? ":" + std::to_string(line) : std::string()) + ": " + msg), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace detail

/// Parsed key = value configuration. Keys are addressed as "section.key";
/// keys before the first header live in the root section and are addressed
/// by their bare name. Every lookup marks the key as used, and
/// reject_unknown() fails on anything left unread.
class Config {
 public:
  struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
  };

  Config() = default;
  explicit Config(std::string source) : source_(std::move(source)) {}

  static Config parse(const std::string& text, const std::string& source = "<config>") {
    Config cfg(source);
    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
      ++line;
      auto hash = raw.find('#');
      std::string s = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (s.empty()) continue;
      if (s.front() == '[') {
        if (s.back() != ']') throw ConfigError(source, line, "unterminated section header");
        section = detail::trim(s.substr(1, s.size() - 2));
        if (section.empty() || section.find_first_of(" .=") != std::string::npos)
          throw ConfigError(source, line, "invalid section name '" + section + "'");
        continue;
      }
      auto eq = s.find('=');
      if (eq == std::string::npos) throw ConfigError(source, line, "expected key = value");
      std::string key = detail::trim(s.substr(0, eq));
      if (key.empty() || key.find_first_of(" \t") != std::string::npos)
        throw ConfigError(source, line, "invalid key '" + key + "'");
      cfg.set(section.empty() ? key : section + "." + key, detail::trim(s.substr(eq + 1)), line);
    }
    return cfg;
  }

  static Config load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path, 0, "cannot open configuration file");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse(ss.str(), path);
  }

  /// Adds or overrides a key (command-line key=value pairs use line 0).
  void set(const std::string& key, const std::string& value, int line = 0) {
    auto it = entries_.find(key);
    if (it != entries_.end() && line > 0 && it->second.line > 0)
      throw ConfigError(source_, line, "duplicate key '" + key + "' (first set on line " +
                                           std::to_string(it->second.line) + ")");
    entries_[key] = Entry{value, line, false};
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  bool empty() const { return entries_.empty(); }
  const std::string& source() const { return source_; }

  std::optional<std::string> raw(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    it->second.used = true;
    return it->second.value;
  }

  std::string get_string(const std::string& key, const std::string& def) const {
    auto r = raw(key);
    std::string v = r ? *r : def;
    record(key, v);
    return v;
  }

  double get_double(const std::string& key, double def) const {
    auto r = raw(key);
    double v = r ? to_double(key, *r) : def;
    record(key, format_number(v));
    return v;
  }

  long long get_int(const std::string& key, long long def) const {
    auto r = raw(key);
    long long v = r ? to_int(key, *r) : def;
    record(key, std::to_string(v));
    return v;
  }

  bool get_bool(const std::string& key, bool def) const {
    auto r = raw(key);
    bool v = def;
    if (r) {
      if (*r == "true" || *r == "1" || *r == "yes") v = true;
      else if (*r == "false" || *r == "0" || *r == "no") v = false;
      else fail(key, "expected true or false, got '" + *r + "'");
    }
    record(key, v ? "true" : "false");
    return v;
  }

  /// Comma-separated reals.
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& def) const {
    auto r = raw(key);
    std::vector<double> v = def;
    if (r) {
      v.clear();
      for (const auto& t : detail::split(*r, ',')) v.push_back(to_double(key, t));
    }
    std::string rec;
    for (std::size_t i = 0; i < v.size(); ++i) rec += (i ? "," : "") + format_number(v[i]);
    record(key, rec);
    return v;
  }

  /// Comma-separated non-negative integers.
  std::vector<std::size_t> get_sizes(const std::string& key, const std::vector<std::size_t>& def) const {
    auto r = raw(key);
    std::vector<std::size_t> v = def;
    if (r) {
      v.clear();
      for (const auto& t : detail::split(*r, ',')) {
        long long x = to_int(key, t);
        if (x < 0) fail(key, "expected non-negative integers");
        v.push_back(static_cast<std::size_t>(x));
      }
    }
    std::string rec;
    for (std::size_t i = 0; i < v.size(); ++i) rec += (i ? "," : "") + std::to_string(v[i]);
    record(key, rec);
    return v;
  }

  /// Complex numbers separated by ';', each "re" or "re,im".
  std::vector<cplx> get_complexes(const std::string& key, const std::vector<cplx>& def) const {
    auto r = raw(key);
    std::vector<cplx> v = def;
    if (r) {
      v.clear();
      for (const auto& t : detail::split(*r, ';')) v.push_back(to_complex(key, t));
    }
    std::string rec;
    for (std::size_t i = 0; i < v.size(); ++i)
      rec += (i ? ";" : "") + format_number(v[i].real()) + "," + format_number(v[i].imag());
    record(key, rec);
    return v;
  }

  cplx get_complex(const std::string& key, cplx def) const {
    auto v = get_complexes(key, {def});
    if (v.size() != 1) fail(key, "expected one complex number");
    return v.front();
  }

  /// Throws on the first key that no lookup consumed.
  void reject_unknown() const {
    for (const auto& [k, e] : entries_)
      if (!e.used) throw ConfigError(source_, e.line, "unknown key '" + k + "'");
  }

  /// Every key looked up, with the value in effect (defaults included).
  const std::map<std::string, std::string>& resolved() const { return resolved_; }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    auto it = entries_.find(key);
    throw ConfigError(source_, it == entries_.end() ? 0 : it->second.line, key + ": " + msg);
  }

 private:
  void record(const std::string& key, const std::string& v) const { resolved_[key] = v; }

  double to_double(const std::string& key, const std::string& s) const {
    std::string t = detail::trim(s);
    if (t == "pi") return pi;
    if (t == "-pi") return -pi;
    if (t == "2pi") return two_pi;
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &pos);
    } catch (const std::exception&) {
      fail(key, "expected a number, got '" + t + "'");
    }
    if (pos != t.size()) fail(key, "expected a number, got '" + t + "'");
    return v;
  }

  long long to_int(const std::string& key, const std::string& s) const {
    std::string t = detail::trim(s);
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(t, &pos);
    } catch (const std::exception&) {
      fail(key, "expected an integer, got '" + t + "'");
    }
    if (pos != t.size()) fail(key, "expected an integer, got '" + t + "'");
    return v;
  }

  cplx to_complex(const std::string& key, const std::string& s) const {
    auto parts = detail::split(s, ',');
    if (parts.size() == 1) return {to_double(key, parts[0]), 0.0};
    if (parts.size() == 2) return {to_double(key, parts[0]), to_double(key, parts[1])};
    fail(key, "expected re or re,im, got '" + s + "'");
  }

  std::string source_ = "<config>";
  mutable std::map<std::string, Entry> entries_;
  mutable std::map<std::string, std::string> resolved_;
};

}  // namespace shiftlab
