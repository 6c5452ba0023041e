#include "pg/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pg {

using json = nlohmann::ordered_json;

namespace {

class Loader {
 public:
  explicit Loader(std::string origin) : origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& where, const std::string& what) const {
    throw ManifestError(origin_ + ": " + where + ": " + what);
  }

  Expr expr(const json& v, const std::string& where) const {
    std::string src;
    if (v.is_string()) {
      src = v.get<std::string>();
    } else if (v.is_number()) {
      src = v.dump();
    } else {
      fail(where, "expected an expression string or a number");
    }
    try {
      return parse(src, names_);
    } catch (const ParseError& e) {
      fail(where, std::string(e.what()) + " in \"" + src + "\"");
    }
  }

  void load_chart(const json& c, Chart& chart) {
    if (!c.is_object()) fail("chart", "expected an object");
    const json& coords = c.value("coords", json());
    if (!coords.is_array() || coords.empty()) fail("chart.coords", "expected a non-empty array of names");
    for (const json& n : coords) {
      if (!n.is_string()) fail("chart.coords", "coordinate names must be strings");
      chart.coords.push_back(n.get<std::string>());
    }
    const json& dom = c.value("domain", json());
    if (!dom.is_object()) fail("chart.domain", "expected an object keyed by coordinate");
    for (const auto& [key, _] : dom.items()) {
      if (std::find(chart.coords.begin(), chart.coords.end(), key) == chart.coords.end())
        fail("chart.domain." + key, "undeclared coordinate '" + key + "'");
    }
    for (const std::string& name : chart.coords) {
      const std::string where = "chart.domain." + name;
      if (!dom.contains(name)) fail(where, "missing interval");
      const json& iv = dom.at(name);
      if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
        fail(where, "expected [lo, hi]");
      chart.domain.push_back(Interval{iv[0].get<double>(), iv[1].get<double>()});
    }
    try {
      chart.validate();
    } catch (const GeometryError& e) {
      fail("chart", e.what());
    }
    names_ = chart.coords;
  }

  // Row i holds either n entries (full, lower ones may be null) or n - i
  // entries (upper triangle from the diagonal).
  Cometric load_cometric(const json& c, std::size_t n) const {
    if (!c.is_array() || c.size() != n)
      fail("cometric", "expected " + std::to_string(n) + " rows, got " + (c.is_array() ? std::to_string(c.size()) : "none"));
    SquareField m(n);
    std::vector<std::vector<bool>> given(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i) {
      const json& row = c[i];
      const std::string where = "cometric[" + std::to_string(i) + "]";
      if (!row.is_array()) fail(where, "expected an array");
      const bool full = row.size() == n;
      if (!full && row.size() != n - i)
        fail(where, "row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(n) +
                        (i > 0 ? " or " + std::to_string(n - i) : std::string()));
      for (std::size_t k = 0; k < row.size(); ++k) {
        const std::size_t j = full ? k : i + k;
        if (row[k].is_null()) {
          if (j >= i) fail(where, "missing entry on or above the diagonal");
          continue;
        }
        m(i, j) = expr(row[k], where + "[" + std::to_string(j) + "]");
        given[i][j] = true;
      }
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (!given[i][j]) m(i, j) = m(j, i);
    return Cometric{m};
  }

  std::size_t index_of(const std::string& tok, std::size_t n, const std::string& where) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
      if (names_[i] == tok) return i;
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(tok, &pos);
    } catch (const std::exception&) {
      fail(where, "bad index '" + tok + "'");
    }
    if (pos != tok.size() || v < 1 || static_cast<std::size_t>(v) > n) fail(where, "index '" + tok + "' out of range");
    return static_cast<std::size_t>(v - 1);
  }

  BivectorField load_poisson(const json& p, std::size_t n) const {
    BivectorField pi = BivectorField::zero(n);
    if (p.is_null()) return pi;
    if (!p.is_object() || !p.contains("upper") || !p.at("upper").is_object())
      fail("poisson", "expected {\"upper\": {\"i,j\": expr}}");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [key, v] : p.at("upper").items()) {
      const std::string where = "poisson.upper[\"" + key + "\"]";
      const auto comma = key.find(',');
      if (comma == std::string::npos) fail(where, "key must be \"i,j\"");
      auto trim = [](std::string s) {
        s.erase(0, s.find_first_not_of(' '));
        s.erase(s.find_last_not_of(' ') + 1);
        return s;
      };
      const std::size_t i = index_of(trim(key.substr(0, comma)), n, where);
      const std::size_t j = index_of(trim(key.substr(comma + 1)), n, where);
      if (i >= j) fail(where, "entries are given on the strict upper triangle (i < j)");
      if (!seen.insert({i, j}).second) fail(where, "duplicate entry");
      pi.set_upper(i, j, expr(v, where));
    }
    return pi;
  }

  void load_forms(const json& f, std::size_t n, Manifest& m) const {
    if (f.is_null()) return;
    if (!f.is_object()) fail("forms", "expected an object of named component arrays");
    for (const auto& [name, comps] : f.items()) {
      const std::string where = "forms." + name;
      if (!comps.is_array() || comps.size() != n)
        fail(where, "expected " + std::to_string(n) + " components" +
                        (comps.is_array() ? ", got " + std::to_string(comps.size()) : std::string()));
      OneForm w(n);
      for (std::size_t i = 0; i < n; ++i) w[i] = expr(comps[i], where + "[" + std::to_string(i) + "]");
      m.forms.emplace_back(name, std::move(w));
    }
  }

  void load_scalars(const json& s, Manifest& m) const {
    if (s.is_null()) return;
    if (!s.is_object()) fail("scalars", "expected an object of named expressions");
    for (const auto& [name, v] : s.items()) m.scalars.emplace_back(name, expr(v, "scalars." + name));
  }

  WarpSection load_warp(const json& w, const std::filesystem::path& dir) const {
    if (!w.is_object()) fail("warp", "expected an object");
    auto str = [&](const char* key, bool required) {
      if (!w.contains(key)) {
        if (required) fail(std::string("warp.") + key, "missing");
        return std::string();
      }
      if (!w.at(key).is_string()) fail(std::string("warp.") + key, "expected a string");
      return w.at(key).get<std::string>();
    };
    WarpSection out;
    out.base = dir / str("base", true);
    out.fiber = dir / str("fiber", true);
    out.f = str("f", true);
    out.eta1 = str("eta1", false);
    out.eta2 = str("eta2", false);
    return out;
  }

  std::string origin_;
  std::vector<std::string> names_;
};

}  // namespace

const OneForm* Manifest::form(const std::string& name) const {
  for (const auto& [n, w] : forms)
    if (n == name) return &w;
  return nullptr;
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(path.string() + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

Manifest parse_in(const std::string& text, const std::string& origin, const std::filesystem::path& dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ManifestError(origin + ": malformed JSON at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) throw ManifestError(origin + ": top level must be an object");

  static const std::set<std::string> known{"chart", "cometric", "poisson", "forms", "scalars", "warp"};
  for (const auto& [key, _] : doc.items())
    if (!known.count(key)) throw ManifestError(origin + ": unknown section '" + key + "'");

  Loader ld(origin);
  Manifest m;
  m.origin = origin;
  m.hash = content_hash(text);
  if (doc.contains("warp")) {
    m.warp = ld.load_warp(doc.at("warp"), dir);
    for (const char* k : {"chart", "cometric", "poisson", "forms", "scalars"})
      if (doc.contains(k)) ld.fail(k, "a warp manifest takes its fields from the factor manifests");
    return m;
  }
  if (!doc.contains("chart")) ld.fail("chart", "missing");
  if (!doc.contains("cometric")) ld.fail("cometric", "missing");
  ld.load_chart(doc.at("chart"), m.chart);
  const std::size_t n = m.chart.dim();
  if (n > 4) ld.fail("chart", "dimensions above 4 are not supported");
  m.g = ld.load_cometric(doc.at("cometric"), n);
  m.pi = ld.load_poisson(doc.value("poisson", json()), n);
  ld.load_forms(doc.value("forms", json()), n, m);
  ld.load_scalars(doc.value("scalars", json()), m);
  return m;
}

}  // namespace

Manifest parse_manifest(const std::string& text, const std::string& origin) {
  return parse_in(text, origin, std::filesystem::path());
}

Manifest load_manifest(const std::filesystem::path& path) {
  return parse_in(read_file(path), path.string(), path.parent_path());
}

}  // namespace pg
