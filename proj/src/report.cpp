#include "pg/report.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace pg {

using json = nlohmann::ordered_json;

namespace {

Verdict verdict_from(const std::string& s) {
  for (Verdict v : {Verdict::Pass, Verdict::Fail, Verdict::Indeterminate, Verdict::Skipped})
    if (to_string(v) == s) return v;
  throw std::runtime_error("unknown verdict '" + s + "'");
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& v) { return v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>(); }

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

bool Report::failed() const {
  for (const CheckResult& c : checks)
    if (c.verdict == Verdict::Fail) return true;
  return false;
}

Verdict worst(std::initializer_list<Verdict> vs) {
  bool any = false;
  Verdict w = Verdict::Pass;
  for (Verdict v : vs) {
    if (v == Verdict::Skipped) continue;
    any = true;
    if (v == Verdict::Fail) w = Verdict::Fail;
    if (v == Verdict::Indeterminate && w != Verdict::Fail) w = Verdict::Indeterminate;
  }
  return any ? w : Verdict::Skipped;
}

std::string to_structured(const Report& r) {
  json doc;
  doc["tool"] = r.tool;
  doc["version"] = r.version;
  doc["manifest_hash"] = r.manifest_hash;
  doc["seed"] = r.seed;
  doc["samples"] = r.samples;
  doc["tolerance"] = r.tolerance;
  std::size_t counts[4] = {0, 0, 0, 0};
  json checks = json::array();
  for (const CheckResult& c : r.checks) {
    json j;
    j["name"] = c.name;
    j["verdict"] = std::string(to_string(c.verdict));
    json res = json::object();
    for (const auto& [k, v] : c.residuals) res[k] = number(v);
    j["residuals"] = res;
    j["tolerance"] = c.tolerance;
    j["samples"] = c.samples;
    j["seed"] = c.seed;
    if (!c.note.empty()) j["note"] = c.note;
    if (!c.point.empty()) j["point"] = c.point;
    checks.push_back(std::move(j));
    ++counts[static_cast<int>(c.verdict)];
  }
  doc["checks"] = std::move(checks);
  doc["summary"] = {{"pass", counts[0]}, {"fail", counts[1]}, {"indeterminate", counts[2]}, {"skipped", counts[3]}};
  return doc.dump(2) + "\n";
}

Report from_structured(const std::string& text) {
  const json doc = json::parse(text);
  Report r;
  r.tool = doc.at("tool").get<std::string>();
  r.version = doc.at("version").get<std::string>();
  r.manifest_hash = doc.at("manifest_hash").get<std::string>();
  r.seed = doc.at("seed").get<std::uint64_t>();
  r.samples = doc.at("samples").get<std::size_t>();
  r.tolerance = doc.at("tolerance").get<double>();
  for (const json& j : doc.at("checks")) {
    CheckResult c;
    c.name = j.at("name").get<std::string>();
    c.verdict = verdict_from(j.at("verdict").get<std::string>());
    for (const auto& [k, v] : j.at("residuals").items()) c.residuals.emplace_back(k, number_from(v));
    c.tolerance = j.at("tolerance").get<double>();
    c.samples = j.at("samples").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.note = j.value("note", std::string());
    if (j.contains("point")) c.point = j.at("point").get<std::vector<double>>();
    r.checks.push_back(std::move(c));
  }
  return r;
}

std::string to_text(const Report& r) {
  std::ostringstream out;
  out << r.tool << " " << r.version << "  manifest " << r.manifest_hash << "  seed " << r.seed << "  samples "
      << r.samples << "  tol " << sci(r.tolerance) << "\n";
  std::size_t counts[4] = {0, 0, 0, 0};
  for (const CheckResult& c : r.checks) {
    ++counts[static_cast<int>(c.verdict)];
    char head[64];
    std::snprintf(head, sizeof head, "%-14s %-34s", std::string(to_string(c.verdict)).c_str(), c.name.c_str());
    out << head;
    for (const auto& [k, v] : c.residuals) out << " " << k << "=" << sci(v);
    if (c.tolerance != r.tolerance) out << "  (tol " << sci(c.tolerance) << ")";
    out << "\n";
    if (!c.note.empty()) out << "    " << c.note << "\n";
  }
  out << "summary: " << counts[0] << " pass, " << counts[1] << " fail, " << counts[2] << " indeterminate, "
      << counts[3] << " skipped\n";
  return out.str();
}

}  // namespace pg
