#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pg/killing.hpp"

namespace pg {

struct CheckResult {
  std::string name;
  /// Named residuals in insertion order; the first one drives the verdict
  /// unless the check says otherwise in `note`.
  std::vector<std::pair<std::string, double>> residuals;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Fail;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string note;
  std::vector<double> point;  // offending sample, when a domain error was hit

  bool operator==(const CheckResult&) const = default;
};

struct Report {
  std::string tool = "pg";
  std::string version;
  std::string manifest_hash;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double tolerance = 0.0;
  std::vector<CheckResult> checks;

  bool failed() const;
  bool operator==(const Report&) const = default;
};

/// Stable key order; non-finite residuals are written as null.
std::string to_structured(const Report& r);
Report from_structured(const std::string& text);

std::string to_text(const Report& r);

/// Worst of the verdicts; Skipped only if every input is Skipped.
Verdict worst(std::initializer_list<Verdict> vs);

}  // namespace pg
