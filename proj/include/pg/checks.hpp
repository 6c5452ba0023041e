#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pg/manifest.hpp"
#include "pg/report.hpp"

namespace pg {

struct RunOptions {
  std::uint64_t seed = 42;
  std::size_t samples = 64;
  double tol = 1e-8;
  /// The fourth-order warped formula loses a few digits to cancellation.
  double prop45_tol = 1e-7;
  /// Empty selects everything. Entries: poisson, connection, curvature,
  /// killing:<form>, two-killing:<form>, weitzenbock:<form>, warped.
  std::vector<std::string> only;
};

/// Thrown for a selection that names something the manifest does not have.
class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string tool_version();

/// Runs the selected checks in dependency order
/// (poisson, connection, curvature, killing, warped). A warp manifest loads
/// its factor manifests and checks the product as well as the closed forms.
Report run_checks(const Manifest& m, const RunOptions& opt);

struct WarpInputs {
  Manifest base;
  Manifest fiber;
  std::string f;
  std::string eta1;  // form names, may be empty
  std::string eta2;
  /// prop22, prop31, prop34, prop45, thm23, thm36, thm47, eq322; empty = all.
  std::vector<std::string> verify;
  std::string hash;
};

Report run_warp(const WarpInputs& in, const RunOptions& opt);

/// Loads the factor manifests named by a warp section.
WarpInputs warp_inputs(const Manifest& m);

struct PlaneInputs {
  std::string pi;
  std::string eta;  // "e1,e2"
  /// christoffel, thm48; empty = all.
  std::vector<std::string> verify;
};

/// Flat plane with identity cometric and the given Pi^{12} on [-1, 1]^2.
Report run_r2(const PlaneInputs& in, const RunOptions& opt);

/// Splits "a,b" at top-level commas.
std::vector<std::string> split_top_level(const std::string& s);

}  // namespace pg
