#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "pg/manifold.hpp"

namespace pg {

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Warped product description: two factor manifests and a warping function.
/// Paths are resolved relative to the manifest that names them.
struct WarpSection {
  std::filesystem::path base;
  std::filesystem::path fiber;
  std::string f;
  std::string eta1;  // form name in the base manifest, may be empty
  std::string eta2;  // form name in the fiber manifest, may be empty
};

struct Manifest {
  std::string origin;  // path or label, for messages
  Chart chart;
  Cometric g;
  BivectorField pi;
  std::vector<std::pair<std::string, OneForm>> forms;
  std::vector<std::pair<std::string, Expr>> scalars;
  std::optional<WarpSection> warp;
  std::string hash;  // of the source bytes

  const OneForm* form(const std::string& name) const;
};

/// JSON text in, validated fields out. Lower triangles are filled from the
/// upper ones. A manifest with only a warp section has an empty chart.
Manifest parse_manifest(const std::string& text, const std::string& origin = "<manifest>");
Manifest load_manifest(const std::filesystem::path& path);

/// 64-bit FNV-1a, rendered as 16 hex digits.
std::string content_hash(std::string_view bytes);

std::string read_file(const std::filesystem::path& path);

}  // namespace pg
