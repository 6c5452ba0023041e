// pg: verification reports for contravariant Riemannian Poisson manifests.
//
// Exit status: 0 when no check fails, 1 when some check fails, 2 for bad
// input (unreadable manifest, unknown selection, malformed expression).

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pg/checks.hpp"

namespace {

struct Common {
  std::size_t samples = 64;
  std::uint64_t seed = 42;
  double tol = 1e-8;
  std::string report = "text";
  std::string output;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--samples", c.samples, "sample points")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "sampling seed");
  app->add_option("--tol", c.tol, "absolute tolerance")->check(CLI::PositiveNumber);
  app->add_option("--report", c.report, "report format")->check(CLI::IsMember({"text", "structured"}));
  app->add_option("-o,--output", c.output, "write the report to a file instead of stdout");
}

int emit(const pg::Report& r, const Common& c) {
  const std::string body = c.report == "structured" ? pg::to_structured(r) : pg::to_text(r);
  if (c.output.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(c.output, std::ios::binary);
    if (!out) throw pg::ManifestError(c.output + ": cannot write");
    out << body;
  }
  return r.failed() ? 1 : 0;
}

pg::RunOptions options(const Common& c) {
  pg::RunOptions o;
  o.samples = c.samples;
  o.seed = c.seed;
  o.tol = c.tol;
  return o;
}

std::vector<std::string> csv(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checks contravariant Levi-Civita, Killing and warped-product identities at sample points"};
  app.set_version_flag("--version", pg::tool_version());
  app.require_subcommand(1);

  Common check_opts;
  std::string manifest;
  std::vector<std::string> only;
  CLI::App* check = app.add_subcommand("check", "run the checks of one manifest");
  check->add_option("manifest", manifest, "manifest file (JSON)")->required()->check(CLI::ExistingFile);
  check->add_option("--only", only,
                    "poisson|connection|curvature|killing:<form>|two-killing:<form>|weitzenbock:<form>|warped")
      ->take_all();
  add_common(check, check_opts);

  Common warp_opts;
  std::string base, fiber, f, eta1, eta2, verify;
  CLI::App* warp = app.add_subcommand("warp", "closed forms of a warped product of two manifests");
  warp->add_option("--base", base, "base manifest")->required()->check(CLI::ExistingFile);
  warp->add_option("--fiber", fiber, "fiber manifest")->required()->check(CLI::ExistingFile);
  warp->add_option("--f", f, "warping function in base coordinates")->required();
  warp->add_option("--eta1", eta1, "form name in the base manifest");
  warp->add_option("--eta2", eta2, "form name in the fiber manifest");
  warp->add_option("--verify", verify, "prop22,prop31,prop34,prop45,thm23,thm36,thm47,eq322");
  add_common(warp, warp_opts);

  Common r2_opts;
  pg::PlaneInputs plane;
  std::string r2_verify;
  CLI::App* r2 = app.add_subcommand("r2", "flat plane with identity cometric and Pi^{12} = pi");
  r2->add_option("--pi", plane.pi, "Pi^{12} in x1, x2")->required();
  r2->add_option("--eta", plane.eta, "\"e1,e2\"")->required();
  r2->add_option("--verify", r2_verify, "christoffel,thm48");
  add_common(r2, r2_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help and --version exit 0; every other parse problem is bad input
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*check) {
      pg::RunOptions o = options(check_opts);
      o.only = only;
      return emit(pg::run_checks(pg::load_manifest(manifest), o), check_opts);
    }
    if (*warp) {
      pg::WarpInputs in;
      in.base = pg::load_manifest(base);
      in.fiber = pg::load_manifest(fiber);
      in.f = f;
      in.eta1 = eta1;
      in.eta2 = eta2;
      in.verify = csv(verify);
      return emit(pg::run_warp(in, options(warp_opts)), warp_opts);
    }
    plane.verify = csv(r2_verify);
    return emit(pg::run_r2(plane, options(r2_opts)), r2_opts);
  } catch (const std::exception& e) {
    std::cerr << "pg: " << e.what() << "\n";
    return 2;
  }
}
