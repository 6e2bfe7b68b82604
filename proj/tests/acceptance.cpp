// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Usage: acceptance [--only AC4[,AC7...]] [--verbose]

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lqgv/cli/run.hpp"
#include "lqgv/verify.hpp"

using namespace lqgv;
namespace fs = std::filesystem;

namespace {

// One master seed for every criterion.
constexpr RngSeed kSeed{1, 0};
constexpr unsigned kThreads = 1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

bool g_verbose = false;

void dump_checks(const ExperimentReport& r) {
  if (!g_verbose) return;
  for (const auto& c : r.checks) {
    std::cout << "    " << (c.pass ? "ok   " : "FAIL ") << r.name << "." << c.name << " = " << c.value << " in ["
              << c.lo << ", " << c.hi << "]\n";
  }
  for (const auto& e : r.estimates) {
    std::cout << "    est  " << r.name << "." << e.name << " = " << e.value << " [" << e.lo << ", " << e.hi << "]\n";
  }
  std::cout << "    excluded " << r.excluded << " / " << r.attempted << "\n";
}

// The report's own check must exist with exactly the pinned bounds.
bool pinned(const ExperimentReport& r, const std::string& name, double lo, double hi) {
  const Check* c = r.find_check(name);
  if (c == nullptr) {
    std::cout << "    missing check " << r.name << "." << name << "\n";
    return false;
  }
  if (c->lo != lo || c->hi != hi) {
    std::cout << "    check " << r.name << "." << name << " has bounds [" << c->lo << ", " << c->hi
              << "], expected [" << lo << ", " << hi << "]\n";
    return false;
  }
  return c->pass;
}

double check_value(const ExperimentReport& r, const std::string& name) {
  const Check* c = r.find_check(name);
  return c ? c->value : std::nan("");
}

double estimate_value(const ExperimentReport& r, const std::string& name) {
  const Estimate* e = r.find_estimate(name);
  return e ? e->value : std::nan("");
}

std::string fmt(double x, int digits = 4) {
  std::ostringstream s;
  s << std::setprecision(digits) << x;
  return s.str();
}

Outcome ac1() {
  VarianceLawParams p;
  p.n = 256;
  p.t = 0.05;
  p.t_tilde = 0.2;
  p.seeds = 400;
  const auto r = variance_law(p, kSeed, kThreads);
  dump_checks(r);
  const bool ok = r.pass && pinned(r, "variance_z", -3.0, 3.0);
  return {ok, "var=" + fmt(estimate_value(r, "variance")) + " vs log 4, z=" + fmt(check_value(r, "variance_z"), 3)};
}

Outcome ac2() {
  ScalingParams p;
  p.field = FieldSpec{FieldModel::WhiteNoise, 128};
  const auto r = scaling_covariance(p, kSeed, kThreads);
  dump_checks(r);
  const bool ok = r.pass && pinned(r, "mass_relative_error", 0.0, 1e-12) &&
                  pinned(r, "distance_relative_error", 0.0, 1e-12);
  return {ok, "mass err=" + fmt(check_value(r, "mass_relative_error"), 2) +
                  ", distance err=" + fmt(check_value(r, "distance_relative_error"), 2)};
}

Outcome ac3() {
  EuclideanParams p;
  p.slope_tolerance = 0.15;
  p.ks_ceiling = 0.08;
  p.walks = 10000;
  const auto r = euclidean_suite(p, kSeed, kThreads);
  dump_checks(r);
  const bool ok = r.pass && pinned(r, "voronoi_mismatches", 0.0, 0.0) && pinned(r, "volume_slope", 1.85, 2.15) &&
                  pinned(r, "exit_angle_ks", 0.0, 0.08);
  return {ok, "mismatches=" + fmt(check_value(r, "voronoi_mismatches")) + ", slope=" +
                  fmt(check_value(r, "volume_slope")) + ", ks=" + fmt(check_value(r, "exit_angle_ks"), 3)};
}

Outcome ac4() {
  VolumeParams p;
  p.field.n = 512;
  p.replicates = 100;
  p.octaves = 2.0;
  p.slope_lo = 3.0;
  p.slope_hi = 5.0;
  const auto r = volume_exponent(p, kSeed, kThreads);
  dump_checks(r);
  const bool ok = r.pass && pinned(r, "slope", 3.0, 5.0);
  return {ok, "slope=" + fmt(check_value(r, "slope")) + ", excluded " + std::to_string(r.excluded) + "/" +
                  std::to_string(r.attempted)};
}

Outcome ac5() {
  AnnulusParams a;
  a.replicates = 1000;
  const auto ra = annulus_crossing(a, kSeed, kThreads);
  dump_checks(ra);
  SwallowParams s;
  s.replicates = 200;
  s.quantile = 0.01;
  s.floor = 0.02;
  const auto rs = swallow_statistic(s, kSeed, kThreads);
  dump_checks(rs);
  const bool ok = ra.pass && rs.pass && ra.replicates == 1000 && ra.excluded == 0 &&
                  check_value(ra, "min_distance") > 0.0 && check_value(rs, "quantile_ratio") > 0.02;
  return {ok, "min crossing=" + fmt(check_value(ra, "min_distance")) + ", q0.01 ratio=" +
                  fmt(check_value(rs, "quantile_ratio")) + ", swallow excluded " + std::to_string(rs.excluded) +
                  "/" + std::to_string(rs.attempted)};
}

Outcome ac6() {
  MassTransportParams lqg;
  lqg.replicates = 500;
  MassTransportParams flat = lqg;
  flat.instance.field.model = FieldModel::Uniform;
  const auto rl = mass_transport(lqg, kSeed, kThreads);
  dump_checks(rl);
  const auto ru = mass_transport(flat, kSeed, kThreads);
  dump_checks(ru);
  const bool ok = rl.pass && ru.pass && check_value(rl, "ci_gap") <= 0.0 && check_value(ru, "ci_gap") <= 0.0;
  auto sides = [](const ExperimentReport& r) {
    return fmt(estimate_value(r, "lhs")) + "/" + fmt(estimate_value(r, "rhs"));
  };
  return {ok, "uniform lhs/rhs=" + sides(ru) + ", lqg lhs/rhs=" + sides(rl)};
}

Outcome ac7() {
  TutteParams p;
  p.cells = 30;
  p.monte_carlo_walks = 1000000;
  p.tol = 1e-10;
  const auto r = tutte_contracts(p, kSeed, kThreads);
  dump_checks(r);
  const bool ok = r.pass && pinned(r, "max_residual", 0.0, 1e-10) && pinned(r, "hitting_sum_error", 0.0, 1e-10) &&
                  pinned(r, "monte_carlo_max_z", 0.0, 3.0) && pinned(r, "maximum_principle_failures", 0.0, 0.0);
  return {ok, "residual=" + fmt(check_value(r, "max_residual"), 2) + ", mc max z=" +
                  fmt(check_value(r, "monte_carlo_max_z"), 3)};
}

Outcome ac8() {
  ConvergenceParams p;
  p.lambdas = {50.0, 200.0, 800.0};
  p.replicates = 50;
  const auto r = walk_convergence(p, kSeed, kThreads);
  dump_checks(r);
  std::ostringstream d;
  d << "ks medians";
  for (double l : p.lambdas) {
    std::ostringstream tag;
    tag << "lambda_" << l;
    d << " " << fmt(estimate_value(r, "ks_median_" + tag.str()), 3);
  }
  d << ", displacement medians";
  for (double l : p.lambdas) {
    std::ostringstream tag;
    tag << "lambda_" << l;
    d << " " << fmt(estimate_value(r, "displacement_median_" + tag.str()), 3);
  }
  return {r.pass, d.str()};
}

Outcome ac9() {
  IsotropyParams p;
  p.increments = 100000;
  const auto r = isotropy(p, kSeed, kThreads);
  dump_checks(r);
  const bool ok = r.pass && pinned(r, "offdiag_ratio", 0.0, 0.05) && pinned(r, "diag_ratio", 0.9, 1.1) &&
                  estimate_value(r, "increments") >= 100000.0;
  return {ok, "offdiag=" + fmt(check_value(r, "offdiag_ratio"), 3) + ", diag=" + fmt(check_value(r, "diag_ratio"), 4)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome ac10() {
  const fs::path root = fs::temp_directory_path() / "lqgv_acceptance_ac10";
  fs::remove_all(root);
  std::ostringstream sink;
  bool ok = true;
  std::size_t compared = 0;
  const std::vector<std::string> configs{
      "mode = verify\nsuite = scaling\nseed = 5\n",
      "mode = verify\nsuite = euclidean\nseed = 5\n",
      "mode = simulate\nn = 128\nlambda = 40\nwalks = 4\nseed = 5\n",
      "mode = tutte\nfield = zero-boundary\nn = 128\npoints = 60\nseed = 5\n",
  };
  for (std::size_t k = 0; k < configs.size(); ++k) {
    std::istringstream in(configs[k]);
    cli::RunConfig c = cli::parse_config(in, "ac10");
    std::string first;
    for (unsigned run = 0; run < 3; ++run) {
      c.out = root / (std::to_string(k) + "_" + std::to_string(run));
      c.threads = run == 2 ? 2 : 1;
      if (cli::run(c, sink, sink) != cli::kStatusOk) ok = false;
      const std::string m = slurp(c.out / "manifest.txt");
      if (m.empty()) ok = false;
      if (run == 0) {
        first = m;
      } else {
        ok = ok && m == first;
        ++compared;
      }
    }
  }
  fs::remove_all(root);
  return {ok, std::to_string(compared) + " manifest comparisons over " + std::to_string(configs.size()) +
                  " configs (reruns and 1 vs 2 threads)"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::string> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--verbose") {
      g_verbose = true;
    } else if (a == "--only" && i + 1 < argc) {
      std::stringstream list(argv[++i]);
      std::string item;
      while (std::getline(list, item, ',')) only.insert(item);
    } else {
      std::cerr << "usage: acceptance [--only AC1,AC2,...] [--verbose]\n";
      return 2;
    }
  }

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    if (!only.empty() && !only.contains(name)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << name << (name.size() < 4 ? "  " : " ") << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << "  ("
              << std::fixed << std::setprecision(1) << secs << " s)" << std::endl;
    std::cout.unsetf(std::ios::fixed);
  }
  return failures == 0 ? 0 : 1;
}
