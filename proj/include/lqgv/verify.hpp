#pragma once

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lqgv/field.hpp"
#include "lqgv/measure.hpp"
#include "lqgv/metric.hpp"
#include "lqgv/stats.hpp"
#include "lqgv/tutte.hpp"
#include "lqgv/voronoi.hpp"
#include "lqgv/walk.hpp"

namespace lqgv {

// ---------------------------------------------------------------------------
// Reports

struct Estimate {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const Estimate&, const Estimate&) = default;
};

/// A declared tolerance: passes iff lo <= value <= hi.
struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
  friend bool operator==(const Check&, const Check&) = default;
};

struct ExperimentReport {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  std::size_t replicates = 0;
  std::size_t excluded = 0;
  std::size_t attempted = 0;
  std::vector<Estimate> estimates;
  std::vector<Check> checks;
  RngSeed seed;
  bool pass = false;
  double wall_seconds = 0.0;

  void estimate(std::string n, double value, double lo, double hi);
  void estimate(std::string n, const stats::Interval& i) { estimate(std::move(n), i.estimate, i.lo, i.hi); }
  void check(std::string n, double value, double lo, double hi);
  /// Recomputes `pass` from the checks and the exclusion rate (at most 10%).
  void finalize();
  const Check* find_check(const std::string& n) const;
  const Estimate* find_estimate(const std::string& n) const;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// JSON with sorted keys. Wall-clock time is included only on request, so
/// reports hashed for reproducibility stay deterministic.
nlohmann::json to_json(const ExperimentReport& r, bool include_timing = false);
ExperimentReport report_from_json(const nlohmann::json& j);
std::string dump_report(const ExperimentReport& r, bool include_timing = false);

// ---------------------------------------------------------------------------
// Field ensembles

enum class FieldModel : std::uint8_t { Uniform, WhiteNoise, Truncated, ZeroBoundary };

std::string to_string(FieldModel m);
FieldModel field_model_from_string(const std::string& s);

struct FieldSpec {
  FieldModel model = FieldModel::WhiteNoise;
  std::size_t n = 128;
  double side = 1.0;
  Topology topology = Topology::PlaneWindow;
  /// Fine cutoff in units of the mesh (white-noise and truncated models).
  double t_min_mesh = 2.0;
  /// Log singularity of this strength at the window centre (0: none).
  double alpha = 0.0;
  /// Constant added to the field.
  double shift = 0.0;

  Grid grid() const { return Grid(n, side, topology); }
  nlohmann::json to_json() const;
};

/// Samples fields of one spec; sampler set-up is paid once per ensemble.
class FieldFactory {
 public:
  explicit FieldFactory(const FieldSpec& spec);
  ~FieldFactory();
  FieldFactory(FieldFactory&&) noexcept;
  Field sample(RngSeed seed) const;
  const FieldSpec& spec() const { return spec_; }
  const Grid& grid() const { return grid_; }

 private:
  FieldSpec spec_;
  Grid grid_;
  std::unique_ptr<WhiteNoiseSampler> wn_;
  std::unique_ptr<TruncatedSampler> tr_;
};

/// A tessellated domain: the whole window (torus or plane), or the disk of
/// radius side/2 about the window centre. The measure is restricted to the
/// domain and normalised to total mass 1, so lambda is the expected cell count.
struct Instance {
  Field field;
  std::optional<Disk> disk;
  AreaMeasure measure;
  MetricGraph graph;
  Tessellation tess;
};

struct InstanceSpec {
  FieldSpec field;
  bool disk = false;
  double lambda = 50.0;
  /// If nonzero, exactly this many points instead of a Poisson count.
  std::size_t fixed_points = 0;
};

Instance make_instance(const FieldFactory& factory, const InstanceSpec& spec, RngSeed seed);
Instance make_instance(const Field& f, const InstanceSpec& spec, RngSeed seed);

/// z0: owner cell of a vertex drawn from the measure (redrawn while it lands
/// in a boundary cell). x0: a uniformly chosen boundary cell.
std::pair<CellId, CellId> marked_cells(const Instance& inst, RngSeed seed);

// ---------------------------------------------------------------------------
// Experiments. Every experiment is a pure function of its parameters and seed;
// `threads` only changes wall time.

struct VarianceLawParams {
  std::size_t n = 256;
  double side = 1.0;
  double t = 0.05;
  double t_tilde = 0.2;
  std::size_t seeds = 400;
};
ExperimentReport variance_law(const VarianceLawParams& p, RngSeed seed, unsigned threads);

struct ScalingParams {
  FieldSpec field{FieldModel::WhiteNoise, 128};
  std::vector<double> shifts{-1.0, 0.37, 2.5};
  std::size_t sources = 4;
  std::size_t points = 40;
};
ExperimentReport scaling_covariance(const ScalingParams& p, RngSeed seed, unsigned threads);

struct VolumeParams {
  FieldSpec field{FieldModel::WhiteNoise, 512, 1.0, Topology::PlaneWindow, 1.0};
  std::size_t replicates = 100;
  std::size_t centers = 4;
  std::size_t radii = 5;
  double octaves = 2.0;
  /// Largest radius as a fraction of the centre's distance to the window edge.
  double reach = 0.8;
  /// Centres are drawn from the central square of this relative width.
  double center_box = 0.5;
  double slope_lo = 3.0;
  double slope_hi = 5.0;
};
ExperimentReport volume_exponent(const VolumeParams& p, RngSeed seed, unsigned threads);

struct AnnulusParams {
  FieldSpec field{FieldModel::WhiteNoise, 128};
  double rho = 0.25;
  std::size_t replicates = 1000;
};
/// Distance from the Euclidean ball B(centre, rho * side) to the boundary of
/// the inscribed disk of radius side/2.
ExperimentReport annulus_crossing(const AnnulusParams& p, RngSeed seed, unsigned threads);

/// Largest inscribed Euclidean radius and diameter of a vertex set, each
/// vertex taken as its closed mesh square.
struct SwallowShape {
  double inscribed = 0.0;
  double diameter = 0.0;
  double ratio() const { return diameter > 0.0 ? inscribed / diameter : 0.0; }
};
SwallowShape swallow_shape(const Grid& grid, std::span<const VertexId> members, VertexId anchor);

struct SwallowParams {
  InstanceSpec instance{{FieldModel::WhiteNoise, 512}, false, 400.0};
  std::size_t replicates = 200;
  std::size_t min_vertices = 9;
  /// Cells are used when their centre lies in the central square of this
  /// relative width (plane windows).
  double center_box = 0.5;
  double quantile = 0.01;
  double floor = 0.02;
};
ExperimentReport swallow_statistic(const SwallowParams& p, RngSeed seed, unsigned threads);

struct MassTransportParams {
  InstanceSpec instance{{FieldModel::WhiteNoise, 128, 1.0, Topology::Torus}, false, 40.0};
  std::size_t replicates = 500;
};
ExperimentReport mass_transport(const MassTransportParams& p, RngSeed seed, unsigned threads);

struct MomentTailParams {
  InstanceSpec instance{{FieldModel::WhiteNoise, 128, 1.0, Topology::Torus}, false, 40.0};
  std::size_t replicates = 500;
  double stabilization = 0.2;
};
ExperimentReport moment_tail(const MomentTailParams& p, RngSeed seed, unsigned threads);

struct TutteParams {
  FieldSpec field{FieldModel::ZeroBoundary, 64};
  std::size_t cells = 30;
  std::size_t monte_carlo_walks = 1000000;
  /// Further disk instances (and their lambdas) checked for the contracts.
  std::vector<double> lambdas{30.0, 100.0, 300.0};
  std::size_t instances = 10;
  std::size_t instance_n = 128;
  double tol = 1e-10;
};
ExperimentReport tutte_contracts(const TutteParams& p, RngSeed seed, unsigned threads);

struct ConvergenceParams {
  FieldSpec field{FieldModel::ZeroBoundary, 256};
  std::vector<double> lambdas{50.0, 200.0, 800.0};
  std::size_t replicates = 50;
  std::size_t walks = 10000;
  std::size_t frechet_walks = 10;
  double dt = 1e-3;
  std::size_t max_steps = 1000000;
  double tol = 1e-10;
  /// Also assert KS < ks_ceiling at the largest lambda when > 0.
  double ks_ceiling = 0.0;
};
ExperimentReport walk_convergence(const ConvergenceParams& p, RngSeed seed, unsigned threads);

struct IsotropyParams {
  InstanceSpec instance{{FieldModel::WhiteNoise, 128, 1.0, Topology::Torus}, false, 200.0};
  std::size_t replicates = 500;
  std::size_t increments = 100000;
};
ExperimentReport isotropy(const IsotropyParams& p, RngSeed seed, unsigned threads);

struct BallDiameterParams {
  FieldSpec field{FieldModel::WhiteNoise, 512};
  std::size_t replicates = 20;
  std::size_t centers = 16;
  std::vector<double> eps{};  // empty: three radii over two octaves, chosen from the ensemble
};
ExperimentReport min_max_ball_diam(const BallDiameterParams& p, RngSeed seed, unsigned threads);

struct EuclideanParams {
  std::size_t voronoi_n = 64;
  std::size_t voronoi_instances = 5;
  std::size_t volume_n = 512;
  std::size_t walk_n = 512;
  double walk_lambda = 8000.0;
  std::size_t walks = 10000;
  double slope_tolerance = 0.15;
  double ks_ceiling = 0.08;
};
ExperimentReport euclidean_suite(const EuclideanParams& p, RngSeed seed, unsigned threads);

}  // namespace lqgv
