#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "surfops/operators.hpp"

namespace surfops {

struct ErrorPair {
  double two_norm = 0.0;
  double max_norm = 0.0;
};

// Relative two- and max-norm errors; vector fields are flattened
// componentwise. The exact values must not be identically zero.
ErrorPair relative_errors(const Eigen::VectorXd& approx, const Eigen::VectorXd& exact);
ErrorPair relative_errors(const Eigen::MatrixX3d& approx, const Eigen::MatrixX3d& exact);

// Convergence order beta: least-squares slope of log(err) against
// log(N^{-1/2}) over the last three levels (err ~ O(N^{-beta/2})).
double fit_order(const std::vector<double>& ns, const std::vector<double>& errors);

struct CostEstimate {
  double setup_flops = 0.0;
  double eval_flops = 0.0;
};

// Leading-order flop model: GMLS setup 2*sum n_i L^2 (QR), RBF-FD setup
// (2/3)*sum (n_i+L)^3 (LU); evaluation 2*sum n_i for both.
CostEstimate cost_model(Method method, const std::vector<int>& stencil_sizes, int basis_size);

struct HarnessOptions {
  std::uint64_t seed = 42;
  int threads = 1;
  bool full = false;        // full-scale node counts instead of desk scale
  bool timing = true;       // when false, wall_ms is reported as 0 (reproducible CSVs)
  std::string out_dir;      // reports written here when nonempty
  bool svg = false;         // also emit log-log SVG plots
};

// Node counts per refinement level. Desk scale keeps runs in seconds;
// --full adds one more refinement level on top.
std::vector<int> default_level_sizes(NodeFamily family, bool full);

PointCloud make_nodes(SurfaceKind surface, NodeFamily family, int n, std::uint64_t seed);
TestField make_field(SurfaceKind surface, std::uint64_t seed);

struct LevelResult {
  int level = 0;
  int n_nodes = 0;
  double err_l2 = 0.0, err_max = 0.0;
  double setup_flops = 0.0, eval_flops = 0.0;
  double wall_ms = 0.0;
  double avg_stencil = 0.0;
};

struct ConvergenceReport {
  SurfaceKind surface;
  NodeFamily family;
  Method method;
  SdoKind kind;
  int degree = 4;
  double tau = 1.5;
  TangentMode tangent = TangentMode::Approx;
  std::vector<LevelResult> levels;
  double beta_l2 = 0.0, beta_max = 0.0;
};

// Builds nodes and operators per level, applies them to the test data
// (field samples for gradient/Laplacian, exact gradient field for
// divergence), and fits the convergence orders.
ConvergenceReport run_convergence(SurfaceKind surface, NodeFamily family, Method method,
                                  SdoKind kind, int degree, double tau, TangentMode tangent,
                                  const std::vector<int>& level_sizes,
                                  const HarnessOptions& opts);

void write_convergence_csv(const ConvergenceReport& report, const std::string& path);

struct TauStudyRow {
  double tau = 0.0;
  Method method;
  int n_nodes = 0;
  double err_l2 = 0.0, err_max = 0.0;
  double avg_stencil = 0.0;
};

struct TauStudyReport {
  int n_nodes = 0;
  int degree = 4;
  std::vector<TauStudyRow> rows;

  double error_for(Method method, double tau) const;
};

// Fixed torus node set, surface Laplacian for both methods as the radius
// factor varies over [1.5, 2.5].
TauStudyReport run_tau_study(int n_nodes, int degree, const std::vector<double>& taus,
                             const HarnessOptions& opts);
void write_tau_study_csv(const TauStudyReport& report, const std::string& path);

struct TangentStudyRow {
  int level = 0;
  int n_nodes = 0;
  Method method;
  double err_exact_l2 = 0.0;
  double err_approx_l2 = 0.0;
  double rel_difference = 0.0;  // |exact - approx| / exact
};

struct TangentStudyReport {
  int degree = 4;
  std::vector<TangentStudyRow> rows;
};

// Torus Laplacian with exact vs. refined tangent frames per level.
TangentStudyReport run_tangent_study(int degree, const std::vector<int>& level_sizes,
                                     const HarnessOptions& opts);
void write_tangent_study_csv(const TangentStudyReport& report, const std::string& path);

struct EfficiencyRow {
  Method method;
  int degree = 0;
  int level = 0;
  int n_nodes = 0;
  double err_l2 = 0.0;
  double setup_flops = 0.0, eval_flops = 0.0;
  double build_ms = 0.0, apply_ms = 0.0;
};

struct EfficiencyReport {
  std::vector<EfficiencyRow> rows;
};

// Accuracy per cost for the torus Laplacian: model flops and measured wall
// time, with and without setup.
EfficiencyReport run_efficiency(const std::vector<int>& degrees,
                                const std::vector<int>& level_sizes,
                                const HarnessOptions& opts);
void write_efficiency_csv(const EfficiencyReport& report, const std::string& path);

// Log-log error plot with reference slope guides (cosmetic; CSVs are the
// contract).
struct PlotSeries {
  std::string label;
  std::vector<double> x, y;
};
void write_loglog_svg(const std::vector<PlotSeries>& series, const std::string& x_label,
                      const std::string& y_label, const std::vector<double>& guide_slopes,
                      const std::string& path);

}  // namespace surfops
