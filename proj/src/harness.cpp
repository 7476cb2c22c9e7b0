#include "surfops/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace surfops {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void write_row(std::ofstream& out, const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, args...);
  out << buf;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write report: " + path);
  return out;
}

const char* method_tag(Method m) { return m == Method::Gmls ? "gmls" : "rbffd"; }

}  // namespace

ErrorPair relative_errors(const Eigen::VectorXd& approx, const Eigen::VectorXd& exact) {
  if (approx.size() != exact.size())
    throw std::invalid_argument("relative_errors: length mismatch");
  if (exact.size() == 0) throw std::invalid_argument("relative_errors: empty input");
  const double exact_two = exact.norm();
  const double exact_max = exact.cwiseAbs().maxCoeff();
  if (!(exact_two > 0.0))
    throw std::invalid_argument("relative_errors: exact values are identically zero");
  const Eigen::VectorXd diff = approx - exact;
  return {diff.norm() / exact_two, diff.cwiseAbs().maxCoeff() / exact_max};
}

ErrorPair relative_errors(const Eigen::MatrixX3d& approx, const Eigen::MatrixX3d& exact) {
  if (approx.rows() != exact.rows())
    throw std::invalid_argument("relative_errors: length mismatch");
  Eigen::Map<const Eigen::VectorXd> a(approx.data(), approx.size());
  Eigen::Map<const Eigen::VectorXd> e(exact.data(), exact.size());
  return relative_errors(Eigen::VectorXd(a), Eigen::VectorXd(e));
}

double fit_order(const std::vector<double>& ns, const std::vector<double>& errors) {
  if (ns.size() != errors.size()) throw std::invalid_argument("fit_order: length mismatch");
  if (ns.size() < 3) throw std::invalid_argument("fit_order: need at least 3 levels");
  const size_t first = ns.size() - 3;
  double xs[3], ys[3];
  for (size_t k = 0; k < 3; ++k) {
    const double n = ns[first + k], e = errors[first + k];
    if (!(n > 0.0)) throw std::invalid_argument("fit_order: node counts must be positive");
    if (!(e > 0.0)) throw std::invalid_argument("fit_order: errors must be positive");
    xs[k] = -0.5 * std::log(n);  // log(N^{-1/2})
    ys[k] = std::log(e);
  }
  const double xbar = (xs[0] + xs[1] + xs[2]) / 3.0;
  const double ybar = (ys[0] + ys[1] + ys[2]) / 3.0;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < 3; ++k) {
    num += (xs[k] - xbar) * (ys[k] - ybar);
    den += (xs[k] - xbar) * (xs[k] - xbar);
  }
  if (!(den > 0.0)) throw std::invalid_argument("fit_order: degenerate node counts");
  return num / den;
}

CostEstimate cost_model(Method method, const std::vector<int>& stencil_sizes,
                        int basis_size) {
  CostEstimate cost;
  for (int n : stencil_sizes) {
    if (method == Method::Gmls) {
      cost.setup_flops += 2.0 * n * static_cast<double>(basis_size) * basis_size;
    } else {
      const double s = n + basis_size;
      cost.setup_flops += (2.0 / 3.0) * s * s * s;
    }
    cost.eval_flops += 2.0 * n;
  }
  return cost;
}

std::vector<int> default_level_sizes(NodeFamily family, bool full) {
  if (family == NodeFamily::Icosahedral)
    return full ? std::vector<int>{10242, 40962, 163842, 655362}
                : std::vector<int>{2562, 10242, 40962, 163842};
  return full ? std::vector<int>{8153, 32615, 130463, 521855}
              : std::vector<int>{2038, 8153, 32615, 130463};
}

PointCloud make_nodes(SurfaceKind surface, NodeFamily family, int n, std::uint64_t seed) {
  switch (family) {
    case NodeFamily::Icosahedral:
      if (surface != SurfaceKind::UnitSphere)
        throw std::invalid_argument("icosahedral nodes live on the sphere");
      return generate_icosahedral(icosahedral_level_for(n));
    case NodeFamily::Hammersley:
      if (surface != SurfaceKind::UnitSphere)
        throw std::invalid_argument("hammersley nodes live on the sphere");
      return generate_hammersley(n);
    case NodeFamily::PoissonDisk:
      if (surface != SurfaceKind::Torus)
        throw std::invalid_argument("poisson disk nodes live on the torus");
      return generate_poisson_torus(n, seed);
    default:
      throw std::invalid_argument("cannot generate a FromFile node family");
  }
}

TestField make_field(SurfaceKind surface, std::uint64_t seed) {
  return surface == SurfaceKind::UnitSphere ? TestField::sphere_gaussians(seed)
                                            : TestField::torus_polynomial();
}

namespace {

struct ApplyOutcome {
  ErrorPair errors;
  double apply_ms = 0.0;
};

ApplyOutcome apply_and_compare(const SurfaceOperator& op, const TestField& field,
                               const PointCloud& cloud) {
  ApplyOutcome out;
  const auto t0 = Clock::now();
  switch (op.kind) {
    case SdoKind::Gradient: {
      const Eigen::VectorXd u = sample_values(field, cloud);
      const Eigen::MatrixX3d approx = op.apply_gradient(u);
      out.apply_ms = ms_since(t0);
      out.errors = relative_errors(approx, sample_surface_gradient(field, cloud));
      break;
    }
    case SdoKind::Divergence: {
      const Eigen::MatrixX3d g = sample_surface_gradient(field, cloud);
      const Eigen::VectorXd approx = op.apply_divergence(g);
      out.apply_ms = ms_since(t0);
      out.errors = relative_errors(approx, sample_laplacian(field, cloud));
      break;
    }
    default: {
      const Eigen::VectorXd u = sample_values(field, cloud);
      const Eigen::VectorXd approx = op.apply(u);
      out.apply_ms = ms_since(t0);
      out.errors = relative_errors(approx, sample_laplacian(field, cloud));
      break;
    }
  }
  return out;
}

double average_stencil(const std::vector<int>& sizes) {
  double sum = 0.0;
  for (int n : sizes) sum += n;
  return sizes.empty() ? 0.0 : sum / static_cast<double>(sizes.size());
}

}  // namespace

ConvergenceReport run_convergence(SurfaceKind surface, NodeFamily family, Method method,
                                  SdoKind kind, int degree, double tau, TangentMode tangent,
                                  const std::vector<int>& level_sizes,
                                  const HarnessOptions& opts) {
  ConvergenceReport report;
  report.surface = surface;
  report.family = family;
  report.method = method;
  report.kind = kind;
  report.degree = degree;
  report.tau = tau;
  report.tangent = tangent;

  const SurfaceModel model(surface);
  const TestField field = make_field(surface, opts.seed);
  const int basis_size = default_initial_size(degree);

  OperatorParams params;
  params.method = method;
  params.kind = kind;
  params.degree = degree;
  params.tau = tau;
  params.tangent = tangent;
  params.threads = opts.threads;
  params.retry_tau = 3;  // a handful of symmetric stencils need the growth

  for (size_t level = 0; level < level_sizes.size(); ++level) {
    const auto t0 = Clock::now();
    const PointCloud cloud = make_nodes(surface, family, level_sizes[level], opts.seed);
    const SurfaceOperator op = build_operator(cloud, &model, params);
    const ApplyOutcome outcome = apply_and_compare(op, field, cloud);
    const CostEstimate cost = cost_model(method, op.stencil_sizes, basis_size);

    LevelResult row;
    row.level = static_cast<int>(level);
    row.n_nodes = cloud.size();
    row.err_l2 = outcome.errors.two_norm;
    row.err_max = outcome.errors.max_norm;
    row.setup_flops = cost.setup_flops;
    row.eval_flops = cost.eval_flops;
    row.wall_ms = opts.timing ? ms_since(t0) : 0.0;
    row.avg_stencil = average_stencil(op.stencil_sizes);
    report.levels.push_back(row);
  }

  if (report.levels.size() >= 3) {
    std::vector<double> ns, l2, mx;
    for (const auto& row : report.levels) {
      ns.push_back(row.n_nodes);
      l2.push_back(row.err_l2);
      mx.push_back(row.err_max);
    }
    report.beta_l2 = fit_order(ns, l2);
    report.beta_max = fit_order(ns, mx);
  } else {
    report.beta_l2 = report.beta_max = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

void write_convergence_csv(const ConvergenceReport& report, const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "level,N,err_l2,err_max,setup_flops,eval_flops,wall_ms,beta_l2,beta_max\n";
  for (const auto& row : report.levels) {
    write_row(out, "%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", row.level,
              row.n_nodes, row.err_l2, row.err_max, row.setup_flops, row.eval_flops,
              row.wall_ms, report.beta_l2, report.beta_max);
  }
}

double TauStudyReport::error_for(Method method, double tau) const {
  for (const auto& row : rows)
    if (row.method == method && row.tau == tau) return row.err_l2;
  throw std::invalid_argument("tau study: no row for requested method/tau");
}

TauStudyReport run_tau_study(int n_nodes, int degree, const std::vector<double>& taus,
                             const HarnessOptions& opts) {
  for (double tau : taus)
    if (tau < 1.5 || tau > 2.5)
      throw std::invalid_argument("tau study expects taus within [1.5, 2.5]");

  TauStudyReport report;
  report.n_nodes = n_nodes;
  report.degree = degree;

  const SurfaceModel model(SurfaceKind::Torus);
  const TestField field = TestField::torus_polynomial();
  const PointCloud cloud = generate_poisson_torus(n_nodes, opts.seed);
  const Eigen::VectorXd u = sample_values(field, cloud);
  const Eigen::VectorXd exact = sample_laplacian(field, cloud);

  for (double tau : taus) {
    for (Method method : {Method::Gmls, Method::Rbffd}) {
      OperatorParams params;
      params.method = method;
      params.kind = SdoKind::Laplacian;
      params.degree = degree;
      params.tau = tau;
      params.tangent = TangentMode::Approx;
      params.threads = opts.threads;
      params.retry_tau = 3;
      const SurfaceOperator op = build_operator(cloud, &model, params);
      const ErrorPair err = relative_errors(op.apply(u), exact);

      TauStudyRow row;
      row.tau = tau;
      row.method = method;
      row.n_nodes = cloud.size();
      row.err_l2 = err.two_norm;
      row.err_max = err.max_norm;
      row.avg_stencil = average_stencil(op.stencil_sizes);
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_tau_study_csv(const TauStudyReport& report, const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "tau,method,N,err_l2,err_max,avg_stencil\n";
  for (const auto& row : report.rows)
    write_row(out, "%.17g,%s,%d,%.17g,%.17g,%.17g\n", row.tau, method_tag(row.method),
              row.n_nodes, row.err_l2, row.err_max, row.avg_stencil);
}

TangentStudyReport run_tangent_study(int degree, const std::vector<int>& level_sizes,
                                     const HarnessOptions& opts) {
  TangentStudyReport report;
  report.degree = degree;

  const SurfaceModel model(SurfaceKind::Torus);
  const TestField field = TestField::torus_polynomial();

  for (size_t level = 0; level < level_sizes.size(); ++level) {
    const PointCloud cloud = generate_poisson_torus(level_sizes[level], opts.seed);
    const Eigen::VectorXd u = sample_values(field, cloud);
    const Eigen::VectorXd exact = sample_laplacian(field, cloud);

    for (Method method : {Method::Gmls, Method::Rbffd}) {
      TangentStudyRow row;
      row.level = static_cast<int>(level);
      row.n_nodes = cloud.size();
      row.method = method;
      for (TangentMode mode : {TangentMode::Exact, TangentMode::Approx}) {
        OperatorParams params;
        params.method = method;
        params.kind = SdoKind::Laplacian;
        params.degree = degree;
        params.tangent = mode;
        params.threads = opts.threads;
        params.retry_tau = 3;
        const SurfaceOperator op = build_operator(cloud, &model, params);
        const double err = relative_errors(op.apply(u), exact).two_norm;
        (mode == TangentMode::Exact ? row.err_exact_l2 : row.err_approx_l2) = err;
      }
      row.rel_difference =
          std::abs(row.err_exact_l2 - row.err_approx_l2) / row.err_exact_l2;
      report.rows.push_back(row);
    }
  }
  return report;
}

void write_tangent_study_csv(const TangentStudyReport& report, const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "level,N,method,err_exact_l2,err_approx_l2,rel_difference\n";
  for (const auto& row : report.rows)
    write_row(out, "%d,%d,%s,%.17g,%.17g,%.17g\n", row.level, row.n_nodes,
              method_tag(row.method), row.err_exact_l2, row.err_approx_l2,
              row.rel_difference);
}

EfficiencyReport run_efficiency(const std::vector<int>& degrees,
                                const std::vector<int>& level_sizes,
                                const HarnessOptions& opts) {
  EfficiencyReport report;
  const SurfaceModel model(SurfaceKind::Torus);
  const TestField field = TestField::torus_polynomial();

  for (size_t level = 0; level < level_sizes.size(); ++level) {
    const PointCloud cloud = generate_poisson_torus(level_sizes[level], opts.seed);
    const Eigen::VectorXd u = sample_values(field, cloud);
    const Eigen::VectorXd exact = sample_laplacian(field, cloud);

    for (int degree : degrees) {
      for (Method method : {Method::Gmls, Method::Rbffd}) {
        OperatorParams params;
        params.method = method;
        params.kind = SdoKind::Laplacian;
        params.degree = degree;
        params.tangent = TangentMode::Approx;
        params.threads = opts.threads;
        params.retry_tau = 3;

        const auto t0 = Clock::now();
        const SurfaceOperator op = build_operator(cloud, &model, params);
        const double build_ms = ms_since(t0);
        const auto t1 = Clock::now();
        const Eigen::VectorXd approx = op.apply(u);
        const double apply_ms = ms_since(t1);
        const CostEstimate cost =
            cost_model(method, op.stencil_sizes, default_initial_size(degree));

        EfficiencyRow row;
        row.method = method;
        row.degree = degree;
        row.level = static_cast<int>(level);
        row.n_nodes = cloud.size();
        row.err_l2 = relative_errors(approx, exact).two_norm;
        row.setup_flops = cost.setup_flops;
        row.eval_flops = cost.eval_flops;
        row.build_ms = opts.timing ? build_ms : 0.0;
        row.apply_ms = opts.timing ? apply_ms : 0.0;
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

void write_efficiency_csv(const EfficiencyReport& report, const std::string& path) {
  std::ofstream out = open_csv(path);
  out << "method,degree,level,N,err_l2,setup_flops,eval_flops,total_flops,build_ms,"
         "apply_ms\n";
  for (const auto& row : report.rows)
    write_row(out, "%s,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
              method_tag(row.method), row.degree, row.level, row.n_nodes, row.err_l2,
              row.setup_flops, row.eval_flops, row.setup_flops + row.eval_flops,
              row.build_ms, row.apply_ms);
}

}  // namespace surfops
