// Command line driver: node generation, operator assembly and application,
// and the convergence / tau / tangent / efficiency experiments.
#include <cstdio>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "surfops/errors.hpp"
#include "surfops/harness.hpp"
#include "surfops/operators.hpp"

namespace {

using namespace surfops;

SurfaceKind parse_surface(const std::string& s) {
  if (s == "sphere") return SurfaceKind::UnitSphere;
  if (s == "torus") return SurfaceKind::Torus;
  throw CLI::ValidationError("--surface", "expected sphere or torus");
}

NodeFamily parse_family(const std::string& s) {
  if (s == "icosahedral") return NodeFamily::Icosahedral;
  if (s == "hammersley") return NodeFamily::Hammersley;
  if (s == "poisson") return NodeFamily::PoissonDisk;
  throw CLI::ValidationError("--family", "expected icosahedral, hammersley or poisson");
}

Method parse_method(const std::string& s) {
  if (s == "gmls") return Method::Gmls;
  if (s == "rbffd") return Method::Rbffd;
  throw CLI::ValidationError("--method", "expected gmls or rbffd");
}

SdoKind parse_op(const std::string& s) {
  if (s == "grad") return SdoKind::Gradient;
  if (s == "div") return SdoKind::Divergence;
  if (s == "lap") return SdoKind::Laplacian;
  throw CLI::ValidationError("--op", "expected grad, div or lap");
}

TangentMode parse_tangent(const std::string& s) {
  if (s == "exact") return TangentMode::Exact;
  if (s == "approx") return TangentMode::Approx;
  throw CLI::ValidationError("--tangent", "expected exact or approx");
}

const char* method_tag(Method m) { return m == Method::Gmls ? "gmls" : "rbffd"; }
const char* op_tag(SdoKind k) {
  switch (k) {
    case SdoKind::Gradient: return "grad";
    case SdoKind::Divergence: return "div";
    default: return "lap";
  }
}
const char* surface_tag(SurfaceKind s) {
  return s == SurfaceKind::UnitSphere ? "sphere" : "torus";
}
const char* family_tag(NodeFamily f) {
  switch (f) {
    case NodeFamily::Icosahedral: return "icosahedral";
    case NodeFamily::Hammersley: return "hammersley";
    case NodeFamily::PoissonDisk: return "poisson";
    default: return "file";
  }
}

std::string out_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

// Expected beta band for the sphere convergence experiments, when one is
// defined for the configuration.
bool beta_band(SurfaceKind surface, NodeFamily family, SdoKind kind, int degree,
               double* lo, double* hi) {
  if (surface != SurfaceKind::UnitSphere || (degree != 2 && degree != 4)) return false;
  if (kind == SdoKind::Gradient || kind == SdoKind::Divergence) {
    *lo = degree - 0.7;
    *hi = degree + 0.9;
    return true;
  }
  if (family == NodeFamily::Hammersley) {  // Laplacian
    *lo = degree - 1.7;
    *hi = degree - 0.2;
    return true;
  }
  return false;
}

struct GlobalOptions {
  std::uint64_t seed = 42;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  bool full = false;
  bool check = false;
  bool svg = false;
  bool no_timing = false;
  std::string out_dir;

  HarnessOptions harness() const {
    HarnessOptions opts;
    opts.seed = seed;
    opts.threads = threads > 0 ? threads : 1;
    opts.full = full;
    opts.timing = !no_timing;
    opts.out_dir = out_dir;
    opts.svg = svg;
    return opts;
  }
};

int run_gen_nodes(const std::string& surface_s, const std::string& family_s, int n,
                  const GlobalOptions& global, const std::string& out) {
  const SurfaceKind surface = parse_surface(surface_s);
  const NodeFamily family = parse_family(family_s);
  PointCloud cloud = make_nodes(surface, family, n, global.seed);
  save_nodes(cloud, out);
  std::printf("wrote %d nodes to %s\n", cloud.size(), out.c_str());
  return 0;
}

int run_build_op(const std::string& nodes, const std::string& surface_s,
                 const std::string& method_s, const std::string& op_s, int degree,
                 double tau, int kappa, int m, const std::string& tangent_s,
                 int tangent_iters, int retry_tau, const GlobalOptions& global,
                 const std::string& out) {
  PointCloud cloud = load_nodes(nodes);
  const SurfaceModel surface(parse_surface(surface_s));

  OperatorParams params;
  params.method = parse_method(method_s);
  params.kind = parse_op(op_s);
  params.degree = degree;
  params.tau = tau;
  params.kappa = kappa;
  params.kernel_exponent = m;
  params.tangent = parse_tangent(tangent_s);
  params.tangent_iters = tangent_iters;
  params.retry_tau = retry_tau;
  params.threads = global.threads;

  SurfaceOperator op = build_operator(cloud, &surface, params);
  export_operator(op, out);
  long long nnz = 0;
  for (int n_i : op.stencil_sizes) nnz += n_i;
  std::printf("built %s %s operator on %d nodes (avg stencil %.1f), wrote %s\n",
              method_tag(params.method), op_tag(params.kind), op.size(),
              static_cast<double>(nnz) / op.size(), out.c_str());
  return 0;
}

int run_apply(const std::string& op_file, const std::string& in,
              const std::string& out) {
  SurfaceOperator op = import_operator(op_file);
  switch (op.kind) {
    case SdoKind::Gradient:
      save_vector_values(op.apply_gradient(load_scalar_values(in)), out);
      break;
    case SdoKind::Divergence:
      save_scalar_values(op.apply_divergence(load_vector_values(in)), out);
      break;
    default:
      save_scalar_values(op.apply(load_scalar_values(in)), out);
      break;
  }
  std::printf("applied %s operator to %s, wrote %s\n", op_tag(op.kind), in.c_str(),
              out.c_str());
  return 0;
}

int run_convergence_cmd(const std::string& surface_s, const std::string& family_s,
                        const std::string& method_s, const std::string& op_s, int degree,
                        double tau, const std::string& tangent_s,
                        std::vector<int> sizes, const GlobalOptions& global) {
  const SurfaceKind surface = parse_surface(surface_s);
  const NodeFamily family = parse_family(family_s);
  const Method method = parse_method(method_s);
  const SdoKind kind = parse_op(op_s);
  if (sizes.empty()) sizes = default_level_sizes(family, global.full);

  const HarnessOptions opts = global.harness();
  ConvergenceReport report = run_convergence(surface, family, method, kind, degree, tau,
                                             parse_tangent(tangent_s), sizes, opts);

  char name[160];
  std::snprintf(name, sizeof(name), "convergence_%s_%s_%s_%s_l%d.csv",
                surface_tag(surface), family_tag(family), method_tag(method),
                op_tag(kind), degree);
  const std::string csv = out_path(global.out_dir, name);
  write_convergence_csv(report, csv);

  for (const auto& row : report.levels)
    std::printf("level %d  N %7d  err_l2 %.4e  err_max %.4e\n", row.level, row.n_nodes,
                row.err_l2, row.err_max);
  std::printf("beta_l2 %.3f  beta_max %.3f  -> %s\n", report.beta_l2, report.beta_max,
              csv.c_str());

  if (opts.svg) {
    PlotSeries series{std::string(method_tag(method)) + " l=" + std::to_string(degree),
                      {}, {}};
    for (const auto& row : report.levels) {
      series.x.push_back(row.n_nodes);
      series.y.push_back(row.err_l2);
    }
    std::snprintf(name, sizeof(name), "convergence_%s_%s_%s_%s_l%d.svg",
                  surface_tag(surface), family_tag(family), method_tag(method),
                  op_tag(kind), degree);
    write_loglog_svg({series}, "N", "relative two-norm error",
                     {-degree / 2.0, -(degree - 1) / 2.0},
                     out_path(global.out_dir, name));
  }

  if (global.check) {
    double lo = 0, hi = 0;
    if (!beta_band(surface, family, kind, degree, &lo, &hi)) {
      std::printf("check: no acceptance band defined for this configuration\n");
      return 0;
    }
    const bool ok = report.beta_l2 >= lo && report.beta_l2 <= hi;
    std::printf("check: beta_l2 %.3f within [%.2f, %.2f]: %s\n", report.beta_l2, lo, hi,
                ok ? "pass" : "FAIL");
    return ok ? 0 : 1;
  }
  return 0;
}

int run_tau_study_cmd(int n, int degree, std::vector<double> taus,
                      const GlobalOptions& global) {
  if (taus.empty()) taus = {1.5, 1.75, 2.0, 2.25, 2.5};
  const HarnessOptions opts = global.harness();
  TauStudyReport report = run_tau_study(n, degree, taus, opts);
  const std::string csv = out_path(global.out_dir, "tau_study.csv");
  write_tau_study_csv(report, csv);
  for (const auto& row : report.rows)
    std::printf("tau %.2f  %-5s  err_l2 %.4e  avg stencil %.1f\n", row.tau,
                method_tag(row.method), row.err_l2, row.avg_stencil);
  std::printf("-> %s\n", csv.c_str());

  if (global.check) {
    const double lo = taus.front(), hi = taus.back();
    const bool rbffd_ok =
        report.error_for(Method::Rbffd, hi) < report.error_for(Method::Rbffd, lo);
    const bool gmls_ok =
        report.error_for(Method::Gmls, hi) > report.error_for(Method::Gmls, lo);
    std::printf("check: rbffd error decreases with tau: %s\n", rbffd_ok ? "pass" : "FAIL");
    std::printf("check: gmls error increases with tau: %s\n", gmls_ok ? "pass" : "FAIL");
    return rbffd_ok && gmls_ok ? 0 : 1;
  }
  return 0;
}

int run_tangent_study_cmd(int degree, std::vector<int> sizes, const GlobalOptions& global) {
  if (sizes.empty()) {
    sizes = default_level_sizes(NodeFamily::PoissonDisk, global.full);
    sizes.pop_back();  // keep the two-mode build affordable by default
  }
  const HarnessOptions opts = global.harness();
  TangentStudyReport report = run_tangent_study(degree, sizes, opts);
  const std::string csv = out_path(global.out_dir, "tangent_study.csv");
  write_tangent_study_csv(report, csv);
  for (const auto& row : report.rows)
    std::printf("N %7d  %-5s  exact %.4e  approx %.4e  rel diff %.2e\n", row.n_nodes,
                method_tag(row.method), row.err_exact_l2, row.err_approx_l2,
                row.rel_difference);
  std::printf("-> %s\n", csv.c_str());

  if (global.check) {
    bool ok = true;
    for (const auto& row : report.rows) ok = ok && row.rel_difference <= 1e-2;
    std::printf("check: exact vs approx tangent differences <= 1%%: %s\n",
                ok ? "pass" : "FAIL");
    return ok ? 0 : 1;
  }
  return 0;
}

int run_efficiency_cmd(std::vector<int> degrees, std::vector<int> sizes,
                       const GlobalOptions& global) {
  if (degrees.empty()) degrees = {2, 4};
  if (sizes.empty()) {
    sizes = default_level_sizes(NodeFamily::PoissonDisk, global.full);
    sizes.pop_back();
  }
  const HarnessOptions opts = global.harness();
  EfficiencyReport report = run_efficiency(degrees, sizes, opts);
  const std::string csv = out_path(global.out_dir, "efficiency.csv");
  write_efficiency_csv(report, csv);
  for (const auto& row : report.rows)
    std::printf("%-5s l=%d  N %7d  err %.4e  setup %.3e  eval %.3e flops\n",
                method_tag(row.method), row.degree, row.n_nodes, row.err_l2,
                row.setup_flops, row.eval_flops);
  std::printf("-> %s\n", csv.c_str());

  if (opts.svg) {
    std::vector<PlotSeries> total_series, eval_series;
    for (Method method : {Method::Gmls, Method::Rbffd}) {
      for (int degree : degrees) {
        PlotSeries total{std::string(method_tag(method)) + " l=" + std::to_string(degree),
                         {}, {}};
        PlotSeries eval = total;
        for (const auto& row : report.rows) {
          if (row.method != method || row.degree != degree) continue;
          total.x.push_back(row.setup_flops + row.eval_flops);
          total.y.push_back(row.err_l2);
          eval.x.push_back(row.eval_flops);
          eval.y.push_back(row.err_l2);
        }
        total_series.push_back(std::move(total));
        eval_series.push_back(std::move(eval));
      }
    }
    write_loglog_svg(total_series, "setup + evaluation flops", "relative two-norm error",
                     {}, out_path(global.out_dir, "efficiency_total.svg"));
    write_loglog_svg(eval_series, "evaluation flops", "relative two-norm error", {},
                     out_path(global.out_dir, "efficiency_eval.svg"));
  }

  if (global.check) {
    bool ok = true;
    for (const auto& a : report.rows) {
      if (a.method != Method::Gmls) continue;
      for (const auto& b : report.rows) {
        if (b.method == Method::Rbffd && b.degree == a.degree && b.level == a.level &&
            !(b.err_l2 < a.err_l2))
          ok = false;
      }
    }
    std::printf("check: rbffd error below gmls at equal eval cost: %s\n",
                ok ? "pass" : "FAIL");
    return ok ? 0 : 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"meshfree surface differential operators on point clouds"};
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "random seed for node sets and test fields");
  app.add_option("--threads", global.threads, "worker threads for operator assembly");
  app.add_flag("--full", global.full, "full-scale node counts (one more refinement level)");
  app.add_flag("--check", global.check, "exit nonzero on trend/band violations");
  app.add_flag("--svg", global.svg, "emit SVG plots next to the CSV reports");
  app.add_flag("--no-timing", global.no_timing, "report wall_ms as 0 (reproducible CSVs)");
  app.add_option("--out-dir", global.out_dir, "directory for reports");

  // gen-nodes
  auto* gen = app.add_subcommand("gen-nodes", "generate a node set");
  std::string gen_surface = "sphere", gen_family = "icosahedral", gen_out = "nodes.txt";
  int gen_n = 2562;
  gen->add_option("--surface", gen_surface, "sphere|torus");
  gen->add_option("--family", gen_family, "icosahedral|hammersley|poisson");
  gen->add_option("--n", gen_n, "node count")->required();
  gen->add_option("--out", gen_out, "output node file")->required();

  // build-op
  auto* build = app.add_subcommand("build-op", "assemble a surface operator");
  std::string bo_nodes, bo_surface = "sphere", bo_method = "rbffd", bo_op = "lap",
              bo_tangent = "exact", bo_out = "operator.txt";
  int bo_degree = 4, bo_kappa = -1, bo_m = 2, bo_iters = 1, bo_retry = 0;
  double bo_tau = 1.5;
  build->add_option("--nodes", bo_nodes, "node file")->required();
  build->add_option("--surface", bo_surface, "sphere|torus");
  build->add_option("--method", bo_method, "gmls|rbffd");
  build->add_option("--op", bo_op, "grad|div|lap");
  build->add_option("--degree", bo_degree, "polynomial degree l");
  build->add_option("--tau", bo_tau, "stencil radius factor");
  build->add_option("--kappa", bo_kappa, "PHS exponent (rbffd; default = degree)");
  build->add_option("--m", bo_m, "weight kernel exponent (gmls)");
  build->add_option("--tangent", bo_tangent, "exact|approx");
  build->add_option("--tangent-iters", bo_iters, "refinement passes in approx mode");
  build->add_option("--retry-tau", bo_retry, "per-stencil tau growth retries (0-3)");
  build->add_option("--out", bo_out, "output operator file")->required();

  // apply
  auto* ap = app.add_subcommand("apply", "apply an exported operator to values");
  std::string ap_op, ap_in, ap_out;
  ap->add_option("--op-file", ap_op, "operator file")->required();
  ap->add_option("--in", ap_in, "input value file")->required();
  ap->add_option("--out", ap_out, "output value file")->required();

  // convergence
  auto* conv = app.add_subcommand("convergence", "node-refinement convergence study");
  std::string cv_surface = "sphere", cv_family = "icosahedral", cv_method = "rbffd",
              cv_op = "lap", cv_tangent = "approx";
  int cv_degree = 4;
  double cv_tau = 1.5;
  std::vector<int> cv_sizes;
  conv->add_option("--surface", cv_surface, "sphere|torus");
  conv->add_option("--family", cv_family, "icosahedral|hammersley|poisson");
  conv->add_option("--method", cv_method, "gmls|rbffd");
  conv->add_option("--op", cv_op, "grad|div|lap");
  conv->add_option("--degree", cv_degree, "polynomial degree l");
  conv->add_option("--tau", cv_tau, "stencil radius factor");
  conv->add_option("--tangent", cv_tangent, "exact|approx");
  conv->add_option("--sizes", cv_sizes, "node counts per level")->delimiter(',');

  // tau-study
  auto* tau = app.add_subcommand("tau-study", "stencil radius study (torus Laplacian)");
  int ts_n = 32615, ts_degree = 4;
  std::vector<double> ts_taus;
  tau->add_option("--n", ts_n, "node count");
  tau->add_option("--degree", ts_degree, "polynomial degree l");
  tau->add_option("--taus", ts_taus, "radius factors in [1.5, 2.5]")->delimiter(',');

  // tangent-study
  auto* tan = app.add_subcommand("tangent-study", "exact vs approximate tangent frames");
  int tg_degree = 4;
  std::vector<int> tg_sizes;
  tan->add_option("--degree", tg_degree, "polynomial degree l");
  tan->add_option("--sizes", tg_sizes, "node counts per level")->delimiter(',');

  // efficiency
  auto* eff = app.add_subcommand("efficiency", "accuracy per computational cost");
  std::vector<int> ef_degrees, ef_sizes;
  eff->add_option("--degrees", ef_degrees, "polynomial degrees")->delimiter(',');
  eff->add_option("--sizes", ef_sizes, "node counts per level")->delimiter(',');

  // global flags may appear after the subcommand name
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return run_gen_nodes(gen_surface, gen_family, gen_n, global, gen_out);
    if (build->parsed())
      return run_build_op(bo_nodes, bo_surface, bo_method, bo_op, bo_degree, bo_tau,
                          bo_kappa, bo_m, bo_tangent, bo_iters, bo_retry, global, bo_out);
    if (ap->parsed()) return run_apply(ap_op, ap_in, ap_out);
    if (conv->parsed())
      return run_convergence_cmd(cv_surface, cv_family, cv_method, cv_op, cv_degree,
                                 cv_tau, cv_tangent, cv_sizes, global);
    if (tau->parsed()) return run_tau_study_cmd(ts_n, ts_degree, ts_taus, global);
    if (tan->parsed()) return run_tangent_study_cmd(tg_degree, tg_sizes, global);
    if (eff->parsed()) return run_efficiency_cmd(ef_degrees, ef_sizes, global);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
