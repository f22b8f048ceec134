#include "stfosls/study.hpp"

#include <cmath>
#include <iostream>
#include <ostream>

namespace stfosls {

namespace {

void check_guard(const RunConfig& c) {
  if (c.refinements < 0) throw std::runtime_error("refinements must be non-negative");
  if (c.refinements > c.refinement_guard)
    throw std::runtime_error("refinements exceed the memory guard (" +
                             std::to_string(c.refinement_guard) + "); raise it explicitly");
}

}  // namespace

std::string to_string(Domain d) { return d == Domain::square ? "square" : "lshape"; }
std::string to_string(VelocityBc bc) {
  switch (bc) {
    case VelocityBc::slip:
      return "slip";
    case VelocityBc::noslip:
      return "noslip";
    default:
      return "none";
  }
}
std::string to_string(DivergenceNorm n) {
  return n == DivergenceNorm::h1_in_time ? "h1" : "l2";
}

std::vector<ConvergenceRow> run_convergence(const RunConfig& config) {
  check_guard(config);
  std::vector<ConvergenceRow> rows;
  ExactSolution exact;
  PrismMesh mesh = make_initial_mesh(config.domain);
  for (int level = 0; level <= config.refinements; ++level) {
    if (level > 0) mesh = refine_uniform(mesh);
    FeSpaces sp = build_spaces(mesh, config.bc, config.bubbles);
    FoslsSystem system(sp, exact.problem_data(), config.div_norm);

    PcgConfig pcg_cfg;
    pcg_cfg.rel_tol = config.pcg_tol;
    pcg_cfg.verbose = config.verbose;
    const Vector diag = system.diagonal();
    const Vector rhs = system.assemble_rhs();
    auto apply = [&system](const Vector& v) { return system.apply_normal(v); };
    PcgResult sol = pcg(apply, diag, rhs, pcg_cfg);

    ErrorReport err = compute_errors(system, exact, sol.x);
    ConvergenceRow row;
    row.level = level;
    row.dofs = system.dim();
    row.eta = err.eta;
    row.err_u = err.err_u;
    row.err_w = err.err_w;
    row.err_pde = err.err_pde;
    row.err_p = err.err_p;
    row.solver_ok = sol.converged;
    row.iterations = sol.iterations;
    rows.push_back(row);
    if (config.verbose)
      std::cerr << "level " << level << " dofs " << row.dofs << " eta " << row.eta << " pcg "
                << sol.iterations << (sol.converged ? "" : " (not converged)") << '\n';
  }
  return rows;
}

std::vector<RatioRow> run_ratios(const RunConfig& config) {
  check_guard(config);
  std::vector<RatioRow> rows;
  PrismMesh mesh = make_initial_mesh(config.domain);
  for (int level = 0; level <= config.refinements; ++level) {
    if (level > 0) mesh = refine_uniform(mesh);
    FeSpaces sp = build_spaces(mesh, config.bc, config.bubbles);
    FoslsSystem system(sp, ProblemData::zero(), config.div_norm);

    EigOptions opt;
    opt.dense_limit = config.eig_dense_limit;
    opt.verbose = config.verbose;
    auto apply_A = [&system](const Vector& v) { return system.apply_normal(v); };
    auto apply_B = [&system](const Vector& v) { return system.apply_xnorm(v); };
    SpMat B;
    if (system.dim() > opt.dense_limit) B = system.assemble_xnorm_sparse();
    EigResult eig = extremal_generalized_eigs(apply_A, apply_B, B, system.dim(), opt);

    RatioRow row;
    row.level = level;
    row.mesh_size = mesh.mesh_size();
    row.dofs = system.dim();
    row.ratio = eig.ratio();
    row.lambda_max = eig.lambda_max;
    row.lambda_min = eig.lambda_min;
    row.converged = eig.converged;
    rows.push_back(row);
    if (config.verbose)
      std::cerr << "level " << level << " dofs " << row.dofs << " ratio " << row.ratio
                << (eig.converged ? "" : " (not converged)") << '\n';
  }
  return rows;
}

namespace {

void write_config_comment(std::ostream& os, const RunConfig& c) {
  os << "# domain=" << to_string(c.domain) << " bc=" << to_string(c.bc)
     << " div_norm=" << to_string(c.div_norm) << " bubbles=" << (c.bubbles ? "on" : "off")
     << " refinements=" << c.refinements << '\n';
}

}  // namespace

void write_convergence_csv(std::ostream& os, const RunConfig& config,
                           const std::vector<ConvergenceRow>& rows) {
  os.precision(17);
  write_config_comment(os, config);
  os << "# dofs counts unconstrained coefficients of the combined "
        "velocity/stress/pressure system\n";
  bool any_fail = false;
  for (const auto& r : rows) any_fail |= !r.solver_ok;
  os << "dofs,eta,err_u,err_w,err_pde,err_p";
  if (any_fail) os << ",status";
  os << '\n';
  for (const auto& r : rows) {
    os << r.dofs << ',' << r.eta << ',' << r.err_u << ',' << r.err_w << ',' << r.err_pde << ','
       << r.err_p;
    if (any_fail) os << ',' << (r.solver_ok ? "ok" : "maxiter");
    os << '\n';
  }
}

void write_ratios_csv(std::ostream& os, const RunConfig& config,
                      const std::vector<RatioRow>& rows) {
  os.precision(17);
  write_config_comment(os, config);
  os << "level,mesh_size_label,dofs,ratio";
  bool any_fail = false;
  for (const auto& r : rows) any_fail |= !r.converged;
  if (any_fail) os << ",status";
  os << '\n';
  for (const auto& r : rows) {
    os << r.level << ",2^" << (r.level > 0 ? "-" : "") << r.level << ',' << r.dofs << ','
       << r.ratio;
    if (any_fail) os << ',' << (r.converged ? "ok" : "noconv");
    os << '\n';
  }
}

double loglog_slope(const std::vector<long>& dofs, const std::vector<double>& values) {
  const int n = static_cast<int>(dofs.size());
  if (n < 2 || values.size() != dofs.size())
    throw std::runtime_error("loglog_slope: need at least two matching points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double x = std::log(static_cast<double>(dofs[i]));
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace stfosls
