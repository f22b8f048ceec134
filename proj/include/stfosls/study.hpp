#pragma once

#include <iosfwd>
#include <string>

#include "stfosls/exact.hpp"
#include "stfosls/solver.hpp"

namespace stfosls {

enum class StudyMode { convergence, ratios, both };

struct RunConfig {
  Domain domain = Domain::square;
  VelocityBc bc = VelocityBc::slip;
  DivergenceNorm div_norm = DivergenceNorm::h1_in_time;
  bool bubbles = true;
  int refinements = 3;
  StudyMode mode = StudyMode::convergence;
  double pcg_tol = 1e-10;
  std::string out_path = "study.csv";
  bool verbose = false;
  int eig_dense_limit = 3000;
  int refinement_guard = 6;  // memory guard on the number of refinements
};

struct ConvergenceRow {
  int level = 0;
  long dofs = 0;
  double eta = 0, err_u = 0, err_w = 0, err_pde = 0, err_p = 0;
  bool solver_ok = true;
  int iterations = 0;
};

struct RatioRow {
  int level = 0;
  double mesh_size = 0;
  long dofs = 0;
  double ratio = 0;
  double lambda_max = 0, lambda_min = 0;
  bool converged = true;
};

std::vector<ConvergenceRow> run_convergence(const RunConfig& config);
std::vector<RatioRow> run_ratios(const RunConfig& config);

void write_convergence_csv(std::ostream& os, const RunConfig& config,
                           const std::vector<ConvergenceRow>& rows);
void write_ratios_csv(std::ostream& os, const RunConfig& config,
                      const std::vector<RatioRow>& rows);

// least-squares slope of log(value) against log(dofs) over the given rows
double loglog_slope(const std::vector<long>& dofs, const std::vector<double>& values);

std::string to_string(Domain d);
std::string to_string(VelocityBc bc);
std::string to_string(DivergenceNorm n);

}  // namespace stfosls
