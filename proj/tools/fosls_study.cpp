#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "stfosls/study.hpp"

using namespace stfosls;

int main(int argc, char** argv) {
  CLI::App app{"Space-time least-squares studies for the instationary Stokes equations"};

  std::string domain = "square", bc = "slip", div_norm = "h1", bubbles = "on";
  std::string mode = "convergence", out = "study.csv", dump_mesh_path;
  RunConfig cfg;

  app.add_option("--domain", domain, "square|lshape")->check(CLI::IsMember({"square", "lshape"}));
  app.add_option("--bc", bc, "slip|noslip")->check(CLI::IsMember({"slip", "noslip"}));
  app.add_option("--div-norm", div_norm, "h1|l2 time regularity of the divergence residual")
      ->check(CLI::IsMember({"h1", "l2"}));
  app.add_option("--bubbles", bubbles, "on|off edge bubble enrichment")
      ->check(CLI::IsMember({"on", "off"}));
  app.add_option("--refinements", cfg.refinements, "number of uniform refinements");
  app.add_option("--mode", mode, "convergence|ratios|both")
      ->check(CLI::IsMember({"convergence", "ratios", "both"}));
  app.add_option("--tol", cfg.pcg_tol, "relative tolerance of the normal-equation solver");
  app.add_option("--out", out, "output CSV path (mode both appends .ratios.csv for the ratios)");
  app.add_flag("--verbose", cfg.verbose, "progress and iteration logs to stderr");
  app.add_option("--eig-dense-limit", cfg.eig_dense_limit,
                 "dimension threshold between the dense and iterative eigensolvers");
  app.add_option("--refine-guard", cfg.refinement_guard, "memory guard on refinements");
  app.add_option("--dump-mesh", dump_mesh_path, "write the finest mesh as plain text and exit");

  CLI11_PARSE(app, argc, argv);

  cfg.domain = domain == "square" ? Domain::square : Domain::lshape;
  cfg.bc = bc == "slip" ? VelocityBc::slip : VelocityBc::noslip;
  cfg.div_norm = div_norm == "h1" ? DivergenceNorm::h1_in_time : DivergenceNorm::l2_in_time;
  cfg.bubbles = bubbles == "on";
  cfg.out_path = out;
  cfg.mode = mode == "convergence" ? StudyMode::convergence
             : mode == "ratios"    ? StudyMode::ratios
                                   : StudyMode::both;

  try {
    if (!dump_mesh_path.empty()) {
      PrismMesh mesh = make_initial_mesh(cfg.domain);
      for (int k = 0; k < cfg.refinements; ++k) mesh = refine_uniform(mesh);
      std::ofstream os(dump_mesh_path);
      dump_mesh(mesh, os);
      return 0;
    }

    if (cfg.mode == StudyMode::convergence || cfg.mode == StudyMode::both) {
      auto rows = run_convergence(cfg);
      std::ofstream os(cfg.out_path);
      if (!os) throw std::runtime_error("cannot open " + cfg.out_path);
      write_convergence_csv(os, cfg, rows);
      std::cout << "wrote " << cfg.out_path << '\n';
    }
    if (cfg.mode == StudyMode::ratios || cfg.mode == StudyMode::both) {
      const std::string path =
          cfg.mode == StudyMode::both ? cfg.out_path + ".ratios.csv" : cfg.out_path;
      auto rows = run_ratios(cfg);
      std::ofstream os(path);
      if (!os) throw std::runtime_error("cannot open " + path);
      write_ratios_csv(os, cfg, rows);
      std::cout << "wrote " << path << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
