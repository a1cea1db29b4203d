#include <CLI11.hpp>
#include <iostream>

#include "sqo/cli_driver.hpp"
#include "sqo/errors.hpp"
#include "sqo/io.hpp"
#include "sqo/kernels.hpp"

using namespace sqo;

int main(int argc, char** argv) {
  CLI::App app{"sqo -- stroboscopic tweezer qubit-oscillator simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_dir;
  int threads = 0;
  bool strict = false, dt_check = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads for sweeps");
  app.add_flag("--strict", strict, "escalate basis-cutoff warnings to errors");
  app.add_flag("--dt-check", dt_check, "run the half-step integrator self-check");

  auto* sc_spectrum = app.add_subcommand("spectrum", "relative-mode spectrum scan");
  double u_min = 0.0, u_max = 1.2;
  int u_points = 121;
  sc_spectrum->add_option("--u-min", u_min);
  sc_spectrum->add_option("--u-max", u_max);
  sc_spectrum->add_option("--points", u_points);

  auto* sc_gate = app.add_subcommand("gate", "run a single gate");
  std::string kind = "D";
  double magnitude = 3.0, lambda = -1.0, duration_us = -1.0;
  sc_gate->add_option("--kind", kind, "D|R|SR|S|CD|CR|CS");
  sc_gate->add_option("--magnitude", magnitude, "|alpha|, gamma, or |xi|");
  sc_gate->add_option("--lambda", lambda, "modulation strength (omit to optimize)");
  sc_gate->add_option("--duration-us", duration_us, "override gate time");

  auto* sc_sweep = app.add_subcommand("sweep", "fidelity vs magnitude sweep");
  std::vector<double> magnitudes;
  sc_sweep->add_option("--kind", kind, "gate kind");
  sc_sweep->add_option("--magnitudes", magnitudes, "magnitude grid");

  auto* sc_repro = app.add_subcommand("reproduce", "reference infidelity table");

  auto* sc_tomo = app.add_subcommand("tomography", "characteristic-function tomography");
  std::string state = "vacuum";
  double alpha = 1.0, extent = 3.0;
  int points = 21;
  sc_tomo->add_option("--state", state, "vacuum|coherent|post_gate");
  sc_tomo->add_option("--alpha", alpha);
  sc_tomo->add_option("--points", points);
  sc_tomo->add_option("--extent", extent);

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg =
        config_path.empty() ? RunConfig::from_json_text("{}") : RunConfig::from_file(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    if (strict) cfg.strict = true;
    if (dt_check) cfg.dt_check = true;

    std::cerr << "kernel backend: " << kern::backend_name() << "\n";

    if (*sc_spectrum) {
      cfg.u_min = u_min;
      cfg.u_max = u_max;
      cfg.u_points = u_points;
      return cmd_spectrum(cfg, std::cout);
    }
    if (*sc_gate) {
      if (sc_gate->count("--kind")) cfg.gate.kind = gate_kind_from_string(kind);
      if (sc_gate->count("--magnitude")) cfg.gate.magnitude = magnitude;
      if (lambda > 0) cfg.gate.lambda = lambda;
      if (duration_us >= 0) cfg.gate.duration = duration_us * 1e-6;
      return cmd_gate(cfg, std::cout);
    }
    if (*sc_sweep) {
      if (sc_sweep->count("--kind")) cfg.gate.kind = gate_kind_from_string(kind);
      if (!magnitudes.empty()) cfg.sweep_magnitudes = magnitudes;
      return cmd_sweep(cfg, std::cout);
    }
    if (*sc_repro) return cmd_reproduce(cfg, std::cout);
    if (*sc_tomo) {
      cfg.tomo_state = state;
      cfg.tomo_alpha = alpha;
      cfg.tomo_points = points;
      cfg.tomo_extent = extent;
      return cmd_tomography(cfg, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
