#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sqo/gatecat.hpp"

namespace sqo {

// Run configuration shared by all subcommands. All defaults are the values
// used for 87Rb in the reference setup (W = 700 nm, omega_x = 2 pi 140 kHz,
// eps_x = 0.041, u' by gate family).
struct RunConfig {
  BeamGeometry geom;
  GateRequest gate;
  std::vector<double> sweep_magnitudes;
  std::optional<std::vector<double>> lambda_grid;
  int refine_rounds = 3;
  int n_rel_spectrum = 64;
  int n_rel_dyn = 4;
  std::optional<int> n_com;
  std::optional<double> dt_divisor;
  int k_sim = 14;
  int threads = 2;
  bool strict = false;
  bool dt_check = false;
  std::filesystem::path out_dir = "out";
  // tomography
  std::string tomo_state = "vacuum";  // vacuum | coherent | post_gate
  double tomo_alpha = 1.0;
  int tomo_points = 21;
  double tomo_extent = 3.0;
  // spectrum scan
  double u_min = 0.0, u_max = 1.2;
  int u_points = 121;

  std::string config_hash;  // filled by parsing

  RunSettings settings() const;
  static RunConfig from_json_text(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& p);
};

int cmd_spectrum(const RunConfig& cfg, std::ostream& log);
int cmd_gate(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_tomography(const RunConfig& cfg, std::ostream& log);

struct ReproduceRow {
  std::string gate;
  double paper_infidelity;
  double tol;                  // acceptance threshold (upper bound)
  double lower_bound;          // 0 except CD's window
  double paper_time_us;
  double computed_infidelity = 0.0;
  double computed_time_us = 0.0;
  double lambda_star = 0.0;
  bool pass_infidelity = false;
  bool pass_time = false;
};

// Runs D/S/CD/CS at the End Matter settings with lambda optimized inside the
// 20% gate-time window and checks the acceptance tolerances.
std::vector<ReproduceRow> run_reproduce(const RunConfig& cfg, std::ostream& log);
int cmd_reproduce(const RunConfig& cfg, std::ostream& log);

}  // namespace sqo
