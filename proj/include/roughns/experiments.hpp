#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roughns/config.hpp"
#include "roughns/galerkin.hpp"
#include "roughns/roughpath.hpp"
#include "roughns/spectral.hpp"

namespace roughns {

// Validated experiment setup shared by the four studies. Built from a Config;
// every violation raises ConfigError naming the field.
struct ExperimentConfig {
  std::string name;
  int d = 2;
  int cutoff = 4;
  double nu = 0.01;
  double T = 1.0;
  double p = 2.5;
  int substeps = 8;

  DriverKind driver_kind = DriverKind::Brownian;
  double hurst = 0.5;
  int channels = 1;
  int mesh_exponent = 8;    // driver mesh 2^-k T
  std::uint64_t seed = 1;

  SigmaFamily sigma;
  std::string initial = "taylor_green";
  std::vector<std::vector<double>> initial_modes;  // rows: n1 n2 parity comp value

  // study-specific knobs
  int level_min = 4, level_max = 9;              // wong_zakai
  int scan_depth = 8, fit_lo = 3, fit_hi = 8;    // remainder_scan
  int replicas = 8;
  int audit_grid_exponent = 7;                   // chen_audit

  double tol_energy = 1e-6;
  double tol_chen = 1e-10;
  double wz_ratio = 0.75;
  double slope_margin = 0.15;

  std::string out_dir = "out";
  double corrupt_zz = 0.0;

  static ExperimentConfig from_config(const Config& cfg, const std::string& experiment);
  SpectralField initial_field() const;
};

struct ExperimentOutcome {
  bool passed = false;
  std::string summary;                 // printed to stdout
  std::vector<std::string> artifacts;  // files written
};

// The four named studies. Artifacts are CSV files under cfg.out_dir; every
// byte of output is a deterministic function of (config, seed).
ExperimentOutcome run_energy_check(const ExperimentConfig& cfg);
ExperimentOutcome run_wong_zakai(const ExperimentConfig& cfg);
ExperimentOutcome run_remainder_scan(const ExperimentConfig& cfg);
ExperimentOutcome run_chen_audit(const ExperimentConfig& cfg);

}  // namespace roughns
