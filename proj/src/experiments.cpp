#include "roughns/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "roughns/analysis.hpp"
#include "roughns/csv.hpp"
#include "roughns/drivers.hpp"
#include "roughns/errors.hpp"
#include "roughns/rng.hpp"
#include "roughns/threading.hpp"

namespace roughns {

namespace {

constexpr std::uint64_t kPurposeDriver = 0x64726976ULL;

SigmaFamily parse_sigma(const Config& cfg, int d, int channels) {
  SigmaFamily sigma;
  sigma.d = d;
  const std::string type = cfg.get_string("sigma.type", "constant");
  if (type == "constant") {
    std::vector<std::vector<double>> rows;
    if (cfg.has("sigma.vectors")) {
      rows = cfg.get_vector_list("sigma.vectors");
    } else {
      for (int k = 0; k < channels; ++k) {
        std::vector<double> row(d, 0.0);
        row[k % d] = 1.0;
        rows.push_back(std::move(row));
      }
    }
    if (static_cast<int>(rows.size()) != channels) {
      throw ConfigError("sigma.vectors", "expected one vector per driver channel");
    }
    for (const auto& row : rows) {
      if (static_cast<int>(row.size()) != d) {
        throw ConfigError("sigma.vectors", "each vector needs d components");
      }
      Coefficient v{0, 0, 0};
      for (int c = 0; c < d; ++c) v[c] = row[c];
      sigma.channels.push_back(SigmaChannel::constant_vector(d, v));
    }
    return sigma;
  }
  if (type != "spectral") throw ConfigError("sigma.type", "must be constant or spectral");
  const auto rows = cfg.get_vector_list("sigma.modes");
  std::vector<SpectralField> fields(channels, SpectralField(d));
  for (const auto& row : rows) {
    const std::size_t expect = d == 2 ? 6 : 7;
    if (row.size() != expect) {
      throw ConfigError("sigma.modes", "each row is: channel n1 n2 [n3] parity comp value");
    }
    const int k = static_cast<int>(row[0]) - 1;
    if (k < 0 || k >= channels) throw ConfigError("sigma.modes", "channel index out of range");
    Wavevector n{static_cast<int>(row[1]), static_cast<int>(row[2]),
                 d == 3 ? static_cast<int>(row[3]) : 0};
    const std::size_t at = d == 2 ? 3 : 4;
    const Parity parity = row[at] == 0.0 ? Parity::Sin : Parity::Cos;
    const int comp = static_cast<int>(row[at + 1]) - 1;
    if (comp < 0 || comp >= d) throw ConfigError("sigma.modes", "component out of range");
    fields[k].add(n, parity, comp, row[at + 2]);
  }
  for (auto& f : fields) sigma.channels.push_back(SigmaChannel::band_limited(std::move(f)));
  sigma.validate();
  return sigma;
}

std::string outcome_line(const std::string& label, bool ok, const std::string& detail) {
  return std::string(ok ? "PASS " : "FAIL ") + label + (detail.empty() ? "" : ": " + detail);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

ExperimentConfig ExperimentConfig::from_config(const Config& cfg, const std::string& experiment) {
  ExperimentConfig ec;
  ec.name = experiment;
  ec.d = static_cast<int>(cfg.get_int("experiment.d", 2));
  if (ec.d != 2 && ec.d != 3) throw ConfigError("experiment.d", "must be 2 or 3");
  const bool solver_study =
      experiment == "energy_check" || experiment == "wong_zakai" || experiment == "remainder_scan";
  if (solver_study && ec.d != 2) {
    throw ConfigError("experiment.d", experiment + " is a 2D-only experiment");
  }
  ec.cutoff = static_cast<int>(cfg.get_int("experiment.cutoff", 4));
  if (ec.cutoff < 1) throw ConfigError("experiment.cutoff", "must be >= 1");
  ec.nu = cfg.get_double("experiment.nu", 0.01);
  if (!(ec.nu > 0.0) || !std::isfinite(ec.nu)) throw ConfigError("experiment.nu", "must be > 0");
  ec.T = cfg.get_double("experiment.T", 1.0);
  if (!(ec.T > 0.0) || !std::isfinite(ec.T)) throw ConfigError("experiment.T", "must be > 0");
  ec.p = cfg.get_double("experiment.p", 2.5);
  if (!(ec.p >= 2.0 && ec.p < 3.0)) throw ConfigError("experiment.p", "must lie in [2,3)");
  ec.substeps = static_cast<int>(cfg.get_int("experiment.substeps", 8));
  if (ec.substeps < 1) throw ConfigError("experiment.substeps", "must be >= 1");

  const std::string kind = cfg.get_string("driver.kind", "brownian");
  if (kind == "brownian") {
    ec.driver_kind = DriverKind::Brownian;
  } else if (kind == "fbm") {
    ec.driver_kind = DriverKind::Fbm;
  } else {
    throw ConfigError("driver.kind", "must be brownian or fbm");
  }
  ec.hurst = cfg.get_double("driver.hurst", 0.5);
  if (ec.driver_kind == DriverKind::Fbm && !(ec.hurst > 1.0 / 3.0 && ec.hurst <= 0.5)) {
    throw ConfigError("driver.hurst", "must lie in (1/3, 1/2]");
  }
  ec.channels = static_cast<int>(cfg.get_int("driver.channels", 1));
  if (ec.channels < 1) throw ConfigError("driver.channels", "must be >= 1");
  ec.mesh_exponent = static_cast<int>(cfg.get_int("driver.mesh_exponent", 8));
  if (ec.mesh_exponent < 1 || ec.mesh_exponent > 20) {
    throw ConfigError("driver.mesh_exponent", "must lie in [1, 20]");
  }
  ec.seed = cfg.get_u64("driver.seed", 1);

  ec.sigma = parse_sigma(cfg, ec.d, ec.channels);
  ec.initial = cfg.get_string("initial.type", "taylor_green");
  if (ec.initial == "modes") ec.initial_modes = cfg.get_vector_list("initial.modes");

  ec.level_min = static_cast<int>(cfg.get_int("experiment.level_min", 4));
  ec.level_max = static_cast<int>(cfg.get_int("experiment.level_max", 9));
  if (ec.level_min < 1 || ec.level_max <= ec.level_min) {
    throw ConfigError("experiment.level_min", "need 1 <= level_min < level_max");
  }
  ec.scan_depth = static_cast<int>(cfg.get_int("experiment.scan_depth", 8));
  ec.fit_lo = static_cast<int>(cfg.get_int("experiment.fit_lo", 3));
  ec.fit_hi = static_cast<int>(cfg.get_int("experiment.fit_hi", 8));
  if (ec.fit_lo > ec.fit_hi || ec.fit_hi > ec.scan_depth) {
    throw ConfigError("experiment.fit_hi", "need fit_lo <= fit_hi <= scan_depth");
  }
  ec.replicas = static_cast<int>(cfg.get_int("experiment.replicas", 8));
  if (ec.replicas < 1) throw ConfigError("experiment.replicas", "must be >= 1");
  ec.audit_grid_exponent = static_cast<int>(cfg.get_int("experiment.audit_grid_exponent", 7));

  ec.tol_energy = cfg.get_double("tolerances.energy", 1e-6);
  ec.tol_chen = cfg.get_double("tolerances.chen", 1e-10);
  ec.wz_ratio = cfg.get_double("tolerances.wz_ratio", 0.75);
  ec.slope_margin = cfg.get_double("tolerances.slope_margin", 0.15);

  ec.out_dir = cfg.get_string("output.dir", "out");
  return ec;
}

SpectralField ExperimentConfig::initial_field() const {
  if (initial == "taylor_green") {
    if (d != 2) throw ConfigError("initial.type", "taylor_green is two-dimensional");
    return taylor_green();
  }
  if (initial == "zero") return SpectralField(d);
  if (initial == "modes") {
    SpectralField u(d);
    for (const auto& row : initial_modes) {
      const std::size_t expect = d == 2 ? 5 : 6;
      if (row.size() != expect) {
        throw ConfigError("initial.modes", "each row is: n1 n2 [n3] parity comp value");
      }
      Wavevector n{static_cast<int>(row[0]), static_cast<int>(row[1]),
                   d == 3 ? static_cast<int>(row[2]) : 0};
      const std::size_t at = d == 2 ? 2 : 3;
      const Parity parity = row[at] == 0.0 ? Parity::Sin : Parity::Cos;
      const int comp = static_cast<int>(row[at + 1]) - 1;
      u.add(n, parity, comp, row[at + 2]);
    }
    return u;
  }
  throw ConfigError("initial.type", "must be taylor_green, zero or modes");
}

ExperimentOutcome run_energy_check(const ExperimentConfig& cfg) {
  if (!cfg.sigma.all_constant()) {
    throw ConfigError("sigma.type", "energy_check needs constant sigma");
  }
  const GridPath driver =
      sample_gaussian_driver(cfg.driver_kind, cfg.hurst, dyadic_times(cfg.T, cfg.mesh_exponent),
                             cfg.channels, split_seed(cfg.seed, kPurposeDriver));
  const ModeBasis basis = build_divfree_basis(cfg.cutoff, cfg.d);
  const GalerkinTensors tensors = assemble_tensors(basis, cfg.sigma, cfg.nu);
  const SpectralField u0 = cfg.initial_field();
  const Trajectory traj = run(u0, driver, tensors, basis, cfg.substeps, cfg.tol_energy);
  const EnergyDefect defect = energy_defect(traj);

  ExperimentOutcome outcome;
  outcome.passed = defect.max_defect <= cfg.tol_energy;

  const std::string ledger = cfg.out_dir + "/energy_ledger.csv";
  write_file(ledger, traj.to_csv());
  outcome.artifacts.push_back(ledger);

  std::ostringstream summary;
  summary << "experiment,u0_norm2,max_defect,argmax_time,tolerance\n";
  summary << "energy_check," << format_double(traj.energy.front()) << ","
          << format_double(defect.max_defect) << "," << format_double(defect.argmax_time) << ","
          << format_double(cfg.tol_energy) << "\n";
  const std::string sum = cfg.out_dir + "/energy_summary.csv";
  write_file(sum, summary.str());
  outcome.artifacts.push_back(sum);

  std::ostringstream msg;
  msg << outcome_line("energy_check", outcome.passed,
                      "max defect " + format_double(defect.max_defect) + " (|u0|^2 = " +
                          format_double(traj.energy.front()) + ")");
  outcome.summary = msg.str();
  return outcome;
}

ExperimentOutcome run_wong_zakai(const ExperimentConfig& cfg) {
  const int base = cfg.level_max;
  const GridPath sample =
      sample_gaussian_driver(cfg.driver_kind, cfg.hurst, dyadic_times(cfg.T, base), cfg.channels,
                             split_seed(cfg.seed, kPurposeDriver));
  const ModeBasis basis = build_divfree_basis(cfg.cutoff, cfg.d);
  const GalerkinTensors tensors = assemble_tensors(basis, cfg.sigma, cfg.nu);
  const SpectralField u0 = cfg.initial_field();
  const bool oracle_applies = cfg.sigma.all_constant() && cfg.initial == "taylor_green";

  const int n_levels = cfg.level_max - cfg.level_min + 1;
  std::vector<GridPath> nodes(n_levels);
  std::vector<Trajectory> trajs(n_levels);
  parallel_for(n_levels, [&](std::size_t i) {
    const int level = cfg.level_min + static_cast<int>(i);
    const double delta = cfg.T / static_cast<double>(std::size_t{1} << level);
    MollifiedDriver moll = mollify_driver(sample, delta, cfg.p);
    trajs[i] = run(u0, moll.nodes, tensors, basis, cfg.substeps, cfg.tol_energy);
    nodes[i] = std::move(moll.nodes);
  });

  // e_k = sup over the coarser run's recorded times of |u^(k) - u^(k+1)|_0;
  // the mollified paths agree at the common nodes, so the gap lives between
  // them and the substep samples are where it shows
  std::vector<double> errors(n_levels - 1, 0.0), oracle_errors(n_levels - 1, 0.0);
  for (int i = 0; i + 1 < n_levels; ++i) {
    double worst = 0.0, worst_oracle = 0.0;
    for (std::size_t m = 0; m < trajs[i].times.size(); ++m) {
      const double t = trajs[i].times[m];
      const Eigen::VectorXd diff =
          trajs[i].states.row(m) - trajs[i + 1].states.row(trajs[i + 1].index_of_time(t));
      worst = std::max(worst, diff.norm());
      if (oracle_applies) {
        const SpectralField a = exact_oracle_shifted_tg(cfg.sigma, nodes[i], cfg.nu, t);
        const SpectralField b = exact_oracle_shifted_tg(cfg.sigma, nodes[i + 1], cfg.nu, t);
        worst_oracle = std::max(worst_oracle, sobolev_norm(a - b, 0.0));
      }
    }
    errors[i] = worst;
    oracle_errors[i] = worst_oracle;
  }

  bool decreasing = true;
  for (int i = 1; i + 1 < static_cast<int>(errors.size()); ++i) {
    if (!(errors[i] > errors[i + 1])) decreasing = false;  // strict for k >= level_min + 1
  }
  double ratio_sum = 0.0;
  int ratio_count = 0;
  for (int i = 0; i + 1 < static_cast<int>(errors.size()); ++i) {
    if (errors[i] > 0.0) {
      ratio_sum += errors[i + 1] / errors[i];
      ++ratio_count;
    }
  }
  const double mean_ratio = ratio_count > 0 ? ratio_sum / ratio_count : 0.0;
  bool oracle_ok = true;
  if (oracle_applies) {
    for (std::size_t i = 0; i < errors.size(); ++i) {
      if (oracle_errors[i] <= 0.0) continue;
      const double q = errors[i] / oracle_errors[i];
      if (q > 3.0 || q < 1.0 / 3.0) oracle_ok = false;
    }
  }

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (errors[i] > 0.0) {
      xs.push_back(static_cast<double>(cfg.level_min + i));
      ys.push_back(std::log2(errors[i]));
    }
  }
  const LineFit rate = fit_line(xs, ys);

  ExperimentOutcome outcome;
  outcome.passed = decreasing && mean_ratio <= cfg.wz_ratio && oracle_ok;

  std::ostringstream table;
  table << "k,e_k,ratio,oracle_e_k\n";
  for (std::size_t i = 0; i < errors.size(); ++i) {
    table << (cfg.level_min + i) << "," << format_double(errors[i]) << ","
          << format_double(i > 0 && errors[i - 1] > 0.0 ? errors[i] / errors[i - 1] : 0.0) << ","
          << format_double(oracle_errors[i]) << "\n";
  }
  const std::string rates = cfg.out_dir + "/wong_zakai_rates.csv";
  write_file(rates, table.str());
  outcome.artifacts.push_back(rates);

  std::ostringstream msg;
  msg << outcome_line("wong_zakai", outcome.passed,
                      "mean ratio " + format_double(mean_ratio) + ", fitted rate 2^(" +
                          format_double(rate.slope) + " k)" +
                          (oracle_applies ? std::string(", oracle ") + (oracle_ok ? "ok" : "off")
                                          : std::string()));
  outcome.summary = msg.str();
  return outcome;
}

ExperimentOutcome run_remainder_scan(const ExperimentConfig& cfg) {
  const ModeBasis basis = build_divfree_basis(cfg.cutoff, cfg.d);
  const ModeBasis gradient = build_gradient_basis(cfg.cutoff, cfg.d);
  const GalerkinTensors tensors = assemble_tensors(basis, cfg.sigma, cfg.nu);
  const SpectralField u0 = cfg.initial_field();
  const std::vector<double> times = dyadic_times(cfg.T, cfg.mesh_exponent);

  struct Replica {
    RemainderScan scan;
    bool ok = false;
  };
  std::vector<Replica> replicas(cfg.replicas);

  // sigma = 0 dynamics via a zero driver: marks quadrature-dominated levels
  GridPath zero_driver;
  zero_driver.times = times;
  zero_driver.values = Eigen::MatrixXd::Zero(times.size(), cfg.channels);
  const Trajectory control = run(u0, zero_driver, tensors, basis, cfg.substeps, cfg.tol_energy);

  const double need_p = 3.0 / cfg.p - cfg.slope_margin;
  const double need_s = 2.0 / cfg.p - cfg.slope_margin;
  const double need_d = 1.0 / cfg.p - cfg.slope_margin;

  parallel_for(cfg.replicas, [&](std::size_t i) {
    const GridPath driver = sample_gaussian_driver(cfg.driver_kind, cfg.hurst, times, cfg.channels,
                                                   split_seed(cfg.seed, kPurposeDriver, i));
    const RoughLift lift = lift_piecewise_linear(driver, cfg.p);
    const DriverAssembly drivers(cfg.sigma, basis, gradient, &lift);
    const Trajectory traj = run(u0, driver, tensors, basis, cfg.substeps, cfg.tol_energy);
    replicas[i].scan = compute_remainders(traj, drivers, tensors, cfg.scan_depth, cfg.p, cfg.fit_lo,
                                          cfg.fit_hi, &control);
    replicas[i].ok = replicas[i].scan.slope_uPnat.slope >= need_p &&
                     replicas[i].scan.slope_usharp.slope >= need_s &&
                     replicas[i].scan.slope_du.slope >= need_d;
  });

  ExperimentOutcome outcome;
  std::vector<double> sp, ss, sd, ip, is, id, rp, rs, rd;
  for (int i = 0; i < cfg.replicas; ++i) {
    const std::string scan_file = cfg.out_dir + "/scan_seed" + std::to_string(i) + ".csv";
    write_file(scan_file, replicas[i].scan.to_csv());
    outcome.artifacts.push_back(scan_file);
    const std::string slope_file = cfg.out_dir + "/slopes_seed" + std::to_string(i) + ".csv";
    write_file(slope_file, replicas[i].scan.slopes_csv());
    outcome.artifacts.push_back(slope_file);
    sp.push_back(replicas[i].scan.slope_uPnat.slope);
    ss.push_back(replicas[i].scan.slope_usharp.slope);
    sd.push_back(replicas[i].scan.slope_du.slope);
    ip.push_back(replicas[i].scan.slope_uPnat.intercept);
    is.push_back(replicas[i].scan.slope_usharp.intercept);
    id.push_back(replicas[i].scan.slope_du.intercept);
    rp.push_back(replicas[i].scan.slope_uPnat.r2);
    rs.push_back(replicas[i].scan.slope_usharp.r2);
    rd.push_back(replicas[i].scan.slope_du.r2);
  }

  const double med_p = median(sp), med_s = median(ss), med_d = median(sd);
  outcome.passed = med_p >= need_p && med_s >= need_s && med_d >= need_d;

  std::ostringstream slopes;
  slopes << "quantity,slope,intercept,r2\n";
  slopes << "uPnat," << format_double(med_p) << "," << format_double(median(ip)) << ","
         << format_double(median(rp)) << "\n";
  slopes << "usharp," << format_double(med_s) << "," << format_double(median(is)) << ","
         << format_double(median(rs)) << "\n";
  slopes << "du," << format_double(med_d) << "," << format_double(median(id)) << ","
         << format_double(median(rd)) << "\n";
  const std::string slope_file = cfg.out_dir + "/slopes.csv";
  write_file(slope_file, slopes.str());
  outcome.artifacts.push_back(slope_file);

  std::ostringstream msg;
  msg << outcome_line("remainder_scan", outcome.passed,
                      "median slopes uPnat " + format_double(med_p) + " (need " +
                          format_double(need_p) + "), usharp " + format_double(med_s) + " (need " +
                          format_double(need_s) + "), du " + format_double(med_d) + " (need " +
                          format_double(need_d) + ")");
  outcome.summary = msg.str();
  return outcome;
}

ExperimentOutcome run_chen_audit(const ExperimentConfig& cfg) {
  const std::vector<double> times = dyadic_times(cfg.T, cfg.audit_grid_exponent);
  const GridPath driver = sample_gaussian_driver(cfg.driver_kind, cfg.hurst, times, cfg.channels,
                                                 split_seed(cfg.seed, kPurposeDriver));
  RoughLift lift = lift_piecewise_linear(driver, cfg.p);
  if (cfg.corrupt_zz != 0.0) {
    lift.perturb_zz(0, lift.size() - 1, 0, 0, cfg.corrupt_zz);
  }
  const ModeBasis basis = build_divfree_basis(cfg.cutoff, cfg.d);
  const ModeBasis gradient = build_gradient_basis(cfg.cutoff, cfg.d);
  const DriverAssembly drivers(cfg.sigma, basis, gradient, &lift);
  const ChenReport report = chen_check(drivers);

  ExperimentOutcome outcome;
  outcome.passed = report.max() <= cfg.tol_chen && report.lift_defect <= cfg.tol_chen;

  std::ostringstream table;
  table << "defect,value\n";
  table << "lift," << format_double(report.lift_defect) << "\n";
  table << "driver_p," << format_double(report.defect_p) << "\n";
  table << "driver_q," << format_double(report.defect_q) << "\n";
  table << "driver_full," << format_double(report.defect_full) << "\n";
  const std::string defects = cfg.out_dir + "/chen_defects.csv";
  write_file(defects, table.str());
  outcome.artifacts.push_back(defects);

  std::ostringstream msg;
  msg << outcome_line("chen_audit", outcome.passed,
                      "lift " + format_double(report.lift_defect) + ", P " +
                          format_double(report.defect_p) + ", Q " + format_double(report.defect_q) +
                          ", full " + format_double(report.defect_full));
  outcome.summary = msg.str();
  return outcome;
}

}  // namespace roughns
