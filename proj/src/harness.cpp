#include "ltisid/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include "ltisid/io.hpp"
#include "ltisid/metrics.hpp"
#include "ltisid/physical.hpp"
#include "ltisid/rng.hpp"

namespace ltisid {

namespace {

// Seed streams under one experiment-row seed.
enum : std::uint64_t {
  kStreamSystem = 101,
  kStreamDesign = 102,
  kStreamMeans = 103,
  kStreamData = 104,
  kStreamFit = 105,
};

Eigen::MatrixXd gaussian_matrix(int rows, int cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = rng.gaussian();
  return m;
}

/// Clamp singular values so the condition number stays below cap.
Eigen::MatrixXd cap_condition(const Eigen::MatrixXd& m, double cap) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sv = svd.singularValues();
  const double floor_sv = sv(0) / cap;
  for (Eigen::Index i = 0; i < sv.size(); ++i) sv(i) = std::max(sv(i), floor_sv);
  return svd.matrixU() * sv.asDiagonal() * svd.matrixV().transpose();
}

// Pooled MCC over rows [begin, end) of every environment, with both the
// true and recovered controls centered per environment first; Pearson is
// shift-invariant per component but pooling across environments with
// different means is not.
double pooled_mcc(const TrajectorySet& raw, const LinearDecoder& decoder,
                  const std::vector<Trajectory>& centered_trajs, int begin, int end) {
  const int d_u = raw.d_u();
  const int rows = end - begin;
  if (rows < 1) throw std::invalid_argument("empty evaluation split");
  const auto n_envs = static_cast<Eigen::Index>(raw.trajectories.size());
  Eigen::MatrixXd u_true(n_envs * rows, d_u);
  Eigen::MatrixXd u_hat(n_envs * rows, d_u);
  for (Eigen::Index e = 0; e < n_envs; ++e) {
    const auto& traj = raw.trajectories[static_cast<std::size_t>(e)];
    const auto& centered = centered_trajs[static_cast<std::size_t>(e)];
    // rows begin..end of y give pairs begin..end-1
    const Eigen::MatrixXd y_slice = centered.y.middleRows(begin, rows + 1);
    const Eigen::MatrixXd hat = predict_controls(decoder, y_slice);
    const Eigen::MatrixXd truth = traj.u.middleRows(begin, rows);
    u_hat.middleRows(e * rows, rows) = hat.rowwise() - hat.colwise().mean();
    u_true.middleRows(e * rows, rows) = truth.rowwise() - truth.colwise().mean();
  }
  return mcc(u_true, u_hat).mcc;
}

struct Instance {
  StateSpace sys;
  std::vector<EnvironmentSpec> specs;
};

Instance build_instance(const ExperimentConfig& cfg, std::uint64_t row_seed) {
  Instance inst;
  if (cfg.kind == ExperimentKind::kDcMotor) {
    inst.sys = discretize(dc_motor(), 1e-2, DiscretizationMethod::kZeroOrderHold);
    // Three scalar-control environments with distinct variances; any two
    // distinct variances already give the rank-1 variability needed here.
    inst.specs.emplace_back(0, Eigen::VectorXd::Constant(1, 1.0));
    inst.specs.emplace_back(1, Eigen::VectorXd::Constant(1, 0.25));
    inst.specs.emplace_back(2, Eigen::VectorXd::Constant(1, 4.0));
    return inst;
  }

  const int d_u = cfg.d_u;
  const int d_x = cfg.d_x > 0 ? cfg.d_x : d_u;
  inst.sys = sample_system(d_x, d_u, d_u, derive_seed(row_seed, kStreamSystem), cfg.B_identity,
                           cfg.C_identity);
  switch (cfg.design) {
    case DesignKind::kMaxVariability:
      inst.specs = design_max_variability(d_u);
      break;
    case DesignKind::kRandomUniform:
      // Resampled per row seed; recorded through the dataset metadata.
      inst.specs = sample_random_design(d_u, d_u + 1, 0.1, 1.0, derive_seed(row_seed, kStreamDesign));
      break;
  }
  if (cfg.control_mean_nonzero) {
    Rng rng(derive_seed(row_seed, kStreamMeans));
    for (auto& spec : inst.specs) {
      Eigen::VectorXd mean(d_u);
      for (int i = 0; i < d_u; ++i) mean(i) = rng.uniform(-1.0, 1.0);
      spec.mean = mean;
    }
  }
  return inst;
}

std::string factor_value(const ResultRow& row, const std::string& name) {
  std::ostringstream oss;
  if (name == "kind") {
    oss << to_string(row.kind);
  } else if (name == "d_u") {
    oss << row.d_u;
  } else if (name == "design") {
    oss << to_string(row.design);
  } else if (name == "B_identity") {
    oss << (row.B_identity ? 1 : 0);
  } else if (name == "C_identity") {
    oss << (row.C_identity ? 1 : 0);
  } else if (name == "control_mean_nonzero") {
    oss << (row.control_mean_nonzero ? 1 : 0);
  } else if (name == "obs_noise_var") {
    oss << row.obs_noise_var;
  } else {
    throw std::invalid_argument("unknown grouping factor: " + name);
  }
  return oss.str();
}

const std::vector<std::string>& all_factors() {
  static const std::vector<std::string> factors = {
      "kind", "d_u", "design", "B_identity", "C_identity", "control_mean_nonzero",
      "obs_noise_var"};
  return factors;
}

}  // namespace

std::uint64_t ExperimentConfig::config_fingerprint() const {
  Fingerprint fp;
  fp.add(to_string(kind)).add(d_u).add(d_x).add(to_string(design));
  fp.add(B_identity).add(C_identity).add(control_mean_nonzero);
  fp.add(obs_noise_var).add(steps_per_env);
  fp.add(fit.learning_rate).add(fit.batch_size).add(fit.epochs).add(fit.grad_clip_norm);
  fp.add(static_cast<int>(fit.init)).add(fit.include_log_det);
  fp.add(static_cast<int>(fit.weighting));
  return fp.value();
}

ExperimentConfig default_config(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  switch (kind) {
    case ExperimentKind::kDcMotor:
      cfg.d_u = 1;
      cfg.steps_per_env = 5000;
      cfg.fit.learning_rate = 1e-2;
      cfg.fit.epochs = 50;
      cfg.fit.batch_size = 8;
      cfg.seeds = {0, 1, 2, 3, 4};
      break;
    case ExperimentKind::kTable1Cell:
    case ExperimentKind::kTable3Cell:
    case ExperimentKind::kCustom:
      cfg.d_u = 2;
      cfg.steps_per_env = 12000;
      cfg.fit.learning_rate = 3e-3;
      cfg.fit.epochs = 4000;
      cfg.fit.batch_size = 64;
      cfg.seeds = {0, 1, 2, 3, 4};
      break;
  }
  if (kind == ExperimentKind::kTable1Cell || kind == ExperimentKind::kTable3Cell) {
    cfg.B_identity = false;
    cfg.C_identity = false;
    cfg.control_mean_nonzero = true;
    cfg.design = DesignKind::kMaxVariability;
  }
  return cfg;
}

StateSpace sample_system(int d_x, int d_u, int d_y, std::uint64_t seed, bool B_identity,
                         bool C_identity) {
  if (d_x < 1 || d_u < 1 || d_y < 1) throw std::invalid_argument("dimensions must be positive");
  constexpr int kMaxAttempts = 100;
  constexpr double kSpectralRadius = 0.9;
  constexpr double kConditionCap = 100.0;

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
    Eigen::MatrixXd A = gaussian_matrix(d_x, d_x, rng);
    const double rho = Eigen::EigenSolver<Eigen::MatrixXd>(A, false)
                           .eigenvalues()
                           .cwiseAbs()
                           .maxCoeff();
    if (rho <= 0.0) continue;
    A *= kSpectralRadius / rho;
    Eigen::MatrixXd B = B_identity ? Eigen::MatrixXd::Identity(d_x, d_u)
                                   : cap_condition(gaussian_matrix(d_x, d_u, rng), kConditionCap);
    Eigen::MatrixXd C = C_identity ? Eigen::MatrixXd::Identity(d_y, d_x)
                                   : cap_condition(gaussian_matrix(d_y, d_x, rng), kConditionCap);
    StateSpace sys(A, B, C);
    const SystemReport report = validate_system(sys);
    if (report.is_stable && report.is_controllable && report.is_observable) return sys;
  }
  throw std::runtime_error("failed to sample a controllable, observable, stable system");
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.seeds.empty()) throw std::invalid_argument("config needs at least one seed");
  if (cfg.kind != ExperimentKind::kDcMotor && cfg.d_u < 1) {
    throw std::invalid_argument("control dimension must be positive");
  }

  const std::string fingerprint_hex = [&] {
    std::ostringstream oss;
    oss << std::hex << cfg.config_fingerprint();
    return oss.str();
  }();

  std::vector<ResultRow> rows(cfg.seeds.size());
  const auto n = static_cast<long long>(cfg.seeds.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long s = 0; s < n; ++s) {
    const auto idx = static_cast<std::size_t>(s);
    const std::uint64_t row_seed = cfg.seeds[idx];
    const auto start = std::chrono::steady_clock::now();

    ResultRow row;
    row.config_fingerprint = fingerprint_hex;
    row.kind = cfg.kind;
    row.d_u = cfg.kind == ExperimentKind::kDcMotor ? 1 : cfg.d_u;
    row.design = cfg.design;
    row.B_identity = cfg.B_identity;
    row.C_identity = cfg.C_identity;
    row.control_mean_nonzero = cfg.control_mean_nonzero;
    row.obs_noise_var = cfg.obs_noise_var;
    row.seed = row_seed;

    try {
      const Instance inst = build_instance(cfg, row_seed);
      const TrajectorySet data =
          generate_dataset(inst.sys, inst.specs, cfg.steps_per_env,
                           cfg.obs_noise_var, derive_seed(row_seed, kStreamData));
      const TrajectorySet centered = center(data).first;

      // Train on the first 90% of each environment's pairs, validate on the
      // held-out tail.
      const int T = cfg.steps_per_env;
      const int val_pairs = std::max(1, T / 10);
      const int train_pairs = T - val_pairs;
      if (train_pairs < 1) throw std::runtime_error("horizon too short to split");

      TrajectorySet train = centered;
      for (auto& traj : train.trajectories) {
        traj.u = traj.u.topRows(train_pairs).eval();
        traj.y = traj.y.topRows(train_pairs + 1).eval();
        traj.x.resize(0, 0);
      }

      FitConfig fit_cfg = cfg.fit;
      fit_cfg.seed = derive_seed(row_seed, kStreamFit);
      auto [decoder, report] = fit(FittingView::of(train), fit_cfg);

      row.train_mcc = pooled_mcc(data, decoder, centered.trajectories, 0, train_pairs);
      row.val_mcc = pooled_mcc(data, decoder, centered.trajectories, train_pairs, T);
      row.final_loss = report.final_loss;

      if (!cfg.output_dir.empty()) {
        const std::filesystem::path run_dir =
            std::filesystem::path(cfg.output_dir) / ("seed_" + std::to_string(row_seed));
        save_dataset(run_dir / "dataset", data);
        save_decoder(run_dir / "decoder.json", decoder, fit_cfg, fingerprint(data));
        save_state_space(run_dir / "system.json", inst.sys);
      }
    } catch (const std::exception& e) {
      row.diverged = true;
      row.train_mcc = std::numeric_limits<double>::quiet_NaN();
      row.val_mcc = std::numeric_limits<double>::quiet_NaN();
      row.final_loss = std::numeric_limits<double>::quiet_NaN();
#ifdef _OPENMP
#pragma omp critical
#endif
      std::fprintf(stderr, "ltisid: seed %llu failed: %s\n",
                   static_cast<unsigned long long>(row_seed), e.what());
    }

    row.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rows[idx] = std::move(row);
  }

  if (!cfg.output_dir.empty()) {
    std::filesystem::create_directories(cfg.output_dir);
    std::ofstream out(std::filesystem::path(cfg.output_dir) / "results.csv");
    out << result_rows_csv(rows);
  }
  return rows;
}

std::string result_rows_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "kind,d_u,design,B_identity,C_identity,control_mean_nonzero,obs_noise_var,"
         "config_fingerprint,seed,train_mcc,val_mcc,final_loss,wall_time_s,diverged\n";
  for (const auto& row : rows) {
    out << to_string(row.kind) << "," << row.d_u << "," << to_string(row.design) << ","
        << (row.B_identity ? 1 : 0) << "," << (row.C_identity ? 1 : 0) << ","
        << (row.control_mean_nonzero ? 1 : 0) << "," << row.obs_noise_var << ","
        << row.config_fingerprint << "," << row.seed << "," << row.train_mcc << ","
        << row.val_mcc << "," << row.final_loss << "," << row.wall_time_s << ","
        << (row.diverged ? 1 : 0) << "\n";
  }
  return out.str();
}

std::string emit_table(const std::vector<ResultRow>& rows, const std::vector<std::string>& group_by) {
  if (rows.empty()) throw std::invalid_argument("no result rows to aggregate");
  const std::vector<std::string>& factors = group_by.empty() ? all_factors() : group_by;
  for (const auto& f : factors) factor_value(rows.front(), f);  // validate names

  std::map<std::vector<std::string>, std::vector<double>> cells;
  for (const auto& row : rows) {
    std::vector<std::string> key;
    key.reserve(factors.size());
    for (const auto& f : factors) key.push_back(factor_value(row, f));
    cells[key].push_back(row.val_mcc);
  }

  std::ostringstream out;
  out.precision(10);
  for (const auto& f : factors) out << f << ",";
  out << "mean_mcc,std_mcc,n_seeds\n";
  for (const auto& [key, values] : cells) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    if (values.size() > 1) {
      for (double v : values) var += (v - mean) * (v - mean);
      var /= static_cast<double>(values.size() - 1);
    }
    for (const auto& k : key) out << k << ",";
    out << mean << "," << std::sqrt(var) << "," << values.size() << "\n";
  }
  return out.str();
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kDcMotor: return "dc_motor";
    case ExperimentKind::kTable1Cell: return "table1_cell";
    case ExperimentKind::kTable3Cell: return "table3_cell";
    case ExperimentKind::kCustom: return "custom";
  }
  return "unknown";
}

std::string to_string(DesignKind design) {
  return design == DesignKind::kMaxVariability ? "max_variability" : "random_uniform";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  if (s == "dc_motor") return ExperimentKind::kDcMotor;
  if (s == "table1_cell") return ExperimentKind::kTable1Cell;
  if (s == "table3_cell") return ExperimentKind::kTable3Cell;
  if (s == "custom") return ExperimentKind::kCustom;
  throw std::invalid_argument("unknown experiment kind: " + s);
}

DesignKind design_kind_from_string(const std::string& s) {
  if (s == "max_variability") return DesignKind::kMaxVariability;
  if (s == "random_uniform") return DesignKind::kRandomUniform;
  throw std::invalid_argument("unknown design kind: " + s);
}

}  // namespace ltisid
