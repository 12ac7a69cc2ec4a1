#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ltisid/estimator.hpp"

namespace ltisid {

enum class ExperimentKind { kDcMotor, kTable1Cell, kTable3Cell, kCustom };
enum class DesignKind { kMaxVariability, kRandomUniform };

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kTable1Cell;
  int d_u = 2;
  int d_x = 0;  // 0 means d_x = d_u (the square regime)
  DesignKind design = DesignKind::kMaxVariability;
  bool B_identity = false;
  bool C_identity = false;
  bool control_mean_nonzero = false;
  double obs_noise_var = 0.0;
  int steps_per_env = 4000;
  FitConfig fit;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  std::string output_dir;  // empty: no artifacts persisted

  std::uint64_t config_fingerprint() const;
};

/// Field defaults for a given experiment kind (the DC motor run uses the
/// motor hyperparameters, the synthetic grids the Table 1 ones).
ExperimentConfig default_config(ExperimentKind kind);

struct ResultRow {
  std::string config_fingerprint;
  ExperimentKind kind = ExperimentKind::kTable1Cell;
  int d_u = 0;
  DesignKind design = DesignKind::kMaxVariability;
  bool B_identity = false;
  bool C_identity = false;
  bool control_mean_nonzero = false;
  double obs_noise_var = 0.0;
  std::uint64_t seed = 0;
  double train_mcc = 0.0;
  double val_mcc = 0.0;
  double final_loss = 0.0;
  double wall_time_s = 0.0;
  bool diverged = false;
};

// Runs one experiment per seed: build or sample the system, build the
// design, generate data, center, fit on the first 90% of each
// environment's pairs, score MCC on both splits, persist artifacts.
// Seeds run in parallel; every row is fully determined by its seed.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

// Random controllable/observable stable system: Gaussian A rescaled to
// spectral radius 0.9; B and C identity (per flags) or Gaussian with
// singular values clamped to condition number <= 100. Resamples until
// validate_system passes, up to 100 attempts.
StateSpace sample_system(int d_x, int d_u, int d_y, std::uint64_t seed,
                         bool B_identity = false, bool C_identity = false);

/// Aggregated CSV: one line per distinct factor tuple with mean/std of the
/// validation MCC. group_by selects factor columns; empty means all.
std::string emit_table(const std::vector<ResultRow>& rows,
                       const std::vector<std::string>& group_by = {});

std::string result_rows_csv(const std::vector<ResultRow>& rows);

std::string to_string(ExperimentKind kind);
std::string to_string(DesignKind design);
ExperimentKind experiment_kind_from_string(const std::string& s);
DesignKind design_kind_from_string(const std::string& s);

}  // namespace ltisid
