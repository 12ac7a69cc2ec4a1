#include "ltisid/dataset.hpp"

#include <stdexcept>

#include "ltisid/rng.hpp"

namespace ltisid {

std::uint64_t fingerprint(const StateSpace& sys) {
  Fingerprint fp;
  fp.add(sys.state_dim()).add(sys.control_dim()).add(sys.output_dim());
  for (const Eigen::MatrixXd* m : {&sys.A, &sys.B, &sys.C}) {
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      for (Eigen::Index j = 0; j < m->cols(); ++j) fp.add((*m)(i, j));
    }
  }
  return fp.value();
}

std::uint64_t fingerprint(const TrajectorySet& data) {
  Fingerprint fp;
  fp.add(data.schema_version).add(data.system_fingerprint).add(data.obs_noise_var);
  fp.add(data.horizon).add(data.master_seed);
  for (const auto& spec : data.specs) {
    fp.add(spec.index);
    for (Eigen::Index i = 0; i < spec.variances.size(); ++i) fp.add(spec.variances(i));
    for (Eigen::Index i = 0; i < spec.mean.size(); ++i) fp.add(spec.mean(i));
  }
  for (const auto& traj : data.trajectories) {
    fp.add(traj.env_index).add(traj.seed);
    for (const Eigen::MatrixXd* m : {&traj.u, &traj.y}) {
      for (Eigen::Index i = 0; i < m->rows(); ++i) {
        for (Eigen::Index j = 0; j < m->cols(); ++j) fp.add((*m)(i, j));
      }
    }
  }
  return fp.value();
}

FittingView FittingView::of(const TrajectorySet& data) {
  FittingView view;
  view.envs.reserve(data.trajectories.size());
  for (const auto& traj : data.trajectories) {
    const auto idx = static_cast<std::size_t>(traj.env_index);
    if (idx >= data.specs.size() || data.specs[idx].index != traj.env_index) {
      throw std::invalid_argument("trajectory references a missing environment spec");
    }
    view.envs.push_back(Env{&traj.y, &data.specs[idx]});
  }
  return view;
}

std::size_t FittingView::pair_count() const {
  std::size_t n = 0;
  for (const auto& env : envs) {
    if (env.y->rows() >= 2) n += static_cast<std::size_t>(env.y->rows() - 1);
  }
  return n;
}

TrajectorySet generate_dataset(const StateSpace& sys, const std::vector<EnvironmentSpec>& specs,
                               int steps_per_env, double obs_noise_var, std::uint64_t seed,
                               bool allow_unstable) {
  check_consistent(sys);
  if (specs.empty()) throw std::invalid_argument("no environments given");
  if (steps_per_env < 1) throw std::invalid_argument("steps_per_env must be >= 1");
  for (const auto& spec : specs) {
    if (spec.control_dim() != sys.control_dim()) {
      throw std::invalid_argument("environment control dimension does not match the system");
    }
  }
  if (!allow_unstable) {
    const SystemReport report = validate_system(sys);
    if (!report.is_stable) {
      throw std::runtime_error("refusing to simulate an unstable system (spectral radius " +
                               std::to_string(report.spectral_radius) +
                               "); pass allow_unstable to override");
    }
  }

  TrajectorySet data;
  data.specs = specs;
  data.system_fingerprint = fingerprint(sys);
  data.obs_noise_var = obs_noise_var;
  data.horizon = steps_per_env;
  data.master_seed = seed;
  data.trajectories.resize(specs.size());

  // Every environment owns a derived seed, so the fan-out is deterministic
  // regardless of scheduling.
  const auto n = static_cast<long long>(specs.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (long long e = 0; e < n; ++e) {
    const auto idx = static_cast<std::size_t>(e);
    const std::uint64_t env_seed = derive_seed(seed, static_cast<std::uint64_t>(e));
    data.trajectories[idx] = simulate(sys, specs[idx], steps_per_env, obs_noise_var, env_seed);
  }
  return data;
}

}  // namespace ltisid
