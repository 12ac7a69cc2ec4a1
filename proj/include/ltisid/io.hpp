#pragma once

#include <filesystem>
#include <string>

#include "ltisid/dataset.hpp"
#include "ltisid/estimator.hpp"

namespace ltisid {

/// System matrices as a JSON document (row-major entries).
void save_state_space(const std::filesystem::path& path, const StateSpace& sys);
StateSpace load_state_space(const std::filesystem::path& path);

// Dataset directory layout: metadata.json (schema version, system
// fingerprint, specs, horizon, noise variance, seeds) plus one CSV per
// environment with columns t, u_1..u_{d_u}, y_1..y_{d_y}. The final row
// carries y_T with empty control cells. States are not persisted.
void save_dataset(const std::filesystem::path& dir, const TrajectorySet& data);
TrajectorySet load_dataset(const std::filesystem::path& dir);

struct DecoderFile {
  LinearDecoder decoder;
  FitConfig config;
  std::uint64_t dataset_fingerprint = 0;
};

void save_decoder(const std::filesystem::path& path, const LinearDecoder& decoder,
                  const FitConfig& cfg, std::uint64_t dataset_fingerprint);
DecoderFile load_decoder(const std::filesystem::path& path);

std::string to_string(DecoderInit init);
std::string to_string(LossWeighting weighting);
DecoderInit decoder_init_from_string(const std::string& s);
LossWeighting weighting_from_string(const std::string& s);

}  // namespace ltisid
