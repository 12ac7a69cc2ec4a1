#include "ltisid/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ltisid {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json entries = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) entries.push_back(m(i, j));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", entries}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw std::runtime_error("matrix entry count does not match its shape");
  }
  Eigen::MatrixXd m(rows, cols);
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = data[static_cast<std::size_t>(k++)];
  }
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = j[static_cast<std::size_t>(i)];
  return v;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

std::string env_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "env_%03d.csv", index);
  return buf;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

void save_state_space(const std::filesystem::path& path, const StateSpace& sys) {
  check_consistent(sys);
  json j{{"schema_version", 1},
         {"d_x", sys.state_dim()},
         {"d_u", sys.control_dim()},
         {"d_y", sys.output_dim()},
         {"A", matrix_to_json(sys.A)},
         {"B", matrix_to_json(sys.B)},
         {"C", matrix_to_json(sys.C)}};
  write_json_file(path, j);
}

StateSpace load_state_space(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  return StateSpace(matrix_from_json(j.at("A")), matrix_from_json(j.at("B")),
                    matrix_from_json(j.at("C")));
}

void save_dataset(const std::filesystem::path& dir, const TrajectorySet& data) {
  std::filesystem::create_directories(dir);

  json specs = json::array();
  for (const auto& spec : data.specs) {
    specs.push_back(json{{"index", spec.index},
                         {"variances", vector_to_json(spec.variances)},
                         {"mean", vector_to_json(spec.mean)}});
  }
  json trajs = json::array();
  for (const auto& traj : data.trajectories) {
    trajs.push_back(json{{"env_index", traj.env_index},
                         {"seed", traj.seed},
                         {"file", env_file_name(traj.env_index)}});
  }
  json meta{{"schema_version", data.schema_version},
            {"system_fingerprint", hex64(data.system_fingerprint)},
            {"system_fingerprint_raw", data.system_fingerprint},
            {"obs_noise_var", data.obs_noise_var},
            {"horizon", data.horizon},
            {"master_seed", data.master_seed},
            {"d_u", data.d_u()},
            {"d_y", data.d_y()},
            {"environments", specs},
            {"trajectories", trajs}};
  write_json_file(dir / "metadata.json", meta);

  for (const auto& traj : data.trajectories) {
    std::ofstream out(dir / env_file_name(traj.env_index));
    if (!out) throw std::runtime_error("cannot write trajectory CSV");
    out.precision(17);
    const auto d_u = traj.u.cols();
    const auto d_y = traj.y.cols();
    out << "t";
    for (Eigen::Index i = 0; i < d_u; ++i) out << ",u_" << (i + 1);
    for (Eigen::Index i = 0; i < d_y; ++i) out << ",y_" << (i + 1);
    out << "\n";
    for (Eigen::Index t = 0; t <= traj.u.rows(); ++t) {
      out << t;
      for (Eigen::Index i = 0; i < d_u; ++i) {
        out << ",";
        if (t < traj.u.rows()) out << traj.u(t, i);  // the last row has no control
      }
      for (Eigen::Index i = 0; i < d_y; ++i) out << "," << traj.y(t, i);
      out << "\n";
    }
  }
}

TrajectorySet load_dataset(const std::filesystem::path& dir) {
  const json meta = read_json_file(dir / "metadata.json");
  TrajectorySet data;
  data.schema_version = meta.at("schema_version");
  data.system_fingerprint = meta.at("system_fingerprint_raw");
  data.obs_noise_var = meta.at("obs_noise_var");
  data.horizon = meta.at("horizon");
  data.master_seed = meta.at("master_seed");
  const int d_u = meta.at("d_u");
  const int d_y = meta.at("d_y");

  for (const auto& spec_json : meta.at("environments")) {
    data.specs.emplace_back(spec_json.at("index").get<int>(),
                            vector_from_json(spec_json.at("variances")),
                            vector_from_json(spec_json.at("mean")));
  }

  for (const auto& traj_json : meta.at("trajectories")) {
    Trajectory traj;
    traj.env_index = traj_json.at("env_index");
    traj.seed = traj_json.at("seed");
    const std::filesystem::path file = dir / traj_json.at("file").get<std::string>();
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trajectory CSV");

    std::vector<std::vector<double>> u_rows, y_rows;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      // allow a trailing empty cell from "t,,y" style rows
      while (static_cast<int>(cells.size()) < 1 + d_u + d_y) cells.emplace_back();
      std::vector<double> u_row, y_row;
      bool has_u = true;
      for (int i = 0; i < d_u; ++i) {
        const std::string& c = cells[static_cast<std::size_t>(1 + i)];
        if (c.empty()) {
          has_u = false;
          break;
        }
        u_row.push_back(std::stod(c));
      }
      for (int i = 0; i < d_y; ++i) {
        y_row.push_back(std::stod(cells[static_cast<std::size_t>(1 + d_u + i)]));
      }
      if (has_u) u_rows.push_back(std::move(u_row));
      y_rows.push_back(std::move(y_row));
    }

    traj.u.resize(static_cast<Eigen::Index>(u_rows.size()), d_u);
    for (std::size_t t = 0; t < u_rows.size(); ++t) {
      for (int i = 0; i < d_u; ++i) traj.u(static_cast<Eigen::Index>(t), i) = u_rows[t][static_cast<std::size_t>(i)];
    }
    traj.y.resize(static_cast<Eigen::Index>(y_rows.size()), d_y);
    for (std::size_t t = 0; t < y_rows.size(); ++t) {
      for (int i = 0; i < d_y; ++i) traj.y(static_cast<Eigen::Index>(t), i) = y_rows[t][static_cast<std::size_t>(i)];
    }
    traj.x.resize(0, 0);  // states are not persisted
    data.trajectories.push_back(std::move(traj));
  }
  return data;
}

std::string to_string(DecoderInit init) {
  return init == DecoderInit::kOrthogonal ? "orthogonal" : "scaled_gaussian";
}

std::string to_string(LossWeighting weighting) {
  return weighting == LossWeighting::kPrecision ? "precision" : "covariance";
}

DecoderInit decoder_init_from_string(const std::string& s) {
  if (s == "orthogonal") return DecoderInit::kOrthogonal;
  if (s == "scaled_gaussian") return DecoderInit::kScaledGaussian;
  throw std::invalid_argument("unknown decoder init: " + s);
}

LossWeighting weighting_from_string(const std::string& s) {
  if (s == "precision") return LossWeighting::kPrecision;
  if (s == "covariance") return LossWeighting::kCovariance;
  throw std::invalid_argument("unknown loss weighting: " + s);
}

void save_decoder(const std::filesystem::path& path, const LinearDecoder& decoder,
                  const FitConfig& cfg, std::uint64_t dataset_fingerprint) {
  json j{{"schema_version", 1},
         {"d_u", decoder.control_dim()},
         {"d_y", decoder.output_dim()},
         {"M", matrix_to_json(decoder.M)},
         {"dataset_fingerprint", dataset_fingerprint},
         {"config",
          json{{"learning_rate", cfg.learning_rate},
               {"batch_size", cfg.batch_size},
               {"epochs", cfg.epochs},
               {"grad_clip_norm", cfg.grad_clip_norm},
               {"init", to_string(cfg.init)},
               {"seed", cfg.seed},
               {"include_log_det", cfg.include_log_det},
               {"weighting", to_string(cfg.weighting)}}}};
  write_json_file(path, j);
}

DecoderFile load_decoder(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  DecoderFile file;
  file.decoder = LinearDecoder(matrix_from_json(j.at("M")));
  file.dataset_fingerprint = j.at("dataset_fingerprint");
  const json& c = j.at("config");
  file.config.learning_rate = c.at("learning_rate");
  file.config.batch_size = c.at("batch_size");
  file.config.epochs = c.at("epochs");
  file.config.grad_clip_norm = c.at("grad_clip_norm");
  file.config.init = decoder_init_from_string(c.at("init"));
  file.config.seed = c.at("seed");
  file.config.include_log_det = c.at("include_log_det");
  file.config.weighting = weighting_from_string(c.at("weighting"));
  return file;
}

}  // namespace ltisid
