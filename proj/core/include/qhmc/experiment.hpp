#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qhmc/dataset.hpp"
#include "qhmc/diagnostics.hpp"
#include "qhmc/image.hpp"
#include "qhmc/sampler.hpp"

namespace qhmc {

/// Insertion-ordered JSON so serialized artifacts are byte-stable.
using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// Named experiment plus its seed, output directory, and parameter overrides.
/// `params` is merged over the experiment's defaults key by key.
struct ExperimentConfig {
  std::string id;
  std::uint64_t seed = 2024;
  std::string out_dir = ".";
  bool paper_scale = false;
  int repetitions = 1;
  std::string data_path;   // bridge: diabetes file
  std::string image_path;  // denoise: input image (synthetic when empty)
  Json params = Json::object();
};

/// Parse a config file; CLI flags take precedence over file values.
ExperimentConfig load_experiment_config(const std::string& path);

struct RunArtifact {
  std::string samples_path;  // primary samples CSV
  std::string metrics_path;
  Json metrics;
};

/// Worker cap: QHMC_KIT_THREADS when set (>= 1), else hardware concurrency.
int worker_count();

/// Known ids: lp1d, spiky_smooth, asymmetric_well, double_well, ill_gaussian,
/// gmm2d, bridge, denoise, qsgnht_gauss.
RunArtifact run_experiment(const ExperimentConfig& config);

/// One-off sampling run described entirely by a JSON config (target + sampler).
RunArtifact run_sample(const Json& config, std::uint64_t seed, const std::string& out_dir);

struct BridgeResult {
  TestMseReport report;
  Chain chain;
  RegressionDataset data;
};

/// Standardize, 1000 gradient-descent burn-in paths, 1000 sampling paths.
BridgeResult bridge_regress(const std::string& data_path, double lambda, double mu,
                            SamplerConfig config, std::uint64_t seed,
                            std::uint64_t split_seed = 0);

struct DenoiseParams {
  double mu = 100.0;
  double lambda1 = 1.0;
  double lambda2 = 10.0;
  double p0 = 0.5;
  double eps0 = 1e-8;
  Eigen::Index rank = 20;
  int burn_in = 300;
  int collect = 200;
};

struct DenoiseResult {
  ImageMatrix corrupted;
  ImageMatrix reconstruction;  // posterior mean of AB, clamped to [0,1]
  double psnr_db = 0.0;
  double acceptance_rate = 0.0;
};

/// Corrupt (density > 0), SVD-initialize, sample, reconstruct, score.
DenoiseResult denoise(const ImageMatrix& clean, double density, const DenoiseParams& params,
                      SamplerConfig config, std::uint64_t seed);

/// Deterministic smooth low-rank test image in [0, 1].
ImageMatrix make_synthetic_image(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank);

// Artifact plumbing (RFC-4180 CSV, stable JSON).
std::string csv_field(const std::string& raw);
void write_samples_csv(const std::string& path, const std::vector<Eigen::VectorXd>& samples,
                       const std::vector<std::string>& columns);
std::vector<Eigen::VectorXd> read_samples_csv(const std::string& path);
void write_json_file(const std::string& path, const Json& value);
Json read_json_file(const std::string& path);

/// Mass spec <-> JSON for configs and provenance echoes.
MassSpec mass_spec_from_json(const Json& value);
Json mass_spec_to_json(const MassSpec& spec);

/// Structural check against the subset of JSON Schema used by
/// docs/metrics.schema.json (type, required, properties, items).
bool matches_schema(const Json& doc, const Json& schema, std::string* why = nullptr);

}  // namespace qhmc
