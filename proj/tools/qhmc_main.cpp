#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qhmc/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool out_set = false;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file");
  cmd->add_option("--seed", f.seed, "root RNG seed (overrides config)")
      ->each([&](const std::string&) { f.seed_set = true; });
  cmd->add_option("--out", f.out_dir, "output directory (overrides config)")
      ->each([&](const std::string&) { f.out_set = true; });
  cmd->add_flag("--paper-scale", f.paper_scale, "run full paper-scale path counts");
}

qhmc::ExperimentConfig build_config(const CommonFlags& f, const std::string& fallback_id) {
  qhmc::ExperimentConfig cfg;
  if (!f.config_path.empty()) cfg = qhmc::load_experiment_config(f.config_path);
  if (cfg.id.empty()) cfg.id = fallback_id;
  if (f.seed_set) cfg.seed = f.seed;
  if (f.out_set) cfg.out_dir = f.out_dir;
  if (f.paper_scale) cfg.paper_scale = true;
  return cfg;
}

int report(const qhmc::RunArtifact& artifact) {
  std::cout << "metrics: " << artifact.metrics_path << "\n";
  if (!artifact.samples_path.empty())
    std::cout << "samples: " << artifact.samples_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qhmc: quantum-inspired HMC sampling toolkit"};
  app.require_subcommand(1);

  CommonFlags sample_flags, exp_flags, regress_flags, denoise_flags;
  std::string experiment_id;
  std::string data_path, image_path;
  double lambda = 10.0, mu = 100.0, density = 0.1;
  bool lambda_set = false, mu_set = false, density_set = false;

  CLI::App* sample = app.add_subcommand("sample", "run one sampling job from a config");
  add_common(sample, sample_flags);

  CLI::App* experiment = app.add_subcommand("experiment", "run a named paper experiment");
  add_common(experiment, exp_flags);
  experiment->add_option("--id", experiment_id, "experiment id (overrides config)");

  CLI::App* regress = app.add_subcommand("regress", "bridge regression on the diabetes data");
  add_common(regress, regress_flags);
  regress->add_option("--data", data_path, "diabetes data file");
  regress->add_option("--lambda", lambda, "sparsity weight")
      ->each([&](const std::string&) { lambda_set = true; });
  regress->add_option("--mu", mu, "data-fit weight")
      ->each([&](const std::string&) { mu_set = true; });

  CLI::App* denoise = app.add_subcommand("denoise", "low-rank + sparse image denoising");
  add_common(denoise, denoise_flags);
  denoise->add_option("--image", image_path, "input image (PGM or CSV)");
  denoise->add_option("--density", density, "salt-and-pepper corruption density")
      ->each([&](const std::string&) { density_set = true; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sample->parsed()) {
      if (sample_flags.config_path.empty()) {
        std::cerr << "sample: --config is required\n";
        return 2;
      }
      qhmc::Json cfg = qhmc::read_json_file(sample_flags.config_path);
      std::uint64_t seed =
          sample_flags.seed_set ? sample_flags.seed : cfg.value("seed", std::uint64_t{2024});
      std::string out = sample_flags.out_set
                            ? sample_flags.out_dir
                            : cfg.value("out_dir", std::string{"."});
      return report(qhmc::run_sample(cfg, seed, out));
    }
    if (experiment->parsed()) {
      qhmc::ExperimentConfig cfg = build_config(exp_flags, experiment_id);
      if (!experiment_id.empty()) cfg.id = experiment_id;
      if (cfg.id.empty()) {
        std::cerr << "experiment: provide --id or a config file with \"id\"\n";
        return 2;
      }
      return report(qhmc::run_experiment(cfg));
    }
    if (regress->parsed()) {
      qhmc::ExperimentConfig cfg = build_config(regress_flags, "bridge");
      cfg.id = "bridge";
      if (!data_path.empty()) cfg.data_path = data_path;
      if (lambda_set) cfg.params["lambda"] = lambda;
      if (mu_set) cfg.params["mu"] = mu;
      return report(qhmc::run_experiment(cfg));
    }
    if (denoise->parsed()) {
      qhmc::ExperimentConfig cfg = build_config(denoise_flags, "denoise");
      cfg.id = "denoise";
      if (!image_path.empty()) cfg.image_path = image_path;
      if (density_set) cfg.params["density"] = density;
      return report(qhmc::run_experiment(cfg));
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
