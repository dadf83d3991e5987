#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "qhmc/diagnostics.hpp"
#include "qhmc/experiment.hpp"
#include "qhmc/sampler.hpp"
#include "qhmc/targets.hpp"

using namespace qhmc;
namespace fs = std::filesystem;

namespace {

constexpr double kLog10E = 0.4342944819032518;
const char* kDiabetesPath = "data/diabetes.data";

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "qhmc_harness_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Json small_lp1d_params() {
  return Json{{"p", 1.0},        {"lambda", 1.0}, {"mu_list", {0.0}},
              {"sigma_m", 1.0},  {"hmc_log10_m", Json::array()},
              {"n_paths", 2000}, {"epsilon", 0.1}, {"steps", 10}};
}

}  // namespace

TEST_CASE("csv_field: RFC 4180 quoting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("3.14") == "3.14");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(csv_field("line\nbreak") == "\"line\nbreak\"");
  CHECK(csv_field("") == "");
}

TEST_CASE("samples CSV: write and read round-trip exactly") {
  fs::path dir = fresh_dir("csv_roundtrip");
  std::vector<Eigen::VectorXd> samples;
  Rng rng(1);
  for (int i = 0; i < 50; ++i) samples.push_back(rng.normal_vector(3));
  samples.push_back(Eigen::Vector3d(0.1, -1e-17, 12345.678901234567));

  std::string path = (dir / "samples.csv").string();
  write_samples_csv(path, samples, {"x0", "x1", "x2"});
  std::vector<Eigen::VectorXd> back = read_samples_csv(path);
  REQUIRE(back.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) CHECK(back[i] == samples[i]);
}

TEST_CASE("metrics JSON: serialize, reparse, reserialize byte-equal") {
  fs::path dir = fresh_dir("json_roundtrip");
  Json doc;
  doc["experiment"] = "demo";
  doc["seed"] = 7;
  doc["values"] = {1.5, -2.25, 1e-300};
  doc["nested"] = Json{{"a", "text with \"quotes\""}, {"b", true}};

  std::string p1 = (dir / "a.json").string();
  std::string p2 = (dir / "b.json").string();
  write_json_file(p1, doc);
  Json parsed = read_json_file(p1);
  write_json_file(p2, parsed);
  CHECK(slurp(p1) == slurp(p2));
  CHECK(parsed == doc);
}

TEST_CASE("mass spec JSON: every kind round-trips") {
  std::vector<MassSpec> specs = {
      MassSpec::dirac(MassMatrix::scalar(2.5)),
      MassSpec::scalar_log_normal(0.3, 1.2),
      MassSpec::diagonal_log_normal(Eigen::Vector2d(-3.0, -1.0), Eigen::Vector2d(1.0, 1.0)),
      MassSpec::mixture({0.5, 0.5},
                        {MassMatrix::scalar(0.1), MassMatrix::diagonal(Eigen::Vector2d(4.0, 1.0))}),
      MassSpec::scalar_log_normal(-2.0, 2.0).with_lower_bound(0.05)};
  for (const MassSpec& spec : specs) {
    MassSpec back = mass_spec_from_json(mass_spec_to_json(spec));
    CHECK(back.kind() == spec.kind());
    CHECK(mass_spec_to_json(back) == mass_spec_to_json(spec));
    // Behavioral check: identical draw sequences.
    Rng a(5), b(5);
    Eigen::Index d = spec.kind() == MassSpec::Kind::DiagonalLogNormal ||
                             spec.kind() == MassSpec::Kind::Mixture
                         ? 2
                         : 1;
    for (int i = 0; i < 10; ++i) CHECK(spec.sample(d, a) == back.sample(d, b));
  }
  CHECK_THROWS_AS(mass_spec_from_json(Json{{"kind", "nope"}}), std::invalid_argument);
}

TEST_CASE("run_experiment: provenance block echoes the configuration") {
  ExperimentConfig cfg;
  cfg.id = "lp1d";
  cfg.seed = 99;
  cfg.out_dir = fresh_dir("provenance").string();
  cfg.params = small_lp1d_params();
  RunArtifact art = run_experiment(cfg);

  CHECK(art.metrics["experiment"] == "lp1d");
  CHECK(art.metrics["seed"] == 99);
  CHECK(art.metrics["version"] == std::string(kVersion));
  CHECK(art.metrics["config"]["seed"] == 99);
  CHECK(art.metrics["config"]["params"]["n_paths"] == 2000);
  CHECK(fs::exists(art.metrics_path));
  CHECK(fs::exists(art.samples_path));
  // The on-disk metrics equal the in-memory ones.
  CHECK(read_json_file(art.metrics_path) == art.metrics);
}

TEST_CASE("run_experiment: metrics validate against the published schema") {
  Json schema = read_json_file("docs/metrics.schema.json");

  ExperimentConfig cfg;
  cfg.id = "lp1d";
  cfg.seed = 3;
  cfg.out_dir = fresh_dir("schema").string();
  cfg.params = small_lp1d_params();
  RunArtifact art = run_experiment(cfg);

  std::string why;
  CHECK(matches_schema(art.metrics, schema, &why));
  CHECK(why.empty());

  Json broken = art.metrics;
  broken.erase("runs");
  CHECK(!matches_schema(broken, schema, &why));
  CHECK(!why.empty());
}

TEST_CASE("run_experiment: recomputing W1 from the samples CSV matches the metrics") {
  ExperimentConfig cfg;
  cfg.id = "lp1d";
  cfg.seed = 11;
  cfg.out_dir = fresh_dir("recompute").string();
  cfg.params = small_lp1d_params();
  RunArtifact art = run_experiment(cfg);

  std::vector<Eigen::VectorXd> samples = read_samples_csv(art.samples_path);
  std::vector<double> xs;
  xs.reserve(samples.size());
  for (const auto& s : samples) xs.push_back(s[0]);
  Target t = lp_target(1.0, 1.0, 1);
  double recomputed = wasserstein1(xs, t.quantile);
  double reported = art.metrics["runs"]["sqhmc_mu0"]["w1"].get<double>();
  CHECK(std::abs(recomputed - reported) <= 1e-9);
}

TEST_CASE("run_experiment: same config and seed give byte-identical artifacts") {
  auto run_into = [](const std::string& name) {
    ExperimentConfig cfg;
    cfg.id = "lp1d";
    cfg.seed = 17;
    cfg.out_dir = fresh_dir(name).string();
    cfg.params = small_lp1d_params();
    return run_experiment(cfg);
  };
  RunArtifact a = run_into("det_a");
  RunArtifact b = run_into("det_b");
  CHECK(slurp(a.samples_path) == slurp(b.samples_path));

  // Metrics differ only in paths if at all; compare the documents directly.
  CHECK(a.metrics == b.metrics);
}

TEST_CASE("run_experiment: unknown experiment id is rejected") {
  ExperimentConfig cfg;
  cfg.id = "not_an_experiment";
  cfg.out_dir = fresh_dir("unknown").string();
  CHECK_THROWS_AS(run_experiment(cfg), std::invalid_argument);
}

TEST_CASE("load_experiment_config: parses files and rejects malformed ones") {
  fs::path dir = fresh_dir("config");
  std::string good = (dir / "good.json").string();
  write_json_file(good, Json{{"id", "double_well"},
                             {"seed", 5},
                             {"repetitions", 3},
                             {"params", Json{{"n_paths", 100}}}});
  ExperimentConfig cfg = load_experiment_config(good);
  CHECK(cfg.id == "double_well");
  CHECK(cfg.seed == 5);
  CHECK(cfg.repetitions == 3);
  CHECK(cfg.params["n_paths"] == 100);

  std::string no_id = (dir / "no_id.json").string();
  write_json_file(no_id, Json{{"seed", 5}});
  CHECK_THROWS_AS(load_experiment_config(no_id), std::invalid_argument);
  CHECK_THROWS_AS(load_experiment_config((dir / "missing.json").string()), std::runtime_error);
}

TEST_CASE("run_sample: one-off sampling run emits both artifacts") {
  fs::path dir = fresh_dir("run_sample");
  Json cfg;
  cfg["target"] = Json{{"kind", "gaussian"}, {"sigma_diag", {1.0}}};
  cfg["sampler"] = Json{{"epsilon", 0.1}, {"steps", 10}, {"n_paths", 5000}};
  RunArtifact art = run_sample(cfg, 7, dir.string());
  CHECK(fs::exists(art.samples_path));
  CHECK(fs::exists(art.metrics_path));
  double var = art.metrics["runs"]["sample"]["variance"].get<double>();
  CHECK(std::abs(var - 1.0) <= 0.1);
  CHECK(read_samples_csv(art.samples_path).size() == 5000);

  Json bad;
  bad["target"] = Json{{"kind", "gaussian"}, {"sigma_diag", {1.0}}};
  CHECK_THROWS_AS(run_sample(bad, 7, dir.string()), std::invalid_argument);
}

TEST_CASE("lp robustness: an extreme fixed mass loses to the matched-median law") {
  // U(x) = 20 |x|^{0.1}: fixed m = 1000 is far too heavy, while the scalar
  // mass law centered at the same median recovers.
  Target t = lp_target(0.1, 20.0, 1);
  SamplerConfig c;
  c.path.step_size = 0.03;
  c.path.steps = 5;
  c.n_paths = 20000;
  double mu_nat = std::log(1000.0);
  c.mass = MassSpec::scalar_log_normal(kLog10E * mu_nat, kLog10E * 2.0);
  Rng r1(31);
  Chain adaptive = qhmc_sample(c, t, Eigen::VectorXd::Ones(1), r1);

  SamplerConfig c2 = c;
  c2.mass = MassSpec::dirac(MassMatrix::scalar(1000.0));
  Rng r2(32);
  Chain fixed = qhmc_sample(c2, t, Eigen::VectorXd::Ones(1), r2);

  double w1_adaptive = wasserstein1(adaptive.coordinate(0), t.quantile);
  double w1_fixed = wasserstein1(fixed.coordinate(0), t.quantile);
  CHECK(w1_fixed > w1_adaptive);
}

TEST_CASE("bridge_regress: prior-free fit beats the zero-coefficient baseline") {
  if (!fs::exists(kDiabetesPath)) {
    MESSAGE("diabetes data file not present; skipping");
    return;
  }
  SamplerConfig c;
  c.path.step_size = 0.03;
  c.path.steps = 5;
  c.n_paths = 1000;
  BridgeResult res = bridge_regress(kDiabetesPath, 0.0, 100.0, c, 1);
  double zero_model = res.data.y_test.squaredNorm() /
                      static_cast<double>(res.data.y_test.size());
  CHECK(res.report.posterior_mean_mse <= zero_model);
  CHECK(res.chain.samples.size() == 1000);
}

TEST_CASE("bridge_regress: a missing data file names the expected format") {
  SamplerConfig c;
  try {
    bridge_regress("/nonexistent/diabetes.data", 10.0, 100.0, c, 1);
    FAIL("expected an exception");
  } catch (const std::runtime_error& e) {
    std::string msg = e.what();
    CHECK(msg.find("diabetes") != std::string::npos);
    CHECK(msg.find("442") != std::string::npos);
  }
}

TEST_CASE("denoise: a clean low-rank image is recovered nearly exactly") {
  ImageMatrix clean = make_synthetic_image(28, 28, 3);
  DenoiseParams p;
  p.eps0 = 0.3;
  SamplerConfig c;
  c.path.step_size = 0.001;
  c.path.steps = 5;
  c.mh_enabled = false;
  c.mass = MassSpec::dirac(MassMatrix::scalar(1000.0));
  DenoiseResult res = denoise(clean, 0.0, p, c, 1);
  CHECK(res.psnr_db >= 40.0);
  CHECK(res.reconstruction.rows() == 28);
  CHECK(res.reconstruction.cols() == 28);
  CHECK(res.reconstruction.minCoeff() >= 0.0);
  CHECK(res.reconstruction.maxCoeff() <= 1.0);
  CHECK(res.corrupted == clean);  // density 0 leaves the input untouched
}

TEST_CASE("worker_count: honors the thread-cap environment variable") {
  const char* saved = std::getenv("QHMC_KIT_THREADS");
  std::string saved_value = saved ? saved : "";

  setenv("QHMC_KIT_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("QHMC_KIT_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  unsetenv("QHMC_KIT_THREADS");
  CHECK(worker_count() >= 1);

  if (saved)
    setenv("QHMC_KIT_THREADS", saved_value.c_str(), 1);
  else
    unsetenv("QHMC_KIT_THREADS");
}
