#include "qhmc/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qhmc/targets.hpp"

namespace qhmc {

namespace {

std::string fmt_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double variance_of(const std::vector<double>& v) {
  double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / (v.size() - 1);
}

template <typename F>
void parallel_for(int n, F fn) {
  int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("QHMC_KIT_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string out = "\"";
  for (char c : raw) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

void write_samples_csv(const std::string& path, const std::vector<Eigen::VectorXd>& samples,
                       const std::vector<std::string>& columns) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_samples_csv: cannot open " + path);
  out << "path";
  for (const auto& c : columns) out << ',' << csv_field(c);
  out << '\n';
  for (std::size_t i = 0; i < samples.size(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < samples[i].size(); ++j) out << ',' << fmt_full(samples[i][j]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write_samples_csv: write failed for " + path);
}

std::vector<Eigen::VectorXd> read_samples_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_samples_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_samples_csv: empty " + path);
  std::vector<Eigen::VectorXd> samples;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    bool first = true;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      std::string field = line.substr(pos, comma == std::string::npos ? comma : comma - pos);
      if (!field.empty() && field.front() == '"')
        field = field.substr(1, field.size() - 2);
      if (!first) row.push_back(std::strtod(field.c_str(), nullptr));
      first = false;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    Eigen::VectorXd v(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) v[j] = row[j];
    samples.push_back(std::move(v));
  }
  return samples;
}

void write_json_file(const std::string& path, const Json& value) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_json_file: cannot open " + path);
  out << value.dump(2) << '\n';
  if (!out) throw std::runtime_error("write_json_file: write failed for " + path);
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_json_file: cannot open " + path);
  Json value;
  try {
    in >> value;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("read_json_file: " + path + ": " + e.what());
  }
  return value;
}

namespace {

MassMatrix mass_matrix_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "scalar") return MassMatrix::scalar(j.at("m").get<double>());
  if (kind == "diagonal") {
    auto d = j.at("diag").get<std::vector<double>>();
    Eigen::VectorXd v(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) v[i] = d[i];
    return MassMatrix::diagonal(std::move(v));
  }
  if (kind == "dense") {
    auto rows = j.at("values").get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
    return MassMatrix::dense(std::move(m));
  }
  throw std::invalid_argument("mass matrix: unknown kind " + kind);
}

Json mass_matrix_to_json(const MassMatrix& m) {
  Json j;
  switch (m.kind()) {
    case MassMatrix::Kind::Scalar:
      j["kind"] = "scalar";
      j["m"] = m.scalar_value();
      break;
    case MassMatrix::Kind::Diagonal: {
      j["kind"] = "diagonal";
      std::vector<double> d(m.diagonal_values().data(),
                            m.diagonal_values().data() + m.diagonal_values().size());
      j["diag"] = d;
      break;
    }
    case MassMatrix::Kind::Dense: {
      j["kind"] = "dense";
      std::vector<std::vector<double>> rows;
      for (Eigen::Index i = 0; i < m.dense_values().rows(); ++i)
        rows.emplace_back(m.dense_values().row(i).begin(), m.dense_values().row(i).end());
      j["values"] = rows;
      break;
    }
  }
  return j;
}

Eigen::VectorXd vector_from_json(const Json& j) {
  auto v = j.get<std::vector<double>>();
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

std::vector<double> vector_to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

MassSpec mass_spec_from_json(const Json& value) {
  std::string kind = value.at("kind").get<std::string>();
  MassSpec spec = MassSpec::dirac(MassMatrix::scalar(1.0));
  if (kind == "dirac") {
    spec = MassSpec::dirac(mass_matrix_from_json(value.at("component")));
  } else if (kind == "scalar_log_normal") {
    spec = MassSpec::scalar_log_normal(value.at("mu").get<double>(),
                                       value.at("sigma").get<double>());
  } else if (kind == "diagonal_log_normal") {
    spec = MassSpec::diagonal_log_normal(vector_from_json(value.at("mu")),
                                         vector_from_json(value.at("sigma")));
  } else if (kind == "mixture") {
    std::vector<MassMatrix> comps;
    for (const auto& c : value.at("components")) comps.push_back(mass_matrix_from_json(c));
    spec = MassSpec::mixture(value.at("weights").get<std::vector<double>>(),
                             std::move(comps));
  } else {
    throw std::invalid_argument("mass spec: unknown kind " + kind);
  }
  if (value.contains("lower_bound")) spec.with_lower_bound(value["lower_bound"].get<double>());
  spec.validate();
  return spec;
}

Json mass_spec_to_json(const MassSpec& spec) {
  Json j;
  switch (spec.kind()) {
    case MassSpec::Kind::Dirac:
      j["kind"] = "dirac";
      j["component"] = mass_matrix_to_json(spec.components().front());
      break;
    case MassSpec::Kind::ScalarLogNormal:
      j["kind"] = "scalar_log_normal";
      j["mu"] = spec.scalar_mu();
      j["sigma"] = spec.scalar_sigma();
      break;
    case MassSpec::Kind::DiagonalLogNormal:
      j["kind"] = "diagonal_log_normal";
      j["mu"] = vector_to_std(spec.diagonal_mu());
      j["sigma"] = vector_to_std(spec.diagonal_sigma());
      break;
    case MassSpec::Kind::Mixture: {
      j["kind"] = "mixture";
      j["weights"] = spec.weights();
      Json comps = Json::array();
      for (const auto& c : spec.components()) comps.push_back(mass_matrix_to_json(c));
      j["components"] = comps;
      break;
    }
  }
  if (spec.lower_bound()) j["lower_bound"] = *spec.lower_bound();
  return j;
}

bool matches_schema(const Json& doc, const Json& schema, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (schema.contains("type")) {
    std::string t = schema["type"].get<std::string>();
    bool ok = (t == "object" && doc.is_object()) || (t == "array" && doc.is_array()) ||
              (t == "string" && doc.is_string()) || (t == "boolean" && doc.is_boolean()) ||
              (t == "number" && doc.is_number()) ||
              (t == "integer" && (doc.is_number_integer() || doc.is_number_unsigned()));
    if (!ok) return fail("expected type " + t + ", got " + std::string(doc.type_name()));
  }
  if (schema.contains("required")) {
    for (const auto& key : schema["required"])
      if (!doc.contains(key.get<std::string>()))
        return fail("missing required key " + key.get<std::string>());
  }
  if (schema.contains("properties") && doc.is_object()) {
    for (auto it = schema["properties"].begin(); it != schema["properties"].end(); ++it)
      if (doc.contains(it.key())) {
        std::string inner;
        if (!matches_schema(doc[it.key()], it.value(), &inner))
          return fail(it.key() + ": " + inner);
      }
  }
  if (schema.contains("additionalProperties") && doc.is_object() &&
      schema["additionalProperties"].is_object()) {
    const auto& props =
        schema.contains("properties") ? schema["properties"] : Json::object();
    for (auto it = doc.begin(); it != doc.end(); ++it)
      if (!props.contains(it.key())) {
        std::string inner;
        if (!matches_schema(it.value(), schema["additionalProperties"], &inner))
          return fail(it.key() + ": " + inner);
      }
  }
  if (schema.contains("items") && doc.is_array()) {
    for (const auto& el : doc) {
      std::string inner;
      if (!matches_schema(el, schema["items"], &inner)) return fail("item: " + inner);
    }
  }
  if (why) why->clear();
  return true;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  Json j = read_json_file(path);
  ExperimentConfig cfg;
  if (!j.is_object() || !j.contains("id"))
    throw std::invalid_argument("experiment config: missing \"id\" in " + path);
  cfg.id = j["id"].get<std::string>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("paper_scale")) cfg.paper_scale = j["paper_scale"].get<bool>();
  if (j.contains("repetitions")) cfg.repetitions = j["repetitions"].get<int>();
  if (j.contains("data_path")) cfg.data_path = j["data_path"].get<std::string>();
  if (j.contains("image_path")) cfg.image_path = j["image_path"].get<std::string>();
  if (j.contains("params")) {
    if (!j["params"].is_object())
      throw std::invalid_argument("experiment config: \"params\" must be an object");
    cfg.params = j["params"];
  }
  return cfg;
}

namespace {

struct LabeledRun {
  std::string label;
  Json metrics;
  std::vector<Eigen::VectorXd> samples;  // empty: no per-run samples file
};

SamplerConfig base_sampler(const Json& p) {
  SamplerConfig c;
  c.path.step_size = p.value("epsilon", 0.03);
  c.path.steps = p.value("steps", 5);
  c.path.exp_tau = p.value("exp_tau", 0.0);
  c.n_paths = p.value("n_paths", 1);
  c.burn_in = p.value("burn_in", 0);
  c.mh_enabled = p.value("mh", true);
  return c;
}

Json merged_params(Json defaults, const Json& overrides) {
  defaults.update(overrides);
  return defaults;
}

Json run_stats_1d(const Chain& chain, const Target& target) {
  std::vector<double> xs = chain.coordinate(0);
  Json m;
  m["n_samples"] = xs.size();
  m["acceptance_rate"] = chain.acceptance_rate;
  m["mean"] = mean_of(xs);
  m["variance"] = variance_of(xs);
  if (target.has_exact_density()) m["w1"] = wasserstein1(xs, target.quantile);
  return m;
}

// Experiment-level scalar mass laws are specified as ln m ~ N(mu, sigma^2);
// MassSpec::scalar_log_normal takes base-10 parameters, so rescale by log10(e).
MassSpec scalar_mass_nat(double mu, double sigma) {
  constexpr double kLog10E = 0.4342944819032518;
  return MassSpec::scalar_log_normal(kLog10E * mu, kLog10E * sigma);
}

std::vector<std::string> coordinate_columns(Eigen::Index d) {
  std::vector<std::string> cols;
  for (Eigen::Index i = 0; i < d; ++i) cols.push_back("x" + std::to_string(i));
  return cols;
}

// lp1d: 1-D lp posterior under S-QHMC mass sweeps plus fixed-mass HMC controls.
std::vector<LabeledRun> experiment_lp1d(const Json& p, std::uint64_t seed) {
  Target target = lp_target(p.at("p").get<double>(), p.at("lambda").get<double>(), 1);
  SamplerConfig base = base_sampler(p);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, p.value("x_init", 1.0));

  std::vector<LabeledRun> runs;
  std::uint64_t stream = 0;
  for (double mu : p.at("mu_list").get<std::vector<double>>()) {
    SamplerConfig c = base;
    c.mass = scalar_mass_nat(mu, p.at("sigma_m").get<double>());
    Rng rng = Rng(seed).split(stream++);
    Chain chain = qhmc_sample(c, target, x0, rng);
    runs.push_back({"sqhmc_mu" + fmt_short(mu), run_stats_1d(chain, target),
                    std::move(chain.samples)});
  }
  for (double e : p.at("hmc_log10_m").get<std::vector<double>>()) {
    SamplerConfig c = base;
    c.mass = MassSpec::dirac(MassMatrix::scalar(std::pow(10.0, e)));
    Rng rng = Rng(seed).split(stream++);
    Chain chain = qhmc_sample(c, target, x0, rng);
    runs.push_back({"hmc_m1e" + fmt_short(e), run_stats_1d(chain, target),
                    std::move(chain.samples)});
  }
  return runs;
}

// spiky_smooth: |x|+999x0 target; S-QHMC vs fixed-mass HMC, optional repeats.
std::vector<LabeledRun> experiment_spiky_smooth(const Json& p, std::uint64_t seed,
                                                int repetitions) {
  Target target = spiky_smooth_target(p.at("x0").get<double>());
  SamplerConfig base = base_sampler(p);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, p.value("x_init", 1.0));

  struct Setting {
    std::string label;
    MassSpec mass;
  };
  std::vector<Setting> settings;
  settings.push_back({"sqhmc_mu" + fmt_short(p.at("mu_m").get<double>()),
                      scalar_mass_nat(p.at("mu_m").get<double>(),
                                      p.at("sigma_m").get<double>())});
  for (double e : p.at("hmc_log10_m").get<std::vector<double>>())
    settings.push_back(
        {"hmc_m1e" + fmt_short(e), MassSpec::dirac(MassMatrix::scalar(std::pow(10.0, e)))});

  std::vector<LabeledRun> runs;
  for (std::size_t s = 0; s < settings.size(); ++s) {
    SamplerConfig c = base;
    c.mass = settings[s].mass;
    std::vector<std::vector<double>> w1_runs;
    Json metrics;
    std::vector<Eigen::VectorXd> kept;
    for (int rep = 0; rep < repetitions; ++rep) {
      Rng rng = Rng(seed).split(s * 1000 + rep);
      Chain chain = qhmc_sample(c, target, x0, rng);
      Json stats = run_stats_1d(chain, target);
      if (rep == 0) {
        metrics = stats;
        kept = std::move(chain.samples);
      }
      w1_runs.push_back({stats["w1"].get<double>()});
    }
    if (repetitions > 1) {
      MomentReport rep = moment_report(w1_runs);
      metrics["w1_mean"] = rep.mean[0];
      metrics["w1_std"] = rep.stdev[0];
      metrics["repetitions"] = repetitions;
    }
    runs.push_back({settings[s].label, metrics, std::move(kept)});
  }
  return runs;
}

// asymmetric_well: Bernoulli mass mixture (implicit adaptation) vs fixed mass.
std::vector<LabeledRun> experiment_asymmetric_well(const Json& p, std::uint64_t seed) {
  Target target = asymmetric_well_target();
  SamplerConfig base = base_sampler(p);
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, p.value("x_init", 0.0));

  auto masses = p.at("masses").get<std::vector<double>>();
  std::vector<MassMatrix> comps;
  for (double m : masses) comps.push_back(MassMatrix::scalar(m));
  std::vector<double> w(masses.size(), 1.0 / masses.size());

  std::vector<LabeledRun> runs;
  {
    SamplerConfig c = base;
    c.mass = MassSpec::mixture(w, comps);
    Rng rng = Rng(seed).split(0);
    Chain chain = qhmc_sample(c, target, x0, rng);
    runs.push_back({"mqhmc", run_stats_1d(chain, target), std::move(chain.samples)});
  }
  {
    SamplerConfig c = base;
    c.mass = MassSpec::dirac(MassMatrix::scalar(p.value("hmc_m", 1.0)));
    Rng rng = Rng(seed).split(1);
    Chain chain = qhmc_sample(c, target, x0, rng);
    runs.push_back({"hmc", run_stats_1d(chain, target), std::move(chain.samples)});
  }
  return runs;
}

// double_well: escape curves for 200 particles per log-mass spread.
std::vector<LabeledRun> experiment_double_well(const Json& p, std::uint64_t seed) {
  Target target = double_well_target();
  SamplerConfig base = base_sampler(p);
  base.n_paths = p.at("iterations").get<int>();
  const int particles = p.at("particles").get<int>();
  const int interval = p.at("check_interval").get<int>();
  const double mu_m = p.at("mu_m").get<double>();
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, p.value("x_init", std::sqrt(2.0)));

  std::vector<LabeledRun> runs;
  auto sigma_list = p.at("sigma_list").get<std::vector<double>>();
  for (std::size_t s = 0; s < sigma_list.size(); ++s) {
    SamplerConfig c = base;
    c.mass = sigma_list[s] == 0.0
                 ? MassSpec::dirac(MassMatrix::scalar(std::exp(mu_m)))
                 : scalar_mass_nat(mu_m, sigma_list[s]);
    std::vector<Chain> chains(particles);
    parallel_for(particles, [&](int i) {
      Rng rng = Rng(seed).split(s * 100000 + i);
      chains[i] = qhmc_sample(c, target, x0, rng);
    });
    std::vector<double> curve = escape_ratio(chains, 0.0, interval);
    Json m;
    m["particles"] = particles;
    m["escape_curve"] = curve;
    m["escape_final"] = curve.empty() ? 0.0 : curve.back();
    runs.push_back({"sigma" + fmt_short(sigma_list[s]), m, std::move(chains.front().samples)});
  }
  return runs;
}

Json run_stats_nd(const Chain& chain) {
  Json m;
  m["n_samples"] = chain.samples.size();
  m["acceptance_rate"] = chain.acceptance_rate;
  const Eigen::Index d = chain.samples.front().size();
  std::vector<double> means, vars;
  for (Eigen::Index i = 0; i < d; ++i) {
    std::vector<double> xs = chain.coordinate(i);
    means.push_back(mean_of(xs));
    vars.push_back(variance_of(xs));
  }
  m["mean"] = means;
  m["variance"] = vars;
  return m;
}

// ill_gaussian: Sigma = diag(100, 1); per-coordinate D-QHMC vs scalar S-QHMC.
std::vector<LabeledRun> experiment_ill_gaussian(const Json& p, std::uint64_t seed) {
  Eigen::VectorXd sd = vector_from_json(p.at("sigma_diag"));
  Target target = gaussian_target(sd.asDiagonal());
  SamplerConfig base = base_sampler(p);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(sd.size());

  std::vector<LabeledRun> runs;
  {
    SamplerConfig c = base;
    c.mass = MassSpec::diagonal_log_normal(vector_from_json(p.at("dqhmc_mu")),
                                           vector_from_json(p.at("dqhmc_sigma")));
    Rng rng = Rng(seed).split(0);
    Chain chain = qhmc_sample(c, target, x0, rng);
    runs.push_back({"dqhmc", run_stats_nd(chain), std::move(chain.samples)});
  }
  {
    SamplerConfig c = base;
    c.mass = scalar_mass_nat(p.at("sqhmc_mu").get<double>(),
                             p.at("sqhmc_sigma").get<double>());
    Rng rng = Rng(seed).split(1);
    Chain chain = qhmc_sample(c, target, x0, rng);
    runs.push_back({"sqhmc", run_stats_nd(chain), std::move(chain.samples)});
  }
  return runs;
}

// gmm2d: cross-shaped two-component zero-mean mixture; M-QHMC vs one fixed mass.
std::vector<LabeledRun> experiment_gmm2d(const Json& p, std::uint64_t seed) {
  Eigen::VectorXd s1 = vector_from_json(p.at("sigma1_diag"));
  Eigen::VectorXd s2 = vector_from_json(p.at("sigma2_diag"));
  std::vector<Eigen::MatrixXd> sigmas{Eigen::MatrixXd(s1.asDiagonal()),
                                      Eigen::MatrixXd(s2.asDiagonal())};
  std::vector<double> weights = p.at("weights").get<std::vector<double>>();
  Target target = gaussian_mixture_target(weights, sigmas);
  SamplerConfig base = base_sampler(p);
  Eigen::VectorXd x0 = vector_from_json(p.at("x_init"));

  const double mass_scale = p.at("mass_scale").get<double>();
  std::vector<MassMatrix> comps;
  for (const auto& s : sigmas)
    comps.push_back(
        MassMatrix::diagonal(mass_scale * s.diagonal().cwiseInverse()));

  // Both components share the normalization det(Sigma), so responsibility
  // reduces to the smaller quadratic form.
  auto mode_fractions = [&](const Chain& chain) {
    std::vector<long> counts(sigmas.size(), 0);
    for (const auto& x : chain.samples) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t i = 0; i < sigmas.size(); ++i) {
        double q = x.dot(sigmas[i].diagonal().cwiseInverse().cwiseProduct(x));
        if (q < best) {
          best = q;
          arg = i;
        }
      }
      ++counts[arg];
    }
    std::vector<double> f;
    for (long c : counts) f.push_back(static_cast<double>(c) / chain.samples.size());
    return f;
  };

  std::vector<LabeledRun> runs;
  {
    SamplerConfig c = base;
    c.mass = MassSpec::mixture(weights, comps);
    Rng rng = Rng(seed).split(0);
    Chain chain = qhmc_sample(c, target, x0, rng);
    Json m = run_stats_nd(chain);
    m["mode_fractions"] = mode_fractions(chain);
    runs.push_back({"mqhmc", m, std::move(chain.samples)});
  }
  {
    SamplerConfig c = base;
    double hmc_m = p.value("hmc_scalar_m", 0.0);
    c.mass = hmc_m > 0.0 ? MassSpec::dirac(MassMatrix::scalar(hmc_m))
                         : MassSpec::dirac(comps.front());
    Rng rng = Rng(seed).split(1);
    Chain chain = qhmc_sample(c, target, x0, rng);
    Json m = run_stats_nd(chain);
    m["mode_fractions"] = mode_fractions(chain);
    runs.push_back({"hmc", m, std::move(chain.samples)});
  }
  return runs;
}

// qsgnht_gauss: minibatched 1-D Gaussian; thermostat vs frozen-xi control.
std::vector<LabeledRun> experiment_qsgnht_gauss(const Json& p, std::uint64_t seed) {
  const int n_records = p.at("n_records").get<int>();
  const double scale = p.at("center_scale").get<double>();
  Rng center_rng = Rng(seed).split(999);
  Eigen::VectorXd centers = scale * center_rng.normal_vector(n_records);
  centers.array() -= centers.mean();  // full-batch target is exactly N(0, 1)
  StochasticTarget target = quadratic_record_target(centers);

  SamplerConfig base = base_sampler(p);
  base.batch_size = p.at("batch_size").get<int>();
  base.thermal_mass = p.value("thermal_mass", 1.0);
  base.diffusion = p.value("diffusion", 1.0);
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(1);

  auto xi_summary = [](const Chain& chain) {
    std::vector<double> tail(chain.xi_trace.begin() + chain.xi_trace.size() / 2,
                             chain.xi_trace.end());
    return mean_of(tail);
  };

  std::vector<LabeledRun> runs;
  {
    Rng rng = Rng(seed).split(0);
    Chain chain = qsgnht_sample(base, target, x0, rng);
    Json m;
    m["n_samples"] = chain.samples.size();
    m["acceptance_rate"] = chain.acceptance_rate;
    m["mean"] = mean_of(chain.coordinate(0));
    m["variance"] = variance_of(chain.coordinate(0));
    m["xi_mean"] = xi_summary(chain);
    runs.push_back({"qsgnht", m, std::move(chain.samples)});
  }
  {
    // Naive control: xi pinned near 0 (huge thermal mass), no injected noise.
    SamplerConfig c = base;
    c.diffusion = 0.0;
    c.thermal_mass = 1e12;
    Rng rng = Rng(seed).split(1);
    Chain chain = qsgnht_sample(c, target, x0, rng);
    Json m;
    m["n_samples"] = chain.samples.size();
    m["acceptance_rate"] = chain.acceptance_rate;
    m["mean"] = mean_of(chain.coordinate(0));
    m["variance"] = variance_of(chain.coordinate(0));
    m["xi_mean"] = xi_summary(chain);
    runs.push_back({"control", m, std::move(chain.samples)});
  }
  return runs;
}

// bridge: diabetes regression across split seeds for two mass specs.
std::vector<LabeledRun> experiment_bridge(const Json& p, std::uint64_t seed,
                                          const std::string& data_path) {
  SamplerConfig base = base_sampler(p);
  const double lambda = p.at("lambda").get<double>();
  const double mu = p.at("mu").get<double>();
  auto split_seeds = p.at("split_seeds").get<std::vector<std::uint64_t>>();

  struct Setting {
    std::string label;
    MassSpec mass;
  };
  std::vector<Setting> settings{
      {"hmc", MassSpec::dirac(MassMatrix::scalar(std::pow(10.0, p.at("hmc_log10_m").get<double>())))},
      {"sqhmc", scalar_mass_nat(p.at("sqhmc_mu").get<double>(),
                                p.at("sqhmc_sigma").get<double>())}};

  std::vector<LabeledRun> runs;
  for (const auto& setting : settings) {
    std::vector<double> mses;
    for (std::size_t i = 0; i < split_seeds.size(); ++i) {
      SamplerConfig c = base;
      c.mass = setting.mass;
      BridgeResult res =
          bridge_regress(data_path, lambda, mu, c, seed + i, split_seeds[i]);
      Json m;
      m["split_seed"] = split_seeds[i];
      // reported on the model's half-quadratic loss scale, ||r||^2 / (2 n_test)
      m["test_mse"] = 0.5 * res.report.posterior_mean_mse;
      m["per_sample_mse_mean"] = 0.5 * mean_of(res.report.per_sample_mse);
      m["acceptance_rate"] = res.chain.acceptance_rate;
      mses.push_back(0.5 * res.report.posterior_mean_mse);
      std::vector<Eigen::VectorXd> samples;
      if (runs.empty()) samples = std::move(res.chain.samples);
      runs.push_back({setting.label + "_split" + std::to_string(split_seeds[i]), m,
                      std::move(samples)});
    }
    Json summary;
    summary["test_mse_mean"] = mean_of(mses);
    summary["test_mse_per_seed"] = mses;
    runs.push_back({setting.label + "_summary", summary, {}});
  }
  return runs;
}

// denoise: corrupted low-rank image; PSNR per mass setting.
std::vector<LabeledRun> experiment_denoise(const Json& p, std::uint64_t seed,
                                           const std::string& image_path,
                                           const std::string& out_dir,
                                           const std::string& id) {
  ImageMatrix clean = image_path.empty()
                          ? make_synthetic_image(p.value("rows", 28), p.value("cols", 28),
                                                 p.value("clean_rank", 3))
                          : load_image(image_path);
  DenoiseParams dp;
  dp.mu = p.at("mu").get<double>();
  dp.lambda1 = p.at("lambda1").get<double>();
  dp.lambda2 = p.at("lambda2").get<double>();
  dp.p0 = p.at("p0").get<double>();
  dp.eps0 = p.value("eps0", dp.eps0);
  dp.rank = p.at("rank").get<Eigen::Index>();
  dp.burn_in = p.at("burn_in").get<int>();
  dp.collect = p.at("collect").get<int>();
  const double density = p.at("density").get<double>();
  SamplerConfig base = base_sampler(p);

  struct Setting {
    std::string label;
    MassSpec mass;
  };
  std::vector<Setting> settings;
  for (double mu_m : p.at("sqhmc_mu_list").get<std::vector<double>>())
    settings.push_back({"sqhmc_mu" + fmt_short(mu_m),
                        scalar_mass_nat(mu_m, p.at("sqhmc_sigma").get<double>())});
  for (double e : p.at("hmc_log10_m").get<std::vector<double>>())
    settings.push_back(
        {"hmc_m1e" + fmt_short(e), MassSpec::dirac(MassMatrix::scalar(std::pow(10.0, e)))});

  std::vector<LabeledRun> runs;
  bool wrote_inputs = false;
  for (const auto& setting : settings) {
    SamplerConfig c = base;
    c.mass = setting.mass;
    DenoiseResult res = denoise(clean, density, dp, c, seed);
    if (!wrote_inputs) {
      save_pgm(out_dir + "/" + id + "_clean.pgm", clean);
      save_pgm(out_dir + "/" + id + "_corrupted.pgm", res.corrupted);
      wrote_inputs = true;
    }
    save_pgm(out_dir + "/" + id + "_" + setting.label + "_recon.pgm", res.reconstruction);
    Json m;
    m["psnr_db"] = res.psnr_db;
    m["acceptance_rate"] = res.acceptance_rate;
    m["psnr_corrupted_db"] = psnr(res.corrupted, clean);
    runs.push_back({setting.label, m, {}});
  }
  return runs;
}

Json default_params(const std::string& id) {
  Json p = Json::object();
  if (id == "lp1d") {
    p["p"] = 1.0;
    p["lambda"] = 1.0;
    p["epsilon"] = 0.1;
    p["steps"] = 20;
    p["n_paths"] = 200000;
    p["sigma_m"] = 1.0;
    p["mu_list"] = Json::array({-2.0, 0.0, 2.0});
    p["hmc_log10_m"] = Json::array();
  } else if (id == "spiky_smooth") {
    p["x0"] = std::log(1001.0) / 1000.0;
    p["mu_m"] = 0.0;
    p["sigma_m"] = 2.0;
    p["hmc_log10_m"] = Json::array({-2.0, 0.0, 2.0});
    p["epsilon"] = 0.03;
    p["steps"] = 5;
    p["n_paths"] = 50000;
  } else if (id == "asymmetric_well") {
    p["masses"] = Json::array({0.1, 1.0});
    p["hmc_m"] = 1.0;
    p["epsilon"] = 0.03;
    p["steps"] = 5;
    p["n_paths"] = 20000;
  } else if (id == "double_well") {
    p["particles"] = 200;
    p["iterations"] = 2500;
    p["check_interval"] = 50;
    p["sigma_list"] = Json::array({0.0, 1.0, 2.0});
    p["mu_m"] = 0.0;
    p["epsilon"] = 0.03;
    p["steps"] = 5;
  } else if (id == "ill_gaussian") {
    p["sigma_diag"] = Json::array({100.0, 1.0});
    p["dqhmc_mu"] = Json::array({-3.0, -1.0});
    p["dqhmc_sigma"] = Json::array({1.0, 1.0});
    p["sqhmc_mu"] = -2.0;
    p["sqhmc_sigma"] = 1.0;
    p["epsilon"] = 0.03;
    p["steps"] = 5;
    p["n_paths"] = 10000;
  } else if (id == "gmm2d") {
    p["weights"] = Json::array({0.5, 0.5});
    p["sigma1_diag"] = Json::array({1.0, 100.0});
    p["sigma2_diag"] = Json::array({100.0, 1.0});
    p["mass_scale"] = 0.1;
    p["hmc_scalar_m"] = 100.0;
    p["x_init"] = Json::array({0.0, 5.0});
    p["epsilon"] = 0.03;
    p["steps"] = 5;
    p["n_paths"] = 20000;
  } else if (id == "qsgnht_gauss") {
    p["n_records"] = 1000;
    p["batch_size"] = 64;
    p["center_scale"] = 5.0;
    p["thermal_mass"] = 1.0;
    p["diffusion"] = 1.0;
    p["mh"] = false;
    p["epsilon"] = 0.015;
    p["steps"] = 100;
    p["burn_in"] = 2000;
    p["n_paths"] = 20000;
  } else if (id == "bridge") {
    p["lambda"] = 10.0;
    p["mu"] = 100.0;
    p["split_seeds"] = Json::array({1, 2, 3, 4, 5});
    p["hmc_log10_m"] = 0.0;
    p["sqhmc_mu"] = 0.0;
    p["sqhmc_sigma"] = 1.0;
    p["epsilon"] = 0.03;
    p["steps"] = 5;
  } else if (id == "denoise") {
    p["density"] = 0.1;
    p["mu"] = 100.0;
    p["lambda1"] = 1.0;
    p["lambda2"] = 10.0;
    p["p0"] = 0.5;
    p["rank"] = 20;
    p["burn_in"] = 300;
    p["collect"] = 200;
    p["sqhmc_mu_list"] = Json::array({0.0, 1.0, 2.0});
    p["sqhmc_sigma"] = 1.0;
    p["hmc_log10_m"] = Json::array({-2.5, -2.0});
    p["eps0"] = 0.3;
    p["mh"] = false;
    p["epsilon"] = 0.003;
    p["steps"] = 5;
  } else {
    throw std::invalid_argument("run_experiment: unknown experiment id " + id);
  }
  return p;
}

}  // namespace

RunArtifact run_experiment(const ExperimentConfig& config) {
  Json params = merged_params(default_params(config.id), config.params);
  std::filesystem::create_directories(config.out_dir);

  std::string data_path = config.data_path.empty() ? "data/diabetes.data" : config.data_path;

  std::vector<LabeledRun> runs;
  if (config.id == "lp1d") {
    runs = experiment_lp1d(params, config.seed);
  } else if (config.id == "spiky_smooth") {
    runs = experiment_spiky_smooth(params, config.seed, std::max(1, config.repetitions));
  } else if (config.id == "asymmetric_well") {
    runs = experiment_asymmetric_well(params, config.seed);
  } else if (config.id == "double_well") {
    runs = experiment_double_well(params, config.seed);
  } else if (config.id == "ill_gaussian") {
    runs = experiment_ill_gaussian(params, config.seed);
  } else if (config.id == "gmm2d") {
    runs = experiment_gmm2d(params, config.seed);
  } else if (config.id == "qsgnht_gauss") {
    runs = experiment_qsgnht_gauss(params, config.seed);
  } else if (config.id == "bridge") {
    runs = experiment_bridge(params, config.seed, data_path);
  } else if (config.id == "denoise") {
    runs = experiment_denoise(params, config.seed, config.image_path, config.out_dir,
                              config.id);
  } else {
    throw std::invalid_argument("run_experiment: unknown experiment id " + config.id);
  }

  Json metrics;
  metrics["experiment"] = config.id;
  metrics["version"] = kVersion;
  metrics["seed"] = config.seed;
  Json echo;
  echo["id"] = config.id;
  echo["seed"] = config.seed;
  echo["paper_scale"] = config.paper_scale;
  echo["repetitions"] = config.repetitions;
  if (config.id == "bridge") echo["data_path"] = data_path;
  if (!config.image_path.empty()) echo["image_path"] = config.image_path;
  echo["params"] = params;
  metrics["config"] = echo;

  Json run_block = Json::object();
  Json files = Json::object();
  std::string primary_samples;
  for (auto& run : runs) {
    run_block[run.label] = run.metrics;
    if (run.samples.empty()) continue;
    std::string name = config.id + "_" + run.label + "_samples.csv";
    std::string path = config.out_dir + "/" + name;
    write_samples_csv(path, run.samples, coordinate_columns(run.samples.front().size()));
    files[run.label] = name;
    if (primary_samples.empty()) primary_samples = path;
  }
  metrics["runs"] = run_block;
  metrics["files"] = files;

  RunArtifact artifact;
  artifact.samples_path = primary_samples;
  artifact.metrics_path = config.out_dir + "/" + config.id + "_metrics.json";
  artifact.metrics = metrics;
  write_json_file(artifact.metrics_path, metrics);
  return artifact;
}

namespace {

Target target_from_json(const Json& t) {
  std::string kind = t.at("kind").get<std::string>();
  if (kind == "lp")
    return lp_target(t.at("p").get<double>(), t.at("lambda").get<double>(),
                     t.value("d", 1), t.value("eps0", 1e-8));
  if (kind == "piecewise_well") return piecewise_well_target();
  if (kind == "spiky_smooth")
    return spiky_smooth_target(t.value("x0", std::log(1001.0) / 1000.0));
  if (kind == "double_well") return double_well_target();
  if (kind == "asymmetric_well") return asymmetric_well_target();
  if (kind == "gaussian") {
    Eigen::VectorXd diag = vector_from_json(t.at("sigma_diag"));
    return gaussian_target(diag.asDiagonal());
  }
  if (kind == "gmm") {
    std::vector<Eigen::MatrixXd> sigmas;
    for (const auto& s : t.at("sigma_diags"))
      sigmas.emplace_back(vector_from_json(s).asDiagonal());
    return gaussian_mixture_target(t.at("weights").get<std::vector<double>>(), sigmas);
  }
  throw std::invalid_argument("sample config: unknown target kind " + kind);
}

}  // namespace

RunArtifact run_sample(const Json& config, std::uint64_t seed, const std::string& out_dir) {
  if (!config.is_object() || !config.contains("target") || !config.contains("sampler"))
    throw std::invalid_argument("sample config: need \"target\" and \"sampler\" objects");
  Target target = target_from_json(config["target"]);

  const Json& s = config["sampler"];
  SamplerConfig c = base_sampler(s);
  c.burn_in = s.value("burn_in", 0);
  c.gd_burn_in = s.value("gd_burn_in", false);
  c.temperature = s.value("temperature", 1.0);
  if (s.contains("mass")) c.mass = mass_spec_from_json(s["mass"]);
  if (c.n_paths < 1) throw std::invalid_argument("sample config: n_paths must be >= 1");

  Eigen::VectorXd x0 = config.contains("x_init")
                           ? vector_from_json(config["x_init"])
                           : Eigen::VectorXd::Zero(target.dim);
  if (x0.size() != target.dim)
    throw std::invalid_argument("sample config: x_init dimension mismatch");

  std::filesystem::create_directories(out_dir);
  Rng rng(seed);
  Chain chain = qhmc_sample(c, target, x0, rng);

  Json metrics;
  metrics["experiment"] = "sample";
  metrics["version"] = kVersion;
  metrics["seed"] = seed;
  Json echo;
  echo["id"] = "sample";
  echo["seed"] = seed;
  echo["params"] = config;
  metrics["config"] = echo;
  Json run_block = Json::object();
  run_block["sample"] =
      target.dim == 1 ? run_stats_1d(chain, target) : run_stats_nd(chain);
  metrics["runs"] = run_block;

  RunArtifact artifact;
  artifact.samples_path = out_dir + "/sample_samples.csv";
  write_samples_csv(artifact.samples_path, chain.samples,
                    coordinate_columns(target.dim));
  Json files = Json::object();
  files["sample"] = "sample_samples.csv";
  metrics["files"] = files;
  artifact.metrics_path = out_dir + "/sample_metrics.json";
  artifact.metrics = metrics;
  write_json_file(artifact.metrics_path, metrics);
  return artifact;
}

BridgeResult bridge_regress(const std::string& data_path, double lambda, double mu,
                            SamplerConfig config, std::uint64_t seed,
                            std::uint64_t split_seed) {
  if (!std::filesystem::exists(data_path))
    throw std::runtime_error(
        "bridge_regress: diabetes file not found at " + data_path +
        " (expected whitespace-delimited text: header row AGE SEX BMI BP S1..S6 Y, "
        "then 442 data rows)");
  BridgeResult res;
  res.data = load_diabetes(data_path, split_seed);
  Target target = bridge_target(res.data, mu, lambda, 0.5);

  config.burn_in = 1000;
  config.gd_burn_in = true;
  config.n_paths = 1000;
  Eigen::VectorXd x0 = Eigen::VectorXd::Zero(target.dim);
  Rng rng = Rng(seed).split(split_seed);
  res.chain = qhmc_sample(config, target, x0, rng);
  res.report = test_mse(res.chain, res.data.x_test, res.data.y_test);
  return res;
}

DenoiseResult denoise(const ImageMatrix& clean, double density, const DenoiseParams& params,
                      SamplerConfig config, std::uint64_t seed) {
  if (params.rank < 1 || params.rank > std::min(clean.rows(), clean.cols()))
    throw std::invalid_argument("denoise: rank out of range");
  DenoiseResult res;
  Rng corrupt_rng = Rng(seed).split(0);
  res.corrupted = density > 0.0 ? corrupt_image(clean, density, corrupt_rng) : clean;

  Target target = denoise_target(res.corrupted, params.mu, params.lambda1, params.lambda2,
                                 params.p0, params.eps0, params.rank);
  FactorizationState init = svd_init(res.corrupted, params.rank);

  config.burn_in = params.burn_in;
  config.gd_burn_in = true;
  config.n_paths = params.collect;
  Rng rng = Rng(seed).split(1);
  Chain chain = qhmc_sample(config, target, init.flatten(), rng);
  res.acceptance_rate = chain.acceptance_rate;

  ImageMatrix acc = ImageMatrix::Zero(clean.rows(), clean.cols());
  for (const auto& v : chain.samples) {
    FactorizationState st =
        FactorizationState::unflatten(v, clean.rows(), clean.cols(), params.rank);
    acc += st.a * st.b;
  }
  acc /= static_cast<double>(chain.samples.size());
  res.reconstruction = clamp_image(std::move(acc));
  res.psnr_db = psnr(res.reconstruction, clean);
  return res;
}

ImageMatrix make_synthetic_image(Eigen::Index rows, Eigen::Index cols, Eigen::Index rank) {
  ImageMatrix img = ImageMatrix::Zero(rows, cols);
  for (Eigen::Index k = 0; k < rank; ++k) {
    Eigen::VectorXd u(rows), v(cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      u[i] = std::sin((k + 1) * M_PI * (i + 0.5) / rows);
    for (Eigen::Index j = 0; j < cols; ++j)
      v[j] = std::cos((k + 1) * M_PI * (j + 0.5) / cols);
    img += (u * v.transpose()) / (k + 1.0);
  }
  double lo = img.minCoeff(), hi = img.maxCoeff();
  img = (img.array() - lo) / (hi - lo);
  return img;
}

}  // namespace qhmc
