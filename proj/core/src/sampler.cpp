#include "qhmc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qhmc {

std::vector<double> Chain::coordinate(Eigen::Index i) const {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(s[i]);
  return out;
}

bool mh_accept(double h_current, double h_proposed, double t, double u) {
  if (!std::isfinite(h_proposed)) return false;
  double log_ratio = (h_current - h_proposed) / t;
  if (log_ratio >= 0.0) return true;
  return u < std::exp(log_ratio);
}

Chain qhmc_sample(const SamplerConfig& config, const Target& target,
                  const Eigen::VectorXd& x_init, Rng& rng) {
  if (config.n_paths < 1) throw std::invalid_argument("qhmc_sample: n_paths must be >= 1");
  config.mass.validate();
  const Eigen::Index d = target.dim;
  const int total = config.burn_in + config.n_paths;

  Chain chain;
  chain.burn_in = config.burn_in;
  chain.records.reserve(total);
  chain.samples.reserve(config.n_paths);

  Eigen::VectorXd x = x_init;
  long accepted_count = 0;
  for (int path = 0; path < total; ++path) {
    const bool gd = config.gd_burn_in && path < config.burn_in;

    MassMatrix m = config.mass.sample(d, rng);
    Eigen::VectorXd q0 =
        gd ? Eigen::VectorXd::Zero(d).eval() : m.sample_momentum(d, rng);
    int steps = config.path.draw_steps(rng);

    PathRecord rec;
    rec.mass_summary = m.diag_mean(d);
    rec.h_current = hamiltonian(target, x, q0, m);

    PathResult prop = leapfrog_path(target, x, q0, m, config.path.step_size, steps);
    rec.divergent = prop.divergent;
    rec.h_proposed = prop.divergent ? std::numeric_limits<double>::infinity()
                                    : hamiltonian(target, prop.x, prop.q, m);

    if (prop.divergent) {
      rec.accepted = false;
    } else if (gd || !config.mh_enabled) {
      rec.accepted = true;
    } else {
      rec.accepted = mh_accept(rec.h_current, rec.h_proposed, config.temperature,
                               rng.uniform());
    }
    if (rec.accepted) x = prop.x;

    if (path >= config.burn_in) {
      chain.samples.push_back(x);
      if (rec.accepted) ++accepted_count;
    }
    chain.records.push_back(rec);
  }
  chain.acceptance_rate =
      config.n_paths > 0 ? static_cast<double>(accepted_count) / config.n_paths : 0.0;
  return chain;
}

namespace {

enum class ThermoMode { QSGNHT, SGHMC };

Chain thermostat_sample(ThermoMode mode, const SamplerConfig& config,
                        const StochasticTarget& target, const Eigen::VectorXd& x_init,
                        Rng& rng) {
  if (config.n_paths < 1) throw std::invalid_argument("thermostat sampler: n_paths >= 1");
  config.mass.validate();
  const Eigen::Index d = target.dim;
  const int total = config.burn_in + config.n_paths;
  const int n = target.n_records;
  const int b = (config.batch_size <= 0 || config.batch_size >= n) ? n : config.batch_size;

  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);

  Chain chain;
  chain.burn_in = config.burn_in;
  chain.records.reserve(total);
  chain.samples.reserve(config.n_paths);
  chain.xi_trace.reserve(total);

  Eigen::VectorXd x = x_init;
  double xi = mode == ThermoMode::SGHMC ? 1.0 : config.diffusion;
  long accepted_count = 0;
  for (int path = 0; path < total; ++path) {
    std::vector<int> batch = b == n ? all : sample_batch(n, b, rng);
    auto grad = [&](const Eigen::VectorXd& v) { return target.batch_gradient(v, batch); };

    MassMatrix m = config.mass.sample(d, rng);
    Eigen::VectorXd q = m.sample_momentum(d, rng);
    int steps = config.path.draw_steps(rng);

    PathRecord rec;
    rec.mass_summary = m.diag_mean(d);
    rec.h_current = target.batch_potential(x, batch) + m.kinetic_energy(q);

    Eigen::VectorXd xp = x;
    double xi_path = xi;
    q -= 0.5 * config.path.step_size * grad(xp);
    bool diverged = is_divergent(q);
    for (int i = 1; i < steps && !diverged; ++i) {
      ThermostatStepResult st =
          thermostat_step(xp, q, xi_path, grad, m, config.path.step_size,
                          config.thermal_mass, config.diffusion, rng);
      xp = std::move(st.x);
      q = std::move(st.q);
      if (mode != ThermoMode::SGHMC) xi_path = st.xi;
      diverged = st.divergent;
    }
    if (!diverged) {
      xp += config.path.step_size * m.apply_inverse(q);
      q -= 0.5 * config.path.step_size * grad(xp);
      diverged = is_divergent(xp) || is_divergent(q);
    }

    rec.divergent = diverged;
    rec.h_proposed = diverged ? std::numeric_limits<double>::infinity()
                              : target.batch_potential(xp, batch) + m.kinetic_energy(q);
    if (diverged) {
      rec.accepted = false;
    } else if (!config.mh_enabled) {
      rec.accepted = true;
    } else {
      rec.accepted = mh_accept(rec.h_current, rec.h_proposed, config.temperature,
                               rng.uniform());
    }
    if (rec.accepted) x = std::move(xp);
    if (!diverged) xi = xi_path;  // the thermostat state survives rejection

    if (path >= config.burn_in) {
      chain.samples.push_back(x);
      if (rec.accepted) ++accepted_count;
    }
    chain.records.push_back(rec);
    chain.xi_trace.push_back(xi);
  }
  chain.acceptance_rate =
      config.n_paths > 0 ? static_cast<double>(accepted_count) / config.n_paths : 0.0;
  return chain;
}

Chain sgld_sample(const SamplerConfig& config, const StochasticTarget& target,
                  const Eigen::VectorXd& x_init, Rng& rng) {
  const Eigen::Index d = target.dim;
  const int total = config.burn_in + config.n_paths;
  const int n = target.n_records;
  const int b = (config.batch_size <= 0 || config.batch_size >= n) ? n : config.batch_size;
  const double eps = config.path.step_size;

  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);

  Chain chain;
  chain.burn_in = config.burn_in;
  chain.records.reserve(total);
  chain.samples.reserve(config.n_paths);

  Eigen::VectorXd x = x_init;
  long accepted_count = 0;
  for (int path = 0; path < total; ++path) {
    std::vector<int> batch = b == n ? all : sample_batch(n, b, rng);
    int steps = config.path.draw_steps(rng);

    PathRecord rec;
    rec.h_current = target.batch_potential(x, batch);

    Eigen::VectorXd xp = x;
    bool diverged = false;
    for (int i = 0; i < steps && !diverged; ++i) {
      xp += -eps * target.batch_gradient(xp, batch) +
            std::sqrt(2.0 * eps) * rng.normal_vector(d);
      diverged = is_divergent(xp);
    }
    rec.divergent = diverged;
    rec.h_proposed = diverged ? std::numeric_limits<double>::infinity()
                              : target.batch_potential(xp, batch);
    rec.accepted = !diverged;
    if (rec.accepted) x = std::move(xp);

    if (path >= config.burn_in) {
      chain.samples.push_back(x);
      if (rec.accepted) ++accepted_count;
    }
    chain.records.push_back(rec);
  }
  chain.acceptance_rate =
      config.n_paths > 0 ? static_cast<double>(accepted_count) / config.n_paths : 0.0;
  return chain;
}

}  // namespace

Chain qsgnht_sample(const SamplerConfig& config, const StochasticTarget& target,
                    const Eigen::VectorXd& x_init, Rng& rng) {
  return thermostat_sample(ThermoMode::QSGNHT, config, target, x_init, rng);
}

Chain baseline_sample(BaselineMode mode, const SamplerConfig& config,
                      const StochasticTarget& target, const Eigen::VectorXd& x_init,
                      Rng& rng) {
  switch (mode) {
    case BaselineMode::SGNHT: {
      SamplerConfig fixed = config;
      if (fixed.mass.kind() != MassSpec::Kind::Dirac)
        fixed.mass = MassSpec::dirac(MassMatrix::scalar(1.0));
      return thermostat_sample(ThermoMode::QSGNHT, fixed, target, x_init, rng);
    }
    case BaselineMode::SGHMC:
      return thermostat_sample(ThermoMode::SGHMC, config, target, x_init, rng);
    case BaselineMode::SGLD:
      return sgld_sample(config, target, x_init, rng);
  }
  throw std::logic_error("baseline_sample: unreachable");
}

}  // namespace qhmc
