#pragma once

#include <vector>

#include <Eigen/Core>

#include "qhmc/integrate.hpp"
#include "qhmc/mass.hpp"
#include "qhmc/target.hpp"

namespace qhmc {

struct SamplerConfig {
  PathConfig path;
  MassSpec mass = MassSpec::dirac(MassMatrix::scalar(1.0));
  bool mh_enabled = true;
  double temperature = 1.0;  // scales the acceptance exponent; fixed at 1 in runs
  int burn_in = 0;
  int n_paths = 1;

  /// Burn-in as gradient descent: momentum reset to 0 at path start, MH disabled.
  bool gd_burn_in = false;

  // Thermostat constants (stochastic-gradient samplers only).
  double thermal_mass = 1.0;
  double diffusion = 1.0;
  int batch_size = 0;
};

struct PathRecord {
  double mass_summary = 0.0;  // mean diagonal entry of the sampled mass
  double h_current = 0.0;
  double h_proposed = 0.0;
  bool accepted = false;
  bool divergent = false;
};

/// Accepted states in path order (burn-in trimmed) plus per-path metadata.
struct Chain {
  std::vector<Eigen::VectorXd> samples;
  std::vector<PathRecord> records;  // all paths, burn-in included
  std::vector<double> xi_trace;     // thermostat runs only; one value per path
  int burn_in = 0;
  double acceptance_rate = 0.0;

  /// One scalar coordinate across all collected samples.
  std::vector<double> coordinate(Eigen::Index i) const;
};

/// Accept iff u < min(1, exp((h_current - h_proposed) / t)).
bool mh_accept(double h_current, double h_proposed, double t, double u);

/// Alg.-2 sampler; standard HMC is the Dirac-mass special case.
Chain qhmc_sample(const SamplerConfig& config, const Target& target,
                  const Eigen::VectorXd& x_init, Rng& rng);

/// Minibatched thermostat sampler (Alg. 3); xi persists across paths.
Chain qsgnht_sample(const SamplerConfig& config, const StochasticTarget& target,
                    const Eigen::VectorXd& x_init, Rng& rng);

enum class BaselineMode { SGNHT, SGHMC, SGLD };

/// SGNHT: qsgnht with a fixed-mass spec. SGHMC: xi frozen at 1, no xi update.
/// SGLD: momentum-free Langevin update x <- x - eps*grad + sqrt(2 eps) z.
Chain baseline_sample(BaselineMode mode, const SamplerConfig& config,
                      const StochasticTarget& target, const Eigen::VectorXd& x_init,
                      Rng& rng);

}  // namespace qhmc
