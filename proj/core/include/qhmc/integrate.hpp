#pragma once

#include <functional>

#include <Eigen/Core>

#include "qhmc/mass.hpp"
#include "qhmc/target.hpp"

namespace qhmc {

/// Step size plus either a fixed step count or an exponentially distributed
/// path time t ~ Exp(tau) (randomized-HMC mode, L = max(1, round(t/eps))).
struct PathConfig {
  double step_size = 0.03;
  int steps = 5;
  double exp_tau = 0.0;  // > 0 enables exponential path lengths

  int draw_steps(Rng& rng) const {
    if (exp_tau <= 0.0) return steps;
    double t = rng.exponential(exp_tau);
    int l = static_cast<int>(std::lround(t / step_size));
    return std::max(1, l);
  }
};

/// Any coordinate beyond this magnitude (or non-finite) flags a path divergent.
inline constexpr double kDivergenceThreshold = 1e10;

bool is_divergent(const Eigen::VectorXd& v);

struct PathResult {
  Eigen::VectorXd x;
  Eigen::VectorXd q;
  bool divergent = false;
};

/// Leapfrog with mass fixed over the whole path: half momentum step, L
/// interleaved position/momentum updates, closing half momentum step.
/// An optional per-step observer sees (x_i, q_i) after each full step.
PathResult leapfrog_path(const Target& target, Eigen::VectorXd x0, Eigen::VectorXd q0,
                         const MassMatrix& m, double eps, int steps,
                         const std::function<void(const Eigen::VectorXd&,
                                                  const Eigen::VectorXd&)>& observer = {});

/// One joint (x, q, xi) thermostat update:
///   x <- x + eps M^{-1} q
///   q <- q - eps*grad - eps*xi*q + sqrt(2 A eps) z
///   xi <- xi + (eps/m_mu)(q^T M^{-1} q - Tr(M^{-1}))   [updated q]
/// When diffusion == 0 no noise is drawn, keeping the stream aligned with the
/// noise-free reduction.
struct ThermostatStepResult {
  Eigen::VectorXd x;
  Eigen::VectorXd q;
  double xi = 0.0;
  bool divergent = false;
};

ThermostatStepResult thermostat_step(
    const Eigen::VectorXd& x, const Eigen::VectorXd& q, double xi,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient,
    const MassMatrix& m, double eps, double thermal_mass, double diffusion, Rng& rng);

}  // namespace qhmc
