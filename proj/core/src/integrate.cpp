#include "qhmc/integrate.hpp"

#include <cmath>

namespace qhmc {

bool is_divergent(const Eigen::VectorXd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]) || std::abs(v[i]) > kDivergenceThreshold) return true;
  return false;
}

PathResult leapfrog_path(const Target& target, Eigen::VectorXd x0, Eigen::VectorXd q0,
                         const MassMatrix& m, double eps, int steps,
                         const std::function<void(const Eigen::VectorXd&,
                                                  const Eigen::VectorXd&)>& observer) {
  PathResult out;
  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd q = std::move(q0);

  q -= 0.5 * eps * target.gradient(x);
  for (int i = 1; i < steps; ++i) {
    x += eps * m.apply_inverse(q);
    q -= eps * target.gradient(x);
    if (is_divergent(x) || is_divergent(q)) {
      out.x = std::move(x);
      out.q = std::move(q);
      out.divergent = true;
      return out;
    }
    if (observer) observer(x, q);
  }
  x += eps * m.apply_inverse(q);
  q -= 0.5 * eps * target.gradient(x);

  out.divergent = is_divergent(x) || is_divergent(q);
  out.x = std::move(x);
  out.q = std::move(q);
  if (observer && !out.divergent) observer(out.x, out.q);
  return out;
}

ThermostatStepResult thermostat_step(
    const Eigen::VectorXd& x, const Eigen::VectorXd& q, double xi,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& gradient,
    const MassMatrix& m, double eps, double thermal_mass, double diffusion, Rng& rng) {
  ThermostatStepResult out;
  out.x = x + eps * m.apply_inverse(q);
  out.q = q - eps * gradient(out.x) - eps * xi * q;
  if (diffusion > 0.0)
    out.q += std::sqrt(2.0 * diffusion * eps) * rng.normal_vector(q.size());
  out.xi = xi + (eps / thermal_mass) *
                    (out.q.dot(m.apply_inverse(out.q)) - m.trace_inverse(q.size()));
  out.divergent = is_divergent(out.x) || is_divergent(out.q) || !std::isfinite(out.xi);
  return out;
}

}  // namespace qhmc
