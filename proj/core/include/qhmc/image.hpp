#pragma once

#include <string>

#include <Eigen/Core>

#include "qhmc/rng.hpp"
#include "qhmc/target.hpp"

namespace qhmc {

/// Gray-level image with entries in [0, 1].
using ImageMatrix = Eigen::MatrixXd;

ImageMatrix clamp_image(ImageMatrix img);

/// PGM (P2 or P5, maxval 255) mapped to [0,1]. CSV matrices are accepted as an
/// alternative based on file extension.
ImageMatrix load_image(const std::string& path);
void save_pgm(const std::string& path, const ImageMatrix& img);

/// Salt-and-pepper corruption: each pixel independently replaced by 0 or 1
/// (equal probability) with the given density.
ImageMatrix corrupt_image(const ImageMatrix& img, double density, Rng& rng);

/// Low-rank + sparse factorization state Y ~ A B + S, flattened for the
/// samplers as [A row-major, B row-major, S row-major].
struct FactorizationState {
  Eigen::MatrixXd a;  // rows x r
  Eigen::MatrixXd b;  // r x cols
  Eigen::MatrixXd s;  // rows x cols

  Eigen::VectorXd flatten() const;
  static FactorizationState unflatten(const Eigen::VectorXd& v, Eigen::Index rows,
                                      Eigen::Index cols, Eigen::Index rank);
};

/// Rank-r truncated SVD initialization of the corrupted image:
/// A = U_r sqrt(Sigma_r), B = sqrt(Sigma_r) V_r^T, S = 0.
FactorizationState svd_init(const ImageMatrix& y, Eigen::Index rank);

/// Robust factorization posterior over the flattened (A, B, S) state:
///   0.5*mu*||Y - AB - S||_F^2 + 0.5*lambda1*(||A||_F^2 + ||B||_F^2)
///   + lambda2*||S||_{p0}^{p0}
/// with the element-wise smoothed gradient for the sparse block.
Target denoise_target(const ImageMatrix& y, double mu, double lambda1, double lambda2,
                      double p0, double eps0, Eigen::Index rank);

}  // namespace qhmc
