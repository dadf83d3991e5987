#include "qhmc/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include <Eigen/SVD>

namespace qhmc {

ImageMatrix clamp_image(ImageMatrix img) {
  return img.cwiseMax(0.0).cwiseMin(1.0);
}

namespace {

ImageMatrix load_csv_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_image: cannot open " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n,") == std::string::npos) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> row;
    for (double v; ls >> v;) row.push_back(v);
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("load_image: ragged CSV matrix in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("load_image: empty CSV " + path);
  ImageMatrix img(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) img(i, j) = rows[i][j];
  return clamp_image(std::move(img));
}

int next_pnm_token(std::istream& in) {
  // skips whitespace and '#' comment lines
  while (true) {
    int c = in.peek();
    if (c == '#') {
      std::string dummy;
      std::getline(in, dummy);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
  }
  int v;
  if (!(in >> v)) throw std::runtime_error("load_image: truncated PGM header");
  return v;
}

}  // namespace

ImageMatrix load_image(const std::string& path) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") return load_csv_matrix(path);

  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_image: cannot open " + path);
  std::string magic;
  in >> magic;
  if (magic != "P2" && magic != "P5")
    throw std::runtime_error("load_image: expected P2/P5 PGM, got " + magic);
  int cols = next_pnm_token(in);
  int rows = next_pnm_token(in);
  int maxval = next_pnm_token(in);
  if (maxval != 255) throw std::runtime_error("load_image: PGM maxval must be 255");

  ImageMatrix img(rows, cols);
  if (magic == "P2") {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) img(i, j) = next_pnm_token(in) / 255.0;
  } else {
    in.get();  // single whitespace after maxval
    std::vector<unsigned char> buf(static_cast<std::size_t>(rows) * cols);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size()))
      throw std::runtime_error("load_image: truncated P5 payload");
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) img(i, j) = buf[i * cols + j] / 255.0;
  }
  return clamp_image(std::move(img));
}

void save_pgm(const std::string& path, const ImageMatrix& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_pgm: cannot open " + path);
  out << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  for (Eigen::Index i = 0; i < img.rows(); ++i)
    for (Eigen::Index j = 0; j < img.cols(); ++j) {
      double v = std::clamp(img(i, j), 0.0, 1.0);
      out.put(static_cast<char>(std::lround(v * 255.0)));
    }
  if (!out) throw std::runtime_error("save_pgm: write failed for " + path);
}

ImageMatrix corrupt_image(const ImageMatrix& img, double density, Rng& rng) {
  if (density < 0.0 || density > 1.0)
    throw std::invalid_argument("corrupt_image: density must be in [0,1]");
  ImageMatrix out = img;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    for (Eigen::Index j = 0; j < out.cols(); ++j)
      if (rng.uniform() < density) out(i, j) = rng.uniform() < 0.5 ? 0.0 : 1.0;
  return out;
}

Eigen::VectorXd FactorizationState::flatten() const {
  Eigen::VectorXd v(a.size() + b.size() + s.size());
  Eigen::Index off = 0;
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) v[off++] = a(i, j);
  for (Eigen::Index i = 0; i < b.rows(); ++i)
    for (Eigen::Index j = 0; j < b.cols(); ++j) v[off++] = b(i, j);
  for (Eigen::Index i = 0; i < s.rows(); ++i)
    for (Eigen::Index j = 0; j < s.cols(); ++j) v[off++] = s(i, j);
  return v;
}

FactorizationState FactorizationState::unflatten(const Eigen::VectorXd& v, Eigen::Index rows,
                                                 Eigen::Index cols, Eigen::Index rank) {
  if (v.size() != rows * rank + rank * cols + rows * cols)
    throw std::invalid_argument("FactorizationState::unflatten: size mismatch");
  FactorizationState st;
  st.a.resize(rows, rank);
  st.b.resize(rank, cols);
  st.s.resize(rows, cols);
  Eigen::Index off = 0;
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < rank; ++j) st.a(i, j) = v[off++];
  for (Eigen::Index i = 0; i < rank; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) st.b(i, j) = v[off++];
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) st.s(i, j) = v[off++];
  return st;
}

FactorizationState svd_init(const ImageMatrix& y, Eigen::Index rank) {
  if (rank < 1 || rank > std::min(y.rows(), y.cols()))
    throw std::invalid_argument("svd_init: rank out of range");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(y, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sq = svd.singularValues().head(rank).cwiseSqrt();
  FactorizationState st;
  st.a = svd.matrixU().leftCols(rank) * sq.asDiagonal();
  st.b = sq.asDiagonal() * svd.matrixV().leftCols(rank).transpose();
  st.s = Eigen::MatrixXd::Zero(y.rows(), y.cols());
  return st;
}

Target denoise_target(const ImageMatrix& y, double mu, double lambda1, double lambda2,
                      double p0, double eps0, Eigen::Index rank) {
  if (rank < 1 || rank > std::min(y.rows(), y.cols()))
    throw std::invalid_argument("denoise_target: rank out of range");
  auto img = std::make_shared<ImageMatrix>(y);
  const Eigen::Index rows = y.rows(), cols = y.cols();

  Target t;
  t.dim = rows * rank + rank * cols + rows * cols;
  t.potential = [img, mu, lambda1, lambda2, p0, rows, cols, rank](const Eigen::VectorXd& v) {
    auto st = FactorizationState::unflatten(v, rows, cols, rank);
    Eigen::MatrixXd resid = *img - st.a * st.b - st.s;
    double sp = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) sp += std::pow(std::abs(st.s(i, j)), p0);
    return 0.5 * mu * resid.squaredNorm() +
           0.5 * lambda1 * (st.a.squaredNorm() + st.b.squaredNorm()) + lambda2 * sp;
  };
  t.gradient = [img, mu, lambda1, lambda2, p0, eps0, rows, cols,
                rank](const Eigen::VectorXd& v) {
    auto st = FactorizationState::unflatten(v, rows, cols, rank);
    Eigen::MatrixXd resid = st.a * st.b + st.s - *img;  // AB + S - Y
    FactorizationState g;
    g.a = mu * resid * st.b.transpose() + lambda1 * st.a;
    g.b = mu * st.a.transpose() * resid + lambda1 * st.b;
    g.s.resize(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) {
        double s = st.s(i, j);
        double sign = s >= 0.0 ? 1.0 : -1.0;
        g.s(i, j) = mu * resid(i, j) +
                    lambda2 * p0 * sign / (std::pow(std::abs(s), 1.0 - p0) + eps0);
      }
    return g.flatten();
  };
  return t;
}

}  // namespace qhmc
