#include "fellgpd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fellgpd {

std::vector<std::size_t> BlockMatrix::block_sizes() const {
  std::vector<std::size_t> out;
  for (const auto& b : blocks) out.push_back(static_cast<std::size_t>(b.rows()));
  return out;
}

std::size_t BlockMatrix::flat_size() const {
  std::size_t n = 0;
  for (const auto& b : blocks) n += static_cast<std::size_t>(b.size());
  return n;
}

BlockMatrix BlockMatrix::adjoint() const {
  BlockMatrix out;
  out.blocks.reserve(blocks.size());
  for (const auto& b : blocks) out.blocks.push_back(b.adjoint());
  return out;
}

BlockMatrix& BlockMatrix::operator+=(const BlockMatrix& other) {
  if (blocks.size() != other.blocks.size()) throw std::invalid_argument("block structure mismatch");
  for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] += other.blocks[i];
  return *this;
}

BlockMatrix& BlockMatrix::operator*=(cplx s) {
  for (auto& b : blocks) b *= s;
  return *this;
}

BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.blocks.size() != b.blocks.size()) throw std::invalid_argument("block structure mismatch");
  BlockMatrix out;
  out.blocks.reserve(a.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i) out.blocks.push_back(a.blocks[i] * b.blocks[i]);
  return out;
}

BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b) {
  if (a.blocks.size() != b.blocks.size()) throw std::invalid_argument("block structure mismatch");
  BlockMatrix out;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) out.blocks.push_back(a.blocks[i] - b.blocks[i]);
  return out;
}

Vec BlockMatrix::flatten() const {
  Vec out(static_cast<Eigen::Index>(flat_size()));
  Eigen::Index at = 0;
  for (const auto& b : blocks) {
    out.segment(at, b.size()) = Eigen::Map<const Vec>(b.data(), b.size());
    at += b.size();
  }
  return out;
}

BlockMatrix BlockMatrix::unflatten(const Vec& flat, const std::vector<std::size_t>& sizes) {
  BlockMatrix out;
  Eigen::Index at = 0;
  for (std::size_t n : sizes) {
    const auto k = static_cast<Eigen::Index>(n);
    out.blocks.push_back(Eigen::Map<const Mat>(flat.data() + at, k, k));
    at += k * k;
  }
  return out;
}

BlockMatrix BlockMatrix::zero(const std::vector<std::size_t>& sizes) {
  BlockMatrix out;
  for (std::size_t n : sizes) {
    const auto k = static_cast<Eigen::Index>(n);
    out.blocks.push_back(Mat::Zero(k, k));
  }
  return out;
}

double BlockMatrix::max_abs() const {
  double m = 0.0;
  for (const auto& b : blocks)
    if (b.size() > 0) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

double op_norm(const Mat& m) {
  if (m.size() == 0) return 0.0;
  const Mat gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<Mat> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double op_norm(const BlockMatrix& m) {
  double out = 0.0;
  for (const auto& b : m.blocks) out = std::max(out, op_norm(b));
  return out;
}

double min_hermitian_eigenvalue(const Mat& m) {
  if (m.size() == 0) return 0.0;
  const Mat h = (m + m.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double min_hermitian_eigenvalue(const BlockMatrix& m) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& b : m.blocks)
    if (b.size() > 0) out = std::min(out, min_hermitian_eigenvalue(b));
  return std::isinf(out) ? 0.0 : out;
}

std::size_t numerical_rank(const Mat& columns, double rel_tol, double abs_tol) {
  if (columns.size() == 0) return 0;
  Eigen::BDCSVD<Mat> svd(columns);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  const double top = sv.maxCoeff();
  if (top <= abs_tol) return 0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > rel_tol * top && sv[i] > abs_tol) ++r;
  return r;
}

PsdRoots psd_roots(const Mat& hermitian, double floor) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitian);
  PsdRoots out;
  const auto& ev = es.eigenvalues();
  out.min_eigenvalue = ev.size() ? ev.minCoeff() : 0.0;
  const Mat& v = es.eigenvectors();
  Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
  out.sqrt = v * root.cast<cplx>().asDiagonal() * v.adjoint();
  if (out.min_eigenvalue > floor) {
    Eigen::VectorXd inv_root = root.cwiseInverse();
    out.inv_sqrt = v * inv_root.cast<cplx>().asDiagonal() * v.adjoint();
  }
  return out;
}

Vec random_gaussian(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  Vec out(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    out[i] = cplx(re, im);
  }
  return out;
}

Mat random_unitary(std::size_t n, std::mt19937_64& rng) {
  const auto k = static_cast<Eigen::Index>(n);
  Mat a(k, k);
  for (Eigen::Index j = 0; j < k; ++j) a.col(j) = random_gaussian(n, rng);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ();
  const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < k; ++j) {
    const cplx d = r(j, j);
    if (std::abs(d) > 0) q.col(j) *= d / std::abs(d);
  }
  return q;
}

}  // namespace fellgpd
