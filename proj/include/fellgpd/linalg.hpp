#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace fellgpd {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

/// Block-diagonal matrix; all representations in this library are direct sums
/// of per-unit blocks.
struct BlockMatrix {
  std::vector<Mat> blocks;

  std::size_t block_count() const noexcept { return blocks.size(); }
  std::vector<std::size_t> block_sizes() const;
  std::size_t flat_size() const;  // Σ n_b²

  BlockMatrix adjoint() const;
  BlockMatrix& operator+=(const BlockMatrix& other);
  BlockMatrix& operator*=(cplx s);
  friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b);
  friend BlockMatrix operator+(BlockMatrix a, const BlockMatrix& b) { return a += b; }
  friend BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b);

  /// Concatenation of the column-major entries of every block.
  Vec flatten() const;
  static BlockMatrix unflatten(const Vec& flat, const std::vector<std::size_t>& sizes);
  static BlockMatrix zero(const std::vector<std::size_t>& sizes);
  double max_abs() const;
};

/// Largest singular value, from the Hermitian eigenproblem of M^H M.
double op_norm(const Mat& m);
double op_norm(const BlockMatrix& m);

/// Smallest eigenvalue of the Hermitian part (M + M^H)/2.
double min_hermitian_eigenvalue(const Mat& m);
double min_hermitian_eigenvalue(const BlockMatrix& m);

/// Rank of the column span: singular values above rel_tol · σ_max (and above
/// abs_tol) are counted.
std::size_t numerical_rank(const Mat& columns, double rel_tol = 1e-9, double abs_tol = 1e-12);

struct PsdRoots {
  Mat sqrt;
  Mat inv_sqrt;
  double min_eigenvalue = 0.0;
};

/// Square root and inverse square root of a Hermitian positive definite matrix.
/// inv_sqrt is left empty when min_eigenvalue <= floor.
PsdRoots psd_roots(const Mat& hermitian, double floor = 1e-12);

/// Independent standard complex Gaussians (E|z|² = 1).
Vec random_gaussian(std::size_t n, std::mt19937_64& rng);

/// Haar-ish random unitary (QR of a Gaussian matrix with phase fix).
Mat random_unitary(std::size_t n, std::mt19937_64& rng);

}  // namespace fellgpd
