#pragma once

// Zero-mean multivariate Gaussian random vectors with named components.
//
// Covariances are stored as classical covariance matrices (CCM): the density
// is proportional to exp(-eta^T X^{-1} eta), so the ordinary covariance is
// X / 2. A variable with variance 1/2 has CCM entry 1. All public values in
// this header are in CCM scale unless stated otherwise.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gbi/errors.hpp"

namespace gbi {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Ordered, duplicate-free, nonempty list of variable names.
class IndexGroup {
 public:
  IndexGroup(std::initializer_list<std::string> names);
  explicit IndexGroup(std::vector<std::string> names);

  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return names_.size(); }
  bool contains(const std::string& name) const;

  /// Union in order: this group's names followed by `other`'s. Throws if the
  /// groups overlap.
  IndexGroup joined(const IndexGroup& other) const;

 private:
  std::vector<std::string> names_;
};

bool disjoint(const IndexGroup& a, const IndexGroup& b);

class GaussianVector {
 public:
  GaussianVector(std::vector<std::string> labels, Matrix ccm);

  const std::vector<std::string>& labels() const { return labels_; }
  const Matrix& ccm() const { return ccm_; }
  Eigen::Index dim() const { return ccm_.rows(); }

  Eigen::Index index_of(const std::string& label) const;
  std::vector<Eigen::Index> indices(const IndexGroup& group) const;
  IndexGroup all() const { return IndexGroup(labels_); }

  /// CCM entry for a pair of named variables.
  double at(const std::string& row, const std::string& col) const;

 private:
  std::vector<std::string> labels_;
  Matrix ccm_;
};

// Numerical thresholds shared by the whole library.
inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPivotTol = 1e-12;
inline constexpr double kNegativeInfoFloor = -1e-10;

/// Lower Cholesky factor of a symmetric matrix. Fails with NumericalError
/// when a pivot falls below kPivotTol times the largest diagonal entry.
Matrix cholesky_factor(const Matrix& a);

bool is_positive_definite(const Matrix& a);

/// log(det A) for symmetric positive definite A.
double log_det_spd(const Matrix& a);

/// Inverse of a symmetric positive definite matrix via its Cholesky factor.
Matrix inverse_spd(const Matrix& a);

bool is_symmetric(const Matrix& a, double rel_tol = kSymmetryTol);

Matrix principal_submatrix(const Matrix& a, const std::vector<Eigen::Index>& idx);
Matrix cross_block(const Matrix& a, const std::vector<Eigen::Index>& rows,
                   const std::vector<Eigen::Index>& cols);

GaussianVector marginalize(const GaussianVector& g, const IndexGroup& keep);

/// Gaussian of the remaining variables given the `on` block. The conditional
/// CCM does not depend on the observed values.
GaussianVector condition(const GaussianVector& g, const IndexGroup& on);

/// CCM of T * eta, labelled by `new_labels`.
GaussianVector linear_transform(const GaussianVector& g, const Matrix& transform,
                                std::vector<std::string> new_labels);

/// Group mutual information I(U;V) in bits.
double mutual_information(const GaussianVector& g, const IndexGroup& u,
                          const IndexGroup& v);

struct ConditionalInfo {
  double bits = 0.0;
  // Set when a small negative rounding residue was clamped to zero.
  bool clamped = false;
};

/// I(U;V|W) in bits.
ConditionalInfo conditional_mi(const GaussianVector& g, const IndexGroup& u,
                               const IndexGroup& v, const IndexGroup& w);

/// I(U;V) through the conditional code path with nothing conditioned on.
ConditionalInfo conditional_mi(const GaussianVector& g, const IndexGroup& u,
                               const IndexGroup& v);

/// log of the normalized density pi^{-n/2} det(X)^{-1/2} exp(-eta^T X^{-1} eta).
double log_density(const GaussianVector& g, const Vector& eta);

// ---------------------------------------------------------------------------
// Sampling
//
// Standard normals come from std::mt19937_64 (fully specified by the C++
// standard) via Box-Muller on 53-bit uniforms, consuming two engine outputs
// per pair of normals. Both normals of a pair are used. The output is thus
// identical on every conforming platform up to libm rounding of log/sin/cos.

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed);
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Seed of substream `index` derived from `seed` by one SplitMix64 step on
/// seed + (index + 1) * 0x9E3779B97F4A7C15. Parallel workers draw chunk k from
/// substream_seed(seed, k), so results do not depend on the thread count.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index);

/// n draws (rows) of the zero-mean Gaussian with covariance ccm / 2.
Matrix sample(const GaussianVector& g, Eigen::Index n, std::uint64_t seed);

/// 2 * (1/n) * sum of x x^T over the rows of `samples` (zero-mean estimator).
Matrix empirical_ccm(const Matrix& samples);

}  // namespace gbi
