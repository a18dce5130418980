#include "gbi/quantum_gauss.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>

#include <Eigen/Eigenvalues>

namespace gbi {

namespace {

void check_r(double r) {
  if (!(r > 0.0 && r <= 5.0)) {
    throw DomainError("squeezing parameter r must lie in (0, 5], got " +
                      std::to_string(r));
  }
}

std::vector<double> symplectic_spectrum(const Matrix& gamma) {
  const int n = static_cast<int>(gamma.rows() / 2);
  const Matrix omega = SymplecticForm::standard(n).omega;
  const Eigen::MatrixXcd m = std::complex<double>(0.0, 1.0) * (omega * gamma).cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("symplectic_eigenvalues: eigen-solver did not converge");
  }
  std::vector<double> mags;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    mags.push_back(std::abs(solver.eigenvalues()(i)));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  std::vector<double> nus;
  for (int k = 0; k < n; ++k) {
    const double a = mags[2 * k];
    const double b = mags[2 * k + 1];
    if (std::abs(a - b) > kPairingTol * std::max(1.0, a)) {
      throw NumericalError("symplectic_eigenvalues: spectrum of i*Omega*gamma "
                           "does not pair up (" + std::to_string(a) + " vs " +
                           std::to_string(b) + ")");
    }
    nus.push_back(0.5 * (a + b));
  }
  return nus;
}

}  // namespace

QuantumCM::QuantumCM(Matrix gamma) : gamma_(std::move(gamma)) {
  if (gamma_.rows() != gamma_.cols() || gamma_.rows() % 2 != 0 || gamma_.rows() == 0) {
    throw DimensionError("quantum CM must be 2N x 2N with N >= 1");
  }
  if (!is_symmetric(gamma_)) throw DomainError("quantum CM is not symmetric");
  n_modes_ = static_cast<int>(gamma_.rows() / 2);
}

QuantumCM QuantumCM::from_blocks(const Matrix& x_block, const Matrix& p_block) {
  if (x_block.rows() != p_block.rows() || x_block.cols() != p_block.cols()) {
    throw DimensionError("x and p blocks differ in shape");
  }
  const Eigen::Index n = x_block.rows();
  Matrix gamma = Matrix::Zero(2 * n, 2 * n);
  gamma.topLeftCorner(n, n) = x_block;
  gamma.bottomRightCorner(n, n) = p_block;
  return QuantumCM(std::move(gamma));
}

QuantumCM QuantumCM::vacuum(int n_modes) {
  return QuantumCM(Matrix::Identity(2 * n_modes, 2 * n_modes));
}

SymplecticForm SymplecticForm::standard(int n_modes) {
  Matrix omega = Matrix::Zero(2 * n_modes, 2 * n_modes);
  omega.topRightCorner(n_modes, n_modes).setIdentity();
  omega.bottomLeftCorner(n_modes, n_modes) = -Matrix::Identity(n_modes, n_modes);
  return {n_modes, std::move(omega)};
}

Matrix tmsv_x_block(double m) {
  if (!(m >= 1.0)) throw DomainError("TMSV parameter m must be >= 1");
  const double s = std::sqrt(m * m - 1.0);
  Matrix w(2, 2);
  w << m, s, s, m;
  return w;
}

QuantumCM tmsv_cm(double m) {
  Matrix x = tmsv_x_block(m);
  // det omega(m) = 1, so the inverse only flips the off-diagonal sign.
  Matrix p = x;
  p(0, 1) = p(1, 0) = -x(0, 1);
  return QuantumCM::from_blocks(x, p);
}

Matrix purification_x_matrix(double r) {
  check_r(r);
  const double e2r = std::exp(2.0 * r);
  const double x = std::expm1(2.0 * r) / 2.0;
  const double a = std::cosh(2.0 * r) + x;
  const double b = std::sinh(2.0 * r) - x;
  const double c = 1.0 + 4.0 * x;
  const double y = e2r * (2.0 * e2r - 1.0) / (2.0 * std::expm1(2.0 * r));
  Matrix m(5, 5);
  // clang-format off
  m <<  a,        2 * x,   b,             2 * x,  0.5,
        2 * x,    c,      -2 * x,         4 * x, -e2r,
        b,       -2 * x,   a,            -2 * x,  e2r - 0.5,
        2 * x,    4 * x,  -2 * x,         4 * x, -2 * x,
        0.5,     -e2r,     e2r - 0.5,    -2 * x,  y;
  // clang-format on
  return m;
}

QuantumCM purification_cm(double r) {
  const Matrix x = purification_x_matrix(r);
  return QuantumCM::from_blocks(x, inverse_spd(x));
}

QuantumCM bound_entangled_cm(double r) {
  const QuantumCM full = purification_cm(r);
  return QuantumCM::from_blocks(full.x_block().topLeftCorner(3, 3),
                                full.p_block().topLeftCorner(3, 3));
}

std::vector<double> symplectic_eigenvalues(const QuantumCM& cm) {
  return symplectic_spectrum(cm.gamma());
}

bool is_physical(const QuantumCM& cm) {
  if (!is_positive_definite(cm.gamma())) return false;
  const auto nus = symplectic_eigenvalues(cm);
  return nus.back() >= 1.0 - kPhysicalTol;
}

bool is_pure(const QuantumCM& cm) {
  if (!is_positive_definite(cm.gamma())) return false;
  const auto nus = symplectic_eigenvalues(cm);
  return std::all_of(nus.begin(), nus.end(),
                     [](double nu) { return std::abs(nu - 1.0) <= kPhysicalTol; });
}

QuantumCM partial_transpose(const QuantumCM& cm, const std::vector<int>& modes) {
  const int n = cm.n_modes();
  if (modes.empty()) throw DomainError("partial_transpose: empty mode set");
  Vector flip = Vector::Ones(2 * n);
  for (int mode : modes) {
    if (mode < 0 || mode >= n) {
      throw DomainError("partial_transpose: mode " + std::to_string(mode) +
                        " out of range");
    }
    if (flip(n + mode) < 0) {
      throw DomainError("partial_transpose: mode listed twice");
    }
    flip(n + mode) = -1.0;
  }
  return QuantumCM(flip.asDiagonal() * cm.gamma() * flip.asDiagonal());
}

PptReport ppt_report(const QuantumCM& cm, const std::vector<int>& side) {
  if (static_cast<int>(side.size()) >= cm.n_modes()) {
    throw DomainError("ppt_report: bipartition must leave modes on both sides");
  }
  const QuantumCM pt = partial_transpose(cm, side);
  PptReport rep;
  rep.min_nu = symplectic_eigenvalues(pt).back();
  rep.is_ppt = rep.min_nu >= 1.0 - kPhysicalTol;
  return rep;
}

GaussianVector homodyne_x_all(const QuantumCM& cm, std::vector<std::string> labels) {
  Matrix x = cm.x_block();
  if (!is_positive_definite(x)) {
    throw NumericalError("homodyne_x_all: x-block is singular");
  }
  return GaussianVector(std::move(labels), std::move(x));
}

}  // namespace gbi
