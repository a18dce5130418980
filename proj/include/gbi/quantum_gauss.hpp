#pragma once

// Covariance matrices of Gaussian quantum states in xx...pp ordering
// (all position quadratures first, then all momenta), vacuum = identity.

#include <string>
#include <vector>

#include "gbi/gauss_core.hpp"

namespace gbi {

inline constexpr double kPhysicalTol = 1e-9;
inline constexpr double kPairingTol = 1e-8;

class QuantumCM {
 public:
  /// Checks shape (2N x 2N) and symmetry; physicality is a separate query
  /// because partial transposes of physical states are QuantumCMs too.
  explicit QuantumCM(Matrix gamma);

  static QuantumCM from_blocks(const Matrix& x_block, const Matrix& p_block);
  static QuantumCM vacuum(int n_modes);

  int n_modes() const { return n_modes_; }
  const Matrix& gamma() const { return gamma_; }
  Matrix x_block() const { return gamma_.topLeftCorner(n_modes_, n_modes_); }
  Matrix p_block() const { return gamma_.bottomRightCorner(n_modes_, n_modes_); }

 private:
  int n_modes_;
  Matrix gamma_;
};

struct SymplecticForm {
  int n_modes;
  Matrix omega;  // [[0, I], [-I, 0]]

  static SymplecticForm standard(int n_modes);
};

/// Two-mode squeezed vacuum with m = cosh(2r): x-block omega(m), p-block
/// omega(m)^{-1}, where omega(m) has diagonal m and off-diagonal sqrt(m^2 - 1).
QuantumCM tmsv_cm(double m);

/// The 2x2 CCM omega(m) of the position outcomes of a TMSV.
Matrix tmsv_x_block(double m);

/// 5x5 CCM X(r) of the purification, rows/columns ordered (A, B, C, E1, E2).
Matrix purification_x_matrix(double r);

/// Gamma = X(r) (+) X(r)^{-1} on five modes.
QuantumCM purification_cm(double r);

/// Reduction of the purification to modes A, B, C.
QuantumCM bound_entangled_cm(double r);

/// Symplectic eigenvalues in descending order (one per mode).
std::vector<double> symplectic_eigenvalues(const QuantumCM& cm);

bool is_physical(const QuantumCM& cm);
bool is_pure(const QuantumCM& cm);

/// Flips the sign of the momentum quadratures of `modes` (0-based).
QuantumCM partial_transpose(const QuantumCM& cm, const std::vector<int>& modes);

struct PptReport {
  double min_nu = 0.0;
  bool is_ppt = false;
};

/// PPT test for the bipartition `side` | rest: the partial transpose of `side`
/// must remain physical.
PptReport ppt_report(const QuantumCM& cm, const std::vector<int>& side);

/// Outcomes of position measurements on every mode: CCM = x-block.
GaussianVector homodyne_x_all(const QuantumCM& cm, std::vector<std::string> labels);

}  // namespace gbi
