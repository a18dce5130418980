#include "gbi/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gbi/bound_info.hpp"
#include "gbi/quantum_gauss.hpp"

namespace gbi {

namespace {

// Accumulates the worst value of one check over the r grid.
class Worst {
 public:
  void update(double value, double r) {
    if (std::isnan(value)) value = std::numeric_limits<double>::infinity();
    if (value > value_) {
      value_ = value;
      at_r_ = r;
    }
  }
  VerifyCheck finish(std::string name, double tolerance) const {
    std::ostringstream detail;
    if (value_ > 0.0) {
      detail << "worst at r = " << at_r_;
    } else {
      detail << "exact on the grid";
    }
    const double v = std::max(value_, 0.0);
    return {std::move(name), v, tolerance, v <= tolerance, detail.str()};
  }

 private:
  double value_ = 0.0;
  double at_r_ = 0.0;
};

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Distance of the symplectic spectrum of X (+) X^{-1} from all ones.
double purity_defect(const Matrix& x) {
  const auto nus = symplectic_eigenvalues(QuantumCM::from_blocks(x, inverse_spd(x)));
  double d = 0.0;
  for (double nu : nus) d = std::max(d, std::abs(nu - 1.0));
  return d;
}

// How far below one the smallest symplectic eigenvalue of the PT drops.
double ppt_shortfall(const QuantumCM& cm, int mode) {
  return std::max(0.0, 1.0 - ppt_report(cm, {mode}).min_nu);
}

QuantumCM three_mode_from(const Matrix& x) {
  return QuantumCM::from_blocks(x.topLeftCorner(3, 3), inverse_spd(x).topLeftCorner(3, 3));
}

}  // namespace

std::vector<double> default_r_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 40; ++i) grid.push_back(0.05 * i);
  return grid;
}

std::vector<double> parse_r_grid(const std::string& text) {
  std::istringstream in(text);
  std::string a, b, c;
  if (!std::getline(in, a, ':') || !std::getline(in, b, ':') || !std::getline(in, c)) {
    throw DomainError("r grid must look like start:stop:count, got '" + text + "'");
  }
  double lo = 0.0, hi = 0.0;
  long count = 0;
  try {
    std::size_t pos = 0;
    lo = std::stod(a, &pos);
    if (pos != a.size()) throw std::invalid_argument(a);
    hi = std::stod(b, &pos);
    if (pos != b.size()) throw std::invalid_argument(b);
    count = std::stol(c, &pos);
    if (pos != c.size()) throw std::invalid_argument(c);
  } catch (const std::logic_error&) {
    throw DomainError("r grid must look like start:stop:count, got '" + text + "'");
  }
  if (count < 2 || !(lo > 0.0) || !(hi <= 5.0) || !(lo < hi)) {
    throw DomainError("r grid needs 0 < start < stop <= 5 and count >= 2");
  }
  std::vector<double> grid;
  for (long i = 0; i < count; ++i) {
    grid.push_back(i + 1 == count ? hi : lo + (hi - lo) * static_cast<double>(i) / (count - 1));
  }
  return grid;
}

std::vector<VerifyCheck> run_verification(const VerifyOptions& options) {
  const std::vector<double> grid =
      options.r_grid.empty() ? default_r_grid() : options.r_grid;
  const auto x_of = options.x_source
                        ? options.x_source
                        : std::function<Matrix(double)>(purification_x_matrix);

  Worst x_asym, x_fixed, homodyne, purity, compose_b, compose_c, cmi_b, cmi_c;
  Worst ppt_b, ppt_c, mixed, eve_paths, eve_closed, act_dual, act_branch, tmsv_mi,
      tmsv_var;

  for (double r : grid) {
    const Matrix x = x_of(r);
    const GaussianVector pi({kA, kB, kC, kE1, kE2}, x);
    const DerivedParams d = derived_params(r);

    x_asym.update(is_positive_definite(x) ? max_abs(x - x.transpose()) : 1.0, r);
    x_fixed.update(std::abs(x(0, 4) - 0.5), r);
    homodyne.update(max_abs(homodyne_x_all(purification_cm(r), pi.labels()).ccm() - x), r);
    purity.update(purity_defect(x), r);

    const Matrix abc = x.topLeftCorner(3, 3);
    compose_b.update(
        max_abs(compose_protocol(protocol(Splitting::B_AC, r)).ccm().topLeftCorner(3, 3) - abc), r);
    compose_c.update(
        max_abs(compose_protocol(protocol(Splitting::C_AB, r)).ccm().topLeftCorner(3, 3) - abc), r);

    cmi_b.update(conditional_mi(pi, {kB}, {kA, kC}, {kE1}).bits, r);
    cmi_c.update(conditional_mi(pi, {kC}, {kA, kB}, {kE2}).bits, r);

    const QuantumCM three = three_mode_from(x);
    ppt_b.update(ppt_shortfall(three, 1), r);
    ppt_c.update(ppt_shortfall(three, 2), r);
    // Physical but mixed: smallest nu >= 1 and largest nu clearly above 1.
    const auto nus = symplectic_eigenvalues(three);
    mixed.update(std::max(0.0, 1.0 - kPhysicalTol - nus.back()) +
                     (nus.front() > 1.0 + 1e-6 ? 0.0 : 1.0),
                 r);

    for (int j : {1, 2}) {
      const EveDecomposition dec = eve_decomposition(r, j);
      eve_paths.update(dec.max_discrepancy(), r);
      double closed = std::abs(dec.regression_residual_variance -
                              (j == 2 ? 1.0 / (8.0 * d.x) : 1.0 / (2.0 * d.y)));
      if (j == 2) {
        const std::array<double, 4> expected{0.5, -1.0, 0.5, -0.5};
        for (int i = 0; i < 4; ++i) {
          closed = std::max(closed, std::abs(dec.regression_coeffs[i] - expected[i]));
        }
      }
      eve_closed.update(closed, r);
    }

    const GaussianVector act = activate(pi);
    const double numeric = delta_I(act, {kA}, {kActivatedBob}, {kE1, kE2}).delta_rr;
    act_dual.update(std::abs(numeric - delta_I_RR_closed(r)), r);
    const double rejected =
        delta_I(activate(pi, ActivationBranch::Minus), {kA}, {kActivatedBob}, {kE1, kE2})
            .delta_rr;
    // The rejected branch must miss the closed form by a wide margin.
    act_branch.update(std::abs(rejected - delta_I_RR_closed(r)) > 1e-3 ? 0.0 : 1.0, r);

    const double m = std::cosh(2.0 * r);
    const GaussianVector tmsv = homodyne_x_all(tmsv_cm(m), {kA, kB});
    tmsv_mi.update(std::abs(mutual_information(tmsv, {kA}, {kB}) - std::log2(m)), r);
    Matrix diff(1, 2);
    diff << 1.0, -1.0;
    tmsv_var.update(
        std::abs(linear_transform(tmsv, diff, {"A-B"}).ccm()(0, 0) - 2.0 * std::exp(-2.0 * r)),
        r);
  }

  return {
      x_asym.finish("x_matrix_symmetric_pd", kSymmetryTol),
      x_fixed.finish("x_matrix_fixed_entry", 0.0),
      homodyne.finish("homodyne_extracts_x", 1e-12),
      purity.finish("purification_pure", kPhysicalTol),
      compose_b.finish("compose_b_ac_matches_pi", 1e-12),
      compose_c.finish("compose_c_ab_matches_pi", 1e-12),
      cmi_b.finish("cmi_b_ac_given_e1_zero", 1e-10),
      cmi_c.finish("cmi_c_ab_given_e2_zero", 1e-10),
      ppt_b.finish("ppt_b_ac", kPhysicalTol),
      ppt_c.finish("ppt_c_ab", kPhysicalTol),
      mixed.finish("bound_entangled_physical_mixed", 0.0),
      eve_paths.finish("eve_decomposition_dual_path", 1e-9),
      eve_closed.finish("eve_decomposition_closed_form", 1e-9),
      act_dual.finish("activation_dual_path", 1e-9),
      act_branch.finish("activation_branch_rejected", 0.0),
      tmsv_mi.finish("tmsv_mutual_information", 1e-12),
      tmsv_var.finish("tmsv_difference_variance", 1e-12),
  };
}

}  // namespace gbi
