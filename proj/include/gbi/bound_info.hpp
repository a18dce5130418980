#pragma once

// The tripartite Gaussian distribution Pi over (A, B, C, E1, E2), the two
// public-communication constructions of its honest marginal, and the
// information-difference scenarios built on top of it.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gbi/gauss_core.hpp"

namespace gbi {

// Variable names used throughout.
inline const std::string kA = "A";
inline const std::string kB = "B";
inline const std::string kC = "C";
inline const std::string kE1 = "E1";
inline const std::string kE2 = "E2";

/// Closed-form scalars of the construction as functions of the squeezing r.
struct DerivedParams {
  double r;
  double e2r;   // exp(2r)
  double x;     // (e^{2r} - 1) / 2
  double y;     // e^{2r} (2 e^{2r} - 1) / [2 (e^{2r} - 1)]
  double a;     // cosh 2r + x
  double b;     // sinh 2r - x
  double c;     // 1 + 4x
  double m_ac;  // cosh 2r
  double m_ab;  // (1 + 2 (e^{4r} - e^{2r})) / (2 e^{2r} - 1)
};

/// Throws DomainError unless 0 < r <= 5.
DerivedParams derived_params(double r);

enum class Splitting { B_AC, C_AB };
std::string to_string(Splitting s);

enum class HonestParty { Alice, Bob, Clare };

/// Displacement coefficient per honest party.
struct PartyCoefficients {
  double alice = 0.0;
  double bob = 0.0;
  double clare = 0.0;

  double at(HonestParty p) const;
};

/// One public-communication construction of Pi(x_A, x_B, x_C).
///
/// Two parties privately draw a correlated pair with CCM omega(m), the third
/// draws a lone variable, the pair broadcasts a public Gaussian variable x_E,
/// and every party displaces x = z + coeff_x * x_E.
/// Variances below are ordinary variances (CCM / 2), as the protocol states them.
struct SplittingProtocol {
  Splitting splitting;
  double r;
  std::array<HonestParty, 2> pair;
  HonestParty solo;
  double pair_m;        // omega(m) parameter of the private pair
  Matrix private_ccm;   // CCM of the pair, in `pair` order
  double solo_variance;
  std::string public_label;  // "E1" or "E2"
  double public_variance;
  PartyCoefficients coeffs_x;
  PartyCoefficients coeffs_p;
};

struct InfoDifferences {
  double i_ab = 0.0;
  double i_ae = 0.0;
  double i_be = 0.0;
  double delta_dr = 0.0;  // i_ab - i_ae
  double delta_rr = 0.0;  // i_ab - i_be
};

/// x_{E_j} = w_A z_A + w_B z_B + w_C z_C + e x_{E_k} + chi, where z_alpha are
/// the private variables of the splitting protocol that broadcasts x_{E_k}.
struct EveDecomposition {
  int j;
  std::string public_label;          // E_k
  std::array<double, 4> coeffs;      // closed form (w_A, w_B, w_C, e)
  double residual_variance;          // closed form <chi^2>, ordinary scale
  std::array<double, 4> regression_coeffs;
  double regression_residual_variance;

  double e() const { return coeffs[3]; }
  /// Largest disagreement between the closed-form and regression paths.
  double max_discrepancy() const;
};

struct ScenarioResult {
  std::string name;
  GaussianVector gaussian;
  IndexGroup alice;
  IndexGroup bob;
  IndexGroup eve;
  InfoDifferences info;
  std::optional<double> threshold;
};

/// Pi(eta) over (A, B, C, E1, E2) with CCM X(r).
GaussianVector pi_distribution(double r);

SplittingProtocol protocol(Splitting splitting, double r);

/// Joint Gaussian of (x_A, x_B, x_C, x_E) produced by the protocol, by exact
/// covariance algebra.
GaussianVector compose_protocol(const SplittingProtocol& p);

/// Mutual informations and both reconciliation differences.
InfoDifferences delta_I(const GaussianVector& g, const IndexGroup& alice,
                        const IndexGroup& bob, const IndexGroup& eve);

// Activation: Bob and Clare replace (x_B, x_C) by (x_B + x_C)/sqrt2 and
// (x_B - x_C)/sqrt2. Bob keeps the sum; with Eve holding (E1, E2) jointly this
// branch reproduces the closed form of delta_I_RR_closed exactly, while the
// difference branch gives a strongly negative value.
enum class ActivationBranch { Plus, Minus };
inline constexpr ActivationBranch kBobActivationBranch = ActivationBranch::Plus;
inline const std::string kActivatedBob = "B'";
inline const std::string kActivatedClare = "C'";

/// Replaces B, C by the rotated pair; Bob's variable (label B') is the
/// `bob_branch` combination and Clare keeps the other (label C').
GaussianVector activate(const GaussianVector& g,
                        ActivationBranch bob_branch = kBobActivationBranch);

/// delta_rr of (A; B'; {E1, E2}) on the activated Pi(r).
InfoDifferences activated_info(double r,
                               ActivationBranch bob_branch = kBobActivationBranch);

/// Closed form log2 sqrt(N/D) of the activated reverse-reconciliation
/// difference, N and D polynomials in e^{2r}.
double delta_I_RR_closed(double r);

/// j = 1 or 2. Cross-checks the closed form against a regression on the
/// inverse-displaced Pi.
EveDecomposition eve_decomposition(double r, int j);

/// Removes `dropped` from g and evaluates delta_I on the given groups.
ScenarioResult scenario_drop(const GaussianVector& g, const std::string& dropped,
                             const IndexGroup& alice, const IndexGroup& bob,
                             const IndexGroup& eve, std::string name);

/// A - (BC) on Pi with Eve holding (E1, E2); no activation.
ScenarioResult raw_scenario(double r);
/// Activated Pi, (A; B'; {E1, E2}).
ScenarioResult activated_scenario(double r);
/// E1 dropped: (A; B; {E2}).
ScenarioResult drop_e1_scenario(double r);
/// E2 dropped: (x_A - x_B/2; C; {E1}).
ScenarioResult drop_e2_scenario(double r);

/// Objective of the optimized drop-E2 scenario: delta_dr of
/// (x_A + g x_B; x_C + h x_B; {x_B, x_E1}).
double appendix_A_objective(double r, double g, double h);

struct AppendixAResult {
  double g = 0.0;
  double h = 0.0;
  double delta_dr = 0.0;
};

/// Grid over [-4, 4]^2 with step 0.1, then coordinate descent until the step
/// drops below 1e-8.
AppendixAResult appendix_A_optimize(double r);

/// Constructed-variable scenarios with Eve holding (E1, E2):
///   1: ((x_A + x_C)/2 - x_E2; x_B)
///   2: ((x_A + x_C)/2; x_B + x_E2)
///   3: (e^{2r} x_A + x_B/2; x_C + y e^{-2r} x_E1)
ScenarioResult appendix_B_scenario(double r, int case_id);

struct DiscardBound {
  double min_value = 0.0;
  std::vector<std::string> best_subset;
};

/// Minimum of I(U;V|S) over every subset S of `eve` (the empty subset
/// included): an upper bound on the intrinsic information obtained from
/// channels that discard part of Eve's variables.
DiscardBound intrinsic_discard_bound(const GaussianVector& g, const IndexGroup& u,
                                     const IndexGroup& v,
                                     const std::vector<std::string>& eve);

/// Bisection root of f on [lo, hi] to bracket width <= tol. Throws
/// NumericalError when f does not change sign on the bracket.
double find_threshold(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-6);

struct ThresholdResult {
  std::string key;
  double root;
  double lo;
  double hi;
  double tol;  // achieved bracket width
};

/// Roots of the five sign-changing scenarios, in the order
/// activation, drop_e1, appendix_a, appendix_b1, appendix_b2.
std::vector<ThresholdResult> standard_thresholds(double tol = 1e-6);

/// One line of the information-difference sweep.
struct SweepRow {
  double r;
  double dirr_act_closed;
  double dirr_act_numeric;
  double didr_raw;
  double dirr_raw;
  double didr_drop_e1;
  double didr_app_a;
  double didr_app_b1;
  double didr_app_b2;
  double didr_app_b3;
};

SweepRow sweep_row(double r);

/// Rows for `steps` equally spaced points on [r_min, r_max], computed in
/// parallel and returned in grid order.
std::vector<SweepRow> sweep(double r_min, double r_max, int steps);

}  // namespace gbi
