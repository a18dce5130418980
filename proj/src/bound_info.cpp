#include "gbi/bound_info.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gbi/parallel.hpp"
#include "gbi/quantum_gauss.hpp"

namespace gbi {

namespace {

const std::vector<std::string>& pi_labels() {
  static const std::vector<std::string> labels{kA, kB, kC, kE1, kE2};
  return labels;
}

// Row vector over (A, B, C, E1, E2).
Eigen::RowVectorXd row(double a, double b, double c, double e1, double e2) {
  Eigen::RowVectorXd v(5);
  v << a, b, c, e1, e2;
  return v;
}

ScenarioResult make_scenario(std::string name, GaussianVector g, IndexGroup alice,
                             IndexGroup bob, IndexGroup eve) {
  InfoDifferences info = delta_I(g, alice, bob, eve);
  return ScenarioResult{std::move(name), std::move(g), std::move(alice),
                        std::move(bob), std::move(eve), info, std::nullopt};
}

}  // namespace

DerivedParams derived_params(double r) {
  if (!(r > 0.0 && r <= 5.0)) {
    throw DomainError("squeezing parameter r must lie in (0, 5], got " +
                      std::to_string(r));
  }
  DerivedParams p{};
  p.r = r;
  p.e2r = std::exp(2.0 * r);
  p.x = std::expm1(2.0 * r) / 2.0;
  p.y = p.e2r * (2.0 * p.e2r - 1.0) / (2.0 * std::expm1(2.0 * r));
  p.a = std::cosh(2.0 * r) + p.x;
  p.b = std::sinh(2.0 * r) - p.x;
  p.c = 1.0 + 4.0 * p.x;
  p.m_ac = std::cosh(2.0 * r);
  p.m_ab = (1.0 + 2.0 * (p.e2r * p.e2r - p.e2r)) / (2.0 * p.e2r - 1.0);
  return p;
}

std::string to_string(Splitting s) {
  return s == Splitting::B_AC ? "B-(AC)" : "C-(AB)";
}

double PartyCoefficients::at(HonestParty p) const {
  switch (p) {
    case HonestParty::Alice: return alice;
    case HonestParty::Bob: return bob;
    case HonestParty::Clare: return clare;
  }
  return 0.0;
}

double EveDecomposition::max_discrepancy() const {
  double d = std::abs(residual_variance - regression_residual_variance);
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    d = std::max(d, std::abs(coeffs[i] - regression_coeffs[i]));
  }
  return d;
}

GaussianVector pi_distribution(double r) {
  return GaussianVector(pi_labels(), purification_x_matrix(r));
}

SplittingProtocol protocol(Splitting splitting, double r) {
  const DerivedParams d = derived_params(r);
  SplittingProtocol p;
  p.splitting = splitting;
  p.r = r;
  p.solo_variance = 0.5;
  if (splitting == Splitting::B_AC) {
    p.pair = {HonestParty::Alice, HonestParty::Clare};
    p.solo = HonestParty::Bob;
    p.pair_m = d.m_ac;
    p.public_label = kE1;
    p.public_variance = 2.0 * d.x;
    p.coeffs_x = {0.5, 1.0, -0.5};
    p.coeffs_p = {-0.5, 1.0, -0.5};
  } else {
    p.pair = {HonestParty::Alice, HonestParty::Bob};
    p.solo = HonestParty::Clare;
    p.pair_m = d.m_ab;
    p.public_label = kE2;
    p.public_variance = d.y / 2.0;
    const double cx = -std::expm1(-2.0 * r);  // 1 - e^{-2r}
    p.coeffs_x = {1.0 / (2.0 * d.y), -d.e2r / d.y, cx};
    p.coeffs_p = {-1.0 / (2.0 * d.y), -d.e2r / d.y, cx};
  }
  p.private_ccm = tmsv_x_block(p.pair_m);
  return p;
}

GaussianVector compose_protocol(const SplittingProtocol& p) {
  // Sources ordered (z_A, z_B, z_C, x_E); CCM = 2 * variance.
  auto slot = [](HonestParty q) { return static_cast<Eigen::Index>(q); };
  Matrix sources = Matrix::Zero(4, 4);
  const Eigen::Index i0 = slot(p.pair[0]);
  const Eigen::Index i1 = slot(p.pair[1]);
  sources(i0, i0) = p.private_ccm(0, 0);
  sources(i1, i1) = p.private_ccm(1, 1);
  sources(i0, i1) = sources(i1, i0) = p.private_ccm(0, 1);
  sources(slot(p.solo), slot(p.solo)) = 2.0 * p.solo_variance;
  sources(3, 3) = 2.0 * p.public_variance;

  Matrix t = Matrix::Identity(4, 4);
  t(0, 3) = p.coeffs_x.alice;
  t(1, 3) = p.coeffs_x.bob;
  t(2, 3) = p.coeffs_x.clare;
  const GaussianVector src({"zA", "zB", "zC", p.public_label}, sources);
  return linear_transform(src, t, {kA, kB, kC, p.public_label});
}

InfoDifferences delta_I(const GaussianVector& g, const IndexGroup& alice,
                        const IndexGroup& bob, const IndexGroup& eve) {
  if (!disjoint(alice, bob) || !disjoint(alice, eve) || !disjoint(bob, eve)) {
    throw LabelError("delta_I: groups must be pairwise disjoint");
  }
  InfoDifferences d;
  d.i_ab = mutual_information(g, alice, bob);
  d.i_ae = mutual_information(g, alice, eve);
  d.i_be = mutual_information(g, bob, eve);
  d.delta_dr = d.i_ab - d.i_ae;
  d.delta_rr = d.i_ab - d.i_be;
  return d;
}

GaussianVector activate(const GaussianVector& g, ActivationBranch bob_branch) {
  const Eigen::Index ib = g.index_of(kB);
  const Eigen::Index ic = g.index_of(kC);
  const double s = 1.0 / std::numbers::sqrt2;
  const double sign_bob = bob_branch == ActivationBranch::Plus ? 1.0 : -1.0;
  Matrix t = Matrix::Identity(g.dim(), g.dim());
  // Bob: (x_B + sign x_C)/sqrt2, Clare: (x_B - sign x_C)/sqrt2.
  t(ib, ib) = s;
  t(ib, ic) = sign_bob * s;
  t(ic, ib) = s;
  t(ic, ic) = -sign_bob * s;
  std::vector<std::string> labels = g.labels();
  labels[ib] = kActivatedBob;
  labels[ic] = kActivatedClare;
  return linear_transform(g, t, std::move(labels));
}

InfoDifferences activated_info(double r, ActivationBranch bob_branch) {
  return delta_I(activate(pi_distribution(r), bob_branch), {kA}, {kActivatedBob},
                 {kE1, kE2});
}

double delta_I_RR_closed(double r) {
  const DerivedParams d = derived_params(r);
  const double e = d.e2r;
  const double e2 = e * e;
  const double e3 = e2 * e;
  const double e4 = e2 * e2;
  const double num = 4.0 - 1.0 / e - 11.0 * e + 20.0 * e2 - 20.0 * e3 + 16.0 * e4;
  const double den = 2.0 - 8.0 * e + 10.0 * e3 + 4.0 * e4;
  const double ratio = num / den;
  if (!(ratio > 0.0) || !std::isfinite(ratio)) {
    throw DomainError("delta_I_RR_closed: nonpositive ratio at r = " +
                      std::to_string(r));
  }
  return 0.5 * std::log2(ratio);
}

EveDecomposition eve_decomposition(double r, int j) {
  if (j != 1 && j != 2) throw DomainError("eve_decomposition: j must be 1 or 2");
  const DerivedParams d = derived_params(r);
  // x_{E2} is decomposed over the B-(AC) protocol that broadcasts x_{E1}, and
  // vice versa.
  const SplittingProtocol p = protocol(j == 2 ? Splitting::B_AC : Splitting::C_AB, r);
  const PartyCoefficients& ax = p.coeffs_x;
  const PartyCoefficients& ap = p.coeffs_p;

  EveDecomposition out;
  out.j = j;
  out.public_label = p.public_label;
  const double e = -0.5 * (ax.alice * ap.alice + ax.bob * ap.bob + ax.clare * ap.clare);
  out.coeffs = {-ap.alice, -ap.bob, -ap.clare, e};
  out.residual_variance = j == 2 ? 1.0 / (8.0 * d.x) : 1.0 / (2.0 * d.y);

  // Regression path: undo the displacements, z_alpha = x_alpha - alpha_x x_{E_k},
  // then regress x_{E_j} on (z_A, z_B, z_C, x_{E_k}).
  const GaussianVector pi = pi_distribution(r);
  const Eigen::Index k = pi.index_of(p.public_label);
  const Eigen::Index jj = pi.index_of(j == 2 ? kE2 : kE1);
  Matrix t = Matrix::Zero(5, 5);
  const std::array<double, 3> alpha{ax.alice, ax.bob, ax.clare};
  for (int i = 0; i < 3; ++i) {
    t(i, i) = 1.0;
    t(i, k) = -alpha[i];
  }
  t(3, k) = 1.0;
  t(4, jj) = 1.0;
  const Matrix s = t * pi.ccm() * t.transpose();
  const Matrix s_rr = s.topLeftCorner(4, 4);
  const Vector s_rj = s.block(0, 4, 4, 1);
  const Matrix l = cholesky_factor(s_rr);
  const Vector w = l.triangularView<Eigen::Lower>().solve(s_rj);
  const Vector coef = l.transpose().triangularView<Eigen::Upper>().solve(w);
  for (int i = 0; i < 4; ++i) out.regression_coeffs[i] = coef(i);
  out.regression_residual_variance = 0.5 * (s(4, 4) - w.squaredNorm());
  return out;
}

ScenarioResult scenario_drop(const GaussianVector& g, const std::string& dropped,
                             const IndexGroup& alice, const IndexGroup& bob,
                             const IndexGroup& eve, std::string name) {
  g.index_of(dropped);
  for (const IndexGroup* grp : {&alice, &bob, &eve}) {
    if (grp->contains(dropped)) {
      throw LabelError("scenario_drop: dropped variable '" + dropped +
                       "' still used by a group");
    }
  }
  std::vector<std::string> keep;
  for (const auto& l : g.labels()) {
    if (l != dropped) keep.push_back(l);
  }
  GaussianVector reduced = marginalize(g, IndexGroup(std::move(keep)));
  return make_scenario(std::move(name), std::move(reduced), alice, bob, eve);
}

ScenarioResult raw_scenario(double r) {
  return make_scenario("raw-A-(BC)", pi_distribution(r), {kA}, {kB, kC}, {kE1, kE2});
}

ScenarioResult activated_scenario(double r) {
  return make_scenario("activated", activate(pi_distribution(r)), {kA},
                       {kActivatedBob}, {kE1, kE2});
}

ScenarioResult drop_e1_scenario(double r) {
  return scenario_drop(pi_distribution(r), kE1, {kA}, {kB}, {kE2}, "drop-E1");
}

ScenarioResult drop_e2_scenario(double r) {
  Matrix t(4, 5);
  t << row(1, -0.5, 0, 0, 0), row(0, 0, 1, 0, 0), row(0, 0, 0, 1, 0),
      row(0, 0, 0, 0, 1);
  const GaussianVector g = linear_transform(pi_distribution(r), t, {"A'", kC, kE1, kE2});
  return scenario_drop(g, kE2, {"A'"}, {kC}, {kE1}, "drop-E2");
}

double appendix_A_objective(double r, double g, double h) {
  Matrix t(4, 5);
  t << row(1, g, 0, 0, 0), row(0, h, 1, 0, 0), row(0, 1, 0, 0, 0), row(0, 0, 0, 1, 0);
  const GaussianVector v = linear_transform(pi_distribution(r), t, {"A'", "C'", kB, kE1});
  return delta_I(v, {"A'"}, {"C'"}, {kB, kE1}).delta_dr;
}

AppendixAResult appendix_A_optimize(double r) {
  derived_params(r);
  // The objective only needs X(r) once; evaluate it on a fixed matrix.
  const Matrix x = purification_x_matrix(r);
  auto objective = [&x](double g, double h) {
    Matrix t(4, 5);
    t << row(1, g, 0, 0, 0), row(0, h, 1, 0, 0), row(0, 1, 0, 0, 0), row(0, 0, 0, 1, 0);
    const Matrix s = t * x * t.transpose();
    auto ld = [&s](std::initializer_list<Eigen::Index> idx) {
      return log_det_spd(principal_submatrix(s, std::vector<Eigen::Index>(idx)));
    };
    // delta_dr = I(A';C') - I(A';{B,E1}) in bits
    const double i_ac = ld({0}) + ld({1}) - ld({0, 1});
    const double i_ae = ld({0}) + ld({2, 3}) - ld({0, 2, 3});
    return 0.5 * (i_ac - i_ae) / std::numbers::ln2;
  };

  AppendixAResult best{0.0, 0.0, objective(0.0, 0.0)};
  for (int i = -40; i <= 40; ++i) {
    for (int k = -40; k <= 40; ++k) {
      const double g = 0.1 * i;
      const double h = 0.1 * k;
      const double v = objective(g, h);
      if (v > best.delta_dr) best = {g, h, v};
    }
  }

  double step = 0.1;
  while (step >= 1e-8) {
    bool moved = false;
    for (int coord = 0; coord < 2; ++coord) {
      for (double dir : {1.0, -1.0}) {
        while (true) {
          AppendixAResult trial = best;
          (coord == 0 ? trial.g : trial.h) += dir * step;
          trial.delta_dr = objective(trial.g, trial.h);
          if (!(trial.delta_dr > best.delta_dr)) break;
          best = trial;
          moved = true;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  return best;
}

ScenarioResult appendix_B_scenario(double r, int case_id) {
  const DerivedParams d = derived_params(r);
  Matrix t(4, 5);
  std::string name;
  switch (case_id) {
    case 1:
      t << row(0.5, 0, 0.5, 0, -1), row(0, 1, 0, 0, 0), row(0, 0, 0, 1, 0),
          row(0, 0, 0, 0, 1);
      name = "appendix-B-case-1";
      break;
    case 2:
      t << row(0.5, 0, 0.5, 0, 0), row(0, 1, 0, 0, 1), row(0, 0, 0, 1, 0),
          row(0, 0, 0, 0, 1);
      name = "appendix-B-case-2";
      break;
    case 3:
      t << row(d.e2r, 0.5, 0, 0, 0), row(0, 0, 1, d.y / d.e2r, 0), row(0, 0, 0, 1, 0),
          row(0, 0, 0, 0, 1);
      name = "appendix-B-case-3";
      break;
    default:
      throw DomainError("appendix_B_scenario: case must be 1, 2 or 3");
  }
  GaussianVector g = linear_transform(pi_distribution(r), t, {"H1", "H2", kE1, kE2});
  return make_scenario(std::move(name), std::move(g), {"H1"}, {"H2"}, {kE1, kE2});
}

DiscardBound intrinsic_discard_bound(const GaussianVector& g, const IndexGroup& u,
                                     const IndexGroup& v,
                                     const std::vector<std::string>& eve) {
  if (eve.size() > 20) throw DomainError("intrinsic_discard_bound: too many variables");
  for (const auto& e : eve) {
    if (u.contains(e) || v.contains(e)) {
      throw LabelError("intrinsic_discard_bound: Eve's variable '" + e +
                       "' overlaps an honest group");
    }
  }
  DiscardBound best{mutual_information(g, u, v), {}};
  const std::size_t n_subsets = std::size_t{1} << eve.size();
  for (std::size_t mask = 1; mask < n_subsets; ++mask) {
    std::vector<std::string> subset;
    for (std::size_t i = 0; i < eve.size(); ++i) {
      if (mask & (std::size_t{1} << i)) subset.push_back(eve[i]);
    }
    const double value = conditional_mi(g, u, v, IndexGroup(subset)).bits;
    if (value < best.min_value) best = {value, std::move(subset)};
  }
  return best;
}

double find_threshold(const std::function<double(double)>& f, double lo, double hi,
                      double tol) {
  if (!(tol > 0.0)) throw DomainError("find_threshold: tolerance must be positive");
  if (!(lo < hi)) throw DomainError("find_threshold: empty bracket");
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw NumericalError("find_threshold: no sign change on [" + std::to_string(lo) +
                         ", " + std::to_string(hi) + "]");
  }
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<ThresholdResult> standard_thresholds(double tol) {
  struct Search {
    std::string key;
    double lo;
    double hi;
    std::function<double(double)> f;
  };
  const std::vector<Search> searches{
      {"activation", 0.05, 0.5, [](double r) { return delta_I_RR_closed(r); }},
      {"drop_e1", 0.05, 0.5, [](double r) { return drop_e1_scenario(r).info.delta_dr; }},
      {"appendix_a", 0.2, 0.4, [](double r) { return appendix_A_optimize(r).delta_dr; }},
      {"appendix_b1", 0.2, 0.6,
       [](double r) { return appendix_B_scenario(r, 1).info.delta_dr; }},
      {"appendix_b2", 0.4, 0.8,
       [](double r) { return appendix_B_scenario(r, 2).info.delta_dr; }},
  };
  std::vector<ThresholdResult> out(searches.size());
  parallel_for(searches.size(), [&](std::size_t i) {
    const Search& s = searches[i];
    double width = s.hi - s.lo;  // bisection halves the bracket until <= tol
    while (width > tol) width *= 0.5;
    out[i] = {s.key, find_threshold(s.f, s.lo, s.hi, tol), s.lo, s.hi, width};
  });
  return out;
}

SweepRow sweep_row(double r) {
  SweepRow row{};
  row.r = r;
  row.dirr_act_closed = delta_I_RR_closed(r);
  row.dirr_act_numeric = activated_info(r).delta_rr;
  const InfoDifferences raw = raw_scenario(r).info;
  row.didr_raw = raw.delta_dr;
  row.dirr_raw = raw.delta_rr;
  row.didr_drop_e1 = drop_e1_scenario(r).info.delta_dr;
  row.didr_app_a = appendix_A_optimize(r).delta_dr;
  row.didr_app_b1 = appendix_B_scenario(r, 1).info.delta_dr;
  row.didr_app_b2 = appendix_B_scenario(r, 2).info.delta_dr;
  row.didr_app_b3 = appendix_B_scenario(r, 3).info.delta_dr;
  return row;
}

std::vector<SweepRow> sweep(double r_min, double r_max, int steps) {
  if (steps < 2) throw DomainError("sweep: steps must be at least 2");
  if (!(r_min > 0.0 && r_max <= 5.0 && r_min < r_max)) {
    throw DomainError("sweep: range must satisfy 0 < r_min < r_max <= 5");
  }
  std::vector<SweepRow> rows(static_cast<std::size_t>(steps));
  parallel_for(rows.size(), [&](std::size_t i) {
    const double r = i + 1 == rows.size()
                         ? r_max
                         : r_min + (r_max - r_min) * static_cast<double>(i) / (steps - 1);
    rows[i] = sweep_row(r);
  });
  return rows;
}

}  // namespace gbi
