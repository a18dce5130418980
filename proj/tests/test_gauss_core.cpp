#include <doctest.h>

#include <cmath>

#include "gbi/bound_info.hpp"
#include "gbi/gauss_core.hpp"
#include "gbi/quantum_gauss.hpp"
#include "oracle.hpp"

using namespace gbi;

namespace {

GaussianVector pi_at(double r) { return pi_distribution(r); }

GaussianVector omega_pair(double m) { return GaussianVector({"A", "B"}, tmsv_x_block(m)); }

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

std::vector<double> r_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 40; ++i) g.push_back(0.05 * i);
  return g;
}

}  // namespace

TEST_CASE("GaussianVector validates its inputs") {
  Matrix m(2, 2);
  m << 2, 1, 1, 2;
  CHECK_NOTHROW(GaussianVector({"a", "b"}, m));
  CHECK_THROWS_AS(GaussianVector({"a", "a"}, m), LabelError);
  CHECK_THROWS_AS(GaussianVector({"a"}, m), DimensionError);
  Matrix asym = m;
  asym(0, 1) = 1.1;
  CHECK_THROWS_AS(GaussianVector({"a", "b"}, asym), DomainError);
  Matrix indefinite(2, 2);
  indefinite << 1, 2, 2, 1;
  CHECK_THROWS_AS(GaussianVector({"a", "b"}, indefinite), DomainError);
  CHECK_THROWS_AS(IndexGroup(std::vector<std::string>{}), LabelError);
}

TEST_CASE("marginalize takes principal submatrices") {
  const GaussianVector pi = pi_at(0.5);
  const GaussianVector abc = marginalize(pi, {kA, kB, kC});
  CHECK(max_abs(abc.ccm() - pi.ccm().topLeftCorner(3, 3)) == 0.0);

  const GaussianVector a = marginalize(pi, {kA});
  const double x = (std::exp(1.0) - 1.0) / 2.0;
  CHECK(a.ccm()(0, 0) == doctest::Approx(std::cosh(1.0) + x).epsilon(1e-14));
  CHECK(a.ccm()(0, 0) == doctest::Approx(2.40222).epsilon(1e-5));

  const GaussianVector same = marginalize(pi, pi.all());
  CHECK(same.labels() == pi.labels());
  CHECK(max_abs(same.ccm() - pi.ccm()) == 0.0);

  const GaussianVector reordered = marginalize(pi, {kC, kA});
  CHECK(reordered.labels() == std::vector<std::string>{kC, kA});
  CHECK(reordered.ccm()(0, 0) == pi.at(kC, kC));
  CHECK(reordered.ccm()(0, 1) == pi.at(kC, kA));

  CHECK_THROWS_AS(marginalize(pi, {"Z"}), LabelError);
}

TEST_CASE("conditioning on E1 decouples Bob; on E2 decouples Clare") {
  for (double r : r_grid()) {
    const GaussianVector c1 = condition(pi_at(r), {kE1});
    CHECK(std::abs(c1.at(kB, kA)) <= 1e-10);
    CHECK(std::abs(c1.at(kB, kC)) <= 1e-10);
    const GaussianVector c2 = condition(pi_at(r), {kE2});
    CHECK(std::abs(c2.at(kC, kA)) <= 1e-10);
    CHECK(std::abs(c2.at(kC, kB)) <= 1e-10);
  }
  // Hand evaluation of the (C, A) entry at r = 0.5: b - (e^{2r} - 1/2)(1/2)/y.
  const DerivedParams d = derived_params(0.5);
  CHECK(std::abs(d.b - (d.e2r - 0.5) * 0.5 / d.y) <= 1e-10);
}

TEST_CASE("conditioning a block-diagonal CCM leaves the other block alone") {
  Matrix m = Matrix::Zero(4, 4);
  m.topLeftCorner(2, 2) << 3, 1, 1, 2;
  m.bottomRightCorner(2, 2) << 5, -1, -1, 4;
  const GaussianVector g({"a", "b", "c", "d"}, m);
  const GaussianVector c = condition(g, {"c", "d"});
  CHECK(max_abs(c.ccm() - m.topLeftCorner(2, 2)) <= 1e-15);

  Matrix singular(3, 3);
  singular << 1, 0, 0, 0, 1, 1, 0, 1, 1;
  const GaussianVector s({"a", "b", "c"}, singular);
  CHECK_THROWS_AS(condition(s, {"b", "c"}), NumericalError);
}

TEST_CASE("linear_transform maps the CCM by congruence") {
  const GaussianVector pi = pi_at(0.7);
  const GaussianVector id = linear_transform(pi, Matrix::Identity(5, 5), pi.labels());
  CHECK(max_abs(id.ccm() - pi.ccm()) == 0.0);

  // x_A - x_B of a TMSV pair: 2(m - sqrt(m^2 - 1)) = 2 e^{-2r}
  for (double r : {0.1, 0.5, 1.0, 2.0}) {
    Matrix t(1, 2);
    t << 1, -1;
    const double v = linear_transform(omega_pair(std::cosh(2 * r)), t, {"d"}).ccm()(0, 0);
    CHECK(v == doctest::Approx(2 * std::exp(-2 * r)).epsilon(1e-12));
  }

  const GaussianVector act = activate(pi);
  const double det_before = oracle::det(oracle::sub(oracle::to_dense(pi.ccm()), {1, 2}));
  const double det_after = oracle::det(oracle::sub(oracle::to_dense(act.ccm()), {1, 2}));
  CHECK(det_after == doctest::Approx(det_before).epsilon(1e-12));

  CHECK_THROWS_AS(linear_transform(pi, Matrix::Identity(4, 4), {"a", "b", "c", "d"}),
                  DimensionError);
  CHECK_THROWS_AS(linear_transform(pi, Matrix::Identity(5, 5), {"a"}), DimensionError);
}

TEST_CASE("mutual information of Gaussian groups") {
  const double mi = mutual_information(omega_pair(std::cosh(1.0)), {"A"}, {"B"});
  CHECK(mi == doctest::Approx(std::log2(std::cosh(1.0))).epsilon(1e-13));
  CHECK(mi == doctest::Approx(0.625813).epsilon(1e-6));

  Matrix block = Matrix::Zero(3, 3);
  block(0, 0) = 2;
  block.bottomRightCorner(2, 2) << 3, 1, 1, 3;
  CHECK(mutual_information(GaussianVector({"a", "b", "c"}, block), {"a"}, {"b", "c"}) == 0.0);

  const GaussianVector pi = pi_at(0.5);
  const double ref = oracle::mutual_information(oracle::to_dense(pi.ccm()), {0}, {1, 2});
  CHECK(mutual_information(pi, {kA}, {kB, kC}) == doctest::Approx(ref).epsilon(1e-12));

  CHECK_THROWS_AS(mutual_information(pi, {kA, kB}, {kB}), LabelError);
}

TEST_CASE("conditional mutual information zeros from the two displacement constructions") {
  for (double r : r_grid()) {
    const GaussianVector pi = pi_at(r);
    CHECK(conditional_mi(pi, {kB}, {kA, kC}, {kE1}).bits <= 1e-10);
    CHECK(conditional_mi(pi, {kC}, {kA, kB}, {kE2}).bits <= 1e-10);
  }
  // Conditioning on an independent variable changes nothing.
  Matrix m = Matrix::Zero(3, 3);
  m.topLeftCorner(2, 2) = tmsv_x_block(1.7);
  m(2, 2) = 4.0;
  const GaussianVector g({"a", "b", "w"}, m);
  CHECK(conditional_mi(g, {"a"}, {"b"}, {"w"}).bits ==
        doctest::Approx(mutual_information(g, {"a"}, {"b"})).epsilon(1e-13));
  CHECK_THROWS_AS(conditional_mi(g, {"a"}, {"b"}, {"a"}), LabelError);
}

TEST_CASE("conditional MI agrees with the chain-rule oracle on random matrices") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Matrix m = oracle::random_spd(5, seed);
    const GaussianVector g({"a", "b", "c", "d", "e"}, m);
    const double ref = oracle::conditional_mi(oracle::to_dense(m), {0}, {1, 2}, {3, 4});
    CHECK(conditional_mi(g, {"a"}, {"b", "c"}, {"d", "e"}).bits ==
          doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("properties on random positive definite matrices") {
  for (std::uint64_t seed = 100; seed < 130; ++seed) {
    const Matrix m = oracle::random_spd(5, seed);
    const GaussianVector g({"a", "b", "c", "d", "e"}, m);

    // both unconditional code paths agree
    CHECK(std::abs(mutual_information(g, {"a", "b"}, {"c"}) -
                   conditional_mi(g, {"a", "b"}, {"c"}).bits) <= 1e-12);

    // discarding never increases information
    CHECK(mutual_information(g, {"a"}, {"b", "c"}) >=
          mutual_information(g, {"a"}, {"b"}) - 1e-10);

    // marginalize after transform == transform by the matching rows
    const Matrix t = oracle::random_spd(5, seed + 1000).topRows(4);
    const GaussianVector tg = linear_transform(g, t, {"p", "q", "s", "u"});
    const GaussianVector lhs = marginalize(tg, {"q", "u"});
    Matrix rows(2, 5);
    rows.row(0) = t.row(1);
    rows.row(1) = t.row(3);
    const GaussianVector rhs = linear_transform(g, rows, {"q", "u"});
    CHECK(max_abs(lhs.ccm() - rhs.ccm()) <= 1e-12 * max_abs(rhs.ccm()));

    // outputs stay symmetric
    CHECK(is_symmetric(condition(g, {"d"}).ccm()));
    CHECK(is_symmetric(tg.ccm()));
  }
}

TEST_CASE("log_density is normalized") {
  const GaussianVector g({"a"}, Matrix::Constant(1, 1, 2.0));
  CHECK(std::exp(log_density(g, Vector::Zero(1))) ==
        doctest::Approx(1.0 / std::sqrt(2.0 * M_PI)).epsilon(1e-14));
  double integral = 0.0;
  const double h = 1e-3;
  for (double t = -12.0; t <= 12.0; t += h) {
    integral += std::exp(log_density(g, Vector::Constant(1, t))) * h;
  }
  CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sampling is deterministic per seed") {
  const GaussianVector pi = pi_at(0.5);
  const Matrix a = sample(pi, 1000, 7);
  const Matrix b = sample(pi, 1000, 7);
  const Matrix c = sample(pi, 1000, 8);
  CHECK((a.array() == b.array()).all());
  CHECK_FALSE((a.array() == c.array()).all());
  CHECK(substream_seed(1, 0) != substream_seed(1, 1));
  CHECK(substream_seed(1, 0) != substream_seed(2, 0));
  CHECK_THROWS_AS(sample(pi, 0, 1), DomainError);
}

TEST_CASE("sample statistics follow the CCM / 2 convention") {
  const Matrix s = sample(GaussianVector({"a"}, Matrix::Constant(1, 1, 2.0)), 1000000, 11);
  const double var = s.col(0).squaredNorm() / static_cast<double>(s.rows());
  CHECK(std::abs(var - 1.0) <= 0.01);

  const Matrix p = sample(omega_pair(std::cosh(1.0)), 1000000, 12);
  const double sxx = p.col(0).squaredNorm();
  const double syy = p.col(1).squaredNorm();
  const double sxy = p.col(0).dot(p.col(1));
  CHECK(std::abs(sxy / std::sqrt(sxx * syy) - std::tanh(1.0)) <= 0.005);
}

TEST_CASE("empirical_ccm") {
  const GaussianVector pi = pi_at(0.5);
  const Eigen::Index n = 1000000;
  const Matrix e = empirical_ccm(sample(pi, n, 3));
  const Matrix& c = pi.ccm();
  for (Eigen::Index i = 0; i < 5; ++i)
    for (Eigen::Index j = 0; j < 5; ++j) {
      const double se = std::sqrt((c(i, i) * c(j, j) + c(i, j) * c(i, j)) / n);
      CHECK(std::abs(e(i, j) - c(i, j)) <= 5 * se);
    }
  CHECK(is_symmetric(e));
  CHECK(Eigen::SelfAdjointEigenSolver<Matrix>(e).eigenvalues().minCoeff() >= 0.0);

  Matrix rows(3, 2);
  rows << 1.5, -2.0, 1.5, -2.0, 1.5, -2.0;
  Matrix expected(2, 2);
  expected << 4.5, -6.0, -6.0, 8.0;
  CHECK(max_abs(empirical_ccm(rows) - expected) <= 1e-15);
  CHECK_THROWS_AS(empirical_ccm(Matrix::Ones(1, 2)), DomainError);
}
