#include "gbi/gauss_core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

namespace gbi {

namespace {

void check_unique(const std::vector<std::string>& names) {
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    if (!seen.insert(n).second) {
      throw LabelError("duplicate variable name '" + n + "'");
    }
  }
}

// Turns a determinant-ratio information value into bits, applying the
// negative-residue policy.
ConditionalInfo finish_info(double nats_times_two) {
  double bits = 0.5 * nats_times_two / std::numbers::ln2;
  if (bits >= 0.0) return {bits, false};
  if (bits >= kNegativeInfoFloor) return {0.0, true};
  throw NumericalError("mutual information evaluated to " +
                       std::to_string(bits) + " bits");
}

}  // namespace

// ---------------------------------------------------------------------------
// IndexGroup

IndexGroup::IndexGroup(std::initializer_list<std::string> names)
    : IndexGroup(std::vector<std::string>(names)) {}

IndexGroup::IndexGroup(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.empty()) throw LabelError("index group must not be empty");
  check_unique(names_);
}

bool IndexGroup::contains(const std::string& name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

IndexGroup IndexGroup::joined(const IndexGroup& other) const {
  if (!disjoint(*this, other)) throw LabelError("index groups overlap");
  std::vector<std::string> all = names_;
  all.insert(all.end(), other.names_.begin(), other.names_.end());
  return IndexGroup(std::move(all));
}

bool disjoint(const IndexGroup& a, const IndexGroup& b) {
  return std::none_of(a.names().begin(), a.names().end(),
                      [&](const std::string& n) { return b.contains(n); });
}

// ---------------------------------------------------------------------------
// GaussianVector

GaussianVector::GaussianVector(std::vector<std::string> labels, Matrix ccm)
    : labels_(std::move(labels)), ccm_(std::move(ccm)) {
  if (ccm_.rows() != ccm_.cols()) {
    throw DimensionError("CCM must be square");
  }
  if (static_cast<Eigen::Index>(labels_.size()) != ccm_.rows()) {
    throw DimensionError("label count " + std::to_string(labels_.size()) +
                         " does not match CCM dimension " +
                         std::to_string(ccm_.rows()));
  }
  check_unique(labels_);
  if (!ccm_.allFinite()) throw DomainError("CCM has non-finite entries");
  if (!is_symmetric(ccm_)) throw DomainError("CCM is not symmetric");
  if (ccm_.size() > 0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(ccm_, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, ccm_.diagonal().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
      throw DomainError("CCM is not positive semidefinite");
    }
  }
}

Eigen::Index GaussianVector::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw LabelError("unknown variable '" + label + "'");
  return static_cast<Eigen::Index>(it - labels_.begin());
}

std::vector<Eigen::Index> GaussianVector::indices(const IndexGroup& group) const {
  std::vector<Eigen::Index> idx;
  idx.reserve(group.size());
  for (const auto& n : group.names()) idx.push_back(index_of(n));
  return idx;
}

double GaussianVector::at(const std::string& row, const std::string& col) const {
  return ccm_(index_of(row), index_of(col));
}

// ---------------------------------------------------------------------------
// Dense helpers

Matrix cholesky_factor(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("cholesky: matrix not square");
  const Eigen::Index n = a.rows();
  Matrix l = Matrix::Zero(n, n);
  if (n == 0) return l;
  const double threshold = kPivotTol * a.diagonal().cwiseAbs().maxCoeff();
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > threshold)) {
      throw NumericalError("matrix is not positive definite (pivot " +
                           std::to_string(pivot) + " at index " +
                           std::to_string(j) + ")");
    }
    l(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return l;
}

bool is_positive_definite(const Matrix& a) {
  try {
    cholesky_factor(a);
    return true;
  } catch (const NumericalError&) {
    return false;
  }
}

double log_det_spd(const Matrix& a) {
  Matrix l = cholesky_factor(a);
  return 2.0 * l.diagonal().array().log().sum();
}

Matrix inverse_spd(const Matrix& a) {
  Matrix l = cholesky_factor(a);
  Matrix linv = l.triangularView<Eigen::Lower>().solve(
      Matrix::Identity(a.rows(), a.cols()));
  Matrix inv = linv.transpose() * linv;
  return 0.5 * (inv + inv.transpose());
}

bool is_symmetric(const Matrix& a, double rel_tol) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Matrix principal_submatrix(const Matrix& a, const std::vector<Eigen::Index>& idx) {
  return cross_block(a, idx, idx);
}

Matrix cross_block(const Matrix& a, const std::vector<Eigen::Index>& rows,
                   const std::vector<Eigen::Index>& cols) {
  Matrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = a(rows[i], cols[j]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gaussian operations

GaussianVector marginalize(const GaussianVector& g, const IndexGroup& keep) {
  return GaussianVector(keep.names(), principal_submatrix(g.ccm(), g.indices(keep)));
}

GaussianVector condition(const GaussianVector& g, const IndexGroup& on) {
  const auto on_idx = g.indices(on);
  std::vector<Eigen::Index> rest_idx;
  std::vector<std::string> rest_labels;
  for (Eigen::Index i = 0; i < g.dim(); ++i) {
    if (std::find(on_idx.begin(), on_idx.end(), i) == on_idx.end()) {
      rest_idx.push_back(i);
      rest_labels.push_back(g.labels()[i]);
    }
  }
  const Matrix s_oo = principal_submatrix(g.ccm(), on_idx);
  const Matrix s_ro = cross_block(g.ccm(), rest_idx, on_idx);
  const Matrix s_rr = principal_submatrix(g.ccm(), rest_idx);
  Matrix l;
  try {
    l = cholesky_factor(s_oo);
  } catch (const NumericalError&) {
    throw NumericalError("condition: conditioning block is numerically singular");
  }
  // s_ro * s_oo^{-1} * s_or = (L^{-1} s_or)^T (L^{-1} s_or)
  const Matrix w = l.triangularView<Eigen::Lower>().solve(s_ro.transpose());
  Matrix schur = s_rr - w.transpose() * w;
  schur = 0.5 * (schur + schur.transpose());
  return GaussianVector(std::move(rest_labels), std::move(schur));
}

GaussianVector linear_transform(const GaussianVector& g, const Matrix& transform,
                                std::vector<std::string> new_labels) {
  if (transform.cols() != g.dim()) {
    throw DimensionError("linear_transform: transform has " +
                         std::to_string(transform.cols()) + " columns, expected " +
                         std::to_string(g.dim()));
  }
  if (static_cast<Eigen::Index>(new_labels.size()) != transform.rows()) {
    throw DimensionError("linear_transform: label count does not match rows");
  }
  Matrix out = transform * g.ccm() * transform.transpose();
  out = 0.5 * (out + out.transpose());
  return GaussianVector(std::move(new_labels), std::move(out));
}

double mutual_information(const GaussianVector& g, const IndexGroup& u,
                          const IndexGroup& v) {
  const IndexGroup uv = u.joined(v);
  try {
    const double ld_u = log_det_spd(principal_submatrix(g.ccm(), g.indices(u)));
    const double ld_v = log_det_spd(principal_submatrix(g.ccm(), g.indices(v)));
    const double ld_uv = log_det_spd(principal_submatrix(g.ccm(), g.indices(uv)));
    return finish_info(ld_u + ld_v - ld_uv).bits;
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("mutual_information: ") + e.what());
  }
}

namespace {

ConditionalInfo info_of(const GaussianVector& c, const IndexGroup& u, const IndexGroup& v) {
  const IndexGroup uv = u.joined(v);
  const double ld_u = log_det_spd(principal_submatrix(c.ccm(), c.indices(u)));
  const double ld_v = log_det_spd(principal_submatrix(c.ccm(), c.indices(v)));
  const double ld_uv = log_det_spd(principal_submatrix(c.ccm(), c.indices(uv)));
  return finish_info(ld_u + ld_v - ld_uv);
}

}  // namespace

ConditionalInfo conditional_mi(const GaussianVector& g, const IndexGroup& u,
                               const IndexGroup& v, const IndexGroup& w) {
  if (!disjoint(u, v) || !disjoint(u, w) || !disjoint(v, w)) {
    throw LabelError("conditional_mi: groups must be pairwise disjoint");
  }
  return info_of(condition(g, w), u, v);
}

ConditionalInfo conditional_mi(const GaussianVector& g, const IndexGroup& u,
                               const IndexGroup& v) {
  return info_of(g, u, v);
}

double log_density(const GaussianVector& g, const Vector& eta) {
  if (eta.size() != g.dim()) throw DimensionError("log_density: wrong point size");
  const Matrix l = cholesky_factor(g.ccm());
  const Vector w = l.triangularView<Eigen::Lower>().solve(eta);
  const double n = static_cast<double>(g.dim());
  return -0.5 * n * std::log(std::numbers::pi) -
         l.diagonal().array().log().sum() - w.squaredNorm();
}

// ---------------------------------------------------------------------------
// Sampling

NormalStream::NormalStream(std::uint64_t seed) : engine_(seed) {}

double NormalStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
  // u1 in (0, 1], u2 in [0, 1)
  const double u1 = (static_cast<double>(engine_() >> 11) + 1.0) * kInv53;
  const double u2 = static_cast<double>(engine_() >> 11) * kInv53;
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Matrix sample(const GaussianVector& g, Eigen::Index n, std::uint64_t seed) {
  if (n < 1) throw DomainError("sample: n must be at least 1");
  Matrix l;
  try {
    l = cholesky_factor(0.5 * g.ccm());
  } catch (const NumericalError&) {
    throw NumericalError("sample: CCM is not positive definite");
  }
  const Eigen::Index d = g.dim();
  NormalStream normals(seed);
  Matrix z(d, n);
  for (Eigen::Index row = 0; row < n; ++row) {
    for (Eigen::Index k = 0; k < d; ++k) z(k, row) = normals.next();
  }
  Matrix out = (l.triangularView<Eigen::Lower>() * z).transpose();
  return out;
}

Matrix empirical_ccm(const Matrix& samples) {
  if (samples.rows() < 2) throw DomainError("empirical_ccm: need at least 2 rows");
  Matrix gram = Matrix::Zero(samples.cols(), samples.cols());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(samples.transpose());
  Matrix out = gram.selfadjointView<Eigen::Lower>();
  return (2.0 / static_cast<double>(samples.rows())) * out;
}

}  // namespace gbi
