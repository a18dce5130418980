#pragma once

// Monte Carlo runs of the public-communication constructions. Each round the
// parties draw their private Gaussian sources, the pair broadcasts one public
// value, and every honest party displaces its private draw by a fixed
// multiple of the broadcast. Eve records the broadcast.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gbi/bound_info.hpp"
#include "gbi/gauss_core.hpp"

namespace gbi {

/// Rounds per substream. Chunk k is drawn from substream_seed(seed, k * S + s)
/// for source s out of S, independent of the worker count.
inline constexpr Eigen::Index kSimChunk = 1 << 16;
inline constexpr Eigen::Index kMinSimRounds = 10000;

/// x_out = private_input + public_coeff * broadcast
struct DisplacementRule {
  std::string private_input;
  double public_coeff;
  std::string output;
};

struct Party {
  std::string name;  // Alice, Bob, Clare or Eve
  // Labels of the private draws this party can read.
  std::vector<std::string> private_sources;
  // Absent for Eve, who only records the broadcast.
  std::optional<DisplacementRule> displacement_rule;
};

/// A private Gaussian source drawn jointly by `holders`.
struct Source {
  GaussianVector distribution;
  std::vector<std::string> holders;
};

struct ProtocolModel {
  std::string name;
  Splitting splitting;
  std::vector<Source> sources;
  std::string broadcast_label;
  std::vector<Party> parties;
  std::vector<std::string> output_labels;  // (A, B, C, E)
};

ProtocolModel build_model(const SplittingProtocol& p);

/// Structural check that the only message crossing the splitting is the one
/// broadcast value: the lone party reads nothing but its own draws and the
/// broadcast. On failure `why` (if given) receives the reason.
bool channel_discipline_ok(const ProtocolModel& model, std::string* why = nullptr);

struct SimReport {
  std::string protocol;
  double r = 0.0;
  std::int64_t n_rounds = 0;
  std::uint64_t seed = 0;
  std::int64_t broadcasts = 0;
  std::vector<std::string> labels;
  Matrix empirical_ccm;
  Matrix analytic_ccm;
  double max_abs_dev = 0.0;
  // Deviation in units of SE_ij = sqrt((C_ii C_jj + C_ij^2) / n), the standard
  // error of a zero-mean covariance estimate (in CCM scale the factor 2 cancels).
  double max_dev_in_se = 0.0;
};

SimReport simulate(const SplittingProtocol& p, std::int64_t n, std::uint64_t seed);

/// Direct sampling of the five-variable Pi(r), compared against X(r).
SimReport simulate_full(double r, std::int64_t n, std::uint64_t seed);

/// Fills the deviation fields from the two matrices.
void score_report(SimReport& report);

nlohmann::ordered_json to_json(const SimReport& report);
nlohmann::ordered_json matrix_to_json(const Matrix& m);

}  // namespace gbi
