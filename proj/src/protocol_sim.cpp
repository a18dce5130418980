#include "gbi/protocol_sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "gbi/parallel.hpp"
#include "gbi/quantum_gauss.hpp"

namespace gbi {

namespace {

const char* party_name(HonestParty p) {
  switch (p) {
    case HonestParty::Alice: return "Alice";
    case HonestParty::Bob: return "Bob";
    case HonestParty::Clare: return "Clare";
  }
  return "?";
}

const std::string& party_label(HonestParty p) {
  switch (p) {
    case HonestParty::Alice: return kA;
    case HonestParty::Bob: return kB;
    case HonestParty::Clare: return kC;
  }
  return kA;
}

std::string private_label(HonestParty p) { return "z" + party_label(p); }

// Sums chunk Gram matrices pairwise in index order so the result is fixed for
// a given chunking, however many workers produced the chunks.
Matrix pairwise_sum(std::vector<Matrix> parts) {
  while (parts.size() > 1) {
    std::vector<Matrix> next;
    next.reserve((parts.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
      next.push_back(parts[i] + parts[i + 1]);
    }
    if (parts.size() % 2 == 1) next.push_back(parts.back());
    parts = std::move(next);
  }
  return parts.front();
}

Matrix gram(const Matrix& rows) {
  Matrix g = Matrix::Zero(rows.cols(), rows.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(rows.transpose());
  return g.selfadjointView<Eigen::Lower>();
}

void check_rounds(std::int64_t n) {
  if (n < kMinSimRounds) {
    throw DomainError("simulation needs at least " + std::to_string(kMinSimRounds) +
                      " rounds, got " + std::to_string(n));
  }
}

std::string protocol_key(Splitting s) { return s == Splitting::B_AC ? "b-ac" : "c-ab"; }

std::int64_t chunk_count(std::int64_t n) { return (n + kSimChunk - 1) / kSimChunk; }

Eigen::Index chunk_rows(std::int64_t n, std::int64_t chunk) {
  return static_cast<Eigen::Index>(std::min<std::int64_t>(kSimChunk, n - chunk * kSimChunk));
}

}  // namespace

ProtocolModel build_model(const SplittingProtocol& p) {
  ProtocolModel m{protocol_key(p.splitting), p.splitting, {}, p.public_label, {}, {}};
  const std::string z0 = private_label(p.pair[0]);
  const std::string z1 = private_label(p.pair[1]);
  const std::string zs = private_label(p.solo);
  const std::vector<std::string> pair_names{party_name(p.pair[0]), party_name(p.pair[1])};

  m.sources.push_back({GaussianVector({z0, z1}, p.private_ccm), pair_names});
  m.sources.push_back(
      {GaussianVector({p.public_label}, Matrix::Constant(1, 1, 2.0 * p.public_variance)),
       pair_names});
  m.sources.push_back(
      {GaussianVector({zs}, Matrix::Constant(1, 1, 2.0 * p.solo_variance)),
       {party_name(p.solo)}});

  for (HonestParty q : {HonestParty::Alice, HonestParty::Bob, HonestParty::Clare}) {
    Party record;
    record.name = party_name(q);
    for (const Source& s : m.sources) {
      if (std::find(s.holders.begin(), s.holders.end(), record.name) != s.holders.end()) {
        for (const auto& l : s.distribution.labels()) record.private_sources.push_back(l);
      }
    }
    record.displacement_rule =
        DisplacementRule{private_label(q), p.coeffs_x.at(q), party_label(q)};
    m.parties.push_back(std::move(record));
  }
  m.parties.push_back(Party{"Eve", {}, std::nullopt});
  m.output_labels = {kA, kB, kC, p.public_label};
  return m;
}

bool channel_discipline_ok(const ProtocolModel& model, std::string* why) {
  auto fail = [why](std::string reason) {
    if (why) *why = std::move(reason);
    return false;
  };
  std::map<std::string, const Source*> owner_of;
  for (const Source& s : model.sources) {
    for (const auto& l : s.distribution.labels()) owner_of[l] = &s;
  }
  const auto bc = owner_of.find(model.broadcast_label);
  if (bc == owner_of.end()) return fail("broadcast value is not drawn by any source");

  for (const Party& party : model.parties) {
    if (!party.displacement_rule) {
      if (!party.private_sources.empty()) return fail(party.name + " holds private draws");
      continue;
    }
    const DisplacementRule& rule = *party.displacement_rule;
    const auto& own = party.private_sources;
    if (std::find(own.begin(), own.end(), rule.private_input) == own.end()) {
      return fail(party.name + " displaces a value it did not draw: " + rule.private_input);
    }
    // A party outside the broadcasting side learns nothing beyond the broadcast.
    const auto& holders = bc->second->holders;
    const bool sender = std::find(holders.begin(), holders.end(), party.name) != holders.end();
    if (!sender) {
      for (const auto& label : own) {
        const auto it = owner_of.find(label);
        if (it == owner_of.end()) return fail(party.name + " reads unknown value " + label);
        const auto& h = it->second->holders;
        if (h.size() != 1 || h.front() != party.name) {
          return fail(party.name + " reads " + label + ", shared across the splitting");
        }
      }
    }
  }
  return true;
}

void score_report(SimReport& report) {
  const Matrix& c = report.analytic_ccm;
  const Matrix& e = report.empirical_ccm;
  const double n = static_cast<double>(report.n_rounds);
  report.max_abs_dev = 0.0;
  report.max_dev_in_se = 0.0;
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      const double dev = std::abs(e(i, j) - c(i, j));
      const double se = std::sqrt((c(i, i) * c(j, j) + c(i, j) * c(i, j)) / n);
      report.max_abs_dev = std::max(report.max_abs_dev, dev);
      report.max_dev_in_se = std::max(report.max_dev_in_se, dev / se);
    }
  }
}

SimReport simulate(const SplittingProtocol& p, std::int64_t n, std::uint64_t seed) {
  check_rounds(n);
  const ProtocolModel model = build_model(p);
  if (std::string why; !channel_discipline_ok(model, &why)) {
    throw DomainError("protocol violates public-channel discipline: " + why);
  }
  const std::int64_t chunks = chunk_count(n);
  const std::size_t n_sources = model.sources.size();
  std::vector<Matrix> grams(static_cast<std::size_t>(chunks));
  std::vector<std::int64_t> broadcasts(static_cast<std::size_t>(chunks), 0);

  parallel_for(grams.size(), [&](std::size_t chunk) {
    const Eigen::Index rows = chunk_rows(n, static_cast<std::int64_t>(chunk));
    // Private draws of this chunk, one column per source label.
    std::map<std::string, Vector> draws;
    for (std::size_t s = 0; s < n_sources; ++s) {
      const GaussianVector& dist = model.sources[s].distribution;
      const Matrix values = sample(dist, rows, substream_seed(seed, chunk * n_sources + s));
      for (Eigen::Index k = 0; k < dist.dim(); ++k) draws[dist.labels()[k]] = values.col(k);
    }
    // The public channel carries one value per round.
    const Vector broadcast = draws.at(model.broadcast_label);
    broadcasts[chunk] = broadcast.size();

    Matrix out(rows, 4);
    for (const Party& party : model.parties) {
      if (!party.displacement_rule) continue;
      const DisplacementRule& rule = *party.displacement_rule;
      const auto col = std::find(model.output_labels.begin(), model.output_labels.end(),
                                 rule.output) - model.output_labels.begin();
      out.col(col) = draws.at(rule.private_input) + rule.public_coeff * broadcast;
    }
    out.col(3) = broadcast;  // Eve's record
    grams[chunk] = gram(out);
  });

  SimReport report;
  report.protocol = model.name;
  report.r = p.r;
  report.n_rounds = n;
  report.seed = seed;
  for (auto b : broadcasts) report.broadcasts += b;
  report.labels = model.output_labels;
  report.empirical_ccm = (2.0 / static_cast<double>(n)) * pairwise_sum(std::move(grams));
  report.analytic_ccm = compose_protocol(p).ccm();
  score_report(report);
  return report;
}

SimReport simulate_full(double r, std::int64_t n, std::uint64_t seed) {
  check_rounds(n);
  const GaussianVector pi = pi_distribution(r);
  const std::int64_t chunks = chunk_count(n);
  std::vector<Matrix> grams(static_cast<std::size_t>(chunks));
  parallel_for(grams.size(), [&](std::size_t chunk) {
    const Eigen::Index rows = chunk_rows(n, static_cast<std::int64_t>(chunk));
    grams[chunk] = gram(sample(pi, rows, substream_seed(seed, chunk)));
  });

  SimReport report;
  report.protocol = "full";
  report.r = r;
  report.n_rounds = n;
  report.seed = seed;
  report.labels = pi.labels();
  report.empirical_ccm = (2.0 / static_cast<double>(n)) * pairwise_sum(std::move(grams));
  report.analytic_ccm = pi.ccm();
  score_report(report);
  return report;
}

nlohmann::ordered_json matrix_to_json(const Matrix& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::ordered_json to_json(const SimReport& report) {
  return nlohmann::ordered_json{
      {"protocol", report.protocol},
      {"r", report.r},
      {"n", report.n_rounds},
      {"seed", report.seed},
      {"labels", report.labels},
      {"empirical_ccm", matrix_to_json(report.empirical_ccm)},
      {"analytic_ccm", matrix_to_json(report.analytic_ccm)},
      {"max_abs_dev", report.max_abs_dev},
      {"max_dev_in_se", report.max_dev_in_se},
  };
}

}  // namespace gbi
