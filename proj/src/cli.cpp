#include "gbi/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gbi/bound_info.hpp"
#include "gbi/protocol_sim.hpp"
#include "gbi/quantum_gauss.hpp"
#include "gbi/verify.hpp"

namespace gbi::cli {

namespace {

using Json = nlohmann::ordered_json;

void check_r(double r) {
  if (!(r > 0.0 && r <= 5.0)) {
    throw DomainError("--r must lie in (0, 5], got " + format_double(r));
  }
}

std::string matrix_csv(const Matrix& m) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

// Writes to --out when given, otherwise to the command's stdout.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DomainError("cannot open output file '" + path + "'");
  file << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct Options {
  double r = 0.5;
  double r_min = 0.05;
  double r_max = 1.5;
  int steps = 200;
  double tol = 1e-6;
  std::int64_t samples = 1000000;
  std::uint64_t seed = 42;
  std::string protocol = "b-ac";
  std::string what = "X";
  std::string out;
  std::string format;
  std::string r_grid;
  int j = 2;
  bool vacuum = false;
  bool inject_fault = false;
};

std::string cmd_matrix(const Options& o) {
  check_r(o.r);
  Matrix m;
  if (o.what == "X") {
    m = purification_x_matrix(o.r);
  } else if (o.what == "gamma") {
    m = purification_cm(o.r).gamma();
  } else {
    m = bound_entangled_cm(o.r).gamma();
  }
  if (o.format == "json") return dump(Json{{"what", o.what}, {"r", o.r}, {"matrix", matrix_to_json(m)}});
  return matrix_csv(m);
}

std::string cmd_sweep(const Options& o) {
  const auto rows = sweep(o.r_min, o.r_max, o.steps);
  if (o.format == "json") {
    Json arr = Json::array();
    for (const SweepRow& r : rows) {
      arr.push_back({{"r", r.r},
                     {"dIRR_act_closed", r.dirr_act_closed},
                     {"dIRR_act_numeric", r.dirr_act_numeric},
                     {"dIDR_raw", r.didr_raw},
                     {"dIRR_raw", r.dirr_raw},
                     {"dIDR_dropE1", r.didr_drop_e1},
                     {"dIDR_appA", r.didr_app_a},
                     {"dIDR_appB1", r.didr_app_b1},
                     {"dIDR_appB2", r.didr_app_b2},
                     {"dIDR_appB3", r.didr_app_b3}});
    }
    return dump(arr);
  }
  std::string csv =
      "r,dIRR_act_closed,dIRR_act_numeric,dIDR_raw,dIRR_raw,dIDR_dropE1,dIDR_appA,"
      "dIDR_appB1,dIDR_appB2,dIDR_appB3\n";
  for (const SweepRow& r : rows) {
    for (double v : {r.r, r.dirr_act_closed, r.dirr_act_numeric, r.didr_raw, r.dirr_raw,
                     r.didr_drop_e1, r.didr_app_a, r.didr_app_b1, r.didr_app_b2}) {
      csv += format_double(v);
      csv += ',';
    }
    csv += format_double(r.didr_app_b3);
    csv += '\n';
  }
  return csv;
}

std::string cmd_thresholds(const Options& o) {
  if (!(o.tol > 0.0)) throw DomainError("--tol must be positive");
  Json j = Json::object();
  for (const ThresholdResult& t : standard_thresholds(o.tol)) {
    j[t.key] = {{"value", t.root}, {"bracket", {t.lo, t.hi}}, {"tol", t.tol}};
  }
  return dump(j);
}

std::string cmd_verify(const Options& o, bool& all_passed) {
  VerifyOptions vo;
  if (!o.r_grid.empty()) vo.r_grid = parse_r_grid(o.r_grid);
  if (o.inject_fault) {
    vo.x_source = [](double r) {
      Matrix x = purification_x_matrix(r);
      x(0, 2) += 1e-3;
      x(2, 0) += 1e-3;
      return x;
    };
  }
  const auto checks = run_verification(vo);
  all_passed = true;
  for (const auto& c : checks) all_passed = all_passed && c.passed;

  if (o.format == "json") {
    Json arr = Json::array();
    for (const auto& c : checks) {
      arr.push_back({{"name", c.name},
                     {"value", c.value},
                     {"tolerance", c.tolerance},
                     {"passed", c.passed},
                     {"detail", c.detail}});
    }
    return dump(Json{{"passed", all_passed}, {"checks", arr}});
  }
  std::ostringstream text;
  for (const auto& c : checks) {
    text << (c.passed ? "PASS " : "FAIL ") << c.name << "  value=" << format_double(c.value)
         << "  tol=" << format_double(c.tolerance) << "  (" << c.detail << ")\n";
  }
  text << (all_passed ? "all " : "FAILED: not all ") << checks.size() << " checks passed\n";
  return text.str();
}

std::string cmd_simulate(const Options& o, bool& within_bound) {
  check_r(o.r);
  if (o.samples < kMinSimRounds) {
    throw DomainError("--samples must be at least " + std::to_string(kMinSimRounds));
  }
  SimReport rep;
  if (o.protocol == "full") {
    rep = simulate_full(o.r, o.samples, o.seed);
  } else {
    rep = simulate(protocol(o.protocol == "b-ac" ? Splitting::B_AC : Splitting::C_AB, o.r),
                   o.samples, o.seed);
  }
  within_bound = rep.max_dev_in_se <= 5.0;
  return dump(to_json(rep));
}

std::string cmd_ppt(const Options& o) {
  if (!o.vacuum) check_r(o.r);
  const QuantumCM cm = o.vacuum ? QuantumCM::vacuum(3) : bound_entangled_cm(o.r);
  Json j = Json::object();
  j["state"] = o.vacuum ? "vacuum" : "bound_entangled";
  if (!o.vacuum) j["r"] = o.r;
  const std::pair<const char*, int> cuts[] = {{"A-(BC)", 0}, {"B-(AC)", 1}, {"C-(AB)", 2}};
  for (const auto& [name, mode] : cuts) {
    const PptReport rep = ppt_report(cm, {mode});
    j[name] = {{"min_nu", rep.min_nu}, {"is_ppt", rep.is_ppt}};
  }
  return dump(j);
}

std::string cmd_decompose(const Options& o) {
  check_r(o.r);
  const EveDecomposition d = eve_decomposition(o.r, o.j);
  const std::string k = d.public_label;
  auto weights = [&](const std::array<double, 4>& c) {
    return Json{{"zA", c[0]}, {"zB", c[1]}, {"zC", c[2]}, {"x" + k, c[3]}};
  };
  return dump(Json{{"r", o.r},
                   {"j", d.j},
                   {"coefficients", weights(d.coeffs)},
                   {"e", d.e()},
                   {"residual_variance", d.residual_variance},
                   {"regression_coefficients", weights(d.regression_coeffs)},
                   {"regression_residual_variance", d.regression_residual_variance},
                   {"max_discrepancy", d.max_discrepancy()}});
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian tripartite bound-information laboratory", "gbi"};
  app.require_subcommand(1);
  Options o;

  auto add_r = [&](CLI::App* c) { c->add_option("--r", o.r, "Squeezing parameter r in (0, 5]"); };
  auto add_out = [&](CLI::App* c) { c->add_option("--out", o.out, "Write output to this file"); };

  auto* matrix = app.add_subcommand("matrix", "Print X(r), Gamma(r) or the reduced three-mode CM");
  add_r(matrix);
  matrix->add_option("--what", o.what, "X | gamma | reduced")
      ->check(CLI::IsMember({"X", "gamma", "reduced"}));
  matrix->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  add_out(matrix);

  auto* sweep_cmd = app.add_subcommand("sweep", "Information differences over an r grid");
  sweep_cmd->add_option("--r-min", o.r_min);
  sweep_cmd->add_option("--r-max", o.r_max);
  sweep_cmd->add_option("--steps", o.steps);
  sweep_cmd->add_option("--format", o.format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  add_out(sweep_cmd);

  auto* thresholds = app.add_subcommand("thresholds", "Locate the sign changes in r");
  thresholds->add_option("--tol", o.tol, "Bisection bracket width");
  thresholds->add_option("--format", o.format, "json")->check(CLI::IsMember({"json"}));
  add_out(thresholds);

  auto* verify = app.add_subcommand("verify", "Run the invariant suite");
  verify->add_option("--r-grid", o.r_grid, "start:stop:count");
  verify->add_option("--format", o.format, "text | json")->check(CLI::IsMember({"text", "json"}));
  verify->add_flag("--inject-fault", o.inject_fault)->group("");
  add_out(verify);

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo run of a protocol");
  simulate_cmd->add_option("--protocol", o.protocol, "b-ac | c-ab | full")
      ->check(CLI::IsMember({"b-ac", "c-ab", "full"}));
  add_r(simulate_cmd);
  simulate_cmd->add_option("--samples", o.samples);
  simulate_cmd->add_option("--seed", o.seed);
  simulate_cmd->add_option("--format", o.format, "json")->check(CLI::IsMember({"json"}));
  add_out(simulate_cmd);

  auto* ppt = app.add_subcommand("ppt", "PPT test of each bipartition of the three-mode state");
  add_r(ppt);
  ppt->add_flag("--vacuum", o.vacuum, "Test the three-mode vacuum instead");
  ppt->add_option("--format", o.format, "json")->check(CLI::IsMember({"json"}));
  add_out(ppt);

  auto* decompose = app.add_subcommand("decompose", "Decompose x_Ej over the protocol variables");
  add_r(decompose);
  decompose->add_option("--j", o.j)->check(CLI::IsMember({1, 2}));
  decompose->add_option("--format", o.format, "json")->check(CLI::IsMember({"json"}));
  add_out(decompose);

  std::vector<std::string> argv_store{"gbi"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "gbi: " << e.what() << "\n";
    return kBadArguments;
  }

  try {
    bool ok = true;
    std::string text;
    if (matrix->parsed()) {
      text = cmd_matrix(o);
    } else if (sweep_cmd->parsed()) {
      text = cmd_sweep(o);
    } else if (thresholds->parsed()) {
      text = cmd_thresholds(o);
    } else if (verify->parsed()) {
      text = cmd_verify(o, ok);
    } else if (simulate_cmd->parsed()) {
      text = cmd_simulate(o, ok);
    } else if (ppt->parsed()) {
      text = cmd_ppt(o);
    } else {
      text = cmd_decompose(o);
    }
    emit(text, o.out, out);
    if (!ok) {
      err << "gbi: check failed\n";
      return kCheckFailed;
    }
    return kOk;
  } catch (const NumericalError& e) {
    err << "gbi: numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const Error& e) {
    err << "gbi: " << e.what() << "\n";
    return kBadArguments;
  }
}

}  // namespace gbi::cli
