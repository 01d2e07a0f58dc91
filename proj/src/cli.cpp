#include "cpm/cli.hpp"

#include "cpm/asymptotics.hpp"
#include "cpm/auxdist.hpp"
#include "cpm/csv.hpp"
#include "cpm/error.hpp"
#include "cpm/graphsim.hpp"
#include "cpm/moments.hpp"
#include "cpm/rational.hpp"
#include "cpm/weights.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>

#ifndef CPM_VERSION
#define CPM_VERSION "0.0.0"
#endif

namespace cpm::cli {

using nlohmann::json;

namespace {

// Rows are kept as strings so CSV output is exactly what was formatted.
// Columns listed in `numeric` are emitted as JSON numbers; `json_extra`
// holds per-row fields that only appear in JSON output.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::set<std::string> numeric;
  std::vector<json> json_extra;
};

json table_to_json(const Table& t) {
  json rows = json::array();
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    json obj = json::object();
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      const std::string& cell = t.rows[r][c];
      if (t.numeric.count(t.header[c]) && !cell.empty()) {
        char* end = nullptr;
        const double v = std::strtod(cell.c_str(), &end);
        if (end && *end == '\0' && std::isfinite(v)) {
          obj[t.header[c]] = v;
          continue;
        }
      }
      obj[t.header[c]] = cell;
    }
    if (r < t.json_extra.size()) obj.update(t.json_extra[r]);
    rows.push_back(std::move(obj));
  }
  return json{{"columns", t.header}, {"rows", rows}};
}

std::string render(const Table& t, const std::string& format) {
  if (format == "json") return table_to_json(t).dump(2) + "\n";
  CsvTable csv{t.header, t.rows};
  return format_csv(csv);
}

struct Common {
  std::string format = "csv";
  std::string out;
};

void add_common(CLI::App* sub, Common& common) {
  sub->add_option("--format", common.format, "Table format")->check(CLI::IsMember({"csv", "json"}));
  sub->add_option("--out", common.out, "Write the table to this file instead of stdout");
}

void emit(const Table& t, const Common& common, std::ostream& out) {
  const std::string body = render(t, common.format);
  if (common.out.empty()) {
    out << body;
  } else {
    write_file_atomic(common.out, body);
  }
}

Rational parse_x(const std::string& text, const char* flag) {
  try {
    return parse_rational(text);
  } catch (const UsageError& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::string fmt(double v) { return format_double(v, 17); }

std::string log_cell(const Rational& q) {
  if (q <= 0) return "";
  return fmt(log_abs(q));
}

// ---- subcommand state -------------------------------------------------------

struct MomentsArgs {
  Common common;
  std::string weights;
  unsigned k = 0;
  std::string x;
  bool exact = false;
  bool log = false;
  std::optional<std::uint64_t> finite_n;
};

struct RateArgs {
  Common common;
  std::string weights;
  double chi = 0;
};

struct CompareArgs {
  Common common;
  std::string weights;
  double chi = 0;
  unsigned k_max = 0;
  bool serial = false;
};

struct AuxArgs {
  Common common;
  std::string weights;
  double x = 0;
  double u = 0;
  std::optional<double> llt_chi;
  std::optional<unsigned> k;
  double mass_tol = 1e-12;
};

struct GraphArgs {
  Common common;
  std::uint64_t n = 0;
  double kappa = 0;
  std::string weights = "exponential";
  std::vector<double> s;
  bool s_relative = false;
  std::uint64_t trials = 1;
  std::optional<std::uint64_t> seed;
  std::string convention = "moment_order";
  bool serial = false;
};

struct BellArgs {
  Common common;
  unsigned k = 0;
  std::string x = "1";
};

struct IdentitiesArgs {
  Common common;
};

// ---- handlers ---------------------------------------------------------------

struct Outcome {
  Table table;
  json config;
  std::optional<json> summary;
  int status = kExitOk;
};

Outcome do_moments(const MomentsArgs& a) {
  if (a.exact && a.log) throw UsageError("--exact and --log are mutually exclusive");
  if (a.log && a.finite_n) throw UsageError("--finite-n is exact only");
  const WeightModel model = parse_weight_model(a.weights);
  const Rational x = parse_x(a.x, "--x");
  const bool log_mode = a.log;
  Outcome o;
  o.config = {{"weights", model.name()}, {"k", a.k}, {"x", to_ratio_string(x)},
              {"mode", log_mode ? "log" : "exact"}};
  o.config["finite_n"] = a.finite_n ? json(*a.finite_n) : json(nullptr);
  Table& t = o.table;
  t.header = {"k", "x", "method", "value", "log_value"};
  t.numeric = {"k", "x", "log_value"};
  if (log_mode) {
    const double xd = to_double(x);
    const std::vector<double> logs = log_moment_sequence(model, a.k, xd);
    for (unsigned k = 0; k <= a.k; ++k) {
      t.rows.push_back({std::to_string(k), fmt(xd), "recurrence_log", fmt(std::exp(logs[k])), fmt(logs[k])});
    }
    return o;
  }
  std::vector<Rational> values;
  std::string method;
  if (a.finite_n) {
    method = to_string(MomentMethod::finite_n);
    for (unsigned k = 0; k <= a.k; ++k) {
      values.push_back(*finite_n_moment(model, k, *a.finite_n, x).value_exact);
    }
  } else {
    method = to_string(MomentMethod::recurrence);
    values = moment_sequence(model, a.k, x);
  }
  const std::string x_text = to_decimal(x, 30);
  for (unsigned k = 0; k <= a.k; ++k) {
    t.rows.push_back({std::to_string(k), x_text, method, to_decimal(values[k], 30), log_cell(values[k])});
    t.json_extra.push_back({{"ratio", to_ratio_string(values[k])}});
  }
  return o;
}

Outcome do_rate(const RateArgs& a) {
  const WeightModel model = parse_weight_model(a.weights);
  const RateValue r = rate_function(model, a.chi);
  Outcome o;
  o.config = {{"weights", model.name()}, {"chi", a.chi}};
  o.table.header = {"chi", "u", "psi", "prefactor", "residual"};
  o.table.numeric = {"chi", "u", "psi", "prefactor", "residual"};
  o.table.rows.push_back({fmt(r.chi), fmt(r.saddle.u), fmt(r.psi), fmt(r.prefactor), fmt(r.saddle.residual)});
  return o;
}

Outcome do_compare(const CompareArgs& a) {
  const WeightModel model = parse_weight_model(a.weights);
  const auto rows = a.serial ? compare_sweep_serial(model, a.chi, a.k_max) : compare_sweep(model, a.chi, a.k_max);
  Outcome o;
  o.config = {{"weights", model.name()}, {"chi", a.chi}, {"k_max", a.k_max}, {"serial", a.serial}};
  o.table.header = {"k", "log_exact", "log_predicted_eq1_10", "rate_gap"};
  o.table.numeric = {"k", "log_exact", "log_predicted_eq1_10", "rate_gap"};
  for (const CompareRow& r : rows) {
    o.table.rows.push_back({std::to_string(r.k), fmt(r.log_exact), fmt(r.log_predicted), fmt(r.rate_gap)});
  }
  return o;
}

Outcome do_aux(const AuxArgs& a) {
  if (a.llt_chi && !a.k) throw UsageError("--llt-chi needs --k");
  const WeightModel model = parse_weight_model(a.weights);
  const AuxiliaryDistribution aux = build_aux(model, a.x, a.u, a.mass_tol);
  Outcome o;
  o.config = {{"weights", model.name()}, {"x", a.x}, {"u", a.u}, {"mass_tol", a.mass_tol}};
  o.config["llt_chi"] = a.llt_chi ? json(*a.llt_chi) : json(nullptr);
  o.config["k"] = a.k ? json(*a.k) : json(nullptr);
  o.table.header = {"j", "p_j"};
  o.table.numeric = {"j", "p_j"};
  for (std::size_t j = 0; j < aux.pmf.size(); ++j) o.table.rows.push_back({std::to_string(j), fmt(aux.pmf[j])});
  json summary = {{"mean", aux.mean},
                  {"variance", aux.variance},
                  {"retained_mass", aux.retained_mass()},
                  {"support_cap", aux.support_cap},
                  {"span", aux.span}};
  summary["r_k"] = nullptr;
  if (a.llt_chi) {
    const LocalLimitResult llt = local_limit_check(model, *a.llt_chi, *a.k);
    summary["r_k"] = llt.ratio;
    summary["llt"] = {{"k", llt.k}, {"chi", llt.chi}, {"x", llt.x}, {"u", llt.u}, {"sigma", llt.sigma}, {"p_k", llt.p_k}};
  } else if (a.k) {
    const double p_k = *a.k < aux.pmf.size() ? aux.pmf[*a.k] : 0.0;
    summary["r_k"] = p_k * std::sqrt(2 * std::numbers::pi) * aux.sigma / aux.span;
  }
  o.summary = json{{"summary", summary}};
  return o;
}

Outcome do_graphsim(const GraphArgs& a) {
  if (a.s.empty()) throw UsageError("--s needs at least one value");
  std::uint64_t seed = 0;
  std::string seed_source = "default";
  if (a.seed) {
    seed = *a.seed;
    seed_source = "flag";
  } else if (const char* env = std::getenv("CPM_SEED"); env && *env) {
    try {
      std::size_t used = 0;
      seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw UsageError(std::string("CPM_SEED is not an unsigned integer: ") + env);
    }
    seed_source = "CPM_SEED";
  }
  const ThresholdConvention convention =
      a.convention == "printed" ? ThresholdConvention::printed : ThresholdConvention::moment_order;
  GraphSimConfig cfg = GraphSimConfig::with_kappa(a.n, a.kappa, parse_weight_model(a.weights), {}, a.trials, seed);
  cfg.convention = convention;
  const double threshold = theorem41_threshold(cfg.weights, a.kappa, convention);
  for (double s : a.s) cfg.s.push_back(a.s_relative ? s * threshold : s);

  const GraphTrialResult res = deviation_experiment(cfg, !a.serial);
  Outcome o;
  o.config = {{"n", a.n},           {"kappa", a.kappa},         {"rho", cfg.rho},
              {"weights", cfg.weights.name()}, {"s", cfg.s},     {"s_relative", a.s_relative},
              {"trials", a.trials}, {"seed", seed},             {"seed_source", seed_source},
              {"convention", a.convention}, {"serial", a.serial}};
  o.table.header = {"n", "kappa", "s", "p_hat", "ci", "bound", "threshold", "vacuous_flag"};
  o.table.numeric = {"n", "kappa", "s", "p_hat", "ci", "bound", "threshold", "vacuous_flag"};
  for (const DeviationRow& r : res.rows) {
    o.table.rows.push_back({std::to_string(a.n), fmt(a.kappa), fmt(r.s), fmt(r.p_hat), fmt(r.ci_half_width),
                            fmt(r.bound), fmt(res.threshold_s), r.vacuous ? "1" : "0"});
  }
  return o;
}

Outcome do_bell(const BellArgs& a) {
  const Rational x = parse_x(a.x, "--x");
  const MomentValue v = bell_polynomial(a.k, x);
  Outcome o;
  o.config = {{"k", a.k}, {"x", to_ratio_string(x)}};
  o.table.header = {"k", "x", "value", "decimal", "log_value"};
  o.table.numeric = {"k", "log_value"};
  o.table.rows.push_back({std::to_string(a.k), to_ratio_string(x), to_ratio_string(*v.value_exact),
                          to_decimal(*v.value_exact, 30), log_cell(*v.value_exact)});
  return o;
}

Outcome do_identities() {
  Outcome o;
  o.config = json::object();
  o.table.header = {"identity", "cases", "failures", "status"};
  o.table.numeric = {"cases", "failures"};
  for (const IdentityCheck& c : identity_report()) {
    o.table.rows.push_back(
        {c.name, std::to_string(c.cases), std::to_string(c.failures), c.failures == 0 ? "pass" : "fail"});
    if (c.failures != 0) o.status = kExitDomain;
  }
  return o;
}

const char* type_name(const json& j) {
  switch (j.type()) {
    case json::value_t::object:
      return "object";
    case json::value_t::array:
      return "array";
    case json::value_t::string:
      return "string";
    case json::value_t::boolean:
      return "boolean";
    case json::value_t::null:
      return "null";
    case json::value_t::number_integer:
    case json::value_t::number_unsigned:
      return "integer";
    default:
      return "number";
  }
}

bool type_matches(const json& doc, const std::string& type) {
  const std::string actual = type_name(doc);
  if (actual == type) return true;
  return type == "number" && actual == "integer";
}

}  // namespace

const json& header_schema() {
  static const json schema = json::parse(R"({
    "type": "object",
    "required": ["tool", "version", "subcommand", "format", "out", "config"],
    "properties": {
      "tool": {"type": "string", "enum": ["cpm"]},
      "version": {"type": "string"},
      "subcommand": {"type": "string",
                     "enum": ["moments", "rate", "compare", "aux", "graphsim", "bell", "identities"]},
      "format": {"type": "string", "enum": ["csv", "json"]},
      "out": {"type": ["string", "null"]},
      "config": {"type": "object"}
    }
  })");
  return schema;
}

bool validate(const json& doc, const json& schema, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_array()) {
      for (const auto& t : *it) ok = ok || type_matches(doc, t.get<std::string>());
    } else {
      ok = type_matches(doc, it->get<std::string>());
    }
    if (!ok) return fail(std::string("expected type ") + it->dump() + ", got " + type_name(doc));
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    if (std::find(it->begin(), it->end(), doc) == it->end()) return fail("value " + doc.dump() + " not in enum");
  }
  if (!doc.is_object()) return true;
  if (auto it = schema.find("required"); it != schema.end()) {
    for (const auto& key : *it) {
      if (!doc.contains(key.get<std::string>())) return fail("missing key '" + key.get<std::string>() + "'");
    }
  }
  if (auto it = schema.find("properties"); it != schema.end()) {
    for (const auto& [key, sub] : it->items()) {
      if (!doc.contains(key)) continue;
      std::string inner;
      if (!validate(doc.at(key), sub, &inner)) return fail(key + ": " + inner);
    }
  }
  return true;
}

std::vector<IdentityCheck> identity_report() {
  std::vector<IdentityCheck> out;

  IdentityCheck comp{"composition_count"};
  for (unsigned p = 1; p <= 8; ++p) {
    for (unsigned k = p; k <= 12; ++k) {
      ++comp.cases;
      if (composition_profile_sum(k, p) != binomial(k - 1, p - 1)) ++comp.failures;
    }
  }
  out.push_back(comp);

  const std::vector<Rational> xs{Rational(1), Rational(3), Rational(7, 2)};
  IdentityCheck expo{"exponential_weights"};
  IdentityCheck fact{"factorial_weights"};
  const WeightModel e = WeightModel::exponential();
  const WeightModel lf = WeightModel::log_factorial();
  for (const Rational& x : xs) {
    const auto me = moment_sequence(e, 12, x);
    const auto mf = moment_sequence(lf, 12, x);
    for (unsigned k = 1; k <= 12; ++k) {
      const Rational kf(factorial(k));
      ++expo.cases;
      if (kf * exp_identity_S(k, x) != me[k]) ++expo.failures;
      ++fact.cases;
      if (kf * factorial_identity_T(k, x) != mf[k]) ++fact.failures;
    }
  }
  out.push_back(expo);
  out.push_back(fact);

  IdentityCheck even{"even_partition_recurrence"};
  const unsigned expected[] = {1, 1, 4, 25, 262, 3991};
  for (unsigned i = 0; i < 6; ++i) {
    ++even.cases;
    if (even_partition_number(2 * i) != expected[i]) ++even.failures;
  }
  out.push_back(even);
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Compound Poisson moments, saddle asymptotics and degree simulations", "cpm"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", CPM_VERSION);

  MomentsArgs ma;
  RateArgs ra;
  CompareArgs ca;
  AuxArgs xa;
  GraphArgs ga;
  BellArgs ba;
  IdentitiesArgs ia;
  std::optional<unsigned> aux_k;
  std::optional<double> aux_llt;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::uint64_t> finite_n;

  auto* moments = app.add_subcommand("moments", "Exact or log-space moments M_0..M_k");
  moments->add_option("--weights", ma.weights, "Weight model")->required();
  moments->add_option("--k", ma.k, "Largest order")->required();
  moments->add_option("--x", ma.x, "Intensity (decimal or p/q)")->required();
  moments->add_flag("--exact", ma.exact, "Exact rational arithmetic (default)");
  moments->add_flag("--log", ma.log, "Log-space floating point recurrence");
  moments->add_option("--finite-n", finite_n, "Finite-n binomial model with edge probability x/n");
  add_common(moments, ma.common);

  auto* rate = app.add_subcommand("rate", "Saddle point and rate function at chi = x/k");
  rate->add_option("--weights", ra.weights)->required();
  rate->add_option("--chi", ra.chi)->required();
  add_common(rate, ra.common);

  auto* compare = app.add_subcommand("compare", "Exact vs refined asymptotic over k = 1..k_max");
  compare->add_option("--weights", ca.weights)->required();
  compare->add_option("--chi", ca.chi)->required();
  compare->add_option("--k-max", ca.k_max)->required()->check(CLI::PositiveNumber);
  compare->add_flag("--serial", ca.serial, "Use the serial reference kernel");
  add_common(compare, ca.common);

  auto* aux = app.add_subcommand("aux", "Auxiliary tilted distribution and local limit ratio");
  aux->add_option("--weights", xa.weights)->required();
  aux->add_option("--x", xa.x)->required();
  aux->add_option("--u", xa.u)->required();
  aux->add_option("--llt-chi", aux_llt, "Run the local limit check at this chi");
  aux->add_option("--k", aux_k, "Order for r_k");
  aux->add_option("--mass-tol", xa.mass_tol, "Neglected tail mass")->check(CLI::PositiveNumber);
  add_common(aux, xa.common);

  auto* graph = app.add_subcommand("graphsim", "Monte Carlo maximum weighted degree");
  graph->add_option("--n", ga.n)->required();
  graph->add_option("--kappa", ga.kappa)->required();
  graph->add_option("--weights", ga.weights);
  graph->add_option("--s", ga.s, "Deviation levels")->required()->delimiter(',');
  graph->add_flag("--s-relative", ga.s_relative, "Read --s as multiples of the threshold");
  graph->add_option("--trials", ga.trials)->required();
  graph->add_option("--seed", seed_flag, "RNG seed (falls back to CPM_SEED, then 0)");
  graph->add_option("--convention", ga.convention)->check(CLI::IsMember({"moment_order", "printed"}));
  graph->add_flag("--serial", ga.serial, "Use the serial reference kernel");
  add_common(graph, ga.common);

  auto* bell = app.add_subcommand("bell", "Bell polynomial B_k(x); Bell number for x = 1");
  bell->add_option("--k", ba.k)->required();
  bell->add_option("--x", ba.x);
  add_common(bell, ba.common);

  auto* identities = app.add_subcommand("identities", "Exact identity suites");
  add_common(identities, ia.common);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  std::string name;
  const Common* common = nullptr;
  std::function<Outcome()> handler;
  if (moments->parsed()) {
    name = "moments";
    ma.finite_n = finite_n;
    common = &ma.common;
    handler = [&] { return do_moments(ma); };
  } else if (rate->parsed()) {
    name = "rate";
    common = &ra.common;
    handler = [&] { return do_rate(ra); };
  } else if (compare->parsed()) {
    name = "compare";
    common = &ca.common;
    handler = [&] { return do_compare(ca); };
  } else if (aux->parsed()) {
    name = "aux";
    xa.k = aux_k;
    xa.llt_chi = aux_llt;
    common = &xa.common;
    handler = [&] { return do_aux(xa); };
  } else if (graph->parsed()) {
    name = "graphsim";
    ga.seed = seed_flag;
    common = &ga.common;
    handler = [&] { return do_graphsim(ga); };
  } else if (bell->parsed()) {
    name = "bell";
    common = &ba.common;
    handler = [&] { return do_bell(ba); };
  } else {
    name = "identities";
    common = &ia.common;
    handler = [] { return do_identities(); };
  }

  try {
    Outcome o = handler();
    json header = {{"tool", "cpm"},
                   {"version", CPM_VERSION},
                   {"subcommand", name},
                   {"format", common->format},
                   {"out", common->out.empty() ? json(nullptr) : json(common->out)},
                   {"config", o.config}};
    std::string why;
    if (!validate(header, header_schema(), &why)) {
      err << "cpm " << name << ": internal error: run header invalid: " << why << "\n";
      return kExitDomain;
    }
    out << header.dump() << "\n";
    if (o.summary) out << o.summary->dump() << "\n";
    emit(o.table, *common, out);
    return o.status;
  } catch (const UsageError& e) {
    err << "cpm " << name << ": " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "cpm " << name << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const DomainError& e) {
    err << "cpm " << name << ": " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    err << "cpm " << name << ": " << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace cpm::cli
