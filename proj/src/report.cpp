#include "mclab/report.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

#include "mclab/diagnostics.hpp"
#include "mclab/simulate.hpp"
#include "mclab/variance.hpp"

namespace mclab {

const char* kToolName = "mclab";
const char* kToolVersion = "0.1.0";

using nlohmann::ordered_json;

std::string fingerprint_hex(const std::string& content) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : content) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[i] = hex[(h >> (60 - 4 * i)) & 0xF];
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

/// JSON has no infinities; exponents from exhausted tails are clamped and a
/// failed fit becomes null.
ordered_json exponent_json(double e) {
  if (std::isnan(e)) return nullptr;
  if (std::isinf(e)) return e < 0 ? -999.0 : 999.0;
  return e;
}

ordered_json condition_rows_json(const std::vector<ConditionRow>& rows) {
  ordered_json arr = ordered_json::array();
  for (const ConditionRow& row : rows) {
    ordered_json j;
    j["id"] = row.id;
    j["n_terms"] = row.n_terms;
    j["partial_sum"] = row.partial_sum;
    j["tail_exponent"] = exponent_json(row.tail_exponent);
    j["verdict"] = to_string(row.verdict);
    if (row.finite_rank_member.has_value()) j["finite_rank_member"] = *row.finite_rank_member;
    if (row.finite_rank_residual.has_value()) j["finite_rank_residual"] = *row.finite_rank_residual;
    arr.push_back(j);
  }
  return arr;
}

ordered_json curve_json(const std::vector<int>& ns, const std::vector<double>& vals) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < ns.size(); ++i) {
    arr.push_back(ordered_json::array({ns[i], vals[i]}));
  }
  return arr;
}

ordered_json tolerances_json(const Tolerances& tol) {
  ordered_json j;
  j["stochastic"] = tol.stochastic;
  j["fixed_point"] = tol.fixed_point;
  j["mean"] = tol.mean;
  j["normal"] = tol.normal;
  j["duality"] = tol.duality;
  j["degenerate_variance"] = tol.degenerate_variance;
  j["classifier_margin"] = tol.classifier_margin;
  return j;
}

ordered_json clt_json(const CltTestResult& r, int n_steps, int n_paths) {
  ordered_json j;
  j["kind"] = r.kind == StatisticKind::Raw ? "raw" : "centered";
  j["target_variance"] = r.target_variance;
  j["ks_distance"] = r.ks_distance;
  j["sample_mean"] = r.sample_mean;
  j["sample_var"] = r.sample_var;
  j["max_abs"] = r.max_abs;
  j["degenerate"] = r.degenerate;
  j["n_steps"] = n_steps;
  j["n_paths"] = n_paths;
  return j;
}

}  // namespace

nlohmann::ordered_json analyze_report(const ChainModel& chain, const AnalyzeOptions& opts,
                                      const std::string& fingerprint) {
  const auto t0 = Clock::now();
  const int s = chain.size();
  if (s > opts.max_states) {
    throw ResourceCap("chain has " + std::to_string(s) + " states, cap is " +
                      std::to_string(opts.max_states));
  }
  if (opts.horizon > opts.max_horizon) {
    throw ResourceCap("horizon " + std::to_string(opts.horizon) + " exceeds cap " +
                      std::to_string(opts.max_horizon));
  }
  if (opts.horizon < 64) throw Error("analysis horizon must be at least 64");

  const bool small_state_space = s <= opts.max_states_full_bridge;
  DiagnosticsOptions diag;
  diag.horizon = opts.horizon;
  diag.bridge_horizon = std::min(opts.bridge_horizon, opts.horizon);
  diag.mix_bridge_horizon = std::min(opts.mix_bridge_horizon, opts.horizon);
  if (!small_state_space) {
    diag.bridge_horizon = std::min(diag.bridge_horizon, 64);
    diag.mix_bridge_horizon = std::min(diag.mix_bridge_horizon, 64);
  }

  ordered_json report;
  report["tool"] = kToolName;
  report["version"] = kToolVersion;
  report["kind"] = "analyze";
  report["fingerprint"] = fingerprint;
  report["seed"] = opts.seed;

  ordered_json options;
  options["horizon"] = opts.horizon;
  options["bridge_horizon"] = diag.bridge_horizon;
  options["mix_bridge_horizon"] = diag.mix_bridge_horizon;
  options["n_paths"] = opts.n_paths;
  options["clt_steps"] = opts.clt_steps;
  options["eta_grid"] = opts.eta_grid;
  options["tolerances"] = tolerances_json(chain.tol);
  report["options"] = options;

  ordered_json chain_j;
  chain_j["states"] = chain.states;
  chain_j["size"] = s;
  chain_j["recentered"] = std::abs(chain.recenter_shift) > chain.tol.mean;
  chain_j["recenter_shift"] = chain.recenter_shift;
  report["chain"] = chain_j;

  const ChainClassification cls = classify(chain);
  ordered_json cls_j;
  cls_j["irreducible"] = cls.irreducible;
  cls_j["aperiodic"] = cls.aperiodic;
  cls_j["ergodic"] = cls.ergodic;
  cls_j["totally_ergodic"] = cls.totally_ergodic;
  cls_j["reversible"] = cls.reversible;
  cls_j["normal"] = cls.normal;
  cls_j["normality_defect"] = cls.normality_defect;
  cls_j["period"] = cls.period;
  report["classification"] = cls_j;

  const OperatorTable table = build_table(chain, opts.horizon);
  report["conditions"] = condition_rows_json(condition_report(chain, table, diag));

  ordered_json impl = ordered_json::array();
  for (const ImplicationRow& row :
       check_implications(chain, table, opts.horizon, diag.bridge_horizon)) {
    ordered_json j;
    j["name"] = row.name;
    j["lhs"] = row.lhs;
    j["rhs"] = row.rhs;
    j["pass"] = row.pass;
    impl.push_back(j);
  }
  report["implications"] = impl;

  ordered_json var_j;
  bool have_sigma2 = false;
  double sigma2 = 0.0;
  try {
    sigma2 = sigma2_closed_form(chain);
    have_sigma2 = true;
    var_j["sigma2_closed"] = sigma2;
  } catch (const SingularSystem& e) {
    var_j["sigma2_closed"] = nullptr;
    var_j["closed_form_error"] = e.what();
  }

  // Largest r with 2^r <= horizon, capped at 12.
  int r_max = 0;
  while (r_max < 12 && (1L << (r_max + 1)) <= opts.horizon) ++r_max;
  const DyadicRecursion rec = dyadic_recursion(chain, table, r_max);
  var_j["sigma2_dyadic"] = rec.sigma2_dyadic;
  var_j["delta_curve"] = rec.delta_curve;
  var_j["dyadic_bound_holds"] = rec.bound_holds;
  {
    std::vector<int> ns;
    std::vector<double> vs;
    for (int r = 0; r <= r_max; ++r) {
      ns.push_back(1 << r);
      vs.push_back(exact_variance(chain, table, 1 << r));
    }
    var_j["var_seq"] = curve_json(ns, vs);
  }

  std::vector<int> grid;
  for (const int n : opts.eta_grid) {
    if (n >= 1 && n <= opts.horizon) grid.push_back(n);
  }
  if (small_state_space && grid.size() >= 3) {
    const EtaTheta et = eta2_theta2(chain, table, grid);
    var_j["eta2"] = et.eta2.has_value() ? ordered_json(*et.eta2) : ordered_json(nullptr);
    var_j["theta2"] = et.theta2.has_value() ? ordered_json(*et.theta2) : ordered_json(nullptr);
    var_j["eta2_spread"] = et.eta2_spread;
    var_j["theta2_spread"] = et.theta2_spread;
    var_j["eta_theta_refused"] = et.refused;
    var_j["eta2_curve"] = curve_json(et.grid, et.eta2_curve);
    var_j["theta2_curve"] = curve_json(et.grid, et.theta2_curve);
    report["variance"] = var_j;

    ordered_json clt = ordered_json::array();
    if (cls.totally_ergodic && s <= opts.max_states_simulation && have_sigma2) {
      const TrajectoryBatch batch = simulate(chain, opts.clt_steps, opts.n_paths, opts.seed);
      clt.push_back(clt_json(clt_test(batch, StatisticKind::Raw, sigma2), opts.clt_steps,
                             opts.n_paths));
      if (et.theta2.has_value()) {
        clt.push_back(clt_json(clt_test(batch, StatisticKind::Centered, *et.theta2),
                               opts.clt_steps, opts.n_paths));
      }
      const BridgeDeviation dev = empirical_bridge_check(chain, batch);
      ordered_json dev_j;
      dev_j["max_std_dev"] = dev.max_std_dev;
      dev_j["n_groups"] = dev.n_groups;
      dev_j["n_skipped"] = dev.n_skipped;
      report["bridge_check"] = dev_j;
    }
    report["clt"] = clt;
  } else {
    var_j["eta2"] = nullptr;
    var_j["theta2"] = nullptr;
    var_j["eta_theta_refused"] = true;
    report["variance"] = var_j;
    report["clt"] = ordered_json::array();
  }

  report["timings"] = ordered_json{{"total_ms", ms_since(t0)}};
  return report;
}

nlohmann::ordered_json lemmas_report(const LemmaCampaignOptions& opts) {
  const auto t0 = Clock::now();
  ordered_json report;
  report["tool"] = kToolName;
  report["version"] = kToolVersion;
  report["kind"] = "lemmas";
  report["seed"] = opts.seed;
  ordered_json options;
  options["cases_dyadic"] = opts.cases_dyadic;
  options["cases_prefix"] = opts.cases_prefix;
  options["cases_subadd"] = opts.cases_subadd;
  options["m_dyadic"] = opts.m_dyadic;
  options["m_prefix"] = opts.m_prefix;
  options["m_subadd"] = opts.m_subadd;
  report["options"] = options;

  ordered_json campaigns = ordered_json::array();
  if (opts.cases_dyadic > 0 || opts.cases_prefix > 0 || opts.cases_subadd > 0) {
    for (const CampaignSummary& cs : run_lemma_campaigns(opts)) {
      ordered_json j;
      j["lemma_id"] = cs.lemma_id;
      j["n_cases"] = cs.n_cases;
      j["n_pass"] = cs.n_pass;
      j["worst_ratio"] = cs.worst_ratio;
      j["worst_seed"] = cs.worst_seed;
      campaigns.push_back(j);
    }
  }
  report["campaigns"] = campaigns;
  report["timings"] = ordered_json{{"total_ms", ms_since(t0)}};
  return report;
}

nlohmann::ordered_json strip_timings(nlohmann::ordered_json report) {
  report.erase("timings");
  return report;
}

namespace {

void flat_csv_walk(const ordered_json& node, const std::string& path, std::ostringstream& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flat_csv_walk(value, path.empty() ? key : path + "." + key, out);
    }
  } else if (node.is_array()) {
    int i = 0;
    for (const auto& value : node) {
      flat_csv_walk(value, path + "." + std::to_string(i++), out);
    }
  } else if (node.is_string()) {
    std::string escaped = node.get<std::string>();
    std::string quoted = "\"";
    for (const char c : escaped) {
      quoted += c;
      if (c == '"') quoted += '"';
    }
    quoted += "\"";
    out << path << "," << quoted << "\n";
  } else {
    out << path << "," << node.dump() << "\n";
  }
}

bool type_matches(const nlohmann::json& doc, const std::string& type) {
  if (type == "object") return doc.is_object();
  if (type == "array") return doc.is_array();
  if (type == "string") return doc.is_string();
  if (type == "number") return doc.is_number();
  if (type == "integer") return doc.is_number_integer() || doc.is_number_unsigned();
  if (type == "boolean") return doc.is_boolean();
  if (type == "null") return doc.is_null();
  return false;
}

bool validate_node(const nlohmann::json& doc, const nlohmann::json& schema,
                   const std::string& path, std::string* why) {
  const auto fail = [&](const std::string& msg) {
    if (why) *why = (path.empty() ? "$" : path) + ": " + msg;
    return false;
  };
  if (schema.contains("type")) {
    const auto& t = schema["type"];
    bool ok = false;
    if (t.is_string()) {
      ok = type_matches(doc, t.get<std::string>());
    } else if (t.is_array()) {
      for (const auto& item : t) ok = ok || type_matches(doc, item.get<std::string>());
    }
    if (!ok) return fail("type mismatch (expected " + t.dump() + ")");
  }
  if (schema.contains("enum")) {
    bool ok = false;
    for (const auto& item : schema["enum"]) ok = ok || doc == item;
    if (!ok) return fail("value not in enum " + schema["enum"].dump());
  }
  if (doc.is_object()) {
    if (schema.contains("required")) {
      for (const auto& key : schema["required"]) {
        if (!doc.contains(key.get<std::string>())) {
          return fail("missing required key '" + key.get<std::string>() + "'");
        }
      }
    }
    if (schema.contains("properties")) {
      for (const auto& [key, sub] : schema["properties"].items()) {
        if (!doc.contains(key)) continue;
        if (!validate_node(doc.at(key), sub, path + "." + key, why)) return false;
      }
    }
    if (schema.contains("additionalProperties") && schema["additionalProperties"].is_boolean() &&
        !schema["additionalProperties"].get<bool>()) {
      for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (!schema.contains("properties") || !schema["properties"].contains(key)) {
          return fail("unexpected key '" + key + "'");
        }
      }
    }
  }
  if (doc.is_array() && schema.contains("items")) {
    int i = 0;
    for (const auto& item : doc) {
      if (!validate_node(item, schema["items"], path + "." + std::to_string(i++), why)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

std::string flat_csv(const nlohmann::ordered_json& doc) {
  std::ostringstream out;
  out << "path,value\n";
  flat_csv_walk(doc, "", out);
  return out.str();
}

bool validate_schema(const nlohmann::json& doc, const nlohmann::json& schema, std::string* why) {
  return validate_node(doc, schema, "", why);
}

}  // namespace mclab
