#include "circle/instance.hh"

#include <json.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "circle/arcs.hh"
#include "circle/errors.hh"
#include "circle/expsum.hh"
#include "circle/lattice.hh"
#include "circle/local.hh"
#include "circle/util.hh"

namespace circle {

namespace {

using nlohmann::json;

void check_keys(const json &j, std::initializer_list<const char *> allowed,
                const char *where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char *key : allowed)
      if (it.key() == key) {
        ok = true;
        break;
      }
    if (!ok)
      throw ParseError(std::string("unknown ") + where + " key: " + it.key(), 0);
  }
}

json quad_to_json(const QuadratureSpec &q) {
  return json{
      {"max_evals", q.max_evals},
      {"method", q.method == QuadMethod::tensor_gauss ? "tensor_gauss" : "low_discrepancy_mc"},
      {"points_per_axis", q.points_per_axis},
      {"sample_count", q.sample_count},
      {"seed", q.seed},
      {"tolerance", q.tolerance},
      {"workers", q.workers},
  };
}

QuadratureSpec quad_from_json(const json &j) {
  check_keys(j, {"max_evals", "method", "points_per_axis", "sample_count", "seed",
                 "tolerance", "workers"},
             "quadrature");
  QuadratureSpec q;
  if (j.contains("max_evals")) q.max_evals = j["max_evals"].get<std::uint64_t>();
  if (j.contains("method")) {
    std::string m = j["method"].get<std::string>();
    if (m == "tensor_gauss")
      q.method = QuadMethod::tensor_gauss;
    else if (m == "low_discrepancy_mc")
      q.method = QuadMethod::low_discrepancy_mc;
    else
      throw ParseError("unknown quadrature method: " + m, 0);
  }
  if (j.contains("points_per_axis")) q.points_per_axis = j["points_per_axis"].get<int>();
  if (j.contains("sample_count")) q.sample_count = j["sample_count"].get<std::uint64_t>();
  if (j.contains("seed")) q.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("tolerance")) q.tolerance = j["tolerance"].get<double>();
  if (j.contains("workers")) q.workers = j["workers"].get<int>();
  return q;
}

ZZ zz_from_json(const json &v, const char *what) {
  try {
    if (v.is_string()) return ZZ(v.get<std::string>());
    if (v.is_number_integer()) return ZZ(static_cast<long>(v.get<std::int64_t>()));
  } catch (const std::invalid_argument &) {
  }
  throw ParseError(std::string("expected an integer for ") + what, 0);
}

std::string qq_str(const QQ &x) { return x.get_str(); }

json rational_json(const QQ &x) { return json(qq_str(x)); }

// quadrature spec with the run-level seed / workers / budget mirrored in
QuadratureSpec effective_quad(const InstanceConfig &cfg) {
  QuadratureSpec q = cfg.quad;
  q.seed = cfg.seed;
  q.workers = cfg.workers;
  q.max_evals = cfg.max_evals;
  return q;
}

json hypothesis_json(const HypothesisReport &rep) {
  json rows = json::array();
  for (const HypothesisRow &row : rep.rows) {
    rows.push_back(json{
        {"boundary", row.boundary},
        {"group", row.verdict_group},
        {"label", row.label},
        {"lhs", rational_json(row.lhs)},
        {"relation", row.relation},
        {"rhs", rational_json(row.rhs)},
        {"satisfied", row.satisfied},
    });
  }
  return json{
      {"d", rep.d},
      {"dim_sing", rep.dim_sing},
      {"eta_star", rational_json(rep.eta_star)},
      {"excluded_case", rep.excluded_case},
      {"k", rational_json(rep.k)},
      {"l", rational_json(rep.l)},
      {"m", rep.m},
      {"r", rep.r},
      {"rows", rows},
      {"s", rep.s},
      {"theta_star", rational_json(rep.theta_star)},
      {"verdict", rep.verdict},
      {"verdict_large_degree", rep.verdict_large_degree},
      {"verdict_small_degree", rep.verdict_small_degree},
  };
}

void flatten(const json &j, const std::string &prefix, std::ostream &os) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it)
      flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), os);
  } else if (j.is_array()) {
    size_t i = 0;
    for (const json &v : j) flatten(v, prefix + "." + std::to_string(i++), os);
  } else if (j.is_string()) {
    os << prefix << ";" << j.get<std::string>() << "\n";
  } else {
    os << prefix << ";" << j.dump() << "\n";
  }
}

}  // namespace

InstanceConfig config_from_json(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what(),
                     static_cast<size_t>(e.byte));
  }
  if (!j.is_object()) throw ParseError("config must be a JSON object", 0);
  // "points" is carried for the sums subcommand and ignored here
  check_keys(j,
             {"P", "R", "b", "depth", "dim_sing", "eta", "form", "k", "l", "m",
              "max_evals", "points", "prime", "qmax", "quad", "s", "seed", "theta",
              "workers"},
             "config");
  InstanceConfig cfg;
  if (j.contains("form")) cfg.form_text = j["form"].get<std::string>();
  if (j.contains("s")) cfg.s = j["s"].get<int>();
  if (j.contains("m")) cfg.m = j["m"].get<int>();
  if (j.contains("b")) cfg.b = zz_from_json(j["b"], "b");
  if (j.contains("P")) cfg.P = j["P"].get<long>();
  if (j.contains("qmax")) cfg.qmax = j["qmax"].get<long>();
  if (j.contains("R")) cfg.R = j["R"].get<double>();
  if (j.contains("prime")) cfg.prime = j["prime"].get<long>();
  if (j.contains("depth")) cfg.depth = j["depth"].get<int>();
  if (j.contains("k")) cfg.k = j["k"].get<double>();
  if (j.contains("l")) cfg.l = j["l"].get<double>();
  if (j.contains("theta")) cfg.theta = j["theta"].get<double>();
  if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
  if (j.contains("dim_sing")) cfg.dim_sing = j["dim_sing"].get<long>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = j["workers"].get<int>();
  if (j.contains("max_evals")) cfg.max_evals = j["max_evals"].get<std::uint64_t>();
  if (j.contains("quad")) cfg.quad = quad_from_json(j["quad"]);
  return cfg;
}

std::string config_to_json(const InstanceConfig &cfg) {
  json j{
      {"P", cfg.P},
      {"R", cfg.R},
      {"b", cfg.b.get_str()},
      {"depth", cfg.depth},
      {"dim_sing", cfg.dim_sing},
      {"eta", cfg.eta},
      {"form", cfg.form_text},
      {"k", cfg.k},
      {"l", cfg.l},
      {"m", cfg.m},
      {"max_evals", cfg.max_evals},
      {"prime", cfg.prime},
      {"qmax", cfg.qmax},
      {"quad", quad_to_json(cfg.quad)},
      {"s", cfg.s},
      {"seed", cfg.seed},
      {"theta", cfg.theta},
      {"workers", cfg.workers},
  };
  return j.dump(2);
}

std::string config_hash(const InstanceConfig &cfg) {
  return hex64(fnv1a(config_to_json(cfg)));
}

std::pair<double, double> effective_kl(const InstanceConfig &cfg, int d) {
  double k = cfg.k, l = cfg.l;
  if (k <= 0.0)
    k = static_cast<double>(cfg.s - cfg.dim_sing) / std::ldexp(1.0, d - 1);
  if (l <= 0.0) l = static_cast<double>(cfg.s) / std::ldexp(1.0, 2 * cfg.m - 1);
  return {k, l};
}

std::string predict_report_json(const InstanceConfig &cfg) {
  ParametricExpansion exp = expand_parametric(parse_form(cfg.form_text, cfg.s), cfg.m);
  const bool excluded = (exp.d == 2 * exp.m);
  json report;
  report["schema_version"] = kSchemaVersion;
  report["version"] = kVersion;
  report["config"] = json::parse(config_to_json(cfg));
  report["config_hash"] = config_hash(cfg);
  report["excluded_case"] = excluded;
  report["caveat"] =
      "desk-scale instances violate the counting theorem's hypotheses; the "
      "prediction is reported for transparency, never validated against the "
      "exact count";

  // exact enumeration
  {
    json sect{{"count", nullptr}, {"status", "ok"}};
    try {
      Budget budget(cfg.max_evals);
      sect["count"] = count_Nm_b(exp, cfg.P, cfg.b, cfg.workers, &budget).get_str();
    } catch (const BudgetError &e) {
      sect["status"] = std::string("budget_refused: ") + e.what();
    }
    report["exact"] = sect;
  }

  // orthogonality cross-check
  {
    json sect{{"count", nullptr}, {"status", "ok"}};
    try {
      Budget budget(cfg.max_evals);
      sect["count"] = count_via_dft(exp, cfg.P, cfg.b, cfg.workers, &budget).get_str();
    } catch (const BudgetError &e) {
      sect["status"] = std::string("budget_refused: ") + e.what();
    } catch (const PrecisionError &e) {
      sect["status"] = std::string("precision_refused: ") + e.what();
    } catch (const ShapeError &e) {
      sect["status"] = std::string("refused: ") + e.what();
    }
    report["transform_check"] = sect;
  }

  // truncated main term
  {
    json sect{{"chi_inf", nullptr},        {"chi_inf_err", nullptr},
              {"chi_inf_status", "ok"},    {"exponent", nullptr},
              {"power", nullptr},          {"series_partial", nullptr},
              {"series_status", "ok"},     {"value", nullptr}};
    long long expnt = static_cast<long long>(exp.ms()) -
                      static_cast<long long>(exp.r) * exp.d - 2LL * exp.m;
    sect["exponent"] = expnt;
    double power = 0.0;
    bool have_power = cfg.P >= 1;
    if (have_power) {
      power = std::pow(static_cast<double>(cfg.P), static_cast<double>(expnt));
      sect["power"] = power;
    } else {
      sect["series_status"] = "undefined_at_P_0";
      sect["chi_inf_status"] = "undefined_at_P_0";
    }
    double series = 0.0;
    bool have_series = false;
    if (have_power) {
      try {
        Budget budget(cfg.max_evals);
        series = singular_series_partial(exp, cfg.qmax, cfg.b, cfg.workers, &budget);
        sect["series_partial"] = series;
        have_series = true;
      } catch (const BudgetError &e) {
        sect["series_status"] = std::string("budget_refused: ") + e.what();
      }
    }
    double chi = 0.0;
    bool have_chi = false;
    if (have_power) {
      try {
        ChiInfResult res = chi_inf_truncated(exp, cfg.b, cfg.P, cfg.R, effective_quad(cfg));
        chi = res.value;
        sect["chi_inf"] = chi;
        sect["chi_inf_err"] = res.err;
        have_chi = true;
      } catch (const BudgetError &e) {
        sect["chi_inf_status"] = std::string("budget_refused: ") + e.what();
      }
    }
    if (have_power && have_series && have_chi) sect["value"] = power * series * chi;
    report["prediction"] = sect;
  }

  report["hypothesis"] =
      hypothesis_json(hypothesis_check(cfg.s, exp.d, cfg.m, cfg.dim_sing));
  return report.dump(2) + "\n";
}

std::string hypothesis_report_json(const HypothesisReport &rep) {
  return hypothesis_json(rep).dump(2) + "\n";
}

std::string report_csv_from_json(const std::string &report_json) {
  json j = json::parse(report_json);
  std::ostringstream os;
  os << "key;value\n";
  flatten(j, "", os);
  return os.str();
}

}  // namespace circle
