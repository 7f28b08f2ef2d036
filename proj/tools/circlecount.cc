// circlecount: command-line front end for the counting toolkit.  Subcommands
// cover coefficient-form expansion, exact box counts, pointwise sum
// evaluation, arc diagnostics, hypothesis checks, local and archimedean
// densities, the truncated series, and the headline predict report.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "circle/archimedean.hh"
#include "circle/arcs.hh"
#include "circle/errors.hh"
#include "circle/expsum.hh"
#include "circle/forms.hh"
#include "circle/instance.hh"
#include "circle/lattice.hh"
#include "circle/local.hh"
#include "circle/util.hh"

using namespace circle;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::optional<std::string> form;
  std::optional<int> s, m, depth, workers;
  std::optional<std::string> b;
  std::optional<long> P, qmax, prime, dim_sing;
  std::optional<double> R, k, l, theta, eta;
  std::optional<uint64_t> seed, max_evals;
  std::string config_path, out_path;
};

void add_common(CLI::App *cmd, CommonOpts &o) {
  cmd->add_option("--form", o.form, "polynomial in x1..xs");
  cmd->add_option("--s", o.s, "number of variables");
  cmd->add_option("--m", o.m, "tuple length");
  cmd->add_option("--b", o.b, "target discriminant value (integer, any size)");
  cmd->add_option("--P", o.P, "box radius");
  cmd->add_option("--qmax", o.qmax, "series modulus cutoff");
  cmd->add_option("--R", o.R, "dual window halfwidth");
  cmd->add_option("--prime", o.prime, "prime for local reports");
  cmd->add_option("--depth", o.depth, "prime power exponent cap");
  cmd->add_option("--k", o.k, "form-block growth weight (0 = extremal)");
  cmd->add_option("--l", o.l, "discriminant growth weight (0 = extremal)");
  cmd->add_option("--theta", o.theta, "form window parameter");
  cmd->add_option("--eta", o.eta, "discriminant window parameter");
  cmd->add_option("--dim-sing", o.dim_sing, "asserted singular locus dimension");
  cmd->add_option("--seed", o.seed, "random seed");
  cmd->add_option("--workers", o.workers, "worker thread cap");
  cmd->add_option("--max-evals", o.max_evals, "evaluation budget");
  cmd->add_option("--config", o.config_path, "JSON config file (flags override it)");
  cmd->add_option("--out", o.out_path, "output path (default stdout)");
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ShapeError("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

InstanceConfig merge(const CommonOpts &o) {
  InstanceConfig cfg;
  if (!o.config_path.empty()) cfg = config_from_json(read_file(o.config_path));
  if (o.form) cfg.form_text = *o.form;
  if (o.s) cfg.s = *o.s;
  if (o.m) cfg.m = *o.m;
  if (o.b) cfg.b = ZZ(*o.b);
  if (o.P) cfg.P = *o.P;
  if (o.qmax) cfg.qmax = *o.qmax;
  if (o.R) cfg.R = *o.R;
  if (o.prime) cfg.prime = *o.prime;
  if (o.depth) cfg.depth = *o.depth;
  if (o.k) cfg.k = *o.k;
  if (o.l) cfg.l = *o.l;
  if (o.theta) cfg.theta = *o.theta;
  if (o.eta) cfg.eta = *o.eta;
  if (o.dim_sing) cfg.dim_sing = *o.dim_sing;
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.max_evals) cfg.max_evals = *o.max_evals;
  return cfg;
}

void emit(const CommonOpts &o, const std::string &text) {
  if (o.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(o.out_path, std::ios::binary);
  if (!out) throw ShapeError("cannot write file: " + o.out_path);
  out << text;
}

ParametricExpansion load_exp(const InstanceConfig &cfg) {
  ParametricExpansion exp = expand_parametric(parse_form(cfg.form_text, cfg.s), cfg.m);
  if (exp.d == 2 * exp.m)
    std::cerr << "warning: excluded case d == 2m (d=" << exp.d << ", m=" << exp.m
              << "); the asymptotic machinery does not cover this shape\n";
  return exp;
}

QuadratureSpec quad_of(const InstanceConfig &cfg) {
  QuadratureSpec q = cfg.quad;
  q.seed = cfg.seed;
  q.workers = cfg.workers;
  q.max_evals = cfg.max_evals;
  return q;
}

void run_expand(const CommonOpts &o) {
  InstanceConfig cfg = merge(o);
  ParametricExpansion exp = load_exp(cfg);
  std::ostringstream os;
  os << "base " << print_form(exp.base) << "\n";
  os << "s=" << exp.s << " m=" << exp.m << " d=" << exp.d << " r=" << exp.r << "\n";
  for (const MultiIndex &j : exp.index_set)
    os << j.str() << "  A=" << exp.a_factors.at(j).get_str() << "  "
       << print_form(exp.phi(j)) << "\n";
  os << "disc  " << print_form(exp.disc) << "\n";
  emit(o, os.str());
}

void run_count(const CommonOpts &o) {
  InstanceConfig cfg = merge(o);
  ParametricExpansion exp = load_exp(cfg);
  Budget budget(cfg.max_evals);
  ZZ count = count_Nm_b(exp, cfg.P, cfg.b, cfg.workers, &budget);
  std::ostringstream os;
  os << "P;b;count\n" << cfg.P << ";" << cfg.b.get_str() << ";" << count.get_str() << "\n";
  emit(o, os.str());
}

void run_sums(const CommonOpts &o, const std::string &points_path) {
  InstanceConfig cfg = merge(o);
  ParametricExpansion exp = load_exp(cfg);
  json pts;
  if (!points_path.empty()) {
    pts = json::parse(read_file(points_path));
  } else if (!o.config_path.empty()) {
    json full = json::parse(read_file(o.config_path));
    if (!full.contains("points"))
      throw ShapeError("sums needs a points file argument or a \"points\" config key");
    pts = full["points"];
  } else {
    throw ShapeError("sums needs a points file argument or a \"points\" config key");
  }
  if (!pts.is_array()) throw ShapeError("points must be a JSON array");
  Budget budget(cfg.max_evals);
  std::ostringstream os;
  os << "point;re;im;abs\n";
  size_t idx = 0;
  for (const json &p : pts) {
    std::string type = p.value("type", "arc");
    CC val;
    if (type == "arc") {
      ArcPoint pt;
      pt.alpha0 = p.value("alpha0", 0.0);
      pt.alphas = p.value("alphas", std::vector<double>{});
      if (pt.alphas.size() != static_cast<size_t>(exp.r))
        throw ShapeError("arc point needs exactly r=" + std::to_string(exp.r) +
                         " phase entries");
      val = t_sum(exp, cfg.P, pt, cfg.workers, &budget);
    } else if (type == "rational") {
      RationalPoint rp;
      rp.q = p.value("q", 1L);
      rp.a0 = p.value("a0", 0L);
      rp.a = p.value("a", std::vector<long>{});
      if (rp.a.size() != static_cast<size_t>(exp.r))
        throw ShapeError("rational point needs exactly r=" + std::to_string(exp.r) +
                         " numerators");
      val = s_q(exp, rp, cfg.workers, &budget);
    } else {
      throw ShapeError("unknown point type: " + type);
    }
    os << idx++ << ";" << fmt_double(val.real()) << ";" << fmt_double(val.imag()) << ";"
       << fmt_double(std::abs(val)) << "\n";
  }
  emit(o, os.str());
}

ScheduleKind schedule_kind_from_name(const std::string &name) {
  if (name == "eta_from_one") return ScheduleKind::eta_from_one;
  if (name == "theta_from_coupled_eta") return ScheduleKind::theta_from_coupled_eta;
  if (name == "theta_from_one") return ScheduleKind::theta_from_one;
  if (name == "eta_from_coupled_theta") return ScheduleKind::eta_from_coupled_theta;
  throw ShapeError("unknown schedule kind: " + name);
}

void run_arcs(const CommonOpts &o, const std::string &volume_family,
              const std::string &schedule, double anchor, double target,
              uint64_t samples) {
  InstanceConfig cfg = merge(o);
  ParametricExpansion exp = load_exp(cfg);
  auto [k, l] = effective_kl(cfg, exp.d);
  std::ostringstream os;
  if (!schedule.empty()) {
    ScheduleKind kind = schedule_kind_from_name(schedule);
    ScheduleInput in;
    in.m = exp.m;
    in.d = exp.d;
    in.r = static_cast<long>(exp.r);
    in.k = k;
    in.l = l;
    double eta_star = k / ((2 * exp.m - 1) * k + l);
    double theta_star = l / (3.0 * (exp.d - 1) * l + k);
    // defaults: descents end at the natural window; coupled anchors take the
    // other parameter's natural window
    double def_anchor = 0.0, def_target = 0.0;
    switch (kind) {
      case ScheduleKind::eta_from_one: def_anchor = eta_star; break;
      case ScheduleKind::theta_from_one: def_anchor = theta_star; break;
      case ScheduleKind::theta_from_coupled_eta:
        def_anchor = eta_star;
        def_target = theta_star;
        break;
      case ScheduleKind::eta_from_coupled_theta:
        def_anchor = theta_star;
        def_target = eta_star;
        break;
    }
    in.anchor = anchor > 0 ? anchor : def_anchor;
    in.target = target > 0 ? target : def_target;
    std::vector<double> seq = pruning_schedule(kind, in);
    os << "index;value\n";
    for (size_t i = 0; i < seq.size(); ++i) os << i << ";" << fmt_double(seq[i]) << "\n";
  } else if (!volume_family.empty()) {
    ArcFamily fam = family_from_name(volume_family);
    ArcParams prm;
    prm.eta = cfg.eta;
    prm.theta = cfg.theta;
    prm.k = k;
    prm.l = l;
    double P = std::max(1.0, static_cast<double>(cfg.P));
    ArcVolume vol = arc_volume_mc(exp, fam, P, prm, samples, cfg.seed, cfg.workers);
    os << "family;P;estimate;ci_low;ci_high;bound;ratio;hits;samples\n";
    os << family_name(fam) << ";" << fmt_double(P) << ";" << fmt_double(vol.estimate) << ";"
       << fmt_double(vol.ci_low) << ";" << fmt_double(vol.ci_high) << ";"
       << fmt_double(vol.bound) << ";" << fmt_double(vol.ratio) << ";" << vol.hits << ";"
       << vol.samples << "\n";
  } else {
    ArcParams prm;
    prm.eta = cfg.eta;
    prm.theta = cfg.theta;
    prm.k = k;
    prm.l = l;
    std::vector<ArcPoint> grid;
    ArcPoint zero;
    zero.alphas.assign(static_cast<size_t>(exp.r), 0.0);
    zero.alpha0 = 0.0;
    grid.push_back(zero);
    std::vector<double> shift = halton_shift(static_cast<int>(exp.r) + 1, cfg.seed);
    for (uint64_t i = 1; i <= 7; ++i) {
      std::vector<double> pt = halton_point(i, static_cast<int>(exp.r) + 1, shift);
      ArcPoint ap;
      ap.alphas.assign(pt.begin(), pt.end() - 1);
      ap.alpha0 = pt.back();
      grid.push_back(ap);
    }
    Budget budget(cfg.max_evals);
    std::vector<long> P_list{2, 3, 4};
    std::vector<WeylRow> rows = weyl_harness(exp, P_list, prm, grid, cfg.workers, &budget);
    os << "P;exponent;minor_points;max_abs;max_ratio\n";
    for (const WeylRow &row : rows)
      os << row.P << ";" << fmt_double(row.exponent) << ";" << row.minor_points << ";"
         << fmt_double(row.max_abs) << ";" << fmt_double(row.max_ratio) << "\n";
  }
  emit(o, os.str());
}

void run_check(const CommonOpts &o, int d_flag) {
  InstanceConfig cfg = merge(o);
  int d = d_flag;
  if (d <= 0) {
    ParametricExpansion exp = load_exp(cfg);
    d = exp.d;
  } else if (d == 2 * cfg.m) {
    std::cerr << "warning: excluded case d == 2m (d=" << d << ", m=" << cfg.m
              << "); the asymptotic machinery does not cover this shape\n";
  }
  HypothesisReport rep = hypothesis_check(cfg.s, d, cfg.m, cfg.dim_sing);
  emit(o, hypothesis_report_json(rep));
}

void run_chi_p(const CommonOpts &o) {
  InstanceConfig cfg = merge(o);
  ParametricExpansion exp = load_exp(cfg);
  Budget budget(cfg.max_evals);
  LocalDensitySeries ser =
      chi_p_series(exp, cfg.prime, cfg.depth, cfg.b, cfg.workers, &budget);
  std::ostringstream os;
  os << "i;chi\n";
  for (const auto &[i, chi] : ser.values) os << i << ";" << fmt_double(chi) << "\n";
  emit(o, os.str());
}

void run_chi_inf(const CommonOpts &o) {
  InstanceConfig cfg = merge(o);
  ParametricExpansion exp = load_exp(cfg);
  ChiInfResult res = chi_inf_truncated(exp, cfg.b, cfg.P, cfg.R, quad_of(cfg));
  std::ostringstream os;
  os << "R;value;err\n";
  for (size_t i = 0; i < res.trace.size(); ++i) {
    const auto &[rr, vv] = res.trace[i];
    os << fmt_double(rr) << ";" << fmt_double(vv) << ";";
    if (i + 1 == res.trace.size()) os << fmt_double(res.err);
    os << "\n";
  }
  emit(o, os.str());
}

void run_series(const CommonOpts &o) {
  InstanceConfig cfg = merge(o);
  ParametricExpansion exp = load_exp(cfg);
  Budget budget(cfg.max_evals);
  std::vector<std::pair<long, QQ>> layers =
      singular_series_layers(exp, cfg.qmax, cfg.b, cfg.workers, &budget);
  std::ostringstream os;
  os << "q;value\n";
  for (const auto &[q, v] : layers) os << q << ";" << fmt_double(v.get_d()) << "\n";
  emit(o, os.str());
}

void run_predict(const CommonOpts &o) {
  InstanceConfig cfg = merge(o);
  load_exp(cfg);  // surfaces the d == 2m warning before the heavy work
  std::string report = predict_report_json(cfg);
  emit(o, report);
  if (!o.out_path.empty()) {
    std::string csv_path = o.out_path;
    size_t dot = csv_path.find_last_of('.');
    if (dot != std::string::npos && csv_path.find('/', dot) == std::string::npos)
      csv_path = csv_path.substr(0, dot);
    csv_path += ".csv";
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw ShapeError("cannot write file: " + csv_path);
    out << report_csv_from_json(report);
  }
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"counting toolkit for tuples spanning rational linear spaces"};
  app.require_subcommand(1);

  CommonOpts o_expand, o_count, o_sums, o_arcs, o_check, o_chip, o_chiinf, o_series,
      o_predict;
  std::string sums_points_path;
  std::string arcs_volume_family, arcs_schedule;
  double arcs_anchor = 0.0, arcs_target = 0.0;
  uint64_t arcs_samples = 20000;
  int check_d = 0;

  CLI::App *c_expand = app.add_subcommand("expand", "print the coefficient forms");
  add_common(c_expand, o_expand);
  CLI::App *c_count = app.add_subcommand("count", "exact box count");
  add_common(c_count, o_count);
  CLI::App *c_sums = app.add_subcommand("sums", "evaluate sums at listed points");
  add_common(c_sums, o_sums);
  c_sums->add_option("points_file", sums_points_path, "JSON list of evaluation points");
  CLI::App *c_arcs = app.add_subcommand("arcs", "arc diagnostics");
  add_common(c_arcs, o_arcs);
  c_arcs->add_option("--volume-family", arcs_volume_family,
                     "measure one family by Monte Carlo");
  c_arcs->add_option("--schedule", arcs_schedule, "emit a pruning schedule");
  c_arcs->add_option("--anchor", arcs_anchor, "schedule anchor value");
  c_arcs->add_option("--target", arcs_target, "schedule target value");
  c_arcs->add_option("--samples", arcs_samples, "Monte Carlo sample count");
  CLI::App *c_check = app.add_subcommand("check", "hypothesis table");
  add_common(c_check, o_check);
  c_check->add_option("--d", check_d, "degree (0 = infer from the form)");
  CLI::App *c_chip = app.add_subcommand("chi-p", "local density series at one prime");
  add_common(c_chip, o_chip);
  CLI::App *c_chiinf = app.add_subcommand("chi-inf", "archimedean density");
  add_common(c_chiinf, o_chiinf);
  CLI::App *c_series = app.add_subcommand("series", "truncated series layers");
  add_common(c_series, o_series);
  CLI::App *c_predict = app.add_subcommand("predict", "headline report");
  add_common(c_predict, o_predict);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (c_expand->parsed()) run_expand(o_expand);
    if (c_count->parsed()) run_count(o_count);
    if (c_sums->parsed()) run_sums(o_sums, sums_points_path);
    if (c_arcs->parsed())
      run_arcs(o_arcs, arcs_volume_family, arcs_schedule, arcs_anchor, arcs_target,
               arcs_samples);
    if (c_check->parsed()) run_check(o_check, check_d);
    if (c_chip->parsed()) run_chi_p(o_chip);
    if (c_chiinf->parsed()) run_chi_inf(o_chiinf);
    if (c_series->parsed()) run_series(o_series);
    if (c_predict->parsed()) run_predict(o_predict);
  } catch (const BudgetError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
