// s2lab command-line driver.
//
// Exit codes: 0 pass, 1 check failure or inequality regression,
// 2 usage or domain error, 3 admissibility failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "s2lab/calibration.hpp"
#include "s2lab/cone_properties.hpp"
#include "s2lab/conformal.hpp"
#include "s2lab/divcheck.hpp"
#include "s2lab/error.hpp"
#include "s2lab/harness.hpp"
#include "s2lab/radial_solver.hpp"
#include "s2lab/svg.hpp"

#ifndef S2LAB_CALIBRATION_FILE
#define S2LAB_CALIBRATION_FILE "data/calibration.json"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace s2lab;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitAdmissibility = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fmt(double v) { return format_double(v); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw UsageError("cannot read " + what + " from '" + s + "'");
  }
}

int parse_int(const std::string& s, const std::string& what) {
  const double v = parse_double(s, what);
  if (v != std::floor(v)) throw UsageError(what + " must be an integer");
  return static_cast<int>(v);
}

/// Output directory: --out, then S2LAB_OUT, then the config file, then ".".
struct OutputDir {
  std::string flag, config;

  fs::path resolve() const {
    fs::path p = ".";
    if (!flag.empty()) {
      p = flag;
    } else if (const char* env = std::getenv("S2LAB_OUT"); env && *env) {
      p = env;
    } else if (!config.empty()) {
      p = config;
    }
    fs::create_directories(p);
    return p;
  }
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

/// Fills options of `sub` from a JSON object unless the flag was given.
void apply_config(const std::string& path, CLI::App* sub, OutputDir& out) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      if (!value.is_string() || value.get<std::string>() != sub->get_name())
        throw UsageError("config command does not match '" + sub->get_name() + "'");
      continue;
    }
    if (key == "out") {
      if (!value.is_string()) throw UsageError("config key 'out' must be a string");
      out.config = value.get<std::string>();
      continue;
    }
    CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (opt == nullptr) throw UsageError("unknown config key '" + key + "'");
    if (opt->count() > 0) continue;
    auto as_text = [](const json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_boolean()) return std::string(v.get<bool>() ? "true" : "false");
      return v.dump();
    };
    if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + as_text(v);
      opt->add_result(joined);
    } else {
      opt->add_result(as_text(value));
    }
    opt->run_callback();
  }
}

// ---------------------------------------------------------------------------
// divcheck

struct DivcheckOptions {
  double bubble = 1.0;
  bool flat = false;
  std::string ladder = "13,17,25";
  double half_width = 2.0;
  double r_check = 1.0;
  std::string mode = "background";
  std::string derivatives = "analytic";
};

int cmd_divcheck(const DivcheckOptions& o, const fs::path& out) {
  std::vector<int> ladder;
  for (const auto& t : split(o.ladder, ',')) ladder.push_back(parse_int(t, "ladder entry"));
  if (ladder.empty()) throw UsageError("empty ladder");

  std::vector<DivergenceForm> forms;
  if (o.mode == "all") {
    forms = {DivergenceForm::background, DivergenceForm::intrinsic_sigma1,
             DivergenceForm::intrinsic_sigma2};
  } else if (o.mode == "background") {
    forms = {DivergenceForm::background};
  } else if (o.mode == "intrinsic-k1") {
    forms = {DivergenceForm::intrinsic_sigma1};
  } else if (o.mode == "intrinsic-k2") {
    forms = {DivergenceForm::intrinsic_sigma2};
  } else {
    throw UsageError("unknown divcheck mode " + o.mode);
  }

  DerivativeSource source;
  std::string subject;
  if (o.flat) {
    source = sampled_source([](const Point4&) { return 0.0; });
    subject = "flat";
  } else {
    const Bubble b(o.bubble);
    if (o.derivatives == "analytic") {
      source = bubble_source(b);
    } else if (o.derivatives == "fd") {
      source = sampled_source([b](const Point4& x) { return b.w(x); });
    } else {
      throw UsageError("--derivatives must be analytic or fd");
    }
    subject = "bubble-" + fmt(o.bubble);
  }

  std::ostringstream csv;
  csv << "form,points_per_axis,h,max_abs_discrepancy,local_order\n";
  json summary = {{"subject", subject},
                  {"half_width", o.half_width},
                  {"R_check", o.r_check},
                  {"min_order", kMinObservedOrder},
                  {"model_slack", kModelSlack},
                  {"reports", json::array()}};
  bool all_pass = true;
  for (DivergenceForm form : forms) {
    const ConvergenceReport rep =
        divergence_ladder(source, ladder, o.half_width, o.r_check, form);
    for (std::size_t i = 0; i < rep.h_ladder.size(); ++i) {
      const double lo = rep.local_order(i);
      csv << rep.label << ',' << rep.points_per_axis[i] << ',' << fmt(rep.h_ladder[i]) << ','
          << fmt(rep.max_abs_discrepancy[i]) << ',' << (std::isnan(lo) ? "" : fmt(lo)) << '\n';
    }
    json r = {{"form", rep.label},
              {"points_per_axis", rep.points_per_axis},
              {"h", rep.h_ladder},
              {"max_abs_discrepancy", rep.max_abs_discrepancy},
              {"exact", rep.exact},
              {"pass", rep.pass}};
    r["observed_order"] = std::isnan(rep.observed_order) ? json(nullptr) : json(rep.observed_order);
    r["model_finest"] = std::isnan(rep.model_finest) ? json(nullptr) : json(rep.model_finest);
    summary["reports"].push_back(r);
    std::printf("%-13s order %-8s finest %.3e  %s\n", rep.label.c_str(),
                rep.exact ? "exact" : fmt(rep.observed_order).substr(0, 6).c_str(),
                rep.max_abs_discrepancy.back(), rep.pass ? "pass" : "FAIL");
    all_pass = all_pass && rep.pass;
  }
  summary["pass"] = all_pass;
  write_text(out / "divcheck.csv", csv.str());
  write_json(out / "divcheck.json", summary);
  return all_pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// solve

struct SolveOptions {
  std::string mode = "eq1";
  double K = kBubbleCurvature;
  std::string f = "bubble:1";
  double w0 = std::log(2.0);
  double r_max = 2.0;
  double step = 1e-3;
  double tol = kDefaultAdmissibilityTol;
  double accuracy = 1e-6;
  int max_halvings = 4;
};

int cmd_solve(const SolveOptions& o, const fs::path& out) {
  SolveSpec spec;
  spec.w0 = o.w0;
  spec.r_max = o.r_max;
  spec.step = o.step;
  spec.tol = o.tol;
  spec.accuracy = o.accuracy;
  spec.max_halvings = o.max_halvings;

  // Closed-form reference when the data is a rescaled bubble.
  std::optional<Bubble> ref;
  double ref_shift = 0.0;
  if (o.mode == "eq1") {
    if (!(o.K >= 0.0)) throw DomainError("K must be nonnegative");
    spec.mode = EquationMode::intrinsic;
    const double K = o.K;
    spec.rhs = [K](double) { return K; };
    if (K > 0.0) {
      ref_shift = 0.25 * std::log(kBubbleCurvature / K);
      ref.emplace(0.5 * std::exp(o.w0 - ref_shift));
    }
  } else if (o.mode == "eq2") {
    spec.mode = EquationMode::background;
    if (o.f == "zero") {
      spec.rhs = [](double) { return 0.0; };
    } else if (o.f.rfind("const:", 0) == 0) {
      const double v = parse_double(o.f.substr(6), "--f constant");
      if (!(v >= 0.0)) throw DomainError("f must be nonnegative");
      spec.rhs = [v](double) { return v; };
    } else if (o.f.rfind("bubble:", 0) == 0) {
      const Bubble b(parse_double(o.f.substr(7), "--f bubble lambda"));
      spec.rhs = [b](double r) { return kBubbleCurvature * std::exp(4.0 * b.w_r(r)); };
      if (std::abs(o.w0 - b.w_r(0.0)) < 1e-12) ref.emplace(b);
    } else {
      throw UsageError("--f must be zero, const:<v> or bubble:<lambda>");
    }
  } else {
    throw UsageError("--mode must be eq1 or eq2");
  }

  const SolveResult res = solve_radial(spec);
  const RadialProfile& p = res.profile;
  const RadialEigs e = radial_schouten_eigs(p);
  std::ostringstream csv;
  csv << "r,w,dw,d2w,a_r,a_t,sigma2_background\n";
  for (std::size_t i = 0; i < p.size(); ++i)
    csv << fmt(p.r[i]) << ',' << fmt(p.w[i]) << ',' << fmt(p.dw[i]) << ',' << fmt(p.d2w[i])
        << ',' << fmt(e.a_r[i]) << ',' << fmt(e.a_t[i]) << ','
        << fmt(radial_sigma2(e.a_r[i], e.a_t[i])) << '\n';
  write_text(out / "profile.csv", csv.str());

  json summary = {{"mode", o.mode},
                  {"w0", o.w0},
                  {"r_max", o.r_max},
                  {"step", res.step},
                  {"converged", res.converged},
                  {"error_estimate", res.error_estimate},
                  {"admissible_up_to", res.admissible_up_to},
                  {"samples", p.size()}};
  summary["violation_r"] = res.violation_r ? json(*res.violation_r) : json(nullptr);
  if (ref && !res.violation_r) {
    double worst = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      worst = std::max(worst, std::abs(p.w[i] - (ref->w_r(p.r[i]) + ref_shift)));
    summary["bubble_lambda"] = ref->lambda();
    summary["bubble_error"] = worst;
    std::printf("bubble lambda %.17g  sup |w - w_bubble| = %.6e\n", ref->lambda(), worst);
  }
  summary["residual"] = res.violation_r ? json(nullptr)
                                        : json(residual_norm(p, spec.rhs, spec.mode));
  write_json(out / "solve.json", summary);

  if (res.violation_r) {
    std::printf("admissibility lost at r = %.17g\n", *res.violation_r);
    return kExitAdmissibility;
  }
  std::printf("step %.6g  error estimate %.3e  %s\n", res.step, res.error_estimate,
              res.converged ? "converged" : "not converged");
  return kExitPass;
}

// ---------------------------------------------------------------------------
// harness

struct HarnessOptions {
  std::string suite;
  std::string sweep;
  double R = 1.0;
  double p = 2.0;
  double beta = 4.0;
  std::vector<double> constants;
  bool calibrate = false;
  std::string calibration = S2LAB_CALIBRATION_FILE;
};

std::vector<RadialSolution> parse_sweep(const std::string& s, double r_max) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || s.substr(0, eq) != "lambda")
    throw UsageError("--sweep must look like lambda=a:b:n");
  const auto parts = split(s.substr(eq + 1), ':');
  if (parts.size() != 3) throw UsageError("--sweep must look like lambda=a:b:n");
  return bubble_family(parse_double(parts[0], "sweep start"), parse_double(parts[1], "sweep end"),
                       parse_int(parts[2], "sweep count"), r_max);
}

std::string context_string(const InequalityRecord& r) {
  std::string s;
  for (const auto& [k, v] : r.context) s += (s.empty() ? "" : ";") + k + "=" + fmt(v);
  return s;
}

int cmd_harness(const HarnessOptions& o, const fs::path& out) {
  if (!(o.R > 0.0)) throw DomainError("--R must be positive");
  const double r_max = std::max(2.0, 2.0 * o.R);
  std::string suite = o.suite.empty() ? (o.sweep.empty() ? "all" : "sweep") : o.suite;
  static const std::vector<std::string> known = {"all", "harnack", "sup-average", "main-lemma",
                                                 "moser", "bmo", "sweep", "invariance"};
  if (std::find(known.begin(), known.end(), suite) == known.end())
    throw UsageError("unknown suite " + suite);
  auto wants = [&](const char* s) { return suite == "all" || suite == s; };

  std::vector<RadialSolution> family;
  std::string family_name;
  if (!o.constants.empty()) {
    for (double c : o.constants) family.push_back(constant_solution(c, r_max));
    family_name = "constants";
  } else if (!o.sweep.empty()) {
    family = parse_sweep(o.sweep, r_max);
    family_name = "sweep";
  } else {
    family = standard_corpus(r_max);
    family_name = "standard-corpus";
  }

  std::vector<InequalityRecord> records;
  auto append = [&](std::vector<InequalityRecord> v) {
    for (auto& r : v) records.push_back(std::move(r));
  };
  json summary = {{"suite", suite}, {"family", family_name}, {"R", o.R}, {"p", o.p}};
  bool literal_ok = true;

  if (wants("harnack")) {
    std::ostringstream csv;
    csv << "label,lambda,R,sup_ew,inf_ew,quotient,energy,gamma\n";
    for (const auto& s : family) {
      const HarnackReport h = harnack_report(s, o.R, o.p);
      csv << csv_field(s.label) << ',' << fmt(s.lambda) << ',' << fmt(h.R) << ','
          << fmt(h.sup_ew) << ',' << fmt(h.inf_ew) << ',' << fmt(h.quotient) << ','
          << fmt(h.energy) << ',' << fmt(h.gamma) << '\n';
    }
    write_text(out / "harnack.csv", csv.str());
  }
  for (const auto& s : family) {
    if (wants("sup-average")) {
      append(sup_average_check(s, o.p, o.beta, o.R));
      if (o.beta != 1.0) append(sup_average_check(s, o.p, 1.0, o.R));
    }
    if (wants("main-lemma")) {
      append(main_lemma_ratio(s, {TestFunction::exponential, 1.0}, o.R, o.p));
      append(main_lemma_ratio(s, {TestFunction::power, 1.0}, o.R, o.p));
      append(main_lemma_ratio(s, {TestFunction::log_derivative, 1.0}, o.R, o.p));
    }
    if (wants("moser")) append(moser_ladder_trace(s, o.p, 1.0, o.R, 3));
    if (wants("bmo")) {
      auto recs = bmo_gradient_suite(s, o.R);
      for (const auto& r : recs) {
        if (r.name == "bmo" && !(r.lhs <= r.rhs)) literal_ok = false;
        if (r.name == "superharmonic-margin" && is_admissible(s) && !(r.lhs > 0.0))
          literal_ok = false;
      }
      append(std::move(recs));
    }
  }

  if (wants("sweep")) {
    const auto rows = small_energy_sweep(family, o.R, o.p);
    std::ostringstream csv;
    write_sweep_csv(csv, rows);
    write_text(out / "sweep.csv", csv.str());
    append(sweep_records(rows, o.R));
    PlotSeries q{"Harnack quotient", {}, {}};
    for (const auto& r : rows) {
      q.x.push_back(r.energy);
      q.y.push_back(r.quotient);
    }
    std::ostringstream svg;
    write_svg_plot(svg, {"Harnack quotient against energy", "energy on B_2R", "sup/inf e^w"},
                   {q});
    write_text(out / "sweep_quotient.svg", svg.str());
  }

  if (wants("moser")) {
    std::vector<PlotSeries> curves;
    for (const auto& s : family) {
      PlotSeries c{s.label, {}, {}};
      for (const auto& r : records)
        if (r.name == "moser-ladder" && r.subject == s.label && !r.skipped) {
          c.x.push_back(r.context.at("rung"));
          c.y.push_back(r.empirical_constant);
        }
      if (!c.x.empty() && curves.size() < 6) curves.push_back(std::move(c));
    }
    std::ostringstream svg;
    write_svg_plot(svg, {"Moser ladder", "rung", "lhs / rhs", true}, curves);
    write_text(out / "moser_ladder.svg", svg.str());
  }

  if (wants("invariance")) {
    std::vector<double> lambdas;
    for (const auto& s : family)
      if (std::isfinite(s.lambda) && s.label.rfind("bubble-", 0) == 0) lambdas.push_back(s.lambda);
    if (lambdas.empty() || family_name == "standard-corpus") lambdas = {0.5, 1.0, 2.0};
    std::vector<TotalCurvature> totals;
    std::ostringstream csv;
    csv << "lambda,total,relative_error,tail,r_max,translation_deviation,"
           "scaling_residual_pointwise,scaling_residual_radial\n";
    bool ok = true;
    for (double l : lambdas) {
      const InvarianceReport rep = invariance_suite({l, {}});
      totals.push_back(rep.total);
      const double rel = rep.total.total / kTotalSigma2 - 1.0;
      csv << fmt(l) << ',' << fmt(rep.total.total) << ',' << fmt(rel) << ','
          << fmt(rep.total.tail) << ',' << fmt(rep.total.r_max) << ','
          << fmt(rep.translation_deviation) << ',' << fmt(rep.scaling_residual_pointwise) << ','
          << fmt(rep.scaling_residual_radial) << '\n';
      ok = ok && std::abs(rel) <= 1e-2 && rep.translation_deviation <= 1e-8 &&
           rep.scaling_residual_pointwise <= 1e-8 && rep.scaling_residual_radial <= 1e-8;
    }
    const double spread = relative_spread(totals);
    ok = ok && spread <= 1e-3;
    summary["invariance"] = {{"spread", spread}, {"pass", ok}};
    std::printf("invariance: spread %.3e  %s\n", spread, ok ? "pass" : "FAIL");
    literal_ok = literal_ok && ok;
    write_text(out / "invariance.csv", csv.str());
  }

  CalibrationTable table;
  std::vector<Regression> regressions;
  if (o.calibrate) {
    table = calibrate(records);
    save_calibration(o.calibration, table);
    std::printf("calibration written to %s (version %s)\n", o.calibration.c_str(),
                table.version.c_str());
  } else {
    table = load_calibration(o.calibration);
    regressions = check_calibration(records, table);
  }

  std::ostringstream csv;
  csv << "name,subject,lhs,rhs,empirical_constant,calibrated,skipped,status,context\n";
  for (const auto& r : records) {
    const bool bad = !o.calibrate && regressed(r, table);
    const char* status = r.skipped ? "skipped" : !r.calibrated ? "uncalibrated"
                         : bad     ? "regression" : "pass";
    csv << csv_field(r.name) << ',' << csv_field(r.subject) << ',' << fmt(r.lhs) << ','
        << fmt(r.rhs) << ',' << fmt(r.empirical_constant) << ',' << (r.calibrated ? 1 : 0)
        << ',' << (r.skipped ? 1 : 0) << ',' << status << ',' << csv_field(context_string(r))
        << '\n';
  }
  write_text(out / "records.csv", csv.str());

  for (const auto& g : regressions)
    std::printf("regression: %s on %s  lhs/rhs %.6g  calibrated %.6g\n", g.record.name.c_str(),
                g.record.subject.c_str(), g.record.empirical_constant, g.constant);
  const bool pass = regressions.empty() && literal_ok;
  summary["calibration_file"] = o.calibration;
  summary["calibration_version"] = table.version;
  summary["tolerance"] = table.tolerance;
  summary["records"] = records.size();
  summary["regressions"] = regressions.size();
  summary["literal_checks_pass"] = literal_ok;
  summary["pass"] = pass;
  write_json(out / "harness.json", summary);
  std::printf("%zu records, %zu regressions, calibration %s  %s\n", records.size(),
              regressions.size(), table.version.c_str(), pass ? "pass" : "FAIL");
  return pass ? kExitPass : kExitFail;
}

// ---------------------------------------------------------------------------
// cone

int cmd_cone(std::size_t samples, std::uint64_t seed, const fs::path& out) {
  const ConePropertyReport r = cone_property_suite(samples, seed);
  json j = {{"samples", r.samples},
            {"seed", seed},
            {"ricci_violations", r.ricci_violations},
            {"newton_violations", r.newton_violations},
            {"newton_identity_error", r.newton_identity_error},
            {"pass", r.pass()}};
  write_json(out / "cone.json", j);
  std::printf("%zu spectra: %zu Ricci, %zu T_1 violations, Newton identity error %.3e  %s\n",
              r.samples, r.ricci_violations, r.newton_violations, r.newton_identity_error,
              r.pass() ? "pass" : "FAIL");
  return r.pass() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for sigma_2 curvature on four-manifolds"};
  app.require_subcommand(1);
  app.fallthrough();
  OutputDir out;
  std::string config;
  app.add_option("--out", out.flag, "Output directory (overrides S2LAB_OUT)");
  app.add_option("--config", config, "JSON file of option values; flags win")
      ->check(CLI::ExistingFile);

  DivcheckOptions dv;
  auto* div = app.add_subcommand("divcheck", "Divergence-form identities on a grid ladder");
  div->add_option("--bubble", dv.bubble, "Bubble scale lambda")->capture_default_str();
  div->add_flag("--flat", dv.flat, "Use w = 0");
  div->add_option("--ladder", dv.ladder, "Points per axis, comma separated")
      ->capture_default_str();
  div->add_option("--half-width", dv.half_width, "Box [-L, L]^4")->capture_default_str();
  div->add_option("--R", dv.r_check, "Radius of the check ball")->capture_default_str();
  div->add_option("--mode", dv.mode, "background, intrinsic-k1, intrinsic-k2 or all")
      ->capture_default_str();
  div->add_option("--derivatives", dv.derivatives, "analytic or fd (bubble only)")
      ->capture_default_str();

  SolveOptions so;
  auto* sol = app.add_subcommand("solve", "Radial admissible solution by shooting");
  sol->add_option("--mode", so.mode, "eq1 (intrinsic K) or eq2 (background f)")
      ->capture_default_str();
  sol->add_option("--K", so.K, "Constant K for eq1")->capture_default_str();
  sol->add_option("--f", so.f, "zero, const:<v> or bubble:<lambda> for eq2")
      ->capture_default_str();
  sol->add_option("--w0", so.w0, "w(0)")->capture_default_str();
  sol->add_option("--rmax", so.r_max, "Outer radius")->capture_default_str();
  sol->add_option("--step", so.step, "RK4 step")->capture_default_str();
  sol->add_option("--tol", so.tol, "Admissibility margin")->capture_default_str();
  sol->add_option("--accuracy", so.accuracy, "Step-halving target")->capture_default_str();
  sol->add_option("--max-halvings", so.max_halvings)->capture_default_str();

  HarnessOptions ho;
  auto* har = app.add_subcommand("harness", "Inequality measurements on a solution family");
  har->add_option("--suite", ho.suite,
                  "all, harnack, sup-average, main-lemma, moser, bmo, sweep, invariance");
  har->add_option("--sweep", ho.sweep, "Bubble family lambda=a:b:n");
  har->add_option("--R", ho.R, "Ball radius")->capture_default_str();
  har->add_option("--p", ho.p, "Integrability exponent of f")->capture_default_str();
  har->add_option("--beta", ho.beta, "Exponent of the sup/average checks")
      ->capture_default_str();
  har->add_option("--constant", ho.constants, "Use w = c instead of the corpus")
      ->delimiter(',');
  har->add_flag("--calibrate", ho.calibrate, "Write the calibration table from this run");
  har->add_option("--calibration", ho.calibration, "Calibration table")
      ->capture_default_str();

  std::size_t samples = 100000;
  std::uint64_t seed = 20261016;
  auto* cone = app.add_subcommand("cone", "Random Gamma_2^+ property suite");
  cone->add_option("--samples", samples)->capture_default_str();
  cone->add_option("--seed", seed)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (!config.empty()) apply_config(config, sub, out);
    const fs::path dir = out.resolve();
    if (sub == div) return cmd_divcheck(dv, dir);
    if (sub == sol) return cmd_solve(so, dir);
    if (sub == har) return cmd_harness(ho, dir);
    if (sub == cone) return cmd_cone(samples, seed, dir);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const CLI::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  }
  return kExitUsage;
}
