#include "qmtherm/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qmtherm/serialize.hpp"
#include "qmtherm/thermo.hpp"
#include "qmtherm/verify.hpp"

namespace qmtherm {

namespace {

constexpr double kMinTolerance = 1e-12;

struct TolFlags {
  std::optional<double> psd;
  std::optional<double> strict;
  std::optional<double> rank;
};

struct ConstructArgs {
  std::string kind;
  std::string observable;
  std::string instrument;
  std::string unitaries;
  std::string xi;
  std::optional<double> smooth;
  std::string output;
};

struct AuditArgs {
  std::string process;
  std::string state;
  std::optional<std::size_t> random_states;
  std::uint64_t seed = 0;
  std::optional<double> beta;
  std::size_t panel = 50;
  std::string format = "json";
  std::string output;
};

struct VerifyArgs {
  std::string suite;
  std::size_t dim = 2;
  std::size_t outcomes = 2;
  std::size_t trials = 20;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string output;
};

double checked_tolerance(double v, const std::string& name) {
  if (!std::isfinite(v) || v < kMinTolerance) {
    fail(ErrorKind::InvalidInput, name + " must be a finite value >= 1e-12, got " + std::to_string(v));
  }
  return v;
}

void env_override(const char* var, double& slot) {
  const char* raw = std::getenv(var);
  if (raw == nullptr || *raw == '\0') return;
  char* end = nullptr;
  const double v = std::strtod(raw, &end);
  if (end == raw || *end != '\0') fail(ErrorKind::InvalidInput, std::string(var) + " is not a number");
  slot = checked_tolerance(v, var);
}

Tolerances resolve_tolerances(const TolFlags& flags) {
  Tolerances tol;
  env_override("QMTHERM_TOL_PSD", tol.psd);
  env_override("QMTHERM_TOL_STRICT", tol.strict);
  env_override("QMTHERM_TOL_RANK", tol.rank);
  if (flags.psd) tol.psd = checked_tolerance(*flags.psd, "--tol-psd");
  if (flags.strict) tol.strict = checked_tolerance(*flags.strict, "--tol-strict");
  if (flags.rank) tol.rank = checked_tolerance(*flags.rank, "--tol-rank");
  return tol;
}

Json tolerances_json(const Tolerances& tol) {
  return Json{{"psd", tol.psd}, {"strict", tol.strict}, {"rank", tol.rank},
              {"equality", tol.equality}, {"p_floor", tol.p_floor}};
}

Json check_json(const std::string& name, double value, double bound, bool upper, bool pass) {
  return Json{{"name", name}, {"value", value}, {"bound", bound},
              {"relation", upper ? "<=" : ">="}, {"pass", pass}};
}

Json check_json(const Check& c) { return check_json(c.name, c.value, c.bound, c.upper, c.pass); }

Json header(const char* command) {
  return Json{{"tool", "qmtherm"}, {"version", kVersion}, {"command", command}};
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

std::string fmt_number(double v) {
  std::ostringstream s;
  s.precision(10);
  s << v;
  return s.str();
}

std::string yes_no(bool b) { return b ? "yes" : "no"; }

// ---------------------------------------------------------------- construct

int cmd_construct(const ConstructArgs& a, const Tolerances& tol, std::ostream& out) {
  std::optional<MeasurementProcess> proc;
  if (a.kind == "ozawa") {
    if (a.instrument.empty() == a.observable.empty()) {
      fail(ErrorKind::InvalidInput, "ozawa needs exactly one of --instrument or --observable");
    }
    if (!a.unitaries.empty() || !a.xi.empty()) {
      fail(ErrorKind::InvalidInput, "ozawa does not take --unitaries or --xi; use --smooth to mix xi");
    }
    const Instrument inst =
        a.instrument.empty()
            ? luders_instrument(observable_from_json(read_json_file(a.observable), tol), tol)
            : instrument_from_json(read_json_file(a.instrument).at("instrument"), tol, "/instrument");
    proc = ozawa_dilation(inst, tol);
    proc->metadata["source_instrument"] = a.instrument.empty() ? "luders(" + a.observable + ")" : a.instrument;
  } else if (a.kind == "thermo") {
    if (a.observable.empty()) fail(ErrorKind::InvalidInput, "thermo needs --observable");
    const Observable obs = observable_from_json(read_json_file(a.observable), tol);
    const auto us = a.unitaries.empty() ? std::vector<ComplexMatrix>(obs.size(), identity_matrix(obs.dim()))
                                        : unitaries_from_json(read_json_file(a.unitaries));
    const State xi = a.xi.empty() ? State::maximally_mixed(obs.size())
                                  : state_from_json(read_json_file(a.xi), tol);
    proc = thermo_construction(obs, us, xi, tol);
    proc->metadata["unitaries"] = a.unitaries.empty() ? "identity" : a.unitaries;
  } else {
    fail(ErrorKind::InvalidInput, "--kind must be ozawa or thermo");
  }
  if (a.smooth) {
    const auto meta = proc->metadata;
    proc = proc->with_xi(mix_with_identity(proc->xi(), *a.smooth), tol);
    proc->metadata = meta;
    proc->metadata["xi_smoothing"] = fmt_number(*a.smooth);
  }
  const double xi_min = min_eigenvalue(proc->xi().hermitian());
  const double xi_purity = (proc->xi().matrix() * proc->xi().matrix()).trace().real();
  proc->metadata["xi_pure"] = std::abs(xi_purity - 1.0) <= tol.equality ? "true" : "false";

  const std::string text = dump_json(process_to_json(*proc));
  if (a.output.empty() || a.output == "-") {
    out << text;
    return kExitPass;
  }
  write_text_file(a.output, text);
  const auto third = third_law_audit(*proc, tol);
  Json summary = header("construct");
  summary["config"] = Json{{"kind", a.kind}, {"output", a.output}, {"tolerances", tolerances_json(tol)}};
  summary["process"] = Json{{"sys_dim", proc->sys_dim()}, {"app_dim", proc->app_dim()},
                            {"outcomes", proc->objectification().size()},
                            {"xi_pure", proc->metadata["xi_pure"] == "true"},
                            {"xi_min_eigenvalue", xi_min}};
  summary["third_law"] = Json{{"compatible", third.compatible},
                              {"xi_min_eigenvalue", third.xi_min_eigenvalue},
                              {"premeasurement_strictly_positive", third.premeasurement_strictly_positive},
                              {"tolerance", tol.strict}};
  out << dump_json(summary);
  return kExitPass;
}

// -------------------------------------------------------------------- audit

Json thermo_json(const ThermoReport& r) {
  Json j{{"labels", r.labels},
         {"probabilities", r.probabilities},
         {"degenerate", r.degenerate},
         {"prior_entropy", r.prior_entropy},
         {"xi_entropy", r.xi_entropy},
         {"shannon", r.shannon},
         {"glo_system", r.glo_system},
         {"glo_apparatus", r.glo_apparatus},
         {"avg_mutual_info", r.avg_mutual_info},
         {"per_outcome_mutual_info", r.per_outcome_mutual_info},
         {"eq5_lhs", r.eq5_lhs},
         {"eq5_rhs", r.eq5_rhs},
         {"delta_S_total", r.delta_S_total},
         {"second_law_pass", r.second_law_pass}};
  if (r.beta) {
    j["beta"] = *r.beta;
    j["net_cycle_work"] = *r.net_cycle_work;
  }
  return j;
}

Json trilemma_json(const TrilemmaVerdict& v) {
  return Json{{"law_compatible", v.law_compatible},
              {"third_law", v.third_law},
              {"second_law_evidence", std::string(to_string(v.second_law))},
              {"panel_size", v.panel_size},
              {"panel_worst_delta_S", v.panel_size ? Json(v.panel_worst_delta_s) : Json(nullptr)},
              {"premeasurement_autonomous_ok", v.premeasurement_autonomous_ok},
              {"arm_ii_reading", v.arm_ii_reading},
              {"composed_bistochastic", v.composed_bistochastic},
              {"quasicomplete", v.quasicomplete},
              {"vacuous", v.vacuous},
              {"failed_arms", v.failed_arms}};
}

std::string audit_markdown(const Json& r) {
  std::ostringstream md;
  md << "# qmtherm audit\n\n";
  md << "- version: " << r["version"].get<std::string>() << "\n";
  md << "- process: `" << r["config"]["process"].get<std::string>() << "`\n";
  md << "- seed: " << r["config"]["seed"].get<std::uint64_t>() << "\n\n";
  const Json& t = r["third_law"];
  md << "## Third law\n\n";
  md << "- compatible: " << yes_no(t["compatible"].get<bool>()) << "\n";
  md << "- min eigenvalue of xi: " << fmt_number(t["xi_min_eigenvalue"].get<double>())
     << " (strict tolerance " << fmt_number(t["tolerance"].get<double>()) << ")\n";
  md << "- premeasurement strictly positive: " << yes_no(t["premeasurement_strictly_positive"].get<bool>())
     << "\n\n";
  const Json& v = r["trilemma"];
  md << "## Trilemma\n\n| arm | holds |\n|---|---|\n";
  md << "| (i) law compatible | " << yes_no(v["law_compatible"].get<bool>()) << " ("
     << v["second_law_evidence"].get<std::string>() << ") |\n";
  md << "| (ii) premeasurement bistochastic | " << yes_no(v["premeasurement_autonomous_ok"].get<bool>()) << " |\n";
  md << "| (iii) quasicomplete | " << yes_no(v["quasicomplete"].get<bool>()) << " |\n\n";
  md << "## States\n\n| # | H(p) | I_sys | I_app | avg MI | dS | identity residual | second law |\n";
  md << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& s : r["states"]) {
    const Json& th = s["thermo"];
    md << "| " << s["index"].get<std::size_t>() << " | " << fmt_number(th["shannon"].get<double>()) << " | "
       << fmt_number(th["glo_system"].get<double>()) << " | " << fmt_number(th["glo_apparatus"].get<double>())
       << " | " << fmt_number(th["avg_mutual_info"].get<double>()) << " | "
       << fmt_number(th["delta_S_total"].get<double>()) << " | "
       << fmt_number(s["checks"][0]["value"].get<double>()) << " | "
       << (s["checks"][1]["pass"].get<bool>() ? "pass" : "FAIL") << " |\n";
  }
  const Json& sum = r["summary"];
  md << "\n**" << sum["failed"].get<std::size_t>() << " of " << sum["checks"].get<std::size_t>()
     << " checks failed.**\n";
  return md.str();
}

int cmd_audit(const AuditArgs& a, const Tolerances& tol, std::ostream& out) {
  if (a.state.empty() == !a.random_states.has_value()) {
    fail(ErrorKind::InvalidInput, "audit needs exactly one of --state or --random-states");
  }
  if (a.format != "json" && a.format != "markdown") fail(ErrorKind::InvalidInput, "--format must be json or markdown");
  if (a.beta && !(*a.beta > 0.0)) fail(ErrorKind::InvalidInput, "--beta must be positive");
  const MeasurementProcess proc = process_from_json(read_json_file(a.process), tol);

  std::vector<State> states;
  std::vector<Json> sources;
  if (!a.state.empty()) {
    states.push_back(state_from_json(read_json_file(a.state), tol));
    sources.emplace_back(Json{{"file", a.state}});
  } else {
    if (*a.random_states < 1 || *a.random_states > kMaxSuiteTrials) {
      fail(ErrorKind::InvalidInput, "--random-states must lie in [1, 10000]");
    }
    states = state_panel(proc.sys_dim(), *a.random_states, a.seed);
    for (std::size_t k = 0; k < states.size(); ++k) {
      sources.emplace_back(Json{{"panel_index", k}, {"subseed", subseed(a.seed, k)}});
    }
  }

  Json report = header("audit");
  report["config"] = Json{{"process", a.process},
                          {"state", a.state.empty() ? Json(nullptr) : Json(a.state)},
                          {"random_states", a.random_states ? Json(*a.random_states) : Json(nullptr)},
                          {"seed", a.seed},
                          {"beta", a.beta ? Json(*a.beta) : Json(nullptr)},
                          {"trilemma_panel", a.panel},
                          {"format", a.format},
                          {"tolerances", tolerances_json(tol)}};
  Json meta = Json::object();
  for (const auto& [k, v] : proc.metadata) meta[k] = v;
  report["process"] = Json{{"sys_dim", proc.sys_dim()}, {"app_dim", proc.app_dim()},
                           {"outcomes", proc.objectification().size()},
                           {"decomposable", proc.decomposable}, {"metadata", std::move(meta)}};

  const auto third = third_law_audit(proc, tol);
  report["third_law"] = Json{{"compatible", third.compatible},
                             {"xi_min_eigenvalue", third.xi_min_eigenvalue},
                             {"premeasurement_strictly_positive", third.premeasurement_strictly_positive},
                             {"premeasurement_min_output_eigenvalue", third.premeasurement_min_output_eigenvalue},
                             {"tolerance", tol.strict}};
  report["trilemma"] = trilemma_json(trilemma_classify(proc, tol, a.panel, a.seed));

  std::size_t checks = 0;
  std::size_t failed = 0;
  Json rows = Json::array();
  for (std::size_t k = 0; k < states.size(); ++k) {
    const ThermoReport r = second_law_audit(proc, states[k], tol, a.beta);
    const bool identity_ok = r.identity_residual <= kEntropyIdentityTol;
    Json row{{"index", k}, {"source", sources[k]}, {"thermo", thermo_json(r)}};
    row["checks"] = Json::array({check_json("lemma2_identity", r.identity_residual, kEntropyIdentityTol, true, identity_ok),
                                 check_json("second_law", r.delta_S_total, -kSecondLawSlack, false,
                                            r.second_law_pass)});
    checks += 2;
    failed += (identity_ok ? 0 : 1) + (r.second_law_pass ? 0 : 1);
    rows.push_back(std::move(row));
  }
  report["states"] = std::move(rows);
  report["summary"] = Json{{"checks", checks}, {"failed", failed}, {"pass", failed == 0}};

  emit(a.format == "json" ? dump_json(report) : audit_markdown(report), a.output, out);
  return failed == 0 ? kExitPass : kExitChecksFailed;
}

// ------------------------------------------------------------------- verify

std::string verify_markdown(const Json& r) {
  std::ostringstream md;
  const Json& c = r["config"];
  md << "# qmtherm verify: " << c["suite"].get<std::string>() << "\n\n";
  md << "- version: " << r["version"].get<std::string>() << "\n";
  md << "- dim " << c["dim"].get<std::size_t>() << ", outcomes " << c["outcomes"].get<std::size_t>()
     << ", trials " << c["trials"].get<std::size_t>() << ", seed " << c["seed"].get<std::uint64_t>() << "\n\n";
  md << "| check | worst value | relation | bound | pass |\n|---|---|---|---|---|\n";
  for (const auto& w : r["worst"]) {
    md << "| " << w["name"].get<std::string>() << " | " << fmt_number(w["value"].get<double>()) << " | "
       << w["relation"].get<std::string>() << " | " << fmt_number(w["bound"].get<double>()) << " | "
       << (w["pass"].get<bool>() ? "pass" : "FAIL") << " |\n";
  }
  md << "\n**" << r["summary"]["failed_trials"].get<std::size_t>() << " of "
     << c["trials"].get<std::size_t>() << " trials failed.**\n";
  for (const auto& t : r["trials"]) {
    if (t.contains("error")) {
      md << "- trial " << t["index"].get<std::size_t>() << ": " << t["error"]["kind"].get<std::string>() << ": "
         << t["error"]["message"].get<std::string>() << "\n";
    }
  }
  return md.str();
}

int cmd_verify(const VerifyArgs& a, const Tolerances& tol, std::ostream& out) {
  const auto suite = parse_suite(a.suite);
  if (!suite) fail(ErrorKind::InvalidInput, "unknown suite '" + a.suite + "'");
  if (a.format != "json" && a.format != "markdown") fail(ErrorKind::InvalidInput, "--format must be json or markdown");
  const SuiteReport s = run_suite({*suite, a.dim, a.outcomes, a.trials, a.seed}, tol);

  Json report = header("verify");
  report["config"] = Json{{"suite", a.suite}, {"dim", a.dim}, {"outcomes", a.outcomes}, {"trials", a.trials},
                          {"seed", a.seed}, {"format", a.format}, {"tolerances", tolerances_json(tol)}};
  Json trials = Json::array();
  for (const auto& t : s.trials) {
    Json tj{{"index", t.index}, {"subseed", t.subseed}, {"pass", t.pass}};
    Json cs = Json::array();
    for (const auto& c : t.checks) cs.push_back(check_json(c));
    tj["checks"] = std::move(cs);
    if (t.error_kind) {
      tj["error"] = Json{{"kind", std::string(to_string(*t.error_kind))}, {"message", t.error}};
    }
    trials.push_back(std::move(tj));
  }
  Json worst = Json::array();
  for (const auto& c : s.worst) worst.push_back(check_json(c));
  report["worst"] = std::move(worst);
  report["trials"] = std::move(trials);
  report["summary"] = Json{{"failed_trials", s.failed_trials},
                           {"internal_inconsistency", s.internal_inconsistency},
                           {"pass", s.pass}};
  emit(a.format == "json" ? dump_json(report) : verify_markdown(report), a.output, out);
  if (s.internal_inconsistency) return kExitInternal;
  return s.pass ? kExitPass : kExitChecksFailed;
}

void write_error(std::ostream& err, std::string_view kind, const std::string& message, int code) {
  Json e{{"error", Json{{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  err << dump_json(e);
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InternalInconsistency: return kExitInternal;
    case ErrorKind::AmbiguousClassification: return kExitChecksFailed;
    default: return kExitInvalidInput;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Thermodynamic audits of finite-dimensional quantum measurement processes", "qmtherm"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  TolFlags tol_flags;
  app.add_option("--tol-psd", tol_flags.psd, "PSD tolerance (env QMTHERM_TOL_PSD)");
  app.add_option("--tol-strict", tol_flags.strict, "strict-positivity tolerance (env QMTHERM_TOL_STRICT)");
  app.add_option("--tol-rank", tol_flags.rank, "relative rank tolerance (env QMTHERM_TOL_RANK)");

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "build a measurement process file");
  construct->add_option("--kind", ca.kind, "ozawa | thermo")->required();
  construct->add_option("--observable", ca.observable, "observable file");
  construct->add_option("--instrument", ca.instrument, "instrument file (ozawa)");
  construct->add_option("--unitaries", ca.unitaries, "unitaries file (thermo; default identities)");
  construct->add_option("--xi", ca.xi, "apparatus state file (thermo; default maximally mixed)");
  construct->add_option("--smooth", ca.smooth, "mix xi with the maximally mixed state at this weight");
  construct->add_option("-o,--output", ca.output, "process file to write (default stdout)");

  AuditArgs aa;
  auto* audit = app.add_subcommand("audit", "second/third-law audit and trilemma verdict");
  audit->add_option("--process", aa.process, "process file")->required();
  audit->add_option("--state", aa.state, "prior state file");
  audit->add_option("--random-states", aa.random_states, "number of seeded prior states");
  audit->add_option("--seed", aa.seed, "64-bit seed");
  audit->add_option("--beta", aa.beta, "inverse temperature for work accounting");
  audit->add_option("--panel", aa.panel, "state panel size for the trilemma second-law arm");
  audit->add_option("--format", aa.format, "json | markdown");
  audit->add_option("-o,--output", aa.output, "report file (default stdout)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "seeded property sweeps");
  verify->add_option("--suite", va.suite, "nogo | lemma2_identity | lemma3 | theorem2 | davies")->required();
  verify->add_option("--dim", va.dim, "system dimension (<= 4)");
  verify->add_option("--outcomes", va.outcomes, "number of outcomes (<= 4)");
  verify->add_option("--trials", va.trials, "number of trials (<= 10000)");
  verify->add_option("--seed", va.seed, "64-bit seed");
  verify->add_option("--format", va.format, "json | markdown");
  verify->add_option("-o,--output", va.output, "report file (default stdout)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    std::ostringstream help;
    app.exit(e, help, help);
    out << help.str();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    write_error(err, "UsageError", e.what(), kExitInvalidInput);
    return kExitInvalidInput;
  }

  try {
    const Tolerances tol = resolve_tolerances(tol_flags);
    if (construct->parsed()) return cmd_construct(ca, tol, out);
    if (audit->parsed()) return cmd_audit(aa, tol, out);
    return cmd_verify(va, tol, out);
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    write_error(err, to_string(e.kind()), e.what(), code);
    return code;
  } catch (const nlohmann::json::exception& e) {
    write_error(err, "ParseError", e.what(), kExitInvalidInput);
    return kExitInvalidInput;
  }
}

}  // namespace qmtherm
