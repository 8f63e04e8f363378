#include "rnnv/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <json.hpp>

#include "rnnv/config.hpp"
#include "rnnv/engine.hpp"
#include "rnnv/experiments.hpp"
#include "rnnv/symmetry.hpp"

namespace rnnv {

namespace {

using nlohmann::json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string csv_header(const RunConfig& cfg) {
  return std::string("# ") + kToolName + " v" + kToolVersion + " config=" + config_hash(cfg);
}

// output routing: --out path or the provided stream
class Sink {
public:
  Sink(const std::string& path, std::ostream& fallback) : fallback_(fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : fallback_; }

private:
  std::ostream& fallback_;
  std::ofstream file_;
};

SymmetryNumbers parse_symmetry(const std::string& text) {
  SymmetryNumbers sym;
  char extra = 0;
  if (std::sscanf(text.c_str(), "%d,%d,%d%c", &sym.N, &sym.n, &sym.nu, &extra) != 3)
    throw std::invalid_argument("--sym expects \"N,n,nu\" (got \"" + text + "\")");
  return sym;
}

double total_shift_deg(const RunConfig& cfg) {
  // PulsePol is the riffled R4(3,1) train shifted by -45 degrees overall
  return cfg.sequence.shift_deg + (cfg.sequence.construction == "pulsepol" ? -45.0 : 0.0);
}

TrainBuilder make_builder(const RunConfig& cfg) {
  const SymmetryNumbers sym = cfg.symmetry_numbers();
  const Rational J = Rational::from_decimal(cfg.system.J_hz);
  const ExecutionContext ctx = cfg.execution_context();
  const CompositeKind kind = cfg.composite_kind();
  TrainBuilder base =
      kind == CompositeKind::none
          ? plain_train_builder(sym, cfg.construction_kind(), J, ctx)
          : composite_train_builder(sym, cfg.construction_kind(), J, ctx, kind,
                                    cfg.composite_policy());
  const double shift = total_shift_deg(cfg);
  if (shift == 0.0) return base;
  const Rational shift_rational = Rational::from_decimal(shift);
  return [base, shift_rational](int n) { return phase_shift(base(n), shift_rational); };
}

json phase_to_json(const Phase& phase) {
  // phases are emitted reduced into [0, 360); the reduction is exact rational
  // arithmetic, so equivalent constructions serialize identically
  const Rational base = phase.base_deg - phase.base_deg.floor_to_grid(Rational(360));
  if (phase.acos_coeff.to_double() == 0.0) return base.to_string();
  return json{{"base_deg", base.to_string()},
              {"acos_coeff", phase.acos_coeff.to_string()},
              {"acos_arg", phase.acos_arg}};
}

json sequence_to_json(const PulseSequence& seq, const RunConfig& cfg) {
  json events = json::array();
  for (const Event& event : seq.events) {
    if (const auto* pulse = std::get_if<PulseEvent>(&event)) {
      events.push_back(json{{"type", "pulse"},
                            {"flip_deg", pulse->flip_deg.to_string()},
                            {"phase_deg", phase_to_json(pulse->phase)},
                            {"duration_ns", pulse->duration_ns.to_string()}});
    } else if (const auto* delay = std::get_if<DelayEvent>(&event)) {
      events.push_back(json{{"type", "delay"}, {"duration_ns", delay->duration_ns.to_string()}});
    } else {
      const auto& marker = std::get<FilterMarker>(event);
      events.push_back(json{{"type", "filter"},
                            {"kind", marker.kind == FilterMarker::Kind::T00 ? "T00" : "SOD"},
                            {"m1", marker.m1},
                            {"m2", marker.m2},
                            {"echo_ns", marker.echo_ns.to_string()}});
    }
  }
  return json{{"format", std::string(kToolName) + "-sequence"},
              {"version", kToolVersion},
              {"config", config_hash(cfg)},
              {"label", seq.label},
              {"pulse_count", seq.pulse_count()},
              {"total_duration_ns", seq.total_duration_ns().to_string()},
              {"events", std::move(events)}};
}

void write_json_output(const json& j, const std::string& path, std::ostream& fallback) {
  Sink sink(path, fallback);
  sink.stream() << j.dump(2) << "\n";
}

json config_snapshot(const RunConfig& cfg) {
  json j;
  to_json(j, cfg);
  return json{{"config", std::move(j)}, {"config_hash", config_hash(cfg)}};
}

// ---------------------------------------------------------------- commands --

int cmd_kappa_table(const RunConfig& cfg, const std::vector<std::string>& sym_args,
                    std::ostream& out) {
  std::vector<SymmetryNumbers> symmetries;
  if (sym_args.empty()) {
    symmetries = reference_symmetries();
  } else {
    for (const std::string& text : sym_args) symmetries.push_back(parse_symmetry(text));
  }

  // the closed form holds in the delta-pulse limit; the table always uses it
  ExecutionContext ctx = ExecutionContext::delta_ideal();
  const Rational J = Rational::from_decimal(cfg.system.J_hz);
  const TermQuantumNumbers term{1, 1, 1, 1};

  Sink sink(cfg.output.csv, out);
  std::ostream& os = sink.stream();
  os << csv_header(cfg) << "\n";
  os << "N,n,nu,term,kappa_abs_numeric,kappa_arg_numeric_deg,kappa_abs_closed,"
        "kappa_arg_closed_deg,match\n";

  bool all_match = true;
  for (const SymmetryNumbers& sym : symmetries) {
    sym.validate();
    const PulseSequence element = basic_element_A(sym, J, ctx);
    const ScalingFactor numeric = scaling_factor_numeric(sym, element, term, J, ctx);
    const Complex closed = scaling_factor_delta(sym, Branch::plus);
    const bool match = std::abs(std::abs(numeric.kappa) - std::abs(closed)) <= 0.002;
    all_match = all_match && match;
    os << sym.N << ',' << sym.n << ',' << sym.nu << ',' << csv_quote(term.name()) << ','
       << fmt(std::abs(numeric.kappa)) << ',' << fmt(std::arg(numeric.kappa) * 180.0 / pi)
       << ',' << fmt(std::abs(closed)) << ',' << fmt(std::arg(closed) * 180.0 / pi) << ','
       << (match ? "yes" : "no") << "\n";
  }
  return all_match ? 0 : 4;
}

int cmd_derive(const RunConfig& cfg, const std::string& family, int n_elements,
               std::ostream& out) {
  const ExecutionContext ctx = cfg.execution_context();
  const Rational J = Rational::from_decimal(cfg.system.J_hz);

  PulseSequence seq;
  if (family == "rnnv") {
    cfg.validate();
    seq = make_builder(cfg)(n_elements);
  } else {
    const double theta = cfg.spin_system().theta_ST();
    if (family == "m2s") seq = build_m2s(J, theta, ctx);
    else if (family == "s2m") seq = build_s2m(J, theta, ctx);
    else seq = build_sod(J, theta, ctx);
  }

  write_json_output(sequence_to_json(seq, cfg), cfg.output.json, out);
  return 0;
}

int cmd_simulate(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  const SpinSystem system = cfg.spin_system();
  const ExecutionContext ctx = cfg.execution_context();
  const int n_exc = cfg.protocol.n_exc > 0 ? cfg.protocol.n_exc : cfg.protocol.n_elements;
  const int n_rec = cfg.protocol.n_rec > 0 ? cfg.protocol.n_rec : cfg.protocol.n_elements;

  Sink sink(cfg.output.csv, out);
  std::ostream& os = sink.stream();
  os << csv_header(cfg) << "\n";
  json results;

  if (cfg.protocol.kind == "filter") {
    const TrainBuilder builder = make_builder(cfg);
    const double eff = singlet_filter_protocol(builder, builder, n_exc, n_rec, system, ctx);
    os << "n_exc,n_rec,efficiency\n";
    os << n_exc << ',' << n_rec << ',' << fmt(eff) << "\n";
    results = json{{"protocol", "filter"}, {"n_exc", n_exc}, {"n_rec", n_rec},
                   {"efficiency", eff}};
  } else if (cfg.protocol.kind == "excite") {
    const auto lines =
        st_excitation_protocol(make_builder(cfg), cfg.protocol.n_elements, system, ctx);
    os << "frequency_hz,amplitude_re,amplitude_im,amplitude_abs\n";
    json jlines = json::array();
    for (const auto& line : lines) {
      const double freq_hz = line.frequency / (2.0 * pi);
      os << fmt(freq_hz) << ',' << fmt(line.amplitude.real()) << ','
         << fmt(line.amplitude.imag()) << ',' << fmt(std::abs(line.amplitude)) << "\n";
      jlines.push_back(json{{"frequency_hz", freq_hz},
                            {"amplitude_re", line.amplitude.real()},
                            {"amplitude_im", line.amplitude.imag()}});
    }
    results = json{{"protocol", "excite"},
                   {"n_elements", cfg.protocol.n_elements},
                   {"lines", std::move(jlines)}};
  } else {  // optimal-n
    const OptimalObjective objective = cfg.protocol.objective == "coherence"
                                           ? OptimalObjective::coherence
                                           : OptimalObjective::singlet_order;
    const OptimalN result = optimal_n(cfg.symmetry_numbers(), system, ctx, objective);
    os << "objective,n_best,objective_value,n_closed_coherence,n_closed_singlet_order\n";
    os << cfg.protocol.objective << ',' << result.n_best << ',' << fmt(result.objective)
       << ',' << result.n_closed_coherence << ',' << result.n_closed_singlet_order << "\n";
    results = json{{"protocol", "optimal-n"},
                   {"objective", cfg.protocol.objective},
                   {"n_best", result.n_best},
                   {"objective_value", result.objective},
                   {"objective_max", result.objective_max},
                   {"n_closed_coherence", result.n_closed_coherence},
                   {"n_closed_singlet_order", result.n_closed_singlet_order}};
  }

  if (!cfg.output.json.empty()) {
    json sidecar = config_snapshot(cfg);
    sidecar["results"] = std::move(results);
    write_json_output(sidecar, cfg.output.json, out);
  }
  return 0;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  if (cfg.protocol.kind == "optimal-n")
    throw std::invalid_argument("sweep supports the filter and excite protocols only");

  const SpinSystem system = cfg.spin_system();
  const ExecutionContext base_ctx = cfg.execution_context();
  const TrainBuilder builder = make_builder(cfg);
  const int n_exc = cfg.protocol.n_exc > 0 ? cfg.protocol.n_exc : cfg.protocol.n_elements;
  const int n_rec = cfg.protocol.n_rec > 0 ? cfg.protocol.n_rec : cfg.protocol.n_elements;

  std::vector<double> values;
  if (cfg.sweep.axis == "n_elements") {
    const int lo = static_cast<int>(std::lround(cfg.sweep.from));
    const int hi = static_cast<int>(std::lround(cfg.sweep.to));
    if (lo < 0 || hi < lo) throw std::invalid_argument("sweep range must satisfy 0 <= from <= to");
    for (int v = lo; v <= hi; ++v) values.push_back(v);
  } else {
    const int points = cfg.sweep.points;
    for (int i = 0; i < points; ++i)
      values.push_back(points == 1 ? cfg.sweep.from
                                   : cfg.sweep.from + (cfg.sweep.to - cfg.sweep.from) * i /
                                                          (points - 1));
  }
  std::sort(values.begin(), values.end());

  const bool excite = cfg.protocol.kind == "excite";
  const auto evaluate = [&](double value) -> double {
    ExecutionContext point = base_ctx;
    int ne = n_exc;
    int nr = n_rec;
    if (cfg.sweep.axis == "n_elements") {
      ne = nr = static_cast<int>(std::lround(value));
    } else if (cfg.sweep.axis == "amplitude_scale") {
      point.amplitude_scale = value;
    } else if (cfg.sweep.axis == "offset") {
      point.offset = 2.0 * pi * value;  // Hz at the boundary
    } else {
      point.delay_scale = 1.0 + value;  // relative inter-pulse delay mismatch
    }
    if (excite) {
      const auto lines = st_excitation_protocol(builder, ne, system, point);
      return std::abs(lines.front().amplitude) + std::abs(lines.back().amplitude);
    }
    return singlet_filter_protocol(builder, builder, ne, nr, system, point);
  };

  const SweepResult result =
      run_sweep(cfg.sweep.axis, values, evaluate, canonical_json(cfg), cfg.sweep.jobs);

  const std::string hash = config_hash(cfg);
  Sink sink(cfg.output.csv, out);
  std::ostream& os = sink.stream();
  os << csv_header(cfg) << "\n";
  os << cfg.sweep.axis << ",observable,error,config_hash\n";
  std::size_t failures = 0;
  for (std::size_t i = 0; i < result.axis_values.size(); ++i) {
    const bool failed = !result.point_errors[i].empty();
    failures += failed ? 1 : 0;
    os << fmt(result.axis_values[i]) << ',' << (failed ? "" : fmt(result.observable[i]))
       << ',' << csv_quote(result.point_errors[i]) << ',' << hash << "\n";
  }

  if (!cfg.output.json.empty()) {
    json sidecar = config_snapshot(cfg);
    sidecar["axis"] = cfg.sweep.axis;
    sidecar["axis_values"] = result.axis_values;
    json observables = json::array();
    for (std::size_t i = 0; i < result.observable.size(); ++i) {
      if (result.point_errors[i].empty()) observables.push_back(result.observable[i]);
      else observables.push_back(nullptr);
    }
    sidecar["observables"] = std::move(observables);
    sidecar["point_errors"] = result.point_errors;
    write_json_output(sidecar, cfg.output.json, out);
  }

  return failures == values.size() && !values.empty() ? 4 : 0;
}

// ---------------------------------------------------------------- wiring ----

void add_system_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--J", cfg.system.J_hz, "scalar coupling J (Hz)")
      ->capture_default_str();
  cmd->add_option("--delta", cfg.system.delta_hz, "difference shift (Hz)")
      ->capture_default_str();
  cmd->add_option("--sigma", cfg.system.sigma_hz, "sum shift (Hz)")
      ->capture_default_str();
}

void add_context_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--mode", cfg.context.mode, "pulse mode: delta | finite")
      ->capture_default_str();
  cmd->add_option("--nutation", cfg.context.nutation_hz, "nominal rf nutation (Hz)")
      ->capture_default_str();
  cmd->add_option("--amplitude", cfg.context.amplitude_scale, "rf amplitude scale")
      ->capture_default_str();
  cmd->add_option("--offset", cfg.context.offset_hz, "resonance offset (Hz)")
      ->capture_default_str();
  cmd->add_option("--grid", cfg.context.time_grid_us, "timing grid (us)")
      ->capture_default_str();
  cmd->add_option("--delay-scale", cfg.context.delay_scale, "delay stretch factor")
      ->capture_default_str();
}

void add_sequence_options(CLI::App* cmd, RunConfig& cfg, std::string& sym_text) {
  cmd->add_option("--sym", sym_text, "symmetry numbers N,n,nu");
  cmd->add_option("--construction", cfg.sequence.construction,
                  "standard | riffled | pulsepol")
      ->capture_default_str();
  cmd->add_flag_callback("--standard", [&cfg] { cfg.sequence.construction = "standard"; },
                         "use the standard construction");
  cmd->add_flag_callback("--riffled", [&cfg] { cfg.sequence.construction = "riffled"; },
                         "use the riffled construction");
  cmd->add_flag_callback(
      "--pulsepol", [&cfg] { cfg.sequence.construction = "pulsepol"; },
      "riffled R4(3,1) with a -45 degree overall phase shift");
  cmd->add_option("--element", cfg.sequence.element, "plain | bb1 | asbo11 | sp7")
      ->capture_default_str();
  cmd->add_option("--delay-policy", cfg.sequence.delay_policy,
                  "composite delays: si_table | preserve_taur")
      ->capture_default_str();
  cmd->add_option("--shift", cfg.sequence.shift_deg, "overall phase shift (deg)")
      ->capture_default_str();
}

void apply_symmetry_text(RunConfig& cfg, const std::string& sym_text) {
  if (sym_text.empty()) return;
  const SymmetryNumbers sym = parse_symmetry(sym_text);
  cfg.sequence.N = sym.N;
  cfg.sequence.n = sym.n;
  cfg.sequence.nu = sym.nu;
}

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config expects a file path");
      return args[i + 1];
    }
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    RunConfig cfg;
    if (const auto config_path = find_config_path(args)) cfg = load_config_file(*config_path);

    CLI::App app{std::string(kToolName) +
                 ": symmetry-based singlet-triplet sequence compiler and simulator"};
    app.set_version_flag("--version", std::string(kToolName) + " v" + kToolVersion);
    std::string config_path_opt;
    app.fallthrough();  // let --out/--json/--config appear after the subcommand too
    app.add_option("--config", config_path_opt, "JSON run-config file (loaded first)");
    app.add_option("--out", cfg.output.csv, "CSV output path (default stdout)")
        ->capture_default_str();
    app.add_option("--json", cfg.output.json, "JSON output / sidecar path")
        ->capture_default_str();
    app.require_subcommand(1);

    std::string sym_text;

    CLI::App* kappa = app.add_subcommand(
        "kappa-table", "tabulate numeric and closed-form scaling factors");
    std::vector<std::string> kappa_syms;
    kappa->add_option("--sym", kappa_syms,
                      "symmetry N,n,nu (repeatable; default: the published table)");
    add_system_options(kappa, cfg);

    CLI::App* derive = app.add_subcommand("derive", "compile a pulse sequence to JSON");
    add_system_options(derive, cfg);
    add_context_options(derive, cfg);
    add_sequence_options(derive, cfg, sym_text);
    int derive_elements = 2;
    derive->add_option("--n", derive_elements, "number of R-elements (default one cycle)")
        ->capture_default_str();
    bool want_m2s = false, want_s2m = false, want_sod = false;
    derive->add_flag("--m2s", want_m2s, "magnetization-to-singlet echo train");
    derive->add_flag("--s2m", want_s2m, "singlet-to-magnetization echo train");
    derive->add_flag("--sod", want_sod, "singlet-order destruction block");

    CLI::App* simulate = app.add_subcommand("simulate", "run one protocol");
    add_system_options(simulate, cfg);
    add_context_options(simulate, cfg);
    add_sequence_options(simulate, cfg, sym_text);
    simulate->add_option("--protocol", cfg.protocol.kind, "filter | excite | optimal-n")
        ->capture_default_str();
    simulate->add_option("--n", cfg.protocol.n_elements, "element count")
        ->capture_default_str();
    simulate->add_option("--n-exc", cfg.protocol.n_exc, "excitation elements (0 = --n)")
        ->capture_default_str();
    simulate->add_option("--n-rec", cfg.protocol.n_rec, "reconversion elements (0 = --n)")
        ->capture_default_str();
    simulate->add_option("--objective", cfg.protocol.objective,
                         "optimal-n objective: coherence | singlet_order")
        ->capture_default_str();

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one axis of a protocol");
    add_system_options(sweep, cfg);
    add_context_options(sweep, cfg);
    add_sequence_options(sweep, cfg, sym_text);
    sweep->add_option("--protocol", cfg.protocol.kind, "filter | excite")
        ->capture_default_str();
    sweep->add_option("--n", cfg.protocol.n_elements, "element count")
        ->capture_default_str();
    sweep->add_option("--n-exc", cfg.protocol.n_exc, "excitation elements (0 = --n)")
        ->capture_default_str();
    sweep->add_option("--n-rec", cfg.protocol.n_rec, "reconversion elements (0 = --n)")
        ->capture_default_str();
    std::string axis_text = cfg.sweep.axis;
    sweep->add_option("--axis", axis_text,
                      "n | amplitude | offset (Hz) | delay (relative mismatch)")
        ->capture_default_str();
    sweep->add_option("--from", cfg.sweep.from, "axis start")->capture_default_str();
    sweep->add_option("--to", cfg.sweep.to, "axis end")->capture_default_str();
    sweep->add_option("--points", cfg.sweep.points, "sample count (non-integer axes)")
        ->capture_default_str();
    sweep->add_option("--jobs", cfg.sweep.jobs, "parallel workers (0 = hardware)")
        ->capture_default_str();

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back(kToolName);
    for (const std::string& arg : args) argv.push_back(arg.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out, err);
      return code == 0 ? 0 : 2;
    }

    apply_symmetry_text(cfg, sym_text);

    if (kappa->parsed()) return cmd_kappa_table(cfg, kappa_syms, out);
    if (derive->parsed()) {
      if (want_m2s + want_s2m + want_sod > 1)
        throw std::invalid_argument("--m2s, --s2m and --sod are mutually exclusive");
      const std::string family =
          want_m2s ? "m2s" : want_s2m ? "s2m" : want_sod ? "sod" : "rnnv";
      return cmd_derive(cfg, family, derive_elements, out);
    }
    if (simulate->parsed()) return cmd_simulate(cfg, out);

    // axis aliases at the boundary
    if (axis_text == "n") axis_text = "n_elements";
    else if (axis_text == "amplitude") axis_text = "amplitude_scale";
    else if (axis_text == "delay") axis_text = "delay_mismatch";
    cfg.sweep.axis = axis_text;
    return cmd_sweep(cfg, out);
  } catch (const std::invalid_argument& e) {
    err << kToolName << ": " << e.what() << "\n";
    return 2;
  } catch (const infeasible_error& e) {
    err << kToolName << ": infeasible: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    err << kToolName << ": failure: " << e.what() << "\n";
    return 4;
  }
}

} // namespace rnnv
