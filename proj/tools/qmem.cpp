// qmem: run storage scenarios or .qps sequences, scan delays, validate
// inputs, export scenarios and emit gnuplot scripts.
//
// Exit codes: 0 ok, 1 validation/config error, 2 parse error, 3 numerical failure.

#include "qmem/analysis.hpp"
#include "qmem/config.hpp"
#include "qmem/io.hpp"
#include "qmem/seqdsl.hpp"
#include "qmem/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace qmem;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, invalid = 1, parse = 2, numerical = 3 };

struct ValidationFailed : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SequenceLoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::string scenario;
    std::string seq_path;
    std::string config_path;
    std::string out;
    std::string summary;
    std::string members_out;
    std::string area;
    std::string final_area;
    std::optional<double> delay;
    std::vector<double> delays;
    std::optional<double> lock_time;
    std::optional<double> attenuation;
    std::optional<double> gamma21;
    std::optional<double> rephase_rabi;
    std::optional<double> dt;
    std::string integrator = "exact";
    std::vector<double> retain;
    int threads = 0;
    bool phase_cycle = false;
    bool no_phase_cycle = false;
    bool freeze_lock = false;
    bool cross_validate = false;
    bool timing = false;
    std::string reference = "write_rephased";

    // emit-plot
    std::string trace;
    std::string style = "spin";
};

// "2pi", "2 pi", "pi", "0.5" -> area in units of pi.
double parse_area(std::string s)
{
    s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
    bool has_pi = false;
    for (const std::string suffix : {"pi", "PI", "Pi"}) {
        if (s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0) {
            s.resize(s.size() - suffix.size());
            has_pi = true;
            break;
        }
    }
    if (s.empty() && has_pi) return 1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(v)) throw ValidationFailed("bad pulse area '" + s + "'");
    return v;
}

ScenarioParams params_from(const Options& o, Variant v)
{
    ScenarioParams p;
    p.variant = v;
    if (!o.area.empty()) p.area_pi = parse_area(o.area);
    if (!o.final_area.empty()) p.final_area_pi = parse_area(o.final_area);
    if (o.delay) {
        p.delay_us = *o.delay;
        p.photon_delay_us = *o.delay;
    }
    if (!o.delays.empty()) p.delays = o.delays;
    if (o.lock_time) p.lock_time_us = *o.lock_time;
    if (o.attenuation) p.attenuation = *o.attenuation;
    if (o.gamma21) p.gamma21_khz = *o.gamma21;
    if (o.rephase_rabi) p.rephase_rabi_khz = *o.rephase_rabi;
    if (o.phase_cycle) p.phase_cycle = true;
    if (o.no_phase_cycle) p.phase_cycle = false;
    p.freeze_lock_precession = o.freeze_lock;
    return p;
}

SweepOptions sweep_options(const Options& o)
{
    SweepOptions s;
    if (o.integrator == "rk4")
        s.run.integrator = Integrator::rk4;
    else if (o.integrator != "exact")
        throw ValidationFailed("unknown integrator '" + o.integrator + "'");
    if (o.dt) {
        if (!(*o.dt > 0.0)) throw ValidationFailed("--dt must be positive");
        s.run.dt_us = *o.dt;
    }
    s.retained_deltas = o.retain;
    return s;
}

EfficiencyReference reference_from(const Options& o)
{
    if (o.reference == "write_rephased") return EfficiencyReference::write_rephased;
    if (o.reference == "bit_end") return EfficiencyReference::bit_end;
    throw ValidationFailed("unknown efficiency reference '" + o.reference + "'");
}

PulseSequence read_sequence(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw SequenceLoadError("cannot open sequence file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_sequence(ss.str());
}

// Scenario from --scenario or --seq; --config replaces system and ensemble.
Scenario load_scenario(const Options& o)
{
    std::optional<Config> cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);

    Scenario sc;
    if (!o.seq_path.empty()) {
        PulseSequence seq = read_sequence(o.seq_path);
        LevelSystem sys = cfg ? cfg->system : default_three_level();
        EnsembleSpec ens = cfg ? cfg->ensemble : EnsembleSpec{};
        if (!cfg) ens.shift_target = sys.shift_target;
        if (seq.initial_populations.empty() && cfg) seq.initial_populations = cfg->initial_populations;
        sc = custom_scenario(sys, seq, ens);
        if (o.phase_cycle) sc.phase_cycle = true;
    } else {
        const std::string tag = o.scenario.empty() ? "fig1a" : o.scenario;
        const auto v = variant_from_tag(tag);
        if (!v) throw ValidationFailed("unknown scenario '" + tag + "'");
        sc = build_scenario(params_from(o, *v));
        if (cfg) {
            sc.system = cfg->system;
            sc.ensemble = cfg->ensemble;
            if (!cfg->initial_populations.empty()) sc.sequence.initial_populations = cfg->initial_populations;
        }
    }
    const ValidationReport rep = validate(sc.system, sc.sequence, sc.ensemble);
    for (const auto& is : rep.issues)
        std::cerr << (is.severity == Severity::error ? "error" : "warning") << " [" << is.code << "]: " << is.message
                  << '\n';
    if (!rep.ok()) throw ValidationFailed("validation failed");
    return sc;
}

ojson params_json(const Options& o, const Scenario& sc)
{
    ojson j;
    j["scenario"] = sc.tag;
    if (!o.seq_path.empty()) j["sequence_file"] = o.seq_path;
    if (!o.config_path.empty()) j["config_file"] = o.config_path;
    if (o.seq_path.empty()) {
        const auto v = variant_from_tag(sc.tag);
        const ScenarioParams p = params_from(o, v.value_or(Variant::fig1a));
        if (p.area_pi) j["area_pi"] = *p.area_pi;
        if (sc.tag == "fig2") {
            j["final_area_pi"] = p.final_area_pi;
            j["lock_time_us"] = p.lock_time_us;
            j["freeze_lock_precession"] = p.freeze_lock_precession;
        }
        j["delay_us"] = sc.tag == "fig1b" ? p.photon_delay_us : p.delay_us;
        if (sc.tag == "fig1d") j["delays_us"] = p.delays;
        if (sc.tag == "weak_probe") j["attenuation"] = p.attenuation;
        j["rephase_rabi_khz"] = p.rephase_rabi_khz;
    }
    j["initial_populations"] = sc.sequence.initial_populations;
    j["gamma21_khz"] = sc.system.dephasing(2, 1);
    j["ensemble"] = {{"fwhm_khz", sc.ensemble.fwhm_khz},
                     {"spacing_khz", sc.ensemble.spacing_khz},
                     {"truncation_khz", sc.ensemble.truncation_khz},
                     {"shift_target", sc.ensemble.shift_target}};
    j["integrator"] = o.integrator;
    if (o.integrator == "rk4") j["dt_us"] = o.dt.value_or(RunOptions{}.dt_us);
    j["phase_cycle"] = sc.phase_cycle;
    j["efficiency_reference"] = o.reference;
    return j;
}

ojson echo_json(const Echo& e)
{
    ojson j;
    if (!e.label.empty()) j["label"] = e.label;
    j["time_us"] = e.time;
    j["amplitude"] = e.amplitude;
    if (e.efficiency) j["efficiency"] = *e.efficiency;
    return j;
}

ojson report_json(const EchoReport& r)
{
    ojson j;
    j["echoes"] = ojson::array();
    for (const auto& e : r.echoes) j["echoes"].push_back(echo_json(e));
    j["order"] = ojson::array();
    for (const auto& e : r.echoes) j["order"].push_back(e.label);
    j["time_reversed"] = r.time_reversed;
    j["unmatched"] = ojson::array();
    for (const auto& e : r.unmatched) j["unmatched"].push_back(echo_json(e));
    return j;
}

ojson efficiencies_json(const std::vector<BitEfficiency>& effs)
{
    ojson a = ojson::array();
    for (const auto& b : effs)
        a.push_back({{"label", b.label},
                     {"expected_time_us", b.expected_time},
                     {"echo_time_us", b.echo_time},
                     {"amplitude", b.amplitude},
                     {"reference", b.reference},
                     {"efficiency", b.efficiency},
                     {"storage_time_us", b.storage_time}});
    return a;
}

ojson fit_json(const FitResult& f)
{
    ojson j;
    j["amplitude"] = f.amplitude;
    j["tau_us"] = f.converged ? ojson(f.tau_us) : ojson(nullptr);
    j["r2"] = f.r2;
    j["converged"] = f.converged;
    j["points"] = f.points;
    return j;
}

ojson phase_json(const PhaseReport& r)
{
    return {{"re_recovery_error", r.re_recovery_error},
            {"im_reversal_error", r.im_reversal_error},
            {"im_recovery_error", r.im_recovery_error},
            {"swap_error", r.swap_error}};
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

void write_members(const std::string& path, const EnsembleTrace& tr)
{
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "t_us,delta_khz,re_rho12,im_rho12,re_rho13,im_rho13\n";
    for (const auto& m : tr.retained)
        for (std::size_t i = 0; i < m.times.size(); ++i) {
            const Matrix& r = m.states[i];
            out << format_number(m.times[i]) << ',' << format_number(m.delta_khz) << ','
                << format_number(r(0, 1).real()) << ',' << format_number(r(0, 1).imag()) << ','
                << format_number(r(0, 2).real()) << ',' << format_number(r(0, 2).imag()) << '\n';
        }
}

double max_echo_near_expected(const Scenario& sc, const EnsembleTrace& tr)
{
    const Timeline tl = sc.timeline();
    const auto ch = echo_channel(tr, sc.observable);
    double best = 0.0;
    for (const auto& b : bits_of(tl))
        best = std::max(best, peak_near(tr.times, ch, expected_echo_time(tl, b), 0.5 * (b.end - b.start)).amplitude);
    return best;
}

struct ScanOutcome {
    ojson summary;
    std::string csv;
    FitResult fit;
};

ScanOutcome run_scan(const Options& o, EfficiencyReference ref, const SweepOptions& sopt)
{
    ScenarioParams p = params_from(o, Variant::fig1d);
    if (p.delays.size() < 2) throw ValidationFailed("a scan needs at least two delays");
    std::vector<Scenario> scs = delay_scan(p);
    std::optional<Config> cfg;
    if (!o.config_path.empty()) cfg = load_config(o.config_path);

    std::ostringstream csv;
    csv << "delay_us,label,echo_time_us,storage_time_us,efficiency\n";
    std::vector<FitPoint> pts;
    ojson per = ojson::array();
    std::vector<std::vector<double>> windows;
    for (auto& sc : scs) {
        if (cfg) {
            sc.system = cfg->system;
            sc.ensemble = cfg->ensemble;
        }
        const ValidationReport rep = validate(sc.system, sc.sequence, sc.ensemble);
        if (!rep.ok()) throw ValidationFailed("validation failed for scan scenario");
        const EnsembleTrace tr = simulate(sc, sopt);
        const auto effs = bit_efficiencies(sc, tr, ref);
        const double delay = sc.timeline().require_marker("rephase_start");
        for (const auto& b : effs) {
            csv << format_number(delay) << ',' << b.label << ',' << format_number(b.echo_time) << ','
                << format_number(b.storage_time) << ',' << format_number(b.efficiency) << '\n';
            pts.push_back({b.storage_time, b.efficiency});
        }
        if (!effs.empty()) {
            const double tau = data_pulse_length(sc.timeline());
            windows.push_back(echo_window(tr.times, echo_channel(tr, sc.observable), effs.front().echo_time, tau));
        }
        per.push_back({{"delay_us", delay}, {"efficiencies", efficiencies_json(effs)}});
    }

    ScanOutcome out;
    out.csv = csv.str();
    out.fit = fit_exponential(pts);
    out.summary["scenario"] = "fig1d";
    out.summary["delays_us"] = p.delays;
    out.summary["gamma21_khz"] = scs.front().system.dephasing(2, 1);
    out.summary["efficiency_reference"] = o.reference;
    out.summary["scan"] = per;
    out.summary["fit"] = fit_json(out.fit);
    out.summary["t2_expected_us"] = coherence_time_us(scs.front().system.dephasing(2, 1));
    if (windows.size() >= 2) out.summary["shape_deviation"] = shape_similarity({windows.front(), windows.back()});
    return out;
}

int cmd_scan(const Options& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const ScanOutcome s = run_scan(o, reference_from(o), sweep_options(o));
    ojson sum = s.summary;
    if (o.timing)
        sum["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.out.empty()) write_text(o.out, s.csv);
    if (!o.summary.empty()) write_text(o.summary, sum.dump(2) + "\n");
    if (s.fit.converged)
        std::cout << "tau_fit_us " << format_number(s.fit.tau_us) << "  r2 " << format_number(s.fit.r2) << '\n';
    else
        std::cout << "fit did not find a decay  r2 " << format_number(s.fit.r2) << '\n';
    return Exit::ok;
}

int cmd_run(const Options& o)
{
    if (o.seq_path.empty() && o.scenario == "fig1d") return cmd_scan(o);
    if (o.seq_path.empty() && o.scenario == "custom") throw ValidationFailed("scenario 'custom' needs --seq");

    const auto t0 = std::chrono::steady_clock::now();
    const Scenario sc = load_scenario(o);
    const EfficiencyReference ref = reference_from(o);
    const SweepOptions sopt = sweep_options(o);
    const EnsembleTrace tr = simulate(sc, sopt);
    const Timeline tl = sc.timeline();

    ojson sum;
    sum["scenario"] = sc.tag;
    sum["parameters"] = params_json(o, sc);

    const bool has_bits = !bits_of(tl).empty() && tl.marker("rephase_start") && tl.marker("rephase_end");
    if (has_bits) {
        sum["echo_report"] = report_json(analyze_echoes(sc, tr, {}, ref));
        sum["efficiencies"] = efficiencies_json(bit_efficiencies(sc, tr, ref));
    } else {
        const auto ch = echo_channel(tr, sc.observable);
        sum["echo_report"] = report_json(detect_echoes(tr.times, ch, tl.marker("rephase_end").value_or(0.0),
                                                       tl.duration));
    }

    if (sc.tag == "fig1b" && has_bits) {
        const double amp = max_echo_near_expected(sc, tr);
        ojson pi;
        pi["echo_amplitude"] = amp;
        ScenarioParams p = params_from(o, Variant::fig1b);
        if (p.area_pi.value_or(1.0) != 1.0) {
            p.area_pi = 1.0;
            const Scenario ref_sc = build_scenario(p);
            const double ref_amp = max_echo_near_expected(ref_sc, simulate(ref_sc, sopt));
            pi["pi_reference_amplitude"] = ref_amp;
            pi["ratio_to_pi"] = ref_amp > 0.0 ? ojson(amp / ref_amp) : ojson(nullptr);
        }
        sum["photon_echo"] = pi;
    }

    const TimeTrace* plus = nullptr;
    const TimeTrace* minus = nullptr;
    for (const auto& m : tr.retained)
        if (m.delta_khz > 0.0 && tr.member(-m.delta_khz)) {
            plus = &m;
            minus = tr.member(-m.delta_khz);
            break;
        }
    if (plus && tl.marker("rephase_start") && tl.marker("rephase_end")) {
        ojson ph;
        ph["delta_khz"] = plus->delta_khz;
        if (sc.tag != "fig2")
            ph["rephasing"] = phase_json(
                phase_diagnostics(*plus, *minus, tl.require_marker("rephase_start"), tl.require_marker("rephase_end")));
        if (tl.marker("piR_end") && tl.marker("piA2_end"))
            ph["aux_pair"] = phase_json(
                phase_diagnostics(*plus, *minus, tl.require_marker("piR_end"), tl.require_marker("piA2_end")));
        sum["phase_diagnostics"] = ph;
    }

    ojson diag;
    diag["max_trace_drift"] = tr.max_trace_drift;
    diag["max_hermiticity_error"] = tr.max_hermiticity_error;
    if (o.cross_validate) {
        const double d = o.retain.empty() ? 10.0 : o.retain.front();
        diag["cross_validation_delta_khz"] = d;
        diag["cross_validation_dt_us"] = sopt.run.dt_us;
        diag["cross_validation_deviation"] = cross_validate(sc.system, sc.sequence, d, sopt.run.dt_us, sopt.run);
    }
    sum["diagnostics"] = diag;

    ojson warnings = ojson::array();
    for (const auto& w : build_grid(sc.ensemble).warnings) warnings.push_back(w);
    for (const auto& is : validate(sc.system, sc.sequence, sc.ensemble).issues) warnings.push_back(is.message);
    sum["warnings"] = warnings;
    if (o.timing)
        sum["wall_time_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!o.out.empty()) write_trace_csv(o.out, tr);
    if (!o.members_out.empty()) write_members(o.members_out, tr);
    if (!o.summary.empty())
        write_text(o.summary, sum.dump(2) + "\n");
    else if (o.out.empty())
        std::cout << sum.dump(2) << '\n';
    return Exit::ok;
}

int cmd_validate(const Options& o)
{
    if (o.config_path.empty() && o.seq_path.empty() && o.scenario.empty())
        throw ValidationFailed("nothing to validate: give --config, --seq or --scenario");
    if (o.seq_path.empty() && o.scenario.empty()) {
        const Config c = load_config(o.config_path);
        ValidationReport rep = validate_system(c.system);
        rep.merge(validate_ensemble(c.ensemble));
        PulseSequence empty;
        empty.initial_populations = c.initial_populations;
        rep.merge(validate_sequence(c.system, empty));
        for (const auto& is : rep.issues)
            std::cerr << (is.severity == Severity::error ? "error" : "warning") << " [" << is.code
                      << "]: " << is.message << '\n';
        if (!rep.ok()) return Exit::invalid;
    } else {
        load_scenario(o);
    }
    std::cout << "ok\n";
    return Exit::ok;
}

int cmd_export(const Options& o)
{
    const Scenario sc = load_scenario(o);
    write_text(o.out, format_sequence(sc.sequence));
    if (!o.summary.empty()) {
        Config c{sc.system, sc.ensemble, sc.sequence.initial_populations};
        write_text(o.summary, config_to_json(c));
    }
    return Exit::ok;
}

int cmd_emit_plot(const Options& o)
{
    const auto header = read_csv_header(o.trace);
    write_text(o.out, plot_script(o.trace, header, o.style));
    return Exit::ok;
}

void add_common(CLI::App* c, Options& o)
{
    std::string tags;
    for (auto t : variant_tags()) tags += (tags.empty() ? "" : ", ") + std::string(t);
    c->add_option("--scenario", o.scenario, "Scenario tag: " + tags);
    c->add_option("--seq", o.seq_path, "Pulse sequence file (.qps)");
    c->add_option("--config", o.config_path, "System/ensemble JSON config");
    c->add_option("--area", o.area, "Rephasing area, e.g. 2pi or 2");
    c->add_option("--final-area", o.final_area, "Final Raman area of the locking sequence (fig2)");
    c->add_option("--delay", o.delay, "Rephasing pulse start, us");
    c->add_option("--delays", o.delays, "Comma-separated delays for scans, us")->delimiter(',');
    c->add_option("--lock-time", o.lock_time, "Lock window length T, us (fig2)");
    c->add_option("--attenuation", o.attenuation, "Probe attenuation factor (weak_probe)");
    c->add_option("--gamma21", o.gamma21, "Spin dephasing width gamma21, kHz");
    c->add_option("--rephase-rabi", o.rephase_rabi, "Generalized Rabi frequency of rephasing pulses, kHz");
    c->add_option("--dt", o.dt, "RK4 step, us");
    c->add_option("--integrator", o.integrator, "exact | rk4")->check(CLI::IsMember({"exact", "rk4"}));
    c->add_option("--retain-delta", o.retain, "Keep the full trace of this member, kHz (repeatable)");
    c->add_option("--threads", o.threads, "Worker cap (0: OpenMP default)");
    c->add_flag("--phase-cycle", o.phase_cycle, "Two-step probe phase cycling");
    c->add_flag("--no-phase-cycle", o.no_phase_cycle, "Disable phase cycling (weak_probe default is on)");
    c->add_flag("--freeze-lock-precession", o.freeze_lock,
                "Also freeze the inhomogeneous spin precession during the lock window (fig2)");
    c->add_option("--efficiency-reference", o.reference, "write_rephased | bit_end")
        ->check(CLI::IsMember({"write_rephased", "bit_end"}));
    c->add_flag("--timing", o.timing, "Add wall time to the summary (breaks byte-identical output)");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"qmem: ensemble density-matrix simulator for Raman spin-echo storage"};
    app.require_subcommand(1);
    Options o;

    auto* run = app.add_subcommand("run", "Run a scenario or a sequence file");
    add_common(run, o);
    run->add_option("--out", o.out, "Trace CSV");
    run->add_option("--summary", o.summary, "Summary JSON");
    run->add_option("--members-out", o.members_out, "CSV of retained member coherences");
    run->add_flag("--cross-validate", o.cross_validate, "Compare RK4 against the exact propagator for one member");

    auto* scan = app.add_subcommand("scan", "Delay scan with exponential fit");
    add_common(scan, o);
    scan->add_option("--out", o.out, "Per-delay efficiencies CSV");
    scan->add_option("--summary", o.summary, "Summary JSON");

    auto* val = app.add_subcommand("validate", "Check a config and/or sequence without running");
    add_common(val, o);

    auto* exp = app.add_subcommand("export", "Write a scenario as a .qps sequence and a JSON config");
    add_common(exp, o);
    exp->add_option("--out", o.out, "Sequence path (default stdout)");
    exp->add_option("--config-out", o.summary, "Config JSON path");

    auto* plot = app.add_subcommand("emit-plot", "Write a gnuplot script for a trace CSV");
    plot->add_option("--trace", o.trace, "Trace CSV")->required();
    plot->add_option("--style", o.style, "spin | photon | populations");
    plot->add_option("--out", o.out, "Script path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    if (o.threads < 0) {
        std::cerr << "error: --threads must be >= 0\n";
        return Exit::invalid;
    }
    if (o.threads > 0) omp_set_num_threads(o.threads);

    try {
        if (run->parsed()) return cmd_run(o);
        if (scan->parsed()) return cmd_scan(o);
        if (val->parsed()) return cmd_validate(o);
        if (exp->parsed()) return cmd_export(o);
        return cmd_emit_plot(o);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return Exit::parse;
    } catch (const SequenceLoadError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::parse;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << " (delta " << e.delta_khz << " kHz, t " << e.t_us
                  << " us)\n";
        return Exit::numerical;
    } catch (const ValidationFailed& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::invalid;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return Exit::invalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::invalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return Exit::invalid;
    }
}
