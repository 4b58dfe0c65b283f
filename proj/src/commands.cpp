#include "cavpass/commands.hpp"

#include "cavpass/darkstates.hpp"
#include "cavpass/version.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <vector>

namespace cavpass {

namespace {

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

ordered_json matrix_json(const Eigen::Matrix4cd& m, bool imag)
{
    ordered_json rows = ordered_json::array();
    for (int i = 0; i < 4; ++i) {
        ordered_json row = ordered_json::array();
        for (int j = 0; j < 4; ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json diagnostics_json(const ScheduleDiagnostics& d)
{
    ordered_json j;
    j["flags"] = d.flags;
    j["min_pulse_area"] = d.min_pulse_area;
    j["min_g"] = d.min_g;
    j["max_omega"] = d.max_omega;
    j["steps"] = ordered_json::array();
    for (const auto& s : d.steps)
        j["steps"].push_back({{"label", s.label},
                              {"counterintuitive_ok", s.counterintuitive_ok},
                              {"stokes_area", s.stokes_area},
                              {"pump_area", s.pump_area},
                              {"overlap_to_next", s.overlap_to_next}});
    return j;
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const Schedule& schedule, const std::string& protocol,
                          const std::string& abort_note)
{
    const Basis& basis = *traj.basis;

    // columns: states whose population ever exceeds 1e-6, in basis order
    std::vector<int> cols;
    for (size_t k = 0; k < traj.subspace.size(); ++k) {
        double peak = 0.0;
        for (const auto& psi : traj.states)
            peak = std::max(peak, std::norm(psi[static_cast<Eigen::Index>(k)]));
        if (peak >= 1e-6) cols.push_back(static_cast<int>(k));
    }

    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# cavpass " << kVersion << " trajectory\n";
    out << "# protocol: " << protocol << "\n";
    out << "# units: time in Tp, Rabi frequencies in 1/Tp\n";
    for (size_t p = 0; p < schedule.pulses.size(); ++p) {
        const Pulse& pulse = schedule.pulses[p];
        out << "# pulse omega_" << p + 1 << ": " << pulse.label << " [atom " << pulse.atom
            << ", " << transition_name(pulse.transition) << ", phase " << num(pulse.phase)
            << "]\n";
    }
    if (!abort_note.empty()) out << "# " << abort_note << "\n";

    out << "t";
    for (int k : cols)
        out << ",pop:" << state_label(basis.state(traj.subspace[static_cast<size_t>(k)]));
    for (size_t p = 0; p < schedule.pulses.size(); ++p) out << ",omega_" << p + 1;
    out << ",norm\n";

    for (int s = 0; s < traj.sample_count(); ++s) {
        double t = traj.times[static_cast<size_t>(s)];
        out << num(t);
        const auto& psi = traj.states[static_cast<size_t>(s)];
        for (int k : cols) out << ',' << num(std::norm(psi[k]));
        for (const auto& pulse : schedule.pulses) out << ',' << num(pulse.value(t));
        out << ',' << num(traj.norms[static_cast<size_t>(s)]) << "\n";
    }
}

struct Targets {
    bool has_target{false};
    Eigen::Matrix4cd matrix;
    std::string name{"none"};
};

Targets target_for(const std::string& protocol)
{
    Targets t;
    if (protocol == "swap8" || protocol == "swap7") {
        t = {true, swap_target(), "swap"};
    } else if (protocol == "cnot11") {
        t = {true, cnot_target(), "cnot"};
    }
    return t;
}

}  // namespace

int simulate_cmd(const RunConfig& config, const std::filesystem::path& out_dir,
                 bool assert_mode, std::ostream& log, std::ostream& err)
{
    Schedule schedule;
    std::optional<Basis> basis;
    StateVector psi0;
    try {
        schedule = config.make_schedule();
        bool include_u = config.effective_include_u(schedule);
        if (schedule.uses_u() && !include_u) {
            err << "config: schedule drives |u> but basis.include_u is false\n";
            return kExitConfig;
        }
        basis.emplace(config.n_max, include_u);
        psi0 = config.initial_vector(*basis);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    ScheduleDiagnostics diag = schedule_diagnostics(schedule);
    for (const auto& flag : diag.flags) log << "warning: " << flag << "\n";

    std::filesystem::create_directories(out_dir);
    TimeGrid grid{schedule.t_start, schedule.t_end, config.dt_tp, config.sample_stride};
    LossParams loss = config.loss();

    Trajectory traj;
    try {
        traj = propagate(psi0, schedule, grid, loss);
    } catch (const IntegrationError& e) {
        write_trajectory_csv(out_dir / "trajectory.csv", e.partial, schedule, config.protocol,
                             std::string("integration aborted at t = ") +
                                 num(e.failure_time) + "; rows below are the sampled prefix");
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    write_trajectory_csv(out_dir / "trajectory.csv", traj, schedule, config.protocol, "");

    Targets target = target_for(config.protocol);
    GateResult result;
    try {
        result = analyze_gate(*basis, schedule, grid,
                              target.has_target ? target.matrix : identity_target(),
                              target.name, loss);
    } catch (const IntegrationError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kExitNumeric;
    }

    ordered_json report;
    report["tool"] = {{"name", "cavpass"}, {"version", kVersion}};
    report["protocol"] = config.protocol;
    report["target"] = target.name;
    if (target.has_target) {
        report["fidelity"] = result.fidelity;
        report["truth_table_fidelity"] = result.truth_table;
    } else {
        report["fidelity"] = nullptr;
        report["truth_table_fidelity"] = nullptr;
    }
    Eigen::Matrix4cd anchored = anchor_phase(result.gate.matrix);
    report["gate_matrix_re"] = matrix_json(anchored, false);
    report["gate_matrix_im"] = matrix_json(anchored, true);
    report["leakage"] = result.gate.leakage;
    report["norm_loss"] = result.gate.norm_loss;
    report["exposure"] = {
        {"max_e_population", result.exposure.max_e_population},
        {"max_u_population", result.exposure.max_u_population},
        {"max_photon_expectation", result.exposure.max_photon_expectation},
        {"integrated_e_population", result.exposure.integrated_e_population}};

    ordered_json finals = ordered_json::object();
    int last = traj.sample_count() - 1;
    for (size_t k = 0; k < traj.subspace.size(); ++k) {
        double pop = std::norm(traj.states[static_cast<size_t>(last)][static_cast<Eigen::Index>(k)]);
        if (pop >= 1e-6) finals[state_label(traj.basis->state(traj.subspace[k]))] = pop;
    }
    report["trajectory"] = {
        {"initial_state",
         config.initial_amplitudes.empty() ? json(config.initial_state) : json("superposition")},
        {"max_norm_drift", traj.max_norm_drift()},
        {"final_norm", traj.norms.back()},
        {"final_populations", std::move(finals)}};
    report["diagnostics"] = diagnostics_json(diag);
    report["config"] = config_to_json(config);

    std::ofstream jf(out_dir / "gate.json");
    if (!jf) {
        err << "cannot write " << (out_dir / "gate.json").string() << "\n";
        return kExitConfig;
    }
    jf << report.dump(2) << "\n";

    log << "simulate: protocol " << config.protocol << ", " << schedule.pulses.size()
        << " pulses, " << schedule.steps.size() << " steps\n";
    if (target.has_target)
        log << "simulate: fidelity(" << target.name << ") = " << num(result.fidelity)
            << ", truth-table = " << num(result.truth_table) << "\n";

    if (assert_mode) {
        std::vector<std::string> violations;
        if (!diag.ok()) violations.push_back("schedule diagnostics raised flags");
        if (!loss.any() && traj.max_norm_drift() > 1e-8)
            violations.push_back("norm drift " + num(traj.max_norm_drift()) + " > 1e-8");
        if (config.protocol == "swap8" || config.protocol == "swap7") {
            if (result.fidelity < 0.99)
                violations.push_back("fidelity " + num(result.fidelity) + " < 0.99");
        } else if (config.protocol == "cnot11") {
            if (result.truth_table < 0.98)
                violations.push_back("truth-table fidelity " + num(result.truth_table) +
                                     " < 0.98");
        }
        if (!violations.empty()) {
            for (const auto& v : violations) err << "assert: " << v << "\n";
            return kExitAssert;
        }
    }
    return kExitOk;
}

int scan_cmd(const RunConfig& config, const std::filesystem::path& out_dir, bool assert_mode,
             std::ostream& log, std::ostream& err)
{
    if (config.protocol == "custom") {
        err << "config error: scan requires a named protocol\n";
        return kExitConfig;
    }
    if (config.scan_axes.size() > 3) {
        err << "config error: scan supports at most 3 axes, got "
            << config.scan_axes.size() << "\n";
        return kExitConfig;
    }
    Protocol protocol;
    std::vector<ScanRow> rows;
    try {
        protocol = protocol_from_name(config.protocol);
        rows = parameter_scan(protocol, config.schedule_params(), config.scan_axes,
                              config.loss(), config.dt_tp);
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir / "scan.csv");
    if (!out) {
        err << "cannot write " << (out_dir / "scan.csv").string() << "\n";
        return kExitConfig;
    }
    out << "# cavpass " << kVersion << " scan\n";
    out << "# protocol: " << config.protocol << "\n";
    for (const auto& axis : config.scan_axes) out << axis.name << ",";
    out << "fidelity,truth_table_fidelity,max_leakage,max_e_population,max_photon,"
           "norm_loss,status\n";
    for (const auto& row : rows) {
        for (double v : row.values) out << num(v) << ",";
        out << num(row.fidelity) << ',' << num(row.truth_table) << ','
            << num(row.max_leakage) << ',' << num(row.max_e_population) << ','
            << num(row.max_photon) << ',' << num(row.norm_loss) << ',' << row.status << "\n";
    }
    log << "scan: " << rows.size() << " points written\n";

    if (assert_mode) {
        for (size_t i = 0; i < rows.size(); ++i)
            if (rows[i].status != "ok") {
                err << "assert: scan point " << i << " failed: " << rows[i].status << "\n";
                return kExitAssert;
            }
    }
    return kExitOk;
}

int darkstates_cmd(const RunConfig& config, const std::filesystem::path& out_dir,
                   bool assert_mode, std::ostream& log, std::ostream& err)
{
    Schedule schedule;
    std::optional<Basis> basis;
    try {
        schedule = config.make_schedule();
        basis.emplace(config.n_max, config.effective_include_u(schedule));
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    const double sample_dt = 1e-3;
    ordered_json report;
    report["tool"] = {{"name", "cavpass"}, {"version", kVersion}};
    report["protocol"] = config.protocol;
    report["sample_dt_tp"] = sample_dt;
    report["steps"] = ordered_json::array();

    bool tracking_failed = false;
    double failure_time = 0.0;
    std::vector<std::string> violations;

    for (const auto& step : schedule.steps) {
        ordered_json js;
        js["label"] = step.label;
        js["kind"] = step.kind == StepKind::cavity_exchange ? "cavity" : "shelving";
        if (step.kind != StepKind::cavity_exchange || !step.roles) {
            js["note"] = "no analytic dark-state analysis for shelving steps";
            report["steps"].push_back(std::move(js));
            continue;
        }
        js["roles"] = {{"L1", std::string(1, level_letter(step.roles->laser1))},
                       {"L2", std::string(1, level_letter(step.roles->laser2))}};
        js["blocks"] = ordered_json::array();
        for (int charge : {-1, 0}) {
            StepDarkAnalysis a = analyze_step_block(*basis, schedule, step, charge, sample_dt);
            ordered_json jb;
            jb["charge"] = charge;
            jb["window_tp"] = {a.window_start, a.window_end};
            jb["tracking_ok"] = a.tracking_ok;
            if (!a.tracking_ok) {
                jb["failure_time_tp"] = a.failure_time;
                tracking_failed = true;
                failure_time = a.failure_time;
            } else {
                jb["max_kernel_residual"] = a.max_kernel_residual;
                jb["min_gap"] = a.min_gap;
                jb["dark_dim"] = {a.dark_dim_min, a.dark_dim_max};
                jb["max_connection"] = a.max_connection;
                jb["geometric_phase_rad"] = a.geometric_phase;
                jb["dynamical_phase_rad"] = a.dynamical_phase;
                jb["start_state"] = a.start_label;
                jb["end_state"] = a.end_label;
                jb["start_overlap"] = a.start_overlap;
                jb["end_overlap"] = a.end_overlap;
                if (assert_mode) {
                    if (a.max_kernel_residual > 1e-10)
                        violations.push_back("step " + step.label + " charge " +
                                             std::to_string(charge) + ": kernel residual " +
                                             num(a.max_kernel_residual) + " > 1e-10");
                    if (std::abs(a.geometric_phase) > 1e-4)
                        violations.push_back("step " + step.label + ": |geometric phase| " +
                                             num(std::abs(a.geometric_phase)) + " > 1e-4");
                    if (std::abs(a.dynamical_phase) > 1e-8)
                        violations.push_back("step " + step.label + ": |dynamical phase| " +
                                             num(std::abs(a.dynamical_phase)) + " > 1e-8");
                    if (a.start_overlap < 0.999 || a.end_overlap < 0.999)
                        violations.push_back("step " + step.label +
                                             ": endpoint overlap below 0.999");
                }
            }
            js["blocks"].push_back(std::move(jb));
        }
        report["steps"].push_back(std::move(js));
    }
    report["config"] = config_to_json(config);

    std::filesystem::create_directories(out_dir);
    std::ofstream jf(out_dir / "darkstates.json");
    if (!jf) {
        err << "cannot write " << (out_dir / "darkstates.json").string() << "\n";
        return kExitConfig;
    }
    jf << report.dump(2) << "\n";
    log << "darkstates: report written\n";

    if (tracking_failed) {
        err << "numerical failure: dark-state tracking lost continuity at t = "
            << num(failure_time) << "\n";
        return kExitNumeric;
    }
    if (assert_mode && !violations.empty()) {
        for (const auto& v : violations) err << "assert: " << v << "\n";
        return kExitAssert;
    }
    return kExitOk;
}

int estimate_cmd(double intensity, double t_p, double gamma,
                 const std::optional<std::filesystem::path>& json_path, std::ostream& log,
                 std::ostream& err)
{
    PhysicalEstimate e;
    try {
        e = physical_estimates(intensity, t_p, gamma);
    } catch (const std::exception& ex) {
        err << "config error: " << ex.what() << "\n";
        return kExitConfig;
    }
    log << "metastable He 2^3S1 - 2^3P0 estimates\n";
    log << "  intensity I              = " << num(e.intensity) << " W/cm^2\n";
    log << "  Rabi Omega_max           = " << num(e.rabi) << " s^-1   (1e8 sqrt(I))\n";
    log << "  Stark shift S            = " << num(e.stark) << " s^-1   (upper estimate 100 I)\n";
    log << "  pulse width Tp           = " << num(e.t_p) << " s\n";
    log << "  linewidth Gamma          = " << num(e.gamma) << " s^-1\n";
    log << "  Omega_max Tp             = " << num(e.pulse_area()) << "\n";
    log << "  Gamma Tp                 = " << num(e.gamma_tp()) << "\n";
    log << "  (Omega Tp)^2/(Gamma Tp)  = " << num(e.adiabatic_loss_ratio()) << "\n";
    log << "  S Tp                     = " << num(e.stark_phase()) << "\n";

    if (json_path) {
        std::filesystem::path parent = json_path->parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        ordered_json j;
        j["tool"] = {{"name", "cavpass"}, {"version", kVersion}};
        j["intensity_W_cm2"] = e.intensity;
        j["rabi_s"] = e.rabi;
        j["stark_s"] = e.stark;
        j["t_p_s"] = e.t_p;
        j["gamma_s"] = e.gamma;
        j["pulse_area"] = e.pulse_area();
        j["gamma_tp"] = e.gamma_tp();
        j["adiabatic_loss_ratio"] = e.adiabatic_loss_ratio();
        j["stark_phase"] = e.stark_phase();
        std::ofstream jf(*json_path);
        if (!jf) {
            err << "cannot write " << json_path->string() << "\n";
            return kExitConfig;
        }
        jf << j.dump(2) << "\n";
    }
    return kExitOk;
}

}  // namespace cavpass
