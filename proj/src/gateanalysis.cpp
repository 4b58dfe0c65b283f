#include "cavpass/gateanalysis.hpp"

#include <cmath>
#include <future>
#include <stdexcept>
#include <thread>

namespace cavpass {

namespace {

Eigen::Matrix4cd permutation(std::array<int, 4> image)
{
    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    for (int j = 0; j < 4; ++j) m(image[static_cast<size_t>(j)], j) = 1.0;
    return m;
}

}  // namespace

Eigen::Matrix4cd swap_target() { return permutation({0, 2, 1, 3}); }
Eigen::Matrix4cd cnot_target() { return permutation({0, 1, 3, 2}); }
Eigen::Matrix4cd identity_target() { return Eigen::Matrix4cd::Identity(); }

Eigen::Matrix4cd protocol_target(Protocol p)
{
    return p == Protocol::cnot11 ? cnot_target() : swap_target();
}

std::string protocol_target_name(Protocol p)
{
    return p == Protocol::cnot11 ? "cnot" : "swap";
}

double gate_fidelity(const Eigen::Matrix4cd& gate, const Eigen::Matrix4cd& target)
{
    return std::abs((target.adjoint() * gate).trace()) / 4.0;
}

double truth_table_fidelity(const Eigen::Matrix4cd& gate,
                            const Eigen::Matrix4cd& target_permutation)
{
    double f = 0.0;
    for (int j = 0; j < 4; ++j) {
        int row = 0;
        double best = 0.0;
        for (int i = 0; i < 4; ++i) {
            double a = std::abs(target_permutation(i, j));
            if (a > best) {
                best = a;
                row = i;
            }
        }
        f += std::norm(gate(row, j));
    }
    return f / 4.0;
}

ExposureMetrics exposure_metrics(const Trajectory& trajectory)
{
    ExposureMetrics m;
    double prev_t = 0.0, prev_e = 0.0;
    for (int k = 0; k < trajectory.sample_count(); ++k) {
        double pe = trajectory.level_population(k, AtomLevel::e);
        double pu = trajectory.level_population(k, AtomLevel::u);
        double pn = trajectory.photon_expectation(k);
        m.max_e_population = std::max(m.max_e_population, pe);
        m.max_u_population = std::max(m.max_u_population, pu);
        m.max_photon_expectation = std::max(m.max_photon_expectation, pn);
        if (k > 0)
            m.integrated_e_population += 0.5 * (pe + prev_e) * (trajectory.times[k] - prev_t);
        prev_t = trajectory.times[static_cast<size_t>(k)];
        prev_e = pe;
    }
    return m;
}

GateResult analyze_gate(const Basis& basis, const Schedule& schedule, const TimeGrid& grid,
                        const Eigen::Matrix4cd& target, const std::string& target_name,
                        const LossParams& loss)
{
    GateRun run = run_gate(basis, schedule, grid, loss);
    GateResult r;
    r.gate = run.gate;
    r.target_name = target_name;
    r.fidelity = gate_fidelity(run.gate.matrix, target);
    r.truth_table = truth_table_fidelity(run.gate.matrix, target);
    for (int j = 0; j < 4; ++j) {
        r.max_leakage = std::max(r.max_leakage, run.gate.leakage[static_cast<size_t>(j)]);
        r.max_norm_loss =
            std::max(r.max_norm_loss, run.gate.norm_loss[static_cast<size_t>(j)]);
        ExposureMetrics e = exposure_metrics(run.columns[static_cast<size_t>(j)]);
        r.exposure.max_e_population = std::max(r.exposure.max_e_population, e.max_e_population);
        r.exposure.max_u_population = std::max(r.exposure.max_u_population, e.max_u_population);
        r.exposure.max_photon_expectation =
            std::max(r.exposure.max_photon_expectation, e.max_photon_expectation);
        r.exposure.integrated_e_population =
            std::max(r.exposure.integrated_e_population, e.integrated_e_population);
    }
    return r;
}

GateResult analyze_protocol(Protocol protocol, const ScheduleParams& params, double dt,
                            const LossParams& loss)
{
    Schedule schedule = build_schedule(protocol, params);
    Basis basis = build_basis(3, schedule.uses_u());
    TimeGrid grid = TimeGrid::over(schedule, dt);
    return analyze_gate(basis, schedule, grid, protocol_target(protocol),
                        protocol_target_name(protocol), loss);
}

std::vector<ScanRow> parameter_scan(Protocol protocol, const ScheduleParams& base,
                                    const std::vector<ScanAxis>& axes,
                                    const LossParams& loss, double dt, int n_threads)
{
    for (const auto& axis : axes)
        if (axis.name != "omega_max_tp" && axis.name != "g_tp" &&
            axis.name != "intra_delay_tp")
            throw std::invalid_argument("parameter_scan: unknown axis \"" + axis.name +
                                        "\" (expected omega_max_tp, g_tp, intra_delay_tp)");

    size_t total = axes.empty() ? 0 : 1;
    for (const auto& axis : axes) total *= axis.values.size();

    std::vector<ScanRow> rows(total);
    if (total == 0) return rows;

    auto evaluate = [&](size_t flat) {
        ScanRow row;
        size_t rem = flat;
        ScheduleParams params = base;
        for (size_t a = axes.size(); a-- > 0;) {
            size_t idx = rem % axes[a].values.size();
            rem /= axes[a].values.size();
            double v = axes[a].values[idx];
            row.values.insert(row.values.begin(), v);
            if (axes[a].name == "omega_max_tp")
                params.omega_max = v;
            else if (axes[a].name == "g_tp")
                params.g1 = params.g2 = v;
            else
                params.intra_delay = v;
        }
        try {
            GateResult r = analyze_protocol(protocol, params, dt, loss);
            row.fidelity = r.fidelity;
            row.truth_table = r.truth_table;
            row.max_leakage = r.max_leakage;
            row.max_e_population = r.exposure.max_e_population;
            row.max_photon = r.exposure.max_photon_expectation;
            row.norm_loss = r.max_norm_loss;
        } catch (const std::exception& e) {
            row.status = e.what();
        }
        return row;
    };

    unsigned workers = n_threads > 0 ? static_cast<unsigned>(n_threads)
                                     : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min<unsigned>(workers, static_cast<unsigned>(total));
    if (workers <= 1) {
        for (size_t i = 0; i < total; ++i) rows[i] = evaluate(i);
        return rows;
    }

    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < total; i = next.fetch_add(1))
                rows[i] = evaluate(i);
        });
    for (auto& th : pool) th.join();
    return rows;
}

double PhysicalEstimate::adiabatic_loss_ratio() const
{
    double gt = gamma_tp();
    return gt > 0.0 ? pulse_area() * pulse_area() / gt : 0.0;
}

PhysicalEstimate physical_estimates(double intensity, double t_p, double gamma)
{
    if (intensity <= 0.0)
        throw std::invalid_argument("physical_estimates: intensity must be > 0");
    if (t_p <= 0.0) throw std::invalid_argument("physical_estimates: t_p must be > 0");
    PhysicalEstimate e;
    e.intensity = intensity;
    e.rabi = 1e8 * std::sqrt(intensity);
    e.stark = 100.0 * intensity;
    e.t_p = t_p;
    e.gamma = gamma;
    return e;
}

}  // namespace cavpass
