// gateanalysis.hpp — fidelity and leakage metrics, exposure to lossy states,
// parameter scans, and the metastable-Helium order-of-magnitude estimates.
#pragma once

#include "cavpass/propagator.hpp"

namespace cavpass {

Eigen::Matrix4cd swap_target();
Eigen::Matrix4cd cnot_target();
Eigen::Matrix4cd identity_target();
Eigen::Matrix4cd protocol_target(Protocol p);
std::string protocol_target_name(Protocol p);

// |tr(target^dag gate)| / 4 — phase sensitive, leakage penalizing.  Invariant
// under the global phase, so |00>-anchoring does not change it.
double gate_fidelity(const Eigen::Matrix4cd& gate, const Eigen::Matrix4cd& target);

// Mean correct-output population against a permutation target: insensitive to
// the per-column phases a shelving STIRAP imprints.
double truth_table_fidelity(const Eigen::Matrix4cd& gate,
                            const Eigen::Matrix4cd& target_permutation);

struct ExposureMetrics {
    double max_e_population{0.0};
    double max_u_population{0.0};
    double max_photon_expectation{0.0};
    double integrated_e_population{0.0};  // time integral over the trajectory
};

ExposureMetrics exposure_metrics(const Trajectory& trajectory);

struct GateResult {
    GateMatrix gate;
    std::string target_name;
    double fidelity{0.0};
    double truth_table{0.0};
    double max_leakage{0.0};
    double max_norm_loss{0.0};
    ExposureMetrics exposure;  // maxima over the four columns
};

GateResult analyze_gate(const Basis& basis, const Schedule& schedule, const TimeGrid& grid,
                        const Eigen::Matrix4cd& target, const std::string& target_name,
                        const LossParams& loss = {});
GateResult analyze_protocol(Protocol protocol, const ScheduleParams& params, double dt,
                            const LossParams& loss = {});

// Scan axes: "omega_max_tp", "g_tp" (sets both couplings) or "intra_delay_tp",
// in pulse-width units (the scan fixes t_p = 1).
struct ScanAxis {
    std::string name;
    std::vector<double> values;

    friend bool operator==(const ScanAxis&, const ScanAxis&) = default;
};

struct ScanRow {
    std::vector<double> values;
    double fidelity{0.0};
    double truth_table{0.0};
    double max_leakage{0.0};
    double max_e_population{0.0};
    double max_photon{0.0};
    double norm_loss{0.0};
    std::string status{"ok"};
};

// One row per grid point in row-major order of the axes; per-point failures are
// recorded in the status column and the scan continues.  Points are evaluated
// concurrently (n_threads = 0 picks the hardware count); output order and
// values are independent of the thread count.
std::vector<ScanRow> parameter_scan(Protocol protocol, const ScheduleParams& base,
                                    const std::vector<ScanAxis>& axes,
                                    const LossParams& loss, double dt, int n_threads = 0);

struct PhysicalEstimate {
    double intensity{0.0};  // W/cm^2
    double rabi{0.0};       // s^-1, 1e8 sqrt(I)
    double stark{0.0};      // s^-1, upper estimate 100 I
    double t_p{0.0};        // s
    double gamma{1e7};      // s^-1, linewidth of |e>

    double pulse_area() const { return rabi * t_p; }
    double gamma_tp() const { return gamma * t_p; }
    double adiabatic_loss_ratio() const;  // (Omega Tp)^2 / (Gamma Tp)
    double stark_phase() const { return stark * t_p; }
};

// Metastable-Helium scaling laws for the 2^3S1 - 2^3P0 transition.
PhysicalEstimate physical_estimates(double intensity, double t_p, double gamma = 1e7);

}  // namespace cavpass
