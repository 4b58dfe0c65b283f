// propagator.hpp — RK4 integration of i d|psi>/dt = H(t)|psi> over a schedule and
// extraction of the realized gate on the computational subspace.
#pragma once

#include "cavpass/hamiltonian.hpp"

#include <array>
#include <stdexcept>

namespace cavpass {

struct TimeGrid {
    double t_start{0.0};
    double t_end{0.0};
    double dt{5e-4};
    int sample_stride{50};

    static TimeGrid over(const Schedule& schedule, double dt = 5e-4, int sample_stride = 50);
    int step_count() const;
};

// Sampled solution.  Amplitudes are stored on `subspace` (global basis indices);
// the full vector is reconstructible via full_state.
struct Trajectory {
    const Basis* basis{nullptr};
    std::vector<int> subspace;
    std::vector<double> times;
    std::vector<Eigen::VectorXcd> states;
    std::vector<double> norms;

    int sample_count() const { return static_cast<int>(times.size()); }
    Eigen::VectorXcd full_state(int sample) const;
    double population(int sample, const BasisState& s) const;
    double final_population(const BasisState& s) const;
    double photon_expectation(int sample) const;
    double level_population(int sample, AtomLevel level) const;
    double max_norm_drift() const;  // max |norm - 1| over samples
};

struct PropagationOptions {
    bool restrict_to_coupled{true};  // integrate on the coupled closure of psi0's support
    bool record_samples{true};
};

// Raised when amplitudes become non-finite; carries whatever was sampled so
// callers can flag a partial trajectory.
struct IntegrationError : std::runtime_error {
    IntegrationError(const std::string& message, double t, Trajectory sampled)
        : std::runtime_error(message), failure_time(t), partial(std::move(sampled))
    {
    }
    double failure_time;
    Trajectory partial;
};

// Fourth-order fixed-step integration.  Enforces the grid invariant
// dt <= min(Tp, 1/g, 1/Omega_max)/20; aborts on non-finite amplitudes.
Trajectory propagate(const StateVector& psi0, const Schedule& schedule, const TimeGrid& grid,
                     const LossParams& loss = {}, const PropagationOptions& options = {});

// Ordered computational basis (|00>, |01>, |10>, |11>) x |0 photons>.
std::array<BasisState, 4> computational_states();

struct GateMatrix {
    Eigen::Matrix4cd matrix;            // columns: final-state projections of unit inputs
    std::array<double, 4> leakage{};    // final weight outside the computational subspace
    std::array<double, 4> norm_loss{};  // 1 - |psi_final|^2 (nonzero only with loss)
};

struct GateRun {
    GateMatrix gate;
    std::array<Trajectory, 4> columns;
};

GateRun run_gate(const Basis& basis, const Schedule& schedule, const TimeGrid& grid,
                 const LossParams& loss = {}, const PropagationOptions& options = {});
GateMatrix gate_matrix(const Basis& basis, const Schedule& schedule, const TimeGrid& grid,
                       const LossParams& loss = {});

// Gate with the (unobservable) global phase fixed so the |00> -> |00> amplitude
// is real positive; identity when that amplitude vanishes.
Eigen::Matrix4cd anchor_phase(const Eigen::Matrix4cd& gate);

}  // namespace cavpass
