// darkstates.hpp — analytic dark states of the 7- and 16-dimensional blocks,
// instantaneous spectra and gaps, and tracking of the dark manifold through a
// step (kernel residuals, geometric/dynamical phases, endpoint connections).
#pragma once

#include "cavpass/hamiltonian.hpp"
#include "cavpass/propagator.hpp"

#include <array>
#include <utility>

namespace cavpass {

// Cavity-mediated dark state of the 7-dimensional block:
//   g1 w2 |L1 1>|0> + g2 w1 |1 L2>|0> - w1 w2 |11>|1>,  normalized.
// Errors if the resulting direction is undefined (all coefficients zero).
StateVector dark7(const Basis& basis, const StepRoles& roles, double omega1, double omega2,
                  double g1, double g2);

// The four dark states of the 16-dimensional block connected to |00>|0>:
//   (1)  w2 |N1 1>|1> - g2 |N1 L2>|0>
//   (2)  sqrt2 g1 g2 |L1 L2>|0> - sqrt2 g2 w1 |1 L2>|1> - sqrt2 g1 w2 |L1 1>|1> + w1 w2 |11>|2>
//   (3)  |N1 N2>|0>
//   (4)  w1 |1 N2>|1> - g1 |L1 N2>|0>
// each normalized; mutually orthogonal for any couplings.
std::array<StateVector, 4> dark16(const Basis& basis, const StepRoles& roles, double omega1,
                                  double omega2, double g1, double g2);

struct BlockSpectrum {
    int charge{0};
    std::vector<int> indices;       // basis indices of the block
    Eigen::VectorXd eigenvalues;    // ascending
    Eigen::MatrixXcd eigenvectors;  // columns
    std::vector<int> dark;          // positions with |eigenvalue| <= tolerance
    double gap{0.0};                // smallest |eigenvalue| above tolerance (0 if none)
    double tolerance{0.0};
};

// Eigen-decomposition of the charge block of H(t), loss = 0.  Errors if the
// charge label is absent from the partition.
BlockSpectrum spectrum_and_gap(const Basis& basis, const Schedule& schedule, double t,
                               int charge);

// Discrete connection samples along a tracked dark frame.  Off-diagonal entries
// are central-difference inner products <phi_d'(t) | d/ds phi_d(t)>; diagonal
// entries are i times the discrete phase rate arg<phi_d(t)|phi_d(t+h)>/h (the
// real part of the naive difference is a normalization artifact of order h).
struct ConnectionSamples {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> pairwise;
    std::vector<int> dark_dim;  // per tracked sample
    double min_gap{0.0};
    bool ok{true};
    double failure_time{0.0};
};

// Tracks the instantaneous dark manifold of the given charge block from t0 to
// t1 by projector continuity, gauge-fixed (largest component real positive).
// Tracking fails when a projected frame vector loses more than 10% of its norm
// between consecutive samples.
ConnectionSamples geometric_phase_integrand(const Basis& basis, const Schedule& schedule,
                                            double t0, double t1, double sample_dt,
                                            int charge);

// Source and target product states of a cavity-exchange step: the stokes pulse
// addresses the target's atom, so (source, target) = (|1 L2>|0>, |L1 1>|0>) when
// the stokes drives atom 1 and the reverse otherwise.
std::pair<BasisState, BasisState> step_endpoints(const Schedule& schedule, const Step& step);

struct StepDarkAnalysis {
    std::string step_label;
    int charge{0};
    double window_start{0.0}, window_end{0.0};
    double max_kernel_residual{0.0};  // analytic dark vectors vs assembled block, relative
    double min_gap{0.0};
    int dark_dim_min{0}, dark_dim_max{0};
    double max_connection{0.0};       // largest |pairwise| over tracked samples
    double geometric_phase{0.0};      // tracked chain state, radians
    double dynamical_phase{0.0};      // integral of the tracked eigenvalue
    double start_overlap{0.0}, end_overlap{0.0};
    std::string start_label, end_label;
    bool tracking_ok{true};
    double failure_time{0.0};
};

// Per-step analysis of one charge block (-1: the |phi7> chain; 0: the four
// |phi16> states) over [stokes_peak - 2.2 Tp, pump_peak + 2.2 Tp].  The block
// Hamiltonian is the step's own pulse pair plus the cavity: the mechanism's
// per-step claims (kernel membership, zero phases, endpoint connections) are
// about the isolated double-STIRAP, while other steps' pulse tails belong to
// the dynamics tested through the propagator.
StepDarkAnalysis analyze_step_block(const Basis& basis, const Schedule& schedule,
                                    const Step& step, int charge, double sample_dt = 1e-3);

}  // namespace cavpass
