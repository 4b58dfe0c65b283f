#include "cavpass/propagator.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cavpass {

TimeGrid TimeGrid::over(const Schedule& schedule, double dt, int sample_stride)
{
    return {schedule.t_start, schedule.t_end, dt, sample_stride};
}

int TimeGrid::step_count() const
{
    return static_cast<int>(std::ceil((t_end - t_start) / dt));
}

Eigen::VectorXcd Trajectory::full_state(int sample) const
{
    Eigen::VectorXcd full = Eigen::VectorXcd::Zero(basis->size());
    const auto& v = states[static_cast<size_t>(sample)];
    for (size_t k = 0; k < subspace.size(); ++k)
        full[subspace[k]] = v[static_cast<Eigen::Index>(k)];
    return full;
}

double Trajectory::population(int sample, const BasisState& s) const
{
    auto gi = basis->find(s);
    if (!gi) return 0.0;
    for (size_t k = 0; k < subspace.size(); ++k)
        if (subspace[k] == *gi)
            return std::norm(states[static_cast<size_t>(sample)][static_cast<Eigen::Index>(k)]);
    return 0.0;
}

double Trajectory::final_population(const BasisState& s) const
{
    return population(sample_count() - 1, s);
}

double Trajectory::photon_expectation(int sample) const
{
    double v = 0.0;
    const auto& psi = states[static_cast<size_t>(sample)];
    for (size_t k = 0; k < subspace.size(); ++k)
        v += basis->state(subspace[k]).photons * std::norm(psi[static_cast<Eigen::Index>(k)]);
    return v;
}

double Trajectory::level_population(int sample, AtomLevel level) const
{
    double v = 0.0;
    const auto& psi = states[static_cast<size_t>(sample)];
    for (size_t k = 0; k < subspace.size(); ++k) {
        const BasisState& s = basis->state(subspace[k]);
        if (s.atom1 == level || s.atom2 == level)
            v += std::norm(psi[static_cast<Eigen::Index>(k)]);
    }
    return v;
}

double Trajectory::max_norm_drift() const
{
    double d = 0.0;
    for (double n : norms) d = std::max(d, std::abs(n - 1.0));
    return d;
}

Trajectory propagate(const StateVector& psi0, const Schedule& schedule, const TimeGrid& grid,
                     const LossParams& loss, const PropagationOptions& options)
{
    if (!psi0.basis) throw std::invalid_argument("propagate: psi0 has no basis");
    const Basis& basis = *psi0.basis;
    if (psi0.amplitudes.size() != basis.size())
        throw std::invalid_argument("propagate: psi0 length does not match its basis");
    if (std::abs(psi0.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("propagate: psi0 is not normalized");

    // dt invariant for the fixed-step integrator
    double bound = schedule.min_t_p();
    double gmax = std::max(schedule.g1, schedule.g2);
    if (gmax > 0.0) bound = std::min(bound, 1.0 / gmax);
    double wmax = schedule.max_omega();
    if (wmax > 0.0) bound = std::min(bound, 1.0 / wmax);
    bound /= 20.0;
    if (grid.dt > bound * (1.0 + 1e-12))
        throw std::invalid_argument("propagate: dt = " + std::to_string(grid.dt) +
                                    " violates dt <= min(Tp, 1/g, 1/Omega_max)/20 = " +
                                    std::to_string(bound));

    std::vector<int> sub;
    if (options.restrict_to_coupled) {
        std::vector<int> seeds;
        for (int i = 0; i < basis.size(); ++i)
            if (std::norm(psi0.amplitudes[i]) > 0.0) seeds.push_back(i);
        sub = coupled_subspace(basis, schedule, seeds);
    } else {
        sub.resize(static_cast<size_t>(basis.size()));
        std::iota(sub.begin(), sub.end(), 0);
    }

    Assembler assembler(basis, schedule, loss, sub);
    const int n = assembler.dim();

    Eigen::VectorXcd psi(n);
    for (size_t k = 0; k < sub.size(); ++k)
        psi[static_cast<Eigen::Index>(k)] = psi0.amplitudes[sub[k]];

    const int nsteps = grid.step_count();
    if (nsteps <= 0) throw std::invalid_argument("propagate: empty time grid");
    const double dt = (grid.t_end - grid.t_start) / nsteps;
    const cdouble mi(0.0, -1.0);

    Trajectory traj;
    traj.basis = &basis;
    traj.subspace = sub;

    auto fail = [&](double t) {
        throw IntegrationError("propagate: non-finite amplitudes at t = " +
                                   std::to_string(t) + " (integration unstable)",
                               t, std::move(traj));
    };
    auto record = [&](double t) {
        if (!psi.allFinite()) fail(t);
        if (options.record_samples || traj.times.empty()) {
            traj.times.push_back(t);
            traj.states.push_back(psi);
            traj.norms.push_back(psi.norm());
        }
    };

    Eigen::MatrixXcd H(n, n), Hmid(n, n), Hend(n, n);
    Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), tmp(n);

    assembler.assemble_into(grid.t_start, Hend);  // becomes H at the first step
    double t = grid.t_start;
    for (int step = 0; step < nsteps; ++step) {
        if (step % grid.sample_stride == 0) record(t);
        H.swap(Hend);
        assembler.assemble_into(t + 0.5 * dt, Hmid);
        assembler.assemble_into(t + dt, Hend);

        k1.noalias() = H * psi;
        k1 *= mi;
        tmp = psi + (0.5 * dt) * k1;
        k2.noalias() = Hmid * tmp;
        k2 *= mi;
        tmp = psi + (0.5 * dt) * k2;
        k3.noalias() = Hmid * tmp;
        k3 *= mi;
        tmp = psi + dt * k3;
        k4.noalias() = Hend * tmp;
        k4 *= mi;
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = grid.t_start + (step + 1) * dt;
    }
    // final sample always recorded
    if (!psi.allFinite()) fail(t);
    traj.times.push_back(t);
    traj.states.push_back(psi);
    traj.norms.push_back(psi.norm());
    return traj;
}

std::array<BasisState, 4> computational_states()
{
    using L = AtomLevel;
    return {BasisState{L::g0, L::g0, 0}, BasisState{L::g0, L::g1, 0},
            BasisState{L::g1, L::g0, 0}, BasisState{L::g1, L::g1, 0}};
}

GateRun run_gate(const Basis& basis, const Schedule& schedule, const TimeGrid& grid,
                 const LossParams& loss, const PropagationOptions& options)
{
    GateRun run;
    auto comp = computational_states();
    for (int j = 0; j < 4; ++j) {
        StateVector psi0 = basis_vector(basis, comp[static_cast<size_t>(j)]);
        Trajectory traj = propagate(psi0, schedule, grid, loss, options);
        Eigen::VectorXcd final = traj.full_state(traj.sample_count() - 1);
        double total = final.squaredNorm();
        double inside = 0.0;
        for (int i = 0; i < 4; ++i) {
            cdouble amp = final[basis.index_of(comp[static_cast<size_t>(i)])];
            run.gate.matrix(i, j) = amp;
            inside += std::norm(amp);
        }
        run.gate.leakage[static_cast<size_t>(j)] = std::max(0.0, total - inside);
        run.gate.norm_loss[static_cast<size_t>(j)] = 1.0 - total;
        run.columns[static_cast<size_t>(j)] = std::move(traj);
    }
    return run;
}

GateMatrix gate_matrix(const Basis& basis, const Schedule& schedule, const TimeGrid& grid,
                       const LossParams& loss)
{
    PropagationOptions options;
    options.record_samples = false;
    return run_gate(basis, schedule, grid, loss, options).gate;
}

Eigen::Matrix4cd anchor_phase(const Eigen::Matrix4cd& gate)
{
    cdouble a = gate(0, 0);
    if (std::abs(a) < 1e-12) return gate;
    return gate * std::polar(1.0, -std::arg(a));
}

}  // namespace cavpass
