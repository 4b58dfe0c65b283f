#include "cavpass/darkstates.hpp"

#include <cmath>
#include <stdexcept>

namespace cavpass {

namespace {

StateVector from_terms(const Basis& basis,
                       std::initializer_list<std::pair<BasisState, double>> terms,
                       const char* what)
{
    StateVector v;
    v.basis = &basis;
    v.amplitudes = Eigen::VectorXcd::Zero(basis.size());
    for (const auto& [s, c] : terms) v.amplitudes[basis.index_of(s)] += c;
    double n = v.amplitudes.norm();
    if (n < 1e-300)
        throw std::invalid_argument(std::string(what) +
                                    ": all coefficients vanish, direction undefined");
    v.amplitudes /= n;
    return v;
}

Transition laser_transition(AtomLevel level)
{
    if (level == AtomLevel::g0) return Transition::g0_e;
    if (level == AtomLevel::ga) return Transition::ga_e;
    throw std::invalid_argument("laser_transition: role level must be |0> or |a>");
}

double dark_tolerance(double opnorm, double tp_ref)
{
    return std::max(1e-10 * opnorm, 1e-8 / tp_ref);
}

}  // namespace

StateVector dark7(const Basis& basis, const StepRoles& roles, double omega1, double omega2,
                  double g1, double g2)
{
    using L = AtomLevel;
    return from_terms(basis,
                      {{{roles.laser1, L::g1, 0}, g1 * omega2},
                       {{L::g1, roles.laser2, 0}, g2 * omega1},
                       {{L::g1, L::g1, 1}, -omega1 * omega2}},
                      "dark7");
}

std::array<StateVector, 4> dark16(const Basis& basis, const StepRoles& roles, double omega1,
                                  double omega2, double g1, double g2)
{
    using L = AtomLevel;
    const AtomLevel l1 = roles.laser1, l2 = roles.laser2;
    const AtomLevel n1 = roles.spectator1(), n2 = roles.spectator2();
    const double r2 = std::sqrt(2.0);
    return {
        from_terms(basis, {{{n1, L::g1, 1}, omega2}, {{n1, l2, 0}, -g2}}, "dark16(1)"),
        from_terms(basis,
                   {{{l1, l2, 0}, r2 * g1 * g2},
                    {{L::g1, l2, 1}, -r2 * g2 * omega1},
                    {{l1, L::g1, 1}, -r2 * g1 * omega2},
                    {{L::g1, L::g1, 2}, omega1 * omega2}},
                   "dark16(2)"),
        from_terms(basis, {{{n1, n2, 0}, 1.0}}, "dark16(3)"),
        from_terms(basis, {{{L::g1, n2, 1}, omega1}, {{l1, n2, 0}, -g1}}, "dark16(4)"),
    };
}

BlockSpectrum spectrum_and_gap(const Basis& basis, const Schedule& schedule, double t,
                               int charge)
{
    auto blocks = block_partition(basis);
    auto it = blocks.find(charge);
    if (it == blocks.end())
        throw std::invalid_argument("spectrum_and_gap: no block with charge " +
                                    std::to_string(charge));

    BlockSpectrum out;
    out.charge = charge;
    out.indices = it->second;

    Assembler assembler(basis, schedule, LossParams{}, out.indices);
    OperatorMatrix H = assembler.at(t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H.matrix);
    out.eigenvalues = eig.eigenvalues();
    out.eigenvectors = eig.eigenvectors();

    double opnorm = 0.0;
    for (int i = 0; i < out.eigenvalues.size(); ++i)
        opnorm = std::max(opnorm, std::abs(out.eigenvalues[i]));
    out.tolerance = dark_tolerance(opnorm, schedule.min_t_p());

    double gap = 0.0;
    for (int i = 0; i < out.eigenvalues.size(); ++i) {
        double a = std::abs(out.eigenvalues[i]);
        if (a <= out.tolerance)
            out.dark.push_back(i);
        else
            gap = (gap == 0.0) ? a : std::min(gap, a);
    }
    out.gap = gap;
    return out;
}

namespace {

struct TrackResult {
    std::vector<double> times;
    std::vector<Eigen::MatrixXcd> frames;       // block-restricted, orthonormal columns
    std::vector<Eigen::MatrixXcd> hamiltonians;
    std::vector<double> opnorms;
    std::vector<int> dark_dims;
    double min_gap{0.0};
    bool ok{true};
    double failure_time{0.0};
};

void gauge_fix(Eigen::MatrixXcd& frame)
{
    for (Eigen::Index c = 0; c < frame.cols(); ++c) {
        Eigen::Index jmax = 0;
        double best = 0.0;
        for (Eigen::Index j = 0; j < frame.rows(); ++j) {
            double a = std::abs(frame(j, c));
            if (a > best + 1e-15) {
                best = a;
                jmax = j;
            }
        }
        cdouble z = frame(jmax, c);
        if (std::abs(z) > 0.0) frame.col(c) *= std::polar(1.0, -std::arg(z));
    }
}

// Modified Gram-Schmidt, deterministic column order.
void orthonormalize(Eigen::MatrixXcd& frame)
{
    for (Eigen::Index c = 0; c < frame.cols(); ++c) {
        for (Eigen::Index p = 0; p < c; ++p)
            frame.col(c) -= frame.col(p).dot(frame.col(c)) * frame.col(p);
        frame.col(c) /= frame.col(c).norm();
    }
}

TrackResult track_dark_frame(const Basis& basis, const Schedule& schedule,
                             const std::vector<int>& block, Eigen::MatrixXcd frame,
                             double t0, double t1, double sample_dt)
{
    TrackResult res;
    Assembler assembler(basis, schedule, LossParams{}, block);
    const int m = std::max(2, static_cast<int>(std::ceil((t1 - t0) / sample_dt)) + 1);
    const double h = (t1 - t0) / (m - 1);
    const double tp_ref = schedule.min_t_p();

    orthonormalize(frame);
    gauge_fix(frame);

    Eigen::MatrixXcd H;
    for (int k = 0; k < m; ++k) {
        double t = t0 + k * h;
        assembler.assemble_into(t, H);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H);
        double opnorm = std::max(std::abs(eig.eigenvalues()[0]),
                                 std::abs(eig.eigenvalues()[eig.eigenvalues().size() - 1]));
        double tol = dark_tolerance(opnorm, tp_ref);
        std::vector<int> dark;
        double gap = 0.0;
        for (int i = 0; i < eig.eigenvalues().size(); ++i) {
            double a = std::abs(eig.eigenvalues()[i]);
            if (a <= tol)
                dark.push_back(i);
            else
                gap = (gap == 0.0) ? a : std::min(gap, a);
        }
        res.min_gap = (k == 0) ? gap : std::min(res.min_gap, gap);

        Eigen::MatrixXcd U(H.rows(), static_cast<Eigen::Index>(dark.size()));
        for (size_t d = 0; d < dark.size(); ++d)
            U.col(static_cast<Eigen::Index>(d)) = eig.eigenvectors().col(dark[d]);

        // projector continuity
        Eigen::MatrixXcd projected = U * (U.adjoint() * frame);
        for (Eigen::Index c = 0; c < projected.cols(); ++c) {
            if (projected.col(c).norm() < 0.9) {
                res.ok = false;
                res.failure_time = t;
                return res;
            }
        }
        orthonormalize(projected);
        gauge_fix(projected);
        frame = std::move(projected);

        res.times.push_back(t);
        res.frames.push_back(frame);
        res.hamiltonians.push_back(H);
        res.opnorms.push_back(opnorm);
        res.dark_dims.push_back(static_cast<int>(dark.size()));
    }
    return res;
}

ConnectionSamples connection_from_track(const TrackResult& track)
{
    ConnectionSamples out;
    out.ok = track.ok;
    out.failure_time = track.failure_time;
    out.dark_dim = track.dark_dims;
    out.min_gap = track.min_gap;
    if (!track.ok || track.frames.size() < 3) return out;

    const size_t m = track.frames.size();
    const double h = track.times[1] - track.times[0];
    for (size_t k = 1; k + 1 < m; ++k) {
        const Eigen::MatrixXcd& F = track.frames[k];
        Eigen::MatrixXcd M =
            F.adjoint() * ((track.frames[k + 1] - track.frames[k - 1]) / (2.0 * h));
        for (Eigen::Index d = 0; d < F.cols(); ++d) {
            cdouble ov = F.col(d).dot(track.frames[k + 1].col(d));
            M(d, d) = cdouble(0.0, std::arg(ov) / h);
        }
        out.times.push_back(track.times[k]);
        out.pairwise.push_back(std::move(M));
    }
    return out;
}

}  // namespace

ConnectionSamples geometric_phase_integrand(const Basis& basis, const Schedule& schedule,
                                            double t0, double t1, double sample_dt,
                                            int charge)
{
    auto blocks = block_partition(basis);
    auto it = blocks.find(charge);
    if (it == blocks.end())
        throw std::invalid_argument("geometric_phase_integrand: no block with charge " +
                                    std::to_string(charge));
    const auto& block = it->second;

    Assembler assembler(basis, schedule, LossParams{}, block);
    Eigen::MatrixXcd H;
    assembler.assemble_into(t0, H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(H);
    double opnorm = std::max(std::abs(eig.eigenvalues()[0]),
                             std::abs(eig.eigenvalues()[eig.eigenvalues().size() - 1]));
    double tol = dark_tolerance(opnorm, schedule.min_t_p());
    std::vector<int> dark;
    for (int i = 0; i < eig.eigenvalues().size(); ++i)
        if (std::abs(eig.eigenvalues()[i]) <= tol) dark.push_back(i);
    if (dark.empty())
        throw std::invalid_argument("geometric_phase_integrand: no dark manifold at t0");

    Eigen::MatrixXcd frame(H.rows(), static_cast<Eigen::Index>(dark.size()));
    for (size_t d = 0; d < dark.size(); ++d)
        frame.col(static_cast<Eigen::Index>(d)) = eig.eigenvectors().col(dark[d]);

    return connection_from_track(
        track_dark_frame(basis, schedule, block, std::move(frame), t0, t1, sample_dt));
}

std::pair<BasisState, BasisState> step_endpoints(const Schedule& schedule, const Step& step)
{
    if (!step.roles)
        throw std::invalid_argument("step_endpoints: step " + step.label +
                                    " is not a cavity-exchange step");
    using L = AtomLevel;
    const StepRoles& roles = *step.roles;
    BasisState l1_1{roles.laser1, L::g1, 0};
    BasisState one_l2{L::g1, roles.laser2, 0};
    const Pulse& stokes = schedule.pulses[static_cast<size_t>(step.stokes_pulse)];
    if (stokes.atom == 1) return {one_l2, l1_1};  // stokes drives atom 1 -> target |L1 1>
    return {l1_1, one_l2};
}

namespace {

// The step viewed in isolation: its own pulse pair (a merged pulse keeps both
// lobes; same-transition lobes just add to the instantaneous drive) plus the
// always-on cavity.  The full-schedule Hamiltonian carries tails of other
// steps' pulses on other transitions, which is a dynamics matter, not part of
// the per-step dark-state structure.
Schedule step_schedule(const Schedule& schedule, const Step& step)
{
    Schedule s;
    s.g1 = schedule.g1;
    s.g2 = schedule.g2;
    s.t_start = schedule.t_start;
    s.t_end = schedule.t_end;
    s.protocol = "step";
    s.pulses.push_back(schedule.pulses[static_cast<size_t>(step.stokes_pulse)]);
    if (step.pump_pulse != step.stokes_pulse)
        s.pulses.push_back(schedule.pulses[static_cast<size_t>(step.pump_pulse)]);
    s.steps.push_back(step);
    Step& own = s.steps.back();
    own.stokes_pulse = 0;
    own.pump_pulse = step.pump_pulse == step.stokes_pulse ? 0 : 1;
    return s;
}

}  // namespace

StepDarkAnalysis analyze_step_block(const Basis& basis, const Schedule& full_schedule,
                                    const Step& step, int charge, double sample_dt)
{
    if (charge != -1 && charge != 0)
        throw std::invalid_argument(
            "analyze_step_block: analytic dark states exist for charges -1 and 0 only");
    if (!step.roles)
        throw std::invalid_argument("analyze_step_block: step " + step.label +
                                    " has no role assignment (shelving step)");

    const Schedule schedule = step_schedule(full_schedule, step);
    const StepRoles& roles = *step.roles;
    const double tp = schedule.min_t_p();
    const double t0 = std::max(schedule.t_start, step.stokes_peak - 2.2 * tp);
    const double t1 = std::min(schedule.t_end, step.pump_peak + 2.2 * tp);

    auto blocks = block_partition(basis);
    const auto& block = blocks.at(charge);

    auto restrict_to_block = [&](const StateVector& v) {
        Eigen::VectorXcd r = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(block.size()));
        for (size_t k = 0; k < block.size(); ++k) r[static_cast<Eigen::Index>(k)] =
            v.amplitudes[block[k]];
        return r;
    };

    const Transition tr1 = laser_transition(roles.laser1);
    const Transition tr2 = laser_transition(roles.laser2);
    auto drives = [&](double t) {
        return std::make_pair(schedule.drive(1, tr1, t), schedule.drive(2, tr2, t));
    };

    StepDarkAnalysis out;
    out.step_label = step.label;
    out.charge = charge;
    out.window_start = t0;
    out.window_end = t1;

    // start frame and chain endpoints
    Eigen::MatrixXcd frame;
    int chain = 0;
    BasisState start_state, end_state;
    if (charge == -1) {
        auto [source, target] = step_endpoints(schedule, schedule.steps.front());
        start_state = source;
        end_state = target;
        using L = AtomLevel;
        BasisState spect1{roles.spectator1(), L::g1, 0};
        BasisState spect2{L::g1, roles.spectator2(), 0};
        frame.resize(static_cast<Eigen::Index>(block.size()), 3);
        frame.col(0) = restrict_to_block(basis_vector(basis, source));
        frame.col(1) = restrict_to_block(basis_vector(basis, spect1));
        frame.col(2) = restrict_to_block(basis_vector(basis, spect2));
        chain = 0;
    } else {
        start_state = end_state = BasisState{AtomLevel::g0, AtomLevel::g0, 0};
        auto [w1, w2] = drives(t0);
        auto vs = dark16(basis, roles, w1, w2, schedule.g1, schedule.g2);
        frame.resize(static_cast<Eigen::Index>(block.size()), 4);
        int i00 = basis.index_of(start_state);
        double best = -1.0;
        for (int d = 0; d < 4; ++d) {
            frame.col(d) = restrict_to_block(vs[static_cast<size_t>(d)]);
            double ov = std::abs(vs[static_cast<size_t>(d)].amplitudes[i00]);
            if (ov > best) {
                best = ov;
                chain = d;
            }
        }
    }
    out.start_label = state_label(start_state);
    out.end_label = state_label(end_state);

    TrackResult track =
        track_dark_frame(basis, schedule, block, std::move(frame), t0, t1, sample_dt);
    out.tracking_ok = track.ok;
    out.failure_time = track.failure_time;
    out.min_gap = track.min_gap;
    if (!track.ok) return out;

    out.dark_dim_min = out.dark_dim_max = track.dark_dims.front();
    for (int d : track.dark_dims) {
        out.dark_dim_min = std::min(out.dark_dim_min, d);
        out.dark_dim_max = std::max(out.dark_dim_max, d);
    }

    // kernel residuals of the analytic dark vectors at the sampled drives
    for (size_t k = 0; k < track.times.size(); ++k) {
        auto [w1, w2] = drives(track.times[k]);
        double opnorm = track.opnorms[k];
        if (opnorm == 0.0) continue;
        auto residual = [&](const StateVector& v) {
            Eigen::VectorXcd r = restrict_to_block(v);
            return (track.hamiltonians[k] * r).norm() / opnorm;
        };
        if (charge == -1) {
            if (w1 > 0.0 || w2 > 0.0)
                out.max_kernel_residual = std::max(
                    out.max_kernel_residual,
                    residual(dark7(basis, roles, w1, w2, schedule.g1, schedule.g2)));
        } else {
            for (const auto& v : dark16(basis, roles, w1, w2, schedule.g1, schedule.g2))
                out.max_kernel_residual = std::max(out.max_kernel_residual, residual(v));
        }
    }

    // connection samples and phases along the tracked chain state
    ConnectionSamples conn = connection_from_track(track);
    for (const auto& M : conn.pairwise)
        out.max_connection = std::max(out.max_connection, M.cwiseAbs().maxCoeff());

    double geom = 0.0, dyn = 0.0;
    for (size_t k = 0; k + 1 < track.frames.size(); ++k) {
        cdouble ov = track.frames[k].col(chain).dot(track.frames[k + 1].col(chain));
        geom += std::arg(ov);
        double h = track.times[k + 1] - track.times[k];
        auto lambda = [&](size_t j) {
            return std::real(track.frames[j].col(chain).dot(track.hamiltonians[j] *
                                                            track.frames[j].col(chain)));
        };
        dyn += 0.5 * (lambda(k) + lambda(k + 1)) * h;
    }
    out.geometric_phase = geom;
    out.dynamical_phase = dyn;

    Eigen::VectorXcd start_vec = restrict_to_block(basis_vector(basis, start_state));
    Eigen::VectorXcd end_vec = restrict_to_block(basis_vector(basis, end_state));
    out.start_overlap = std::abs(start_vec.dot(track.frames.front().col(chain)));
    out.end_overlap = std::abs(end_vec.dot(track.frames.back().col(chain)));
    return out;
}

}  // namespace cavpass
