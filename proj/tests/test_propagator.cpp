#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cavpass/gateanalysis.hpp"
#include "cavpass/propagator.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace cavpass;
using testutil::custom_schedule;

namespace {
const double kDt = 1e-3;  // unit tests run at a coarser (still compliant) step
}

TEST_CASE("free evolution leaves |00>|0> untouched")
{
    Basis b = build_basis(2, false);
    ScheduleParams p;
    p.omega_max = 0.0;
    Schedule s = build_schedule(Protocol::swap8, p);
    StateVector psi0 = basis_vector(b, state_from_label("00;0"));
    Trajectory traj = propagate(psi0, s, TimeGrid::over(s, kDt));
    CHECK(traj.final_population(state_from_label("00;0")) == doctest::Approx(1.0));
    CHECK(traj.max_norm_drift() <= 1e-10);
}

TEST_CASE("swap8 exchanges |01> and |10>, leaves |11> alone")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap8);
    TimeGrid grid = TimeGrid::over(s, kDt);

    Trajectory t01 = propagate(basis_vector(b, state_from_label("01;0")), s, grid);
    CHECK(t01.final_population(state_from_label("10;0")) >= 0.99);
    CHECK(t01.max_norm_drift() <= 1e-8);

    Trajectory t11 = propagate(basis_vector(b, state_from_label("11;0")), s, grid);
    CHECK(t11.final_population(state_from_label("11;0")) >= 0.999);
}

TEST_CASE("realized swap8 matrix is the SWAP permutation with small phases")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap8);
    GateMatrix g = gate_matrix(b, s, TimeGrid::over(s, kDt));
    Eigen::Matrix4cd anchored = anchor_phase(g.matrix);
    Eigen::Matrix4cd target = swap_target();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            if (std::abs(target(i, j)) > 0.5) {
                CHECK(std::abs(anchored(i, j)) > 0.99);
                CHECK(std::abs(std::arg(anchored(i, j))) < 0.05);
            } else {
                CHECK(std::abs(anchored(i, j)) < 0.05);
            }
        }
    for (int j = 0; j < 4; ++j) {
        CHECK(g.leakage[j] <= 1e-2);
        CHECK(std::abs(g.norm_loss[j]) <= 1e-8);
    }
}

TEST_CASE("swap7 realizes the same gate")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap7);
    GateMatrix g = gate_matrix(b, s, TimeGrid::over(s, kDt));
    CHECK(gate_fidelity(g.matrix, swap_target()) >= 0.99);
}

TEST_CASE("precondition errors")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap8);
    StateVector psi0 = basis_vector(b, state_from_label("01;0"));

    TimeGrid bad = TimeGrid::over(s, 0.01);  // > min(Tp, 1/g, 1/Omega)/20 = 0.002
    CHECK_THROWS_AS(propagate(psi0, s, bad), std::invalid_argument);

    StateVector unnormalized = psi0;
    unnormalized.amplitudes *= 0.5;
    CHECK_THROWS_AS(propagate(unnormalized, s, TimeGrid::over(s, kDt)),
                    std::invalid_argument);
}

TEST_CASE("integration aborts on non-finite amplitudes with a partial trajectory")
{
    Basis b = build_basis(2, false);
    Schedule s = custom_schedule({{Transition::ga_e, 1, 0.0, 5.0}}, 25.0, 25.0);
    s.g1 = std::numeric_limits<double>::quiet_NaN();
    StateVector psi0 = basis_vector(b, state_from_label("a1;0"));
    try {
        propagate(psi0, s, TimeGrid::over(s, kDt));
        FAIL("expected IntegrationError");
    } catch (const IntegrationError& e) {
        CHECK(e.partial.sample_count() >= 1);
        CHECK(e.failure_time > s.t_start);
    }
}

TEST_CASE("halving dt changes final populations below 1e-8")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap8);
    StateVector psi0 = basis_vector(b, state_from_label("01;0"));
    PropagationOptions opts;
    opts.record_samples = false;
    Trajectory a = propagate(psi0, s, TimeGrid::over(s, 5e-4), {}, opts);
    Trajectory bb = propagate(psi0, s, TimeGrid::over(s, 2.5e-4), {}, opts);
    Eigen::VectorXcd fa = a.full_state(a.sample_count() - 1);
    Eigen::VectorXcd fb = bb.full_state(bb.sample_count() - 1);
    double worst = 0.0;
    for (int i = 0; i < b.size(); ++i)
        worst = std::max(worst, std::abs(std::norm(fa[i]) - std::norm(fb[i])));
    CHECK(worst < 1e-8);
}

TEST_CASE("a trajectory stays inside its charge block")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap8);
    PropagationOptions opts;
    opts.restrict_to_coupled = false;  // integrate on the full basis
    StateVector psi0 = basis_vector(b, state_from_label("10;0"));
    Trajectory traj = propagate(psi0, s, TimeGrid::over(s, kDt), {}, opts);
    for (int k = 0; k < traj.sample_count(); ++k) {
        double outside = 0.0;
        const auto& psi = traj.states[k];
        for (int i = 0; i < b.size(); ++i)
            if (charge_of(b.state(i)) != -1) outside += std::norm(psi[i]);
        CHECK(outside <= 1e-12);
    }
}

TEST_CASE("blockwise and full-basis propagation agree")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap8);
    StateVector psi0 = basis_vector(b, state_from_label("01;0"));
    PropagationOptions full;
    full.restrict_to_coupled = false;
    full.record_samples = false;
    PropagationOptions blocked;
    blocked.record_samples = false;
    Trajectory a = propagate(psi0, s, TimeGrid::over(s, kDt), {}, blocked);
    Trajectory bfull = propagate(psi0, s, TimeGrid::over(s, kDt), {}, full);
    CHECK((a.full_state(a.sample_count() - 1) - bfull.full_state(bfull.sample_count() - 1))
              .norm() <= 1e-12);
}

TEST_CASE("sequential window propagation equals the full window")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap8);
    StateVector psi0 = basis_vector(b, state_from_label("10;0"));
    PropagationOptions opts;
    opts.record_samples = false;

    Trajectory full = propagate(psi0, s, {s.t_start, s.t_end, kDt, 50}, {}, opts);

    // midpoints between step centers split the schedule into per-step windows
    std::vector<double> cuts = {s.t_start, 3.0, 9.0, 15.0, s.t_end};
    StateVector psi = psi0;
    for (size_t w = 0; w + 1 < cuts.size(); ++w) {
        Trajectory leg = propagate(psi, s, {cuts[w], cuts[w + 1], kDt, 50}, {}, opts);
        psi.amplitudes = leg.full_state(leg.sample_count() - 1);
        psi.amplitudes /= psi.norm();
    }
    Eigen::VectorXcd chained = psi.amplitudes;
    Eigen::VectorXcd direct = full.full_state(full.sample_count() - 1);
    CHECK((chained - direct).norm() <= 1e-6);
}

TEST_CASE("reversing the pulse order breaks the transfer")
{
    Basis b = build_basis(2, false);
    StepRoles roles{AtomLevel::ga, AtomLevel::ga};  // step-3 roles

    // counterintuitive order: Oa(2) then Oa(1); |a1>|0> -> |1a>|0>
    Schedule fwd = custom_schedule(
        {{Transition::ga_e, 2, -0.6}, {Transition::ga_e, 1, 0.6}}, 25.0, 25.0, roles);
    StateVector psi0 = basis_vector(b, state_from_label("a1;0"));
    Trajectory ok = propagate(psi0, fwd, TimeGrid::over(fwd, kDt));
    CHECK(ok.final_population(state_from_label("1a;0")) >= 0.99);

    // reversed (intuitive) order fails
    Schedule rev = custom_schedule(
        {{Transition::ga_e, 1, -0.6}, {Transition::ga_e, 2, 0.6}}, 25.0, 25.0, roles);
    Trajectory bad = propagate(psi0, rev, TimeGrid::over(rev, kDt));
    CHECK(bad.final_population(state_from_label("1a;0")) < 0.5);
}

TEST_CASE("a constant laser phase difference is imprinted on the transfer")
{
    Basis b = build_basis(2, false);
    StepRoles roles{AtomLevel::ga, AtomLevel::g0};  // step 1
    double phase = M_PI / 3.0;
    Schedule s = custom_schedule({{Transition::ga_e, 1, -0.6, 10.0, 0.0},
                                  {Transition::g0_e, 2, 0.6, 10.0, phase}},
                                 25.0, 25.0, roles);
    StateVector psi0 = basis_vector(b, state_from_label("10;0"));
    Trajectory traj = propagate(psi0, s, TimeGrid::over(s, kDt));
    cdouble amp =
        traj.full_state(traj.sample_count() - 1)[b.index_of(state_from_label("a1;0"))];
    CHECK(std::abs(amp) > 0.999);
    // transferred amplitude picks up e^{i(phi_pump - phi_stokes)}
    CHECK(std::arg(amp) == doctest::Approx(phase).epsilon(1e-4));
}
