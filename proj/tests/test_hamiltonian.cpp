#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cavpass/darkstates.hpp"
#include "cavpass/hamiltonian.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <random>

using namespace cavpass;
using testutil::custom_schedule;

namespace {

// both pulses peak at t = 0 so H(0) carries exactly (w1, w2)
Schedule sampled_couplings(double w1, double w2, double g1, double g2, const StepRoles& roles)
{
    Transition t1 = roles.laser1 == AtomLevel::g0 ? Transition::g0_e : Transition::ga_e;
    Transition t2 = roles.laser2 == AtomLevel::g0 ? Transition::g0_e : Transition::ga_e;
    return custom_schedule({{t1, 1, 0.0, w1}, {t2, 2, 0.0, w2}}, g1, g2, roles);
}

}  // namespace

TEST_CASE("no drive: only the cavity block remains and |11>|0> is stationary")
{
    Basis b = build_basis(2, false);
    ScheduleParams p;
    p.omega_max = 0.0;
    Schedule s = build_schedule(Protocol::swap8, p);
    OperatorMatrix H = assemble(b, s, 0.0);
    CHECK(H.hermitian);

    Eigen::VectorXcd v = basis_vector(b, state_from_label("11;0")).amplitudes;
    CHECK((H.matrix * v).norm() == 0.0);

    // every entry connects (|1>, n+1) with (|e>, n) on one atom
    for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) {
            if (std::abs(H.matrix(i, j)) == 0.0) continue;
            const BasisState &si = b.state(i), &sj = b.state(j);
            CHECK(std::abs(si.photons - sj.photons) == 1);
            CHECK((si.atom1 == AtomLevel::e || si.atom2 == AtomLevel::e ||
                   sj.atom1 == AtomLevel::e || sj.atom2 == AtomLevel::e));
        }
}

TEST_CASE("cavity couplings carry the sqrt(n+1) enhancement")
{
    Basis b = build_basis(3, false);
    ScheduleParams p;
    p.omega_max = 0.0;
    p.g1 = 25.0;
    p.g2 = 17.0;
    Schedule s = build_schedule(Protocol::swap8, p);
    Eigen::MatrixXcd H = assemble(b, s, 0.0).matrix;

    auto idx = [&](const char* l) { return b.index_of(state_from_label(l)); };
    CHECK(std::abs(H(idx("e1;0"), idx("11;1"))) == doctest::Approx(25.0));
    CHECK(std::abs(H(idx("e1;1"), idx("11;2"))) == doctest::Approx(25.0 * std::sqrt(2.0)));
    CHECK(std::abs(H(idx("e1;2"), idx("11;3"))) == doctest::Approx(25.0 * std::sqrt(3.0)));
    CHECK(std::abs(H(idx("1e;0"), idx("11;1"))) == doctest::Approx(17.0));
    CHECK(std::abs(H(idx("0e;0"), idx("01;1"))) == doctest::Approx(17.0));
}

TEST_CASE("laser entries carry Omega e^{i phi} toward the excited state")
{
    Basis b = build_basis(2, false);
    double phi = 0.7;
    Schedule s = custom_schedule({{Transition::ga_e, 1, 0.0, 12.0, phi}}, 25.0, 25.0);
    Eigen::MatrixXcd H = assemble(b, s, 0.0).matrix;
    auto idx = [&](const char* l) { return b.index_of(state_from_label(l)); };
    cdouble up = H(idx("e1;0"), idx("a1;0"));
    CHECK(std::abs(up) == doctest::Approx(12.0));
    CHECK(std::arg(up) == doctest::Approx(phi));
    CHECK(H(idx("a1;0"), idx("e1;0")) == std::conj(up));
    // resonance: no real diagonal
    for (int i = 0; i < b.size(); ++i) CHECK(H(i, i).real() == 0.0);
}

TEST_CASE("the cavity-mediated dark state lies in the kernel of the assembled block")
{
    Basis b = build_basis(2, false);
    auto blocks = block_partition(b);
    const auto& block = blocks.at(-1);

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> coup(0.3, 30.0);
    for (int k = 0; k < 50; ++k) {
        StepRoles roles{k % 2 ? AtomLevel::g0 : AtomLevel::ga,
                        k % 3 ? AtomLevel::g0 : AtomLevel::ga};
        double w1 = coup(rng), w2 = coup(rng), g1 = coup(rng), g2 = coup(rng);
        Schedule s = sampled_couplings(w1, w2, g1, g2, roles);
        Assembler assembler(b, s, {}, block);
        Eigen::MatrixXcd H = assembler.at(0.0).matrix;

        StateVector v = dark7(b, roles, w1, w2, g1, g2);
        Eigen::VectorXcd vb(block.size());
        for (size_t i = 0; i < block.size(); ++i) vb[i] = v.amplitudes[block[i]];
        CHECK((H * vb).norm() <= 1e-12 * H.operatorNorm());
    }
}

TEST_CASE("hermiticity without loss, anti-Hermitian support with loss")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap8);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> time(s.t_start, s.t_end);
    for (int k = 0; k < 20; ++k) {
        OperatorMatrix H = assemble(b, s, time(rng));
        CHECK(H.hermitian);
        double scale = H.matrix.cwiseAbs().maxCoeff();
        CHECK((H.matrix - H.matrix.adjoint()).cwiseAbs().maxCoeff() <= 1e-14 * scale);
    }

    OperatorMatrix H = assemble(b, s, 0.0, LossParams{0.5, 0.0, 0.0});
    CHECK(!H.hermitian);
    Eigen::MatrixXcd anti = H.matrix - H.matrix.adjoint();
    for (int i = 0; i < b.size(); ++i)
        for (int j = 0; j < b.size(); ++j) {
            if (std::abs(anti(i, j)) == 0.0) continue;
            CHECK(i == j);
            const BasisState& st = b.state(i);
            CHECK((st.atom1 == AtomLevel::e || st.atom2 == AtomLevel::e));
        }

    // kappa acts on photon number
    OperatorMatrix Hk = assemble(b, s, 0.0, LossParams{0.0, 0.0, 0.04});
    auto idx = [&](const char* l) { return b.index_of(state_from_label(l)); };
    CHECK(Hk.matrix(idx("11;2"), idx("11;2")) == cdouble(0.0, -0.04));
    CHECK(Hk.matrix(idx("11;1"), idx("11;1")) == cdouble(0.0, -0.02));
    CHECK(Hk.matrix(idx("11;0"), idx("11;0")) == cdouble(0.0, 0.0));
}

TEST_CASE("swap couplings never bridge charge blocks")
{
    Basis b = build_basis(3, false);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> time;
    for (Protocol proto : {Protocol::swap8, Protocol::swap7}) {
        Schedule s = build_schedule(proto);
        time = std::uniform_real_distribution<double>(s.t_start, s.t_end);
        for (int k = 0; k < 10; ++k) {
            Eigen::MatrixXcd H = assemble(b, s, time(rng)).matrix;
            for (int i = 0; i < b.size(); ++i)
                for (int j = i + 1; j < b.size(); ++j)
                    if (std::abs(H(i, j)) > 0.0)
                        CHECK(charge_of(b.state(i)) == charge_of(b.state(j)));
        }
    }
}

TEST_CASE("the 1-u shelving laser bridges blocks (the CNOT needs it)")
{
    Basis b = build_basis(2, true);
    Schedule s = build_schedule(Protocol::cnot11);
    // at the shelving pump peak the 1-u coupling is on
    Eigen::MatrixXcd H = assemble(b, s, s.steps[0].pump_peak).matrix;
    int i = b.index_of(state_from_label("11;0"));  // charge -2
    int j = b.index_of(state_from_label("1u;0"));  // charge -1
    CHECK(std::abs(H(j, i)) > 1.0);
    CHECK(charge_of(b.state(i)) != charge_of(b.state(j)));
}

TEST_CASE("errors: window and missing |u>")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap8);
    CHECK_THROWS_AS(assemble(b, s, s.t_end + 1.0), std::out_of_range);
    CHECK_THROWS_AS(assemble(b, s, s.t_start - 1.0), std::out_of_range);

    Schedule cnot = build_schedule(Protocol::cnot11);
    CHECK_THROWS_AS(assemble(b, cnot, 0.0), std::invalid_argument);
    Basis bu = build_basis(2, true);
    CHECK_NOTHROW(assemble(bu, cnot, 0.0));
}

TEST_CASE("subspace assembly matches the restriction of the full matrix")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap8);
    auto blocks = block_partition(b);
    const auto& block = blocks.at(0);
    Assembler restricted(b, s, {}, block);
    Eigen::MatrixXcd Hb = restricted.at(1.3).matrix;
    Eigen::MatrixXcd H = assemble(b, s, 1.3).matrix;
    for (size_t i = 0; i < block.size(); ++i)
        for (size_t j = 0; j < block.size(); ++j)
            CHECK(Hb(i, j) == H(block[i], block[j]));
}

TEST_CASE("coupled subspace equals the brute-force closure")
{
    Basis b = build_basis(2, false);
    Schedule s = build_schedule(Protocol::swap8);
    for (const char* label : {"10;0", "00;0", "11;0"}) {
        int start = b.index_of(state_from_label(label));
        std::vector<int> seeds{start};
        auto sub = coupled_subspace(b, s, seeds);
        auto reach = oracle::swap_reachable(b, b.state(start));
        CHECK(sub.size() == reach.size());
        for (int i : sub) CHECK(reach.count(b.state(i)) == 1);
    }
}
