#include "cavpass/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace cavpass {

namespace {

BasisState with_atom(const BasisState& s, int atom, AtomLevel level)
{
    BasisState out = s;
    (atom == 1 ? out.atom1 : out.atom2) = level;
    return out;
}

AtomLevel atom_level(const BasisState& s, int atom) { return atom == 1 ? s.atom1 : s.atom2; }

}  // namespace

Assembler::Assembler(const Basis& basis, const Schedule& schedule, const LossParams& loss)
    : Assembler(basis, schedule, loss, [&] {
          std::vector<int> all(static_cast<size_t>(basis.size()));
          std::iota(all.begin(), all.end(), 0);
          return all;
      }())
{
}

Assembler::Assembler(const Basis& basis, const Schedule& schedule, const LossParams& loss,
                     std::vector<int> subspace)
    : schedule_(&schedule), subspace_(std::move(subspace))
{
    if (schedule.uses_u() && !basis.include_u())
        throw std::invalid_argument(
            "Assembler: schedule drives |u> transitions but the basis was built with "
            "include_u = false");
    build(basis, schedule, loss);
}

void Assembler::build(const Basis& basis, const Schedule& schedule, const LossParams& loss)
{
    t_start_ = schedule.t_start;
    t_end_ = schedule.t_end;
    has_loss_ = loss.any();

    std::vector<int> local(static_cast<size_t>(basis.size()), -1);
    for (size_t k = 0; k < subspace_.size(); ++k) local[static_cast<size_t>(subspace_[k])] =
        static_cast<int>(k);

    // per-pulse laser templates: e^{i phi} |upper><lower| + h.c. at fixed photon number
    pulse_entries_.resize(schedule.pulses.size());
    for (size_t p = 0; p < schedule.pulses.size(); ++p) {
        const Pulse& pulse = schedule.pulses[p];
        AtomLevel lower = transition_lower(pulse.transition);
        AtomLevel upper = transition_upper(pulse.transition);
        cdouble up = std::polar(1.0, pulse.phase);
        for (int row : subspace_) {
            const BasisState& s = basis.state(row);
            if (atom_level(s, pulse.atom) != lower) continue;
            auto j = basis.find(with_atom(s, pulse.atom, upper));
            if (!j || local[static_cast<size_t>(*j)] < 0) continue;
            int li = local[static_cast<size_t>(row)];
            int lj = local[static_cast<size_t>(*j)];
            pulse_entries_[p].push_back({lj, li, up});
            pulse_entries_[p].push_back({li, lj, std::conj(up)});
        }
    }

    // cavity exchange: g_k sqrt(n+1) between |1>_k |n+1> and |e>_k |n>
    for (int atom : {1, 2}) {
        double g = atom == 1 ? schedule.g1 : schedule.g2;
        if (g == 0.0) continue;
        for (int row : subspace_) {
            const BasisState& s = basis.state(row);
            if (atom_level(s, atom) != AtomLevel::g1 || s.photons < 1) continue;
            BasisState t = with_atom(s, atom, AtomLevel::e);
            t.photons = s.photons - 1;
            auto j = basis.find(t);
            if (!j || local[static_cast<size_t>(*j)] < 0) continue;
            int li = local[static_cast<size_t>(row)];
            int lj = local[static_cast<size_t>(*j)];
            double v = g * std::sqrt(static_cast<double>(s.photons));
            cavity_entries_.push_back({lj, li, v});
            cavity_entries_.push_back({li, lj, v});
        }
    }

    if (has_loss_) {
        loss_diag_ = Eigen::VectorXcd::Zero(dim());
        for (size_t k = 0; k < subspace_.size(); ++k) {
            const BasisState& s = basis.state(subspace_[k]);
            double rate = 0.0;
            rate += loss.gamma_e * ((s.atom1 == AtomLevel::e) + (s.atom2 == AtomLevel::e));
            rate += loss.gamma_u * ((s.atom1 == AtomLevel::u) + (s.atom2 == AtomLevel::u));
            rate += loss.kappa * s.photons;
            loss_diag_[static_cast<Eigen::Index>(k)] = cdouble(0.0, -0.5 * rate);
        }
    }
}

void Assembler::assemble_into(double t, Eigen::MatrixXcd& H) const
{
    const int n = dim();
    H.setZero(n, n);
    for (const auto& e : cavity_entries_) H(e.row, e.col) += e.value;
    for (size_t p = 0; p < pulse_entries_.size(); ++p) {
        double w = schedule_->pulses[p].value(t);
        if (w == 0.0) continue;
        for (const auto& e : pulse_entries_[p]) H(e.row, e.col) += w * e.value;
    }
    if (has_loss_) H.diagonal() += loss_diag_;
}

OperatorMatrix Assembler::at(double t) const
{
    double slack = 1e-9 * (t_end_ - t_start_);
    if (t < t_start_ - slack || t > t_end_ + slack)
        throw std::out_of_range("Hamiltonian requested at t = " + std::to_string(t) +
                                " outside the schedule window [" + std::to_string(t_start_) +
                                ", " + std::to_string(t_end_) + "]");
    OperatorMatrix out;
    assemble_into(t, out.matrix);
    if (!has_loss_) {
        double scale = out.matrix.cwiseAbs().maxCoeff();
        double dev = (out.matrix - out.matrix.adjoint()).cwiseAbs().maxCoeff();
        out.hermitian = dev <= 1e-14 * std::max(scale, 1e-300);
    } else {
        out.hermitian = false;
    }
    return out;
}

OperatorMatrix assemble(const Basis& basis, const Schedule& schedule, double t,
                        const LossParams& loss)
{
    return Assembler(basis, schedule, loss).at(t);
}

std::vector<int> coupled_subspace(const Basis& basis, const Schedule& schedule,
                                  std::span<const int> seeds)
{
    std::vector<std::pair<int, Transition>> lasers;
    for (const auto& p : schedule.pulses) {
        auto key = std::make_pair(p.atom, p.transition);
        if (std::find(lasers.begin(), lasers.end(), key) == lasers.end())
            lasers.push_back(key);
    }

    std::vector<char> seen(static_cast<size_t>(basis.size()), 0);
    std::vector<int> todo(seeds.begin(), seeds.end());
    for (int i : todo) seen[static_cast<size_t>(i)] = 1;

    auto visit = [&](std::optional<int> j) {
        if (j && !seen[static_cast<size_t>(*j)]) {
            seen[static_cast<size_t>(*j)] = 1;
            todo.push_back(*j);
        }
    };

    while (!todo.empty()) {
        int i = todo.back();
        todo.pop_back();
        const BasisState& s = basis.state(i);
        for (const auto& [atom, tr] : lasers) {
            AtomLevel lower = transition_lower(tr), upper = transition_upper(tr);
            if (atom_level(s, atom) == lower) visit(basis.find(with_atom(s, atom, upper)));
            if (atom_level(s, atom) == upper) visit(basis.find(with_atom(s, atom, lower)));
        }
        for (int atom : {1, 2}) {
            double g = atom == 1 ? schedule.g1 : schedule.g2;
            if (g == 0.0) continue;
            if (atom_level(s, atom) == AtomLevel::g1 && s.photons >= 1) {
                BasisState t = with_atom(s, atom, AtomLevel::e);
                t.photons = s.photons - 1;
                visit(basis.find(t));
            }
            if (atom_level(s, atom) == AtomLevel::e && s.photons + 1 <= basis.n_max()) {
                BasisState t = with_atom(s, atom, AtomLevel::g1);
                t.photons = s.photons + 1;
                visit(basis.find(t));
            }
        }
    }

    std::vector<int> out;
    for (int i = 0; i < basis.size(); ++i)
        if (seen[static_cast<size_t>(i)]) out.push_back(i);
    return out;
}

}  // namespace cavpass
