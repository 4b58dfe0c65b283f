// hamiltonian.hpp — resonant rotating-wave Hamiltonian on a Basis from a Schedule:
// laser couplings Omega(t) e^{i phi} |e><x|, cavity exchange g sqrt(n+1) between
// |1,n+1> and |e,n>, optional non-Hermitian loss diagonal.
#pragma once

#include "cavpass/hilbert.hpp"
#include "cavpass/pulses.hpp"

#include <span>
#include <vector>

namespace cavpass {

struct LossParams {
    double gamma_e{0.0};  // decay rate of |e>
    double gamma_u{0.0};  // decay rate of |u>
    double kappa{0.0};    // cavity photon decay rate

    bool any() const { return gamma_e > 0.0 || gamma_u > 0.0 || kappa > 0.0; }
};

struct OperatorMatrix {
    Eigen::MatrixXcd matrix;
    bool hermitian{true};

    int dim() const { return static_cast<int>(matrix.rows()); }
};

// Precomputes the coupling structure once; evaluating H(t) is then a weighted
// sum of per-pulse templates plus the constant cavity part.  Pure in
// (basis, schedule, t, loss): safe to evaluate at many times in parallel.
// An Assembler restricted to a subspace keeps only couplings internal to it.
class Assembler {
public:
    Assembler(const Basis& basis, const Schedule& schedule, const LossParams& loss = {});
    Assembler(const Basis& basis, const Schedule& schedule, const LossParams& loss,
              std::vector<int> subspace);

    int dim() const { return static_cast<int>(subspace_.size()); }
    const std::vector<int>& subspace() const { return subspace_; }
    bool hermitian() const { return !has_loss_; }
    double t_start() const { return t_start_; }
    double t_end() const { return t_end_; }

    // Fills H (resized to dim x dim) without the window check; hot path.
    void assemble_into(double t, Eigen::MatrixXcd& H) const;
    // Window-checked single evaluation.
    OperatorMatrix at(double t) const;

private:
    struct Entry {
        int row, col;
        cdouble value;
    };

    void build(const Basis& basis, const Schedule& schedule, const LossParams& loss);

    const Schedule* schedule_;
    std::vector<int> subspace_;
    std::vector<std::vector<Entry>> pulse_entries_;  // one list per schedule pulse
    std::vector<Entry> cavity_entries_;
    Eigen::VectorXcd loss_diag_;
    bool has_loss_{false};
    double t_start_{0.0}, t_end_{0.0};
};

// Single-shot assembly with window check (errors if t is outside the schedule
// window or the schedule drives |u> on a basis without it).
OperatorMatrix assemble(const Basis& basis, const Schedule& schedule, double t,
                        const LossParams& loss = {});

// Closure of `seeds` under every coupling the schedule can exercise (all pulse
// transitions plus the cavity).  For u-free schedules this reproduces the charge
// block of the seeds; the 1-u shelving laser bridges blocks.
std::vector<int> coupled_subspace(const Basis& basis, const Schedule& schedule,
                                  std::span<const int> seeds);

}  // namespace cavpass
