// hilbert.hpp — product basis of two five-level atoms and a truncated cavity mode,
// with the conserved-charge block decomposition.
#pragma once

#include <Eigen/Dense>

#include <compare>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cavpass {

using cdouble = std::complex<double>;

// Atomic levels of the five-level scheme: three ground states |0>, |a>, |1>,
// the cavity-coupled excited state |e>, and the auxiliary excited state |u>
// (used only by the shelving steps of the CNOT sequence).
enum class AtomLevel : int { g0 = 0, ga = 1, g1 = 2, e = 3, u = 4 };

char level_letter(AtomLevel level);
AtomLevel level_from_letter(char c);

// One product ket |atom1 atom2>|photons>.
struct BasisState {
    AtomLevel atom1{AtomLevel::g0};
    AtomLevel atom2{AtomLevel::g0};
    int photons{0};

    friend auto operator<=>(const BasisState&, const BasisState&) = default;
};

// Label format "a1;0": atom letters then photon number.
std::string state_label(const BasisState& s);
BasisState state_from_label(std::string_view label);

// Conserved charge C = photons - #(atoms in |1>).  Every swap-model coupling
// (lasers 0-e and a-e at fixed photon number, cavity exchange |1,n+1><->|e,n>)
// preserves C; the 1-u shelving laser of the CNOT does not (it moves |11>|0>
// amplitude between blocks, which is its job).
int charge_of(const BasisState& s);

// Enumerated product basis, lexicographic in (atom1, atom2, photons) so that
// indices, matrices and output files are reproducible bit-for-bit.
class Basis {
public:
    Basis(int n_max, bool include_u);

    int n_max() const { return n_max_; }
    bool include_u() const { return include_u_; }
    int size() const { return static_cast<int>(states_.size()); }
    const std::vector<BasisState>& states() const { return states_; }
    const BasisState& state(int i) const { return states_[static_cast<size_t>(i)]; }

    bool contains(const BasisState& s) const;
    std::optional<int> find(const BasisState& s) const;
    int index_of(const BasisState& s) const;  // throws std::out_of_range if absent

private:
    int n_max_;
    bool include_u_;
    int levels_;
    std::vector<BasisState> states_;
};

// n_max >= 2 is required: the two-photon dark-state component |11>|2> of the
// 16-dimensional block must be representable.
Basis build_basis(int n_max, bool include_u = false);

// Basis indices grouped by charge, keys ascending, indices ascending.
std::map<int, std::vector<int>> block_partition(const Basis& basis);

// Complex amplitudes over an enumerated basis.
struct StateVector {
    const Basis* basis{nullptr};
    Eigen::VectorXcd amplitudes;

    double norm() const { return amplitudes.norm(); }
    cdouble amplitude(const BasisState& s) const;
    double population(const BasisState& s) const;
};

StateVector basis_vector(const Basis& basis, const BasisState& s);

}  // namespace cavpass
