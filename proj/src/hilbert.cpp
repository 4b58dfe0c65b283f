#include "cavpass/hilbert.hpp"

#include <stdexcept>

namespace cavpass {

char level_letter(AtomLevel level)
{
    switch (level) {
    case AtomLevel::g0: return '0';
    case AtomLevel::ga: return 'a';
    case AtomLevel::g1: return '1';
    case AtomLevel::e: return 'e';
    case AtomLevel::u: return 'u';
    }
    throw std::invalid_argument("level_letter: invalid AtomLevel");
}

AtomLevel level_from_letter(char c)
{
    switch (c) {
    case '0': return AtomLevel::g0;
    case 'a': return AtomLevel::ga;
    case '1': return AtomLevel::g1;
    case 'e': return AtomLevel::e;
    case 'u': return AtomLevel::u;
    }
    throw std::invalid_argument(std::string("level_from_letter: unknown level '") + c + "'");
}

std::string state_label(const BasisState& s)
{
    std::string out;
    out += level_letter(s.atom1);
    out += level_letter(s.atom2);
    out += ';';
    out += std::to_string(s.photons);
    return out;
}

BasisState state_from_label(std::string_view label)
{
    if (label.size() < 4 || label[2] != ';')
        throw std::invalid_argument("state_from_label: expected \"<l1><l2>;<n>\", got \"" +
                                    std::string(label) + "\"");
    BasisState s;
    s.atom1 = level_from_letter(label[0]);
    s.atom2 = level_from_letter(label[1]);
    int n = 0;
    for (size_t k = 3; k < label.size(); ++k) {
        if (label[k] < '0' || label[k] > '9')
            throw std::invalid_argument("state_from_label: bad photon number in \"" +
                                        std::string(label) + "\"");
        n = 10 * n + (label[k] - '0');
    }
    s.photons = n;
    return s;
}

int charge_of(const BasisState& s)
{
    int ones = (s.atom1 == AtomLevel::g1 ? 1 : 0) + (s.atom2 == AtomLevel::g1 ? 1 : 0);
    return s.photons - ones;
}

Basis::Basis(int n_max, bool include_u) : n_max_(n_max), include_u_(include_u)
{
    if (n_max < 2)
        throw std::invalid_argument(
            "Basis: n_max must be >= 2 so that the two-photon dark-state component "
            "|11>|2> is representable (got n_max = " + std::to_string(n_max) + ")");
    levels_ = include_u ? 5 : 4;
    states_.reserve(static_cast<size_t>(levels_ * levels_ * (n_max + 1)));
    for (int a1 = 0; a1 < levels_; ++a1)
        for (int a2 = 0; a2 < levels_; ++a2)
            for (int n = 0; n <= n_max; ++n)
                states_.push_back(
                    {static_cast<AtomLevel>(a1), static_cast<AtomLevel>(a2), n});
}

bool Basis::contains(const BasisState& s) const
{
    int a1 = static_cast<int>(s.atom1);
    int a2 = static_cast<int>(s.atom2);
    return a1 >= 0 && a1 < levels_ && a2 >= 0 && a2 < levels_ && s.photons >= 0 &&
           s.photons <= n_max_;
}

std::optional<int> Basis::find(const BasisState& s) const
{
    if (!contains(s)) return std::nullopt;
    int a1 = static_cast<int>(s.atom1);
    int a2 = static_cast<int>(s.atom2);
    return (a1 * levels_ + a2) * (n_max_ + 1) + s.photons;
}

int Basis::index_of(const BasisState& s) const
{
    auto i = find(s);
    if (!i)
        throw std::out_of_range("Basis::index_of: state " + state_label(s) +
                                " not in basis (n_max=" + std::to_string(n_max_) +
                                ", include_u=" + (include_u_ ? "true" : "false") + ")");
    return *i;
}

Basis build_basis(int n_max, bool include_u) { return Basis(n_max, include_u); }

std::map<int, std::vector<int>> block_partition(const Basis& basis)
{
    std::map<int, std::vector<int>> blocks;
    for (int i = 0; i < basis.size(); ++i) blocks[charge_of(basis.state(i))].push_back(i);
    return blocks;
}

cdouble StateVector::amplitude(const BasisState& s) const
{
    auto i = basis->find(s);
    return i ? amplitudes[*i] : cdouble{0.0, 0.0};
}

double StateVector::population(const BasisState& s) const
{
    return std::norm(amplitude(s));
}

StateVector basis_vector(const Basis& basis, const BasisState& s)
{
    StateVector v;
    v.basis = &basis;
    v.amplitudes = Eigen::VectorXcd::Zero(basis.size());
    v.amplitudes[basis.index_of(s)] = 1.0;
    return v;
}

}  // namespace cavpass
