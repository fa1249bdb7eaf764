#pragma once

#include <stdexcept>
#include <vector>

#include "nova/rational.hpp"

namespace nova {

struct DivergenceError : std::runtime_error {
    explicit DivergenceError(const std::string& m) : std::runtime_error(m) {}
};

// Element of the label group in generator coordinates.
using LabelClass = std::vector<long long>;

inline LabelClass zero_class(size_t rank) { return LabelClass(rank, 0); }
inline bool is_zero_class(const LabelClass& b) {
    for (auto x : b)
        if (x) return false;
    return true;
}
inline LabelClass add_class(const LabelClass& a, const LabelClass& b) {
    LabelClass c = a;
    for (size_t i = 0; i < c.size(); ++i) c[i] += b[i];
    return c;
}
inline LabelClass sub_class(const LabelClass& a, const LabelClass& b) {
    LabelClass c = a;
    for (size_t i = 0; i < c.size(); ++i) c[i] -= b[i];
    return c;
}
std::string class_str(const LabelClass& b);

// Label group (G, E, mu) with the boundary map into pi_1 coordinates and a
// declared support (the classes that may carry nonzero operators). The
// geometric pi_2(X, L) is modelled by these three homomorphisms only.
struct LabelGroup {
    size_t rank = 0;
    std::vector<Rat> energy;                       // E: Z^rank -> Q
    std::vector<long long> maslov;                 // mu: Z^rank -> 2Z, per generator
    std::vector<std::vector<long long>> boundary;  // rows: Z^rank -> Z^n
    std::vector<LabelClass> support_generators;

    size_t boundary_dim() const { return boundary.empty() ? 0 : boundary.size(); }

    Rat energy_of(const LabelClass& b) const {
        Rat e(0);
        for (size_t i = 0; i < rank; ++i)
            if (b[i]) e += energy[i] * Rat(b[i]);
        return e;
    }
    long long maslov_of(const LabelClass& b) const {
        long long m = 0;
        for (size_t i = 0; i < rank; ++i) m += maslov[i] * b[i];
        return m;
    }
    std::vector<long long> boundary_of(const LabelClass& b) const {
        std::vector<long long> v(boundary_dim(), 0);
        for (size_t r = 0; r < v.size(); ++r)
            for (size_t i = 0; i < rank; ++i) v[r] += boundary[r][i] * b[i];
        return v;
    }
    Rat boundary_pair(const LabelClass& b, const std::vector<Rat>& covec) const {
        auto db = boundary_of(b);
        Rat s(0);
        for (size_t i = 0; i < db.size(); ++i)
            if (db[i]) s += Rat(db[i]) * covec[i];
        return s;
    }

    void validate() const;

    // All N-linear combinations of support generators with energy < e_max,
    // sorted by (energy, lex coordinates). Contains the zero class.
    std::vector<LabelClass> enumerate_support(const Rat& e_max) const;
};

struct Classification {
    Rat energy;
    long long maslov;
    std::vector<long long> boundary;
};

inline Classification classify(const LabelGroup& g, const LabelClass& b) {
    return {g.energy_of(b), g.maslov_of(b), g.boundary_of(b)};
}

}  // namespace nova
