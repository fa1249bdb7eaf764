#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nova/labels.hpp"
#include "nova/poly.hpp"

namespace nova {

// Decorated stable rooted ribbon tree. A tree is either the trivial
// root-to-leaf edge, or an interior vertex with a label-class decoration and
// an ordered list of subtrees. Stability: a 0-decorated vertex has at least
// two children.
struct DecoratedTree {
    bool leaf = false;
    LabelClass decoration;
    std::vector<DecoratedTree> children;

    static DecoratedTree make_leaf() {
        DecoratedTree t;
        t.leaf = true;
        return t;
    }

    int num_inputs() const {
        if (leaf) return 1;
        int k = 0;
        for (auto& c : children) k += c.num_inputs();
        return k;
    }
    int num_interior() const {
        if (leaf) return 0;
        int n = 1;
        for (auto& c : children) n += c.num_interior();
        return n;
    }
    LabelClass total_class(size_t rank) const {
        LabelClass b = zero_class(rank);
        if (leaf) return b;
        b = decoration.empty() ? zero_class(rank) : decoration;
        for (auto& c : children) b = add_class(b, c.total_class(rank));
        return b;
    }
    bool stable(const LabelGroup& g) const {
        if (leaf) return true;
        if (is_zero_class(decoration) && children.size() < 2) return false;
        if (!(g.energy_of(decoration) >= 0)) return false;
        for (auto& c : children)
            if (!c.stable(g)) return false;
        return true;
    }
    std::string canonical() const {
        if (leaf) return "*";
        std::string s = "(" + class_str(decoration) + ";";
        for (auto& c : children) s += c.canonical();
        return s + ")";
    }
};

// Complete duplicate-free list of T(k, beta), decorations in the support
// monoid below e_max, ordered by (interior vertex count, canonical string).
std::vector<DecoratedTree> enumerate_trees(int k, const LabelClass& beta, const LabelGroup& group,
                                           const Rat& e_max);

// Exact volume of the time-allocation polytope of T over [a, b].
Rat allocation_volume(const DecoratedTree& t, const Rat& a, const Rat& b);

// Exact iterated integral of a polynomial in the tau variables over the
// allocation polytope. Variables are indexed by the pre-order numbering of
// interior vertices; the integrand must use exactly that many variables.
Rat integrate_allocation(const DecoratedTree& t, const MPoly& integrand, const Rat& a, const Rat& b);

// Pre-order parent indices of interior vertices (-1 for the vertex nearest
// the root); empty for the trivial tree.
std::vector<int> interior_parents(const DecoratedTree& t);

// Independent count of stable planar rooted trees with trivial decorations
// (every interior vertex >= 2 children), via the convolution recurrence.
mpz_class super_catalan_count(int k);

}  // namespace nova
