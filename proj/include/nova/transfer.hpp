#pragma once

#include <optional>

#include "nova/contraction.hpp"

namespace nova {

struct PartialHomError : std::runtime_error {
    explicit PartialHomError(const std::string& m) : std::runtime_error(m) {}
};
struct ConditionError : std::runtime_error {
    explicit ConditionError(const std::string& m) : std::runtime_error(m) {}
};
struct NotQuasiIso : std::runtime_error {
    NotQuasiIso() : std::runtime_error("f_{1,0} is not a quasi-isomorphism") {}
};
struct Inconsistent : std::runtime_error {
    explicit Inconsistent(const std::string& m) : std::runtime_error(m) {}
};

// A length-zero-energy operator phi in CC_{k,0}(src -> tgt); the bar
// differential uses the two (1,0)-differentials.
MultiOp<Rat> bar_differential(const MultiOp<Rat>& phi, const GradedSpace& src, const GradedSpace& tgt,
                              const MultiOp<Rat>& d_src, const MultiOp<Rat>& d_tgt);

// N-labelled family in CC_beta, a fixed label class with one operator per arity.
struct BetaFamily {
    LabelClass beta;
    std::map<int, MultiOp<Rat>> comps;  // arity -> op

    const MultiOp<Rat>* find(int k) const {
        auto it = comps.find(k);
        return it == comps.end() ? nullptr : &it->second;
    }
    bool is_zero() const {
        for (auto& [k, op] : comps)
            if (!op.is_zero()) return false;
        return true;
    }
    void prune() {
        for (auto it = comps.begin(); it != comps.end();)
            it = it->second.is_zero() ? comps.erase(it) : std::next(it);
    }
};

// delta_gbar on CC_beta, for gbar the energy-zero part of an A-infinity
// homomorphism (mod T^{E=0}); p is the fixed shifted degree of the family.
BetaFamily twisted_differential(const OperatorSystem<Rat>& gbar, const OperatorSystem<Rat>& m_src,
                                const OperatorSystem<Rat>& m_tgt, const BetaFamily& phi, int p);

// Obstruction to extending an A_{k-1} homomorphism (energy-zero part) by one
// more arity; throws PartialHomError if the input fails its own relation.
MultiOp<Rat> obstruction_length(const OperatorSystem<Rat>& gbar, const OperatorSystem<Rat>& m_src,
                                const OperatorSystem<Rat>& m_tgt, int k);

// Obstruction to extending an A-infinity homomorphism modulo T^{E(B)} across
// the class B; returns the CC_B family.
BetaFamily obstruction_energy(const OperatorSystem<Rat>& g, const OperatorSystem<Rat>& m_src,
                              const OperatorSystem<Rat>& m_tgt, const LabelClass& B);

// The explicit corrector of the cyclic sublemma: from u_0..u_k satisfying
// (E1) consecutively and (E2)(E3) individually, builds u_{k+1} with the same
// properties. beta must be nonzero.
MultiOp<Rat> cyclic_corrector(const std::vector<MultiOp<Rat>>& u, const LabelClass& beta,
                              const LabelGroup& group, const GradedSpace& src, const GradedSpace& tgt);

// (E1)/(E2)/(E3) helpers on families
VerificationReport check_E1(const BetaFamily& u, const LabelGroup& group, const GradedSpace& src,
                            const GradedSpace& tgt, int k_max);
VerificationReport check_E2(const BetaFamily& u, const GradedSpace& src);
VerificationReport check_E3(const BetaFamily& u, const GradedSpace& src);

// Exact linear solve for bar-delta(x) = target in CC_{k,0}; if `ud`, the
// solution is constrained to CC^ud (conditions (L1)(L2)(L3)). Witness choice
// is deterministic: free variables vanish in the canonical coordinate order.
std::optional<MultiOp<Rat>> solve_coboundary_length(const OperatorSystem<Rat>& m_src,
                                                    const OperatorSystem<Rat>& m_tgt, int k,
                                                    const MultiOp<Rat>& target, bool ud);

// Exact linear solve for delta_gbar(x) = target in CC_B; if `ud`, constrained
// by (E1)(E2)(E3).
std::optional<BetaFamily> solve_coboundary_energy(const OperatorSystem<Rat>& gbar,
                                                  const OperatorSystem<Rat>& m_src,
                                                  const OperatorSystem<Rat>& m_tgt, const LabelClass& B,
                                                  const BetaFamily& target, bool ud);

struct HomotopyInverse {
    OperatorSystem<Rat> g;  // from tgt(f) back to src(f)
    Mat h;                  // g_{1,0} f_{1,0} - id = d h + h d on src(f)
    bool exact_inverse = false;   // compose(g, f) == id exactly
    bool ud_refined = true;       // every witness satisfied the ud constraints
};

// Whitehead inverse at truncation level by the double induction: length
// filtration through o_k, then energy filtration through o_B. The output g
// passes check_hom and its (1,0) part inverts f_{1,0} up to the returned
// chain homotopy.
HomotopyInverse homotopy_inverse(const OperatorSystem<Rat>& f, const OperatorSystem<Rat>& m_src,
                                 const OperatorSystem<Rat>& m_tgt);

}  // namespace nova
