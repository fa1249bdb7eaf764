#pragma once

#include <string>
#include <vector>

#include "nova/opsys.hpp"
#include "nova/report.hpp"

namespace nova {

template <class R>
std::string op_location(const OperatorSystem<R>& s, const OpKey& key, const MultiOp<R>& op) {
    std::string loc = "(k=" + std::to_string(key.k) + ", beta=" + class_str(key.beta);
    if (auto e = op.first_entry()) loc += ", in=" + s.src.tuple_str(e->first);
    return loc + ")";
}

// Composition (g o f)_{k,beta} = sum g_{l,b0} o (f_{k1,b1} (x) ... (x) f_{kl,bl}),
// all decompositions below the shared energy cutoff, l >= 1.
template <class R>
OperatorSystem<R> compose(const OperatorSystem<R>& g, const OperatorSystem<R>& f) {
    if (!(f.tgt == g.src)) throw SpaceMismatch("compose: target(f) != source(g)");
    OperatorSystem<R> out;
    out.src = f.src;
    out.tgt = g.tgt;
    out.group = g.group;
    out.ctx = g.ctx;
    out.kind = SystemKind::Homomorphism;

    std::vector<std::pair<OpKey, const MultiOp<R>*>> fcomps;
    for (auto& [key, op] : f.comps) fcomps.push_back({key, &op});

    for (auto& [gkey, gop] : g.comps) {
        int ell = gkey.k;
        if (ell < 1) continue;
        std::vector<const MultiOp<R>*> blocks(static_cast<size_t>(ell));
        std::vector<int> twists(static_cast<size_t>(ell), 0);
        LabelClass beta = gkey.beta;
        int total_k = 0;
        auto rec = [&](auto&& self, int slot) -> void {
            if (slot == ell) {
                MultiOp<R> term = compose_blocks(gop, f.src, blocks, twists);
                out.accumulate(OpKey{total_k, beta}, term, R(1));
                return;
            }
            for (auto& [fkey, fop] : fcomps) {
                if (total_k + fkey.k > out.ctx.k_max) continue;
                LabelClass nb = add_class(beta, fkey.beta);
                if (!(out.group.energy_of(nb) < out.ctx.e_max)) continue;
                blocks[static_cast<size_t>(slot)] = fop;
                std::swap(beta, nb);
                total_k += fkey.k;
                self(self, slot + 1);
                total_k -= fkey.k;
                std::swap(beta, nb);
            }
        };
        if (out.group.energy_of(gkey.beta) < out.ctx.e_max) rec(rec, 0);
    }
    out.prune_all();
    return out;
}

// Gerstenhaber product (g * h)_{k,beta} = sum g_{l+m+1,b'} o (id_#^l (x) h_{n,b''} (x) id^m).
template <class R>
OperatorSystem<R> star(const OperatorSystem<R>& g, const OperatorSystem<R>& h) {
    if (!(h.src == g.src)) throw SpaceMismatch("star: input spaces differ");
    OperatorSystem<R> out;
    out.src = g.src;
    out.tgt = g.tgt;
    out.group = g.group;
    out.ctx = g.ctx;
    out.kind = SystemKind::Raw;
    for (auto& [gkey, gop] : g.comps) {
        if (gkey.k < 1) continue;
        for (auto& [hkey, hop] : h.comps) {
            LabelClass beta = add_class(gkey.beta, hkey.beta);
            if (!(out.group.energy_of(beta) < out.ctx.e_max)) continue;
            int k = gkey.k - 1 + hkey.k;
            if (k > out.ctx.k_max) continue;
            for (int lambda = 0; lambda < gkey.k; ++lambda)
                out.accumulate(OpKey{k, beta}, insert_at(gop, g.src, hop, lambda, 1), R(1));
        }
    }
    out.prune_all();
    return out;
}

template <class R>
OperatorSystem<R> system_sub(const OperatorSystem<R>& a, const OperatorSystem<R>& b) {
    OperatorSystem<R> out = a;
    for (auto& [key, op] : b.comps) out.accumulate(key, op, R(-1));
    out.prune_all();
    return out;
}

template <class R>
VerificationReport check_degrees(const OperatorSystem<R>& s, const std::string& check) {
    VerificationReport rep{check};
    for (auto& key : s.ordered_keys()) {
        auto& op = *s.find(key.k, key.beta);
        if (!op.homogeneous(s.src, s.tgt, s.expected_degree(key)))
            rep.fail("degree", op_location(s, key, op),
                     "component not homogeneous of degree " + std::to_string(s.expected_degree(key)));
    }
    return rep;
}

template <class R>
VerificationReport check_gapped(const OperatorSystem<R>& s, const std::string& check) {
    VerificationReport rep{check};
    for (auto& key : s.ordered_keys()) {
        auto& op = *s.find(key.k, key.beta);
        if (key.k == 0 && is_zero_class(key.beta))
            rep.fail("gapped:(a)", op_location(s, key, op), "t_{0,0} must vanish");
        if (!is_zero_class(key.beta) && !(s.group.energy_of(key.beta) > 0))
            rep.fail("gapped:(b)", op_location(s, key, op), "nonzero class with energy <= 0");
    }
    return rep;
}

// A-infinity relation m * m = 0 below truncation.
template <class R>
VerificationReport check_ainf(const OperatorSystem<R>& m) {
    VerificationReport rep{"ainf"};
    if (!m.endomorphic()) {
        rep.fail("space", "-", "A-infinity algebra must be endomorphic");
        return rep;
    }
    auto deg = check_degrees(m, "ainf");
    if (!deg.pass) {
        rep.merge(deg);
        return rep;
    }
    rep.merge(check_gapped(m, "ainf"));
    auto sq = star(m, m);
    for (auto& key : sq.ordered_keys()) {
        auto& op = *sq.find(key.k, key.beta);
        rep.fail("A-infinity", op_location(sq, key, op), "(m*m) component nonzero");
    }
    return rep;
}

// Homomorphism relation m_tgt o f = f * m_src below truncation.
template <class R>
VerificationReport check_hom(const OperatorSystem<R>& f, const OperatorSystem<R>& m_src,
                             const OperatorSystem<R>& m_tgt) {
    VerificationReport rep{"hom"};
    if (!(f.src == m_src.src) || !(f.tgt == m_tgt.src)) {
        rep.fail("space", "-", "homomorphism endpoints do not match the algebras");
        return rep;
    }
    auto deg = check_degrees(f, "hom");
    if (!deg.pass) {
        rep.merge(deg);
        return rep;
    }
    auto lhs = compose(m_tgt, f);
    auto rhs = star(f, m_src);
    auto diff = system_sub(lhs, rhs);
    for (auto& key : diff.ordered_keys()) {
        auto& op = *diff.find(key.k, key.beta);
        rep.fail("homomorphism", op_location(diff, key, op), "m o f - f * m' nonzero");
    }
    return rep;
}

// ---- unitality -------------------------------------------------------------

// strict unit: (a0) m_{1,0} e = 0, (a1) m_{2,0}(e,x) = (-1)^{deg x} m_{2,0}(x,e) = x,
// (a2) every other component kills e.
VerificationReport check_unit(const OperatorSystem<Rat>& m, int unit_index);
inline VerificationReport check_unit(const OperatorSystem<Rat>& m) {
    VerificationReport rep{"unit"};
    if (m.src.unit < 0) {
        rep.fail("(I-1)", "-", "no unit declared");
        return rep;
    }
    return check_unit(m, m.src.unit);
}

// full unitality (a2') against every degree-zero basis element
VerificationReport check_full_unit(const OperatorSystem<Rat>& m);

// cyclical unitality of an arbitrary operator system
template <class R>
VerificationReport check_cyclic_unit(const OperatorSystem<R>& t) {
    VerificationReport rep{"cyclic-unit"};
    for (auto& key : t.ordered_keys()) {
        if (key.k < 1) continue;
        int k = key.k - 1;  // CU[t]_{k,beta} uses t_{k+1,beta}
        if (k == 0 && is_zero_class(key.beta)) continue;
        auto& op = *t.find(key.k, key.beta);
        // (e index, reduced tuple) -> out vector
        MultiOp<R> cu;
        cu.arity = k + 1;
        for (auto& [in, row] : op.entries) {
            for (size_t i = 0; i < in.size(); ++i) {
                if (t.src.degree(in[i]) != 0) continue;
                std::vector<int> red;
                red.push_back(in[i]);
                for (size_t a = 0; a < in.size(); ++a)
                    if (a != i) red.push_back(in[a]);
                int parity = 0;
                for (size_t a = 0; a < i; ++a) parity += twist_parity(t.src, in[a]);
                R sgn = (parity & 1) ? R(-1) : R(1);
                for (auto& [out, c] : row) cu.accumulate(red, out, sgn * c);
            }
        }
        if (!cu.is_zero()) {
            auto e = cu.first_entry();
            std::string loc = "(k=" + std::to_string(k) + ", beta=" + class_str(key.beta) +
                              ", e=" + t.src.name(e->first[0]) + ")";
            rep.fail("CU", loc, "cyclic sum of degree-0 insertions nonzero");
        }
    }
    return rep;
}

// divisor axiom with basis-level divisor inputs
template <class R>
VerificationReport check_divisor_axiom(const OperatorSystem<R>& t) {
    VerificationReport rep{"divisor-axiom"};
    if (t.src.divisor_basis.empty() && t.group.boundary_dim() > 0) {
        rep.fail("MissingBoundaryMap", "-", "no divisor inputs declared on the source space");
        return rep;
    }
    if (t.src.divisor_basis.size() != t.group.boundary_dim()) {
        rep.fail("MissingBoundaryMap", "-", "divisor basis size != boundary dimension");
        return rep;
    }
    // collect every (k,beta) with either side potentially nonzero
    std::vector<OpKey> keys;
    for (auto& [key, op] : t.comps) {
        if (key.k >= 1) keys.push_back(OpKey{key.k - 1, key.beta});
        keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    for (auto& key : keys) {
        if (key.k + 1 > t.ctx.k_max) continue;
        if (key.k == 0 && is_zero_class(key.beta)) continue;
        auto db = t.group.boundary_of(key.beta);
        const MultiOp<R>* upper = t.find(key.k + 1, key.beta);
        const MultiOp<R>* lower = t.find(key.k, key.beta);
        for (size_t d = 0; d < t.src.divisor_basis.size(); ++d) {
            int theta = t.src.divisor_basis[d];
            MultiOp<R> lhs;
            lhs.arity = key.k;
            if (upper) {
                for (auto& [in, row] : upper->entries)
                    for (size_t i = 0; i < in.size(); ++i) {
                        if (in[i] != theta) continue;
                        std::vector<int> red;
                        for (size_t a = 0; a < in.size(); ++a)
                            if (a != i) red.push_back(in[a]);
                        for (auto& [out, c] : row) lhs.accumulate(red, out, c);
                    }
            }
            if (lower) lhs.accumulate_op(*lower, R(-Rat(db[d])));
            if (!lhs.is_zero()) {
                auto e = lhs.first_entry();
                std::string loc = "(k=" + std::to_string(key.k) + ", beta=" + class_str(key.beta) +
                                  ", b=" + t.src.name(theta) + ", in=" + t.src.tuple_str(e->first) + ")";
                rep.fail("DA", loc, "divisor axiom equation violated");
            }
        }
    }
    return rep;
}

// Maurer-Cartan evaluation m_*(b) = sum_beta T^{E(beta)} e^{db cap b} m_{0,beta}.
// b is given by its coordinates along the divisor basis of the source space.
std::map<int, NovikovNum> mc_eval(const OperatorSystem<Rat>& m, const std::vector<NovikovNum>& b);

// direct double sum sum_beta T^{E(beta)} sum_k m_{k,beta}(b,...,b), for crosschecks
std::map<int, NovikovNum> mc_eval_direct(const OperatorSystem<Rat>& m, const std::vector<NovikovNum>& b);

// homomorphism unitality (b1)(b2)
VerificationReport check_hom_unit(const OperatorSystem<Rat>& f);

// full UD membership for objects and morphisms
VerificationReport check_ud_object(const OperatorSystem<Rat>& m, const MultiOp<Rat>* declared_diff = nullptr);
VerificationReport check_ud_morphism(const OperatorSystem<Rat>& f);

// two-fold divisor-axiom consequence (coefficient (db cap b)^2 / 2), spot check
VerificationReport check_divisor_axiom_m2(const OperatorSystem<Rat>& t);

}  // namespace nova
