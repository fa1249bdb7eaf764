#include "nova/ainf.hpp"

#include <set>

namespace nova {

VerificationReport check_unit(const OperatorSystem<Rat>& m, int e) {
    VerificationReport rep{"unit"};
    if (m.src.degree(e) != 0) throw DegreeError("unit candidate must have degree 0");
    LabelClass z = zero_class(m.group.rank);
    // (a0)
    if (auto* d = m.find(1, z)) {
        auto it = d->entries.find({e});
        if (it != d->entries.end())
            rep.fail("(a0)", "(k=1, beta=0, in=[" + m.src.name(e) + "])", "m_{1,0}(1) != 0");
    }
    // (a1)
    auto* m2 = m.find(2, z);
    auto row_equals = [&](const std::vector<int>& in, int x, const Rat& scale) {
        std::map<int, Rat> got;
        if (m2) {
            auto it = m2->entries.find(in);
            if (it != m2->entries.end()) got = it->second;
        }
        std::map<int, Rat> want;
        if (scale != 0) want[x] = scale;
        return got == want;
    };
    for (size_t xi = 0; xi < m.src.dim(); ++xi) {
        int x = static_cast<int>(xi);
        if (!row_equals({e, x}, x, Rat(1)))
            rep.fail("(a1)", "(k=2, beta=0, in=[" + m.src.name(e) + "," + m.src.name(x) + "])",
                     "m_{2,0}(1,x) != x");
        Rat s = (m.src.degree(x) % 2 == 0) ? Rat(1) : Rat(-1);  // m(x,1) = (-1)^{deg x} x
        if (!row_equals({x, e}, x, s))
            rep.fail("(a1)", "(k=2, beta=0, in=[" + m.src.name(x) + "," + m.src.name(e) + "])",
                     "(-1)^{deg x} m_{2,0}(x,1) != x");
    }
    // (a2)
    for (auto& key : m.ordered_keys()) {
        if (is_zero_class(key.beta) && (key.k == 1 || key.k == 2)) continue;
        auto& op = *m.find(key.k, key.beta);
        for (auto& [in, row] : op.entries)
            for (int idx : in)
                if (idx == e) {
                    rep.fail("(a2)", op_location(m, key, op), "unit insertion does not vanish");
                    goto next_comp;
                }
    next_comp:;
    }
    return rep;
}

VerificationReport check_full_unit(const OperatorSystem<Rat>& m) {
    VerificationReport rep{"full-unit"};
    for (auto& key : m.ordered_keys()) {
        if (is_zero_class(key.beta) && (key.k == 1 || key.k == 2)) continue;
        auto& op = *m.find(key.k, key.beta);
        for (auto& [in, row] : op.entries)
            for (int idx : in)
                if (m.src.degree(idx) == 0) {
                    rep.fail("(a2')", op_location(m, key, op),
                             "degree-0 insertion " + m.src.name(idx) + " does not vanish");
                    goto next_comp;
                }
    next_comp:;
    }
    return rep;
}

VerificationReport check_hom_unit(const OperatorSystem<Rat>& f) {
    VerificationReport rep{"hom-unit"};
    if (f.src.unit < 0 || f.tgt.unit < 0) {
        rep.fail("(b1)", "-", "source or target unit missing");
        return rep;
    }
    LabelClass z = zero_class(f.group.rank);
    auto* f1 = f.find(1, z);
    bool b1 = false;
    if (f1) {
        auto it = f1->entries.find({f.src.unit});
        if (it != f1->entries.end() && it->second.size() == 1 && it->second.count(f.tgt.unit) &&
            it->second.at(f.tgt.unit) == 1)
            b1 = true;
    }
    if (!b1) rep.fail("(b1)", "(k=1, beta=0)", "f_{1,0}(1) != 1");
    for (auto& key : f.ordered_keys()) {
        if (is_zero_class(key.beta) && key.k == 1) continue;
        auto& op = *f.find(key.k, key.beta);
        for (auto& [in, row] : op.entries)
            for (int idx : in)
                if (idx == f.src.unit) {
                    rep.fail("(b2)", op_location(f, key, op), "unit insertion does not vanish");
                    goto next_comp;
                }
    next_comp:;
    }
    return rep;
}

VerificationReport check_ud_object(const OperatorSystem<Rat>& m, const MultiOp<Rat>* declared_diff) {
    VerificationReport rep{"ud-object"};
    auto deg = check_degrees(m, "degree");
    if (!deg.pass) {
        rep.pass = false;
        for (auto& fdg : deg.findings) rep.findings.push_back(fdg);
    }
    rep.merge(check_gapped(m, "gapped"));
    // support confinement
    auto monoid = m.group.enumerate_support(m.ctx.e_max);
    std::set<LabelClass> allowed(monoid.begin(), monoid.end());
    for (auto& key : m.ordered_keys())
        if (!allowed.count(key.beta))
            rep.fail("support", "(beta=" + class_str(key.beta) + ")", "class outside the support monoid");
    // (I-0)
    if (declared_diff) {
        auto* d = m.find(1, zero_class(m.group.rank));
        MultiOp<Rat> zero1;
        zero1.arity = 1;
        const MultiOp<Rat>& got = d ? *d : zero1;
        if (!(got == *declared_diff))
            rep.fail("(I-0)", "(k=1, beta=0)", "m_{1,0} differs from the declared differential");
    }
    // (I-1)
    if (m.src.unit < 0)
        rep.fail("(I-1)", "-", "no unit declared");
    else {
        auto u = check_unit(m, m.src.unit);
        if (!u.pass) {
            rep.pass = false;
            for (auto& fdg : u.findings)
                rep.findings.push_back({"(I-1):" + fdg.condition, fdg.location, fdg.detail});
        }
    }
    // (I-2)
    auto cu = check_cyclic_unit(m);
    if (!cu.pass) {
        rep.pass = false;
        for (auto& fdg : cu.findings)
            rep.findings.push_back({"(I-2):" + fdg.condition, fdg.location, fdg.detail});
    }
    // (I-3)
    auto da = check_divisor_axiom(m);
    if (!da.pass) {
        rep.pass = false;
        for (auto& fdg : da.findings)
            rep.findings.push_back({"(I-3):" + fdg.condition, fdg.location, fdg.detail});
    }
    // (I-5)
    for (auto& key : m.ordered_keys())
        if (m.group.maslov_of(key.beta) < 0)
            rep.fail("(I-5)", "(beta=" + class_str(key.beta) + ")", "negative Maslov support");
    return rep;
}

VerificationReport check_ud_morphism(const OperatorSystem<Rat>& f) {
    VerificationReport rep{"ud-morphism"};
    auto deg = check_degrees(f, "degree");
    if (!deg.pass) {
        rep.pass = false;
        for (auto& fdg : deg.findings) rep.findings.push_back(fdg);
    }
    rep.merge(check_gapped(f, "gapped"));
    // (II-1)
    auto u = check_hom_unit(f);
    if (!u.pass) {
        rep.pass = false;
        for (auto& fdg : u.findings)
            rep.findings.push_back({"(II-1):" + fdg.condition, fdg.location, fdg.detail});
    }
    // (II-2)
    auto cu = check_cyclic_unit(f);
    if (!cu.pass) {
        rep.pass = false;
        for (auto& fdg : cu.findings)
            rep.findings.push_back({"(II-2):" + fdg.condition, fdg.location, fdg.detail});
    }
    // (II-3)
    auto da = check_divisor_axiom(f);
    if (!da.pass) {
        rep.pass = false;
        for (auto& fdg : da.findings)
            rep.findings.push_back({"(II-3):" + fdg.condition, fdg.location, fdg.detail});
    }
    // (II-4): cap(db, f_{1,0}(b)) == cap(db, b) for every divisor input and
    // every support generator's boundary
    if (f.src.divisor_basis.size() == f.group.boundary_dim() &&
        f.tgt.divisor_basis.size() == f.group.boundary_dim()) {
        auto* f1 = f.find(1, zero_class(f.group.rank));
        for (size_t d = 0; d < f.src.divisor_basis.size(); ++d) {
            int theta = f.src.divisor_basis[d];
            std::map<int, Rat> image;
            if (f1) {
                auto it = f1->entries.find({theta});
                if (it != f1->entries.end()) image = it->second;
            }
            // expand the image over the target divisor basis
            std::vector<Rat> coords(f.tgt.divisor_basis.size(), Rat(0));
            bool expressible = true;
            for (auto& [out, c] : image) {
                bool found = false;
                for (size_t j = 0; j < f.tgt.divisor_basis.size(); ++j)
                    if (f.tgt.divisor_basis[j] == out) {
                        coords[j] = c;
                        found = true;
                        break;
                    }
                if (!found) expressible = false;
            }
            if (!expressible) {
                rep.fail("(II-4)", "(b=" + f.src.name(theta) + ")",
                         "image of a divisor input is not a combination of divisor inputs");
                continue;
            }
            for (auto& g : f.group.support_generators) {
                auto dg = f.group.boundary_of(g);
                Rat lhs(0);
                for (size_t j = 0; j < coords.size(); ++j) lhs += coords[j] * Rat(dg[j]);
                if (lhs != Rat(dg[d]))
                    rep.fail("(II-4)", "(b=" + f.src.name(theta) + ", beta=" + class_str(g) + ")",
                             "cap(db, f(b)) != cap(db, b)");
            }
        }
    }
    // (II-5)
    for (auto& key : f.ordered_keys())
        if (f.group.maslov_of(key.beta) < 0)
            rep.fail("(II-5)", "(beta=" + class_str(key.beta) + ")", "negative Maslov support");
    return rep;
}

std::map<int, NovikovNum> mc_eval(const OperatorSystem<Rat>& m, const std::vector<NovikovNum>& b) {
    const auto& ctx = m.ctx;
    if (b.size() != m.src.divisor_basis.size()) throw DomainError("mc_eval: wrong number of coordinates");
    for (auto& c : b)
        if (!c.is_zero() && !(*c.valuation() > 0))
            throw DomainError("mc_eval: coordinates must have positive valuation in exact mode");
    std::map<int, NovikovNum> out;
    for (auto& key : m.ordered_keys()) {
        if (key.k != 0) continue;
        auto& op = *m.find(0, key.beta);
        Rat e = m.group.energy_of(key.beta);
        if (!(e < ctx.e_max)) continue;
        auto db = m.group.boundary_of(key.beta);
        NovikovNum pairing;  // db cap b in Lambda_+
        for (size_t d = 0; d < b.size(); ++d)
            pairing = add(pairing, scale(Rat(db[d]), b[d], ctx), ctx);
        NovikovNum factor = mul(NovikovNum::t_power(e, ctx), exp_plus(pairing, ctx), ctx);
        auto it = op.entries.find({});
        if (it == op.entries.end()) continue;
        for (auto& [o, c] : it->second) {
            auto& acc = out[o];
            acc = add(acc, scale(c, factor, ctx), ctx);
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

std::map<int, NovikovNum> mc_eval_direct(const OperatorSystem<Rat>& m, const std::vector<NovikovNum>& b) {
    const auto& ctx = m.ctx;
    // b as a vector over the source basis
    std::vector<NovikovNum> vec(m.src.dim());
    for (size_t d = 0; d < m.src.divisor_basis.size(); ++d) vec[static_cast<size_t>(m.src.divisor_basis[d])] = b[d];
    std::map<int, NovikovNum> out;
    for (auto& key : m.ordered_keys()) {
        auto& op = *m.find(key.k, key.beta);
        Rat e = m.group.energy_of(key.beta);
        NovikovNum tpow = NovikovNum::t_power(e, ctx);
        for (auto& [in, row] : op.entries) {
            NovikovNum prod = NovikovNum::one(ctx);
            for (int idx : in) {
                prod = mul(prod, vec[static_cast<size_t>(idx)], ctx);
                if (prod.is_zero()) break;
            }
            if (prod.is_zero()) continue;
            prod = mul(prod, tpow, ctx);
            for (auto& [o, c] : row) {
                auto& acc = out[o];
                acc = add(acc, scale(c, prod, ctx), ctx);
            }
        }
    }
    for (auto it = out.begin(); it != out.end();)
        it = it->second.is_zero() ? out.erase(it) : std::next(it);
    return out;
}

VerificationReport check_divisor_axiom_m2(const OperatorSystem<Rat>& t) {
    VerificationReport rep{"divisor-axiom-m2"};
    std::vector<OpKey> keys;
    for (auto& [key, op] : t.comps) {
        if (key.k >= 2) keys.push_back(OpKey{key.k - 2, key.beta});
        keys.push_back(key);
    }
    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    MultiOp<Rat> empty_op;
    for (auto& base : keys) {
        int k = base.k;
        if (k + 2 > t.ctx.k_max) continue;
        if (k == 0 && is_zero_class(base.beta)) continue;
        OpKey key{k + 2, base.beta};
        const MultiOp<Rat>* up = t.find(key.k, key.beta);
        empty_op.arity = key.k;
        const auto& op = up ? *up : empty_op;
        auto db = t.group.boundary_of(key.beta);
        for (size_t d = 0; d < t.src.divisor_basis.size(); ++d) {
            int theta = t.src.divisor_basis[d];
            MultiOp<Rat> lhs;
            lhs.arity = k;
            for (auto& [in, row] : op.entries)
                for (size_t i = 0; i < in.size(); ++i) {
                    if (in[i] != theta) continue;
                    for (size_t j = i + 1; j < in.size(); ++j) {
                        if (in[j] != theta) continue;
                        std::vector<int> red;
                        for (size_t a = 0; a < in.size(); ++a)
                            if (a != i && a != j) red.push_back(in[a]);
                        for (auto& [out, c] : row) lhs.accumulate(red, out, c);
                    }
                }
            if (auto* low = t.find(k, key.beta))
                lhs.accumulate_op(*low, -Rat(db[d]) * Rat(db[d]) / 2);
            if (!lhs.is_zero())
                rep.fail("DA-m2", "(k=" + std::to_string(k) + ", beta=" + class_str(key.beta) +
                                      ", b=" + t.src.name(theta) + ")",
                         "two-fold divisor identity violated");
        }
    }
    return rep;
}

}  // namespace nova
