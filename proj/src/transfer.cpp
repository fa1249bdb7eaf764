#include "nova/transfer.hpp"

#include <functional>

namespace nova {

namespace {

std::optional<int> pure_degree(const MultiOp<Rat>& op, const GradedSpace& src, const GradedSpace& tgt) {
    std::optional<int> deg;
    for (auto& [in, row] : op.entries) {
        int din = 0;
        for (int i : in) din += src.degree(i);
        for (auto& [out, c] : row) {
            int d = tgt.degree(out) - din;
            if (!deg)
                deg = d;
            else if (*deg != d)
                return std::nullopt;
        }
    }
    return deg ? deg : std::optional<int>(0);
}

MultiOp<Rat> postcompose_op(const MultiOp<Rat>& outer1, const MultiOp<Rat>& op) {
    // outer1 has arity 1; result = outer1 o op
    MultiOp<Rat> out;
    out.arity = op.arity;
    for (auto& [in, row] : op.entries)
        for (auto& [o, c] : row) {
            auto it = outer1.entries.find({o});
            if (it == outer1.entries.end()) continue;
            for (auto& [oo, cc] : it->second) out.accumulate(in, oo, c * cc);
        }
    return out;
}

OperatorSystem<Rat> energy_zero_part(const OperatorSystem<Rat>& s) {
    OperatorSystem<Rat> out = s;
    out.comps.clear();
    for (auto& [key, op] : s.comps)
        if (is_zero_class(key.beta)) out.comps[key] = op;
    return out;
}

OperatorSystem<Rat> below_energy(const OperatorSystem<Rat>& s, const Rat& e) {
    OperatorSystem<Rat> out = s;
    out.comps.clear();
    for (auto& [key, op] : s.comps)
        if (s.group.energy_of(key.beta) < e) out.comps[key] = op;
    return out;
}

// sparse full elimination; free variables are zero
std::optional<std::vector<Rat>> sparse_solve(std::vector<std::map<int, Rat>> rows, std::vector<Rat> rhs,
                                             int ncols) {
    std::vector<std::pair<int, int>> pivots;  // (col, row)
    std::vector<bool> used(rows.size(), false);
    while (true) {
        int best = -1;
        size_t best_size = 0;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (used[r] || rows[r].empty()) continue;
            if (best < 0 || rows[r].size() < best_size) {
                best = static_cast<int>(r);
                best_size = rows[r].size();
            }
        }
        if (best < 0) break;
        int pr = best;
        int pc = rows[static_cast<size_t>(pr)].begin()->first;
        Rat pv = rows[static_cast<size_t>(pr)].begin()->second;
        // normalize
        for (auto& [c, v] : rows[static_cast<size_t>(pr)]) v /= pv;
        rhs[static_cast<size_t>(pr)] /= pv;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (static_cast<int>(r) == pr) continue;
            auto it = rows[r].find(pc);
            if (it == rows[r].end()) continue;
            Rat f = it->second;
            for (auto& [c, v] : rows[static_cast<size_t>(pr)]) {
                auto jt = rows[r].find(c);
                if (jt == rows[r].end()) {
                    Rat nv = -f * v;
                    if (nv != 0) rows[r][c] = nv;
                } else {
                    jt->second -= f * v;
                    if (jt->second == 0) rows[r].erase(jt);
                }
            }
            rhs[r] -= f * rhs[static_cast<size_t>(pr)];
        }
        used[static_cast<size_t>(pr)] = true;
        pivots.push_back({pc, pr});
    }
    for (size_t r = 0; r < rows.size(); ++r)
        if (rows[r].empty() && rhs[r] != 0) return std::nullopt;
    std::vector<Rat> x(static_cast<size_t>(ncols), Rat(0));
    for (auto& [c, r] : pivots) x[static_cast<size_t>(c)] = rhs[static_cast<size_t>(r)];
    return x;
}

// coordinate bookkeeping for operator-valued unknowns
struct CoordSpace {
    std::map<std::pair<std::vector<int>, int>, int> ids;  // ((in tuple, out), column)
    std::vector<std::pair<std::vector<int>, int>> coords;
    int id(const std::vector<int>& in, int out) {
        auto key = std::make_pair(in, out);
        auto it = ids.find(key);
        if (it != ids.end()) return it->second;
        int n = static_cast<int>(coords.size());
        ids[key] = n;
        coords.push_back(key);
        return n;
    }
};

void for_each_tuple(size_t dim, int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> t(static_cast<size_t>(k), 0);
    std::function<void(int)> rec = [&](int pos) {
        if (pos == k) {
            fn(t);
            return;
        }
        for (size_t i = 0; i < dim; ++i) {
            t[static_cast<size_t>(pos)] = static_cast<int>(i);
            rec(pos + 1);
        }
    };
    rec(0);
}

}  // namespace

MultiOp<Rat> bar_differential(const MultiOp<Rat>& phi, const GradedSpace& src, const GradedSpace& tgt,
                              const MultiOp<Rat>& d_src, const MultiOp<Rat>& d_tgt) {
    auto deg = pure_degree(phi, src, tgt);
    if (!deg) throw DegreeError("bar_differential: mixed-degree operator");
    int k = phi.arity;
    MultiOp<Rat> out = postcompose_op(d_tgt, phi);
    out.arity = k;
    int sgn_exp = *deg - 1 + k;  // shifted operator degree
    Rat sgn = (sgn_exp % 2 == 0) ? Rat(-1) : Rat(1);  // -(-1)^{deg'}
    for (int i = 0; i < k; ++i) out.accumulate_op(insert_at(phi, src, d_src, i, 1), sgn);
    return out;
}

BetaFamily twisted_differential(const OperatorSystem<Rat>& gbar, const OperatorSystem<Rat>& m_src,
                                const OperatorSystem<Rat>& m_tgt, const BetaFamily& phi, int p) {
    BetaFamily out;
    out.beta = phi.beta;
    const GradedSpace& S = gbar.src;  // source space of g and phi
    // first part: sum m_{l,0} o (g^{#p} ... g^{#p}, phi_{k_i}, g ... g)
    for (auto& [mkey, mop] : m_tgt.comps) {
        if (!is_zero_class(mkey.beta) || mkey.k < 1) continue;
        int ell = mkey.k;
        for (int pos = 0; pos < ell; ++pos) {
            // choose arities for the blocks
            std::vector<const MultiOp<Rat>*> blocks(static_cast<size_t>(ell));
            std::vector<int> twists(static_cast<size_t>(ell), 0);
            for (int b = 0; b < pos; ++b) twists[static_cast<size_t>(b)] = p;
            std::function<void(int, int)> rec = [&](int slot, int used_k) {
                if (used_k > gbar.ctx.k_max) return;
                if (slot == ell) {
                    MultiOp<Rat> term = compose_blocks(mop, S, blocks, twists);
                    auto& acc = out.comps[used_k];
                    acc.arity = used_k;
                    acc.accumulate_op(term, Rat(1));
                    return;
                }
                if (slot == pos) {
                    for (auto& [kk, pop] : phi.comps) {
                        blocks[static_cast<size_t>(slot)] = &pop;
                        rec(slot + 1, used_k + kk);
                    }
                } else {
                    for (auto& [gkey, gop] : gbar.comps) {
                        if (!is_zero_class(gkey.beta)) continue;
                        blocks[static_cast<size_t>(slot)] = &gop;
                        rec(slot + 1, used_k + gkey.k);
                    }
                }
            };
            rec(0, 0);
        }
    }
    // second part: -(-1)^p sum phi_{l+m+1} o (id_#^l (x) m'_{n,0} (x) id^m)
    Rat s2 = (p % 2 == 0) ? Rat(-1) : Rat(1);
    for (auto& [kk, pop] : phi.comps) {
        if (kk < 1) continue;
        for (auto& [mkey, mop] : m_src.comps) {
            if (!is_zero_class(mkey.beta)) continue;
            int k = kk - 1 + mkey.k;
            if (k > gbar.ctx.k_max) continue;
            for (int lambda = 0; lambda < kk; ++lambda) {
                auto& acc = out.comps[k];
                acc.arity = k;
                acc.accumulate_op(insert_at(pop, S, mop, lambda, 1), s2);
            }
        }
    }
    out.prune();
    return out;
}

MultiOp<Rat> obstruction_length(const OperatorSystem<Rat>& gbar, const OperatorSystem<Rat>& m_src,
                                const OperatorSystem<Rat>& m_tgt, int k) {
    // precondition: gbar restricted to arities < k is an A_{k-1} homomorphism
    auto g0 = energy_zero_part(gbar);
    auto lhs = compose(energy_zero_part(m_tgt), g0);
    auto rhs = star(g0, energy_zero_part(m_src));
    auto diff = system_sub(lhs, rhs);
    for (auto& [key, op] : diff.comps)
        if (is_zero_class(key.beta) && key.k < k && !op.is_zero())
            throw PartialHomError("input is not an A_{k-1} homomorphism at arity " + std::to_string(key.k));

    MultiOp<Rat> o;
    o.arity = k;
    LabelClass zero = zero_class(gbar.group.rank);
    // sum_{l != 1} m_{l,0} o (g (x) ... (x) g), total arity k
    for (auto& [mkey, mop] : m_tgt.comps) {
        if (!is_zero_class(mkey.beta) || mkey.k == 1 || mkey.k < 1) continue;
        int ell = mkey.k;
        std::vector<const MultiOp<Rat>*> blocks(static_cast<size_t>(ell));
        std::vector<int> twists(static_cast<size_t>(ell), 0);
        std::function<void(int, int)> rec = [&](int slot, int used_k) {
            if (used_k > k) return;
            if (slot == ell) {
                if (used_k == k) o.accumulate_op(compose_blocks(mop, gbar.src, blocks, twists), Rat(1));
                return;
            }
            for (auto& [gkey, gop] : gbar.comps) {
                if (!is_zero_class(gkey.beta) || gkey.k >= k) continue;
                blocks[static_cast<size_t>(slot)] = &gop;
                rec(slot + 1, used_k + gkey.k);
            }
        };
        rec(0, 0);
    }
    // - sum_{n != 1} g_{l+m+1,0} o (id_#^l (x) m'_{n,0} (x) id^m), total arity k
    for (auto& [gkey, gop] : gbar.comps) {
        if (!is_zero_class(gkey.beta) || gkey.k < 1 || gkey.k >= k + 1) continue;
        for (auto& [mkey, mop] : m_src.comps) {
            if (!is_zero_class(mkey.beta) || mkey.k == 1) continue;
            if (gkey.k - 1 + mkey.k != k) continue;
            for (int lambda = 0; lambda < gkey.k; ++lambda)
                o.accumulate_op(insert_at(gop, gbar.src, mop, lambda, 1), Rat(-1));
        }
    }
    return o;
}

BetaFamily obstruction_energy(const OperatorSystem<Rat>& g, const OperatorSystem<Rat>& m_src,
                              const OperatorSystem<Rat>& m_tgt, const LabelClass& B) {
    Rat eb = g.group.energy_of(B);
    for (auto& [key, op] : g.comps)
        if (!(g.group.energy_of(key.beta) < eb))
            throw PartialHomError("input has components at or above E(B)");
    {
        // precondition: A-infinity homomorphism modulo T^{E(B)}
        auto gm = g;
        gm.ctx.e_max = eb;
        auto ms = m_src;
        ms.ctx.e_max = eb;
        ms.comps.clear();
        for (auto& [key, op] : m_src.comps)
            if (m_src.group.energy_of(key.beta) < eb) ms.comps[key] = op;
        auto mt = m_tgt;
        mt.ctx.e_max = eb;
        mt.comps.clear();
        for (auto& [key, op] : m_tgt.comps)
            if (m_tgt.group.energy_of(key.beta) < eb) mt.comps[key] = op;
        auto diff = system_sub(compose(mt, gm), star(gm, ms));
        for (auto& [key, op] : diff.comps)
            if (!op.is_zero())
                throw PartialHomError("input is not a homomorphism modulo T^{E(B)} at beta=" +
                                      class_str(key.beta));
    }

    BetaFamily o;
    o.beta = B;
    // sum m_{l,b0} o (g-blocks), classes summing to B
    for (auto& [mkey, mop] : m_tgt.comps) {
        if (mkey.k < 1) continue;
        LabelClass need = sub_class(B, mkey.beta);
        if (g.group.energy_of(need) < 0) continue;
        int ell = mkey.k;
        std::vector<const MultiOp<Rat>*> blocks(static_cast<size_t>(ell));
        std::vector<int> twists(static_cast<size_t>(ell), 0);
        LabelClass acc_b = zero_class(g.group.rank);
        std::function<void(int, int)> rec = [&](int slot, int used_k) {
            if (used_k > g.ctx.k_max) return;
            if (slot == ell) {
                if (acc_b == need) {
                    auto& dst = o.comps[used_k];
                    dst.arity = used_k;
                    dst.accumulate_op(compose_blocks(mop, g.src, blocks, twists), Rat(1));
                }
                return;
            }
            for (auto& [gkey, gop] : g.comps) {
                LabelClass nb = add_class(acc_b, gkey.beta);
                if (g.group.energy_of(sub_class(need, nb)) < 0) continue;
                blocks[static_cast<size_t>(slot)] = &gop;
                LabelClass sb = acc_b;
                acc_b = nb;
                rec(slot + 1, used_k + gkey.k);
                acc_b = sb;
            }
        };
        rec(0, 0);
    }
    // - sum g_{l+m+1,b'} o (id_#^l (x) m'_{n,b''} (x) id^m), b' + b'' = B
    for (auto& [gkey, gop] : g.comps) {
        if (gkey.k < 1) continue;
        LabelClass need = sub_class(B, gkey.beta);
        if (g.group.energy_of(need) < 0) continue;
        for (auto& [mkey, msop] : m_src.comps) {
            if (!(mkey.beta == need)) continue;
            int k = gkey.k - 1 + mkey.k;
            if (k > g.ctx.k_max) continue;
            for (int lambda = 0; lambda < gkey.k; ++lambda) {
                auto& dst = o.comps[k];
                dst.arity = k;
                dst.accumulate_op(insert_at(gop, g.src, msop, lambda, 1), Rat(-1));
            }
        }
    }
    o.prune();
    return o;
}

MultiOp<Rat> cyclic_corrector(const std::vector<MultiOp<Rat>>& u, const LabelClass& beta,
                              const LabelGroup& group, const GradedSpace& src, const GradedSpace& tgt) {
    if (is_zero_class(beta)) throw ConditionError("cyclic corrector requires beta != 0");
    int k = static_cast<int>(u.size()) - 1;
    if (k < 0) throw ConditionError("need at least u_0");
    BetaFamily fam;
    fam.beta = beta;
    for (int j = 0; j <= k; ++j) {
        fam.comps[j] = u[static_cast<size_t>(j)];
        fam.comps[j].arity = j;
    }
    auto e1 = check_E1(fam, group, src, tgt, k);  // pairs (u_i, u_{i+1}), i < k
    auto e2 = check_E2(fam, src);
    auto e3 = check_E3(fam, src);
    if (!e1.pass || !e2.pass || !e3.pass) throw ConditionError("input fails (E1)/(E2)/(E3)");

    auto db = group.boundary_of(beta);
    int N = k + 1;
    MultiOp<Rat> out;
    out.arity = N;
    for (int m = 1; m <= N; ++m) {
        Rat am = inv_factorial(static_cast<unsigned>(m));
        if (m % 2 == 0) am = -am;
        const MultiOp<Rat>& low = u[static_cast<size_t>(N - m)];
        for (auto& [in, row] : low.entries) {
            for (int i = 0; i < N; ++i) {
                // positions (i + a) mod N carry `in`, the last m slots carry
                // cap'd divisor inputs
                std::vector<std::vector<int>> divisor_choices;
                std::function<void(int, std::vector<int>&, Rat)> pick = [&](int b, std::vector<int>& ds,
                                                                            Rat coef) {
                    if (b == m) {
                        std::vector<int> full(static_cast<size_t>(N), -1);
                        for (int a = 0; a < N - m; ++a)
                            full[static_cast<size_t>((i + a) % N)] = in[static_cast<size_t>(a)];
                        for (int bb = 0; bb < m; ++bb)
                            full[static_cast<size_t>((i + N - m + bb) % N)] =
                                src.divisor_basis[static_cast<size_t>(ds[static_cast<size_t>(bb)])];
                        for (auto& [o, c] : row) out.accumulate(full, o, am * coef * c);
                        return;
                    }
                    for (size_t d = 0; d < src.divisor_basis.size(); ++d) {
                        if (db[d] == 0) continue;
                        ds.push_back(static_cast<int>(d));
                        pick(b + 1, ds, coef * Rat(db[d]));
                        ds.pop_back();
                    }
                };
                std::vector<int> ds;
                pick(0, ds, Rat(1));
            }
        }
    }
    return out;
}

VerificationReport check_E1(const BetaFamily& u, const LabelGroup& group, const GradedSpace& src,
                            const GradedSpace& tgt, int k_max) {
    (void)tgt;
    VerificationReport rep{"E1"};
    auto db = group.boundary_of(u.beta);
    for (int k = 0; k <= k_max; ++k) {
        const MultiOp<Rat>* up = u.find(k + 1);
        const MultiOp<Rat>* low = u.find(k);
        if (!up && !low) continue;
        for (size_t d = 0; d < src.divisor_basis.size(); ++d) {
            int theta = src.divisor_basis[d];
            MultiOp<Rat> lhs;
            lhs.arity = k;
            if (up)
                for (auto& [in, row] : up->entries)
                    for (size_t i = 0; i < in.size(); ++i) {
                        if (in[i] != theta) continue;
                        std::vector<int> red;
                        for (size_t a = 0; a < in.size(); ++a)
                            if (a != i) red.push_back(in[a]);
                        for (auto& [out, c] : row) lhs.accumulate(red, out, c);
                    }
            if (low) lhs.accumulate_op(*low, -Rat(db[d]));
            if (!lhs.is_zero())
                rep.fail("(E1)", "(k=" + std::to_string(k) + ", b=" + src.name(theta) + ")",
                         "divisor equation fails");
        }
    }
    return rep;
}

VerificationReport check_E2(const BetaFamily& u, const GradedSpace& src) {
    VerificationReport rep{"E2"};
    for (auto& [kk, op] : u.comps) {
        if (kk < 1) continue;
        MultiOp<Rat> cu;
        cu.arity = kk;
        for (auto& [in, row] : op.entries)
            for (size_t i = 0; i < in.size(); ++i) {
                if (src.degree(in[i]) != 0) continue;
                std::vector<int> red{in[i]};
                for (size_t a = 0; a < in.size(); ++a)
                    if (a != i) red.push_back(in[a]);
                int parity = 0;
                for (size_t a = 0; a < i; ++a) parity += twist_parity(src, in[a]);
                for (auto& [out, c] : row) cu.accumulate(red, out, (parity & 1) ? -c : c);
            }
        if (!cu.is_zero()) rep.fail("(E2)", "(k=" + std::to_string(kk - 1) + ")", "cyclic sum nonzero");
    }
    return rep;
}

VerificationReport check_E3(const BetaFamily& u, const GradedSpace& src) {
    VerificationReport rep{"E3"};
    if (src.unit < 0) return rep;
    for (auto& [kk, op] : u.comps)
        for (auto& [in, row] : op.entries)
            for (int idx : in)
                if (idx == src.unit) {
                    rep.fail("(E3)", "(k=" + std::to_string(kk) + ")", "unit insertion nonzero");
                    goto next;
                }
next:;
    return rep;
}

namespace {

// generate ud rows (L1)(L2)(L3) for an arity-k unknown over coordinates in cs
void append_ud_rows_length(CoordSpace& cs, const GradedSpace& src, const GradedSpace& tgt, int k, int degx,
                           std::vector<std::map<int, Rat>>& rows, std::vector<Rat>& rhs) {
    (void)degx;
    // (L3): coordinates with a unit slot vanish
    if (src.unit >= 0) {
        for (auto& [key, col] : cs.ids) {
            for (int idx : key.first)
                if (idx == src.unit) {
                    rows.push_back({{col, Rat(1)}});
                    rhs.push_back(Rat(0));
                    break;
                }
        }
    }
    if (k < 1) return;
    // (L1): sum over insert positions of a divisor input vanishes
    for (int theta_pos = 0; theta_pos < static_cast<int>(src.divisor_basis.size()); ++theta_pos) {
        int theta = src.divisor_basis[static_cast<size_t>(theta_pos)];
        for_each_tuple(src.dim(), k - 1, [&](const std::vector<int>& base) {
            for (size_t out = 0; out < tgt.dim(); ++out) {
                std::map<int, Rat> row;
                for (int i = 0; i < k; ++i) {
                    std::vector<int> full;
                    full.reserve(static_cast<size_t>(k));
                    full.insert(full.end(), base.begin(), base.begin() + i);
                    full.push_back(theta);
                    full.insert(full.end(), base.begin() + i, base.end());
                    auto it = cs.ids.find({full, static_cast<int>(out)});
                    if (it != cs.ids.end()) row[it->second] += Rat(1);
                }
                for (auto it = row.begin(); it != row.end();)
                    it = (it->second == 0) ? row.erase(it) : std::next(it);
                if (!row.empty()) {
                    rows.push_back(std::move(row));
                    rhs.push_back(Rat(0));
                }
            }
        });
    }
    // (L2): cyclic unitality against every degree-0 basis element
    for (size_t e = 0; e < src.dim(); ++e) {
        if (src.degree(static_cast<int>(e)) != 0) continue;
        for_each_tuple(src.dim(), k - 1, [&](const std::vector<int>& base) {
            for (size_t out = 0; out < tgt.dim(); ++out) {
                std::map<int, Rat> row;
                for (int i = 0; i < k; ++i) {
                    std::vector<int> full;
                    full.insert(full.end(), base.begin(), base.begin() + i);
                    full.push_back(static_cast<int>(e));
                    full.insert(full.end(), base.begin() + i, base.end());
                    int parity = 0;
                    for (int a = 0; a < i; ++a) parity += twist_parity(src, base[static_cast<size_t>(a)]);
                    auto it = cs.ids.find({full, static_cast<int>(out)});
                    if (it != cs.ids.end()) row[it->second] += (parity & 1) ? Rat(-1) : Rat(1);
                }
                for (auto it = row.begin(); it != row.end();)
                    it = (it->second == 0) ? row.erase(it) : std::next(it);
                if (!row.empty()) {
                    rows.push_back(std::move(row));
                    rhs.push_back(Rat(0));
                }
            }
        });
    }
}

}  // namespace

std::optional<MultiOp<Rat>> solve_coboundary_length(const OperatorSystem<Rat>& m_src,
                                                    const OperatorSystem<Rat>& m_tgt, int k,
                                                    const MultiOp<Rat>& target, bool ud) {
    const GradedSpace& src = m_src.src;
    const GradedSpace& tgt = m_tgt.src;
    auto dt = pure_degree(target, src, tgt);
    if (!dt) throw DegreeError("solve_coboundary_length: mixed-degree target");
    int degx = *dt - 1;

    LabelClass zero = zero_class(m_src.group.rank);
    MultiOp<Rat> zero1;
    zero1.arity = 1;
    const MultiOp<Rat>* ds = m_src.find(1, zero);
    const MultiOp<Rat>* dtg = m_tgt.find(1, zero);
    const MultiOp<Rat>& d_src = ds ? *ds : zero1;
    const MultiOp<Rat>& d_tgt = dtg ? *dtg : zero1;

    // unknown coordinates: degree-feasible (tuple, out)
    CoordSpace cs;
    for_each_tuple(src.dim(), k, [&](const std::vector<int>& in) {
        int din = 0;
        for (int i : in) din += src.degree(i);
        for (size_t out = 0; out < tgt.dim(); ++out)
            if (tgt.degree(static_cast<int>(out)) - din == degx) cs.id(in, static_cast<int>(out));
    });
    int ncols = static_cast<int>(cs.coords.size());

    // rows of bar-delta: scatter per column
    std::map<std::pair<std::vector<int>, int>, std::map<int, Rat>> eq_rows;
    for (int col = 0; col < ncols; ++col) {
        auto& [in, out] = cs.coords[static_cast<size_t>(col)];
        MultiOp<Rat> e;
        e.arity = k;
        e.accumulate(in, out, Rat(1));
        auto img = bar_differential(e, src, tgt, d_src, d_tgt);
        for (auto& [iin, row] : img.entries)
            for (auto& [iout, c] : row) eq_rows[{iin, iout}][col] += c;
    }
    // target coordinates onto the same rows
    std::map<std::pair<std::vector<int>, int>, Rat> rhs_map;
    for (auto& [in, row] : target.entries)
        for (auto& [out, c] : row) rhs_map[{in, out}] = c;
    for (auto& [coord, c] : rhs_map) eq_rows.try_emplace(coord);

    std::vector<std::map<int, Rat>> rows;
    std::vector<Rat> rhs;
    for (auto& [coord, row] : eq_rows) {
        std::map<int, Rat> r;
        for (auto& [col, c] : row)
            if (c != 0) r[col] = c;
        rows.push_back(std::move(r));
        auto it = rhs_map.find(coord);
        rhs.push_back(it == rhs_map.end() ? Rat(0) : it->second);
    }
    if (ud) append_ud_rows_length(cs, src, tgt, k, degx, rows, rhs);

    auto sol = sparse_solve(std::move(rows), std::move(rhs), ncols);
    if (!sol) return std::nullopt;
    MultiOp<Rat> x;
    x.arity = k;
    for (int col = 0; col < ncols; ++col)
        if ((*sol)[static_cast<size_t>(col)] != 0)
            x.accumulate(cs.coords[static_cast<size_t>(col)].first, cs.coords[static_cast<size_t>(col)].second,
                         (*sol)[static_cast<size_t>(col)]);
    return x;
}

std::optional<BetaFamily> solve_coboundary_energy(const OperatorSystem<Rat>& gbar,
                                                  const OperatorSystem<Rat>& m_src,
                                                  const OperatorSystem<Rat>& m_tgt, const LabelClass& B,
                                                  const BetaFamily& target, bool ud) {
    const GradedSpace& src = gbar.src;
    const GradedSpace& tgt = gbar.tgt;
    // shifted degree of the unknown: deg' x = deg'(target) - 1
    std::optional<int> pt;
    for (auto& [kk, op] : target.comps) {
        auto d = pure_degree(op, src, tgt);
        if (!d) throw DegreeError("solve_coboundary_energy: mixed-degree target");
        int sp = *d - 1 + kk;
        if (!pt)
            pt = sp;
        else if (*pt != sp)
            throw DegreeError("solve_coboundary_energy: target not of pure shifted degree");
    }
    int p = pt ? *pt - 1 : static_cast<int>(-gbar.group.maslov_of(B));

    // unknown coordinates per arity
    CoordSpace cs;
    int kmax = gbar.ctx.k_max;
    for (int k = 0; k <= kmax; ++k) {
        int degx = p + 1 - k;
        for_each_tuple(src.dim(), k, [&](const std::vector<int>& in) {
            int din = 0;
            for (int i : in) din += src.degree(i);
            for (size_t out = 0; out < tgt.dim(); ++out)
                if (tgt.degree(static_cast<int>(out)) - din == degx) {
                    cs.id(in, static_cast<int>(out));
                }
        });
    }
    int ncols = static_cast<int>(cs.coords.size());

    std::map<std::tuple<int, std::vector<int>, int>, std::map<int, Rat>> eq_rows;
    for (int col = 0; col < ncols; ++col) {
        auto& [in, out] = cs.coords[static_cast<size_t>(col)];
        BetaFamily e;
        e.beta = B;
        auto& op = e.comps[static_cast<int>(in.size())];
        op.arity = static_cast<int>(in.size());
        op.accumulate(in, out, Rat(1));
        auto img = twisted_differential(gbar, m_src, m_tgt, e, p);
        for (auto& [kk, iop] : img.comps)
            for (auto& [iin, row] : iop.entries)
                for (auto& [iout, c] : row) eq_rows[{kk, iin, iout}][col] += c;
    }
    std::map<std::tuple<int, std::vector<int>, int>, Rat> rhs_map;
    for (auto& [kk, op] : target.comps)
        for (auto& [in, row] : op.entries)
            for (auto& [out, c] : row) rhs_map[{kk, in, out}] = c;
    for (auto& [coord, c] : rhs_map) eq_rows.try_emplace(coord);

    std::vector<std::map<int, Rat>> rows;
    std::vector<Rat> rhs;
    for (auto& [coord, row] : eq_rows) {
        std::map<int, Rat> r;
        for (auto& [col, c] : row)
            if (c != 0) r[col] = c;
        rows.push_back(std::move(r));
        auto it = rhs_map.find(coord);
        rhs.push_back(it == rhs_map.end() ? Rat(0) : it->second);
    }

    if (ud) {
        auto db = gbar.group.boundary_of(B);
        // (E3)
        if (src.unit >= 0)
            for (auto& [key, col] : cs.ids)
                for (int idx : key.first)
                    if (idx == src.unit) {
                        rows.push_back({{col, Rat(1)}});
                        rhs.push_back(Rat(0));
                        break;
                    }
        // (E1): DA rows coupling arities k+1 and k
        for (int k = 0; k + 1 <= kmax; ++k) {
            for (size_t d = 0; d < src.divisor_basis.size(); ++d) {
                int theta = src.divisor_basis[d];
                for_each_tuple(src.dim(), k, [&](const std::vector<int>& base) {
                    for (size_t out = 0; out < tgt.dim(); ++out) {
                        std::map<int, Rat> row;
                        for (int i = 0; i <= k; ++i) {
                            std::vector<int> full;
                            full.insert(full.end(), base.begin(), base.begin() + i);
                            full.push_back(theta);
                            full.insert(full.end(), base.begin() + i, base.end());
                            auto it = cs.ids.find({full, static_cast<int>(out)});
                            if (it != cs.ids.end()) row[it->second] += Rat(1);
                        }
                        auto jt = cs.ids.find({base, static_cast<int>(out)});
                        if (jt != cs.ids.end()) row[jt->second] -= Rat(db[d]);
                        for (auto it = row.begin(); it != row.end();)
                            it = (it->second == 0) ? row.erase(it) : std::next(it);
                        if (!row.empty()) {
                            rows.push_back(std::move(row));
                            rhs.push_back(Rat(0));
                        }
                    }
                });
            }
        }
        // (E2)
        for (size_t e = 0; e < src.dim(); ++e) {
            if (src.degree(static_cast<int>(e)) != 0) continue;
            for (int k = 0; k + 1 <= kmax; ++k)
                for_each_tuple(src.dim(), k, [&](const std::vector<int>& base) {
                    for (size_t out = 0; out < tgt.dim(); ++out) {
                        std::map<int, Rat> row;
                        for (int i = 0; i <= k; ++i) {
                            std::vector<int> full;
                            full.insert(full.end(), base.begin(), base.begin() + i);
                            full.push_back(static_cast<int>(e));
                            full.insert(full.end(), base.begin() + i, base.end());
                            int parity = 0;
                            for (int a = 0; a < i; ++a)
                                parity += twist_parity(src, base[static_cast<size_t>(a)]);
                            auto it = cs.ids.find({full, static_cast<int>(out)});
                            if (it != cs.ids.end()) row[it->second] += (parity & 1) ? Rat(-1) : Rat(1);
                        }
                        for (auto it = row.begin(); it != row.end();)
                            it = (it->second == 0) ? row.erase(it) : std::next(it);
                        if (!row.empty()) {
                            rows.push_back(std::move(row));
                            rhs.push_back(Rat(0));
                        }
                    }
                });
        }
    }

    auto sol = sparse_solve(std::move(rows), std::move(rhs), ncols);
    if (!sol) return std::nullopt;
    BetaFamily x;
    x.beta = B;
    for (int col = 0; col < ncols; ++col) {
        if ((*sol)[static_cast<size_t>(col)] == 0) continue;
        auto& [in, out] = cs.coords[static_cast<size_t>(col)];
        auto& op = x.comps[static_cast<int>(in.size())];
        op.arity = static_cast<int>(in.size());
        op.accumulate(in, out, (*sol)[static_cast<size_t>(col)]);
    }
    x.prune();
    return x;
}

HomotopyInverse homotopy_inverse(const OperatorSystem<Rat>& f, const OperatorSystem<Rat>& m_src,
                                 const OperatorSystem<Rat>& m_tgt) {
    auto pre = check_hom(f, m_src, m_tgt);
    if (!pre.pass) throw PartialHomError("homotopy_inverse: f fails check_hom");

    const GradedSpace& A = f.src;
    const GradedSpace& B = f.tgt;
    size_t na = A.dim(), nb = B.dim();
    LabelClass zero = zero_class(f.group.rank);

    auto op_matrix = [&](const MultiOp<Rat>* op, size_t rows_n, size_t cols_n) {
        Mat M(rows_n, cols_n);
        if (op)
            for (auto& [in, row] : op->entries)
                for (auto& [out, c] : row) M(static_cast<size_t>(out), static_cast<size_t>(in[0])) = c;
        return M;
    };
    Mat F = op_matrix(f.find(1, zero), nb, na);
    Mat dA = op_matrix(m_src.find(1, zero), na, na);
    Mat dB = op_matrix(m_tgt.find(1, zero), nb, nb);

    // quasi-isomorphism <=> acyclic mapping cone <=> 2 rank(D) = dim
    {
        size_t n = nb + na;
        Mat D(n, n);
        for (size_t i = 0; i < nb; ++i)
            for (size_t j = 0; j < nb; ++j) D(i, j) = dB(i, j);
        for (size_t i = 0; i < nb; ++i)
            for (size_t j = 0; j < na; ++j) D(i, nb + j) = F(i, j);
        for (size_t i = 0; i < na; ++i)
            for (size_t j = 0; j < na; ++j) D(nb + i, nb + j) = -dA(i, j);
        if (2 * rank(D) != n) throw NotQuasiIso();
    }

    HomotopyInverse out;
    out.g.src = B;
    out.g.tgt = A;
    out.g.group = f.group;
    out.g.ctx = f.ctx;
    out.g.kind = SystemKind::Homomorphism;
    out.h = Mat(na, na);

    // ---- strict isomorphism: closed-form inversion recursion ----
    bool has_f0 = false;
    for (auto& [key, op] : f.comps)
        if (key.k == 0) has_f0 = true;
    if (na == nb && !has_f0) {
        if (auto Finv = inverse(F)) {
            out.exact_inverse = true;
            out.g.at(1, zero).accumulate_op(matrix_op(*Finv), Rat(1));
            auto monoid = f.group.enumerate_support(f.ctx.e_max);
            std::vector<OpKey> keys;
            for (auto& b : monoid)
                for (int k = 0; k <= f.ctx.k_max; ++k) keys.push_back(OpKey{k, b});
            std::sort(keys.begin(), keys.end(), [&](const OpKey& a, const OpKey& b2) {
                Rat ea = f.group.energy_of(a.beta), eb = f.group.energy_of(b2.beta);
                if (ea != eb) return ea < eb;
                if (a.k != b2.k) return a.k < b2.k;
                return a.beta < b2.beta;
            });
            MultiOp<Rat> finv_op = matrix_op(*Finv);
            for (auto& key : keys) {
                if (key.k <= 1 && is_zero_class(key.beta)) continue;
                if (key.k < 1) continue;  // no curved parts in this branch
                // rest term: all compose decompositions except the diagonal
                MultiOp<Rat> rest;
                rest.arity = key.k;
                for (auto& [gkey, gop] : out.g.comps) {
                    int ell = gkey.k;
                    if (ell < 1) continue;
                    LabelClass need = sub_class(key.beta, gkey.beta);
                    if (f.group.energy_of(need) < 0) continue;
                    std::vector<const MultiOp<Rat>*> blocks(static_cast<size_t>(ell));
                    std::vector<int> twists(static_cast<size_t>(ell), 0);
                    LabelClass acc_b = zero;
                    bool diag_possible = gkey.k == key.k && gkey.beta == key.beta;
                    std::function<void(int, int, bool)> rec = [&](int slot, int used_k, bool all_triv) {
                        if (used_k > key.k) return;
                        if (slot == ell) {
                            if (used_k != key.k || !(acc_b == need)) return;
                            if (all_triv && diag_possible) return;  // the unknown itself
                            rest.accumulate_op(compose_blocks(gop, f.src, blocks, twists), Rat(1));
                            return;
                        }
                        for (auto& [fkey, fop] : f.comps) {
                            LabelClass nb2 = add_class(acc_b, fkey.beta);
                            if (f.group.energy_of(sub_class(need, nb2)) < 0) continue;
                            blocks[static_cast<size_t>(slot)] = &fop;
                            LabelClass sb = acc_b;
                            acc_b = nb2;
                            rec(slot + 1, used_k + fkey.k,
                                all_triv && fkey.k == 1 && is_zero_class(fkey.beta));
                            acc_b = sb;
                        }
                    };
                    rec(0, 0, true);
                }
                if (rest.is_zero()) continue;
                // g_{k,beta} = -rest o (F^{-1})^{(x) k}
                std::vector<const MultiOp<Rat>*> blocks(static_cast<size_t>(key.k), &finv_op);
                std::vector<int> twists(static_cast<size_t>(key.k), 0);
                out.g.accumulate(key, compose_blocks(rest, B, blocks, twists), Rat(-1));
            }
            out.g.prune_all();
            auto post = check_hom(out.g, m_tgt, m_src);
            if (!post.pass) throw Inconsistent("closed-form inverse fails check_hom");
            return out;
        }
    }

    // ---- general quasi-isomorphism: joint solve for (g_{1,0}, h) ----
    {
        // unknown layout: g1 coords then h coords, degree filtered
        std::map<std::pair<size_t, size_t>, int> gcol, hcol;
        int ncols = 0;
        for (size_t r = 0; r < na; ++r)
            for (size_t c = 0; c < nb; ++c)
                if (A.degree(static_cast<int>(r)) == B.degree(static_cast<int>(c)))
                    gcol[{r, c}] = ncols++;
        for (size_t r = 0; r < na; ++r)
            for (size_t c = 0; c < na; ++c)
                if (A.degree(static_cast<int>(r)) == A.degree(static_cast<int>(c)) - 1)
                    hcol[{r, c}] = ncols++;
        std::vector<std::map<int, Rat>> rows;
        std::vector<Rat> rhs;
        auto add_row = [&](std::map<int, Rat> row, Rat b) {
            for (auto it = row.begin(); it != row.end();)
                it = (it->second == 0) ? row.erase(it) : std::next(it);
            if (row.empty() && b == 0) return;
            rows.push_back(std::move(row));
            rhs.push_back(std::move(b));
        };
        // chain map: g1 dB - dA g1 = 0   (rows over (r, c) in A x B)
        for (size_t r = 0; r < na; ++r)
            for (size_t c = 0; c < nb; ++c) {
                std::map<int, Rat> row;
                for (size_t t = 0; t < nb; ++t)
                    if (dB(t, c) != 0 && gcol.count({r, t})) row[gcol[{r, t}]] += dB(t, c);
                for (size_t t = 0; t < na; ++t)
                    if (dA(r, t) != 0 && gcol.count({t, c})) row[gcol[{t, c}]] -= dA(r, t);
                add_row(std::move(row), Rat(0));
            }
        // homotopy: g1 F - I = dA h + h dA
        for (size_t r = 0; r < na; ++r)
            for (size_t c = 0; c < na; ++c) {
                std::map<int, Rat> row;
                for (size_t t = 0; t < nb; ++t)
                    if (F(t, c) != 0 && gcol.count({r, t})) row[gcol[{r, t}]] += F(t, c);
                for (size_t t = 0; t < na; ++t) {
                    if (dA(r, t) != 0 && hcol.count({t, c})) row[hcol[{t, c}]] -= dA(r, t);
                    if (dA(t, c) != 0 && hcol.count({r, t})) row[hcol[{r, t}]] -= dA(t, c);
                }
                add_row(std::move(row), r == c ? Rat(1) : Rat(0));
            }
        auto solve_with_ud = [&](bool ud) -> std::optional<std::vector<Rat>> {
            auto rows2 = rows;
            auto rhs2 = rhs;
            if (ud) {
                // g1(1_B) = 1_A
                if (A.unit >= 0 && B.unit >= 0)
                    for (size_t r = 0; r < na; ++r) {
                        std::map<int, Rat> row;
                        if (gcol.count({r, static_cast<size_t>(B.unit)}))
                            row[gcol[{r, static_cast<size_t>(B.unit)}]] = Rat(1);
                        rows2.push_back(std::move(row));
                        rhs2.push_back(r == static_cast<size_t>(A.unit) ? Rat(1) : Rat(0));
                    }
                // (II-4): cap(dg, g1(theta_d)) = cap(dg, theta_d), plus image
                // supported on the divisor basis
                if (A.divisor_basis.size() == f.group.boundary_dim() &&
                    B.divisor_basis.size() == f.group.boundary_dim()) {
                    for (size_t d = 0; d < B.divisor_basis.size(); ++d) {
                        size_t theta = static_cast<size_t>(B.divisor_basis[d]);
                        for (size_t r = 0; r < na; ++r) {
                            bool in_div = false;
                            for (int x : A.divisor_basis)
                                if (static_cast<size_t>(x) == r) in_div = true;
                            if (!in_div && gcol.count({r, theta})) {
                                rows2.push_back({{gcol[{r, theta}], Rat(1)}});
                                rhs2.push_back(Rat(0));
                            }
                        }
                        for (auto& gen : f.group.support_generators) {
                            auto dg = f.group.boundary_of(gen);
                            std::map<int, Rat> row;
                            for (size_t j = 0; j < A.divisor_basis.size(); ++j) {
                                size_t rj = static_cast<size_t>(A.divisor_basis[j]);
                                if (gcol.count({rj, theta})) row[gcol[{rj, theta}]] += Rat(dg[j]);
                            }
                            rows2.push_back(std::move(row));
                            rhs2.push_back(Rat(dg[d]));
                        }
                    }
                }
            }
            return sparse_solve(std::move(rows2), std::move(rhs2), ncols);
        };
        auto sol = solve_with_ud(true);
        if (!sol) {
            out.ud_refined = false;
            sol = solve_with_ud(false);
        }
        if (!sol) throw Inconsistent("no (g_{1,0}, h) witness exists");
        auto& g1 = out.g.at(1, zero);
        for (auto& [rc, col] : gcol)
            if ((*sol)[static_cast<size_t>(col)] != 0)
                g1.accumulate({static_cast<int>(rc.second)}, static_cast<int>(rc.first),
                              (*sol)[static_cast<size_t>(col)]);
        out.g.prune(OpKey{1, zero});
        for (auto& [rc, col] : hcol) out.h(rc.first, rc.second) = (*sol)[static_cast<size_t>(col)];
    }

    // ---- length induction ----
    for (int k = 2; k <= f.ctx.k_max; ++k) {
        auto ok = obstruction_length(out.g, m_tgt, m_src, k);
        // sanity: bar-delta closed
        {
            MultiOp<Rat> zero1;
            zero1.arity = 1;
            const MultiOp<Rat>* dsB = m_tgt.find(1, zero);
            const MultiOp<Rat>* dtA = m_src.find(1, zero);
            auto closed = bar_differential(ok, B, A, dsB ? *dsB : zero1, dtA ? *dtA : zero1);
            if (!closed.is_zero()) throw Inconsistent("o_k is not bar-delta closed");
        }
        if (ok.is_zero()) continue;
        auto x = solve_coboundary_length(m_tgt, m_src, k, ok.scaled(Rat(-1)), true);
        if (!x) {
            out.ud_refined = false;
            x = solve_coboundary_length(m_tgt, m_src, k, ok.scaled(Rat(-1)), false);
        }
        if (!x) throw Inconsistent("length obstruction o_k not exact at k=" + std::to_string(k));
        if (!x->is_zero()) out.g.accumulate(OpKey{k, zero}, *x, Rat(1));
    }

    // ---- energy induction ----
    auto monoid = f.group.enumerate_support(f.ctx.e_max);
    for (auto& Bcls : monoid) {
        if (is_zero_class(Bcls)) continue;
        auto g_below = below_energy(out.g, f.group.energy_of(Bcls));
        auto oB = obstruction_energy(g_below, m_tgt, m_src, Bcls);
        if (oB.is_zero()) continue;
        BetaFamily neg;
        neg.beta = Bcls;
        for (auto& [kk, op] : oB.comps) neg.comps[kk] = op.scaled(Rat(-1));
        auto x = solve_coboundary_energy(energy_zero_part(out.g), m_tgt, m_src, Bcls, neg, true);
        if (!x) {
            out.ud_refined = false;
            x = solve_coboundary_energy(energy_zero_part(out.g), m_tgt, m_src, Bcls, neg, false);
        }
        if (!x) throw Inconsistent("energy obstruction o_B not exact at beta=" + class_str(Bcls));
        for (auto& [kk, op] : x->comps)
            if (!op.is_zero()) out.g.accumulate(OpKey{kk, Bcls}, op, Rat(1));
    }
    out.g.prune_all();

    auto post = check_hom(out.g, m_tgt, m_src);
    if (!post.pass) throw Inconsistent("constructed inverse fails check_hom");
    return out;
}

}  // namespace nova
