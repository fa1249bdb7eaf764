#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "nova/graded.hpp"
#include "nova/labels.hpp"
#include "nova/novikov.hpp"
#include "nova/poly.hpp"
#include "nova/rational.hpp"

namespace nova {

template <class R>
inline bool ring_zero(const R& r) {
    return r.is_zero();
}
inline bool ring_zero(const Rat& r) { return r == 0; }

// Sparse multilinear operator on basis tuples: in-tuple -> output vector.
// Coefficients live in a commutative ring R: exact rationals for plain
// systems, Q[s] or (Q[s])[u] for pseudo-isotopy work, multivariate
// polynomials for tree integrands.
template <class R>
struct MultiOp {
    int arity = 0;
    std::map<std::vector<int>, std::map<int, R>> entries;

    bool is_zero() const { return entries.empty(); }

    void accumulate(const std::vector<int>& in, int out, const R& c) {
        if (ring_zero(c)) return;
        auto& row = entries[in];
        auto it = row.find(out);
        if (it == row.end()) {
            row[out] = c;
        } else {
            it->second = it->second + c;
            if (ring_zero(it->second)) row.erase(it);
        }
        if (row.empty()) entries.erase(in);
    }
    void accumulate_op(const MultiOp& o, const R& factor) {
        for (auto& [in, row] : o.entries)
            for (auto& [out, c] : row) accumulate(in, out, factor * c);
    }

    MultiOp scaled(const R& f) const {
        MultiOp r;
        r.arity = arity;
        for (auto& [in, row] : entries)
            for (auto& [out, c] : row) r.accumulate(in, out, f * c);
        return r;
    }

    friend bool operator==(const MultiOp& a, const MultiOp& b) {
        return a.arity == b.arity && a.entries == b.entries;
    }

    // first nonzero entry, for violation reports
    std::optional<std::pair<std::vector<int>, int>> first_entry() const {
        if (entries.empty()) return std::nullopt;
        auto& [in, row] = *entries.begin();
        return std::make_pair(in, row.begin()->first);
    }

    // Homogeneity: every entry must satisfy deg(out) - sum deg(in) == want.
    bool homogeneous(const GradedSpace& src, const GradedSpace& tgt, int want) const {
        for (auto& [in, row] : entries) {
            int din = 0;
            for (int i : in) din += src.degree(i);
            for (auto& [out, c] : row)
                if (tgt.degree(out) - din != want) return false;
        }
        return true;
    }
};

struct OpKey {
    int k = 0;
    LabelClass beta;
    friend bool operator<(const OpKey& a, const OpKey& b) {
        if (a.k != b.k) return a.k < b.k;
        return a.beta < b.beta;
    }
    friend bool operator==(const OpKey& a, const OpKey& b) { return a.k == b.k && a.beta == b.beta; }
};

enum class SystemKind { Algebra, Homomorphism, Raw };

// Gapped family of operators indexed by (arity, label class).
template <class R>
struct OperatorSystem {
    GradedSpace src, tgt;
    LabelGroup group;
    TruncationContext ctx;
    SystemKind kind = SystemKind::Algebra;
    std::map<OpKey, MultiOp<R>> comps;

    bool endomorphic() const { return src == tgt; }

    int expected_degree(const OpKey& key) const {
        long long mu = group.maslov_of(key.beta);
        switch (kind) {
            case SystemKind::Algebra: return static_cast<int>(2 - key.k - mu);
            case SystemKind::Homomorphism: return static_cast<int>(1 - key.k - mu);
            default: return 0;
        }
    }

    MultiOp<R>* find(int k, const LabelClass& beta) {
        auto it = comps.find(OpKey{k, beta});
        return it == comps.end() ? nullptr : &it->second;
    }
    const MultiOp<R>* find(int k, const LabelClass& beta) const {
        auto it = comps.find(OpKey{k, beta});
        return it == comps.end() ? nullptr : &it->second;
    }

    MultiOp<R>& at(int k, const LabelClass& beta) {
        auto& op = comps[OpKey{k, beta}];
        op.arity = k;
        return op;
    }

    void accumulate(const OpKey& key, const MultiOp<R>& op, const R& factor) {
        if (op.is_zero()) return;
        at(key.k, key.beta).accumulate_op(op, factor);
        prune(key);
    }
    void prune(const OpKey& key) {
        auto it = comps.find(key);
        if (it != comps.end() && it->second.is_zero()) comps.erase(it);
    }
    void prune_all() {
        for (auto it = comps.begin(); it != comps.end();)
            it = it->second.is_zero() ? comps.erase(it) : std::next(it);
    }

    // keys in the deterministic report order (E(beta), lex beta, k)
    std::vector<OpKey> ordered_keys() const {
        std::vector<OpKey> ks;
        for (auto& [key, op] : comps) ks.push_back(key);
        std::sort(ks.begin(), ks.end(), [this](const OpKey& a, const OpKey& b) {
            Rat ea = group.energy_of(a.beta), eb = group.energy_of(b.beta);
            if (ea != eb) return ea < eb;
            if (a.beta != b.beta) return a.beta < b.beta;
            return a.k < b.k;
        });
        return ks;
    }

    bool identity_only() const {
        if (comps.size() != 1) return false;
        auto& [key, op] = *comps.begin();
        if (key.k != 1 || !is_zero_class(key.beta)) return false;
        if (op.entries.size() != src.dim()) return false;
        for (auto& [in, row] : op.entries)
            if (row.size() != 1 || row.begin()->first != in[0] || !(row.begin()->second == R(1)))
                return false;
        return true;
    }

    static OperatorSystem identity(const GradedSpace& sp, const LabelGroup& g, const TruncationContext& ctx) {
        OperatorSystem f;
        f.src = f.tgt = sp;
        f.group = g;
        f.ctx = ctx;
        f.kind = SystemKind::Homomorphism;
        auto& op = f.at(1, zero_class(g.rank));
        for (size_t i = 0; i < sp.dim(); ++i)
            op.accumulate({static_cast<int>(i)}, static_cast<int>(i), R(1));
        return f;
    }
};

// (-1)^(deg x - 1) parity of the twisted identity on a basis element
inline int twist_parity(const GradedSpace& sp, int idx) { return (sp.degree(idx) - 1) & 1; }

template <class R>
R twist_sign(const GradedSpace& sp, const std::vector<int>& in, size_t prefix, int twists) {
    if (twists == 0) return R(1);
    int parity = 0;
    for (size_t a = 0; a < prefix; ++a) parity += twists * twist_parity(sp, in[a]);
    return (parity & 1) ? R(-1) : R(1);
}

// g o (id_#^{t_left x lambda} (x) h (x) id^mu): insert h at slot `lambda` of g,
// twisting each of the first `lambda` inputs `t_left` times.
template <class R>
MultiOp<R> insert_at(const MultiOp<R>& g, const GradedSpace& in_space, const MultiOp<R>& h, int lambda,
                     int t_left) {
    MultiOp<R> out;
    out.arity = g.arity - 1 + h.arity;
    for (auto& [gin, grow] : g.entries) {
        int slot = gin[static_cast<size_t>(lambda)];
        for (auto& [hin, hrow] : h.entries) {
            auto hit = hrow.find(slot);
            if (hit == hrow.end()) continue;
            std::vector<int> in;
            in.reserve(static_cast<size_t>(out.arity));
            in.insert(in.end(), gin.begin(), gin.begin() + lambda);
            in.insert(in.end(), hin.begin(), hin.end());
            in.insert(in.end(), gin.begin() + lambda + 1, gin.end());
            R sgn = twist_sign<R>(in_space, in, static_cast<size_t>(lambda), t_left);
            for (auto& [gout, gc] : grow) out.accumulate(in, gout, sgn * hit->second * gc);
        }
    }
    return out;
}

// g o (f_1 (x) ... (x) f_l) with a twist count per block.
template <class R>
MultiOp<R> compose_blocks(const MultiOp<R>& g, const GradedSpace& in_space,
                          const std::vector<const MultiOp<R>*>& blocks, const std::vector<int>& twists) {
    MultiOp<R> out;
    int k = 0;
    for (auto* b : blocks) k += b->arity;
    out.arity = k;
    // walk the blocks left to right, matching each block's output to g's slot
    for (auto& [gin, grow] : g.entries) {
        // for this g entry, choose an entry of each block with matching output
        std::vector<int> tuple;
        std::function<void(size_t, R)> walk = [&](size_t bi, R coeff) {
            if (bi == blocks.size()) {
                for (auto& [gout, gc] : grow) out.accumulate(tuple, gout, coeff * gc);
                return;
            }
            const MultiOp<R>& f = *blocks[bi];
            int want = gin[bi];
            for (auto& [fin, frow] : f.entries) {
                auto it = frow.find(want);
                if (it == frow.end()) continue;
                R sgn(1);
                if (twists[bi]) {
                    int parity = 0;
                    for (int x : fin) parity += twists[bi] * twist_parity(in_space, x);
                    if (parity & 1) sgn = R(-1);
                }
                size_t oldn = tuple.size();
                tuple.insert(tuple.end(), fin.begin(), fin.end());
                walk(bi + 1, coeff * sgn * it->second);
                tuple.resize(oldn);
            }
        };
        if (gin.size() == blocks.size()) walk(0, R(1));
    }
    return out;
}

}  // namespace nova
