#include "nova/trees.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace nova {

namespace {

struct EnumCtx {
    const LabelGroup& group;
    Rat e_max;
    std::vector<LabelClass> monoid;  // support monoid below e_max, energy-sorted
    Rat gap;                         // smallest positive class energy, 0 if none
    std::map<std::pair<int, LabelClass>, std::vector<DecoratedTree>> memo;

    // weight bounds how many nonempty subtrees a budget (k, beta) can feed;
    // every tree other than T(0,0) has weight >= 1, which grounds the recursion
    Rat weight(int k, const LabelClass& beta) const {
        Rat w(k);
        if (gap > 0) w += group.energy_of(beta) / gap;
        return w;
    }
};

std::vector<std::vector<DecoratedTree>> forests(EnumCtx& ctx, int k, const LabelClass& beta, int parts);

const std::vector<DecoratedTree>& trees(EnumCtx& ctx, int k, const LabelClass& beta) {
    auto key = std::make_pair(k, beta);
    auto it = ctx.memo.find(key);
    if (it != ctx.memo.end()) return it->second;
    std::vector<DecoratedTree> out;
    if (k == 1 && is_zero_class(beta)) out.push_back(DecoratedTree::make_leaf());
    for (auto& b0 : ctx.monoid) {
        LabelClass rest = sub_class(beta, b0);
        if (ctx.group.energy_of(rest) < 0) continue;
        // nullary vertex: the corolla for (0, b0)
        if (!is_zero_class(b0) && k == 0 && is_zero_class(rest)) {
            DecoratedTree t;
            t.decoration = b0;
            out.push_back(t);
        }
        int min_children = is_zero_class(b0) ? 2 : 1;
        int max_children = k + (ctx.gap > 0 ? rat_floor(ctx.group.energy_of(rest) / ctx.gap) : 0);
        for (int ell = min_children; ell <= max_children; ++ell)
            for (auto& f : forests(ctx, k, rest, ell)) {
                DecoratedTree t;
                t.decoration = b0;
                t.children = f;
                out.push_back(t);
            }
    }
    std::sort(out.begin(), out.end(), [](const DecoratedTree& a, const DecoratedTree& b) {
        int na = a.num_interior(), nb = b.num_interior();
        if (na != nb) return na < nb;
        return a.canonical() < b.canonical();
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const DecoratedTree& a, const DecoratedTree& b) {
                              return a.canonical() == b.canonical();
                          }),
              out.end());
    return ctx.memo.emplace(key, std::move(out)).first->second;
}

std::vector<std::vector<DecoratedTree>> forests(EnumCtx& ctx, int k, const LabelClass& beta, int parts) {
    std::vector<std::vector<DecoratedTree>> out;
    if (parts == 0) {
        if (k == 0 && is_zero_class(beta)) out.push_back({});
        return out;
    }
    // every remaining part needs weight >= 1
    if (ctx.weight(k, beta) < parts) return out;
    for (int k1 = 0; k1 <= k; ++k1)
        for (auto& b1 : ctx.monoid) {
            if (k1 == 0 && is_zero_class(b1)) continue;  // T(0,0) is empty
            LabelClass rest = sub_class(beta, b1);
            if (ctx.group.energy_of(rest) < 0) continue;
            if (ctx.weight(k - k1, rest) < parts - 1) continue;
            const auto& heads = trees(ctx, k1, b1);
            if (heads.empty()) continue;
            for (auto& tail : forests(ctx, k - k1, rest, parts - 1))
                for (auto& h : heads) {
                    std::vector<DecoratedTree> f;
                    f.reserve(tail.size() + 1);
                    f.push_back(h);
                    f.insert(f.end(), tail.begin(), tail.end());
                    out.push_back(std::move(f));
                }
        }
    return out;
}

}  // namespace

std::vector<DecoratedTree> enumerate_trees(int k, const LabelClass& beta, const LabelGroup& group,
                                           const Rat& e_max) {
    if (k == 0 && is_zero_class(beta)) return {};  // T(0,0) is empty
    auto monoid = group.enumerate_support(e_max);
    Rat gap(0);
    for (auto& b : monoid)
        if (!is_zero_class(b)) {
            Rat e = group.energy_of(b);
            if (gap == 0 || e < gap) gap = e;
        }
    EnumCtx ctx{group, e_max, std::move(monoid), gap, {}};
    auto out = trees(ctx, k, beta);
    for (auto& t : out)
        if (!t.stable(group)) throw DivergenceError("enumerated unstable tree: " + t.canonical());
    return out;
}

std::vector<int> interior_parents(const DecoratedTree& t) {
    std::vector<int> parents;
    std::function<void(const DecoratedTree&, int)> walk = [&](const DecoratedTree& node, int parent) {
        if (node.leaf) return;
        int self = static_cast<int>(parents.size());
        parents.push_back(parent);
        for (auto& c : node.children) walk(c, self);
    };
    walk(t, -1);
    return parents;
}

Rat integrate_allocation(const DecoratedTree& t, const MPoly& integrand, const Rat& a, const Rat& b) {
    auto parents = interior_parents(t);
    size_t n = parents.size();
    if (n == 0) return integrand.constant_value();
    MPoly acc = integrand;
    MPoly lo(a, n);
    // children come after parents in pre-order, so a reverse sweep eliminates
    // each vertex before its parent; tau(v) ranges in [a, tau(parent)]
    for (size_t i = n; i-- > 0;) {
        MPoly hi = parents[i] < 0 ? MPoly(b, n) : MPoly::var(static_cast<size_t>(parents[i]), n);
        acc = acc.integrate_var(i, lo, hi);
    }
    return acc.constant_value();
}

Rat allocation_volume(const DecoratedTree& t, const Rat& a, const Rat& b) {
    auto parents = interior_parents(t);
    return integrate_allocation(t, MPoly(Rat(1), parents.size()), a, b);
}

mpz_class super_catalan_count(int k) {
    if (k <= 0) return 0;
    std::vector<mpz_class> A(static_cast<size_t>(k) + 1, 0);
    A[1] = 1;
    for (int n = 2; n <= k; ++n) {
        // conv[j] after l rounds = #forests of l trees with j leaves total
        std::vector<mpz_class> conv(static_cast<size_t>(n) + 1, 0);
        conv[0] = 1;
        mpz_class total = 0;
        for (int l = 1; l <= n; ++l) {
            std::vector<mpz_class> next(static_cast<size_t>(n) + 1, 0);
            for (int j = 0; j <= n; ++j) {
                if (conv[static_cast<size_t>(j)] == 0) continue;
                for (int t = 1; t + j <= n; ++t)
                    next[static_cast<size_t>(j + t)] += conv[static_cast<size_t>(j)] * A[static_cast<size_t>(t)];
            }
            conv = std::move(next);
            if (l >= 2) total += conv[static_cast<size_t>(n)];
        }
        A[static_cast<size_t>(n)] = total;
    }
    return A[static_cast<size_t>(k)];
}

}  // namespace nova
