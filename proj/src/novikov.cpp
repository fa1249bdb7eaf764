#include "nova/novikov.hpp"

#include <algorithm>
#include <map>

namespace nova {

NovikovNum NovikovNum::from_terms(std::vector<Term> terms, const TruncationContext& ctx) {
    std::map<Rat, Rat> acc;
    for (auto& [e, c] : terms) {
        if (c == 0) continue;
        if (e >= ctx.e_max) continue;
        if (!ctx.field_mode && e < 0) throw DomainError("negative exponent in ring mode");
        acc[e] += c;
    }
    NovikovNum out;
    for (auto& [e, c] : acc)
        if (c != 0) out.terms_.push_back({e, c});
    return out;
}

std::string NovikovNum::str() const {
    if (terms_.empty()) return "0";
    std::string s;
    bool first = true;
    for (auto& [e, c] : terms_) {
        if (!first) s += " + ";
        first = false;
        if (e == 0)
            s += rat_str(c);
        else if (c == 1)
            s += "T^" + rat_str(e);
        else
            s += rat_str(c) + "*T^" + rat_str(e);
    }
    return s;
}

NovikovNum add(const NovikovNum& x, const NovikovNum& y, const TruncationContext& ctx) {
    std::vector<NovikovNum::Term> t = x.terms();
    t.insert(t.end(), y.terms().begin(), y.terms().end());
    return NovikovNum::from_terms(std::move(t), ctx);
}

NovikovNum negate(const NovikovNum& x) {
    // sign flips keep every invariant; rebuild with a bound above all exponents
    auto t = x.terms();
    for (auto& [e, c] : t) c = -c;
    Rat top = t.empty() ? Rat(1) : t.back().first + 1;
    TruncationContext wide(top > 0 ? top : Rat(1), 1, true);
    return NovikovNum::from_terms(std::move(t), wide);
}

NovikovNum sub(const NovikovNum& x, const NovikovNum& y, const TruncationContext& ctx) {
    return add(x, negate(y), ctx);
}

NovikovNum mul(const NovikovNum& x, const NovikovNum& y, const TruncationContext& ctx) {
    std::vector<NovikovNum::Term> t;
    t.reserve(x.terms().size() * y.terms().size());
    for (auto& [e1, c1] : x.terms())
        for (auto& [e2, c2] : y.terms()) {
            Rat e = e1 + e2;
            if (e < ctx.e_max) t.push_back({e, c1 * c2});
        }
    return NovikovNum::from_terms(std::move(t), ctx);
}

NovikovNum scale(const Rat& c, const NovikovNum& x, const TruncationContext& ctx) {
    std::vector<NovikovNum::Term> t = x.terms();
    for (auto& [e, a] : t) a *= c;
    return NovikovNum::from_terms(std::move(t), ctx);
}

NovikovNum invert(const NovikovNum& x, const TruncationContext& ctx) {
    if (x.is_zero()) throw ZeroDivision();
    Rat v = *x.valuation();
    if (!ctx.field_mode && v > 0) throw DomainError("inverse needs negative exponent in ring mode");
    Rat lead = x.leading_coeff();
    // x = lead * T^v * (1 + u),  val(u) > 0
    std::vector<NovikovNum::Term> ut;
    for (size_t i = 1; i < x.terms().size(); ++i) {
        auto [e, c] = x.terms()[i];
        ut.push_back({e - v, c / lead});
    }
    NovikovNum u = NovikovNum::from_terms(std::move(ut), ctx);
    // geometric series sum (-u)^k, truncated
    NovikovNum geo = NovikovNum::one(ctx);
    NovikovNum pw = NovikovNum::one(ctx);
    while (true) {
        pw = mul(pw, negate(u), ctx);
        if (pw.is_zero()) break;
        geo = add(geo, pw, ctx);
    }
    std::vector<NovikovNum::Term> out;
    for (auto& [e, c] : geo.terms()) out.push_back({e - v, c / lead});
    return NovikovNum::from_terms(std::move(out), ctx);
}

NovikovNum exp_plus(const NovikovNum& x, const TruncationContext& ctx) {
    if (x.is_zero()) return NovikovNum::one(ctx);
    if (!(*x.valuation() > 0)) throw DomainError("exp requires val > 0 in exact mode");
    NovikovNum acc = NovikovNum::one(ctx);
    NovikovNum pw = NovikovNum::one(ctx);
    unsigned k = 0;
    while (true) {
        ++k;
        pw = mul(pw, x, ctx);
        if (pw.is_zero()) break;
        acc = add(acc, scale(inv_factorial(k), pw, ctx), ctx);
    }
    return acc;
}

NovikovNum log_one_plus(const NovikovNum& y, const TruncationContext& ctx) {
    NovikovNum u = sub(y, NovikovNum::one(ctx), ctx);
    if (!u.is_zero() && !(*u.valuation() > 0)) throw DomainError("log requires argument in 1 + Lambda_+");
    NovikovNum acc;  // zero
    NovikovNum pw = NovikovNum::one(ctx);
    unsigned k = 0;
    while (true) {
        ++k;
        pw = mul(pw, u, ctx);
        if (pw.is_zero()) break;
        Rat coef = Rat((k % 2) ? 1 : -1, static_cast<long>(k));
        acc = add(acc, scale(coef, pw, ctx), ctx);
    }
    return acc;
}

}  // namespace nova
