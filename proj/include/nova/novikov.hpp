#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nova/rational.hpp"

namespace nova {

struct ZeroDivision : std::runtime_error {
    ZeroDivision() : std::runtime_error("division by zero Novikov element") {}
};
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& m) : std::runtime_error(m) {}
};

// Everything in one run shares a single truncation context: terms with
// exponent >= e_max are discarded by every operation, and operator systems
// carry components only up to arity k_max. field_mode admits negative
// exponents (Laurent contexts); ring mode rejects them.
struct TruncationContext {
    Rat e_max = Rat(5);
    int k_max = 6;
    bool field_mode = true;

    TruncationContext() = default;
    TruncationContext(Rat e, int k, bool field = true) : e_max(std::move(e)), k_max(k), field_mode(field) {
        if (e_max <= 0) throw DomainError("E_max must be positive");
        if (k_max < 1) throw DomainError("K_max must be >= 1");
    }
};

// Truncated element of the Novikov field: a finite sum of a_i T^{lambda_i}
// with exact rational exponents and coefficients, exponents strictly
// increasing, all below E_max. Zero is the empty term list.
class NovikovNum {
  public:
    using Term = std::pair<Rat, Rat>;  // (exponent, coefficient)

    NovikovNum() = default;

    static NovikovNum from_terms(std::vector<Term> terms, const TruncationContext& ctx);
    static NovikovNum scalar(const Rat& c, const TruncationContext& ctx) {
        return from_terms({{Rat(0), c}}, ctx);
    }
    static NovikovNum t_power(const Rat& e, const TruncationContext& ctx) {
        return from_terms({{e, Rat(1)}}, ctx);
    }
    static NovikovNum one(const TruncationContext& ctx) { return scalar(Rat(1), ctx); }

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    // Smallest exponent; nullopt encodes the valuation of zero (infinity).
    std::optional<Rat> valuation() const {
        if (terms_.empty()) return std::nullopt;
        return terms_.front().first;
    }
    Rat leading_coeff() const { return terms_.empty() ? Rat(0) : terms_.front().second; }

    friend bool operator==(const NovikovNum& a, const NovikovNum& b) { return a.terms_ == b.terms_; }

    std::string str() const;

  private:
    std::vector<Term> terms_;
};

NovikovNum add(const NovikovNum& x, const NovikovNum& y, const TruncationContext& ctx);
NovikovNum sub(const NovikovNum& x, const NovikovNum& y, const TruncationContext& ctx);
NovikovNum mul(const NovikovNum& x, const NovikovNum& y, const TruncationContext& ctx);
NovikovNum scale(const Rat& c, const NovikovNum& x, const TruncationContext& ctx);
NovikovNum negate(const NovikovNum& x);

// Inverse by geometric expansion of the unit part. Throws ZeroDivision on 0
// and DomainError when the inverse needs a negative exponent in ring mode.
NovikovNum invert(const NovikovNum& x, const TruncationContext& ctx);

// exp restricted to val(x) > 0 so that coefficients stay rational.
NovikovNum exp_plus(const NovikovNum& x, const TruncationContext& ctx);

// log restricted to y in 1 + Lambda_+.
NovikovNum log_one_plus(const NovikovNum& y, const TruncationContext& ctx);

}  // namespace nova
