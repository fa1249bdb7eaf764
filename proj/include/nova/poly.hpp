#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include "nova/rational.hpp"

namespace nova {

// Dense univariate polynomial over a commutative ring R, lowest degree first.
// Nesting Poly<Poly<Rat>> gives the bivariate coefficients needed when a
// pseudo-isotopy is integrated with a symbolic lower bound.
template <class R>
class Poly {
  public:
    Poly() = default;
    explicit Poly(R c) {
        if (!is_zero_coeff(c)) coeffs_.push_back(std::move(c));
    }
    static Poly var() {
        Poly p;
        p.coeffs_ = {R(0), R(1)};
        return p;
    }
    static Poly constant(R c) { return Poly(std::move(c)); }

    const std::vector<R>& coeffs() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }

    R coeff(size_t i) const { return i < coeffs_.size() ? coeffs_[i] : R(0); }

    friend Poly operator+(const Poly& a, const Poly& b) {
        Poly r;
        r.coeffs_.resize(std::max(a.coeffs_.size(), b.coeffs_.size()), R(0));
        for (size_t i = 0; i < r.coeffs_.size(); ++i) r.coeffs_[i] = a.coeff(i) + b.coeff(i);
        r.trim();
        return r;
    }
    friend Poly operator-(const Poly& a, const Poly& b) {
        Poly r;
        r.coeffs_.resize(std::max(a.coeffs_.size(), b.coeffs_.size()), R(0));
        for (size_t i = 0; i < r.coeffs_.size(); ++i) r.coeffs_[i] = a.coeff(i) - b.coeff(i);
        r.trim();
        return r;
    }
    Poly operator-() const {
        Poly r = *this;
        for (auto& c : r.coeffs_) c = -c;
        return r;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return {};
        Poly r;
        r.coeffs_.assign(a.coeffs_.size() + b.coeffs_.size() - 1, R(0));
        for (size_t i = 0; i < a.coeffs_.size(); ++i)
            for (size_t j = 0; j < b.coeffs_.size(); ++j)
                r.coeffs_[i + j] = r.coeffs_[i + j] + a.coeffs_[i] * b.coeffs_[j];
        r.trim();
        return r;
    }
    Poly& operator+=(const Poly& o) { return *this = *this + o; }
    Poly& operator-=(const Poly& o) { return *this = *this - o; }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.coeffs_ == b.coeffs_; }

    R eval(const R& x) const {
        R acc(0);
        for (size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
        return acc;
    }

    Poly derivative() const {
        Poly r;
        for (size_t i = 1; i < coeffs_.size(); ++i) r.coeffs_.push_back(coeffs_[i] * R(static_cast<long>(i)));
        r.trim();
        return r;
    }

    // Antiderivative with zero constant term; requires R to contain 1/n.
    Poly antiderivative() const {
        Poly r;
        if (coeffs_.empty()) return r;
        r.coeffs_.assign(coeffs_.size() + 1, R(0));
        for (size_t i = 0; i < coeffs_.size(); ++i)
            r.coeffs_[i + 1] = coeffs_[i] * inv_int(static_cast<long>(i) + 1);
        r.trim();
        return r;
    }

    R definite_integral(const R& a, const R& b) const {
        Poly F = antiderivative();
        return F.eval(b) - F.eval(a);
    }

  private:
    static bool is_zero_coeff(const R& c) { return c == R(0); }
    static R inv_int(long n) { return R(1) / R(n); }
    void trim() {
        while (!coeffs_.empty() && coeffs_.back() == R(0)) coeffs_.pop_back();
    }
    std::vector<R> coeffs_;
};

template <>
inline Rat Poly<Rat>::inv_int(long n) {
    return Rat(1, n);
}

using Poly1 = Poly<Rat>;        // Q[s]
using Poly2 = Poly<Poly<Rat>>;  // (Q[s])[u]

inline Poly2 poly2_constant(const Rat& c) { return Poly2(Poly1(c)); }
inline Poly2 poly2_lift(const Poly1& p) { return Poly2(p); }  // p(s), constant in u
inline Poly2 poly2_upper() { return Poly2::var(); }           // u

// Sparse multivariate polynomial in a finite variable set, used for
// time-allocation integrands over tree polytopes.
class MPoly {
  public:
    using Key = std::vector<int>;  // exponent vector
    MPoly() = default;
    explicit MPoly(const Rat& c, size_t nvars = 0) {
        if (c != 0) terms_[Key(nvars, 0)] = c;
    }
    static MPoly var(size_t i, size_t nvars) {
        MPoly p;
        Key k(nvars, 0);
        k[i] = 1;
        p.terms_[k] = Rat(1);
        return p;
    }
    const std::map<Key, Rat>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    friend MPoly operator+(const MPoly& a, const MPoly& b) {
        MPoly r = a;
        for (auto& [k, c] : b.terms_) {
            auto it = r.terms_.find(k);
            if (it == r.terms_.end())
                r.terms_[k] = c;
            else if ((it->second += c) == 0)
                r.terms_.erase(it);
        }
        return r;
    }
    friend MPoly operator*(const MPoly& a, const MPoly& b) {
        MPoly r;
        for (auto& [ka, ca] : a.terms_)
            for (auto& [kb, cb] : b.terms_) {
                Key k(std::max(ka.size(), kb.size()), 0);
                for (size_t i = 0; i < ka.size(); ++i) k[i] += ka[i];
                for (size_t i = 0; i < kb.size(); ++i) k[i] += kb[i];
                auto it = r.terms_.find(k);
                if (it == r.terms_.end()) {
                    if (Rat p = ca * cb; p != 0) r.terms_[k] = p;
                } else if ((it->second += ca * cb) == 0)
                    r.terms_.erase(it);
            }
        return r;
    }
    MPoly& operator+=(const MPoly& o) { return *this = *this + o; }
    MPoly& operator*=(const MPoly& o) { return *this = *this * o; }
    friend bool operator==(const MPoly& a, const MPoly& b) { return a.terms_ == b.terms_; }

    // Integrate variable i over [lo, hi], where the bounds are themselves
    // polynomials in the remaining variables.
    MPoly integrate_var(size_t i, const MPoly& lo, const MPoly& hi) const {
        MPoly out;
        for (auto& [k, c] : terms_) {
            int e = i < k.size() ? k[i] : 0;
            Key rest = k;
            if (i < rest.size()) rest[i] = 0;
            MPoly mono;
            mono.terms_[rest] = c * Rat(1, e + 1);
            out += mono * (pow_poly(hi, e + 1) - pow_poly(lo, e + 1));
        }
        return out;
    }

    Rat constant_value() const {
        if (terms_.empty()) return Rat(0);
        if (terms_.size() == 1 && std::all_of(terms_.begin()->first.begin(), terms_.begin()->first.end(),
                                              [](int e) { return e == 0; }))
            return terms_.begin()->second;
        throw std::logic_error("MPoly not constant");
    }

    friend MPoly operator-(const MPoly& a, const MPoly& b) {
        MPoly nb = b;
        for (auto& [k, c] : nb.terms_) c = -c;
        return a + nb;
    }

    static MPoly pow_poly(const MPoly& p, int e) {
        MPoly acc(Rat(1));
        for (int i = 0; i < e; ++i) acc *= p;
        return acc;
    }

  private:
    std::map<Key, Rat> terms_;
};

}  // namespace nova
