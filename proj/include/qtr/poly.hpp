/*
   Copyright 2026 the qtr authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef QTR_POLY_HPP
#define QTR_POLY_HPP

#include <algorithm>
#include <utility>
#include <vector>

#include "qtr/scalars.hpp"

namespace qtr {

/// Univariate polynomial, coefficients ascending by degree.
/// Invariant: leading coefficient nonzero unless the polynomial is zero
/// (empty coefficient vector).
template <class K>
class Poly {
   public:
    Poly() = default;
    explicit Poly(K c) : c_{std::move(c)} { trim(); }
    explicit Poly(std::vector<K> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Poly zero() { return Poly(); }
    static Poly one() { return Poly(FieldOps<K>::one()); }
    static Poly x() { return Poly(std::vector<K>{FieldOps<K>::zero(), FieldOps<K>::one()}); }
    /// x - s
    static Poly x_minus(const K& s) { return Poly(std::vector<K>{-s, FieldOps<K>::one()}); }

    bool is_zero() const { return c_.empty(); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
    const std::vector<K>& coeffs() const { return c_; }
    K coeff(int i) const {
        return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : FieldOps<K>::zero();
    }
    const K& leading() const { return c_.back(); }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<K> r(std::max(a.c_.size(), b.c_.size()), FieldOps<K>::zero());
        for (size_t i = 0; i < a.c_.size(); ++i) r[i] = r[i] + a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) r[i] = r[i] + b.c_[i];
        return Poly(std::move(r));
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
    friend Poly operator-(const Poly& a) {
        std::vector<K> r(a.c_);
        for (auto& v : r) v = -v;
        Poly p;
        p.c_ = std::move(r);
        return p;
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<K> r(a.c_.size() + b.c_.size() - 1, FieldOps<K>::zero());
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] = r[i + j] + a.c_[i] * b.c_[j];
        return Poly(std::move(r));
    }
    friend Poly operator*(const K& s, const Poly& a) {
        std::vector<K> r(a.c_);
        for (auto& v : r) v = s * v;
        return Poly(std::move(r));
    }
    friend bool operator==(const Poly& a, const Poly& b) { return (a - b).is_zero(); }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    K eval(const K& x) const {
        K acc = FieldOps<K>::zero();
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<K> r(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = k_int<K>(static_cast<long>(i)) * c_[i];
        return Poly(std::move(r));
    }

    /// Coefficients of p(s + t) as a polynomial in t (exact Taylor shift).
    Poly shifted(const K& s) const {
        Poly r;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            r = r * x_minus(-s);  // multiply by (t + s)
            r = r + Poly(*it);
        }
        return r;
    }

    Poly monic() const {
        if (is_zero()) return *this;
        K inv = FieldOps<K>::one() / c_.back();
        return inv * *this;
    }

    /// Quotient and remainder; divisor must be nonzero.
    friend std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
        Poly r = a;
        std::vector<K> q(std::max<int>(a.degree() - b.degree() + 1, 0), FieldOps<K>::zero());
        while (!r.is_zero() && r.degree() >= b.degree()) {
            K f = r.c_.back() / b.c_.back();
            int shift = r.degree() - b.degree();
            q[shift] = q[shift] + f;
            for (size_t i = 0; i < b.c_.size(); ++i)
                r.c_[i + shift] = r.c_[i + shift] - f * b.c_[i];
            r.trim_hard();
        }
        return {Poly(std::move(q)), r};
    }

    friend Poly gcd(Poly a, Poly b) {
        static_assert(FieldOps<K>::exact, "gcd requires an exact coefficient field");
        // monic remainders keep coefficient growth subresultant-bounded
        a = a.monic();
        b = b.monic();
        while (!b.is_zero()) {
            auto [q, r] = divmod(a, b);
            (void)q;
            a = std::move(b);
            b = r.monic();
        }
        return a;
    }

   private:
    std::vector<K> c_;

    void trim() {
        while (!c_.empty() && FieldOps<K>::is_zero(c_.back())) c_.pop_back();
    }
    void trim_hard() { trim(); }
};

/// Rational roots of an exact polynomial, with multiplicities, by candidate
/// deflation first and divisor search second.  Returns the deflated
/// remainder; a nonconstant remainder means roots outside the field.
struct RootList {
    std::vector<std::pair<Rational, int>> roots;  // (root, multiplicity)
    Poly<Rational> remainder;                     // root-free part
};

namespace detail {
inline std::vector<BigInt> divisors(BigInt n) {
    if (n < 0) n = -n;
    std::vector<BigInt> ds;
    if (n == 0) return ds;
    std::vector<std::pair<BigInt, int>> fac;
    BigInt m = n;
    for (BigInt p = 2; p * p <= m && p < 2000000; ++p) {
        if (m % p == 0) {
            int e = 0;
            while (m % p == 0) {
                m /= p;
                ++e;
            }
            fac.emplace_back(p, e);
        }
    }
    if (m > 1) {
        if (m > BigInt(1) << 64) throw PoleFieldMismatch("coefficient too large to factor for root search");
        fac.emplace_back(m, 1);
    }
    ds.push_back(1);
    for (auto& [p, e] : fac) {
        size_t sz = ds.size();
        BigInt pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            for (size_t i = 0; i < sz; ++i) ds.push_back(ds[i] * pk);
        }
    }
    return ds;
}
}  // namespace detail

inline RootList rational_roots(Poly<Rational> p, const std::vector<Rational>& candidates = {}) {
    RootList out;
    if (p.is_zero()) {
        out.remainder = p;
        return out;
    }
    auto deflate_all = [&](const Rational& r) {
        int mult = 0;
        while (!p.is_zero() && FieldOps<Rational>::is_zero(p.eval(r))) {
            auto [q, rem] = divmod(p, Poly<Rational>::x_minus(r));
            p = q;
            ++mult;
        }
        if (mult > 0) out.roots.emplace_back(r, mult);
    };
    for (const auto& c : candidates) deflate_all(c);
    if (p.degree() >= 1) {
        // rational root theorem on the integerized polynomial
        BigInt l = 1;
        for (const auto& c : p.coeffs()) l = lcm(l, denominator(c));
        std::vector<BigInt> ic;
        for (const auto& c : p.coeffs()) ic.push_back(numerator(c * Rational(l)));
        size_t low = 0;
        while (low < ic.size() && ic[low] == 0) ++low;
        if (low > 0) deflate_all(Rational(0));
        if (p.degree() >= 1) {
            auto ps = detail::divisors(ic[low]);
            auto qs = detail::divisors(ic.back());
            for (const auto& pu : ps)
                for (const auto& qv : qs) {
                    if (p.is_zero() || p.degree() < 1) break;
                    deflate_all(Rational(pu, qv));
                    deflate_all(Rational(-pu, qv));
                }
        }
    }
    out.remainder = p;
    return out;
}

}  // namespace qtr

#endif
