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

#ifndef QTR_RATFUNC_HPP
#define QTR_RATFUNC_HPP

#include <utility>
#include <vector>

#include "qtr/poly.hpp"
#include "qtr/series.hpp"

namespace qtr {

/// Rational function in one variable.  Exact backends keep numerator and
/// denominator coprime and the denominator monic.
template <class K>
class RatFunc {
   public:
    RatFunc() : num_(), den_(Poly<K>::one()) {}
    explicit RatFunc(K c) : num_(Poly<K>(std::move(c))), den_(Poly<K>::one()) {}
    RatFunc(Poly<K> n) : num_(std::move(n)), den_(Poly<K>::one()) {}  // NOLINT
    RatFunc(Poly<K> n, Poly<K> d) : num_(std::move(n)), den_(std::move(d)) {
        if (den_.is_zero()) throw Error("zero denominator");
        normalize();
    }

    static RatFunc zero() { return RatFunc(); }
    static RatFunc one() { return RatFunc(FieldOps<K>::one()); }
    static RatFunc x() { return RatFunc(Poly<K>::x()); }

    const Poly<K>& num() const { return num_; }
    const Poly<K>& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.degree() == 0; }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a) {
        RatFunc r = a;
        r.num_ = -r.num_;
        return r;
    }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw Error("division by zero rational function");
        return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
    }
    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        return (a.num_ * b.den_ - b.num_ * a.den_).is_zero();
    }
    friend bool operator!=(const RatFunc& a, const RatFunc& b) { return !(a == b); }

    K eval(const K& x) const {
        K d = den_.eval(x);
        if (FieldOps<K>::is_zero(d)) throw Error("evaluation at pole");
        return num_.eval(x) / d;
    }

    RatFunc derivative() const {
        return RatFunc(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
    }

    /// Exact local Laurent expansion at s, certified through exponent N.
    LocalSeries<K> local_expand(const K& s, int N) const {
        if (num_.is_zero()) return LocalSeries<K>::zero_to(s, N);
        Poly<K> nt = num_.shifted(s);
        Poly<K> dt = den_.shifted(s);
        int vd = 0;
        while (FieldOps<K>::is_zero(dt.coeff(vd))) ++vd;
        int vn = 0;
        while (FieldOps<K>::is_zero(nt.coeff(vn))) ++vn;
        // series division certified to arbitrary order: polynomials are exact
        int guard = N + vd + 1 + std::max(0, vd - vn);
        LocalSeries<K> sn(s, vn, std::vector<K>(nt.coeffs().begin() + vn, nt.coeffs().end()), guard + 1);
        LocalSeries<K> sd(s, vd, std::vector<K>(dt.coeffs().begin() + vd, dt.coeffs().end()), guard + 1);
        return (sn * sd.inverse()).truncated(N);
    }

    /// Order of vanishing at infinity: deg(den) - deg(num); large when zero.
    int decay_at_infinity() const {
        if (num_.is_zero()) return 1 << 20;
        return den_.degree() - num_.degree();
    }

   private:
    Poly<K> num_, den_;

    void normalize() {
        if (num_.is_zero()) {
            den_ = Poly<K>::one();
            return;
        }
        if constexpr (FieldOps<K>::exact) {
            // degree-0 operands cannot share a factor
            if (num_.degree() > 0 && den_.degree() > 0) {
                Poly<K> g = gcd(num_, den_);
                if (g.degree() > 0) {
                    num_ = divmod(num_, g).first;
                    den_ = divmod(den_, g).first;
                }
            }
        }
        K lead = den_.leading();
        if (!FieldOps<K>::is_zero(lead - FieldOps<K>::one())) {
            K inv = FieldOps<K>::one() / lead;
            num_ = inv * num_;
            den_ = inv * den_;
        }
    }
};

template <class K>
RatFunc<K> derive(const RatFunc<K>& f) {
    return f.derivative();
}

template <class K>
struct FieldOps<RatFunc<K>> {
    static constexpr bool exact = FieldOps<K>::exact;
    static RatFunc<K> zero() { return RatFunc<K>::zero(); }
    static RatFunc<K> one() { return RatFunc<K>::one(); }
    static bool is_zero(const RatFunc<K>& f) { return f.is_zero(); }
    static std::string str(const RatFunc<K>&) { return "<ratfunc>"; }
};

template <class K, class F>
struct ScalarCast<RatFunc<K>, F> {
    static RatFunc<K> cast(const F& v) { return RatFunc<K>(scalar_cast<K, F>(v)); }
};
template <class K>
struct ScalarCast<RatFunc<K>, RatFunc<K>> {
    static RatFunc<K> cast(const RatFunc<K>& v) { return v; }
};

template <class K>
K residue_at(const RatFunc<K>& f, const K& s) {
    return f.local_expand(s, 0).residue();
}

/// Partial fraction decomposition over an exact field with all denominator
/// roots in the field.
template <class K>
struct PartialFractions {
    Poly<K> poly_part;
    struct Part {
        K pole;
        std::vector<K> principal;  // principal[r-1] multiplies (x-pole)^{-r}
    };
    std::vector<Part> parts;

    RatFunc<K> reassembled() const {
        RatFunc<K> acc{poly_part};
        for (const auto& p : parts) {
            RatFunc<K> lin(Poly<K>::x_minus(p.pole));
            RatFunc<K> powinv = RatFunc<K>::one();
            for (size_t r = 0; r < p.principal.size(); ++r) {
                powinv = powinv / lin;
                acc += RatFunc<K>(p.principal[r]) * powinv;
            }
        }
        return acc;
    }
};

template <class K>
PartialFractions<K> partial_fractions(const RatFunc<K>& f, const std::vector<K>& candidate_poles = {}) {
    static_assert(FieldOps<K>::exact, "partial fractions requires the exact backend");
    PartialFractions<K> out;
    auto [q, r] = divmod(f.num(), f.den());
    out.poly_part = q;
    if (r.is_zero()) return out;
    RootList roots = rational_roots(f.den(), candidate_poles);
    if (roots.remainder.degree() > 0)
        throw PoleFieldMismatch("denominator factor of degree " + std::to_string(roots.remainder.degree()));
    RatFunc<K> proper(r, f.den());
    for (const auto& [pole, mult] : roots.roots) {
        auto se = proper.local_expand(pole, -1);
        typename PartialFractions<K>::Part part;
        part.pole = pole;
        part.principal.assign(static_cast<size_t>(mult), FieldOps<K>::zero());
        for (int k = 1; k <= mult; ++k) part.principal[static_cast<size_t>(k) - 1] = se.coeff(-k);
        while (!part.principal.empty() && FieldOps<K>::is_zero(part.principal.back())) part.principal.pop_back();
        if (!part.principal.empty()) out.parts.push_back(std::move(part));
    }
    return out;
}

}  // namespace qtr

#endif
