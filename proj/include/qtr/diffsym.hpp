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

#ifndef QTR_DIFFSYM_HPP
#define QTR_DIFFSYM_HPP

#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qtr/scalars.hpp"

namespace qtr {

/// Monomial in formal symbols f_j and their derivatives f_j^{(k)}.
/// Factors are (packed id, exponent), sorted by id, exponents positive.
struct DiffMono {
    std::vector<std::pair<uint32_t, uint32_t>> factors;

    static uint32_t id(uint32_t sym, uint32_t der) { return (sym << 12) | der; }
    static uint32_t sym_of(uint32_t i) { return i >> 12; }
    static uint32_t der_of(uint32_t i) { return i & 0xfffu; }

    bool operator<(const DiffMono& o) const { return factors < o.factors; }
    bool operator==(const DiffMono& o) const { return factors == o.factors; }

    friend DiffMono operator*(const DiffMono& a, const DiffMono& b) {
        DiffMono r;
        size_t i = 0, j = 0;
        while (i < a.factors.size() || j < b.factors.size()) {
            if (j == b.factors.size() || (i < a.factors.size() && a.factors[i].first < b.factors[j].first))
                r.factors.push_back(a.factors[i++]);
            else if (i == a.factors.size() || b.factors[j].first < a.factors[i].first)
                r.factors.push_back(b.factors[j++]);
            else {
                r.factors.emplace_back(a.factors[i].first, a.factors[i].second + b.factors[j].second);
                ++i, ++j;
            }
        }
        return r;
    }

    int total_degree() const {
        int d = 0;
        for (auto& [k, e] : factors) d += static_cast<int>(e);
        return d;
    }
};

/// Differential polynomial over a coefficient field K0 (constants under the
/// derivation).  Canonical form: sorted monomial map without zero entries.
template <class K0>
class DiffPoly {
   public:
    using Map = std::map<DiffMono, K0>;

    DiffPoly() = default;
    explicit DiffPoly(K0 c) {
        if (!FieldOps<K0>::is_zero(c)) m_[DiffMono{}] = std::move(c);
    }
    static DiffPoly symbol(uint32_t sym, uint32_t der = 0) {
        DiffPoly p;
        DiffMono mo;
        mo.factors.emplace_back(DiffMono::id(sym, der), 1);
        p.m_[mo] = FieldOps<K0>::one();
        return p;
    }

    const Map& terms() const { return m_; }
    bool is_zero() const { return m_.empty(); }

    friend DiffPoly operator+(const DiffPoly& a, const DiffPoly& b) {
        DiffPoly r = a;
        for (const auto& [mo, c] : b.m_) r.add_term(mo, c);
        return r;
    }
    friend DiffPoly operator-(const DiffPoly& a, const DiffPoly& b) { return a + (-b); }
    friend DiffPoly operator-(const DiffPoly& a) {
        DiffPoly r = a;
        for (auto& [mo, c] : r.m_) c = -c;
        return r;
    }
    friend DiffPoly operator*(const DiffPoly& a, const DiffPoly& b) {
        DiffPoly r;
        for (const auto& [ma, ca] : a.m_)
            for (const auto& [mb, cb] : b.m_) r.add_term(ma * mb, ca * cb);
        return r;
    }
    friend DiffPoly operator*(const K0& s, const DiffPoly& a) {
        DiffPoly r;
        for (const auto& [mo, c] : a.m_) r.add_term(mo, s * c);
        return r;
    }
    friend bool operator==(const DiffPoly& a, const DiffPoly& b) { return (a - b).is_zero(); }
    friend bool operator!=(const DiffPoly& a, const DiffPoly& b) { return !(a == b); }

    /// Formal derivation: f_j^{(k)} -> f_j^{(k+1)}, Leibniz on monomials.
    DiffPoly derivative() const {
        DiffPoly r;
        for (const auto& [mo, c] : m_) {
            for (size_t i = 0; i < mo.factors.size(); ++i) {
                DiffMono dm;
                for (size_t j = 0; j < mo.factors.size(); ++j) {
                    auto [idv, e] = mo.factors[j];
                    if (j == i) {
                        if (e > 1) dm.factors.emplace_back(idv, e - 1);
                    } else {
                        dm.factors.emplace_back(idv, e);
                    }
                }
                DiffMono bumped;
                bumped.factors.emplace_back(mo.factors[i].first + 1, 1);
                r.add_term(dm * bumped, k_int<K0>(static_cast<long>(mo.factors[i].second)) * c);
            }
        }
        return r;
    }

    /// Substitute every derivative of symbol `sym` by the same derivative of
    /// `replacement` (which must not contain `sym`).
    DiffPoly substituted(uint32_t sym, const DiffPoly& replacement) const {
        DiffPoly r;
        for (const auto& [mo, c] : m_) {
            DiffPoly term(c);
            for (auto& [idv, e] : mo.factors) {
                DiffPoly factor;
                if (DiffMono::sym_of(idv) == sym) {
                    DiffPoly rep = replacement;
                    for (uint32_t k = 0; k < DiffMono::der_of(idv); ++k) rep = rep.derivative();
                    factor = rep;
                } else {
                    factor = DiffPoly::symbol(DiffMono::sym_of(idv), DiffMono::der_of(idv));
                }
                for (uint32_t p = 0; p < e; ++p) term = term * factor;
            }
            r = r + term;
        }
        return r;
    }

    const K0& leading_coeff() const { return m_.begin()->second; }

    std::string str(const std::vector<std::string>& names) const {
        if (m_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (const auto& [mo, c] : m_) {
            os << (first ? "" : " + ") << "(" << FieldOps<K0>::str(c) << ")";
            for (auto& [idv, e] : mo.factors) {
                uint32_t s = DiffMono::sym_of(idv), d = DiffMono::der_of(idv);
                os << "*";
                if (d == 0)
                    os << names[s];
                else if (d == 1)
                    os << "d(" << names[s] << ")";
                else
                    os << "d" << d << "(" << names[s] << ")";
                if (e > 1) os << "^" << e;
            }
            first = false;
        }
        return os.str();
    }

   private:
    Map m_;

    void add_term(const DiffMono& mo, const K0& c) {
        if (FieldOps<K0>::is_zero(c)) return;
        auto it = m_.find(mo);
        if (it == m_.end()) {
            m_[mo] = c;
        } else {
            it->second = it->second + c;
            if (FieldOps<K0>::is_zero(it->second)) m_.erase(it);
        }
    }
};

/// Determinant by Laplace expansion along the first row; fine for the small
/// Wronskian-type matrices used here.
template <class K0>
DiffPoly<K0> determinant(const std::vector<std::vector<DiffPoly<K0>>>& m) {
    size_t n = m.size();
    if (n == 0) return DiffPoly<K0>(FieldOps<K0>::one());
    if (n == 1) return m[0][0];
    DiffPoly<K0> acc;
    for (size_t j = 0; j < n; ++j) {
        std::vector<std::vector<DiffPoly<K0>>> minor;
        for (size_t r = 1; r < n; ++r) {
            std::vector<DiffPoly<K0>> row;
            for (size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        DiffPoly<K0> t = m[0][j] * determinant(minor);
        acc = (j % 2 == 0) ? acc + t : acc - t;
    }
    return acc;
}

/// Fraction of differential polynomials.  Equality is decided by
/// cross-multiplication against the canonical polynomial normal form.
template <class K0>
class DiffFrac {
   public:
    DiffFrac() : den_(FieldOps<K0>::one()) {}
    explicit DiffFrac(K0 c) : num_(std::move(c)), den_(FieldOps<K0>::one()) {}
    DiffFrac(DiffPoly<K0> n) : num_(std::move(n)), den_(FieldOps<K0>::one()) {}  // NOLINT
    DiffFrac(DiffPoly<K0> n, DiffPoly<K0> d) : num_(std::move(n)), den_(std::move(d)) {
        if (den_.is_zero()) throw Error("zero denominator in differential fraction");
        normalize();
    }
    static DiffFrac symbol(uint32_t sym, uint32_t der = 0) { return DiffFrac(DiffPoly<K0>::symbol(sym, der)); }

    const DiffPoly<K0>& num() const { return num_; }
    const DiffPoly<K0>& den() const { return den_; }
    bool is_zero() const { return num_.is_zero(); }

    friend DiffFrac operator+(const DiffFrac& a, const DiffFrac& b) {
        if (a.den_ == b.den_) return DiffFrac(a.num_ + b.num_, a.den_);
        return DiffFrac(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend DiffFrac operator-(const DiffFrac& a, const DiffFrac& b) { return a + (-b); }
    friend DiffFrac operator-(const DiffFrac& a) {
        DiffFrac r = a;
        r.num_ = -r.num_;
        return r;
    }
    friend DiffFrac operator*(const DiffFrac& a, const DiffFrac& b) {
        return DiffFrac(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend DiffFrac operator/(const DiffFrac& a, const DiffFrac& b) {
        if (b.is_zero()) throw Error("division by zero differential fraction");
        return DiffFrac(a.num_ * b.den_, a.den_ * b.num_);
    }
    friend bool operator==(const DiffFrac& a, const DiffFrac& b) {
        return (a.num_ * b.den_ - b.num_ * a.den_).is_zero();
    }
    friend bool operator!=(const DiffFrac& a, const DiffFrac& b) { return !(a == b); }

    DiffFrac derivative() const {
        return DiffFrac(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
    }

   private:
    DiffPoly<K0> num_, den_;

    void normalize() {
        if (num_.is_zero()) {
            den_ = DiffPoly<K0>(FieldOps<K0>::one());
            return;
        }
        if (num_ == den_) {  // cheap common case from telescoping products
            num_ = DiffPoly<K0>(FieldOps<K0>::one());
            den_ = DiffPoly<K0>(FieldOps<K0>::one());
            return;
        }
        K0 lead = den_.leading_coeff();
        if (!FieldOps<K0>::is_zero(lead - FieldOps<K0>::one())) {
            K0 inv = FieldOps<K0>::one() / lead;
            num_ = inv * num_;
            den_ = inv * den_;
        }
    }
};

template <class K0>
DiffFrac<K0> derive(const DiffFrac<K0>& f) {
    return f.derivative();
}

template <class K0>
struct FieldOps<DiffFrac<K0>> {
    static constexpr bool exact = true;
    static DiffFrac<K0> zero() { return DiffFrac<K0>(); }
    static DiffFrac<K0> one() { return DiffFrac<K0>(FieldOps<K0>::one()); }
    static bool is_zero(const DiffFrac<K0>& f) { return f.is_zero(); }
    static std::string str(const DiffFrac<K0>&) { return "<difffrac>"; }
};

template <class K0, class F>
struct ScalarCast<DiffFrac<K0>, F> {
    static DiffFrac<K0> cast(const F& v) { return DiffFrac<K0>(scalar_cast<K0, F>(v)); }
};
template <class K0>
struct ScalarCast<DiffFrac<K0>, DiffFrac<K0>> {
    static DiffFrac<K0> cast(const DiffFrac<K0>& v) { return v; }
};

}  // namespace qtr

#endif
