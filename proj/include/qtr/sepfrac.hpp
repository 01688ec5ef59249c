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

#ifndef QTR_SEPFRAC_HPP
#define QTR_SEPFRAC_HPP

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "qtr/diffop.hpp"  // binom_l
#include "qtr/scalars.hpp"

namespace qtr {

/// Partial-fraction function of one variable over a fixed pole table:
///   cst + sum c_{a,j} / (z - p_a)^j.
/// Closed under ring operations (products of different-pole factors are
/// re-expanded exactly), which keeps the recursion's spectator arithmetic
/// free of polynomial gcds.  The coefficient type C is any field.
template <class C, class F>
class PF1 {
   public:
    using Table = std::vector<F>;

    PF1() = default;
    explicit PF1(C c) : cst_(std::move(c)) {}

    static PF1 zero() { return PF1(); }
    static PF1 one() { return PF1(FieldOps<C>::one()); }
    /// c / (z - p_a)^j
    static PF1 pole(std::shared_ptr<const Table> tab, int a, int j, C c) {
        PF1 r;
        r.tab_ = std::move(tab);
        if (!FieldOps<C>::is_zero(c)) r.poles_[{a, j}] = std::move(c);
        return r;
    }

    const C& cst() const { return cst_; }
    const std::map<std::pair<int, int>, C>& poles() const { return poles_; }
    const std::shared_ptr<const Table>& table() const { return tab_; }

    bool is_zero() const {
        if (!FieldOps<C>::is_zero(cst_)) return false;
        return poles_.empty();
    }

    friend PF1 operator+(const PF1& x, const PF1& y) {
        PF1 r = x;
        if (!r.tab_) r.tab_ = y.tab_;
        r.cst_ = r.cst_ + y.cst_;
        for (const auto& [k, v] : y.poles_) r.add_pole(k.first, k.second, v);
        return r;
    }
    friend PF1 operator-(const PF1& x, const PF1& y) { return x + (-y); }
    friend PF1 operator-(const PF1& x) {
        PF1 r = x;
        r.cst_ = -r.cst_;
        for (auto& [k, v] : r.poles_) v = -v;
        return r;
    }
    friend PF1 operator*(const C& s, const PF1& x) {
        if (FieldOps<C>::is_zero(s)) return PF1();
        PF1 r = x;
        r.cst_ = s * r.cst_;
        for (auto& [k, v] : r.poles_) v = s * v;
        r.prune();
        return r;
    }
    friend PF1 operator*(const PF1& x, const PF1& y) {
        PF1 r;
        r.tab_ = x.tab_ ? x.tab_ : y.tab_;
        r.cst_ = x.cst_ * y.cst_;
        for (const auto& [k, v] : y.poles_) {
            C c = x.cst_ * v;
            if (!FieldOps<C>::is_zero(c)) r.add_pole(k.first, k.second, c);
        }
        for (const auto& [k, v] : x.poles_) {
            C c = y.cst_ * v;
            if (!FieldOps<C>::is_zero(c)) r.add_pole(k.first, k.second, c);
        }
        for (const auto& [ka, va] : x.poles_)
            for (const auto& [kb, vb] : y.poles_) r.mul_poles(ka, va, kb, vb);
        return r;
    }
    friend bool operator==(const PF1& x, const PF1& y) { return (x - y).is_zero(); }
    friend bool operator!=(const PF1& x, const PF1& y) { return !(x == y); }

    /// Evaluate at z = value; coefficients must embed the value's field.
    template <class Ev>
    C eval(const F& z, Ev&& embed) const {
        C acc = cst_;
        for (const auto& [k, v] : poles_) {
            F den = FieldOps<F>::one();
            F base = z - (*tab_)[static_cast<size_t>(k.first)];
            for (int u = 0; u < k.second; ++u) den = den * base;
            acc = acc + v * embed(FieldOps<F>::one() / den);
        }
        return acc;
    }

    /// Coefficients of the Taylor/Laurent expansion after substituting
    /// z -> s + t, as (lowest exponent, coefficient list up to order N).
    /// The expansion is exact: poles at s (table entry s_index) give the
    /// principal part.
    std::pair<int, std::vector<C>> substituted(const F& s, int N, int s_index) const {
        int lo = 0;
        for (const auto& [k, v] : poles_)
            if (k.first == s_index) lo = std::min(lo, -k.second);
        std::vector<C> out(static_cast<size_t>(N - lo) + 1, FieldOps<C>::zero());
        out[static_cast<size_t>(-lo)] = out[static_cast<size_t>(-lo)] + cst_;
        for (const auto& [k, v] : poles_) {
            const F p = (*tab_)[static_cast<size_t>(k.first)];
            if (k.first == s_index) {
                out[static_cast<size_t>(-k.second - lo)] = out[static_cast<size_t>(-k.second - lo)] + v;
            } else {
                // 1/(s + t - p)^j = sum_m binom(-j,m) (s-p)^{-j-m} t^m
                F base = s - p;
                F pw = FieldOps<F>::one();
                for (int u = 0; u < k.second; ++u) pw = pw * base;
                for (int m = 0; m <= N; ++m) {
                    F coef = k_int<F>(detail::binom_l(k.second + m - 1, m)) / pw;
                    if (m % 2 != 0) coef = -coef;
                    out[static_cast<size_t>(m - lo)] =
                        out[static_cast<size_t>(m - lo)] + v * scalar_embed(coef);
                    pw = pw * base;
                }
            }
        }
        return {lo, std::move(out)};
    }

    static C scalar_embed(const F& f) { return scalar_cast<C, F>(f); }

   private:
    C cst_{};
    std::map<std::pair<int, int>, C> poles_;
    std::shared_ptr<const Table> tab_;

    void add_pole(int a, int j, const C& c) {
        auto it = poles_.find({a, j});
        if (it == poles_.end()) {
            poles_[{a, j}] = c;
        } else {
            it->second = it->second + c;
            if (FieldOps<C>::is_zero(it->second)) poles_.erase(it);
        }
    }
    void prune() {
        for (auto it = poles_.begin(); it != poles_.end();)
            it = FieldOps<C>::is_zero(it->second) ? poles_.erase(it) : std::next(it);
    }

    /// exact product of two pole factors, re-expanded over the table
    void mul_poles(const std::pair<int, int>& ka, const C& va, const std::pair<int, int>& kb, const C& vb) {
        C c = va * vb;
        if (FieldOps<C>::is_zero(c)) return;
        if (ka.first == kb.first) {
            add_pole(ka.first, ka.second + kb.second, c);
            return;
        }
        const F pa = (*tab_)[static_cast<size_t>(ka.first)];
        const F pb = (*tab_)[static_cast<size_t>(kb.first)];
        const int j = ka.second, k = kb.second;
        // 1/((z-a)^j (z-b)^k) = sum_i A_i/(z-a)^i + sum_i B_i/(z-b)^i,
        // A_{j-m} = (-1)^m binom(k+m-1, m) (a-b)^{-k-m}
        F dab = pa - pb;
        F pw = FieldOps<F>::one();
        for (int u = 0; u < k; ++u) pw = pw * dab;
        for (int m = 0; m < j; ++m) {
            F coef = k_int<F>(detail::binom_l(k + m - 1, m)) / pw;
            if (m % 2 != 0) coef = -coef;
            add_pole(ka.first, j - m, c * scalar_embed(coef));
            pw = pw * dab;
        }
        F dba = pb - pa;
        pw = FieldOps<F>::one();
        for (int u = 0; u < j; ++u) pw = pw * dba;
        for (int m = 0; m < k; ++m) {
            F coef = k_int<F>(detail::binom_l(j + m - 1, m)) / pw;
            if (m % 2 != 0) coef = -coef;
            add_pole(kb.first, k - m, c * scalar_embed(coef));
            pw = pw * dba;
        }
    }
};

template <class C, class F>
struct FieldOps<PF1<C, F>> {
    static constexpr bool exact = FieldOps<C>::exact;
    static PF1<C, F> zero() { return PF1<C, F>::zero(); }
    static PF1<C, F> one() { return PF1<C, F>::one(); }
    static bool is_zero(const PF1<C, F>& x) { return x.is_zero(); }
    static std::string str(const PF1<C, F>&) { return "<pf1>"; }
};

template <class C, class F, class S>
struct ScalarCast<PF1<C, F>, S> {
    static PF1<C, F> cast(const S& v) { return PF1<C, F>(scalar_cast<C, S>(v)); }
};
template <class C, class F>
struct ScalarCast<PF1<C, F>, PF1<C, F>> {
    static PF1<C, F> cast(const PF1<C, F>& v) { return v; }
};

}  // namespace qtr

#endif
