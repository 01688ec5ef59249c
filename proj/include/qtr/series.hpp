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

#ifndef QTR_SERIES_HPP
#define QTR_SERIES_HPP

#include <string>
#include <utility>
#include <vector>

#include "qtr/errors.hpp"
#include "qtr/poly.hpp"

namespace qtr {

/// Truncated local Laurent series in t = x - s.  Coefficients are stored for
/// exponents m0..N and the arithmetic never claims coefficients beyond the
/// certified order N.
template <class K>
class LocalSeries {
   public:
    LocalSeries() : m0_(1), N_(0) {}  // zero series, nothing certified

    LocalSeries(K s, int m0, std::vector<K> coeffs, int N)
        : s_(std::move(s)), m0_(m0), N_(N), c_(std::move(coeffs)) {
        normalize();
    }

    static LocalSeries zero_to(const K& s, int N) { return LocalSeries(s, N + 1, {}, N); }
    static LocalSeries constant(const K& s, const K& v, int N) {
        return LocalSeries(s, 0, std::vector<K>{v}, N);
    }
    /// t^k with exact tail (certified to any requested order)
    static LocalSeries monomial(const K& s, int k, int N) {
        return LocalSeries(s, k, std::vector<K>{FieldOps<K>::one()}, N);
    }

    const K& point() const { return s_; }
    int order_certified() const { return N_; }
    bool is_zero() const { return c_.empty(); }
    /// Lowest nonzero exponent; only meaningful if !is_zero().
    int valuation() const { return m0_; }

    K coeff(int j) const {
        if (j > N_) throw TruncationInsufficient("coefficient t^" + std::to_string(j));
        if (j < m0_ || c_.empty()) return FieldOps<K>::zero();
        int i = j - m0_;
        return i < static_cast<int>(c_.size()) ? c_[i] : FieldOps<K>::zero();
    }

    K residue() const { return coeff(-1); }

    LocalSeries truncated(int N) const {
        if (N >= N_) return *this;
        std::vector<K> c;
        for (int j = m0_; j <= N; ++j)
            if (j - m0_ < static_cast<int>(c_.size())) c.push_back(c_[j - m0_]);
        return LocalSeries(s_, m0_, std::move(c), N);
    }

    /// multiply by t^k
    LocalSeries shifted(int k) const {
        LocalSeries r = *this;
        r.m0_ += k;
        r.N_ += k;
        return r;
    }

    friend LocalSeries operator+(const LocalSeries& a, const LocalSeries& b) {
        int N = std::min(a.N_, b.N_);
        int lo = std::min(a.m0_, b.m0_);
        std::vector<K> c;
        for (int j = lo; j <= N; ++j) c.push_back(a.soft(j) + b.soft(j));
        return LocalSeries(a.s_, lo, std::move(c), N);
    }
    friend LocalSeries operator-(const LocalSeries& a, const LocalSeries& b) { return a + (-b); }
    friend LocalSeries operator-(const LocalSeries& a) {
        LocalSeries r = a;
        for (auto& v : r.c_) v = -v;
        return r;
    }
    friend LocalSeries operator*(const K& s, const LocalSeries& a) {
        if (FieldOps<K>::is_zero(s)) return zero_to(a.s_, a.N_);
        LocalSeries r = a;
        for (auto& v : r.c_) v = s * v;
        r.normalize();
        return r;
    }
    friend LocalSeries operator*(const LocalSeries& a, const LocalSeries& b) {
        // certified orders: a known mod t^{Na+1}, so product certified to
        // min(Na + val_b, Nb + val_a)
        int va = a.c_.empty() ? a.N_ + 1 : a.m0_;
        int vb = b.c_.empty() ? b.N_ + 1 : b.m0_;
        int N = std::min(a.N_ + vb, b.N_ + va);
        if (a.c_.empty() || b.c_.empty()) return zero_to(a.s_, N);
        std::vector<K> c(static_cast<size_t>(std::max(N - (va + vb) + 1, 0)), FieldOps<K>::zero());
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) {
                int e = a.m0_ + static_cast<int>(i) + b.m0_ + static_cast<int>(j);
                if (e <= N) c[e - (va + vb)] = c[e - (va + vb)] + a.c_[i] * b.c_[j];
            }
        return LocalSeries(a.s_, va + vb, std::move(c), N);
    }

    /// Multiplicative inverse; the series must be nonzero.
    LocalSeries inverse() const {
        if (c_.empty()) throw Error("inverse of (locally) zero series");
        int rel = N_ - m0_;          // relative order of the unit part
        int N = rel - m0_;           // certified order of the inverse
        std::vector<K> u(static_cast<size_t>(rel) + 1, FieldOps<K>::zero());
        std::vector<K> inv(u.size(), FieldOps<K>::zero());
        for (size_t i = 0; i < u.size() && i < c_.size(); ++i) u[i] = c_[i];
        K lead = FieldOps<K>::one() / u[0];
        inv[0] = lead;
        for (size_t n = 1; n < u.size(); ++n) {
            K acc = FieldOps<K>::zero();
            for (size_t k = 1; k <= n; ++k) acc = acc + u[k] * inv[n - k];
            inv[n] = -lead * acc;
        }
        return LocalSeries(s_, -m0_, std::move(inv), N);
    }

    LocalSeries derivative() const {
        std::vector<K> c;
        for (int e = m0_ - 1; e <= N_ - 1; ++e) c.push_back(k_int<K>(e + 1) * soft(e + 1));
        return LocalSeries(s_, m0_ - 1, std::move(c), N_ - 1);
    }

    /// Termwise antiderivative; requires no t^{-1} coefficient.
    LocalSeries integrated() const {
        if (!FieldOps<K>::is_zero(soft(-1))) throw Error("series has nonzero residue, no single-valued primitive");
        std::vector<K> c;
        for (int e = m0_ + 1; e <= N_ + 1; ++e)
            c.push_back(e == 0 ? FieldOps<K>::zero() : soft(e - 1) / k_int<K>(e));
        return LocalSeries(s_, m0_ + 1, std::move(c), N_ + 1);
    }

    /// exp of a series with positive valuation (value 0 at the point).
    LocalSeries exponential() const {
        if (!c_.empty() && m0_ <= 0) throw Error("exp needs positive valuation");
        int N = N_;
        if (N < 0) throw TruncationInsufficient("exp of series with no certified terms");
        std::vector<K> a(static_cast<size_t>(N) + 1, FieldOps<K>::zero());
        for (int j = std::max(m0_, 1); j <= N; ++j) a[j] = soft(j);
        std::vector<K> e(a.size(), FieldOps<K>::zero());
        e[0] = FieldOps<K>::one();
        for (int n = 1; n <= N; ++n) {
            K acc = FieldOps<K>::zero();
            for (int k = 1; k <= n; ++k) acc = acc + k_int<K>(k) * a[k] * e[n - k];
            e[n] = acc / k_int<K>(n);
        }
        return LocalSeries(s_, 0, std::move(e), N);
    }

   private:
    K s_{};
    int m0_;
    int N_;
    std::vector<K> c_;

    K soft(int j) const {
        if (j < m0_ || c_.empty()) return FieldOps<K>::zero();
        int i = j - m0_;
        return i < static_cast<int>(c_.size()) ? c_[i] : FieldOps<K>::zero();
    }

    void normalize() {
        size_t keep = c_.size();
        size_t drop = 0;
        while (drop < keep && FieldOps<K>::is_zero(c_[drop])) ++drop;
        if (drop) {
            c_.erase(c_.begin(), c_.begin() + static_cast<long>(drop));
            m0_ += static_cast<int>(drop);
        }
        if (m0_ + static_cast<int>(c_.size()) - 1 > N_ && !c_.empty())
            c_.resize(static_cast<size_t>(std::max(N_ - m0_ + 1, 0)));
        while (!c_.empty() && FieldOps<K>::is_zero(c_.back())) c_.pop_back();
        if (c_.empty()) m0_ = N_ + 1;
    }
};

}  // namespace qtr

#endif
