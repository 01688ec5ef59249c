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

#ifndef QTR_DIFFOP_HPP
#define QTR_DIFFOP_HPP

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "qtr/poly.hpp"

namespace qtr {

namespace detail {
inline long binom_l(int n, int k) {
    if (k < 0 || k > n) return 0;
    long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}
}  // namespace detail

/// Differential operator sum_k c_k(x) yh^k with yh = Q d/dx, kept in
/// right-normal form (all yh to the right).  Normal form is canonical:
/// operators are equal iff their coefficient sequences are equal.
template <class K>
class DiffOp {
   public:
    explicit DiffOp(K Q) : Q_(std::move(Q)) {}
    DiffOp(K Q, std::vector<K> coeffs_ascending) : Q_(std::move(Q)), c_(std::move(coeffs_ascending)) { trim(); }

    static DiffOp zero(const K& Q) { return DiffOp(Q); }
    static DiffOp identity(const K& Q) { return DiffOp(Q, {FieldOps<K>::one()}); }
    static DiffOp yhat(const K& Q) { return DiffOp(Q, {FieldOps<K>::zero(), FieldOps<K>::one()}); }
    /// yh - f
    static DiffOp yhat_minus(const K& Q, const K& f) { return DiffOp(Q, {-f, FieldOps<K>::one()}); }
    static DiffOp function(const K& Q, const K& f) { return DiffOp(Q, {f}); }

    const K& background_charge() const { return Q_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    K coeff(int k) const {
        return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : FieldOps<K>::zero();
    }
    const std::vector<K>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    friend DiffOp operator+(const DiffOp& a, const DiffOp& b) {
        std::vector<K> r(std::max(a.c_.size(), b.c_.size()), FieldOps<K>::zero());
        for (size_t i = 0; i < a.c_.size(); ++i) r[i] = r[i] + a.c_[i];
        for (size_t i = 0; i < b.c_.size(); ++i) r[i] = r[i] + b.c_[i];
        return DiffOp(a.Q_, std::move(r));
    }
    friend DiffOp operator-(const DiffOp& a, const DiffOp& b) { return a + (-b); }
    friend DiffOp operator-(const DiffOp& a) {
        DiffOp r = a;
        for (auto& v : r.c_) v = -v;
        return r;
    }

    /// Composition, normal-ordered by commuting all yh to the right.
    friend DiffOp operator*(const DiffOp& a, const DiffOp& b) {
        std::vector<K> r;
        auto bump = [&](size_t i, const K& v) {
            if (r.size() <= i) r.resize(i + 1, FieldOps<K>::zero());
            r[i] = r[i] + v;
        };
        for (int k = 0; k <= a.degree(); ++k) {
            if (FieldOps<K>::is_zero(a.c_[k])) continue;
            for (int l = 0; l <= b.degree(); ++l) {
                if (FieldOps<K>::is_zero(b.c_[l])) continue;
                // yh^k f = sum_q binom(k,q) Q^q (d^q f) yh^{k-q}
                K dqf = b.c_[l];
                K Qq = FieldOps<K>::one();
                for (int q = 0; q <= k; ++q) {
                    if (q > 0) {
                        dqf = derive(dqf);
                        Qq = Qq * a.Q_;
                    }
                    bump(static_cast<size_t>(k - q + l),
                         a.c_[k] * k_int<K>(detail::binom_l(k, q)) * Qq * dqf);
                }
            }
        }
        return DiffOp(a.Q_, std::move(r));
    }

    friend bool operator==(const DiffOp& a, const DiffOp& b) { return (a - b).is_zero(); }
    friend bool operator!=(const DiffOp& a, const DiffOp& b) { return !(a == b); }

   private:
    K Q_;
    std::vector<K> c_;

    void trim() {
        while (!c_.empty() && FieldOps<K>::is_zero(c_.back())) c_.pop_back();
    }
};

/// Normal form of (Q d/dx)^p composed with multiplication by f.
template <class K>
DiffOp<K> leibniz_push(int p, const K& f, const K& Q) {
    std::vector<K> c(static_cast<size_t>(p) + 1, FieldOps<K>::zero());
    K dqf = f;
    K Qq = FieldOps<K>::one();
    for (int q = 0; q <= p; ++q) {
        if (q > 0) {
            dqf = derive(dqf);
            Qq = Qq * Q;
        }
        c[static_cast<size_t>(p - q)] = k_int<K>(detail::binom_l(p, q)) * Qq * dqf;
    }
    return DiffOp<K>(Q, std::move(c));
}

/// Right D-module action: psi . sum_k c_k yh^k = sum_k (-Q d)^k (c_k psi).
/// Fn must support multiplication by K from the left and derive().
template <class Fn, class K>
Fn right_act(const Fn& psi, const DiffOp<K>& P) {
    Fn acc = FieldOps<K>::is_zero(P.coeff(0)) ? Fn() : P.coeff(0) * psi;
    for (int k = 1; k <= P.degree(); ++k) {
        if (FieldOps<K>::is_zero(P.coeff(k))) continue;
        Fn g = P.coeff(k) * psi;
        for (int i = 0; i < k; ++i) g = (-P.background_charge()) * derive(g);
        acc = acc + g;
    }
    return acc;
}

/// Classical symbol: yh^k -> y^k with a caller-supplied coefficient limit
/// (identity for Q-independent coefficient fields, Q -> 0 evaluation when Q
/// is adjoined as a variable).  Throws DivergentClassicalLimit via the hook.
template <class K>
Poly<K> symbol(const DiffOp<K>& P, const std::function<K(const K&)>& q_limit = nullptr) {
    std::vector<K> c;
    c.reserve(static_cast<size_t>(P.degree() + 1));
    for (int k = 0; k <= P.degree(); ++k) c.push_back(q_limit ? q_limit(P.coeff(k)) : P.coeff(k));
    return Poly<K>(std::move(c));
}

/// (yh - Y_1)(yh - Y_2)...(yh - Y_d), multiplied left to right.
template <class K>
DiffOp<K> factor_from_Y(std::span<const K> Y, const K& Q) {
    DiffOp<K> acc = DiffOp<K>::identity(Q);
    for (const auto& y : Y) acc = acc * DiffOp<K>::yhat_minus(Q, y);
    return acc;
}

template <class K>
DiffOp<K> factor_from_Y(const std::vector<K>& Y, const K& Q) {
    return factor_from_Y(std::span<const K>(Y.data(), Y.size()), Q);
}

/// Auxiliary operator U = (yh - Y_2)...(yh - Y_d) together with the exact
/// check (yh - Y_1) U == (yh - Y_1)...(yh - Y_d).
template <class K>
std::pair<DiffOp<K>, bool> master_u(const std::vector<K>& Y, const K& Q) {
    if (Y.size() < 2) throw Error("master operator needs degree >= 2");
    std::vector<K> tail(Y.begin() + 1, Y.end());
    DiffOp<K> U = factor_from_Y(tail, Q);
    bool ok = DiffOp<K>::yhat_minus(Q, Y[0]) * U == factor_from_Y(Y, Q);
    return {U, ok};
}

}  // namespace qtr

#endif
