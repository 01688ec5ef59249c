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

#ifndef QTR_MIURA_HPP
#define QTR_MIURA_HPP

#include <optional>
#include <string>
#include <vector>

#include "qtr/diffop.hpp"
#include "qtr/diffsym.hpp"
#include "qtr/ratfunc.hpp"

namespace qtr {

/// Cartan current components J_1..J_d.  sl-type means the trace vanishes
/// identically; gl-type inputs are accepted but flagged.
template <class K>
struct CurrentVector {
    std::vector<K> J;
    bool sl_type() const {
        K t = FieldOps<K>::zero();
        for (const auto& j : J) t = t + j;
        return FieldOps<K>::is_zero(t);
    }
};

/// E = (yh - J_1)...(yh - J_d): the generating operator of the W-algebra
/// generators, sum_k (-1)^k W^{(k)} yh^{d-k}.
template <class K>
DiffOp<K> build_E(const CurrentVector<K>& cur, const K& Q) {
    return factor_from_Y(cur.J, Q);
}

/// W^{(k)} read off from the expansion of E.
template <class K>
K w_from_E(const DiffOp<K>& E, int d, int k) {
    K c = E.coeff(d - k);
    return (k % 2 == 0) ? c : -c;
}

/// Closed-form k-th generator: nested sum over index chains
/// 1 <= i_1 < ... < i_p <= d and derivative splittings q_l with
/// p + sum q_l = k, 0 <= q_l <= i_l - i_{l-1} - 1 (i_0 = 0), each term
/// (-1)^{k-p} Q^{k-p} prod binom(i_l - i_{l-1} - 1, q_l)
/// d^{q_1}( J_{i_1} d^{q_2}( J_{i_2} ... d^{q_p}( J_{i_p} ) ... ) ).
template <class K>
K w_closed_form(int k, const CurrentVector<K>& cur, const K& Q) {
    const int d = static_cast<int>(cur.J.size());
    K total = FieldOps<K>::zero();

    std::vector<int> chain;
    std::vector<int> qs;

    // enumerate q-tuples for a fixed chain
    auto add_terms_for_chain = [&](auto&& self_q, int l, int remaining, const K& weight) -> void {
        const int p = static_cast<int>(chain.size());
        if (l == p) {
            if (remaining != 0) return;
            // innermost-out nesting
            K term = cur.J[static_cast<size_t>(chain[p - 1]) - 1];
            for (int m = p - 2; m >= 0; --m) {
                K t = term;
                for (int q = 0; q < qs[m + 1]; ++q) t = derive(t);
                term = cur.J[static_cast<size_t>(chain[m]) - 1] * t;
            }
            for (int q = 0; q < qs[0]; ++q) term = derive(term);
            total = total + weight * term;
            return;
        }
        int prev = (l == 0) ? 0 : chain[static_cast<size_t>(l) - 1];
        int gap = chain[static_cast<size_t>(l)] - prev - 1;
        for (int q = 0; q <= std::min(gap, remaining); ++q) {
            qs[static_cast<size_t>(l)] = q;
            self_q(self_q, l + 1, remaining - q, weight * k_int<K>(detail::binom_l(gap, q)));
        }
    };

    auto enumerate_chains = [&](auto&& self, int next_min, int p_left) -> void {
        if (p_left == 0) {
            const int p = static_cast<int>(chain.size());
            K prefactor = FieldOps<K>::one();
            for (int i = 0; i < k - p; ++i) prefactor = prefactor * (-Q);
            qs.assign(static_cast<size_t>(p), 0);
            add_terms_for_chain(add_terms_for_chain, 0, k - p, prefactor);
            return;
        }
        for (int i = next_min; i <= d - p_left + 1; ++i) {
            chain.push_back(i);
            self(self, i + 1, p_left - 1);
            chain.pop_back();
        }
    };

    for (int p = 1; p <= std::min(k, d); ++p) enumerate_chains(enumerate_chains, 1, p);
    return total;
}

/// --- Q -> 0 classical limit for coefficients rational in an adjoined Q ---

/// Order of vanishing at Q = 0 (poles negative); only for nonzero input.
inline int q_valuation(const RatFunc<Rational>& f) {
    auto trailing = [](const Poly<Rational>& p) {
        int v = 0;
        while (FieldOps<Rational>::is_zero(p.coeff(v))) ++v;
        return v;
    };
    return trailing(f.num()) - trailing(f.den());
}

/// Evaluate a Q-rational coefficient at Q = 0.
inline RatFunc<Rational> eval_q0(const RatFunc<Rational>& f) {
    if (f.is_zero()) return f;
    if (q_valuation(f) < 0) throw DivergentClassicalLimit("coefficient has a pole at Q=0");
    return RatFunc<Rational>(f.num().eval(Rational(0)) / f.den().eval(Rational(0)));
}

/// Q -> 0 limit of a differential fraction over the Q-variable field,
/// cancelling common powers of Q between numerator and denominator first.
inline DiffFrac<RatFunc<Rational>> q0_limit(const DiffFrac<RatFunc<Rational>>& f) {
    using K0 = RatFunc<Rational>;
    if (f.is_zero()) return f;
    auto ord = [](const DiffPoly<K0>& p) {
        int m = 1 << 20;
        for (const auto& [mo, c] : p.terms()) {
            (void)mo;
            m = std::min(m, q_valuation(c));
        }
        return m;
    };
    int a = ord(f.num()), b = ord(f.den());
    if (a < b) throw DivergentClassicalLimit("pole of order " + std::to_string(b - a) + " at Q=0");
    K0 qpow_a{Poly<Rational>::one()}, qpow_b{Poly<Rational>::one()};
    K0 qinv(Poly<Rational>::one(), Poly<Rational>::x());
    for (int i = 0; i < a; ++i) qpow_a = qpow_a * qinv;
    for (int i = 0; i < b; ++i) qpow_b = qpow_b * qinv;
    auto eval_poly = [&](const DiffPoly<K0>& p, const K0& scale) {
        DiffPoly<K0> r;
        for (const auto& [mo, c] : p.terms()) {
            K0 v = eval_q0(scale * c);
            if (FieldOps<K0>::is_zero(v)) continue;
            DiffPoly<K0> mono(FieldOps<K0>::one());
            for (auto& [idv, e] : mo.factors)
                for (uint32_t q = 0; q < e; ++q)
                    mono = mono * DiffPoly<K0>::symbol(DiffMono::sym_of(idv), DiffMono::der_of(idv));
            r = r + v * mono;
        }
        return r;
    };
    return DiffFrac<RatFunc<Rational>>(eval_poly(f.num(), qpow_a), eval_poly(f.den(), qpow_b));
}

struct MiuraReport {
    bool ok = true;
    std::string first_mismatch;
};

/// Checks w_closed_form against the direct noncommutative expansion over
/// formal current symbols, at each supplied rational value of Q.
inline MiuraReport cross_validate(int d, const std::vector<Rational>& q_values) {
    using F = DiffFrac<Rational>;
    MiuraReport rep;
    CurrentVector<F> cur;
    for (int j = 0; j < d; ++j) cur.J.push_back(F::symbol(static_cast<uint32_t>(j)));
    for (const auto& qv : q_values) {
        F Q{DiffPoly<Rational>(qv)};
        DiffOp<F> E = build_E(cur, Q);
        for (int k = 1; k <= d; ++k) {
            if (w_closed_form(k, cur, Q) != w_from_E(E, d, k)) {
                rep.ok = false;
                rep.first_mismatch = "k=" + std::to_string(k) + " at Q=" + qv.str();
                return rep;
            }
        }
    }
    return rep;
}

}  // namespace qtr

#endif
