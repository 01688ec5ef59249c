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

#ifndef QTR_CURVE_HPP
#define QTR_CURVE_HPP

#include <string>
#include <vector>

#include "qtr/diffop.hpp"
#include "qtr/quasirational.hpp"

namespace qtr {

template <class K>
struct BetheRoot {
    K s;
    int mu;  // Y_mu and Y_{mu+1} meet at s (1-based sheet index)
};

/// The recursion's input geometry: sheet functions Y_1..Y_d with their Bethe
/// roots and punctures.  Immutable after construction.
template <class K>
struct QuantumCurve {
    int d = 0;
    K Q{};
    std::vector<RatFunc<K>> Y;
    std::vector<BetheRoot<K>> bethe;
    std::vector<K> punctures;

    std::vector<K> roots_in_sheet(int mu) const {
        std::vector<K> r;
        for (const auto& b : bethe)
            if (b.mu == mu) r.push_back(b.s);
        return r;
    }
    std::vector<K> all_points() const {
        std::vector<K> r;
        for (const auto& b : bethe) r.push_back(b.s);
        for (const auto& p : punctures) r.push_back(p);
        return r;
    }
    bool trace_free() const {
        RatFunc<K> t;
        for (const auto& y : Y) t += y;
        return t.is_zero();
    }
};

namespace detail {
template <class K>
bool tol_zero(const K& v) {
    if constexpr (FieldOps<K>::exact) {
        return FieldOps<K>::is_zero(v);
    } else {
        return magnitude(v) < decltype(magnitude(v))("1e-25");
    }
}
template <class K>
bool tol_eq(const K& a, const K& b) {
    return tol_zero<K>(a - b);
}
}  // namespace detail

struct ValidationReport {
    bool pass = true;
    bool trace_free = false;
    std::vector<std::string> failures;

    void fail(const std::string& what) {
        pass = false;
        failures.push_back(what);
    }
};

/// Checks the curve invariants: residues -Q/+Q on the two meeting sheets at
/// each Bethe root, regularity of the other sheets there, distinctness, and
/// that every remaining Y pole is a declared simple puncture.
template <class K>
ValidationReport validate(const QuantumCurve<K>& c) {
    ValidationReport rep;
    rep.trace_free = c.trace_free();
    if (static_cast<int>(c.Y.size()) != c.d) {
        rep.fail("expected " + std::to_string(c.d) + " sheet functions");
        return rep;
    }
    for (size_t i = 0; i < c.bethe.size(); ++i) {
        for (size_t j = i + 1; j < c.bethe.size(); ++j)
            if (detail::tol_eq(c.bethe[i].s, c.bethe[j].s)) rep.fail("duplicate Bethe roots");
        for (const auto& p : c.punctures)
            if (detail::tol_eq(c.bethe[i].s, p)) rep.fail("Bethe root coincides with a puncture");
        if (c.bethe[i].mu < 1 || c.bethe[i].mu > c.d - 1)
            rep.fail("sheet index out of range at root #" + std::to_string(i));
    }
    if (!rep.pass) return rep;

    for (const auto& b : c.bethe) {
        for (int nu = 1; nu <= c.d; ++nu) {
            auto se = c.Y[static_cast<size_t>(nu) - 1].local_expand(b.s, 0);
            bool has_pole = !se.is_zero() && se.valuation() < 0;
            if (nu == b.mu || nu == b.mu + 1) {
                if (!has_pole || se.valuation() < -1) {
                    rep.fail("Y_" + std::to_string(nu) + " lacks a simple pole at a mu=" + std::to_string(b.mu) +
                             " root");
                    continue;
                }
                K want = (nu == b.mu) ? -c.Q : c.Q;
                if (!detail::tol_eq(se.residue(), want))
                    rep.fail("Y_" + std::to_string(nu) + " residue at root is not " +
                             std::string(nu == b.mu ? "-Q" : "+Q"));
            } else if (has_pole) {
                rep.fail("Y_" + std::to_string(nu) + " has an unexpected pole at a mu=" + std::to_string(b.mu) +
                         " root");
            }
        }
    }

    // remaining poles must be declared simple punctures
    for (int nu = 1; nu <= c.d; ++nu) {
        const auto& y = c.Y[static_cast<size_t>(nu) - 1];
        for (const auto& p : c.punctures) {
            auto se = y.local_expand(p, 0);
            if (!se.is_zero() && se.valuation() < -1)
                rep.fail("Y_" + std::to_string(nu) + " has a non-simple pole at a puncture");
        }
        if constexpr (FieldOps<K>::exact) {
            RootList roots = rational_roots(y.den(), c.all_points());
            for (const auto& [r, m] : roots.roots) {
                (void)m;
                bool known = false;
                for (const auto& q : c.all_points()) known = known || q == r;
                if (!known)
                    rep.fail("Y_" + std::to_string(nu) + " has an undeclared pole at " + FieldOps<K>::str(r));
            }
            if (roots.remainder.degree() > 0)
                rep.fail("Y_" + std::to_string(nu) + " has poles outside the coefficient field");
        }
    }
    return rep;
}

/// d=2 solution data psi_1 = exp(int p') q with simple-rooted q.
template <class K>
struct QuasiPolySolution {
    RatFunc<K> p_prime;
    Poly<K> q;
};

/// Builds the d=2 curve from solution data: Y_1 = -Q(p' + q'/q),
/// Y_2 = +Q(p' + q'/q), Bethe roots at the zeros of q with mu = 1,
/// trace-free normalization D_2 = 1.
template <class K>
QuantumCurve<K> from_quasi_poly(const QuasiPolySolution<K>& sol, const K& Q,
                                const std::vector<K>& roots_hint = {}) {
    QuantumCurve<K> c;
    c.d = 2;
    c.Q = Q;
    RatFunc<K> logd = sol.p_prime + RatFunc<K>(sol.q.derivative(), sol.q);
    c.Y.push_back(RatFunc<K>(Poly<K>(-Q)) * logd);
    c.Y.push_back(RatFunc<K>(Poly<K>(Q)) * logd);

    std::vector<K> roots;
    if constexpr (FieldOps<K>::exact) {
        if (gcd(sol.q, sol.q.derivative()).degree() > 0) throw NonSimpleRoot("q has a repeated root");
        RootList rl = rational_roots(sol.q, roots_hint);
        if (rl.remainder.degree() > 0)
            throw PoleFieldMismatch("q has irrational roots; use the numeric backend");
        for (const auto& [r, m] : rl.roots) {
            if (m > 1) throw NonSimpleRoot("q has a repeated root");
            roots.push_back(r);
        }
    } else {
        roots = roots_hint;
        for (const auto& r : roots) {
            if (!detail::tol_zero(sol.q.eval(r))) throw Error("claimed root does not annihilate q");
            if (detail::tol_zero(sol.q.derivative().eval(r))) throw NonSimpleRoot("q' vanishes at a root");
        }
    }
    for (const auto& r : roots) c.bethe.push_back({r, 1});

    if constexpr (FieldOps<K>::exact) {
        RootList pp = rational_roots(sol.p_prime.den());
        for (const auto& [r, m] : pp.roots) {
            (void)m;
            bool is_root = false;
            for (const auto& s : roots) is_root = is_root || s == r;
            if (is_root) throw Error("p' has a pole at a Bethe root");
            c.punctures.push_back(r);
        }
        if (pp.remainder.degree() > 0) throw PoleFieldMismatch("p' has poles outside the field");
    }
    return c;
}

/// psi_1 of the builder's solution data, as a quasi-rational.
template <class K>
QuasiRational<K> builder_psi1(const QuasiPolySolution<K>& sol) {
    return QuasiRational<K>(RatFunc<K>(sol.q), sol.p_prime);
}

/// R_mu = exp(int (Y_mu - Y_{mu+1})/Q): local behavior (x-s)^{-2} at the
/// mu-roots, integer powers at neighboring-sheet roots.  Non-integer
/// puncture residues are recorded on the result, not fatal.
template <class K>
QuasiRational<K> ratio_R(const QuantumCurve<K>& c, int mu) {
    if (mu < 1 || mu > c.d - 1) throw Error("ratio index out of range");
    RatFunc<K> r = (c.Y[static_cast<size_t>(mu) - 1] - c.Y[static_cast<size_t>(mu)]) / RatFunc<K>(c.Q);
    return rational_exp_integral(r, c.all_points());
}

struct HirotaReport {
    bool pass = true;
    struct Item {
        int mu;
        std::string root;
        std::string residue;
        bool ok;
    };
    std::vector<Item> items;
};

/// Residue form of the differential Hirota identities: Res_s R_mu = 0 at
/// every s in S_mu.  Fails on curves whose Y-data does not come from a
/// log-free solution basis.
template <class K>
HirotaReport hirota_residue_check(const QuantumCurve<K>& c) {
    HirotaReport rep;
    for (int mu = 1; mu <= c.d - 1; ++mu) {
        auto R = ratio_R(c, mu);
        for (const auto& s : c.roots_in_sheet(mu)) {
            K res = R.residue_at(s);
            bool ok = detail::tol_zero(res);
            rep.items.push_back({mu, FieldOps<K>::str(s), FieldOps<K>::str(res), ok});
            rep.pass = rep.pass && ok;
        }
    }
    return rep;
}

/// Classical spectral curve E(x,y) = Symb(factorized operator); with Q an
/// explicit scalar of the field the symbol map keeps coefficients as-is.
template <class K>
Poly<RatFunc<K>> classical_curve(const QuantumCurve<K>& c) {
    std::vector<RatFunc<K>> Y = c.Y;
    RatFunc<K> Q{Poly<K>(c.Q)};
    return symbol(factor_from_Y(Y, Q));
}

}  // namespace qtr

#endif
