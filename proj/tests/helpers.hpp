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

#ifndef QTR_TEST_HELPERS_HPP
#define QTR_TEST_HELPERS_HPP

#include <random>

#include "qtr/curve.hpp"

namespace qtrtest {

using namespace qtr;
using F = Rational;
using RF = RatFunc<F>;
using P = Poly<F>;

inline P poly(std::initializer_list<long> asc) {
    std::vector<F> c;
    for (long v : asc) c.emplace_back(v);
    return P(std::move(c));
}

inline QuantumCurve<F> trivial_curve(F Q = 1) {
    QuasiPolySolution<F> sol;
    sol.p_prime = RF::zero();
    sol.q = P::x();
    return from_quasi_poly(sol, Q);
}

inline QuasiPolySolution<F> hermite1_solution() {
    QuasiPolySolution<F> sol;
    sol.p_prime = RF(poly({0, -1}));
    sol.q = P::x();
    return sol;
}
inline QuantumCurve<F> hermite1(F Q = 1) { return from_quasi_poly(hermite1_solution(), Q); }

inline QuasiPolySolution<F> laguerre_solution() {
    QuasiPolySolution<F> sol;
    sol.p_prime = RF(poly({3, -1}), poly({0, 2}));
    sol.q = poly({12, -8, 1});
    return sol;
}
inline QuantumCurve<F> laguerre_a2(F Q = 1) { return from_quasi_poly(laguerre_solution(), Q); }

inline QuantumCurve<F> empty_bethe_curve(F Q = 1) {
    QuantumCurve<F> c;
    c.d = 2;
    c.Q = Q;
    c.Y.push_back(RF(poly({0, 1})));
    c.Y.push_back(RF(poly({0, -1})));
    return c;
}

/// raw-Y curve whose D_1 = x^2 - 1 is not a log-free solution minor
inline QuantumCurve<F> adversarial_curve(F Q = 1) {
    QuantumCurve<F> c;
    c.d = 2;
    c.Q = Q;
    RF D1(poly({-1, 0, 1}));
    RF logd = D1.derivative() / D1;
    c.Y.push_back(RF(P(-Q)) * logd);
    c.Y.push_back(RF(P(Q)) * logd);
    c.bethe.push_back({F(1), 1});
    c.bethe.push_back({F(-1), 1});
    return c;
}

/// deterministic small random rationals / polynomials for property tests
struct Rng {
    std::mt19937 gen{20260809};
    F rat(int lo = -6, int hi = 6) {
        std::uniform_int_distribution<int> num(lo, hi);
        std::uniform_int_distribution<int> den(1, 5);
        return F(num(gen), den(gen));
    }
    F nonzero_rat() {
        F v = rat();
        while (v.is_zero()) v = rat();
        return v;
    }
    P rand_poly(int maxdeg) {
        std::uniform_int_distribution<int> dd(0, maxdeg);
        int d = dd(gen);
        std::vector<F> c;
        for (int i = 0; i <= d; ++i) c.push_back(rat());
        P p(std::move(c));
        return p.is_zero() ? P::one() : p;
    }
    RF rand_ratfunc(int maxdeg) {
        P den = rand_poly(maxdeg);
        while (den.is_zero()) den = rand_poly(maxdeg);
        return RF(rand_poly(maxdeg), den);
    }
};

}  // namespace qtrtest

#endif
