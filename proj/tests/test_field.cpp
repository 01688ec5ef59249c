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

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "qtr/diffsym.hpp"
#include "qtr/exprio.hpp"
#include "qtr/quasirational.hpp"

using namespace qtrtest;

TEST_CASE("rational roots and deflation") {
    auto rl = rational_roots(poly({-1, 0, 1}));  // x^2 - 1
    REQUIRE(rl.roots.size() == 2);
    REQUIRE(rl.remainder.degree() == 0);
    auto irr = rational_roots(poly({-2, 0, 1}));  // x^2 - 2
    REQUIRE(irr.roots.empty());
    REQUIRE(irr.remainder.degree() == 2);
}

TEST_CASE("local expansion of a geometric series") {
    RF g(P::one(), poly({1, -1}));  // 1/(1-x)
    auto se = g.local_expand(F(0), 3);
    for (int j = 0; j <= 3; ++j) REQUIRE(se.coeff(j) == 1);
}

TEST_CASE("partial fractions reassemble and match residues") {
    RF f(P::one(), poly({-1, 0, 1}));
    auto pf = partial_fractions(f);
    REQUIRE(pf.parts.size() == 2);
    for (const auto& part : pf.parts) {
        if (part.pole == 1) REQUIRE(part.principal[0] == F(1, 2));
        if (part.pole == -1) REQUIRE(part.principal[0] == F(-1, 2));
    }
    REQUIRE(pf.reassembled() == f);

    RF h(poly({2, 3, 1}), poly({0, 0, 1, 1}));  // poles at 0 (double) and -1
    auto ph = partial_fractions(h);
    REQUIRE(ph.reassembled() == h);
}

TEST_CASE("simple residues") {
    RF f(P::one(), poly({-2, 1}));  // 1/(x-2)
    REQUIRE(residue_at(f, F(2)) == 1);
    RF g(P::one(), poly({0, 0, 1}));  // 1/x^2
    REQUIRE(residue_at(g, F(0)) == 0);
}

TEST_CASE("residue properties on random rational functions") {
    Rng rng;
    for (int iter = 0; iter < 30; ++iter) {
        // build f with known rational poles
        std::vector<F> poles;
        P den = P::one();
        for (int i = 0; i < 3; ++i) {
            F p = rng.rat(-4, 4);
            bool dup = false;
            for (const auto& q : poles) dup = dup || q == p;
            if (dup) continue;
            poles.push_back(p);
            den = den * P::x_minus(p);
        }
        P num = rng.rand_poly(static_cast<int>(poles.size()) - 1);
        RF f(num, den);

        // residue_at agrees with the partial fraction coefficient
        auto pf = partial_fractions(f, poles);
        for (const auto& part : pf.parts) {
            REQUIRE(residue_at(f, part.pole) == part.principal[0]);
        }

        // sum of residues of a function vanishing to order >= 2 at infinity
        if (f.decay_at_infinity() >= 2) {
            F tot = 0;
            for (const auto& p : poles) tot += residue_at(f, p);
            REQUIRE(tot.is_zero());
        }

        // the residue of an exact derivative vanishes everywhere
        RF df = f.derivative();
        for (const auto& p : poles) REQUIRE(residue_at(df, p).is_zero());
    }
}

TEST_CASE("series exponential against the factorial oracle") {
    // oracle: exp coefficients 1/m! computed independently
    LocalSeries<F> x2(F(0), 2, {F(1)}, 8);  // x^2
    auto e = x2.exponential();
    F fact = 1;
    for (int m = 0; m * 2 <= 8; ++m) {
        if (m > 0) fact *= m;
        REQUIRE(e.coeff(2 * m) == 1 / fact);
    }
    REQUIRE(e.coeff(3) == 0);
}

TEST_CASE("quasi-rational structure of exp integrals") {
    SECTION("r = 1/x gives x") {
        auto q = rational_exp_integral(RF(P::one(), P::x()));
        REQUIRE(q.rational_part() == RF::x());
        REQUIRE(q.exp_logderiv().is_zero());
        REQUIRE_FALSE(q.has_non_integer_residue);
    }
    SECTION("r = 0 gives 1") {
        auto q = rational_exp_integral(RF::zero());
        REQUIRE(q.rational_part() == RF::one());
        REQUIRE(q.exp_logderiv().is_zero());
    }
    SECTION("r = 2x - 2/x gives exp(x^2)/x^2") {
        RF r(poly({-2, 0, 2}), P::x());
        auto q = rational_exp_integral(r);
        REQUIRE(q.rational_part() == RF(P::one(), poly({0, 0, 1})));
        REQUIRE(q.exp_logderiv() == RF(poly({0, 2})));
        auto se = q.local_expand(F(0), 2);
        REQUIRE(se.valuation() == -2);
        REQUIRE(se.coeff(-2) == 1);
        REQUIRE(se.coeff(-1) == 0);  // no simple-pole part
        REQUIRE(se.coeff(0) == 1);
        REQUIRE(se.coeff(2) == F(1, 2));
        REQUIRE(q.residue_at(F(0)) == 0);
    }
    SECTION("non-integer residues are recorded, not fatal") {
        RF r(poly({3}), poly({0, 2}));  // 3/(2x)
        auto q = rational_exp_integral(r);
        REQUIRE(q.has_non_integer_residue);
        REQUIRE(q.rational_part() == RF::one());
    }
}

TEST_CASE("quasi-rational derivative follows the chain rule") {
    RF r(poly({-2, 0, 2}), P::x());
    auto q = rational_exp_integral(r);
    auto dq = q.derivative();
    // d/dx (R e^I) = (R' + R r) e^I
    REQUIRE(dq.rational_part() == q.rational_part().derivative() + q.rational_part() * r);
    REQUIRE(dq.exp_logderiv() == q.exp_logderiv());
}

TEST_CASE("formal differential symbols satisfy Leibniz") {
    using DP = DiffPoly<F>;
    Rng rng;
    auto rand_dp = [&](int terms) {
        DP acc;
        for (int t = 0; t < terms; ++t) {
            DP m(rng.nonzero_rat());
            std::uniform_int_distribution<int> sym(0, 2), der(0, 2), rep(1, 2);
            int k = rep(rng.gen);
            for (int i = 0; i < k; ++i)
                m = m * DP::symbol(static_cast<uint32_t>(sym(rng.gen)), static_cast<uint32_t>(der(rng.gen)));
            acc = acc + m;
        }
        return acc;
    };
    for (int it = 0; it < 20; ++it) {
        DP f = rand_dp(3), g = rand_dp(3);
        REQUIRE((f * g).derivative() == f.derivative() * g + f * g.derivative());
    }
}

TEST_CASE("differential fraction equality is decidable by normal form") {
    using DP = DiffPoly<F>;
    using DF = DiffFrac<F>;
    DP p1 = DP::symbol(0), p2 = DP::symbol(1);
    DF a(p1 * p2, p2);  // psi1 psi2 / psi2
    DF b(p1);
    REQUIRE(a == b);
    REQUIRE(a - b == DF());
    REQUIRE(a / b == DF(DP(F(1))));
}

TEST_CASE("expression round trips") {
    Rng rng;
    for (int it = 0; it < 20; ++it) {
        RF f = rng.rand_ratfunc(3);
        REQUIRE(parse_ratfunc(ratfunc_str(f)) == f);
    }
    REQUIRE(parse_poly("4*x^2 - 2") == poly({-2, 0, 4}));
    REQUIRE(parse_ratfunc("(3 - x)/(2*x)") == RF(poly({3, -1}), poly({0, 2})));
    REQUIRE_THROWS_AS(parse_ratfunc("x + y"), ParseError);
}
