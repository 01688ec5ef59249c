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
#include "qtr/wronskian.hpp"

using namespace qtrtest;

TEST_CASE("validation of sheet-function data") {
    SECTION("the trivial curve passes") {
        auto c = trivial_curve(F(3, 2));
        auto rep = validate(c);
        REQUIRE(rep.pass);
        REQUIRE(rep.trace_free);
    }
    SECTION("a claimed root without a pole fails") {
        auto c = trivial_curve();
        c.bethe[0].s = F(1);
        auto rep = validate(c);
        REQUIRE_FALSE(rep.pass);
    }
    SECTION("wrong residue normalization fails") {
        QuantumCurve<F> c;
        c.d = 2;
        c.Q = 1;
        c.Y.push_back(RF(poly({-2}), P::x()));  // residue -2Q
        c.Y.push_back(RF(poly({2}), P::x()));
        c.bethe.push_back({F(0), 1});
        REQUIRE_FALSE(validate(c).pass);
    }
    SECTION("undeclared poles are reported") {
        QuantumCurve<F> c;
        c.d = 2;
        c.Q = 1;
        c.Y.push_back(RF(poly({-1}), P::x()) + RF(P::one(), poly({-5, 1})));
        c.Y.push_back(RF(poly({1}), P::x()));
        c.bethe.push_back({F(0), 1});
        auto rep = validate(c);
        REQUIRE_FALSE(rep.pass);
    }
    SECTION("Hermite n=1 passes") { REQUIRE(validate(hermite1()).pass); }
}

TEST_CASE("builder from quasi-polynomial solution data") {
    SECTION("ground state Hermite n=1") {
        auto c = hermite1();
        REQUIRE(c.Y[0] == RF(poly({-1, 0, 1}), P::x()));  // x - 1/x
        REQUIRE(c.Y[1] == -c.Y[0]);
        REQUIRE(c.bethe.size() == 1);
        REQUIRE(c.bethe[0].s == 0);
        REQUIRE(c.bethe[0].mu == 1);
        auto E = factor_from_Y(c.Y, RF(P(c.Q)));
        REQUIRE(E.coeff(0) == RF(poly({3, 0, -1})));
        // the factorized operator annihilates psi1 from the right
        auto psi = builder_psi1(hermite1_solution());
        REQUIRE(right_act(psi, E).is_zero());
    }
    SECTION("trivial curve: all corrections cancel") {
        auto c = trivial_curve(F(7, 3));
        auto E = factor_from_Y(c.Y, RF(P(c.Q)));
        REQUIRE(E.degree() == 2);
        REQUIRE(E.coeff(0).is_zero());
        REQUIRE(E.coeff(1).is_zero());
    }
    SECTION("repeated roots are rejected") {
        QuasiPolySolution<F> sol;
        sol.p_prime = RF::zero();
        sol.q = poly({0, 0, 1});  // x^2
        REQUIRE_THROWS_AS(from_quasi_poly(sol, F(1)), NonSimpleRoot);
    }
    SECTION("irrational roots require the numeric backend") {
        QuasiPolySolution<F> sol;
        sol.p_prime = RF::zero();
        sol.q = poly({-2, 0, 1});  // x^2 - 2
        REQUIRE_THROWS_AS(from_quasi_poly(sol, F(1)), PoleFieldMismatch);
    }
    SECTION("two-root curve with a puncture") {
        auto c = laguerre_a2();
        REQUIRE(c.bethe.size() == 2);
        REQUIRE(c.punctures.size() == 1);
        REQUIRE(c.punctures[0] == 0);
        REQUIRE(validate(c).pass);
        auto psi = builder_psi1(laguerre_solution());
        auto E = factor_from_Y(c.Y, RF(P(c.Q)));
        REQUIRE(right_act(psi, E).is_zero());
    }
}

TEST_CASE("sheet-ratio functions") {
    SECTION("trivial curve: R1 = 1/x^2") {
        auto R = ratio_R(trivial_curve(), 1);
        REQUIRE(R.rational_part() == RF(P::one(), poly({0, 0, 1})));
        REQUIRE(R.exp_logderiv().is_zero());
    }
    SECTION("Hermite n=1: R1 = exp(x^2)/x^2") {
        auto R = ratio_R(hermite1(), 1);
        REQUIRE(R.rational_part() == RF(P::one(), poly({0, 0, 1})));
        REQUIRE(R.exp_logderiv() == RF(poly({0, 2})));
    }
    SECTION("double pole at own-sheet roots, certified integer residues") {
        auto R = ratio_R(laguerre_a2(), 1);
        auto se = R.local_expand(F(2), 0);
        REQUIRE(se.valuation() == -2);
        REQUIRE_FALSE(R.has_non_integer_residue);  // puncture residue -3 is integral
    }
}

TEST_CASE("residue form of the Hirota identities") {
    SECTION("builder-produced curves pass") {
        REQUIRE(hirota_residue_check(trivial_curve()).pass);
        REQUIRE(hirota_residue_check(hermite1()).pass);
        REQUIRE(hirota_residue_check(laguerre_a2()).pass);
    }
    SECTION("the adversarial raw-Y curve fails with residue -1/4 at s=1") {
        auto c = adversarial_curve();
        REQUIRE(validate(c).pass);  // structurally fine
        auto rep = hirota_residue_check(c);
        REQUIRE_FALSE(rep.pass);
        bool found = false;
        for (const auto& it : rep.items)
            if (it.root == "1") {
                found = true;
                REQUIRE(it.residue == "-1/4");
                REQUIRE_FALSE(it.ok);
            }
        REQUIRE(found);
    }
}

TEST_CASE("determinant form of the Hirota identities") {
    REQUIRE(hirota_determinant_check(2, F(1)));
    REQUIRE(hirota_determinant_check(3, F(1)));
    REQUIRE(hirota_determinant_check(3, F(5, 2)));
}

TEST_CASE("classical spectral curve") {
    SECTION("trivial curve gives y^2") {
        auto E = classical_curve(trivial_curve());
        REQUIRE(E.degree() == 2);
        REQUIRE(E.coeff(0).is_zero());
        REQUIRE(E.coeff(1).is_zero());
    }
    SECTION("Hermite n=1 at Q=1 gives y^2 - x^2 + 3") {
        auto E = classical_curve(hermite1());
        REQUIRE(E.degree() == 2);
        REQUIRE(E.coeff(1).is_zero());
        REQUIRE(E.coeff(0) == RF(poly({3, 0, -1})));
    }
    SECTION("the builder family scales with Q, so the curve flattens as Q -> 0") {
        for (F q : {F(1, 2), F(1, 5), F(1, 11)}) {
            auto E = classical_curve(trivial_curve(q));
            REQUIRE(E.coeff(0).is_zero());
            REQUIRE(E.coeff(1).is_zero());
        }
    }
}
