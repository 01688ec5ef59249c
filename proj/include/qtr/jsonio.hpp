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

#ifndef QTR_JSONIO_HPP
#define QTR_JSONIO_HPP

#include <json.hpp>
#include <string>

#include "qtr/exprio.hpp"
#include "qtr/loopcheck.hpp"

namespace qtr {

using njson = nlohmann::json;

/// ---- curve specs ------------------------------------------------------

struct CurveFile {
    QuantumCurve<Rational> curve;
    bool has_solution = false;
    QuasiPolySolution<Rational> solution;  // when built from quasi_poly data
};

inline njson curve_to_json(const CurveFile& cf) {
    njson j;
    j["d"] = cf.curve.d;
    j["Q"] = cf.curve.Q.str();
    if (cf.has_solution) {
        j["builder"] = "quasi_poly";
        j["p_prime"] = ratfunc_str(cf.solution.p_prime);
        j["q"] = poly_str(cf.solution.q);
    } else {
        j["builder"] = "raw_Y";
    }
    njson ys = njson::array();
    for (const auto& y : cf.curve.Y) ys.push_back(ratfunc_str(y));
    j["Y"] = ys;
    njson bs = njson::array();
    for (const auto& b : cf.curve.bethe) bs.push_back({{"s", b.s.str()}, {"mu", b.mu}});
    j["bethe"] = bs;
    njson ps = njson::array();
    for (const auto& p : cf.curve.punctures) ps.push_back(p.str());
    j["punctures"] = ps;
    return j;
}

inline void require_field(const njson& j, const std::string& key) {
    if (!j.contains(key)) throw ParseError("curve spec missing required field \"" + key + "\"");
}

inline CurveFile curve_from_json(const njson& j) {
    CurveFile cf;
    require_field(j, "d");
    require_field(j, "Q");
    require_field(j, "builder");
    int d = j.at("d").get<int>();
    Rational Q = rational_from_string(j.at("Q").get<std::string>());
    std::string builder = j.at("builder").get<std::string>();
    if (builder == "quasi_poly") {
        require_field(j, "p_prime");
        require_field(j, "q");
        cf.has_solution = true;
        cf.solution.p_prime = parse_ratfunc(j.at("p_prime").get<std::string>());
        cf.solution.q = parse_poly(j.at("q").get<std::string>());
        cf.curve = from_quasi_poly(cf.solution, Q);
        if (cf.curve.d != d) throw ParseError("declared d does not match the builder");
    } else if (builder == "raw_Y") {
        require_field(j, "Y");
        cf.curve.d = d;
        cf.curve.Q = Q;
        for (const auto& y : j.at("Y")) cf.curve.Y.push_back(parse_ratfunc(y.get<std::string>()));
        if (j.contains("bethe"))
            for (const auto& b : j.at("bethe"))
                cf.curve.bethe.push_back(
                    {rational_from_string(b.at("s").get<std::string>()), b.at("mu").get<int>()});
        if (j.contains("punctures"))
            for (const auto& p : j.at("punctures"))
                cf.curve.punctures.push_back(rational_from_string(p.get<std::string>()));
    } else {
        throw ParseError("unknown builder \"" + builder + "\"");
    }
    return cf;
}

/// Numeric (high-precision complex) loading of the same spec; Bethe roots
/// may be given as high-precision decimal pairs ["re","im"].
inline QuantumCurve<CF> curve_from_json_numeric(const njson& j) {
    require_field(j, "d");
    require_field(j, "Q");
    auto to_cf = [](const Rational& r) {
        return CF(BigFloat(numerator(r).str()) / BigFloat(denominator(r).str()));
    };
    auto lift_poly = [&](const Poly<Rational>& p) {
        std::vector<CF> c;
        for (int i = 0; i <= p.degree(); ++i) c.push_back(to_cf(p.coeff(i)));
        return Poly<CF>(std::move(c));
    };
    auto lift_rf = [&](const RatFunc<Rational>& f) { return RatFunc<CF>(lift_poly(f.num()), lift_poly(f.den())); };

    CF Q = to_cf(rational_from_string(j.at("Q").get<std::string>()));
    std::string builder = j.at("builder").get<std::string>();
    std::vector<CF> roots;
    if (j.contains("bethe"))
        for (const auto& b : j.at("bethe")) {
            const auto& s = b.at("s");
            if (s.is_array())
                roots.emplace_back(BigFloat(s[0].get<std::string>()), BigFloat(s[1].get<std::string>()));
            else
                roots.push_back(to_cf(rational_from_string(s.get<std::string>())));
        }
    if (builder == "quasi_poly") {
        QuasiPolySolution<CF> sol;
        sol.p_prime = lift_rf(parse_ratfunc(j.at("p_prime").get<std::string>()));
        sol.q = lift_poly(parse_poly(j.at("q").get<std::string>()));
        return from_quasi_poly(sol, Q, roots);
    }
    QuantumCurve<CF> c;
    c.d = j.at("d").get<int>();
    c.Q = Q;
    for (const auto& y : j.at("Y")) c.Y.push_back(lift_rf(parse_ratfunc(y.get<std::string>())));
    for (size_t i = 0; i < roots.size(); ++i)
        c.bethe.push_back({roots[i], j.at("bethe")[i].at("mu").get<int>()});
    if (j.contains("punctures"))
        for (const auto& p : j.at("punctures")) c.punctures.push_back(to_cf(rational_from_string(p.get<std::string>())));
    return c;
}

/// ---- kernels ------------------------------------------------------------

inline RatFunc<Rational> polefn_to_ratfunc(const PoleFn<Rational>& f, const std::vector<Rational>& sites) {
    RatFunc<Rational> acc{Poly<Rational>(f.cst)};
    for (const auto& [k, v] : f.poles) {
        RatFunc<Rational> lin{Poly<Rational>::x_minus(sites[static_cast<size_t>(k.first)])};
        RatFunc<Rational> mono{Poly<Rational>(v)};
        for (int u = 0; u < k.second; ++u) mono = mono / lin;
        acc += mono;
    }
    return acc;
}

inline PoleFn<Rational> ratfunc_to_polefn(const RatFunc<Rational>& f, const std::vector<Rational>& sites) {
    auto pf = partial_fractions(f, sites);
    if (pf.poly_part.degree() > 0) throw ParseError("kernel coefficient grows at infinity");
    PoleFn<Rational> out;
    out.cst = pf.poly_part.coeff(0);
    for (const auto& part : pf.parts) {
        int idx = -1;
        for (size_t i = 0; i < sites.size(); ++i)
            if (sites[i] == part.pole) idx = static_cast<int>(i);
        if (idx < 0) throw ParseError("kernel coefficient has a pole away from the Bethe sites");
        for (size_t r = 0; r < part.principal.size(); ++r)
            if (!part.principal[r].is_zero()) out.add(idx, static_cast<int>(r) + 1, part.principal[r]);
    }
    return out;
}

inline njson kernel_to_json(const SheetedKernel<Rational>& k) {
    njson j;
    j["d"] = k.d;
    njson sites = njson::array();
    for (size_t i = 0; i < k.sites.size(); ++i)
        sites.push_back({{"s", k.sites[i].str()}, {"mu", k.site_sheet[i]}});
    j["sites"] = sites;
    njson entries = njson::array();
    for (int i = 0; i < k.d; ++i)
        for (int jj = 0; jj < k.d; ++jj) {
            njson e;
            e["i0"] = i + 1;
            e["mu"] = jj + 1;
            njson poles = njson::array();
            for (const auto& [key, fn] : k.a[static_cast<size_t>(i)][static_cast<size_t>(jj)]) {
                if (fn.is_zero()) continue;
                poles.push_back({{"s", k.sites[static_cast<size_t>(key.first)].str()},
                                 {"site", key.first},
                                 {"order", key.second},
                                 {"coeff", ratfunc_str(polefn_to_ratfunc(fn, k.sites), "x0")}});
            }
            e["poles"] = poles;
            const auto& l = k.lin[static_cast<size_t>(i)][static_cast<size_t>(jj)];
            if (!l.is_zero()) e["linear"] = ratfunc_str(polefn_to_ratfunc(l, k.sites), "x0");
            const auto& cs = k.cshift[static_cast<size_t>(i)][static_cast<size_t>(jj)];
            if (!cs.is_zero()) e["cshift"] = ratfunc_str(polefn_to_ratfunc(cs, k.sites), "x0");
            entries.push_back(e);
        }
    j["entries"] = entries;
    return j;
}

inline SheetedKernel<Rational> kernel_from_json(const njson& j, const QuantumCurve<Rational>& c) {
    SheetedKernel<Rational> k = SheetedKernel<Rational>::decoupled(c);
    if (j.at("d").get<int>() != c.d) throw ParseError("kernel/curve dimension mismatch");
    for (const auto& e : j.at("entries")) {
        int i0 = e.at("i0").get<int>() - 1;
        int mu = e.at("mu").get<int>() - 1;
        for (const auto& p : e.at("poles")) {
            auto fn = ratfunc_to_polefn(parse_ratfunc(p.at("coeff").get<std::string>(), "x0"), k.sites);
            int site = p.at("site").get<int>();
            int order = p.at("order").get<int>();
            auto& slot = k.a[static_cast<size_t>(i0)][static_cast<size_t>(mu)][{site, order}];
            slot = slot + fn;
        }
        if (e.contains("linear"))
            k.lin[static_cast<size_t>(i0)][static_cast<size_t>(mu)] =
                ratfunc_to_polefn(parse_ratfunc(e.at("linear").get<std::string>(), "x0"), k.sites);
        if (e.contains("cshift"))
            k.cshift[static_cast<size_t>(i0)][static_cast<size_t>(mu)] =
                ratfunc_to_polefn(parse_ratfunc(e.at("cshift").get<std::string>(), "x0"), k.sites);
    }
    return k;
}

/// ---- correlator tables ----------------------------------------------

using K2R = Tower<Rational>::K2;
using Z1R = Tower<Rational>::Z1;

inline njson k2_to_json(const K2R& v) {
    njson terms = njson::array();
    auto push = [&](int s1, int o1, int s2, int o2, const Rational& c) {
        if (c.is_zero()) return;
        njson t;
        t["v"] = c.str();
        if (o1) {
            t["z1_site"] = s1;
            t["z1_order"] = o1;
        }
        if (o2) {
            t["z2_site"] = s2;
            t["z2_order"] = o2;
        }
        terms.push_back(t);
    };
    push(0, 0, 0, 0, v.cst().cst());
    for (const auto& [k1, c] : v.cst().poles()) push(k1.first, k1.second, 0, 0, c);
    for (const auto& [k2, z] : v.poles()) {
        push(0, 0, k2.first, k2.second, z.cst());
        for (const auto& [k1, c] : z.poles()) push(k1.first, k1.second, k2.first, k2.second, c);
    }
    return terms;
}

inline K2R k2_from_json(const njson& terms, const std::shared_ptr<const std::vector<Rational>>& tab) {
    K2R acc;
    for (const auto& t : terms) {
        Rational v = rational_from_string(t.at("v").get<std::string>());
        K2R term{Z1R(v)};
        if (t.contains("z1_order"))
            term = term * K2R(Z1R::pole(tab, t.at("z1_site").get<int>(), t.at("z1_order").get<int>(),
                                        Rational(1)));
        if (t.contains("z2_order"))
            term = term * K2R::pole(tab, t.at("z2_site").get<int>(), t.at("z2_order").get<int>(), Z1R(Rational(1)));
        acc = acc + term;
    }
    return acc;
}

inline njson correlator_to_json(const Correlator<Rational>& w) {
    njson j;
    j["g"] = w.g;
    j["n"] = w.n;
    njson forms = njson::array();
    std::vector<int> sheets(static_cast<size_t>(w.n), 0);
    for (size_t idx = 0; idx < w.forms.size(); ++idx) {
        // decode tuple
        size_t rem = idx;
        for (int q = 0; q < w.n; ++q) {
            sheets[static_cast<size_t>(q)] = static_cast<int>(rem % static_cast<size_t>(w.d));
            rem /= static_cast<size_t>(w.d);
        }
        const auto& f = w.forms[idx];
        njson e;
        njson sh = njson::array();
        for (int s : sheets) sh.push_back(s + 1);
        e["sheets"] = sh;
        if (!FieldOps<K2R>::is_zero(f.cst)) e["cst"] = k2_to_json(f.cst);
        njson poles = njson::array();
        for (const auto& [k, v] : f.poles)
            poles.push_back({{"site", k.first}, {"order", k.second}, {"coeff", k2_to_json(v)}});
        e["poles"] = poles;
        forms.push_back(e);
    }
    j["forms"] = forms;
    return j;
}

inline Correlator<Rational> correlator_from_json(const njson& j, int d,
                                                 const std::shared_ptr<const std::vector<Rational>>& tab) {
    Correlator<Rational> w;
    w.g = j.at("g").get<int>();
    w.n = j.at("n").get<int>();
    w.d = d;
    size_t ntuple = 1;
    for (int i = 0; i < w.n; ++i) ntuple *= static_cast<size_t>(d);
    w.forms.assign(ntuple, PoleFn<K2R>{});
    for (const auto& e : j.at("forms")) {
        std::vector<int> sheets;
        for (const auto& s : e.at("sheets")) sheets.push_back(s.get<int>() - 1);
        PoleFn<K2R> f;
        if (e.contains("cst")) f.cst = k2_from_json(e.at("cst"), tab);
        for (const auto& p : e.at("poles"))
            f.poles[{p.at("site").get<int>(), p.at("order").get<int>()}] = k2_from_json(p.at("coeff"), tab);
        w.at(sheets) = f;
    }
    return w;
}

}  // namespace qtr

#endif
