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

// Batch front door: validate curves, solve Bergman kernels, run the
// recursion and the loop-equation checks, emit deterministic JSON.

#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "qtr/jsonio.hpp"
#include "qtr/miura.hpp"
#include "qtr/wronskian.hpp"

using namespace qtr;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

njson load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    njson j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ParseError(std::string("bad JSON in '") + path + "': " + e.what());
    }
    return j;
}

void emit(const njson& j, const std::string& out) {
    std::string text = j.dump(2) + "\n";
    if (out.empty()) {
        std::cout << text;
    } else {
        std::ofstream os(out, std::ios::binary);
        os << text;
    }
}

struct CommonOpts {
    std::string curve_path;
    std::string kernel_path;
    std::string out;
    std::string backend = "exact";
    int chi_max = 1;
    std::string convention = "auto";
    bool half_rhs = true;
    std::string rhs_sign = "auto";
    int max_pole_order = 2;
    std::string samples;
};

SignConvention forced_convention(const CommonOpts& o) {
    SignConvention conv;
    conv.drift = (o.convention == "definition") ? Drift::Definition : Drift::Appendix;
    Rational mag = o.half_rhs ? Rational(1, 2) : Rational(1);
    conv.rhs = (o.rhs_sign == "plus") ? mag : -mag;
    return conv;
}

SignConvention pick_convention(const CommonOpts& o, const QuantumCurve<Rational>& c,
                               const SheetedKernel<Rational>& G, njson* note) {
    if (o.convention == "auto" || o.rhs_sign == "auto") {
        auto res = resolve_convention(c, G);
        if (note) {
            (*note)["resolved_convention"] = res.chosen.str();
            (*note)["candidates"] = res.tried;
        }
        return res.chosen;
    }
    SignConvention conv = forced_convention(o);
    if (note) (*note)["forced_convention"] = conv.str();
    return conv;
}

std::vector<Rational> parse_samples(const std::string& s, size_t expect) {
    std::vector<Rational> out;
    std::string cur;
    for (char ch : s + ",") {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(rational_from_string(cur));
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur += ch;
        }
    }
    if (expect && out.size() < expect) throw ParseError("expected at least " + std::to_string(expect) + " samples");
    return out;
}

int cmd_validate(const CommonOpts& o) {
    njson j = load_json(o.curve_path);
    njson rep;
    bool pass = false;
    if (o.backend == "exact") {
        auto cf = curve_from_json(j);
        auto v = validate(cf.curve);
        pass = v.pass;
        rep["pass"] = v.pass;
        rep["trace_free"] = v.trace_free;
        rep["failures"] = v.failures;
    } else {
        auto c = curve_from_json_numeric(j);
        auto v = validate(c);
        pass = v.pass;
        rep["pass"] = v.pass;
        rep["trace_free"] = v.trace_free;
        rep["failures"] = v.failures;
    }
    rep["backend"] = o.backend;
    emit(rep, o.out);
    return pass ? kExitPass : kExitFail;
}

int cmd_hirota(const CommonOpts& o) {
    njson j = load_json(o.curve_path);
    njson rep;
    bool pass = true;
    auto fill = [&rep](const HirotaReport& h) {
        rep["pass"] = h.pass;
        njson items = njson::array();
        for (const auto& it : h.items)
            items.push_back({{"mu", it.mu}, {"root", it.root}, {"residue", it.residue}, {"ok", it.ok}});
        rep["residues"] = items;
    };
    int d = 0;
    if (o.backend == "exact") {
        auto cf = curve_from_json(j);
        d = cf.curve.d;
        auto h = hirota_residue_check(cf.curve);
        fill(h);
        pass = h.pass;
    } else {
        auto c = curve_from_json_numeric(j);
        d = c.d;
        auto h = hirota_residue_check(c);
        fill(h);
        pass = h.pass;
    }
    if (d <= 3) rep["determinant_identity"] = hirota_determinant_check(d, Rational(3, 2));
    emit(rep, o.out);
    return pass ? kExitPass : kExitFail;
}

int cmd_symbol(const CommonOpts& o) {
    auto cf = curve_from_json(load_json(o.curve_path));
    auto E = classical_curve(cf.curve);
    njson rep;
    njson coeffs = njson::array();
    for (int k = 0; k <= E.degree(); ++k) coeffs.push_back(ratfunc_str(E.coeff(k)));
    rep["classical_curve_y_coeffs_ascending"] = coeffs;
    emit(rep, o.out);
    return kExitPass;
}

int cmd_miura(int d, int k, const std::string& out) {
    using K0 = RatFunc<Rational>;  // rational in Q
    using FQ = DiffFrac<K0>;
    CurrentVector<FQ> cur;
    for (int i = 0; i < d; ++i) cur.J.push_back(FQ::symbol(static_cast<uint32_t>(i)));
    FQ Q{DiffPoly<K0>(K0::x())};
    FQ w = w_closed_form(k, cur, Q);
    std::vector<std::string> names;
    for (int i = 1; i <= d; ++i) names.push_back("J" + std::to_string(i));
    // print with explicit Q-rational coefficients
    std::ostringstream os;
    bool first = true;
    for (const auto& [mo, c] : w.num().terms()) {
        os << (first ? "" : " + ") << "(" << ratfunc_str(c, "Q") << ")";
        for (auto& [idv, e] : mo.factors) {
            uint32_t s = DiffMono::sym_of(idv), der = DiffMono::der_of(idv);
            os << "*";
            if (der == 0)
                os << names[s];
            else if (der == 1)
                os << "d(" << names[s] << ")";
            else
                os << "d" << der << "(" << names[s] << ")";
            if (e > 1) os << "^" << e;
        }
        first = false;
    }
    njson rep;
    rep["d"] = d;
    rep["k"] = k;
    rep["W"] = os.str();
    emit(rep, out);
    return kExitPass;
}

int cmd_bergman(const CommonOpts& o) {
    auto cf = curve_from_json(load_json(o.curve_path));
    SolveDiagnostics diag;
    auto G = solve_G_ansatz(cf.curve, o.max_pole_order, &diag);
    auto v = validate_G(G, cf.curve);
    njson rep = kernel_to_json(G);
    rep["solution_space_dimension"] = diag.kernel_dimension;
    rep["strict_decay"] = diag.strict_decay;
    rep["validates"] = v.pass;
    emit(rep, o.out);
    return v.pass ? kExitPass : kExitFail;
}

int cmd_resolve(const CommonOpts& o) {
    auto cf = curve_from_json(load_json(o.curve_path));
    SheetedKernel<Rational> G = o.kernel_path.empty()
                                    ? solve_G_ansatz(cf.curve, o.max_pole_order)
                                    : kernel_from_json(load_json(o.kernel_path), cf.curve);
    auto res = resolve_convention(cf.curve, G);
    njson rep;
    rep["resolved_convention"] = res.chosen.str();
    rep["drift"] = res.chosen.drift == Drift::Appendix ? "appendix" : "definition";
    rep["rhs"] = res.chosen.rhs.str();
    rep["candidates"] = res.tried;
    emit(rep, o.out);
    return kExitPass;
}

int cmd_recurse(const CommonOpts& o) {
    auto cf = curve_from_json(load_json(o.curve_path));
    SheetedKernel<Rational> G = o.kernel_path.empty()
                                    ? solve_G_ansatz(cf.curve, o.max_pole_order)
                                    : kernel_from_json(load_json(o.kernel_path), cf.curve);
    njson rep;
    SignConvention conv = pick_convention(o, cf.curve, G, &rep);
    Engine<Rational> eng(cf.curve, G, conv, o.chi_max);
    eng.recurse();
    rep["chi_max"] = o.chi_max;
    njson sites = njson::array();
    for (const auto& s : G.sites) sites.push_back(s.str());
    rep["sites"] = sites;
    njson entries;
    for (int chi = 1; chi <= o.chi_max; ++chi)
        for (int g = 0; 2 * g <= chi + 1; ++g) {
            int n = chi + 2 - 2 * g;
            if (n < 1 || n - 1 > 2) continue;
            const auto& w = eng.W(g, n);
            entries["W_" + std::to_string(g) + "_" + std::to_string(n)] = correlator_to_json(w);
        }
    rep["entries"] = entries;
    if (!o.samples.empty()) {
        auto vals = parse_samples(o.samples, 3);
        njson evals = njson::array();
        const auto& w = eng.W(0, 3);
        for (int i = 0; i < cf.curve.d; ++i)
            for (int j = 0; j < cf.curve.d; ++j)
                for (int k = 0; k < cf.curve.d; ++k) {
                    Rational v = eng.eval_entry(w, {i, j, k}, vals[0], vals[1], vals[2]);
                    evals.push_back({{"entry", "W_0_3"},
                                     {"sheets", {i + 1, j + 1, k + 1}},
                                     {"at", {vals[0].str(), vals[1].str(), vals[2].str()}},
                                     {"value", v.str()}});
                }
        rep["sample_evaluations"] = evals;
    }
    emit(rep, o.out);
    return kExitPass;
}

int cmd_loopcheck(const CommonOpts& o, const std::string& table_path) {
    auto cf = curve_from_json(load_json(o.curve_path));
    SheetedKernel<Rational> G = o.kernel_path.empty()
                                    ? solve_G_ansatz(cf.curve, o.max_pole_order)
                                    : kernel_from_json(load_json(o.kernel_path), cf.curve);
    njson rep;
    SignConvention conv = pick_convention(o, cf.curve, G, &rep);
    int chi = o.chi_max;
    njson table;
    if (!table_path.empty()) {
        table = load_json(table_path);
        chi = table.at("chi_max").get<int>();
    }
    Engine<Rational> eng(cf.curve, G, conv, chi);
    eng.recurse();

    bool table_ok = true;
    if (!table_path.empty()) {
        auto tab = std::make_shared<const std::vector<Rational>>(G.sites);
        for (const auto& [key, val] : table.at("entries").items()) {
            auto w = correlator_from_json(val, cf.curve.d, tab);
            table_ok = table_ok && (w == eng.W(w.g, w.n));
        }
        rep["table_matches_recomputation"] = table_ok;
    }

    LoopChecker<Rational> lc(eng);
    std::vector<Rational> w4samples;
    if (!o.samples.empty()) w4samples = parse_samples(o.samples, 3);
    auto lrep = lc.run(w4samples.size() >= 3 ? &w4samples : nullptr);
    njson checks = njson::array();
    for (const auto& it : lrep.items) checks.push_back({{"name", it.name}, {"ok", it.ok}});
    rep["checks"] = checks;
    rep["pass"] = lrep.pass && table_ok;
    emit(rep, o.out);
    return (lrep.pass && table_ok) ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact-arithmetic quantum spectral curves and topological recursion"};
    app.require_subcommand(1);

    if (const char* bits = std::getenv("QTR_PRECISION_BITS"))
        set_float_precision_bits(static_cast<unsigned>(std::atoi(bits)));
    else
        set_float_precision_bits(256);

    CommonOpts o;
    int miura_d = 2, miura_k = 2;
    std::string table_path;

    auto add_common = [&](CLI::App* c, bool needs_curve = true) {
        if (needs_curve) c->add_option("--curve", o.curve_path, "curve spec JSON")->required();
        c->add_option("--out", o.out, "output path (stdout when omitted)");
    };

    auto* v = app.add_subcommand("validate", "check the curve invariants");
    add_common(v);
    v->add_option("--backend", o.backend, "exact | f256");

    auto* h = app.add_subcommand("hirota", "residue form of the Hirota identities");
    add_common(h);
    h->add_option("--backend", o.backend, "exact | f256");

    auto* sy = app.add_subcommand("symbol", "classical spectral curve of the operator");
    add_common(sy);

    auto* mi = app.add_subcommand("miura", "closed-form W generator");
    mi->add_option("--d", miura_d, "rank")->required();
    mi->add_option("--k", miura_k, "generator index")->required();
    mi->add_option("--out", o.out, "output path");

    auto* be = app.add_subcommand("bergman", "solve the curve-adapted kernel ansatz");
    add_common(be);
    be->add_option("--max-pole-order", o.max_pole_order, "ansatz pole order (default 2)");

    auto* rc = app.add_subcommand("resolve-convention", "empirical kernel sign convention");
    add_common(rc);
    rc->add_option("--kernel", o.kernel_path, "kernel JSON (solved when omitted)");

    auto* re = app.add_subcommand("recurse", "run the topological recursion");
    add_common(re);
    re->add_option("--kernel", o.kernel_path, "kernel JSON (solved when omitted)");
    re->add_option("--chi-max", o.chi_max, "complexity budget 2g-2+n");
    re->add_option("--convention", o.convention, "auto | definition | appendix");
    re->add_option("--half-rhs", o.half_rhs, "halve the kernel source");
    re->add_option("--rhs-sign", o.rhs_sign, "auto | plus | minus");
    re->add_option("--samples", o.samples, "x0,z1,z2 rational sample point");

    auto* lc = app.add_subcommand("loopcheck", "verify the loop equations");
    add_common(lc);
    lc->add_option("--kernel", o.kernel_path, "kernel JSON (solved when omitted)");
    lc->add_option("--table", table_path, "recursion output to cross-check");
    lc->add_option("--chi-max", o.chi_max, "budget when no table is given");
    lc->add_option("--convention", o.convention, "auto | definition | appendix");
    lc->add_option("--half-rhs", o.half_rhs, "halve the kernel source");
    lc->add_option("--rhs-sign", o.rhs_sign, "auto | plus | minus");
    lc->add_option("--samples", o.samples, "bound spectators for the n=3 checks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (v->parsed()) return cmd_validate(o);
        if (h->parsed()) return cmd_hirota(o);
        if (sy->parsed()) return cmd_symbol(o);
        if (mi->parsed()) return cmd_miura(miura_d, miura_k, o.out);
        if (be->parsed()) return cmd_bergman(o);
        if (rc->parsed()) return cmd_resolve(o);
        if (re->parsed()) return cmd_recurse(o);
        if (lc->parsed()) return cmd_loopcheck(o, table_path);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitInput;
}
