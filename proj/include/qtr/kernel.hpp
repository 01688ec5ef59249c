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

#ifndef QTR_KERNEL_HPP
#define QTR_KERNEL_HPP

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qtr/curve.hpp"

namespace qtr {

/// Rational function of the first slot x0 in partial-fraction form:
/// cst + sum c / (x0 - site)^order, sites indexed into a shared point list.
template <class F>
struct PoleFn {
    F cst{};
    std::map<std::pair<int, int>, F> poles;  // (site index, order >= 1) -> coefficient

    bool is_zero() const {
        if (!FieldOps<F>::is_zero(cst)) return false;
        for (const auto& [k, v] : poles)
            if (!FieldOps<F>::is_zero(v)) return false;
        return true;
    }
    void add(const F& c) { cst = cst + c; }
    void add(int site, int order, const F& c) {
        auto key = std::make_pair(site, order);
        auto it = poles.find(key);
        if (it == poles.end())
            poles[key] = c;
        else {
            it->second = it->second + c;
            if (FieldOps<F>::is_zero(it->second)) poles.erase(it);
        }
    }
    friend PoleFn operator+(const PoleFn& a, const PoleFn& b) {
        PoleFn r = a;
        r.add(b.cst);
        for (const auto& [k, v] : b.poles) r.add(k.first, k.second, v);
        return r;
    }
    friend PoleFn operator-(const PoleFn& a, const PoleFn& b) { return a + ((-FieldOps<F>::one()) * b); }
    friend PoleFn operator*(const F& s, const PoleFn& a) {
        PoleFn r;
        r.cst = s * a.cst;
        for (const auto& [k, v] : a.poles) {
            F c = s * v;
            if (!FieldOps<F>::is_zero(c)) r.poles[k] = c;
        }
        return r;
    }
    /// evaluate in any field T containing the base scalars
    template <class T>
    T eval(const T& x0, const std::vector<F>& sites) const {
        T acc = scalar_cast<T, F>(cst);
        for (const auto& [k, v] : poles) {
            T den = scalar_cast<T, F>(FieldOps<F>::one());
            T lin = x0 - scalar_cast<T, F>(sites[static_cast<size_t>(k.first)]);
            for (int u = 0; u < k.second; ++u) den = den * lin;
            acc = acc + scalar_cast<T, F>(v) / den;
        }
        return acc;
    }
};

/// Third-kind kernel G and its Bergman kernel B on the sheeted covering:
///   G[i][j](x0, x) = -(d_{ij} - 1/d)/(x - x0)
///                  + sum_{s,r} a[i][j][(s,r)](x0) / (x - s)^r
///                  + lin[i][j](x0) * x
///   B[i][j](x0, x) = d_x G[i][j](x0, x).
/// Sheets are 0-based in storage; 1-based in reports.
template <class F>
struct SheetedKernel {
    int d = 0;
    std::vector<F> sites;                 // x-pole sites (the Bethe roots)
    std::vector<int> site_sheet;          // mu_s per site (1-based)
    using CorrMap = std::map<std::pair<int, int>, PoleFn<F>>;
    std::vector<std::vector<CorrMap>> a;  // [i][j] -> {(site,r) -> coeff fn of x0}
    std::vector<std::vector<PoleFn<F>>> lin;
    /// x-constant sector of G (third-kind gauge terms); invisible to B.
    std::vector<std::vector<PoleFn<F>>> cshift;

    static SheetedKernel decoupled(const QuantumCurve<F>& c) {
        SheetedKernel k;
        k.d = c.d;
        for (const auto& b : c.bethe) {
            k.sites.push_back(b.s);
            k.site_sheet.push_back(b.mu);
        }
        k.a.assign(static_cast<size_t>(c.d), std::vector<CorrMap>(static_cast<size_t>(c.d)));
        k.lin.assign(static_cast<size_t>(c.d), std::vector<PoleFn<F>>(static_cast<size_t>(c.d)));
        k.cshift.assign(static_cast<size_t>(c.d), std::vector<PoleFn<F>>(static_cast<size_t>(c.d)));
        return k;
    }

    F projector(int i, int j) const {  // d_{ij} - 1/d , 0-based sheets
        F r = -(FieldOps<F>::one() / k_int<F>(d));
        if (i == j) r = r + FieldOps<F>::one();
        return r;
    }

    /// second-slot pole sites allowed for sheet j (0-based): S_{j+1} u S_j
    std::vector<int> allowed_sites(int j) const {
        std::vector<int> out;
        for (size_t k = 0; k < sites.size(); ++k)
            if (site_sheet[k] == j + 1 || site_sheet[k] == j) out.push_back(static_cast<int>(k));
        return out;
    }
};

struct KernelValidation {
    bool pass = true;
    std::vector<std::string> failures;
    /// Bethe obstructions that survived, printed per (i0, mu, site).
    std::vector<std::string> obstructions;
    void fail(const std::string& w) {
        pass = false;
        failures.push_back(w);
    }
};

namespace detail {

/// Res_{x=s}[ R * (x - t)^{-r} ] given the local series of R at s.
template <class F>
F residue_weight(const LocalSeries<F>& R, const F& s, const F& t, int r, bool same_site) {
    if (same_site) return R.coeff(r - 1);
    // Taylor of (x-t)^{-r} at s: sum_k binom(-r,k)-style terms
    F acc = FieldOps<F>::zero();
    F base = s - t;
    // only k with R_{-1-k} != 0 contribute; R has valuation >= -2
    for (int k = 0; k <= std::max(0, -R.valuation()) + 1; ++k) {
        F Rk = (-1 - k >= R.valuation() && -1 - k <= R.order_certified()) ? R.coeff(-1 - k) : FieldOps<F>::zero();
        if (FieldOps<F>::is_zero(Rk)) continue;
        // d^k/dx^k (x-t)^{-r} / k! at s = binom(r+k-1, k) (-1)^k (s-t)^{-r-k}
        long b = binom_l(r + k - 1, k);
        F pw = FieldOps<F>::one();
        for (int u = 0; u < r + k; ++u) pw = pw * base;
        F term = k_int<F>(b) / pw;
        if (k % 2 != 0) term = -term;
        acc = acc + term * Rk;
    }
    return acc;
}

/// Res_{x=s}[ R * x ]
template <class F>
F residue_weight_linear(const LocalSeries<F>& R, const F& s) {
    F acc = s * R.coeff(-1);
    if (R.valuation() <= -2) acc = acc + R.coeff(-2);
    return acc;
}

}  // namespace detail

/// The Bethe-compatibility obstruction (1/2) Res_s[R_mu (G[i0][mu+1]-G[i0][mu])]
/// as an explicit rational function of x0.  Zero identically in x0 is the
/// compatibility condition.
template <class F>
PoleFn<F> bethe_obstruction(const SheetedKernel<F>& kern, const QuantumCurve<F>& c, int i0_1based, int mu,
                            int site_idx) {
    const F half = FieldOps<F>::one() / k_int<F>(2);
    const F s = kern.sites[static_cast<size_t>(site_idx)];
    auto R = ratio_R(c, mu).local_expand(s, 4);
    PoleFn<F> obs;

    // projector difference: (d_{i0,mu} - d_{i0,mu+1}) / (x - x0)
    F sigma = FieldOps<F>::zero();
    if (i0_1based == mu) sigma = FieldOps<F>::one();
    if (i0_1based == mu + 1) sigma = sigma - FieldOps<F>::one();
    if (!FieldOps<F>::is_zero(sigma)) {
        for (int m = 0; m <= 1; ++m) {
            F Rc = (-1 - m >= R.valuation()) ? R.coeff(-1 - m) : FieldOps<F>::zero();
            if (!FieldOps<F>::is_zero(Rc)) obs.add(site_idx, m + 1, -(half * sigma * Rc));
        }
    }

    int i0 = i0_1based - 1;
    for (int which = 0; which < 2; ++which) {
        int nu = (which == 0) ? mu : mu - 1;  // 0-based second sheet: mu (ie mu+1 1-based) and mu-1
        F sign = (which == 0) ? half : -half;
        const auto& corr = kern.a[static_cast<size_t>(i0)][static_cast<size_t>(nu)];
        for (const auto& [key, fn] : corr) {
            F w = detail::residue_weight(R, s, kern.sites[static_cast<size_t>(key.first)], key.second,
                                         key.first == site_idx);
            if (FieldOps<F>::is_zero(w)) continue;
            obs = obs + (sign * w) * fn;
        }
        const auto& l = kern.lin[static_cast<size_t>(i0)][static_cast<size_t>(nu)];
        F wl = detail::residue_weight_linear(R, s);
        if (!l.is_zero() && !FieldOps<F>::is_zero(wl)) obs = obs + (sign * wl) * l;
        const auto& cs = kern.cshift[static_cast<size_t>(i0)][static_cast<size_t>(nu)];
        F wc = R.coeff(-1);  // Res_s[R * const]
        if (!cs.is_zero() && !FieldOps<F>::is_zero(wc)) obs = obs + (sign * wc) * cs;
    }
    return obs;
}

/// Full kernel validator: pole placement, sheet sums of G and B, B symmetry,
/// and Bethe compatibility identically in x0.
template <class F>
KernelValidation validate_G(const SheetedKernel<F>& kern, const QuantumCurve<F>& c) {
    KernelValidation rep;
    const int d = kern.d;

    // pole placement
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            auto allowed = kern.allowed_sites(j);
            for (const auto& [key, fn] : kern.a[static_cast<size_t>(i)][static_cast<size_t>(j)]) {
                if (fn.is_zero()) continue;
                bool ok = false;
                for (int s : allowed) ok = ok || s == key.first;
                if (!ok)
                    rep.fail("G[" + std::to_string(i + 1) + "][" + std::to_string(j + 1) +
                             "] has a pole outside S_mu u S_{mu-1}");
            }
        }

    // sheet sums: sum_j G[i][j] pole-free at the roots (and the linear parts cancel)
    for (int i = 0; i < d; ++i) {
        std::map<std::pair<int, int>, PoleFn<F>> tot;
        PoleFn<F> ltot;
        for (int j = 0; j < d; ++j) {
            for (const auto& [key, fn] : kern.a[static_cast<size_t>(i)][static_cast<size_t>(j)]) {
                auto it = tot.find(key);
                if (it == tot.end())
                    tot[key] = fn;
                else
                    it->second = it->second + fn;
            }
            ltot = ltot + kern.lin[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
        for (const auto& [key, fn] : tot)
            if (!fn.is_zero())
                rep.fail("sum_mu G[" + std::to_string(i + 1) + "][mu] keeps a pole at site " +
                         std::to_string(key.first));
        if (!ltot.is_zero()) rep.fail("sum_mu G[" + std::to_string(i + 1) + "][mu] keeps a linear term");
    }
    // sum over the first index of B: sum_i a[i][j] and sum_i lin[i][j] vanish
    for (int j = 0; j < d; ++j) {
        std::map<std::pair<int, int>, PoleFn<F>> tot;
        PoleFn<F> ltot;
        for (int i = 0; i < d; ++i) {
            for (const auto& [key, fn] : kern.a[static_cast<size_t>(i)][static_cast<size_t>(j)]) {
                auto it = tot.find(key);
                if (it == tot.end())
                    tot[key] = fn;
                else
                    it->second = it->second + fn;
            }
            ltot = ltot + kern.lin[static_cast<size_t>(i)][static_cast<size_t>(j)];
        }
        for (const auto& [key, fn] : tot)
            if (!fn.is_zero()) rep.fail("sum_i B[i][" + std::to_string(j + 1) + "] != 0 (pole sector)");
        if (!ltot.is_zero()) rep.fail("sum_i B[i][" + std::to_string(j + 1) + "] != 0 (constant sector)");
    }

    // B symmetry, componentwise
    auto acoef = [&](int i, int j, int s, int r, int t, int w) -> F {
        const auto& corr = kern.a[static_cast<size_t>(i)][static_cast<size_t>(j)];
        auto it = corr.find({s, r});
        if (it == corr.end()) return FieldOps<F>::zero();
        if (w == 0) return it->second.cst;
        auto ip = it->second.poles.find({t, w});
        return ip == it->second.poles.end() ? FieldOps<F>::zero() : ip->second;
    };
    int nsite = static_cast<int>(kern.sites.size());
    int pmax = 0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (const auto& [key, fn] : kern.a[static_cast<size_t>(i)][static_cast<size_t>(j)])
                pmax = std::max(pmax, key.second);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            for (int s = 0; s < nsite; ++s)
                for (int r = 1; r <= pmax + 1; ++r)
                    for (int t = 0; t < nsite; ++t)
                        for (int w = 0; w <= pmax + 1; ++w) {
                            // B[i][j] component 1/(x0-t)^w / (x-s)^{r+1} vs mirror
                            F lhs = k_int<F>(-r) * acoef(i, j, s, r, t, w);
                            F rhs;
                            if (w == 0) {
                                // x0-constant in B[i][j] pairs with the linear sector of B[j][i]
                                auto lp = kern.lin[static_cast<size_t>(j)][static_cast<size_t>(i)].poles.find(
                                    {s, r + 1});
                                rhs = lp == kern.lin[static_cast<size_t>(j)][static_cast<size_t>(i)].poles.end()
                                          ? FieldOps<F>::zero()
                                          : lp->second;
                            } else if (w >= 2) {
                                rhs = k_int<F>(-(w - 1)) * acoef(j, i, t, w - 1, s, r + 1);
                            } else {
                                rhs = FieldOps<F>::zero();  // order-1 x0 poles have no mirror
                            }
                            if (!FieldOps<F>::is_zero(lhs - rhs)) {
                                rep.fail("B symmetry broken at [" + std::to_string(i + 1) + "][" +
                                         std::to_string(j + 1) + "] site " + std::to_string(s));
                                goto symdone;
                            }
                        }
symdone:
    // linear sector: constants and order-1 poles are not symmetrizable
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            const auto& l = kern.lin[static_cast<size_t>(i)][static_cast<size_t>(j)];
            if (!FieldOps<F>::is_zero(l.cst)) rep.fail("linear sector carries an x0-constant");
            for (const auto& [k, v] : l.poles)
                if (k.second == 1 && !FieldOps<F>::is_zero(v)) rep.fail("linear sector carries an order-1 x0 pole");
        }

    // Bethe compatibility
    for (int i0 = 1; i0 <= d; ++i0)
        for (int site = 0; site < nsite; ++site) {
            int mu = kern.site_sheet[static_cast<size_t>(site)];
            auto obs = bethe_obstruction(kern, c, i0, mu, site);
            if (!obs.is_zero()) {
                rep.fail("Bethe compatibility fails at site " + std::to_string(site) + " for i0=" +
                         std::to_string(i0));
                rep.obstructions.push_back("i0=" + std::to_string(i0) + " mu=" + std::to_string(mu) + " site=" +
                                           std::to_string(site));
            }
        }
    return rep;
}

struct SolveDiagnostics {
    int kernel_dimension = 0;
    bool strict_decay = true;  // no constant/linear sectors were needed
};

/// Linear ansatz solver for a curve-adapted kernel.  Conditions: Bethe
/// compatibility identically in x0, pole-freeness of sheet sums, exact B
/// symmetry, kernel-ODE solvability (no order >= 2 poles in the G-difference
/// at own-sheet roots) and the strongest achievable decay.  Returns the
/// minimal solution (free directions zeroed) and records the solution-space
/// dimension.
template <class F>
SheetedKernel<F> solve_G_ansatz(const QuantumCurve<F>& c, int max_pole_order = 2,
                                SolveDiagnostics* diag = nullptr) {
    static_assert(FieldOps<F>::exact, "the ansatz solver runs on the exact backend");
    const int d = c.d;
    const int p = max_pole_order;
    SheetedKernel<F> kern = SheetedKernel<F>::decoupled(c);
    const int nsite = static_cast<int>(kern.sites.size());
    if (nsite == 0) {
        if (diag) *diag = SolveDiagnostics{};
        return kern;  // bare projector kernel
    }

    // unknown indexing: kind 0 = a-pole coeff (i,j,s,r,t,w), kind 1 = a-cst
    // (i,j,s,r), kind 2 = lin pole coeff (i,j,t,w)
    struct U {
        int kind, i, j, s, r, t, w;
    };
    std::vector<U> unknowns;
    std::map<std::tuple<int, int, int, int, int, int, int>, int> uidx;
    auto intern = [&](U u) {
        auto key = std::make_tuple(u.kind, u.i, u.j, u.s, u.r, u.t, u.w);
        auto it = uidx.find(key);
        if (it != uidx.end()) return it->second;
        int id = static_cast<int>(unknowns.size());
        unknowns.push_back(u);
        uidx[key] = id;
        return id;
    };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            auto pj = kern.allowed_sites(j);
            auto pi = kern.allowed_sites(i);
            for (int s : pj)
                for (int r = 1; r <= p; ++r) {
                    intern({1, i, j, s, r, 0, 0});
                    for (int t : pi)
                        for (int w = 1; w <= p + 1; ++w) intern({0, i, j, s, r, t, w});
                }
            for (int t : pi)
                for (int w = 2; w <= p + 1; ++w) intern({2, i, j, 0, 0, t, w});
        }
    const int nu = static_cast<int>(unknowns.size());

    // rows: coefficients + rhs (augmented)
    std::vector<std::vector<F>> rows;
    auto new_row = [&]() -> std::vector<F>& {
        rows.emplace_back(static_cast<size_t>(nu) + 1, FieldOps<F>::zero());
        return rows.back();
    };
    auto lookup = [&](U u) -> int {
        auto key = std::make_tuple(u.kind, u.i, u.j, u.s, u.r, u.t, u.w);
        auto it = uidx.find(key);
        return it == uidx.end() ? -1 : it->second;
    };

    // [Sym] r*c_{i,j,s,r,t,w} = (w-1)*c_{j,i,t,w-1,s,r+1}; w=1 components vanish;
    //       lin_{j,i,s,r+1} = -r*gamma_{i,j,s,r}
    for (int id = 0; id < nu; ++id) {
        const U& u = unknowns[id];
        if (u.kind == 0) {
            if (u.w == 1) {
                auto& row = new_row();
                row[static_cast<size_t>(id)] = FieldOps<F>::one();
            } else {
                auto& row = new_row();
                row[static_cast<size_t>(id)] = k_int<F>(u.r);
                int other = lookup({0, u.j, u.i, u.t, u.w - 1, u.s, u.r + 1});
                if (other >= 0) row[static_cast<size_t>(other)] = row[static_cast<size_t>(other)] - k_int<F>(u.w - 1);
            }
        } else if (u.kind == 1) {
            int other = lookup({2, u.j, u.i, 0, 0, u.s, u.r + 1});
            auto& row = new_row();
            row[static_cast<size_t>(id)] = k_int<F>(u.r);
            if (other >= 0) row[static_cast<size_t>(other)] = row[static_cast<size_t>(other)] + FieldOps<F>::one();
        }
    }

    // [SS] sheet sums over the second index, per (i, s, r, x0-component)
    for (int i = 0; i < d; ++i)
        for (int s = 0; s < nsite; ++s)
            for (int r = 1; r <= p; ++r) {
                // cst component
                {
                    auto& row = new_row();
                    bool any = false;
                    for (int j = 0; j < d; ++j) {
                        int id = lookup({1, i, j, s, r, 0, 0});
                        if (id >= 0) row[static_cast<size_t>(id)] = FieldOps<F>::one(), any = true;
                    }
                    if (!any) rows.pop_back();
                }
                for (int t = 0; t < nsite; ++t)
                    for (int w = 1; w <= p + 1; ++w) {
                        auto& row = new_row();
                        bool any = false;
                        for (int j = 0; j < d; ++j) {
                            int id = lookup({0, i, j, s, r, t, w});
                            if (id >= 0) row[static_cast<size_t>(id)] = FieldOps<F>::one(), any = true;
                        }
                        if (!any) rows.pop_back();
                    }
            }
    // lin sheet sums per (i, t, w)
    for (int i = 0; i < d; ++i)
        for (int t = 0; t < nsite; ++t)
            for (int w = 2; w <= p + 1; ++w) {
                auto& row = new_row();
                bool any = false;
                for (int j = 0; j < d; ++j) {
                    int id = lookup({2, i, j, 0, 0, t, w});
                    if (id >= 0) row[static_cast<size_t>(id)] = FieldOps<F>::one(), any = true;
                }
                if (!any) rows.pop_back();
            }

    // [KS] kernel solvability: no order >= 2 pole in G-difference at own roots
    for (int i0 = 0; i0 < d; ++i0)
        for (int site = 0; site < nsite; ++site) {
            int mu = kern.site_sheet[static_cast<size_t>(site)];
            for (int r = 2; r <= p; ++r) {
                // components of a[i0][mu] - a[i0][mu-1] at (site, r) (0-based sheets)
                {
                    auto& row = new_row();
                    int ida = lookup({1, i0, mu, site, r, 0, 0});
                    int idb = lookup({1, i0, mu - 1, site, r, 0, 0});
                    if (ida >= 0) row[static_cast<size_t>(ida)] = FieldOps<F>::one();
                    if (idb >= 0) row[static_cast<size_t>(idb)] = row[static_cast<size_t>(idb)] - FieldOps<F>::one();
                }
                for (int t = 0; t < nsite; ++t)
                    for (int w = 1; w <= p + 1; ++w) {
                        auto& row = new_row();
                        int ida = lookup({0, i0, mu, site, r, t, w});
                        int idb = lookup({0, i0, mu - 1, site, r, t, w});
                        if (ida >= 0) row[static_cast<size_t>(ida)] = FieldOps<F>::one();
                        if (idb >= 0)
                            row[static_cast<size_t>(idb)] = row[static_cast<size_t>(idb)] - FieldOps<F>::one();
                    }
            }
        }

    // [BC] Bethe compatibility, identically in x0
    for (int i0 = 0; i0 < d; ++i0)
        for (int site = 0; site < nsite; ++site) {
            int mu = kern.site_sheet[static_cast<size_t>(site)];
            const F s = kern.sites[static_cast<size_t>(site)];
            auto R = ratio_R(c, mu).local_expand(s, 4);
            // component accumulator: key (t,w) with w=0 meaning the constant
            std::map<std::pair<int, int>, std::map<int, F>> comp;  // component -> (unknown -> coeff)
            std::map<std::pair<int, int>, F> inhom;
            // projector part
            F sigma = FieldOps<F>::zero();
            if (i0 + 1 == mu) sigma = FieldOps<F>::one();
            if (i0 + 1 == mu + 1) sigma = sigma - FieldOps<F>::one();
            if (!FieldOps<F>::is_zero(sigma)) {
                for (int m = 0; m <= 1; ++m) {
                    F Rc = (-1 - m >= R.valuation()) ? R.coeff(-1 - m) : FieldOps<F>::zero();
                    if (!FieldOps<F>::is_zero(Rc)) inhom[{site, m + 1}] = inhom[{site, m + 1}] - sigma * Rc;
                }
            }
            for (int which = 0; which < 2; ++which) {
                int nu2 = (which == 0) ? mu : mu - 1;  // 0-based second index
                F sign = (which == 0) ? FieldOps<F>::one() : -FieldOps<F>::one();
                auto pj = kern.allowed_sites(nu2);
                for (int sp : pj)
                    for (int r = 1; r <= p; ++r) {
                        F w = detail::residue_weight(R, s, kern.sites[static_cast<size_t>(sp)], r, sp == site);
                        if (FieldOps<F>::is_zero(w)) continue;
                        int idg = lookup({1, i0, nu2, sp, r, 0, 0});
                        if (idg >= 0) comp[{-1, 0}][idg] = comp[{-1, 0}][idg] + sign * w;
                        auto pi = kern.allowed_sites(i0);
                        for (int t : pi)
                            for (int ww = 1; ww <= p + 1; ++ww) {
                                int ida = lookup({0, i0, nu2, sp, r, t, ww});
                                if (ida >= 0) comp[{t, ww}][ida] = comp[{t, ww}][ida] + sign * w;
                            }
                    }
                F wl = detail::residue_weight_linear(R, s);
                if (!FieldOps<F>::is_zero(wl)) {
                    auto pi = kern.allowed_sites(i0);
                    for (int t : pi)
                        for (int ww = 2; ww <= p + 1; ++ww) {
                            int idl = lookup({2, i0, nu2, 0, 0, t, ww});
                            if (idl >= 0) comp[{t, ww}][idl] = comp[{t, ww}][idl] + sign * wl;
                        }
                }
            }
            // emit one equation per x0-component present anywhere
            std::map<std::pair<int, int>, bool> keys;
            for (const auto& [k, v] : comp) keys[k] = true;
            for (const auto& [k, v] : inhom)
                if (!FieldOps<F>::is_zero(v)) keys[k] = true;
            for (const auto& [k, used] : keys) {
                (void)used;
                auto& row = new_row();
                auto itc = comp.find(k);
                if (itc != comp.end())
                    for (const auto& [id, cf] : itc->second) row[static_cast<size_t>(id)] = cf;
                auto iti = inhom.find(k);
                if (iti != inhom.end()) row[static_cast<size_t>(nu)] = -iti->second;  // move to rhs
            }
        }

    // Two-phase solve: strict decay (no cst/linear sectors) first.
    auto solve = [&](bool strict) -> std::optional<std::pair<std::vector<F>, int>> {
        std::vector<std::vector<F>> m = rows;
        if (strict) {
            for (int id = 0; id < nu; ++id)
                if (unknowns[static_cast<size_t>(id)].kind != 0) {
                    auto& row = m.emplace_back(static_cast<size_t>(nu) + 1, FieldOps<F>::zero());
                    row[static_cast<size_t>(id)] = FieldOps<F>::one();
                }
        }
        // Gaussian elimination
        std::vector<int> pivot_col;
        size_t rr = 0;
        for (int col = 0; col < nu && rr < m.size(); ++col) {
            size_t pr = rr;
            while (pr < m.size() && FieldOps<F>::is_zero(m[pr][static_cast<size_t>(col)])) ++pr;
            if (pr == m.size()) continue;
            std::swap(m[rr], m[pr]);
            F inv = FieldOps<F>::one() / m[rr][static_cast<size_t>(col)];
            for (auto& v : m[rr]) v = inv * v;
            for (size_t q = 0; q < m.size(); ++q) {
                if (q == rr) continue;
                F f = m[q][static_cast<size_t>(col)];
                if (FieldOps<F>::is_zero(f)) continue;
                for (size_t cc = 0; cc <= static_cast<size_t>(nu); ++cc)
                    m[q][cc] = m[q][cc] - f * m[rr][cc];
            }
            pivot_col.push_back(col);
            ++rr;
        }
        for (size_t q = rr; q < m.size(); ++q)
            if (!FieldOps<F>::is_zero(m[q][static_cast<size_t>(nu)])) return std::nullopt;  // inconsistent
        std::vector<F> x(static_cast<size_t>(nu), FieldOps<F>::zero());
        for (size_t q = 0; q < pivot_col.size(); ++q) x[static_cast<size_t>(pivot_col[q])] = m[q][static_cast<size_t>(nu)];
        return std::make_pair(x, nu - static_cast<int>(pivot_col.size()));
    };

    bool strict = true;
    auto sol = solve(true);
    if (!sol) {
        strict = false;
        sol = solve(false);
    }
    if (!sol) throw UnsolvableAnsatz("no kernel with pole order <= " + std::to_string(p));
    if (diag) {
        diag->kernel_dimension = sol->second;
        diag->strict_decay = strict;
    }

    for (int id = 0; id < nu; ++id) {
        const F& v = sol->first[static_cast<size_t>(id)];
        if (FieldOps<F>::is_zero(v)) continue;
        const U& u = unknowns[static_cast<size_t>(id)];
        if (u.kind == 0)
            kern.a[static_cast<size_t>(u.i)][static_cast<size_t>(u.j)][{u.s, u.r}].add(u.t, u.w, v);
        else if (u.kind == 1)
            kern.a[static_cast<size_t>(u.i)][static_cast<size_t>(u.j)][{u.s, u.r}].add(v);
        else
            kern.lin[static_cast<size_t>(u.i)][static_cast<size_t>(u.j)].add(u.t, u.w, v);
    }
    return kern;
}

}  // namespace qtr

#endif
