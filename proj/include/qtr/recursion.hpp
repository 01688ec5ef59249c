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

#ifndef QTR_RECURSION_HPP
#define QTR_RECURSION_HPP

#include <algorithm>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "qtr/kernel.hpp"
#include "qtr/sepfrac.hpp"

namespace qtr {

/// Kernel ODE conventions.  Definition form: drift Y_{mu+1} - Y_mu (no
/// degenerate order); Appendix form: drift Y_mu - Y_{mu+1} (degenerate order
/// with a Bethe obstruction and one free coefficient).  rhs scales the
/// G-difference source.
enum class Drift { Definition, Appendix };

struct SignConvention {
    Drift drift = Drift::Appendix;
    Rational rhs = Rational(-1);

    std::string str() const {
        return std::string(drift == Drift::Appendix ? "appendix" : "definition") + "/rhs=" + rhs.str();
    }
};

/// Spectator coefficient tower: partial fractions in the inner variable z1
/// and the outer variable z2 over the shared Bethe-site pole table.
template <class F>
struct Tower {
    using Z1 = PF1<F, F>;
    using K2 = PF1<Z1, F>;

    static K2 from_base(const F& v) { return K2(Z1(v)); }
};

/// How a spectator slot is carried during a recursion step.
template <class F>
struct SpectatorSlot {
    int sheet = 0;  // 0-based
    enum Kind { SymInner, SymOuter, Bound } kind = SymInner;
    F value{};  // for Bound
};

/// Correlator W_{g,n} in pole-sum canonical form: per sheet tuple, a
/// principal-part sum over the Bethe sites in the lead slot (plus the
/// spectator-dependent constant sector), coefficients in the spectator
/// tower.  No higher polynomial part is representable.
template <class F>
struct Correlator {
    using K2 = typename Tower<F>::K2;
    int g = 0, n = 1;
    int d = 1;
    std::vector<PoleFn<K2>> forms;  // indexed by sheet tuple (lead fastest)

    int tuple_index(const std::vector<int>& sheets) const {
        int idx = 0;
        for (auto it = sheets.rbegin(); it != sheets.rend(); ++it) idx = idx * d + *it;
        return idx;
    }
    const PoleFn<K2>& at(const std::vector<int>& sheets) const {
        return forms[static_cast<size_t>(tuple_index(sheets))];
    }
    PoleFn<K2>& at(const std::vector<int>& sheets) { return forms[static_cast<size_t>(tuple_index(sheets))]; }

    friend bool operator==(const Correlator& a, const Correlator& b) {
        if (a.g != b.g || a.n != b.n || a.d != b.d || a.forms.size() != b.forms.size()) return false;
        for (size_t i = 0; i < a.forms.size(); ++i)
            if (!(a.forms[i] - b.forms[i]).is_zero()) return false;
        return true;
    }
};

/// Local series data of the recursion kernel K_mu at one Bethe site, with
/// coefficients rational in x0 (kept in partial-fraction form over the
/// sites).  The obstruction is the residual at the degenerate order.
template <class F>
struct KernelSeries {
    using K2 = typename Tower<F>::K2;
    std::vector<PoleFn<K2>> k;  // k[m] multiplies (x - s)^m
    bool degenerate = false;
    PoleFn<K2> obstruction;
};

template <class F>
class Engine {
   public:
    using Z1 = typename Tower<F>::Z1;
    using K2 = typename Tower<F>::K2;

    Engine(const QuantumCurve<F>& c, const SheetedKernel<F>& G, SignConvention conv, int chi_max)
        : c_(&c), G_(&G), conv_(conv), chi_max_(chi_max) {
        ztab_ = std::make_shared<const std::vector<F>>(G.sites);
    }

    const QuantumCurve<F>& curve() const { return *c_; }
    const SheetedKernel<F>& kernel() const { return *G_; }
    const SignConvention& convention() const { return conv_; }
    int chi_max() const { return chi_max_; }
    int sites() const { return static_cast<int>(G_->sites.size()); }

    /// Free-coefficient gauge of the kernel series (appendix drift only).
    void set_kernel_free_coefficient(const PoleFn<F>& f) {
        free_coeff_ = f;
        tables_.clear();
        sampled_.clear();
        kcache_.clear();
    }
    void set_parallel(bool on) { parallel_ = on; }

    static constexpr int kSeriesOrder = 14;

    K2 from_base(const F& v) const { return Tower<F>::from_base(v); }
    K2 z1_pole(int site, int order, const F& c) const { return K2(Z1::pole(ztab_, site, order, c)); }
    K2 z2_pole(int site, int order, const F& c) const { return K2::pole(ztab_, site, order, Z1(c)); }

    F eval_tower(const K2& v, const F& z1v, const F& z2v) const {
        Z1 flat = v.eval(z2v, [](const F& x) { return Z1(x); });
        return flat.eval(z1v, [](const F& x) { return x; });
    }

    // ----- local series adapters (probe variable x at a Bethe site) -----

    LocalSeries<K2> series_Y(int nu_1based, int site, int N) const {
        return lift_series(
            c_->Y[static_cast<size_t>(nu_1based) - 1].local_expand(G_->sites[static_cast<size_t>(site)], N));
    }

    /// PoleFn of x0, reread as a rational function of the probe x, expanded
    /// locally at a site.
    LocalSeries<F> series_polefn_x(const PoleFn<F>& fn, int site, int N) const {
        const F s = G_->sites[static_cast<size_t>(site)];
        LocalSeries<F> acc = LocalSeries<F>::constant(s, fn.cst, N);
        for (const auto& [key, v] : fn.poles) {
            const F t = G_->sites[static_cast<size_t>(key.first)];
            RatFunc<F> mono(Poly<F>(v), Poly<F>::one());
            RatFunc<F> lin{Poly<F>::x_minus(t)};
            for (int u = 0; u < key.second; ++u) mono = mono / lin;
            acc = acc + mono.local_expand(s, N);
        }
        return acc;
    }

    /// B[i][j](x, z) as a local series in x at a site; the second slot is a
    /// symbolic tower variable or a bound value, per the spectator slot.
    LocalSeries<K2> series_B(int i0b, int j0b, const SpectatorSlot<F>& z, int site, int N) const {
        const F s = G_->sites[static_cast<size_t>(site)];
        const K2 sz = from_base(s);
        LocalSeries<K2> acc = LocalSeries<K2>::zero_to(sz, N);
        auto zslot_inv_pow = [&](int at_site, int order) -> K2 {
            // 1/(z - p_site)^order for the slot's variable or value
            switch (z.kind) {
                case SpectatorSlot<F>::SymInner: return z1_pole(at_site, order, FieldOps<F>::one());
                case SpectatorSlot<F>::SymOuter: return z2_pole(at_site, order, FieldOps<F>::one());
                default: {
                    F den = FieldOps<F>::one();
                    F base = z.value - G_->sites[static_cast<size_t>(at_site)];
                    for (int u = 0; u < order; ++u) den = den * base;
                    return from_base(FieldOps<F>::one() / den);
                }
            }
        };
        {
            // diagonal (d_ij - 1/d)/(x-z)^2 = sum (k+1) t^k / (z-s)^{k+2}
            F proj = G_->projector(i0b, j0b);
            std::vector<K2> cs;
            for (int k = 0; k <= N; ++k) cs.push_back(Z1(k_int<F>(k + 1) * proj) * zslot_inv_pow(site, k + 2));
            acc = acc + LocalSeries<K2>(sz, 0, std::move(cs), N);
        }
        for (const auto& [key, fn] : G_->a[static_cast<size_t>(i0b)][static_cast<size_t>(j0b)]) {
            K2 w = Z1(k_int<F>(-key.second)) * zslot_inv_pow(key.first, key.second + 1);
            acc = acc + w * lift_series(series_polefn_x(fn, site, N));
        }
        const auto& l = G_->lin[static_cast<size_t>(i0b)][static_cast<size_t>(j0b)];
        if (!l.is_zero()) acc = acc + lift_series(series_polefn_x(l, site, N));
        return acc;
    }

    /// Coincident cross-sheet value of W_{0,2}: the diagonal double pole is
    /// removed and the remainder evaluated at equal base points.
    LocalSeries<K2> series_B_coincident(int i0b, int j0b, int site, int N) const {
        const F s = G_->sites[static_cast<size_t>(site)];
        LocalSeries<F> acc = LocalSeries<F>::zero_to(s, N);
        for (const auto& [key, fn] : G_->a[static_cast<size_t>(i0b)][static_cast<size_t>(j0b)]) {
            const F t = G_->sites[static_cast<size_t>(key.first)];
            RatFunc<F> lin{Poly<F>::x_minus(t)};
            RatFunc<F> mono{Poly<F>(k_int<F>(-key.second))};
            for (int u = 0; u <= key.second; ++u) mono = mono / lin;
            acc = acc + (mono.local_expand(s, N + key.second + 2) * series_polefn_x(fn, site, N + key.second + 2))
                            .truncated(N);
        }
        const auto& l = G_->lin[static_cast<size_t>(i0b)][static_cast<size_t>(j0b)];
        if (!l.is_zero()) acc = acc + series_polefn_x(l, site, N);
        return lift_series(acc);
    }

    /// Pole-sum in the lead variable, expanded locally at a site; `bind`
    /// optionally evaluates the spectator variables.
    LocalSeries<K2> series_polesum(const PoleFn<K2>& f, int site, int N,
                                   const std::optional<std::pair<std::optional<F>, std::optional<F>>>& bind =
                                       std::nullopt) const {
        const F s = G_->sites[static_cast<size_t>(site)];
        const K2 sz = from_base(s);
        LocalSeries<K2> acc = LocalSeries<K2>::zero_to(sz, N);
        for (const auto& [key, v] : f.poles) {
            K2 c = bind ? bind_coeff(v, *bind) : v;
            acc = acc + c * monomial_series(G_->sites[static_cast<size_t>(key.first)], key.second, site, N);
        }
        if (!FieldOps<K2>::is_zero(f.cst))
            acc = acc + LocalSeries<K2>::constant(sz, bind ? bind_coeff(f.cst, *bind) : f.cst, N);
        return acc;
    }

    /// Stored correlator, lead slot expanded at a site.  Spectators are read
    /// as (z1, z2) in storage order.
    LocalSeries<K2> series_entry(const Correlator<F>& e, const std::vector<int>& sheets, int site, int N,
                                 const std::optional<std::pair<std::optional<F>, std::optional<F>>>& bind =
                                     std::nullopt) const {
        return series_polesum(e.at(sheets), site, N, bind);
    }

    /// Stored correlator with the inner spectator substituted to the probe
    /// variable (equal-base-point slots in different sheets).
    LocalSeries<K2> series_entry_substituted(const Correlator<F>& e, const std::vector<int>& sheets, int site,
                                             int N) const {
        const F s = G_->sites[static_cast<size_t>(site)];
        const K2 sz = from_base(s);
        const PoleFn<K2>& f = e.at(sheets);
        LocalSeries<K2> acc = LocalSeries<K2>::zero_to(sz, N);
        for (const auto& [key, v] : f.poles) {
            LocalSeries<K2> c = subst_inner(v, site, N + key.second + 2);
            acc = acc + (c * monomial_series(G_->sites[static_cast<size_t>(key.first)], key.second, site,
                                             N + key.second + 2))
                            .truncated(N);
        }
        if (!FieldOps<K2>::is_zero(f.cst)) acc = acc + subst_inner(f.cst, site, N).truncated(N);
        return acc;
    }

    // ----- kernel series -----

    /// Local power-series solution of the kernel ODE
    ///   (drift + Q d/dx) K = rhs * (G[i0][mu+1] - G[i0][mu])
    /// at a Bethe site, to pair against poles of order M+1.  Under the
    /// appendix drift the degenerate order carries the Bethe obstruction
    /// (BetheViolation if nonzero) and the free coefficient gauge.
    KernelSeries<F> kernel_series(int i0b, int site, int M) const {
        KernelSeries<F> out;
        const F s = G_->sites[static_cast<size_t>(site)];
        const int mu = G_->site_sheet[static_cast<size_t>(site)];
        const int N = std::max(M + 2, kSeriesOrder);

        RatFunc<F> driftF = c_->Y[static_cast<size_t>(mu) - 1] - c_->Y[static_cast<size_t>(mu)];
        if (conv_.drift == Drift::Definition) driftF = -driftF;
        auto A = driftF.local_expand(s, N);
        if (A.is_zero() || A.valuation() != -1) throw Error("kernel drift lacks the simple pole at the site");
        const F am1 = A.coeff(-1);
        const F Q = c_->Q;

        // rhs series; components below t^{-1} must cancel between the two
        // sheets of the G-difference (checked after assembly)
        F cscale = rat_to_F(conv_.rhs);
        const int roff = 4;
        std::vector<PoleFn<K2>> r(static_cast<size_t>(N + roff) + 2);
        auto radd = [&](int j, const PoleFn<K2>& v) {
            if (j > N) return;
            r[static_cast<size_t>(j + roff)] = r[static_cast<size_t>(j + roff)] + v;
        };
        F sigma = FieldOps<F>::zero();
        if (i0b + 1 == mu) sigma = FieldOps<F>::one();
        if (i0b + 1 == mu + 1) sigma = sigma - FieldOps<F>::one();
        if (!FieldOps<F>::is_zero(sigma)) {
            for (int m = 0; m <= N; ++m) {
                PoleFn<K2> t;
                t.add(site, m + 1, from_base(-(cscale * sigma)));
                radd(m, t);
            }
        }
        for (int which = 0; which < 2; ++which) {
            int nu2 = (which == 0) ? mu : mu - 1;  // 0-based second sheet
            F sgn = (which == 0) ? cscale : -cscale;
            for (const auto& [key, fn] : G_->a[static_cast<size_t>(i0b)][static_cast<size_t>(nu2)]) {
                if (key.second > roff - 1) throw Error("kernel source pole order beyond supported range");
                auto mono = monomial_series_base(G_->sites[static_cast<size_t>(key.first)], key.second, s, N);
                PoleFn<K2> lifted = lift_polefn(fn);
                for (int j = mono.is_zero() ? N + 1 : mono.valuation(); j <= std::min(N, mono.order_certified());
                     ++j) {
                    F w = sgn * mono.coeff(j);
                    if (!FieldOps<F>::is_zero(w)) radd(j, scale(w, lifted));
                }
            }
            const auto& l = G_->lin[static_cast<size_t>(i0b)][static_cast<size_t>(nu2)];
            if (!l.is_zero()) {
                PoleFn<K2> lifted = lift_polefn(l);
                radd(0, scale(sgn * s, lifted));
                radd(1, scale(sgn, lifted));
            }
            const auto& cs = G_->cshift[static_cast<size_t>(i0b)][static_cast<size_t>(nu2)];
            if (!cs.is_zero()) radd(0, scale(sgn, lift_polefn(cs)));
        }
        for (int j = -roff; j < -1; ++j)
            if (!r[static_cast<size_t>(j + roff)].is_zero())
                throw BetheViolation("source has an order-" + std::to_string(-j) + " pole at site " +
                                         std::to_string(site),
                                     "no analytic kernel");

        // series solve: (am1/t + sum a_j t^j + Q d) K = r
        out.k.assign(static_cast<size_t>(M) + 1, PoleFn<K2>{});
        auto kset = [&](int m, const PoleFn<K2>& v) {
            if (m <= M) out.k[static_cast<size_t>(m)] = v;
        };
        PoleFn<K2> k0 = scale(FieldOps<F>::one() / am1, r[roff - 1]);
        kset(0, k0);
        std::vector<PoleFn<K2>> kv{k0};
        for (int m = 0; m < std::max(M, 2) + 1; ++m) {
            F lead = am1 + Q * k_int<F>(m + 1);
            PoleFn<K2> acc = r[static_cast<size_t>(m + roff)];
            for (int j = 0; j <= m; ++j) {
                F aj = (j <= A.order_certified()) ? A.coeff(j) : FieldOps<F>::zero();
                if (FieldOps<F>::is_zero(aj)) continue;
                acc = acc - scale(aj, kv[static_cast<size_t>(m - j)]);
            }
            PoleFn<K2> next;
            if (FieldOps<F>::is_zero(lead)) {
                out.degenerate = true;
                out.obstruction = acc;
                if (!acc.is_zero()) throw BetheViolation("at site " + std::to_string(site), polefn_str(acc));
                next = lift_polefn(free_coeff_);
            } else {
                next = scale(FieldOps<F>::one() / lead, acc);
            }
            kv.push_back(next);
            kset(m + 1, next);
        }
        return out;
    }

    // ----- the recursion -----

    const Correlator<F>& W(int g, int n) {
        if (g == 0 && n <= 2) throw Error("base cases are served structurally");
        if (2 * g - 2 + n > chi_max_) throw BudgetExceeded("W_{" + std::to_string(g) + "," + std::to_string(n) + "}");
        auto key = std::make_pair(g, n);
        auto it = tables_.find(key);
        if (it != tables_.end()) return it->second;
        compute(g, n);
        it = tables_.find(key);
        if (it == tables_.end()) throw MissingEntry("W_{" + std::to_string(g) + "," + std::to_string(n) + "}");
        return it->second;
    }

    /// Sampled variant for entries with more than two spectators.
    const Correlator<F>& W_sampled(int g, int n, const std::vector<F>& values) {
        if (2 * g - 2 + n > chi_max_) throw BudgetExceeded("sampled W");
        auto key = std::make_tuple(g, n, values_key(values));
        auto it = sampled_.find(key);
        if (it != sampled_.end()) return it->second;
        if (!(g == 0 && n == 4)) throw Error("sampled mode is provided for W_{0,4}");
        std::vector<SpectatorSlot<F>> spec(3);
        for (int i = 0; i < 3; ++i) {
            spec[static_cast<size_t>(i)].kind = SpectatorSlot<F>::Bound;
            spec[static_cast<size_t>(i)].value = values[static_cast<size_t>(i)];
        }
        Correlator<F> out = tr_step(0, 4, spec);
        auto res = sampled_.emplace(key, std::move(out));
        return res.first->second;
    }

    /// Fill every symbolic entry with 2g-2+n <= chi_max.
    void recurse() {
        for (int chi = 1; chi <= chi_max_; ++chi)
            for (int g = 0; 2 * g <= chi + 1; ++g) {
                int n = chi + 2 - 2 * g;
                if (n < 1) continue;
                if (n - 1 <= 2) (void)W(g, n);
            }
    }

    struct StepCache {
        std::map<std::tuple<int, int, long>, LocalSeries<K2>> b;
        std::map<int, LocalSeries<K2>> y;
    };

    /// One recursion step: the residue sum at the Bethe sites.  The bracket
    /// is independent of the lead sheet and shared across it.
    Correlator<F> tr_step(int g, int n_out, const std::vector<SpectatorSlot<F>>& spec) {
        Correlator<F> out;
        out.g = g;
        out.n = n_out;
        out.d = c_->d;
        size_t ntuple = 1;
        for (int i = 0; i < n_out; ++i) ntuple *= static_cast<size_t>(c_->d);
        out.forms.assign(ntuple, PoleFn<K2>{});

        const int nspec = n_out - 1;
        const int nsite = sites();
        bool remap = nspec >= 1 && spec[0].kind == SpectatorSlot<F>::SymOuter;

        std::vector<int> iter(static_cast<size_t>(nspec), 0);
        while (true) {
            std::vector<SpectatorSlot<F>> slots = spec;
            for (int i = 0; i < nspec; ++i) slots[static_cast<size_t>(i)].sheet = iter[static_cast<size_t>(i)];

            std::vector<PoleFn<K2>> acc(static_cast<size_t>(c_->d));
            auto work = [&](int site) {
                std::vector<PoleFn<K2>> part(static_cast<size_t>(c_->d));
                StepCache sc;
                LocalSeries<K2> phi = bracket_series(g, slots, site, kSeriesOrder, sc);
                if (phi.is_zero()) return part;
                int M = -1 - phi.valuation();
                if (M < 0) return part;
                for (int i0 = 0; i0 < c_->d; ++i0) {
                    const auto& K = kernel_series_cached(i0, site, M);
                    for (int m = 0; m <= M; ++m) {
                        K2 cphi = phi.coeff(-1 - m);
                        if (FieldOps<K2>::is_zero(cphi)) continue;
                        part[static_cast<size_t>(i0)] =
                            part[static_cast<size_t>(i0)] + cphi * K.k[static_cast<size_t>(m)];
                    }
                }
                return part;
            };
            std::vector<std::vector<PoleFn<K2>>> parts(static_cast<size_t>(nsite));
            if (parallel_ && nsite > 1) {
                parts[0] = work(0);  // materializes lower entries and caches
                std::vector<std::future<std::vector<PoleFn<K2>>>> fut;
                for (int s = 1; s < nsite; ++s)
                    fut.push_back(std::async(std::launch::async, [&, s] { return work(s); }));
                for (int s = 1; s < nsite; ++s) parts[static_cast<size_t>(s)] = fut[static_cast<size_t>(s) - 1].get();
            } else {
                for (int s = 0; s < nsite; ++s) parts[static_cast<size_t>(s)] = work(s);
            }
            for (int s = 0; s < nsite; ++s)  // reduction in sorted-site order
                for (int i0 = 0; i0 < c_->d; ++i0)
                    acc[static_cast<size_t>(i0)] =
                        acc[static_cast<size_t>(i0)] + parts[static_cast<size_t>(s)][static_cast<size_t>(i0)];

            for (int i0 = 0; i0 < c_->d; ++i0) {
                std::vector<int> tuple{i0};
                for (int i = 0; i < nspec; ++i) tuple.push_back(iter[static_cast<size_t>(i)]);
                out.at(tuple) = remap ? remap_outer(acc[static_cast<size_t>(i0)]) : acc[static_cast<size_t>(i0)];
            }
            int pos = 0;
            while (pos < nspec) {
                if (++iter[static_cast<size_t>(pos)] < c_->d) break;
                iter[static_cast<size_t>(pos)] = 0;
                ++pos;
            }
            if (pos == nspec || nspec == 0) break;
        }
        return out;
    }

    /// Evaluate a stored entry at sample points (lead, z1, z2).
    F eval_entry(const Correlator<F>& e, const std::vector<int>& sheets, const F& x0, const F& z1v,
                 const F& z2v) const {
        const PoleFn<K2>& f = e.at(sheets);
        K2 acc = f.cst;
        for (const auto& [k, v] : f.poles) {
            F den = FieldOps<F>::one();
            F base = x0 - G_->sites[static_cast<size_t>(k.first)];
            for (int u = 0; u < k.second; ++u) den = den * base;
            acc = acc + Z1(FieldOps<F>::one() / den) * v;
        }
        return eval_tower(acc, z1v, z2v);
    }

    PoleFn<K2> lift_polefn(const PoleFn<F>& f) const {
        PoleFn<K2> r;
        r.cst = from_base(f.cst);
        for (const auto& [k, v] : f.poles) r.poles[k] = from_base(v);
        return r;
    }

    /// d/dx0 of a pole-sum in its lead variable.
    static PoleFn<K2> derive_lead(const PoleFn<K2>& f) {
        PoleFn<K2> r;
        for (const auto& [k, v] : f.poles) r.poles[{k.first, k.second + 1}] = Z1(k_int<F>(-k.second)) * v;
        return r;
    }

    /// exchange the roles of the two spectator variables in a coefficient
    K2 swap12(const K2& v) const {
        K2 out(Z1(v.cst().cst()));
        for (const auto& [k1, c1] : v.cst().poles())  // z1-only part -> z2
            out = out + K2::pole(ztab_, k1.first, k1.second, Z1(c1));
        for (const auto& [k2, z] : v.poles()) {
            out = out + K2(Z1::pole(ztab_, k2.first, k2.second, z.cst()));  // z2-only -> z1
            for (const auto& [k1, c] : z.poles())
                out = out + K2::pole(ztab_, k1.first, k1.second, Z1::pole(ztab_, k2.first, k2.second, c));
        }
        return out;
    }

    PoleFn<K2> swap12(const PoleFn<K2>& f) const {
        PoleFn<K2> r;
        r.cst = swap12(f.cst);
        for (const auto& [k, v] : f.poles) r.poles[k] = swap12(v);
        return r;
    }

    LocalSeries<K2> lift_series(const LocalSeries<F>& s) const {
        std::vector<K2> c;
        int lo = s.is_zero() ? s.order_certified() + 1 : s.valuation();
        for (int j = lo; j <= s.order_certified(); ++j) c.push_back(from_base(s.coeff(j)));
        return LocalSeries<K2>(from_base(s.point()), lo, std::move(c), s.order_certified());
    }

    /// kernel series cache, grown on demand (thread-safe)
    const KernelSeries<F>& kernel_series_cached(int i0, int site, int M) const {
        std::lock_guard<std::mutex> lock(cache_mu_);
        auto key = std::make_pair(i0, site);
        auto it = kcache_.find(key);
        if (it == kcache_.end() || static_cast<int>(it->second.k.size()) < M + 1)
            it = kcache_.insert_or_assign(key, kernel_series(i0, site, std::max(M, 8))).first;
        return it->second;
    }

   private:
    const QuantumCurve<F>* c_;
    const SheetedKernel<F>* G_;
    SignConvention conv_;
    int chi_max_;
    bool parallel_ = false;
    PoleFn<F> free_coeff_;
    std::shared_ptr<const std::vector<F>> ztab_;
    std::map<std::pair<int, int>, Correlator<F>> tables_;
    std::map<std::tuple<int, int, std::string>, Correlator<F>> sampled_;
    mutable std::mutex cache_mu_;
    mutable std::map<std::pair<int, int>, KernelSeries<F>> kcache_;

    static F rat_to_F(const Rational& q) {
        return k_int<F>(static_cast<long>(numerator(q))) / k_int<F>(static_cast<long>(denominator(q)));
    }
    static std::string polefn_str(const PoleFn<K2>& f) {
        std::string s = "components:";
        for (const auto& [k, v] : f.poles) {
            (void)v;
            s += " (site " + std::to_string(k.first) + ", order " + std::to_string(k.second) + ")";
        }
        return s;
    }
    std::string values_key(const std::vector<F>& vals) const {
        std::string s;
        for (const auto& v : vals) s += FieldOps<F>::str(v) + ";";
        return s;
    }
    PoleFn<K2> scale(const F& s, const PoleFn<K2>& f) const {
        K2 k = from_base(s);
        return k * f;
    }

    LocalSeries<F> monomial_series_base(const F& t, int k, const F& s, int N) const {
        RatFunc<F> mono = RatFunc<F>::one();
        RatFunc<F> lin{Poly<F>::x_minus(t)};
        for (int u = 0; u < k; ++u) mono = mono / lin;
        return mono.local_expand(s, N);
    }
    LocalSeries<K2> monomial_series(const F& t, int k, int site, int N) const {
        return lift_series(monomial_series_base(t, k, G_->sites[static_cast<size_t>(site)], N));
    }

    /// bind spectator values into a tower coefficient
    K2 bind_coeff(const K2& v, const std::pair<std::optional<F>, std::optional<F>>& bind) const {
        K2 r = v;
        if (bind.second) {
            Z1 flat = r.eval(*bind.second, [](const F& x) { return Z1(x); });
            r = K2(flat);
        }
        if (bind.first) {
            // evaluate the inner variable in every coefficient
            K2 out(Z1(r.cst().eval(*bind.first, [](const F& x) { return x; })));
            for (const auto& [k, v2] : r.poles()) {
                F c = v2.eval(*bind.first, [](const F& x) { return x; });
                out = out + K2::pole(ztab_, k.first, k.second, Z1(c));
            }
            r = out;
        }
        return r;
    }

    /// substitute z1 -> s + t into a tower coefficient, as a Laurent series
    LocalSeries<K2> subst_inner(const K2& v, int site, int N) const {
        const F s = G_->sites[static_cast<size_t>(site)];
        const K2 sz = from_base(s);
        // per z2-component, expand the z1 part
        auto expand_z1 = [&](const Z1& c) {
            auto [lo, cf] = c.substituted(s, N, site);
            return std::make_pair(lo, std::move(cf));
        };
        LocalSeries<K2> acc = LocalSeries<K2>::zero_to(sz, N);
        {
            auto [lo, cf] = expand_z1(v.cst());
            std::vector<K2> kc;
            kc.reserve(cf.size());
            for (const auto& x : cf) kc.push_back(from_base(x));
            acc = acc + LocalSeries<K2>(sz, lo, std::move(kc), N);
        }
        for (const auto& [k, c] : v.poles()) {
            auto [lo, cf] = expand_z1(c);
            std::vector<K2> kc;
            kc.reserve(cf.size());
            for (const auto& x : cf) kc.push_back(z2_pole(k.first, k.second, x));
            acc = acc + LocalSeries<K2>(sz, lo, std::move(kc), N);
        }
        return acc;
    }

    /// rewrite a z1-free pole sum so its z2 dependence lives in z1
    PoleFn<K2> remap_outer(const PoleFn<K2>& f) const {
        auto conv = [&](const K2& v) {
            Z1 r(v.cst().cst());
            for (const auto& [k, c] : v.poles()) {
                if (!c.poles().empty()) throw Error("coefficient unexpectedly depends on z1");
                r = r + Z1::pole(ztab_, k.first, k.second, c.cst());
            }
            if (!v.cst().poles().empty()) throw Error("coefficient unexpectedly depends on z1");
            return K2(r);
        };
        PoleFn<K2> r;
        r.cst = FieldOps<K2>::is_zero(f.cst) ? f.cst : conv(f.cst);
        for (const auto& [k, v] : f.poles) r.poles[k] = conv(v);
        return r;
    }

    /// The bracket of the recursion at one site: W_{g-1,n+2} at coincident
    /// cross-sheet points plus the primed product sum.
    LocalSeries<K2> bracket_series(int g, const std::vector<SpectatorSlot<F>>& spec, int site, int N,
                                   StepCache& sc) {
        const int mu = G_->site_sheet[static_cast<size_t>(site)];
        const int shA = mu;      // 0-based sheet mu+1
        const int shB = mu - 1;  // 0-based sheet mu
        const K2 sz = from_base(G_->sites[static_cast<size_t>(site)]);
        const int nspec = static_cast<int>(spec.size());
        LocalSeries<K2> acc = LocalSeries<K2>::zero_to(sz, N);

        if (g >= 1) {
            if (g - 1 == 0 && nspec + 2 == 2) {
                acc = acc + series_B_coincident(shA, shB, site, N);
            } else {
                const Correlator<F>& e = W(g - 1, nspec + 2);
                std::vector<int> sheets{shA, shB};
                for (const auto& sp : spec) sheets.push_back(sp.sheet);
                acc = acc + series_entry_substituted(e, sheets, site, N);
            }
        }

        const int splits = 1 << nspec;
        for (int h = 0; h <= g; ++h)
            for (int mask = 0; mask < splits; ++mask) {
                int szI = __builtin_popcount(static_cast<unsigned>(mask));
                int h2 = g - h;
                int szI2 = nspec - szI;
                if (h == 0 && szI == 0) continue;
                if (h2 == 0 && szI2 == 0) continue;
                auto fac = factor_series(h, szI + 1, shA, spec, mask, site, N, sc);
                auto fac2 = factor_series(h2, szI2 + 1, shB, spec, ~mask & (splits - 1), site, N, sc);
                acc = acc + (fac * fac2).truncated(N);
            }
        return acc;
    }

    /// W_h(x-hat^{sheet}, I) as a local series at a site, I given by mask.
    LocalSeries<K2> factor_series(int h, int nslots, int sheet0b, const std::vector<SpectatorSlot<F>>& spec,
                                  int mask, int site, int N, StepCache& sc) {
        std::vector<const SpectatorSlot<F>*> sel;
        for (size_t i = 0; i < spec.size(); ++i)
            if (mask & (1 << i)) sel.push_back(&spec[i]);
        if (h == 0 && nslots == 1) {
            auto it = sc.y.find(sheet0b);
            if (it == sc.y.end()) it = sc.y.emplace(sheet0b, series_Y(sheet0b + 1, site, N)).first;
            return it->second;
        }
        if (h == 0 && nslots == 2) {
            long sid = sel[0] - spec.data();
            auto key = std::make_tuple(sheet0b, sel[0]->sheet, sid);
            auto it = sc.b.find(key);
            if (it == sc.b.end()) it = sc.b.emplace(key, series_B(sheet0b, sel[0]->sheet, *sel[0], site, N)).first;
            return it->second;
        }
        const Correlator<F>& e = W(h, nslots);
        std::vector<int> sheets{sheet0b};
        std::optional<F> b1, b2;
        for (size_t i = 0; i < sel.size(); ++i) {
            sheets.push_back(sel[i]->sheet);
            if (sel[i]->kind == SpectatorSlot<F>::Bound) {
                if (i == 0)
                    b1 = sel[i]->value;
                else
                    b2 = sel[i]->value;
            }
        }
        if (b1 || b2) return series_entry(e, sheets, site, N, std::make_pair(b1, b2));
        return series_entry(e, sheets, site, N);
    }

    void compute(int g, int n) {
        std::vector<SpectatorSlot<F>> spec;
        int nspec = n - 1;
        if (nspec > 2) throw Error("symbolic entries carry at most two spectators");
        bool needs_subst_entry = g >= 1 && (nspec + 2) > 2;
        for (int i = 0; i < nspec; ++i) {
            SpectatorSlot<F> sp;
            if (needs_subst_entry) {
                if (i == 0)
                    sp.kind = SpectatorSlot<F>::SymOuter;
                else
                    throw Error("one spectator supported alongside a substituted entry");
            } else {
                sp.kind = (i == 0) ? SpectatorSlot<F>::SymInner : SpectatorSlot<F>::SymOuter;
            }
            spec.push_back(sp);
        }
        tables_.emplace(std::make_pair(g, n), tr_step(g, n, spec));
    }
};

}  // namespace qtr

#endif
