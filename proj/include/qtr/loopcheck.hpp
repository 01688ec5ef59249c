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

#ifndef QTR_LOOPCHECK_HPP
#define QTR_LOOPCHECK_HPP

#include <string>
#include <vector>

#include "qtr/recursion.hpp"

namespace qtr {

struct LoopReport {
    bool pass = true;
    struct Item {
        std::string name;
        bool ok;
        std::string detail;
    };
    std::vector<Item> items;

    void add(const std::string& name, bool ok, const std::string& detail = "") {
        items.push_back({name, ok, detail});
        pass = pass && ok;
    }
};

/// Assembles the linear (k=0) and quadratic (k=1) loop combinations from
/// computed correlators and verifies the holomorphy claims at the Bethe
/// roots.  Nothing is re-derived: the combinations are read from the table.
template <class F>
class LoopChecker {
   public:
    using K2 = typename Tower<F>::K2;
    using Z1 = typename Tower<F>::Z1;

    explicit LoopChecker(Engine<F>& eng) : e_(&eng) {}

    /// P^{(g)}_{n;0}: the sheet sum of W_{g,n+1} vanishes identically.
    bool check_P0(int g, int n, const std::vector<F>* samples = nullptr) {
        const int d = e_->curve().d;
        if (g == 0 && n + 1 == 2) {
            // sum_i B[i][j] = 0, structurally from the kernel data
            const auto& kern = e_->kernel();
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
                    if (!fn.is_zero()) return false;
                if (!ltot.is_zero()) return false;
            }
            return true;
        }
        const Correlator<F>& w = samples ? e_->W_sampled(g, n + 1, *samples) : e_->W(g, n + 1);
        std::vector<int> iter(static_cast<size_t>(n), 0);
        while (true) {
            PoleFn<K2> acc;
            for (int i0 = 0; i0 < d; ++i0) {
                std::vector<int> tuple{i0};
                for (int q = 0; q < n; ++q) tuple.push_back(iter[static_cast<size_t>(q)]);
                acc = acc + w.at(tuple);
            }
            if (!acc.is_zero()) return false;
            int pos = 0;
            while (pos < n) {
                if (++iter[static_cast<size_t>(pos)] < d) break;
                iter[static_cast<size_t>(pos)] = 0;
                ++pos;
            }
            if (pos == n || n == 0) break;
        }
        return true;
    }

    /// P^{(g)}_{n;1}: principal parts at every Bethe root vanish.
    /// Supported shapes: (0,1), (0,2), (1,0), (1,1) symbolic; (0,3) sampled.
    bool check_P1(int g, int n, const std::vector<F>* samples = nullptr) {
        const int d = e_->curve().d;
        std::vector<int> iter(static_cast<size_t>(n), 0);
        while (true) {
            for (int site = 0; site < e_->sites(); ++site) {
                auto series = assemble_P1(g, n, iter, site, samples);
                if (!series.is_zero() && series.valuation() < 0) {
                    for (int j = series.valuation(); j < 0; ++j)
                        if (!FieldOps<K2>::is_zero(series.coeff(j))) return false;
                }
            }
            int pos = 0;
            while (pos < n) {
                if (++iter[static_cast<size_t>(pos)] < d) break;
                iter[static_cast<size_t>(pos)] = 0;
                ++pos;
            }
            if (pos == n || n == 0) break;
        }
        return true;
    }

    /// Full suite over everything computable at the engine's budget.
    LoopReport run(const std::vector<F>* w04_samples = nullptr) {
        LoopReport rep;
        const int chi = e_->chi_max();
        auto nm = [](int g, int n, int k) {
            return "P^(" + std::to_string(g) + ")_{" + std::to_string(n) + ";" + std::to_string(k) + "}";
        };
        for (int g = 0; g <= 1; ++g)
            for (int n = 0; n <= 3; ++n) {
                if (g == 0 && n == 0) continue;  // no W_{0,1}-level identity beyond the trace
                int need = 2 * g - 1 + n;        // complexity of W_{g,n+1}
                if (need > chi) continue;
                bool sampled = n + 1 > 3;
                if (sampled && !w04_samples) continue;
                if (sampled && !(g == 0 && n == 3)) continue;
                const std::vector<F>* sm = sampled ? w04_samples : nullptr;
                rep.add(nm(g, n, 0), check_P0(g, n, sm));
                rep.add(nm(g, n, 1), check_P1(g, n, sm));
            }
        return rep;
    }

   private:
    Engine<F>* e_;

    /// local series of W_h(x-hat^{sheet}, I) for the unprimed product sum
    LocalSeries<K2> factor(int h, int sheet, const std::vector<int>& specsheets, int mask, int site, int N,
                           const std::vector<F>* samples, bool swap_stored) {
        int nsel = __builtin_popcount(static_cast<unsigned>(mask));
        if (h == 0 && nsel == 0) return e_->series_Y(sheet + 1, site, N);
        std::vector<int> selsheets;
        std::vector<int> selidx;
        for (size_t q = 0; q < specsheets.size(); ++q)
            if (mask & (1 << q)) {
                selsheets.push_back(specsheets[q]);
                selidx.push_back(static_cast<int>(q));
            }
        if (h == 0 && nsel == 1) {
            SpectatorSlot<F> z;
            z.sheet = selsheets[0];
            if (samples) {
                z.kind = SpectatorSlot<F>::Bound;
                z.value = (*samples)[static_cast<size_t>(selidx[0])];
            } else {
                z.kind = swap_stored ? SpectatorSlot<F>::SymOuter : (selidx[0] == 0 ? SpectatorSlot<F>::SymInner
                                                                                    : SpectatorSlot<F>::SymOuter);
            }
            return e_->series_B(sheet, z.sheet, z, site, N);
        }
        // stored entry
        const Correlator<F>& w = (samples && h == 0 && nsel == 3) ? e_->W_sampled(h, nsel + 1, *samples)
                                                                  : e_->W(h, nsel + 1);
        std::vector<int> sheets{sheet};
        for (int s : selsheets) sheets.push_back(s);
        std::optional<F> b1, b2;
        if (samples) {
            if (!(h == 0 && nsel == 3)) {
                if (nsel >= 1) b1 = (*samples)[static_cast<size_t>(selidx[0])];
                if (nsel >= 2) b2 = (*samples)[static_cast<size_t>(selidx[1])];
            }
            return e_->series_polesum(w.at(sheets), site, N,
                                      b1 || b2 ? std::make_optional(std::make_pair(b1, b2)) : std::nullopt);
        }
        PoleFn<K2> form = w.at(sheets);
        if (swap_stored && nsel >= 1) form = e_->swap12(form);
        return e_->series_polesum(form, site, N);
    }

    LocalSeries<K2> assemble_P1(int g, int n, const std::vector<int>& specsheets, int site,
                                const std::vector<F>* samples) {
        const int d = e_->curve().d;
        const int N = Engine<F>::kSeriesOrder;
        const F s = e_->kernel().sites[static_cast<size_t>(site)];
        const K2 sz = e_->from_base(s);
        LocalSeries<K2> acc = LocalSeries<K2>::zero_to(sz, N);
        // the (1,1) case routes its lone spectator through z2 so the
        // substituted (0,3) entry can use z1 for the coincident slot
        bool swap_stored = (g == 1 && n == 1 && !samples);

        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                if (g >= 1) {
                    if (g - 1 == 0 && n + 2 == 2) {
                        acc = acc + e_->series_B_coincident(i, j, site, N);
                    } else {
                        const Correlator<F>& w = e_->W(g - 1, n + 2);
                        std::vector<int> sheets{i, j};
                        for (int q : specsheets) sheets.push_back(q);
                        acc = acc + e_->series_entry_substituted(w, sheets, site, N);
                    }
                }
                const int splits = 1 << n;
                for (int h = 0; h <= g; ++h)
                    for (int mask = 0; mask < splits; ++mask) {
                        auto f1 = factor(h, i, specsheets, mask, site, N, samples, swap_stored);
                        auto f2 = factor(g - h, j, specsheets, ~mask & (splits - 1), site, N, samples, swap_stored);
                        acc = acc + (f1 * f2).truncated(N);
                    }
            }
        // - Q sum_{i=2}^d (i-1) d/dx W_{g,n+1}(x-hat^i, X)
        for (int i = 2; i <= d; ++i) {
            LocalSeries<K2> ds = deriv_entry_series(g, n, i - 1, specsheets, site, N, samples, swap_stored);
            acc = acc - e_->from_base(e_->curve().Q * k_int<F>(i - 1)) * ds;
        }
        return acc;
    }

    LocalSeries<K2> deriv_entry_series(int g, int n, int sheet, const std::vector<int>& specsheets, int site, int N,
                                       const std::vector<F>* samples, bool swap_stored) {
        if (g == 0 && n + 1 == 2) {
            SpectatorSlot<F> z;
            z.sheet = specsheets[0];
            if (samples) {
                z.kind = SpectatorSlot<F>::Bound;
                z.value = (*samples)[0];
            } else {
                z.kind = SpectatorSlot<F>::SymInner;
            }
            return e_->series_B(sheet, z.sheet, z, site, N + 1).derivative();
        }
        const Correlator<F>& w = samples ? e_->W_sampled(g, n + 1, *samples) : e_->W(g, n + 1);
        std::vector<int> sheets{sheet};
        for (int q : specsheets) sheets.push_back(q);
        PoleFn<K2> form = w.at(sheets);
        if (swap_stored && n >= 1 && !samples) form = e_->swap12(form);
        form = Engine<F>::derive_lead(form);
        std::optional<std::pair<std::optional<F>, std::optional<F>>> bind;
        if (samples && !(g == 0 && n + 1 == 4)) {
            std::optional<F> b1 = n >= 1 ? std::make_optional((*samples)[0]) : std::nullopt;
            std::optional<F> b2 = n >= 2 ? std::make_optional((*samples)[1]) : std::nullopt;
            bind = std::make_pair(b1, b2);
        }
        return e_->series_polesum(form, site, N, bind);
    }
};

struct ConventionResolution {
    SignConvention chosen;
    std::vector<std::string> tried;  // human-readable outcomes
};

/// Runs chi_max = 1 under every candidate kernel convention and returns the
/// unique one passing the loop equations.
template <class F>
ConventionResolution resolve_convention(const QuantumCurve<F>& c, const SheetedKernel<F>& G) {
    std::vector<SignConvention> cands;
    for (Drift dr : {Drift::Definition, Drift::Appendix})
        for (Rational rhs : {Rational(1), Rational(1, 2), Rational(-1), Rational(-1, 2)})
            cands.push_back({dr, rhs});
    ConventionResolution out;
    std::vector<SignConvention> passing;
    for (const auto& cv : cands) {
        bool ok = true;
        std::string note;
        try {
            Engine<F> eng(c, G, cv, 1);
            eng.recurse();
            LoopChecker<F> lc(eng);
            ok = lc.check_P0(0, 2) && lc.check_P1(0, 2) && lc.check_P0(1, 0) && lc.check_P1(1, 0);
        } catch (const Error& err) {
            ok = false;
            note = err.what();
        }
        out.tried.push_back(cv.str() + " -> " + (ok ? "pass" : ("fail " + note)));
        if (ok) passing.push_back(cv);
    }
    if (passing.empty()) throw NoValidConvention("none of the eight drift/rhs candidates passes");
    if (passing.size() > 1) {
        std::string all;
        for (auto& p : passing) all += p.str() + " ";
        throw AmbiguousConvention(all);
    }
    out.chosen = passing[0];
    return out;
}

}  // namespace qtr

#endif
