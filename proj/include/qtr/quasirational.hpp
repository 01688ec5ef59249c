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

#ifndef QTR_QUASIRATIONAL_HPP
#define QTR_QUASIRATIONAL_HPP

#include <optional>
#include <utility>
#include <vector>

#include "qtr/ratfunc.hpp"

namespace qtr {

namespace detail {
inline bool near_integer(const Rational& x, long& n) {
    if (denominator(x) != 1) return false;
    if (numerator(x) > 1000000 || numerator(x) < -1000000) return false;
    n = static_cast<long>(numerator(x));
    return true;
}
template <class R>
bool near_integer(const Complex<R>& x, long& n) {
    if (magnitude(Complex<R>(x.im)) > R("1e-30")) return false;
    R r = round(x.re);
    if (magnitude(Complex<R>(x.re - r)) > R("1e-30")) return false;
    n = static_cast<long>(r);
    return true;
}
}  // namespace detail

/// rational * exp(integral of a rational log-derivative).  The exponential
/// factor is only ever used through per-point normalized local expansions
/// (unit value at the expansion point), which is all the residue tests need.
template <class K>
class QuasiRational {
   public:
    QuasiRational() = default;
    explicit QuasiRational(RatFunc<K> rational) : rat_(std::move(rational)) {}
    QuasiRational(RatFunc<K> rational, RatFunc<K> exp_logderiv)
        : rat_(std::move(rational)), logd_(std::move(exp_logderiv)) {}

    const RatFunc<K>& rational_part() const { return rat_; }
    const RatFunc<K>& exp_logderiv() const { return logd_; }
    bool is_zero() const { return rat_.is_zero(); }
    bool is_pure_rational() const { return logd_.is_zero(); }

    /// (pole, residue) certificates recorded for the exponent part.
    struct ResidueRecord {
        K pole;
        K residue;
        bool integer;
    };
    std::vector<ResidueRecord> residue_records;
    bool has_non_integer_residue = false;

    friend QuasiRational operator*(const QuasiRational& a, const QuasiRational& b) {
        QuasiRational r(a.rat_ * b.rat_, a.logd_ + b.logd_);
        return r;
    }
    friend QuasiRational operator*(const RatFunc<K>& a, const QuasiRational& b) {
        return QuasiRational(a * b.rat_, b.logd_);
    }
    friend QuasiRational operator-(const QuasiRational& a) { return QuasiRational(-a.rat_, a.logd_); }
    friend QuasiRational operator+(const QuasiRational& a, const QuasiRational& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.logd_ != b.logd_) throw Error("sum of quasi-rationals with different exponential factors");
        return QuasiRational(a.rat_ + b.rat_, a.logd_);
    }
    friend QuasiRational operator-(const QuasiRational& a, const QuasiRational& b) { return a + (-b); }

    QuasiRational derivative() const {
        return QuasiRational(rat_.derivative() + rat_ * logd_, logd_);
    }

    /// Local Laurent expansion at s with the exponential factor normalized
    /// to unit value at s.  Exact up to that (nonzero) constant.
    LocalSeries<K> local_expand(const K& s, int N) const {
        if (rat_.is_zero()) return LocalSeries<K>::zero_to(s, N);
        auto probe = rat_.local_expand(s, 0);
        int vrat = probe.is_zero() ? 0 : std::min(probe.valuation(), 0);
        int guard = N + 8 - vrat;
        auto lse = logd_.local_expand(s, guard);
        int extra_pow = 0;
        if (!lse.is_zero() && lse.valuation() < 0) {
            if (lse.valuation() < -1) throw EssentialSingularity("exponent part has a higher-order pole");
            long n = 0;
            if (!detail::near_integer(lse.residue(), n))
                throw Error("non-integer exponent residue at expansion point");
            extra_pow = static_cast<int>(n);
            lse = lse - LocalSeries<K>(s, -1, {lse.residue()}, guard);
        }
        auto unit = lse.integrated().exponential();
        return (rat_.local_expand(s, guard) * unit).shifted(extra_pow).truncated(N);
    }

    K residue_at(const K& s) const { return local_expand(s, 0).residue(); }

   private:
    RatFunc<K> rat_;
    RatFunc<K> logd_;
};

template <class K>
QuasiRational<K> derive(const QuasiRational<K>& q) {
    return q.derivative();
}

/// Structure exp(integral r dx) with integer-residue simple poles of r pulled
/// into the rational part (monic linear factors).  Residues are certified at
/// the discovered poles; non-integer residues are recorded, not fatal.
template <class K>
QuasiRational<K> rational_exp_integral(const RatFunc<K>& r, const std::vector<K>& candidate_poles = {}) {
    RatFunc<K> rat = RatFunc<K>::one();
    RatFunc<K> rem = r;
    QuasiRational<K> out;
    std::vector<K> poles;
    if constexpr (FieldOps<K>::exact) {
        RootList roots = rational_roots(r.den(), candidate_poles);
        for (const auto& [p, mult] : roots.roots) {
            (void)mult;
            poles.push_back(p);
        }
    } else {
        poles = candidate_poles;
    }
    for (const auto& p : poles) {
        auto se = r.local_expand(p, 0);
        if (se.is_zero() || se.valuation() >= 0) continue;
        if (se.valuation() < -1) continue;  // essential site, stays in the exponent
        K rho = se.residue();
        long n = 0;
        bool integral = detail::near_integer(rho, n);
        out.residue_records.push_back({p, rho, integral});
        if (!integral) {
            out.has_non_integer_residue = true;
            continue;
        }
        RatFunc<K> lin{Poly<K>::x_minus(p)};
        for (long i = 0; i < (n >= 0 ? n : -n); ++i) rat = (n >= 0) ? rat * lin : rat / lin;
        rem = rem - RatFunc<K>(Poly<K>(rho), Poly<K>::x_minus(p));
    }
    QuasiRational<K> res(rat, rem);
    res.residue_records = out.residue_records;
    res.has_non_integer_residue = out.has_non_integer_residue;
    return res;
}

template <class K>
K residue_at(const QuasiRational<K>& q, const K& s) {
    return q.residue_at(s);
}

template <class K>
K residue_at(const LocalSeries<K>& s) {
    return s.residue();
}

}  // namespace qtr

#endif
