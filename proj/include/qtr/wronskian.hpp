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

#ifndef QTR_WRONSKIAN_HPP
#define QTR_WRONSKIAN_HPP

#include <memory>
#include <vector>

#include "qtr/diffop.hpp"
#include "qtr/diffsym.hpp"

namespace qtr {

/// Differential fraction whose denominator is a monomial in a fixed list of
/// atom polynomials (the Wronskian minors D_mu).  Common denominators are
/// taken by exponent maxima, which keeps the solution-determinant checks
/// polynomial-sized without multivariate gcd.
template <class K0>
class AtomFrac {
   public:
    using Atoms = std::vector<DiffPoly<K0>>;

    AtomFrac() = default;
    explicit AtomFrac(K0 c) : num_(std::move(c)) {}
    AtomFrac(DiffPoly<K0> n) : num_(std::move(n)) {}  // NOLINT
    AtomFrac(DiffPoly<K0> n, std::shared_ptr<const Atoms> atoms, std::vector<int> e)
        : num_(std::move(n)), atoms_(std::move(atoms)), e_(std::move(e)) {
        trim();
    }

    const DiffPoly<K0>& num() const { return num_; }
    bool is_zero() const { return num_.is_zero(); }

    friend AtomFrac operator+(const AtomFrac& a, const AtomFrac& b) {
        auto atoms = merged_atoms(a, b);
        size_t n = atoms ? atoms->size() : 0;
        std::vector<int> e(n, 0);
        for (size_t i = 0; i < n; ++i) e[i] = std::max(a.expo(i), b.expo(i));
        DiffPoly<K0> na = a.num_, nb = b.num_;
        for (size_t i = 0; i < n; ++i) {
            for (int k = a.expo(i); k < e[i]; ++k) na = na * (*atoms)[i];
            for (int k = b.expo(i); k < e[i]; ++k) nb = nb * (*atoms)[i];
        }
        return AtomFrac(na + nb, atoms, std::move(e));
    }
    friend AtomFrac operator-(const AtomFrac& a, const AtomFrac& b) { return a + (-b); }
    friend AtomFrac operator-(const AtomFrac& a) {
        AtomFrac r = a;
        r.num_ = -r.num_;
        return r;
    }
    friend AtomFrac operator*(const AtomFrac& a, const AtomFrac& b) {
        auto atoms = merged_atoms(a, b);
        size_t n = atoms ? atoms->size() : 0;
        std::vector<int> e(n, 0);
        for (size_t i = 0; i < n; ++i) e[i] = a.expo(i) + b.expo(i);
        return AtomFrac(a.num_ * b.num_, atoms, std::move(e));
    }
    friend bool operator==(const AtomFrac& a, const AtomFrac& b) { return (a - b).is_zero(); }
    friend bool operator!=(const AtomFrac& a, const AtomFrac& b) { return !(a == b); }

    /// divide by atom #i
    AtomFrac div_atom(size_t i, const std::shared_ptr<const Atoms>& atoms) const {
        AtomFrac r = *this;
        if (!r.atoms_) r.atoms_ = atoms;
        if (r.e_.size() <= i) r.e_.resize(atoms->size(), 0);
        r.e_[i] += 1;
        return r;
    }

    AtomFrac derivative() const {
        size_t n = atoms_ ? atoms_->size() : 0;
        // d(N / prod A^e) = [N' prod_{e>0} A - N sum_{e>0} e_i A_i' prod_{j!=i, e>0} A_j] / prod A^{e + [e>0]}
        DiffPoly<K0> lead = num_.derivative();
        std::vector<int> e(e_);
        e.resize(n, 0);
        DiffPoly<K0> corr;  // N * sum e_i A_i' prod_{j != i} A_j over present atoms
        for (size_t i = 0; i < n; ++i) {
            if (e[i] == 0) continue;
            DiffPoly<K0> t = k_int<K0>(e[i]) * (*atoms_)[i].derivative();
            for (size_t j = 0; j < n; ++j)
                if (j != i && e[j] > 0) t = t * (*atoms_)[j];
            corr = corr + t;
        }
        for (size_t i = 0; i < n; ++i)
            if (e[i] > 0) lead = lead * (*atoms_)[i];
        DiffPoly<K0> numr = lead - num_ * corr;
        std::vector<int> eb = e;
        for (size_t i = 0; i < n; ++i)
            if (eb[i] > 0) eb[i] += 1;
        return AtomFrac(std::move(numr), atoms_, std::move(eb));
    }

   private:
    DiffPoly<K0> num_;
    std::shared_ptr<const Atoms> atoms_;
    std::vector<int> e_;

    int expo(size_t i) const { return i < e_.size() ? e_[i] : 0; }

    static std::shared_ptr<const Atoms> merged_atoms(const AtomFrac& a, const AtomFrac& b) {
        if (!a.atoms_) return b.atoms_;
        if (!b.atoms_) return a.atoms_;
        if (a.atoms_ != b.atoms_) throw Error("mixing fractions over different atom frames");
        return a.atoms_;
    }

    void trim() {
        if (num_.is_zero()) {
            e_.assign(e_.size(), 0);
            return;
        }
        bool any = false;
        for (int v : e_) any = any || v != 0;
        if (!any) atoms_.reset(), e_.clear();
    }
};

template <class K0>
AtomFrac<K0> derive(const AtomFrac<K0>& f) {
    return f.derivative();
}

template <class K0>
struct FieldOps<AtomFrac<K0>> {
    static constexpr bool exact = true;
    static AtomFrac<K0> zero() { return AtomFrac<K0>(); }
    static AtomFrac<K0> one() { return AtomFrac<K0>(FieldOps<K0>::one()); }
    static bool is_zero(const AtomFrac<K0>& f) { return f.is_zero(); }
    static std::string str(const AtomFrac<K0>&) { return "<atomfrac>"; }
};

/// Wronskian-type minors of formal solutions with derivative (-Q d/dx):
/// D_mu = Det((-Qd)^i psi_{j+1}), 0 <= i,j <= mu-1, with D_0 = 1.
template <class K0>
class WronskianFrame {
   public:
    WronskianFrame(int d, K0 Q) : d_(d), Q_(std::move(Q)) {
        rows_.resize(static_cast<size_t>(d) + 2);
        for (int j = 0; j < d; ++j) rows_[0].push_back(DiffPoly<K0>::symbol(static_cast<uint32_t>(j)));
        for (int i = 1; i <= d + 1; ++i)
            for (int j = 0; j < d; ++j) rows_[static_cast<size_t>(i)].push_back((-Q_) * rows_[i - 1][j].derivative());
        auto atoms = std::make_shared<typename AtomFrac<K0>::Atoms>();
        for (int mu = 0; mu <= d; ++mu) atoms->push_back(D(mu));
        atoms_ = atoms;
    }

    int d() const { return d_; }
    const K0& Q() const { return Q_; }
    const DiffPoly<K0>& deriv_entry(int i, int j) const {
        return rows_[static_cast<size_t>(i)][static_cast<size_t>(j)];
    }
    const std::shared_ptr<const typename AtomFrac<K0>::Atoms>& atoms() const { return atoms_; }

    DiffPoly<K0> D(int mu) const {
        if (mu <= 0) return DiffPoly<K0>(FieldOps<K0>::one());
        std::vector<std::vector<DiffPoly<K0>>> m;
        for (int i = 0; i < mu; ++i) {
            std::vector<DiffPoly<K0>> row;
            for (int j = 0; j < mu; ++j) row.push_back(deriv_entry(i, j));
            m.push_back(std::move(row));
        }
        return determinant(m);
    }

    /// D_mu with psi_mu replaced by psi_{mu+1} in the last column.
    DiffPoly<K0> D_hat(int mu) const {
        std::vector<std::vector<DiffPoly<K0>>> m;
        for (int i = 0; i < mu; ++i) {
            std::vector<DiffPoly<K0>> row;
            for (int j = 0; j < mu - 1; ++j) row.push_back(deriv_entry(i, j));
            row.push_back(deriv_entry(i, mu));
            m.push_back(std::move(row));
        }
        return determinant(m);
    }

    /// Y_mu = Q d ln(D_{mu-1} / D_mu), as a fraction over the minor atoms.
    AtomFrac<K0> Y(int mu) const {
        AtomFrac<K0> a = AtomFrac<K0>((*atoms_)[static_cast<size_t>(mu - 1)].derivative())
                             .div_atom(static_cast<size_t>(mu - 1), atoms_);
        AtomFrac<K0> b =
            AtomFrac<K0>((*atoms_)[static_cast<size_t>(mu)].derivative()).div_atom(static_cast<size_t>(mu), atoms_);
        return AtomFrac<K0>(DiffPoly<K0>(Q_)) * (a - b);
    }

   private:
    int d_;
    K0 Q_;
    std::vector<std::vector<DiffPoly<K0>>> rows_;
    std::shared_ptr<const typename AtomFrac<K0>::Atoms> atoms_;
};

/// Verifies over formal symbols that, for every mu <= d,
/// (yh - Y_1)...(yh - Y_mu) equals the bordered-determinant operator of the
/// solution minors (yh powers composing on the left of the minors, overall
/// scale 1/D_mu), and that it annihilates psi_1..psi_mu under the right
/// action.
template <class K0>
bool determinant_factorization_check(int d, const K0& Q) {
    using F = AtomFrac<K0>;
    WronskianFrame<K0> w(d, Q);
    F Qf{DiffPoly<K0>(Q)};
    for (int mu = 1; mu <= d; ++mu) {
        DiffOp<F> lhs = DiffOp<F>::identity(Qf);
        for (int nu = 1; nu <= mu; ++nu) lhs = lhs * DiffOp<F>::yhat_minus(Qf, w.Y(nu));

        DiffOp<F> rhs = DiffOp<F>::zero(Qf);
        for (int i = 0; i <= mu; ++i) {
            std::vector<std::vector<DiffPoly<K0>>> m;
            for (int r = 0; r <= mu; ++r) {
                if (r == i) continue;
                std::vector<DiffPoly<K0>> row;
                for (int j = 0; j < mu; ++j) row.push_back(w.deriv_entry(r, j));
                m.push_back(std::move(row));
            }
            F c = F{determinant(m)}.div_atom(static_cast<size_t>(mu), w.atoms());
            if ((mu - i) % 2 != 0) c = -c;
            DiffOp<F> pw = DiffOp<F>::identity(Qf);
            for (int t = 0; t < i; ++t) pw = pw * DiffOp<F>::yhat(Qf);
            rhs = rhs + pw * DiffOp<F>::function(Qf, c);
        }
        if (lhs != rhs) return false;

        for (int nu = 1; nu <= mu; ++nu) {
            F psi{DiffPoly<K0>::symbol(static_cast<uint32_t>(nu - 1))};
            if (!right_act(psi, lhs).is_zero()) return false;
        }
    }
    return true;
}

/// Differential Hirota identity in determinant form, as a polynomial
/// identity in the formal symbols:
///   D_{mu-1} D_{mu+1} = -Q (D_hat_mu' D_mu - D_hat_mu D_mu').
/// The -Q normalization follows from the (-Qd)-Wronskian convention; the
/// residue consequences are unaffected by the constant.
template <class K0>
bool hirota_determinant_check(int d, const K0& Q) {
    WronskianFrame<K0> w(d, Q);
    for (int mu = 1; mu <= d - 1; ++mu) {
        DiffPoly<K0> lhs = w.D(mu - 1) * w.D(mu + 1);
        DiffPoly<K0> dm = w.D(mu);
        DiffPoly<K0> dh = w.D_hat(mu);
        DiffPoly<K0> rhs = (-Q) * (dh.derivative() * dm - dh * dm.derivative());
        if (lhs != rhs) return false;
    }
    return true;
}

/// Master factorization over formal symbols: U = (yh - Y_2)...(yh - Y_d)
/// and (yh - Y_1) U reproduces the full product exactly.
template <class K0>
bool master_u_formal_check(int d, const K0& Q) {
    using F = AtomFrac<K0>;
    WronskianFrame<K0> w(d, Q);
    F Qf{DiffPoly<K0>(Q)};
    DiffOp<F> U = DiffOp<F>::identity(Qf);
    for (int nu = 2; nu <= d; ++nu) U = U * DiffOp<F>::yhat_minus(Qf, w.Y(nu));
    DiffOp<F> full = DiffOp<F>::yhat_minus(Qf, w.Y(1)) * U;
    DiffOp<F> direct = DiffOp<F>::identity(Qf);
    for (int nu = 1; nu <= d; ++nu) direct = direct * DiffOp<F>::yhat_minus(Qf, w.Y(nu));
    return full == direct;
}

}  // namespace qtr

#endif
