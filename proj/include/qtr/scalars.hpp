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

#ifndef QTR_SCALARS_HPP
#define QTR_SCALARS_HPP

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/mpfr.hpp>
#include <cstdint>
#include <sstream>
#include <string>

#include "qtr/errors.hpp"

namespace qtr {

namespace mp = boost::multiprecision;

using BigInt = mp::cpp_int;
using Rational = mp::cpp_rational;

/// Arbitrary-precision real with runtime-selectable precision.
using BigFloat = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;

inline void set_float_precision_bits(unsigned bits) {
    // boost counts decimal digits; 1 bit ~ log10(2) digits
    BigFloat::default_precision(static_cast<unsigned>(bits * 0.30103) + 2);
}

/// Complex number over a real type.  Only the field operations the engine
/// needs; not a substitute for std::complex.
template <class R>
struct Complex {
    R re{}, im{};

    Complex() = default;
    Complex(long v) : re(v), im(0) {}  // NOLINT(google-explicit-constructor)
    Complex(R r) : re(std::move(r)), im(0) {}
    Complex(R r, R i) : re(std::move(r)), im(std::move(i)) {}

    friend Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
    friend Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
    friend Complex operator-(const Complex& a) { return {-a.re, -a.im}; }
    friend Complex operator*(const Complex& a, const Complex& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend Complex operator/(const Complex& a, const Complex& b) {
        R n = b.re * b.re + b.im * b.im;
        return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
    }
    Complex& operator+=(const Complex& o) { return *this = *this + o; }
    Complex& operator-=(const Complex& o) { return *this = *this - o; }
    Complex& operator*=(const Complex& o) { return *this = *this * o; }
    Complex& operator/=(const Complex& o) { return *this = *this / o; }
    friend bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Complex& a, const Complex& b) { return !(a == b); }

    R abs2() const { return re * re + im * im; }
};

using CF = Complex<BigFloat>;

/// Field operations used generically by the polynomial/series layers.
/// `exact` gates gcd reduction and exact zero tests.
template <class K>
struct FieldOps;

template <>
struct FieldOps<Rational> {
    static constexpr bool exact = true;
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static bool is_zero(const Rational& x) { return x.is_zero(); }
    static std::string str(const Rational& x) { return x.str(); }
};

template <class R>
struct FieldOps<Complex<R>> {
    static constexpr bool exact = false;
    static Complex<R> zero() { return Complex<R>(); }
    static Complex<R> one() { return Complex<R>(1); }
    static bool is_zero(const Complex<R>& x) { return x.re == 0 && x.im == 0; }
    static std::string str(const Complex<R>& x) {
        std::ostringstream os;
        os.precision(40);
        os << "(" << x.re << (x.im < 0 ? "" : "+") << x.im << "i)";
        return os.str();
    }
};

/// Derivation on base scalars: constants.
inline Rational derive(const Rational&) { return Rational(0); }
template <class R>
Complex<R> derive(const Complex<R>&) {
    return Complex<R>();
}

/// Magnitude used by numeric tests (squared modulus for complex, |.| for
/// rationals so the same helpers work in either backend).
inline Rational magnitude(const Rational& x) { return x < 0 ? Rational(-x) : x; }
template <class R>
R magnitude(const Complex<R>& x) {
    return sqrt(x.abs2());
}

/// Lift a base scalar into a nested coefficient field (RatFunc towers).
template <class K, class F>
struct ScalarCast {
    static K cast(const F& v) { return K(v); }
};
template <class K, class F>
K scalar_cast(const F& v) {
    return ScalarCast<K, F>::cast(v);
}
template <class F>
struct ScalarCast<F, F> {
    static F cast(const F& v) { return v; }
};

/// Small-integer element of an arbitrary field.
template <class K>
K k_int(long n) {
    K one = FieldOps<K>::one();
    K acc = FieldOps<K>::zero();
    bool neg = n < 0;
    unsigned long m = neg ? -static_cast<unsigned long>(n) : static_cast<unsigned long>(n);
    K pw = one;
    while (m) {
        if (m & 1) acc = acc + pw;
        pw = pw + pw;
        m >>= 1;
    }
    return neg ? -acc : acc;
}

inline Rational rational_from_string(const std::string& s) {
    try {
        return Rational(s);
    } catch (const std::exception&) {
        throw ParseError("bad rational '" + s + "'");
    }
}

}  // namespace qtr

#endif
