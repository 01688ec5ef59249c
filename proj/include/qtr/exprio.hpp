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

#ifndef QTR_EXPRIO_HPP
#define QTR_EXPRIO_HPP

#include <cctype>
#include <sstream>
#include <string>

#include "qtr/ratfunc.hpp"

namespace qtr {

/// ---- printing -------------------------------------------------------

inline std::string poly_str(const Poly<Rational>& p, const std::string& var = "x") {
    if (p.is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = p.degree(); i >= 0; --i) {
        Rational c = p.coeff(i);
        if (c.is_zero()) continue;
        bool neg = c < 0;
        Rational a = neg ? Rational(-c) : c;
        if (first) {
            if (neg) os << "-";
            first = false;
        } else {
            os << (neg ? " - " : " + ");
        }
        bool unit = (a == 1);
        if (i == 0) {
            os << a.str();
        } else {
            if (!unit) os << a.str() << "*";
            os << var;
            if (i > 1) os << "^" << i;
        }
    }
    return os.str();
}

inline std::string ratfunc_str(const RatFunc<Rational>& f, const std::string& var = "x") {
    if (f.is_polynomial()) {
        Rational lead = f.den().coeff(0);
        if (lead == 1) return poly_str(f.num(), var);
        Rational inv = 1 / lead;
        return poly_str(inv * f.num(), var);
    }
    return "(" + poly_str(f.num(), var) + ")/(" + poly_str(f.den(), var) + ")";
}

/// ---- parsing --------------------------------------------------------
/// grammar:  expr := term (('+'|'-') term)* ;  term := factor (('*'|'/') factor)* ;
///           factor := base ('^' uint)? ; base := rational | var | '(' expr ')' | '-' factor

class ExprParser {
   public:
    ExprParser(std::string text, std::string var) : s_(std::move(text)), var_(std::move(var)) {}

    RatFunc<Rational> parse() {
        pos_ = 0;
        auto r = parse_expr();
        skip_ws();
        if (pos_ != s_.size()) throw ParseError("trailing input at '" + s_.substr(pos_) + "'");
        return r;
    }

   private:
    std::string s_, var_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    RatFunc<Rational> parse_expr() {
        RatFunc<Rational> acc = parse_term();
        while (true) {
            if (eat('+'))
                acc += parse_term();
            else if (eat('-'))
                acc -= parse_term();
            else
                return acc;
        }
    }
    RatFunc<Rational> parse_term() {
        RatFunc<Rational> acc = parse_factor();
        while (true) {
            if (eat('*'))
                acc *= parse_factor();
            else if (eat('/'))
                acc /= parse_factor();
            else
                return acc;
        }
    }
    RatFunc<Rational> parse_factor() {
        RatFunc<Rational> b = parse_base();
        if (eat('^')) {
            skip_ws();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) throw ParseError("exponent expected");
            int e = std::stoi(s_.substr(start, pos_ - start));
            RatFunc<Rational> r = RatFunc<Rational>::one();
            for (int i = 0; i < e; ++i) r *= b;
            return r;
        }
        return b;
    }
    RatFunc<Rational> parse_base() {
        skip_ws();
        if (eat('-')) return -parse_factor();
        if (eat('(')) {
            auto r = parse_expr();
            if (!eat(')')) throw ParseError("')' expected");
            return r;
        }
        if (pos_ >= s_.size()) throw ParseError("unexpected end of expression");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) {
                // a '/' inside a number is only a rational if followed by a digit
                if (s_[pos_] == '/' &&
                    !(pos_ + 1 < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_ + 1]))))
                    break;
                ++pos_;
            }
            return RatFunc<Rational>(rational_from_string(s_.substr(start, pos_ - start)));
        }
        // identifier
        size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string id = s_.substr(start, pos_ - start);
        if (id == var_) return RatFunc<Rational>::x();
        throw ParseError("unknown identifier '" + id + "' (variable is '" + var_ + "')");
    }
};

inline RatFunc<Rational> parse_ratfunc(const std::string& text, const std::string& var = "x") {
    return ExprParser(text, var).parse();
}

inline Poly<Rational> parse_poly(const std::string& text, const std::string& var = "x") {
    auto r = parse_ratfunc(text, var);
    if (!r.is_polynomial()) throw ParseError("polynomial expected, got a proper rational function");
    Rational lead = r.den().coeff(0);
    if (lead == 1) return r.num();
    return (1 / lead) * r.num();
}

}  // namespace qtr

#endif
