#pragma once

#include <gmpxx.h>

#include <cctype>
#include <compare>
#include <string>
#include <string_view>

#include "qpalg/errors.hpp"

namespace qpalg {

using Rational = mpq_class;

inline std::string rat_to_string(const Rational& q) { return q.get_str(); }

/// Floor of a rational as an integer.
inline mpz_class rat_floor(const Rational& q) {
    mpz_class r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

/// Exact Gaussian rational a + b*i. The coefficient field of the whole library;
/// no floating point appears anywhere downstream of this type.
struct Scalar {
    Rational re;
    Rational im;

    Scalar() : re(0), im(0) {}
    Scalar(long v) : re(v), im(0) {}             // NOLINT(google-explicit-constructor)
    Scalar(Rational r) : re(std::move(r)), im(0) {}  // NOLINT(google-explicit-constructor)
    Scalar(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}
    Scalar(long num, long den) : re(num, den), im(0) {
        if (den == 0) throw DivisionByZero("zero denominator");
        re.canonicalize();
    }

    static Scalar i() { return Scalar(Rational(0), Rational(1)); }
    static Scalar of(long num, long den = 1) { return Scalar(num, den); }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_one() const { return re == 1 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }

    Scalar operator-() const { return Scalar(-re, -im); }

    Scalar& operator+=(const Scalar& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Scalar& operator-=(const Scalar& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

    friend Scalar operator+(const Scalar& a, const Scalar& b) { return Scalar(a.re + b.re, a.im + b.im); }
    friend Scalar operator-(const Scalar& a, const Scalar& b) { return Scalar(a.re - b.re, a.im - b.im); }

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        if (a.is_zero() || b.is_zero()) return Scalar();
        if (sgn(a.im) == 0 && sgn(b.im) == 0) return Scalar(a.re * b.re);
        return Scalar(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }

    /// Multiplicative inverse; the argument must be nonzero.
    Scalar inv() const {
        if (is_zero()) throw DivisionByZero("inverse of zero Scalar");
        Rational n = re * re + im * im;
        return Scalar(re / n, -im / n);
    }

    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inv(); }

    friend bool operator==(const Scalar& a, const Scalar& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const Scalar& a, const Scalar& b) { return !(a == b); }

    /// Total order (lexicographic on re, im); used for deterministic containers,
    /// not for any field-theoretic meaning.
    friend bool operator<(const Scalar& a, const Scalar& b) {
        int c = cmp(a.re, b.re);
        if (c != 0) return c < 0;
        return cmp(a.im, b.im) < 0;
    }

    Scalar conj() const { return Scalar(re, -im); }
};

inline Scalar operator*(long a, const Scalar& b) { return Scalar(a) * b; }

/// Generalized binomial coefficient C(p, k) = p (p-1) ... (p-k+1) / k!,
/// defined for arbitrary Scalar p and integer k >= 0.
inline Scalar gen_binomial(const Scalar& p, unsigned k) {
    Scalar num(1);
    Rational fact(1);
    for (unsigned t = 0; t < k; ++t) {
        num = num * (p - Scalar(static_cast<long>(t)));
        fact *= static_cast<long>(t + 1);
    }
    return num * Scalar(Rational(1) / fact);
}

// --- text format: "a/b+c/d*i" with optional parts ------------------------

inline std::string to_string(const Scalar& s) {
    if (s.is_zero()) return "0";
    std::string out;
    if (sgn(s.re) != 0) out += rat_to_string(s.re);
    if (sgn(s.im) != 0) {
        Rational a = abs(s.im);
        if (!out.empty()) out += (sgn(s.im) > 0) ? "+" : "-";
        else if (sgn(s.im) < 0) out += "-";
        if (a == 1) out += "i";
        else out += rat_to_string(a) + "*i";
    }
    return out;
}

namespace detail {

inline Rational parse_rational_at(std::string_view s, size_t& pos) {
    size_t start = pos;
    while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) throw ParseError("expected digits in scalar at '" + std::string(s.substr(start)) + "'");
    std::string num(s.substr(start, pos - start));
    std::string den = "1";
    if (pos < s.size() && s[pos] == '/') {
        ++pos;
        size_t dstart = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == dstart) throw ParseError("expected denominator digits in scalar");
        den = std::string(s.substr(dstart, pos - dstart));
    }
    Rational q(num + "/" + den);
    q.canonicalize();
    if (sgn(q) == 0 && num != "0") throw ParseError("bad rational literal");
    return q;
}

}  // namespace detail

/// Parses the scalar text format. Accepts e.g. "0", "-3/2", "i", "-i",
/// "1/2*i", "5/4-2/3*i". Whitespace around tokens is ignored.
inline Scalar parse_scalar(std::string_view input) {
    std::string s;
    for (char c : input)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw ParseError("empty scalar");

    Scalar result;
    size_t pos = 0;
    bool first = true;
    while (pos < s.size()) {
        int sign = 1;
        if (s[pos] == '+') {
            ++pos;
        } else if (s[pos] == '-') {
            sign = -1;
            ++pos;
        } else if (!first) {
            throw ParseError("expected '+' or '-' between scalar terms in '" + s + "'");
        }
        if (pos >= s.size()) throw ParseError("dangling sign in scalar");
        if (s[pos] == 'i') {
            ++pos;
            result.im += sign;
        } else {
            Rational q = detail::parse_rational_at(s, pos);
            bool imag = false;
            if (pos < s.size() && s[pos] == '*') {
                if (pos + 1 >= s.size() || s[pos + 1] != 'i') throw ParseError("expected 'i' after '*'");
                pos += 2;
                imag = true;
            } else if (pos < s.size() && s[pos] == 'i') {
                ++pos;
                imag = true;
            }
            if (imag) result.im += sign * q;
            else result.re += sign * q;
        }
        first = false;
    }
    return result;
}

}  // namespace qpalg
