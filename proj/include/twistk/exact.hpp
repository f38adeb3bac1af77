#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace twistk {

using Integer = mpz_class;
using Rational = mpq_class;

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Gaussian rational re + i*im.
struct GaussQ {
    Rational re;
    Rational im;

    GaussQ() = default;
    GaussQ(long v) : re(v), im(0) {}
    GaussQ(Rational r) : re(std::move(r)), im(0) {}
    GaussQ(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static GaussQ i() { return GaussQ(Rational(0), Rational(1)); }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }
    GaussQ conj() const { return GaussQ(re, -im); }

    GaussQ& operator+=(const GaussQ& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussQ& operator-=(const GaussQ& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussQ& operator*=(const GaussQ& o) {
        Rational r = re * o.re - im * o.im;
        Rational m = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(m);
        return *this;
    }
    GaussQ& operator/=(const GaussQ& o) {
        Rational den = o.re * o.re + o.im * o.im;
        if (sgn(den) == 0) throw DomainError("GaussQ division by zero");
        Rational r = (re * o.re + im * o.im) / den;
        Rational m = (im * o.re - re * o.im) / den;
        re = std::move(r);
        im = std::move(m);
        return *this;
    }
    GaussQ operator-() const { return GaussQ(-re, -im); }

    friend GaussQ operator+(GaussQ a, const GaussQ& b) { return a += b; }
    friend GaussQ operator-(GaussQ a, const GaussQ& b) { return a -= b; }
    friend GaussQ operator*(GaussQ a, const GaussQ& b) { return a *= b; }
    friend GaussQ operator/(GaussQ a, const GaussQ& b) { return a /= b; }
    friend bool operator==(const GaussQ& a, const GaussQ& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GaussQ& a, const GaussQ& b) { return !(a == b); }

    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
    std::string to_string() const;
};

inline std::string GaussQ::to_string() const {
    if (sgn(im) == 0) return re.get_str();
    if (sgn(re) == 0) return im.get_str() + "i";
    return "(" + re.get_str() + (sgn(im) > 0 ? "+" : "") + im.get_str() + "i)";
}

inline Rational make_rational(long num, long den = 1) {
    Rational r{Integer(num), Integer(den)};
    r.canonicalize();
    return r;
}

}  // namespace twistk
