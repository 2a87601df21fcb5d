#pragma once

#include <gmpxx.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>

namespace hk {

using cplx = std::complex<double>;

// Gaussian rational re + i*im, both exact.
struct GaussQ {
    mpq_class re{0};
    mpq_class im{0};

    GaussQ() = default;
    GaussQ(long v) : re(v), im(0) {}
    GaussQ(mpq_class r) : re(std::move(r)), im(0) { re.canonicalize(); }
    GaussQ(mpq_class r, mpq_class i) : re(std::move(r)), im(std::move(i)) {
        re.canonicalize();
        im.canonicalize();
    }
    static GaussQ rational(long num, long den) { return GaussQ(mpq_class(num, den)); }

    bool is_zero() const { return sgn(re) == 0 && sgn(im) == 0; }
    bool is_real() const { return sgn(im) == 0; }

    GaussQ& operator+=(const GaussQ& o) { re += o.re; im += o.im; return *this; }
    GaussQ& operator-=(const GaussQ& o) { re -= o.re; im -= o.im; return *this; }
    GaussQ& operator*=(const GaussQ& o) {
        if (sgn(im) == 0 && sgn(o.im) == 0) {
            re *= o.re;
            return *this;
        }
        mpq_class r = re * o.re - im * o.im;
        mpq_class i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    GaussQ& operator/=(const GaussQ& o) {
        if (sgn(o.im) == 0) {
            re /= o.re;
            im /= o.re;
            return *this;
        }
        mpq_class d = o.re * o.re + o.im * o.im;
        mpq_class r = (re * o.re + im * o.im) / d;
        mpq_class i = (im * o.re - re * o.im) / d;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    friend GaussQ operator+(GaussQ a, const GaussQ& b) { return a += b; }
    friend GaussQ operator-(GaussQ a, const GaussQ& b) { return a -= b; }
    friend GaussQ operator*(GaussQ a, const GaussQ& b) { return a *= b; }
    friend GaussQ operator/(GaussQ a, const GaussQ& b) { return a /= b; }
    GaussQ operator-() const { return GaussQ(mpq_class(-re), mpq_class(-im)); }
    friend bool operator==(const GaussQ& a, const GaussQ& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const GaussQ& a, const GaussQ& b) { return !(a == b); }

    GaussQ conj() const { return GaussQ(re, mpq_class(-im)); }
    cplx to_complex() const { return {re.get_d(), im.get_d()}; }
    std::string str() const;
};

inline const GaussQ kI{mpq_class(0), mpq_class(1)};

// Uniform access for the exact and the floating backends.
template <class S>
struct Field;

template <>
struct Field<GaussQ> {
    static constexpr bool exact = true;
    static GaussQ zero() { return GaussQ(); }
    static GaussQ one() { return GaussQ(1); }
    static GaussQ from_int(long v) { return GaussQ(v); }
    static GaussQ from_ratio(long num, long den) { return GaussQ::rational(num, den); }
    static GaussQ imag_unit() { return kI; }
    static bool is_zero(const GaussQ& s) { return s.is_zero(); }
    // Pivot test; exact zero is the only zero.
    static bool negligible(const GaussQ& s, double) { return s.is_zero(); }
    static double magnitude(const GaussQ& s) { return std::abs(s.to_complex()); }
    static cplx to_complex(const GaussQ& s) { return s.to_complex(); }
    static GaussQ conj(const GaussQ& s) { return s.conj(); }
};

template <>
struct Field<cplx> {
    static constexpr bool exact = false;
    static cplx zero() { return {0.0, 0.0}; }
    static cplx one() { return {1.0, 0.0}; }
    static cplx from_int(long v) { return {double(v), 0.0}; }
    static cplx from_ratio(long num, long den) { return {double(num) / double(den), 0.0}; }
    static cplx imag_unit() { return {0.0, 1.0}; }
    static bool is_zero(const cplx& s) { return s.real() == 0.0 && s.imag() == 0.0; }
    static bool negligible(const cplx& s, double tol) { return std::abs(s) <= tol; }
    static double magnitude(const cplx& s) { return std::abs(s); }
    static cplx to_complex(const cplx& s) { return s; }
    static cplx conj(const cplx& s) { return std::conj(s); }
};

template <class S>
S convert_scalar(const GaussQ& q);

template <>
inline GaussQ convert_scalar<GaussQ>(const GaussQ& q) { return q; }

template <>
inline cplx convert_scalar<cplx>(const GaussQ& q) { return q.to_complex(); }

std::string scalar_str(const GaussQ& s);
std::string scalar_str(const cplx& s);

}  // namespace hk
