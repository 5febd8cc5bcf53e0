#pragma once

#include <cmath>
#include <complex>

#include <quadmath.h>

namespace qcf {

enum class Precision { dbl, extended };

using qreal = __float128;

inline double to_double(double x) { return x; }
inline double to_double(qreal x) { return static_cast<double>(x); }

template <class R>
R r_sin(R x) {
    return std::sin(x);
}
template <class R>
R r_cos(R x) {
    return std::cos(x);
}
template <>
inline qreal r_sin(qreal x) {
    return sinq(x);
}
template <>
inline qreal r_cos(qreal x) {
    return cosq(x);
}

// Minimal complex value type usable with both double and __float128.
template <class R>
struct Cx {
    R re = R(0), im = R(0);

    Cx() = default;
    Cx(R r) : re(r) {}
    Cx(R r, R i) : re(r), im(i) {}

    Cx operator+(const Cx& o) const { return {re + o.re, im + o.im}; }
    Cx operator-(const Cx& o) const { return {re - o.re, im - o.im}; }
    Cx operator*(const Cx& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    Cx operator*(R s) const { return {re * s, im * s}; }
    Cx& operator+=(const Cx& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Cx& operator-=(const Cx& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Cx conj() const { return {re, -im}; }
    R norm2() const { return re * re + im * im; }
};

template <class R>
Cx<R> operator*(R s, const Cx<R>& c) {
    return c * s;
}

template <class R>
Cx<R> expi(R phase) {
    return {r_cos(phase), r_sin(phase)};
}

inline std::complex<double> to_complexd(const Cx<double>& c) { return {c.re, c.im}; }
inline std::complex<double> to_complexd(const Cx<qreal>& c) {
    return {static_cast<double>(c.re), static_cast<double>(c.im)};
}

}  // namespace qcf
