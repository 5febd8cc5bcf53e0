#pragma once

#include "qcfilter/precision.hpp"

namespace qcf::detail {

// E0(u) = (e^{iu} - 1)/(iu), entire, E0(0) = 1. The sin(u)/u and
// 2 sin^2(u/2)/u forms are cancellation-free for every u, so frequency
// responses built from E0 stay accurate straight through resonances.
template <class R>
Cx<R> e0(R u) {
    if (u == R(0)) return Cx<R>(R(1), R(0));
    R sh = r_sin<R>(u / R(2));
    return {r_sin<R>(u) / u, R(2) * sh * sh / u};
}

// J(x) = Int_0^dt e^{ixt} dt
template <class R>
Cx<R> j_integral(R x, R duration) {
    return e0(x * duration) * duration;
}

template <class R>
Cx<R> times_minus_i_omega(const Cx<R>& c, R omega) {
    return {omega * c.im, -omega * c.re};
}

// Scalar kernels of a steady rotation at rate W over [0, dt]:
//   i1 = -iw J(w)                   (transform of 1)
//   ic = -iw (J(w+W) + J(w-W))/2    (transform of cos(Wt))
//   is = -(w/2) (J(w+W) - J(w-W))   (transform of sin(Wt))
template <class R>
struct RotationKernels {
    Cx<R> i1, ic, is;
};

template <class R>
RotationKernels<R> rotation_kernels(R omega, R rate, R duration) {
    Cx<R> jp = j_integral(omega + rate, duration);
    Cx<R> jm = j_integral(omega - rate, duration);
    RotationKernels<R> k;
    k.i1 = times_minus_i_omega(j_integral(omega, duration), omega);
    k.ic = times_minus_i_omega((jp + jm) * (R(1) / R(2)), omega);
    k.is = (jp - jm) * (-omega / R(2));
    return k;
}

// Neumaier-compensated complex accumulator (re/im independently).
template <class R>
struct CxNeumaier {
    Cx<R> sum{}, comp{};

    static void add1(R& acc, R& c, R term) {
        R t = acc + term;
        R mag_a = acc < R(0) ? -acc : acc;
        R mag_b = term < R(0) ? -term : term;
        c += (mag_a >= mag_b) ? ((acc - t) + term) : ((term - t) + acc);
        acc = t;
    }
    void add(const Cx<R>& t) {
        add1(sum.re, comp.re, t.re);
        add1(sum.im, comp.im, t.im);
    }
    Cx<R> value() const { return sum + comp; }
};

}  // namespace qcf::detail
