#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "qcfilter/errors.hpp"

namespace qcf {

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

struct Mat3 {
    double m[3][3] = {};

    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = 1.0;
        return r;
    }
    double operator()(int i, int j) const { return m[i][j]; }
    double& operator()(int i, int j) { return m[i][j]; }

    Vec3 row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }

    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r.m[i][j] = m[i][0] * o.m[0][j] + m[i][1] * o.m[1][j] + m[i][2] * o.m[2][j];
        return r;
    }
    Mat3 transpose() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r.m[i][j] = m[j][i];
        return r;
    }
    double det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

using complexd = std::complex<double>;
using Mat2c = std::array<complexd, 4>;  // row-major 2x2

// Unit-determinant 2x2 unitary stored as a unit quaternion:
//   U = w*I - i*(x sx + y sy + z sz) = exp(-i theta (n.sigma)/2)
// with w = cos(theta/2), (x,y,z) = sin(theta/2) * n.
// Global phase is quotiented out: (w,v) and (-w,-v) are the same element,
// canonicalized to w >= 0. Renormalized after every composition so that
// chains of ~1e6 products stay unitary to 1e-14.
class SU2 {
  public:
    SU2() : w_(1.0), x_(0.0), y_(0.0), z_(0.0) {}
    SU2(double w, double x, double y, double z) : w_(w), x_(x), y_(y), z_(z) {
        canonicalize();
    }

    static SU2 identity() { return SU2(); }

    // exp(-i theta (axis.sigma)/2); axis must be unit length to 1e-12
    static SU2 from_axis_angle(double theta, const Vec3& axis) {
        double n = axis.norm();
        if (std::abs(n - 1.0) > 1e-12)
            throw ValidationError("rotation axis must be a unit vector");
        double c = std::cos(theta / 2.0);
        double s = std::sin(theta / 2.0);
        return SU2(c, s * axis.x, s * axis.y, s * axis.z);
    }

    double w() const { return w_; }
    Vec3 vec() const { return {x_, y_, z_}; }

    SU2 dagger() const { return SU2(w_, -x_, -y_, -z_); }

    // Rotation angle theta in [0, pi] (global-phase quotient).
    double rotation_angle() const {
        return 2.0 * std::atan2(vec().norm(), w_);
    }

    // Error vector a with U = exp(-i a.sigma); |a| = theta/2 in [0, pi/2].
    Vec3 error_vector() const {
        double s = vec().norm();
        if (s == 0.0) return {0.0, 0.0, 0.0};
        double half = std::atan2(s, w_);
        return vec() * (half / s);
    }

    Mat2c matrix() const {
        const complexd i(0.0, 1.0);
        return {complexd(w_, -z_), -complexd(y_, 0.0) - i * x_,
                complexd(y_, 0.0) - i * x_, complexd(w_, z_)};
    }

  private:
    void canonicalize() {
        double n2 = w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_;
        if (std::abs(n2 - 1.0) > 1e-14) {
            double n = std::sqrt(n2);
            w_ /= n;
            x_ /= n;
            y_ /= n;
            z_ /= n;
        }
        bool flip = w_ < 0.0;
        if (w_ == 0.0) {
            if (x_ != 0.0)
                flip = x_ < 0.0;
            else if (y_ != 0.0)
                flip = y_ < 0.0;
            else
                flip = z_ < 0.0;
        }
        if (flip) {
            w_ = -w_;
            x_ = -x_;
            y_ = -y_;
            z_ = -z_;
        }
    }

    double w_, x_, y_, z_;
};

// Group product u1 * u2 (u2 acts first when these are propagators).
inline SU2 compose(const SU2& u1, const SU2& u2) {
    Vec3 v1 = u1.vec(), v2 = u2.vec();
    double w = u1.w() * u2.w() - v1.dot(v2);
    Vec3 v = u1.w() * v2 + u2.w() * v1 + v1.cross(v2);
    return SU2(w, v.x, v.y, v.z);
}

// R_ij = Tr(U^dag s_i U s_j)/2. Conjugation convention, so the map is a
// homomorphism: so3(U1 U2) = so3(U1) so3(U2), and so3(U) = so3(-U).
inline Mat3 so3_from_su2(const SU2& u) {
    double w = u.w();
    Vec3 v = u.vec();
    double ww = w * w - v.dot(v);
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = 2.0 * v[i] * v[j];
    r.m[0][0] += ww;
    r.m[1][1] += ww;
    r.m[2][2] += ww;
    // -2 w eps_ijk v_k
    r.m[0][1] -= 2.0 * w * v.z;
    r.m[1][0] += 2.0 * w * v.z;
    r.m[1][2] -= 2.0 * w * v.x;
    r.m[2][1] += 2.0 * w * v.x;
    r.m[2][0] -= 2.0 * w * v.y;
    r.m[0][2] += 2.0 * w * v.y;
    return r;
}

// |Tr(U)|^2 / 4 = cos^2(theta/2); 1 for identity, 0 for any pi rotation.
inline double trace_fidelity(const SU2& u_err) { return u_err.w() * u_err.w(); }

}  // namespace qcf
