#pragma once

#include <complex>
#include <vector>

#include "qcfilter/precision.hpp"
#include "qcfilter/su2.hpp"

namespace qcf {

enum class SegmentKind { planar_rotation, free_evolution, z_rotation };

// One piecewise-constant control interval. Rotation axes are restricted
// to the xy-plane (planar), the z-axis, or none (free evolution); tilted
// axes are rejected by construction since only these three kinds exist.
struct ControlSegment {
    SegmentKind kind = SegmentKind::free_evolution;
    double duration = 0.0;    // > 0
    double rate = 0.0;        // rad/time; >= 0 for planar
    double axis_phase = 0.0;  // planar axis: cos(phi) x + sin(phi) y

    static ControlSegment planar(double duration, double rate, double axis_phase);
    static ControlSegment free(double duration);
    static ControlSegment z_rotation(double duration, double rate);

    double angle() const { return rate * duration; }
    Vec3 axis() const {
        if (kind == SegmentKind::planar_rotation)
            return {std::cos(axis_phase), std::sin(axis_phase), 0.0};
        return {0.0, 0.0, 1.0};
    }
    // control propagator at local time s in [0, duration]
    SU2 propagator(double s) const {
        if (rate == 0.0) return SU2::identity();
        return SU2::from_axis_angle(rate * s, axis());
    }
    SU2 propagator() const { return propagator(duration); }
};

using Mat3c = std::array<std::complex<double>, 9>;  // row-major

// Plain-data view of a sequence used by the precision-generic
// frequency-domain evaluators.
struct CompiledSequence {
    struct Seg {
        double t0;
        double duration;
        double rate;
        Vec3 axis;
        Mat3 lambda_prev;  // SO(3) image of Q_{l-1}
    };
    std::vector<Seg> segs;
    double tau = 0.0;
};

class ControlSequence {
  public:
    ControlSequence() { rebuild(); }
    explicit ControlSequence(std::vector<ControlSegment> segments);

    std::size_t size() const { return segs_.size(); }
    const std::vector<ControlSegment>& segments() const { return segs_; }
    double boundary(std::size_t l) const { return t_[l]; }  // t_0..t_n
    double total_time() const { return t_.back(); }
    const SU2& target() const { return q_.back(); }

    // Q_0 = I, Q_l = P_l ... P_1
    const std::vector<SU2>& cumulative_operators() const { return q_; }
    const Mat3& lambda(std::size_t l) const { return lambda_[l]; }

    // R(t) = R^{P_l}(t - t_{l-1}) Lambda^{(l-1)}; throws outside [0, tau]
    Mat3 control_matrix(double t) const;

    Mat3c spectral_matrix(double omega) const;

    CompiledSequence compile() const;

  private:
    void rebuild();

    std::vector<ControlSegment> segs_;
    std::vector<double> t_;
    std::vector<SU2> q_;
    std::vector<Mat3> lambda_;
};

// Lambda^{(l-1)}_ij = Tr(Q^dag s_i Q s_j)/2; identical to so3_from_su2.
inline Mat3 lambda_matrix(const SU2& q_prev) { return so3_from_su2(q_prev); }

// Frequency-domain control matrix of a single segment,
//   R^P(omega) = -i omega Int_0^dt e^{i omega t} R^P(t) dt,
// in closed form. The apparent poles at omega = +-rate cancel exactly;
// the evaluation below is written in terms of entire functions so no
// digits are lost near resonance.
template <class R>
std::array<Cx<R>, 9> segment_spectral_matrix(R duration, R rate, const Vec3& axis,
                                             R omega);

inline Mat3c segment_spectral_matrix(const ControlSegment& seg, double omega) {
    auto a = segment_spectral_matrix<double>(seg.duration, seg.rate, seg.axis(), omega);
    Mat3c r;
    for (int k = 0; k < 9; ++k) r[k] = to_complexd(a[k]);
    return r;
}

// R(omega) = sum_l e^{i omega t_{l-1}} R^{P_l}(omega) Lambda^{(l-1)},
// accumulated with compensated summation.
template <class R>
std::array<Cx<R>, 9> sequence_spectral_matrix(const CompiledSequence& seq, R omega);

// Callable 3x3 complex control matrix of omega together with the total
// time it was built for.
class SpectralControlMatrix {
  public:
    SpectralControlMatrix() = default;
    explicit SpectralControlMatrix(const ControlSequence& seq)
        : seq_(seq.compile()) {}

    double total_time() const { return seq_.tau; }
    Mat3c operator()(double omega) const;
    // squared modulus of row i (0=x,1=y,2=z): the first-order filter value
    double row_norm2(int i, double omega) const;
    const CompiledSequence& compiled() const { return seq_; }

  private:
    CompiledSequence seq_;
};

extern template std::array<Cx<double>, 9> segment_spectral_matrix<double>(
    double, double, const Vec3&, double);
extern template std::array<Cx<qreal>, 9> segment_spectral_matrix<qreal>(
    qreal, qreal, const Vec3&, qreal);
extern template std::array<Cx<double>, 9> sequence_spectral_matrix<double>(
    const CompiledSequence&, double);
extern template std::array<Cx<qreal>, 9> sequence_spectral_matrix<qreal>(
    const CompiledSequence&, qreal);

}  // namespace qcf
