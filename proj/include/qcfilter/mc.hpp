#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "qcfilter/noise.hpp"
#include "qcfilter/sequence.hpp"
#include "qcfilter/su2.hpp"

namespace qcf {

// One classical noise realization: harmonic synthesis coefficients plus
// uniform-grid samples. Bit-exactly reproducible from
// (seed, spectrum, dt, tau).
struct Trajectory {
    double dt = 0.0;
    double tau = 0.0;
    std::uint64_t seed = 0;
    Vec3 offset;  // constant component (zero for synthesized noise)

    struct Harmonics {
        std::vector<double> omega;    // k * domega, k = 1..K
        std::vector<double> amp_cos;  // sqrt(S domega / pi) * a_k
        std::vector<double> amp_sin;  // sqrt(S domega / pi) * b_k
    };
    std::array<std::optional<Harmonics>, 3> axes;

    std::vector<double> times;                    // ceil(tau/dt)+1 samples
    std::array<std::vector<double>, 3> samples;   // empty when axis is zero

    double value_axis(int axis, double t) const;
    Vec3 value(double t) const {
        return {value_axis(0, t), value_axis(1, t), value_axis(2, t)};
    }

    static Trajectory constant(const Vec3& beta, double tau, double dt);
};

// beta_i(t) = sum_k sqrt(S_i(w_k) dw / pi) [a_k cos(w_k t) + b_k sin(w_k t)]
// with independent standard normal a_k, b_k; w_k = k dw, dw = cutoff/K.
// The ensemble autocorrelation converges to C_i(t). K < 16 is rejected.
Trajectory synthesize_trajectory(const NoiseSpectrum& spec, double tau, double dt,
                                 std::uint64_t seed, int k_components = 512);

enum class StepCheck { off, on };

// Time-ordered error propagator: steps H(t) = H_c(t) + beta(t).sigma with
// an exact axis-angle exponential of the step-averaged Hamiltonian inside
// each segment, then returns U_c^dag(tau) U(tau). With StepCheck::on the
// run is repeated at half step and a trace-fidelity disagreement > 1e-6
// raises StepSizeError; the dt-grid result is returned either way.
SU2 evolve(const ControlSequence& seq, const Trajectory& traj,
           StepCheck check = StepCheck::on);

struct EnsembleConfig {
    int realizations = 100;
    double dt = 0.0;  // 0: auto = min(tau_c/50, pi/(10 max rate))
    std::uint64_t seed = 1;
    int k_components = 512;
};

struct EnsembleResult {
    double f_av = 1.0;
    double std_error = 0.0;
    int realizations = 0;
    std::uint64_t seed = 0;
    double dt = 0.0;
};

// Mean and standard error of trace_fidelity over noise realizations;
// realization k uses RNG substream k so the ensemble can be extended
// without changing earlier members. Deterministic for a fixed seed.
// per_realization, when given, receives the individual fidelities.
EnsembleResult ensemble_fidelity(const ControlSequence& seq, const NoiseSpectrum& spec,
                                 const EnsembleConfig& cfg,
                                 std::vector<double>* per_realization = nullptr);

struct MagnusEstimates {
    Vec3 a1, a2;
};

// Numerical first and second Magnus terms of the error vector along one
// trajectory:
//   a1 = Int v(t) dt,   a2 = Int v(t) x B(t) dt,  B(t) = Int_0^t v,
// with v(t) = sum_i beta_i(t) R_i(t).
MagnusEstimates magnus_estimates(const ControlSequence& seq, const Trajectory& traj);

}  // namespace qcf
