#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "qcfilter/noise.hpp"
#include "qcfilter/sequence.hpp"

namespace qcf {

enum class PulseKind { bang_bang, primitive_pi, dcg_not };

// Carr-Purcell fractional locations (l - 1/2)/n; empty for n = 0.
template <class R>
std::vector<R> cp_locations_r(int n);
// Uhrig locations sin^2(pi l / (2n + 2)).
template <class R>
std::vector<R> udd_locations_r(int n);
template <>
std::vector<double> udd_locations_r<double>(int n);
template <>
std::vector<qreal> udd_locations_r<qreal>(int n);

inline std::vector<double> cp_locations(int n) { return cp_locations_r<double>(n); }
inline std::vector<double> udd_locations(int n) { return udd_locations_r<double>(n); }

enum class LocationRule { custom, cp, udd };

// A dynamical-decoupling sequence: n pulses of width tau_p centered at
// delta_l * tau, free evolution elsewhere, net operation the identity
// (even n) or a NOT (odd n). Keeping the generating rule lets the
// extended-precision path regenerate the locations at full precision;
// the deep moment cancellations of high-order sequences are otherwise
// destroyed by the rounding of the stored doubles.
struct DDSpec {
    std::vector<double> locations;  // strictly increasing, in (0,1)
    double tau = 0.0;
    double tau_p = 0.0;  // 0 for bang_bang
    PulseKind pulse = PulseKind::bang_bang;
    LocationRule rule = LocationRule::custom;

    int n() const { return static_cast<int>(locations.size()); }
    // pulses must not overlap each other or the sequence ends
    static DDSpec make(std::vector<double> locations, double tau, double tau_p,
                       PulseKind pulse, LocationRule rule = LocationRule::custom);
    static DDSpec cp(int n, double tau, double tau_p, PulseKind pulse) {
        return make(cp_locations(n), tau, tau_p, pulse, LocationRule::cp);
    }
    static DDSpec udd(int n, double tau, double tau_p, PulseKind pulse) {
        return make(udd_locations(n), tau, tau_p, pulse, LocationRule::udd);
    }
};

// Locations at the working precision, regenerated from the rule when one
// is recorded.
template <class R>
std::vector<R> spec_locations(const DDSpec& spec);

// Per-pulse frequency-domain control vector (z-row has only zz and zy
// components for pi_X-type pulses).
template <class R>
struct PulseZRow {
    Cx<R> zz{}, zy{};
};

// Primitive pi_X gate of width tau_pi at rate W = pi/tau_pi:
//   R_zz = w^2 (e^{i w tau_pi} + 1)/(w^2 - W^2)
//   R_zy = i w W (e^{i w tau_pi} + 1)/(w^2 - W^2)
// with the removable point at |w| = W evaluated through a series-stable
// path.
template <class R>
PulseZRow<R> primitive_pi_cv(R tau_pi, R omega);

// Dynamically corrected NOT built from three successive pi_X pulses, the
// middle one at half rate; total width 4 tau_pi. Removable points at
// |w| = W and |w| = W/2.
template <class R>
PulseZRow<R> dcg_not_cv(R tau_pi, R omega);

// Bang-bang limit R_zz = 1 - e^{i w tau} + 2 sum_l (-1)^l e^{i w delta_l tau}
// (stated for even n; odd n is routed through the general assembler form
// and flagged).
template <class R>
Cx<R> bang_bang_control_vector(const std::vector<R>& locations, R tau, R omega,
                               bool* used_general_path = nullptr);

// Sequence control vector (R_zx, R_zy, R_zz) for identical pi_X-type
// pulses with explicit pulse terms; reduces to the bang-bang form as
// tau_p -> 0 and to the width-only form when the pulse row is zeroed.
template <class R>
std::array<Cx<R>, 3> dd_control_vector(const DDSpec& spec, R omega);

// Width-only variant: pulse row zeroed, finite tau_p retained.
template <class R>
Cx<R> dd_rzz_pulse_terms_zeroed(const DDSpec& spec, R omega);

// Piecewise-constant realization of the same physics (finite-width kinds
// only), for oracle cross-checks and universal-noise filters.
ControlSequence build_dd_sequence(const DDSpec& spec);
ControlSequence primitive_pi_sequence(double tau_pi);
ControlSequence dcg_not_sequence(double tau_pi);

enum class FilterProvenance { closed_form, assembled, bang_bang };

// Sampled/callable first-order filter F_i(omega) >= 0, even in omega,
// vanishing at least quadratically at omega = 0.
struct FilterFunction {
    Axis axis = Axis::z;
    double tau = 0.0;
    FilterProvenance provenance = FilterProvenance::assembled;
    std::function<double(double)> eval;
    double quad_coeff = 0.0;  // lim_{w->0} F/w^2, frozen at w tau = 1e-4

    double operator()(double omega) const { return eval(omega); }
};

FilterFunction make_filter(std::function<double(double)> eval, Axis axis, double tau,
                           FilterProvenance prov);

// F_i(omega) = sum_j |R_ij(omega)|^2
FilterFunction first_order_filter(const SpectralControlMatrix& r, Axis axis);

// Dephasing filter of a DD spec via the closed-form control vector.
FilterFunction dd_filter(const DDSpec& spec, Precision prec = Precision::dbl);
// Single-gate dephasing filter (primitive_pi or dcg_not).
FilterFunction pulse_filter(PulseKind kind, double tau_pi,
                            Precision prec = Precision::dbl);
// Row filter from the generic assembler at selectable precision.
FilterFunction assembled_filter(const ControlSequence& seq, Axis axis,
                                Precision prec = Precision::dbl);

struct SuppressionFit {
    double alpha;
    double slope;  // d log F / d log omega over the window
    double rolloff_db_per_octave;
};

// Least-squares slope of log F vs log omega over the window
// [w_lo, w_hi] in the dimensionless variable omega * scale
// (scale defaults to the filter's total time); alpha = slope/2 - 1.
SuppressionFit suppression_order(const FilterFunction& ff, double w_lo_scaled = 1e-3,
                                 double w_hi_scaled = 1e-2, double scale = 0.0,
                                 int points = 40);

struct FilterSamples {
    std::vector<double> omega;
    std::vector<double> value;
};

// Standard log output grid: 200 points/decade over omega*tau in
// [1e-4, 1e2].
FilterSamples sample_standard_grid(const FilterFunction& ff, double omega_tau_min = 1e-4,
                                   double omega_tau_max = 1e2,
                                   int points_per_decade = 200);

}  // namespace qcf
