#pragma once

#include <array>
#include <optional>
#include <string>

#include "qcfilter/filters.hpp"
#include "qcfilter/noise.hpp"
#include "qcfilter/sequence.hpp"

namespace qcf {

// chi(tau) = (1/pi) Int_0^inf domega S_z(omega) F_z(omega) / omega^2.
// The omega -> 0 end uses the filter's stored quadratic coefficient, so
// the integrand never hits 0/0.
double chi_overlap(const FilterFunction& f_z, const NoiseSpectrum& spec);

// F_av = (1 + exp(-chi))/2, in [1/2, 1], monotone decreasing in chi.
double fidelity_first_order(double chi);

struct UniversalFirstOrder {
    std::array<double, 3> per_axis{};  // <a1^2> contribution per noise axis
    double total = 0.0;
};

// <a1^2> = (1/pi) sum_i Int_0^inf domega S_i F_i^(1) / omega^2 with
// F_i^(1) = sum_j |R_ij|^2; reduces to chi_overlap for z-only noise.
UniversalFirstOrder universal_first_order(const SpectralControlMatrix& r,
                                          const NoiseSpectrum& spec);

// Independent time-domain route:
// <a1^2> = sum_i Int Int C_i(t1 - t2) R_i(t1).R_i(t2) dt1 dt2.
// Serves as the oracle for the frequency path.
double a1_time_domain(const ControlSequence& seq, const NoiseSpectrum& spec,
                      double rel_tol = 1e-7);

struct HigherOrderTerms {
    double a2_sq = 0.0;   // <a2^2>,        |.| <= 3 xi^4/4
    double a1a3 = 0.0;    // <a1.a3^T>,     |.| <= xi^4/3
    double a1_4 = 0.0;    // <a1^4>,        |.| <= 3 xi^4
    double bound_a2_sq = 0.0;
    double bound_a1a3 = 0.0;
    double bound_a1_4 = 0.0;
    int grid = 0;
};

// Gaussian-factorized fourth-order fidelity terms by product
// Gauss-Legendre quadrature on the ordered time domains (grid_n nodes
// per dimension). Throws RefinementError when grid_n and grid_n/2
// disagree by more than 20% of the dominant scale.
HigherOrderTerms higher_order_terms(const ControlSequence& seq,
                                    const NoiseSpectrum& spec, int grid_n = 48);

struct FidelityReport {
    double chi = 0.0;   // first-order error <a1^2>
    double f_av = 1.0;  // (1 + e^{-chi})/2
    std::array<double, 3> a1_by_axis{};
    double xi2 = 0.0;
    bool weak_noise_valid = true;  // xi^2 < 0.1
    std::optional<HigherOrderTerms> higher;
    std::string method = "frequency";
};

FidelityReport fidelity_report(const ControlSequence& seq, const NoiseSpectrum& spec,
                               bool with_higher_order = false, int grid_n = 48);

}  // namespace qcf
