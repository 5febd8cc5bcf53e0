#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qcfilter/su2.hpp"

namespace qcf {

enum class Axis : int { x = 0, y = 1, z = 2 };

// One-axis stationary power spectral density S(omega) with a cutoff used
// as the integration/synthesis band edge. Axes are statistically
// independent; cross-spectra are not modeled.
class AxisSpectrum {
  public:
    enum class Kind { gaussian, power_law, tabulated };

    static AxisSpectrum gaussian(double delta_beta, double sigma);
    // S = amplitude * omega^{-exponent} on [omega_min, cutoff]
    static AxisSpectrum power_law(double amplitude, double exponent, double omega_min,
                                  double cutoff);
    // two-column (omega, S) samples; linear interpolation in log-omega,
    // zero above the last point
    static AxisSpectrum tabulated(std::vector<double> omega, std::vector<double> s);

    Kind kind() const { return kind_; }
    double cutoff() const { return cutoff_; }
    double delta_beta() const { return delta_beta_; }
    double sigma() const { return sigma_; }
    double correlation_time() const;  // 1/sigma for the Gaussian kind

    double psd(double omega) const;  // S(|omega|)
    // <beta^2(0)> = (1/pi) Int_0^cutoff S domega
    double variance() const;
    // C(t); analytic for the Gaussian kind, cosine quadrature otherwise
    double autocorrelation(double t) const;

  private:
    Kind kind_ = Kind::gaussian;
    double cutoff_ = 0.0;
    double delta_beta_ = 0.0, sigma_ = 0.0;
    double amp_ = 0.0, exponent_ = 0.0, omega_min_ = 0.0;
    std::vector<double> tab_w_, tab_s_;
};

// S(omega) = sqrt(2 pi) (delta_beta^2 / 4 sigma) exp(-omega^2 / 2 sigma^2),
// effective cutoff 6 sigma; C(t) = (delta_beta^2/4) exp(-t^2/2 tau_c^2).
AxisSpectrum gaussian_psd(double delta_beta, double sigma);

class NoiseSpectrum {
  public:
    NoiseSpectrum() = default;
    static NoiseSpectrum single_axis(Axis axis, AxisSpectrum s) {
        NoiseSpectrum n;
        n.set(axis, std::move(s));
        return n;
    }

    void set(Axis axis, AxisSpectrum s) { axes_[static_cast<int>(axis)] = std::move(s); }
    bool has(Axis axis) const { return axes_[static_cast<int>(axis)].has_value(); }
    const AxisSpectrum& axis(Axis a) const { return *axes_[static_cast<int>(a)]; }
    const std::optional<AxisSpectrum>& maybe(int i) const { return axes_[i]; }

    double variance_total() const;
    double max_cutoff() const;
    double min_correlation_time() const;

  private:
    std::array<std::optional<AxisSpectrum>, 3> axes_;
};

// xi = sqrt(sum_i <beta_i^2(0)>) * tau; scales linearly in tau.
double smallness_xi(const NoiseSpectrum& spec, double tau);

struct ConvergenceCheck {
    bool converges;
    double xi;
    double bound;  // pi / C_m
};

// Magnus convergence margin: converges iff xi < pi/C_m (strict; the
// boundary is reported non-convergent).
ConvergenceCheck magnus_convergence_check(const NoiseSpectrum& spec, double tau,
                                          double c_m = 3.0);

}  // namespace qcf
