#include "qcfilter/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qcfilter/errors.hpp"
#include "qcfilter/quadrature.hpp"

namespace qcf {

namespace {
constexpr double kPi = std::numbers::pi;
}

AxisSpectrum AxisSpectrum::gaussian(double delta_beta, double sigma) {
    if (!(delta_beta > 0.0) || !(sigma > 0.0))
        throw ValidationError("gaussian spectrum requires delta_beta > 0 and sigma > 0");
    AxisSpectrum s;
    s.kind_ = Kind::gaussian;
    s.delta_beta_ = delta_beta;
    s.sigma_ = sigma;
    s.cutoff_ = 6.0 * sigma;
    return s;
}

AxisSpectrum AxisSpectrum::power_law(double amplitude, double exponent, double omega_min,
                                     double cutoff) {
    if (!(amplitude > 0.0) || !(cutoff > omega_min) || omega_min < 0.0)
        throw ValidationError("power-law spectrum requires amplitude > 0 and cutoff > omega_min >= 0");
    if (exponent >= 1.0 && omega_min == 0.0)
        throw ValidationError("power-law spectrum with exponent >= 1 diverges at omega = 0");
    AxisSpectrum s;
    s.kind_ = Kind::power_law;
    s.amp_ = amplitude;
    s.exponent_ = exponent;
    s.omega_min_ = omega_min;
    s.cutoff_ = cutoff;
    return s;
}

AxisSpectrum AxisSpectrum::tabulated(std::vector<double> omega, std::vector<double> s) {
    if (omega.size() != s.size() || omega.size() < 2)
        throw ValidationError("tabulated spectrum needs >= 2 (omega, S) rows");
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (i > 0 && !(omega[i] > omega[i - 1]))
            throw ValidationError("tabulated omega column must be strictly increasing");
        if (!(omega[i] >= 0.0) || !(s[i] >= 0.0))
            throw ValidationError("tabulated spectrum values must be non-negative");
    }
    AxisSpectrum out;
    out.kind_ = Kind::tabulated;
    out.cutoff_ = omega.back();
    out.tab_w_ = std::move(omega);
    out.tab_s_ = std::move(s);
    return out;
}

AxisSpectrum gaussian_psd(double delta_beta, double sigma) {
    return AxisSpectrum::gaussian(delta_beta, sigma);
}

double AxisSpectrum::correlation_time() const {
    if (kind_ == Kind::gaussian) return 1.0 / sigma_;
    // characteristic time from the band edge
    return 1.0 / cutoff_;
}

double AxisSpectrum::psd(double omega) const {
    double w = std::abs(omega);
    switch (kind_) {
        case Kind::gaussian:
            return std::sqrt(2.0 * kPi) * delta_beta_ * delta_beta_ / (4.0 * sigma_) *
                   std::exp(-w * w / (2.0 * sigma_ * sigma_));
        case Kind::power_law:
            if (w < omega_min_ || w > cutoff_) return 0.0;
            return amp_ * std::pow(w, -exponent_);
        case Kind::tabulated: {
            if (w > tab_w_.back()) return 0.0;
            if (w <= tab_w_.front()) return tab_s_.front();
            auto it = std::upper_bound(tab_w_.begin(), tab_w_.end(), w);
            std::size_t hi = static_cast<std::size_t>(it - tab_w_.begin());
            std::size_t lo = hi - 1;
            double wl = tab_w_[lo], wh = tab_w_[hi];
            double t;
            if (wl > 0.0)
                t = (std::log(w) - std::log(wl)) / (std::log(wh) - std::log(wl));
            else
                t = (w - wl) / (wh - wl);
            return tab_s_[lo] + t * (tab_s_[hi] - tab_s_[lo]);
        }
    }
    return 0.0;
}

double AxisSpectrum::variance() const {
    if (kind_ == Kind::gaussian) {
        // (1/pi) Int_0^{6 sigma} S = (delta_beta^2/4) erf(6/sqrt(2))
        return delta_beta_ * delta_beta_ / 4.0 *
               std::erf(cutoff_ / (std::sqrt(2.0) * sigma_));
    }
    double lo = (kind_ == Kind::power_law) ? omega_min_ : 0.0;
    double v = integrate_adaptive([this](double w) { return psd(w); }, lo, cutoff_,
                                  {1e-10, 0.0, 2000, {}});
    return v / kPi;
}

double AxisSpectrum::autocorrelation(double t) const {
    if (kind_ == Kind::gaussian) {
        double tau_c = 1.0 / sigma_;
        return delta_beta_ * delta_beta_ / 4.0 *
               std::exp(-t * t / (2.0 * tau_c * tau_c));
    }
    // C(t) = (1/pi) Int_0^cutoff S(w) cos(w t) dw
    double lo = (kind_ == Kind::power_law) ? omega_min_ : 0.0;
    AdaptiveOptions opts{1e-10, 1e-14, 4000, {}};
    // seed splits at the cosine zeros scale
    if (t != 0.0) {
        double period = 2.0 * kPi / std::abs(t);
        for (double w = period; w < cutoff_; w += period) opts.split_points.push_back(w);
        if (opts.split_points.size() > 512) {
            opts.split_points.clear();
            for (int k = 1; k < 512; ++k)
                opts.split_points.push_back(lo + (cutoff_ - lo) * k / 512.0);
        }
    }
    double v = integrate_adaptive(
        [this, t](double w) { return psd(w) * std::cos(w * t); }, lo, cutoff_, opts);
    return v / kPi;
}

double NoiseSpectrum::variance_total() const {
    double v = 0.0;
    for (int i = 0; i < 3; ++i)
        if (axes_[i]) v += axes_[i]->variance();
    return v;
}

double NoiseSpectrum::max_cutoff() const {
    double c = 0.0;
    for (int i = 0; i < 3; ++i)
        if (axes_[i]) c = std::max(c, axes_[i]->cutoff());
    return c;
}

double NoiseSpectrum::min_correlation_time() const {
    double t = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 3; ++i)
        if (axes_[i]) t = std::min(t, axes_[i]->correlation_time());
    return t;
}

double smallness_xi(const NoiseSpectrum& spec, double tau) {
    return std::sqrt(spec.variance_total()) * tau;
}

ConvergenceCheck magnus_convergence_check(const NoiseSpectrum& spec, double tau,
                                          double c_m) {
    if (!(c_m > 0.0)) throw ValidationError("confidence multiplier must be > 0");
    double xi = smallness_xi(spec, tau);
    double bound = kPi / c_m;
    return {xi < bound, xi, bound};
}

}  // namespace qcf
