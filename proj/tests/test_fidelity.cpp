#include <doctest.h>

#include <cmath>
#include <numbers>

#include "qcfilter/fidelity.hpp"
#include "qcfilter/mc.hpp"
#include "qcfilter/quadrature.hpp"
#include "qcfilter/rng.hpp"

using namespace qcf;

namespace {

constexpr double kPi = std::numbers::pi;

ControlSequence random_sequence(Xoshiro256& rng, int max_segments = 4) {
    int n = 1 + static_cast<int>(rng.uniform() * max_segments);
    std::vector<ControlSegment> segs;
    for (int i = 0; i < n; ++i) {
        double dur = 0.2 + rng.uniform() * 0.8;
        double kind = rng.uniform();
        if (kind < 0.35)
            segs.push_back(ControlSegment::free(dur));
        else if (kind < 0.8)
            segs.push_back(
                ControlSegment::planar(dur, rng.uniform() * 6.0, rng.uniform() * 2 * kPi));
        else
            segs.push_back(ControlSegment::z_rotation(dur, (rng.uniform() - 0.5) * 6.0));
    }
    return ControlSequence(segs);
}

}  // namespace

TEST_CASE("chi overlap limits") {
    // S = 0: no z axis configured
    ControlSequence fr({ControlSegment::free(0.01)});
    SpectralControlMatrix r(fr);
    FilterFunction fz = first_order_filter(r, Axis::z);
    NoiseSpectrum empty;
    CHECK(chi_overlap(fz, empty) == 0.0);
    CHECK(fidelity_first_order(0.0) == 1.0);

    // free evolution with tau << tau_c: chi -> <beta^2> tau^2
    double db = 0.4, sigma = 1.0, tau = 0.01;
    NoiseSpectrum spec = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(db, sigma));
    double chi = chi_overlap(fz, spec);
    CHECK(chi == doctest::Approx(db * db / 4 * tau * tau).epsilon(1e-4));

    // primitive pi with tau_pi << tau_c: chi -> delta_beta^2 tau_pi^2 / pi^2
    double tau_pi = 0.01;
    ControlSequence prim = primitive_pi_sequence(tau_pi);
    FilterFunction fprim = first_order_filter(SpectralControlMatrix(prim), Axis::z);
    NoiseSpectrum paper = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(0.5, 1.0));
    double chi_prim = chi_overlap(fprim, paper);
    CHECK(chi_prim ==
          doctest::Approx(0.25 * tau_pi * tau_pi / (kPi * kPi)).epsilon(5e-3));
}

TEST_CASE("first-order fidelity map") {
    CHECK(fidelity_first_order(0.0) == 1.0);
    CHECK(fidelity_first_order(1.0) == doctest::Approx(0.5 * (1 + std::exp(-1.0))));
    CHECK(fidelity_first_order(1e3) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK_THROWS_AS(fidelity_first_order(-0.1), ValidationError);
    // monotone decreasing
    double prev = 1.1;
    for (double chi : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0}) {
        double f = fidelity_first_order(chi);
        CHECK(f < prev);
        CHECK(f >= 0.5);
        CHECK(f <= 1.0);
        prev = f;
    }
}

TEST_CASE("universal first order reductions") {
    double tau = 0.8;
    ControlSequence fr({ControlSegment::free(tau)});
    SpectralControlMatrix r(fr);

    // z-only input reduces exactly to chi_overlap
    NoiseSpectrum zspec = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(0.3, 1.2));
    auto uz = universal_first_order(r, zspec);
    double chi = chi_overlap(first_order_filter(r, Axis::z), zspec);
    CHECK(uz.per_axis[2] == doctest::Approx(chi).epsilon(1e-12));
    CHECK(uz.total == doctest::Approx(chi).epsilon(1e-12));
    CHECK(uz.per_axis[0] == 0.0);

    // isotropic noise on free evolution: identity control, so every axis
    // contributes the same amount
    NoiseSpectrum iso;
    for (Axis a : {Axis::x, Axis::y, Axis::z}) iso.set(a, gaussian_psd(0.3, 1.2));
    auto ui = universal_first_order(r, iso);
    CHECK(ui.total == doctest::Approx(3.0 * chi).epsilon(1e-10));
    CHECK(ui.per_axis[0] == doctest::Approx(chi).epsilon(1e-10));

    // pi_X pulse with x-axis noise: sigma_x commutes with the control, so
    // F_x is the free-evolution filter of the same duration
    double tau_pi = 0.6;
    ControlSequence prim = primitive_pi_sequence(tau_pi);
    SpectralControlMatrix rp(prim);
    NoiseSpectrum xspec = NoiseSpectrum::single_axis(Axis::x, gaussian_psd(0.3, 1.2));
    auto ux = universal_first_order(rp, xspec);
    ControlSequence fr_pi({ControlSegment::free(tau_pi)});
    NoiseSpectrum zs = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(0.3, 1.2));
    double chi_free = chi_overlap(
        first_order_filter(SpectralControlMatrix(fr_pi), Axis::z), zs);
    CHECK(ux.total == doctest::Approx(chi_free).epsilon(1e-8));
}

TEST_CASE("time-domain first order matches a direct double integral") {
    // primitive pi with gaussian dephasing: integrand reduces to
    // C(t1 - t2) cos(rate (t1 - t2))
    double tau_pi = 0.7, db = 0.35, sigma = 1.4;
    ControlSequence prim = primitive_pi_sequence(tau_pi);
    NoiseSpectrum spec = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(db, sigma));
    double got = a1_time_domain(prim, spec);

    double rate = kPi / tau_pi;
    auto c = [&](double t) {
        return db * db / 4 * std::exp(-t * t * sigma * sigma / 2);
    };
    std::vector<double> x, w;
    gauss_nodes(220, 0.0, tau_pi, x, w);
    double direct = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a)
        for (std::size_t b = 0; b < x.size(); ++b)
            direct += w[a] * w[b] * c(x[a] - x[b]) * std::cos(rate * (x[a] - x[b]));
    CHECK(got == doctest::Approx(direct).epsilon(1e-7));
}

TEST_CASE("long correlation limit of the primitive gate error") {
    // tau_pi / tau_c = 1e-2: <a1^2> = delta_beta^2 tau_pi^2 / pi^2
    double db = 0.5, tau_pi = 0.01, sigma = 1.0;
    ControlSequence prim = primitive_pi_sequence(tau_pi);
    NoiseSpectrum spec = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(db, sigma));
    double a1 = a1_time_domain(prim, spec);
    CHECK(a1 == doctest::Approx(db * db * tau_pi * tau_pi / (kPi * kPi)).epsilon(5e-3));
}

TEST_CASE("short correlation limit tracks the spectral density at the rate") {
    // tau_c / tau_pi = 1e-2: <a1^2> -> tau_pi S(rate) with a first
    // correction -(delta_beta^2/2) tau_c^2
    double db = 0.5, tau_pi = 1.0, sigma = 100.0;
    double tau_c = 1.0 / sigma;
    ControlSequence prim = primitive_pi_sequence(tau_pi);
    NoiseSpectrum spec = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(db, sigma));
    double a1 = a1_time_domain(prim, spec);
    double rate = kPi / tau_pi;
    double s_at_rate = spec.axis(Axis::z).psd(rate);
    double expect = tau_pi * s_at_rate - db * db / 2 * tau_c * tau_c;
    CHECK(a1 == doctest::Approx(expect).epsilon(5e-3));
}

TEST_CASE("frequency and time domain agree on random pairs") {
    Xoshiro256 rng(404);
    for (int it = 0; it < 8; ++it) {
        ControlSequence seq = random_sequence(rng);
        NoiseSpectrum spec;
        int n_axes = 1 + static_cast<int>(rng.uniform() * 3);
        for (int a = 0; a < n_axes; ++a)
            spec.set(static_cast<Axis>(a),
                     gaussian_psd(0.1 + rng.uniform() * 0.4, 0.5 + rng.uniform() * 2.0));
        double freq = universal_first_order(SpectralControlMatrix(seq), spec).total;
        double time = a1_time_domain(seq, spec);
        CHECK(std::abs(freq - time) < 1e-5 * std::max(std::abs(time), 1e-12));
    }
}

TEST_CASE("frequency and time domain agree for non-gaussian spectra") {
    // tabulated lorentzian-like spectrum through both routes
    std::vector<double> w, s;
    for (int k = 0; k <= 600; ++k) {
        double x = 12.0 * k / 600.0;
        w.push_back(x);
        s.push_back(0.05 / (1.0 + x * x));
    }
    NoiseSpectrum spec =
        NoiseSpectrum::single_axis(Axis::z, AxisSpectrum::tabulated(w, s));
    ControlSequence seq = primitive_pi_sequence(0.8);
    double freq = universal_first_order(SpectralControlMatrix(seq), spec).total;
    double time = a1_time_domain(seq, spec, 1e-5);
    // the tabulated interpolation bounds the achievable agreement
    CHECK(std::abs(freq - time) < 2e-4 * std::abs(time));

    AxisSpectrum pl = AxisSpectrum::power_law(0.02, 0.5, 0.05, 8.0);
    NoiseSpectrum pspec = NoiseSpectrum::single_axis(Axis::z, pl);
    double pfreq = universal_first_order(SpectralControlMatrix(seq), pspec).total;
    double ptime = a1_time_domain(seq, pspec, 1e-5);
    CHECK(std::abs(pfreq - ptime) < 2e-4 * std::abs(ptime));
}

TEST_CASE("chi additivity under commuting idle") {
    // appending a z rotation adds nothing to the dephasing filter: the
    // z-row is untouched, so chi(free + zrot) == chi(longer free)
    NoiseSpectrum spec = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(0.4, 1.0));
    ControlSequence a({ControlSegment::free(1.0), ControlSegment::z_rotation(0.5, 3.0)});
    ControlSequence b({ControlSegment::free(1.5)});
    double chi_a = chi_overlap(first_order_filter(SpectralControlMatrix(a), Axis::z), spec);
    double chi_b = chi_overlap(first_order_filter(SpectralControlMatrix(b), Axis::z), spec);
    CHECK(chi_a == doctest::Approx(chi_b).epsilon(1e-9));
}

TEST_CASE("higher order terms: commuting case oracle") {
    // free evolution with z-noise: a1 = (0,0,phi) with phi Gaussian, so
    // <a2^2> = 0, <a1.a3> = 0, <a1^4> = 3 <a1^2>^2
    double db = 0.4, sigma = 1.0, tau = 1.0;
    ControlSequence fr({ControlSegment::free(tau)});
    NoiseSpectrum spec = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(db, sigma));
    auto h = higher_order_terms(fr, spec, 32);
    double a1 = a1_time_domain(fr, spec);
    CHECK(std::abs(h.a2_sq) < 1e-12);
    CHECK(std::abs(h.a1a3) < 1e-12);
    CHECK(h.a1_4 == doctest::Approx(3.0 * a1 * a1).epsilon(1e-3));

    // no noise at all: everything zero, bounds zero
    NoiseSpectrum empty;
    auto hz = higher_order_terms(fr, empty, 16);
    CHECK(hz.a2_sq == 0.0);
    CHECK(hz.a1a3 == 0.0);
    CHECK(hz.a1_4 == 0.0);
}

TEST_CASE("higher order terms respect the appendix bounds") {
    Xoshiro256 rng(99);
    for (int it = 0; it < 3; ++it) {
        ControlSequence seq = random_sequence(rng, 3);
        NoiseSpectrum spec =
            NoiseSpectrum::single_axis(Axis::z, gaussian_psd(0.2 + rng.uniform() * 0.3,
                                                             0.8 + rng.uniform()));
        auto h = higher_order_terms(seq, spec, 24);
        CHECK(std::abs(h.a2_sq) <= h.bound_a2_sq * (1 + 1e-9));
        CHECK(std::abs(h.a1a3) <= h.bound_a1a3 * (1 + 1e-9));
        CHECK(std::abs(h.a1_4) <= h.bound_a1_4 * (1 + 1e-9));
    }
}

TEST_CASE("fourth order smallness") {
    // for xi^2 <= 0.1 and a non-echoing sequence the higher-order total
    // stays below 3 xi^2 relative to <a1^2>
    double tau = 1.0;
    NoiseSpectrum spec = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(0.5, 1.0));
    double xi = smallness_xi(spec, tau);
    REQUIRE(xi * xi <= 0.1);
    ControlSequence prim = primitive_pi_sequence(tau);
    auto h = higher_order_terms(prim, spec, 24);
    double a1 = a1_time_domain(prim, spec);
    double total = std::abs(h.a2_sq + 2.0 * h.a1a3 - h.a1_4 / 3.0);
    CHECK(total / a1 <= 3.0 * xi * xi);
}

TEST_CASE("fourth-order terms match Monte Carlo ensemble statistics") {
    // independent route: ensemble averages of the per-trajectory Magnus
    // terms, with a3 estimated from the evolved error vector
    double tau_pi = 1.0;
    ControlSequence seq = primitive_pi_sequence(tau_pi);
    NoiseSpectrum spec = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(0.5, 1.0));
    auto h = higher_order_terms(seq, spec, 48);

    int n = 2500;
    double s_a2 = 0, s_a13 = 0, s_a14 = 0;
    for (int k = 0; k < n; ++k) {
        Trajectory tr = synthesize_trajectory(spec, tau_pi, 0.01, mix_seed(12345, k));
        auto est = magnus_estimates(seq, tr);
        Vec3 a = evolve(seq, tr, StepCheck::off).error_vector();
        Vec3 a3 = a - est.a1 - est.a2;
        s_a2 += est.a2.dot(est.a2);
        s_a13 += est.a1.dot(a3);
        double a11 = est.a1.dot(est.a1);
        s_a14 += a11 * a11;
    }
    CHECK(s_a2 / n == doctest::Approx(h.a2_sq).epsilon(0.06));
    CHECK(s_a13 / n == doctest::Approx(h.a1a3).epsilon(0.06));
    CHECK(s_a14 / n == doctest::Approx(h.a1_4).epsilon(0.06));
}

TEST_CASE("fidelity report") {
    NoiseSpectrum spec = NoiseSpectrum::single_axis(Axis::z, gaussian_psd(0.5, 1.0));
    ControlSequence prim = primitive_pi_sequence(0.5);
    auto rep = fidelity_report(prim, spec);
    CHECK(rep.chi > 0.0);
    CHECK(rep.f_av == doctest::Approx(fidelity_first_order(rep.chi)));
    CHECK(rep.xi2 == doctest::Approx(0.0625 / 4).epsilon(1e-6));
    CHECK(rep.weak_noise_valid);
    CHECK(!rep.higher.has_value());

    // far outside the weak regime the report is flagged, not rejected
    ControlSequence longgate = primitive_pi_sequence(10.0);
    auto rep2 = fidelity_report(longgate, spec);
    CHECK(!rep2.weak_noise_valid);
}
