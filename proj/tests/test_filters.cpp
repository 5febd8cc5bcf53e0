#include <doctest.h>

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>

#include "qcfilter/filters.hpp"
#include "qcfilter/rng.hpp"

using namespace qcf;

namespace {

constexpr double kPi = std::numbers::pi;

std::complex<double> cx(const Cx<double>& c) { return {c.re, c.im}; }

// two-sided average toward x0, refined until stable; independent of any
// series path inside the implementations under test
std::complex<double> limit_at(const std::function<std::complex<double>(double)>& f,
                              double x0, double h0) {
    std::complex<double> prev;
    for (int k = 0; k < 4; ++k) {
        double h = h0 / std::pow(4.0, k);
        prev = 0.5 * (f(x0 + h) + f(x0 - h));
    }
    return prev;
}

}  // namespace

TEST_CASE("cp locations") {
    CHECK(cp_locations(0).empty());
    auto one = cp_locations(1);
    REQUIRE(one.size() == 1);
    CHECK(one[0] == doctest::Approx(0.5));
    auto two = cp_locations(2);
    CHECK(two[0] == doctest::Approx(0.25));
    CHECK(two[1] == doctest::Approx(0.75));
    auto six = cp_locations(6);
    for (int l = 0; l < 6; ++l)
        CHECK(six[l] == doctest::Approx((2.0 * l + 1.0) / 12.0));
    // symmetric about 1/2
    for (int l = 0; l < 3; ++l)
        CHECK(six[l] + six[5 - l] == doctest::Approx(1.0));
}

TEST_CASE("udd locations") {
    auto one = udd_locations(1);
    CHECK(one[0] == doctest::Approx(0.5));
    auto two = udd_locations(2);
    CHECK(two[0] == doctest::Approx(0.25));
    CHECK(two[1] == doctest::Approx(0.75));
    auto six = udd_locations(6);
    REQUIRE(six.size() == 6);
    double s1 = std::sin(kPi / 14.0);
    CHECK(six[0] == doctest::Approx(s1 * s1));
    for (int l = 1; l < 6; ++l) CHECK(six[l] > six[l - 1]);
}

TEST_CASE("bang-bang control vector") {
    // n = 0: free induction decay, F_z = 4 sin^2(w tau / 2)
    double tau = 1.0;
    for (double w : {0.4, 2.0, 11.0}) {
        auto rzz = bang_bang_control_vector<double>({}, tau, w);
        CHECK(rzz.norm2() ==
              doctest::Approx(4.0 * std::pow(std::sin(w * tau / 2), 2)).epsilon(1e-12));
    }

    // n = 2 CP: leading order (w tau)^3 in R_zz
    auto cp2 = cp_locations(2);
    double w0 = 1e-4;
    auto r1 = bang_bang_control_vector<double>(cp2, tau, w0);
    auto r2 = bang_bang_control_vector<double>(cp2, tau, 2 * w0);
    CHECK(std::abs(cx(r2)) / std::abs(cx(r1)) == doctest::Approx(8.0).epsilon(1e-3));

    // n = 6 UDD: first 6 derivatives vanish -> leading order (w tau)^7
    // (locations generated at working precision; the cancellation is far
    // below double rounding)
    auto udd6 = udd_locations_r<qreal>(6);
    auto u1 = bang_bang_control_vector<qreal>(udd6, qreal(tau), qreal(1e-3));
    auto u2 = bang_bang_control_vector<qreal>(udd6, qreal(tau), qreal(2e-3));
    CHECK(std::abs(to_complexd(u2)) / std::abs(to_complexd(u1)) ==
          doctest::Approx(128.0).epsilon(1e-3));

    // odd n goes through the generalized endpoint and reports it
    bool general = false;
    auto hahn = bang_bang_control_vector<double>({0.5}, tau, 3.0, &general);
    CHECK(general);
    // Hahn echo: R_zz = (1 - e^{i w tau/2})^2
    std::complex<double> e = 1.0 - std::exp(std::complex<double>(0, 3.0 * tau / 2));
    CHECK(std::abs(cx(hahn) - e * e) < 1e-13);
}

TEST_CASE("primitive pulse control vector") {
    double tau_pi = 1.0;
    double rate = kPi / tau_pi;

    // direct substitution at w = 2 rate
    double w = 2.0 * rate;
    auto p = primitive_pi_cv<double>(tau_pi, w);
    std::complex<double> phase = std::exp(std::complex<double>(0, w * tau_pi)) + 1.0;
    CHECK(std::abs(cx(p.zz) - w * w * phase / (w * w - rate * rate)) < 1e-13);
    CHECK(std::abs(cx(p.zy) - std::complex<double>(0, w * rate) * phase /
                                  (w * w - rate * rate)) < 1e-13);

    // w -> 0: F_z -> 4 w^2 / rate^2 (alpha = 0)
    double ws = 1e-5;
    auto ps = primitive_pi_cv<double>(tau_pi, ws);
    CHECK(ps.zz.norm2() + ps.zy.norm2() ==
          doctest::Approx(4.0 * ws * ws / (rate * rate)).epsilon(1e-6));

    // removable point at w = rate: matches the limit of the rational form
    auto at = primitive_pi_cv<double>(tau_pi, rate);
    auto lim_zz = limit_at(
        [&](double x) { return cx(primitive_pi_cv<double>(tau_pi, x).zz); }, rate, 0.02);
    auto lim_zy = limit_at(
        [&](double x) { return cx(primitive_pi_cv<double>(tau_pi, x).zy); }, rate, 0.02);
    CHECK(std::abs(cx(at.zz) - lim_zz) < 1e-7);
    CHECK(std::abs(cx(at.zy) - lim_zy) < 1e-7);
    // analytic limit values: R_zz(rate) = -i pi/2, R_zy(rate) = pi/2
    CHECK(std::abs(cx(at.zz) - std::complex<double>(0, -kPi / 2)) < 1e-12);
    CHECK(std::abs(cx(at.zy) - std::complex<double>(kPi / 2, 0)) < 1e-12);
}

TEST_CASE("dcg control vector") {
    double tau_pi = 0.5;
    double rate = kPi / tau_pi;

    // w -> 0: zz component limit 4 w^2/rate^2, so F_z ~ (w tau_pi)^4
    double ws = 1e-5;
    auto p = dcg_not_cv<double>(tau_pi, ws);
    CHECK(p.zz.norm2() ==
          doctest::Approx(std::pow(4.0 * ws * ws / (rate * rate), 2)).epsilon(1e-5));
    double f1 = p.zz.norm2() + p.zy.norm2();
    auto p2 = dcg_not_cv<double>(tau_pi, 2 * ws);
    double f2 = p2.zz.norm2() + p2.zy.norm2();
    CHECK(f2 / f1 == doctest::Approx(16.0).epsilon(1e-4));

    // removable points
    for (double x0 : {rate, rate / 2}) {
        auto at = dcg_not_cv<double>(tau_pi, x0);
        auto lim_zz = limit_at(
            [&](double x) { return cx(dcg_not_cv<double>(tau_pi, x).zz); }, x0, 0.015);
        auto lim_zy = limit_at(
            [&](double x) { return cx(dcg_not_cv<double>(tau_pi, x).zy); }, x0, 0.015);
        CHECK(std::abs(cx(at.zz) - lim_zz) < 1e-6);
        CHECK(std::abs(cx(at.zy) - lim_zy) < 1e-6);
    }

    // cross-check against the three-segment assembly
    ControlSequence seq = dcg_not_sequence(tau_pi);
    SpectralControlMatrix r(seq);
    Xoshiro256 rng(5);
    for (int k = 0; k < 40; ++k) {
        double w = 0.05 + rng.uniform() * 20.0 / (4 * tau_pi);
        auto cv = dcg_not_cv<double>(tau_pi, w);
        Mat3c m = r(w);
        CHECK(std::abs(cx(cv.zz) - m[8]) < 1e-10);
        CHECK(std::abs(cx(cv.zy) - m[7]) < 1e-10);
        CHECK(std::abs(m[6]) < 1e-12);
    }
}

TEST_CASE("dd control vector: width-only and bang-bang reductions") {
    double tau = 1.0;
    auto locs = cp_locations(4);

    // pulse terms zeroed: R_zz = 1 - e^{iwt} + 2cos(w tau_p/2) sum
    DDSpec spec = DDSpec::make(locs, tau, 0.02, PulseKind::primitive_pi);
    for (double w : {0.7, 5.0, 19.0}) {
        auto zeroed = dd_rzz_pulse_terms_zeroed<double>(spec, w);
        std::complex<double> expect = 1.0 - std::exp(std::complex<double>(0, w * tau));
        double sign = -1.0;
        for (double d : locs) {
            expect += 2.0 * sign * std::cos(w * spec.tau_p / 2) *
                      std::exp(std::complex<double>(0, w * d * tau));
            sign = -sign;
        }
        CHECK(std::abs(cx(zeroed) - expect) < 1e-13);
    }

    // tau_p -> 0 approaches the bang-bang limit
    DDSpec tiny = DDSpec::make(locs, tau, 1e-11, PulseKind::primitive_pi);
    for (double w : {0.3, 2.0, 8.0, 20.0}) {
        auto cv = dd_control_vector<double>(tiny, w);
        auto bb = bang_bang_control_vector<double>(locs, tau, w);
        CHECK(std::abs(cx(cv[2]) - cx(bb)) < 1e-10);
        CHECK(std::abs(cx(cv[1])) < 1e-10);
    }
}

TEST_CASE("oracle equivalence: closed forms vs assembled sequences") {
    // every closed-form filter agrees with the piecewise assembly of the
    // same physics over w tau in [1e-2, 20]
    std::vector<DDSpec> cases;
    cases.push_back(
        DDSpec::cp(6, 1.0, 1.0 / 60.0, PulseKind::primitive_pi));
    cases.push_back(DDSpec::cp(6, 1.0, 1.0 / 60.0, PulseKind::dcg_not));
    cases.push_back(
        DDSpec::udd(6, 1.0, 1.0 / 60.0, PulseKind::primitive_pi));
    cases.push_back(
        DDSpec::udd(5, 1.0, 1.0 / 80.0, PulseKind::primitive_pi));
    cases.push_back(DDSpec::cp(3, 1.0, 1.0 / 40.0, PulseKind::dcg_not));

    Xoshiro256 rng(11);
    for (const auto& spec : cases) {
        ControlSequence seq = build_dd_sequence(spec);
        SpectralControlMatrix r(seq);
        for (int k = 0; k < 30; ++k) {
            double wt = 1e-2 * std::pow(20.0 / 1e-2, rng.uniform());
            double w = wt / spec.tau;
            auto cv = dd_control_vector<double>(spec, w);
            Mat3c m = r(w);
            double scale = std::max({std::abs(m[8]), std::abs(m[7]), 1e-30});
            CHECK(std::abs(cx(cv[2]) - m[8]) < 1e-9 * scale + 1e-14);
            CHECK(std::abs(cx(cv[1]) - m[7]) < 1e-9 * scale + 1e-14);
        }
    }

    // gates: printed pulse forms vs their one- and three-segment assemblies
    for (double tau_pi : {0.3, 1.0}) {
        ControlSequence prim = primitive_pi_sequence(tau_pi);
        SpectralControlMatrix rp(prim);
        for (int k = 0; k < 20; ++k) {
            double w = (1e-2 + rng.uniform() * 20.0) / tau_pi;
            auto cv = primitive_pi_cv<double>(tau_pi, w);
            Mat3c m = rp(w);
            double scale = std::max({std::abs(m[8]), std::abs(m[7]), 1e-30});
            CHECK(std::abs(cx(cv.zz) - m[8]) < 1e-9 * scale);
            CHECK(std::abs(cx(cv.zy) - m[7]) < 1e-9 * scale);
        }
    }
}

TEST_CASE("first order filter properties") {
    ControlSequence fr({ControlSegment::free(1.0)});
    SpectralControlMatrix r(fr);
    FilterFunction fz = first_order_filter(r, Axis::z);
    for (double w : {0.3, 2.2, 9.1}) {
        CHECK(fz.eval(w) ==
              doctest::Approx(4.0 * std::pow(std::sin(w / 2), 2)).epsilon(1e-12));
        CHECK(fz.eval(w) == doctest::Approx(fz.eval(-w)).epsilon(1e-12));
        CHECK(fz.eval(w) >= 0.0);
    }

    // primitive pi: F_z = |R_zz|^2 + |R_zy|^2 from the printed forms
    FilterFunction fp = pulse_filter(PulseKind::primitive_pi, 1.0);
    for (double w : {0.4, 3.0}) {
        auto cv = primitive_pi_cv<double>(1.0, w);
        CHECK(fp.eval(w) ==
              doctest::Approx(cv.zz.norm2() + cv.zy.norm2()).epsilon(1e-12));
    }
}

TEST_CASE("suppression order fits") {
    // primitive pi: alpha = 0
    auto prim = pulse_filter(PulseKind::primitive_pi, 1.0, Precision::extended);
    auto fit_prim = suppression_order(prim, 1e-3, 1e-2, 1.0);
    CHECK(std::abs(fit_prim.alpha - 0.0) < 0.05);
    CHECK(fit_prim.rolloff_db_per_octave == doctest::Approx(6.0 * (fit_prim.alpha + 1)));

    // dcg: alpha = 1
    auto dcg = pulse_filter(PulseKind::dcg_not, 1.0, Precision::extended);
    auto fit_dcg = suppression_order(dcg, 1e-3, 1e-2, 1.0);
    CHECK(std::abs(fit_dcg.alpha - 1.0) < 0.05);

    // CP n=6 bang-bang: alpha = 2 (18 dB/octave)
    auto cp6 = dd_filter(DDSpec::cp(6, 1.0, 0.0, PulseKind::bang_bang),
                         Precision::extended);
    auto fit_cp = suppression_order(cp6);
    CHECK(std::abs(fit_cp.alpha - 2.0) < 0.1);
    CHECK(std::abs(fit_cp.rolloff_db_per_octave - 18.0) < 0.6);

    // a window containing filter zeros is rejected: FID filter vanishes
    // at w tau = 2 pi k
    auto fid = dd_filter(DDSpec::make({}, 1.0, 0.0, PulseKind::bang_bang));
    CHECK_THROWS_AS(suppression_order(fid, 2.0 * kPi * 0.99, 2.0 * kPi * 1.01, 1.0, 201),
                    FitError);
}

TEST_CASE("udd bang-bang suppression orders") {
    for (int n : {2, 4, 6}) {
        auto ff = dd_filter(DDSpec::udd(n, 1.0, 0.0, PulseKind::bang_bang),
                            Precision::extended);
        auto fit = suppression_order(ff);
        CHECK(std::abs(fit.alpha - n) < 0.2);
    }
}

TEST_CASE("finite pulses reduce and dcg restores the rolloff") {
    double tau = 1.0;
    auto cp6_prim = dd_filter(
        DDSpec::cp(6, tau, tau / 60.0, PulseKind::primitive_pi),
        Precision::extended);
    auto fit_prim = suppression_order(cp6_prim);
    CHECK(std::abs(fit_prim.alpha - 1.0) < 0.1);

    auto cp6_dcg =
        dd_filter(DDSpec::cp(6, tau, tau / 60.0, PulseKind::dcg_not),
                  Precision::extended);
    auto fit_dcg = suppression_order(cp6_dcg);
    CHECK(std::abs(fit_dcg.alpha - 2.0) < 0.15);
}

TEST_CASE("pulse width convergence toward bang-bang") {
    double tau = 1.0;
    auto locs = cp_locations(6);
    auto bb = dd_filter(DDSpec::make(locs, tau, 0.0, PulseKind::bang_bang, LocationRule::cp));
    auto sup_dist = [&](double tau_p) {
        auto ff = dd_filter(DDSpec::make(locs, tau, tau_p, PulseKind::primitive_pi, LocationRule::cp));
        double sup = 0.0;
        for (int k = 0; k <= 400; ++k) {
            double w = 20.0 * k / 400.0 / tau;
            sup = std::max(sup, std::abs(ff.eval(w) - bb.eval(w)));
        }
        return sup;
    };
    double prev = sup_dist(tau / 60.0);
    double next = sup_dist(tau / 120.0);
    CHECK(prev / next >= 1.8);
}

TEST_CASE("standard sampling grid") {
    auto fid = dd_filter(DDSpec::make({}, 2.0, 0.0, PulseKind::bang_bang));
    auto s = sample_standard_grid(fid);
    REQUIRE(s.omega.size() == 1201);
    CHECK(s.omega.front() * fid.tau == doctest::Approx(1e-4));
    CHECK(s.omega.back() * fid.tau == doctest::Approx(1e2));
    for (std::size_t k = 0; k < s.omega.size(); ++k)
        CHECK(s.value[k] >= 0.0);
}

TEST_CASE("dd spec validation") {
    CHECK_THROWS_AS(DDSpec::make({0.5, 0.4}, 1.0, 0.0, PulseKind::bang_bang),
                    ValidationError);
    CHECK_THROWS_AS(DDSpec::make({0.49, 0.51}, 1.0, 0.1, PulseKind::primitive_pi),
                    ValidationError);
    CHECK_THROWS_AS(DDSpec::make({0.01}, 1.0, 0.1, PulseKind::primitive_pi),
                    ValidationError);
    CHECK_THROWS_AS(DDSpec::make({0.5}, 1.0, 0.1, PulseKind::bang_bang), ValidationError);
    CHECK_THROWS_AS(
        build_dd_sequence(DDSpec::make({0.5}, 1.0, 0.0, PulseKind::bang_bang)),
        ValidationError);
}
