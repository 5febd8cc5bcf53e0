#include "qcfilter/filters.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "qcfilter/detail/spectral_kernels.hpp"
#include "qcfilter/errors.hpp"

namespace qcf {

namespace {
constexpr double kPi = std::numbers::pi;
}

template <class R>
std::vector<R> cp_locations_r(int n) {
    if (n < 0) throw ValidationError("pulse count must be >= 0");
    std::vector<R> d(n);
    for (int l = 1; l <= n; ++l) d[l - 1] = (R(l) - R(1) / R(2)) / R(n);
    return d;
}

template <>
std::vector<qreal> udd_locations_r<qreal>(int n) {
    if (n < 0) throw ValidationError("pulse count must be >= 0");
    std::vector<qreal> d(n);
    for (int l = 1; l <= n; ++l) {
        qreal s = sinq(M_PIq * qreal(l) / (qreal(2) * qreal(n) + qreal(2)));
        d[l - 1] = s * s;
    }
    return d;
}

// sin^2 evaluated in quad then rounded: correctly-rounded doubles
template <>
std::vector<double> udd_locations_r<double>(int n) {
    auto q = udd_locations_r<qreal>(n);
    std::vector<double> d(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) d[i] = static_cast<double>(q[i]);
    return d;
}

template std::vector<double> cp_locations_r<double>(int);
template std::vector<qreal> cp_locations_r<qreal>(int);

template <class R>
std::vector<R> spec_locations(const DDSpec& spec) {
    switch (spec.rule) {
        case LocationRule::cp:
            return cp_locations_r<R>(spec.n());
        case LocationRule::udd:
            return udd_locations_r<R>(spec.n());
        case LocationRule::custom:
            break;
    }
    std::vector<R> d(spec.locations.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = R(spec.locations[i]);
    return d;
}

template std::vector<double> spec_locations<double>(const DDSpec&);
template std::vector<qreal> spec_locations<qreal>(const DDSpec&);

DDSpec DDSpec::make(std::vector<double> locations, double tau, double tau_p,
                    PulseKind pulse, LocationRule rule) {
    if (!(tau > 0.0)) throw ValidationError("sequence time must be > 0");
    if (pulse == PulseKind::bang_bang) {
        if (tau_p != 0.0)
            throw ValidationError("bang-bang pulses have zero width");
    } else if (!(tau_p > 0.0)) {
        throw ValidationError("finite pulse kinds require tau_p > 0");
    }
    double half = tau_p / (2.0 * tau);
    for (std::size_t l = 0; l < locations.size(); ++l) {
        double d = locations[l];
        if (!(d - half > 0.0) || !(d + half < 1.0))
            throw ValidationError("pulse extends outside the sequence interval");
        if (l > 0) {
            if (!(d > locations[l - 1]))
                throw ValidationError("pulse locations must be strictly increasing");
            if ((d - locations[l - 1]) * tau < tau_p)
                throw ValidationError("pulses overlap");
        }
    }
    DDSpec s;
    s.locations = std::move(locations);
    s.tau = tau;
    s.tau_p = tau_p;
    s.pulse = pulse;
    s.rule = rule;
    return s;
}

template <class R>
PulseZRow<R> primitive_pi_cv(R tau_pi, R omega) {
    if (!(tau_pi > R(0))) throw ValidationError("tau_pi must be > 0");
    R rate = R(kPi) / tau_pi;
    R d = omega * omega - rate * rate;
    R ad = d < R(0) ? -d : d;
    if (ad < R(1e-6) * rate * rate) {
        // removable point: evaluate through the entire-function kernels
        auto k = detail::rotation_kernels(omega, rate, tau_pi);
        return {k.ic, k.is};
    }
    Cx<R> common = (expi(omega * tau_pi) + Cx<R>(R(1))) * (R(1) / d);
    PulseZRow<R> out;
    out.zz = common * (omega * omega);
    out.zy = Cx<R>(R(0), omega * rate) * common;
    return out;
}

template <class R>
PulseZRow<R> dcg_not_cv(R tau_pi, R omega) {
    if (!(tau_pi > R(0))) throw ValidationError("tau_pi must be > 0");
    R rate = R(kPi) / tau_pi;
    R half = rate / R(2);
    R d1 = omega * omega - rate * rate;
    R d2 = omega * omega - half * half;
    R a1 = d1 < R(0) ? -d1 : d1;
    R a2 = d2 < R(0) ? -d2 : d2;
    if (a1 < R(1e-6) * rate * rate || a2 < R(1e-6) * half * half) {
        // three-segment form in entire-function kernels: outer pulses at
        // full rate, middle pulse at half rate over 2 tau_pi
        auto ko = detail::rotation_kernels(omega, rate, tau_pi);
        auto km = detail::rotation_kernels(omega, half, R(2) * tau_pi);
        Cx<R> outer = Cx<R>(R(1)) + expi(R(3) * omega * tau_pi);
        Cx<R> mid_phase = expi(omega * tau_pi);
        PulseZRow<R> out;
        out.zz = ko.ic * outer - mid_phase * km.ic;
        out.zy = ko.is * outer - mid_phase * km.is;
        return out;
    }
    Cx<R> e1 = expi(omega * tau_pi);
    Cx<R> e3 = expi(R(3) * omega * tau_pi);
    Cx<R> e4 = expi(R(4) * omega * tau_pi);
    Cx<R> p1 = e4 + e3 + e1 + Cx<R>(R(1));
    Cx<R> p2 = e3 + e1;
    PulseZRow<R> out;
    out.zz = (p1 * (R(1) / d1) - p2 * (R(1) / d2)) * (omega * omega);
    out.zy = Cx<R>(R(0), omega * rate) * (p1 * (R(1) / d1) - p2 * (R(1) / (R(2) * d2)));
    return out;
}

template <class R>
Cx<R> bang_bang_control_vector(const std::vector<R>& locations, R tau, R omega,
                               bool* used_general_path) {
    int n = static_cast<int>(locations.size());
    bool odd = (n % 2) != 0;
    if (used_general_path) *used_general_path = odd;
    detail::CxNeumaier<R> acc;
    acc.add(Cx<R>(R(1)));
    Cx<R> end = expi(omega * tau);
    // for even n the end term is -e^{i w tau}; the general assembler form
    // carries (-1)^n through the last free interval
    acc.add(odd ? end : Cx<R>(R(0)) - end);
    R sign = R(-1);
    for (R d : locations) {
        acc.add(expi(omega * d * tau) * (R(2) * sign));
        sign = -sign;
    }
    return acc.value();
}

template <class R>
std::array<Cx<R>, 3> dd_control_vector(const DDSpec& spec, R omega) {
    R tau = R(spec.tau);
    R tau_p = R(spec.tau_p);
    PulseZRow<R> pr{};
    if (spec.pulse == PulseKind::primitive_pi)
        pr = primitive_pi_cv(tau_p, omega);
    else if (spec.pulse == PulseKind::dcg_not)
        pr = dcg_not_cv(tau_p / R(4), omega);

    bool odd = (spec.n() % 2) != 0;
    Cx<R> half_phase = expi(-omega * tau_p / R(2));
    R cos_w = r_cos(omega * tau_p / R(2));
    Cx<R> zz_pulse = Cx<R>(R(2) * cos_w) - half_phase * pr.zz;

    detail::CxNeumaier<R> zz;
    zz.add(Cx<R>(R(1)));
    Cx<R> end = expi(omega * tau);
    zz.add(odd ? end : Cx<R>(R(0)) - end);
    detail::CxNeumaier<R> sum_alt;
    R sign = R(-1);
    for (R d : spec_locations<R>(spec)) {
        Cx<R> ph = expi(omega * d * tau) * sign;
        zz.add(ph * zz_pulse);
        sum_alt.add(ph);
        sign = -sign;
    }
    std::array<Cx<R>, 3> out{};
    out[2] = zz.value();
    out[1] = Cx<R>(R(0)) - half_phase * pr.zy * sum_alt.value();
    out[0] = Cx<R>(R(0));
    return out;
}

template <class R>
Cx<R> dd_rzz_pulse_terms_zeroed(const DDSpec& spec, R omega) {
    R tau = R(spec.tau);
    bool odd = (spec.n() % 2) != 0;
    detail::CxNeumaier<R> zz;
    zz.add(Cx<R>(R(1)));
    Cx<R> end = expi(omega * tau);
    zz.add(odd ? end : Cx<R>(R(0)) - end);
    R cos_w = r_cos(omega * R(spec.tau_p) / R(2));
    R sign = R(-1);
    for (R d : spec_locations<R>(spec)) {
        zz.add(expi(omega * d * tau) * (R(2) * sign * cos_w));
        sign = -sign;
    }
    return zz.value();
}

ControlSequence primitive_pi_sequence(double tau_pi) {
    return ControlSequence({ControlSegment::planar(tau_pi, kPi / tau_pi, 0.0)});
}

ControlSequence dcg_not_sequence(double tau_pi) {
    double rate = kPi / tau_pi;
    return ControlSequence({ControlSegment::planar(tau_pi, rate, 0.0),
                            ControlSegment::planar(2.0 * tau_pi, rate / 2.0, 0.0),
                            ControlSegment::planar(tau_pi, rate, 0.0)});
}

ControlSequence build_dd_sequence(const DDSpec& spec) {
    if (spec.pulse == PulseKind::bang_bang)
        throw ValidationError("bang-bang pulses have no piecewise realization");
    std::vector<ControlSegment> segs;
    auto add_free = [&](double gap) {
        if (gap > 1e-15 * spec.tau) segs.push_back(ControlSegment::free(gap));
    };
    auto add_pulse = [&]() {
        if (spec.pulse == PulseKind::primitive_pi) {
            segs.push_back(ControlSegment::planar(spec.tau_p, kPi / spec.tau_p, 0.0));
        } else {
            double tau_pi = spec.tau_p / 4.0;
            double rate = kPi / tau_pi;
            segs.push_back(ControlSegment::planar(tau_pi, rate, 0.0));
            segs.push_back(ControlSegment::planar(2.0 * tau_pi, rate / 2.0, 0.0));
            segs.push_back(ControlSegment::planar(tau_pi, rate, 0.0));
        }
    };
    double prev_end = 0.0;
    for (double d : spec.locations) {
        double start = d * spec.tau - spec.tau_p / 2.0;
        add_free(start - prev_end);
        add_pulse();
        prev_end = start + spec.tau_p;
    }
    add_free(spec.tau - prev_end);
    return ControlSequence(std::move(segs));
}

FilterFunction make_filter(std::function<double(double)> eval, Axis axis, double tau,
                           FilterProvenance prov) {
    FilterFunction ff;
    ff.axis = axis;
    ff.tau = tau;
    ff.provenance = prov;
    ff.eval = std::move(eval);
    if (tau > 0.0) {
        double w0 = 1e-4 / tau;
        ff.quad_coeff = ff.eval(w0) / (w0 * w0);
    }
    return ff;
}

FilterFunction first_order_filter(const SpectralControlMatrix& r, Axis axis) {
    int i = static_cast<int>(axis);
    return make_filter([r, i](double w) { return r.row_norm2(i, w); }, axis,
                       r.total_time(), FilterProvenance::assembled);
}

FilterFunction dd_filter(const DDSpec& spec, Precision prec) {
    auto prov = spec.pulse == PulseKind::bang_bang ? FilterProvenance::bang_bang
                                                   : FilterProvenance::closed_form;
    auto eval = [spec, prec](double w) {
        if (prec == Precision::extended) {
            auto cv = dd_control_vector<qreal>(spec, qreal(w));
            return static_cast<double>(cv[0].norm2() + cv[1].norm2() + cv[2].norm2());
        }
        auto cv = dd_control_vector<double>(spec, w);
        return cv[0].norm2() + cv[1].norm2() + cv[2].norm2();
    };
    return make_filter(eval, Axis::z, spec.tau, prov);
}

FilterFunction pulse_filter(PulseKind kind, double tau_pi, Precision prec) {
    if (kind == PulseKind::bang_bang)
        throw ValidationError("bang-bang is not a gate; pick primitive_pi or dcg_not");
    double tau = kind == PulseKind::primitive_pi ? tau_pi : 4.0 * tau_pi;
    auto eval = [kind, tau_pi, prec](double w) {
        if (prec == Precision::extended) {
            auto p = kind == PulseKind::primitive_pi
                         ? primitive_pi_cv<qreal>(qreal(tau_pi), qreal(w))
                         : dcg_not_cv<qreal>(qreal(tau_pi), qreal(w));
            return static_cast<double>(p.zz.norm2() + p.zy.norm2());
        }
        auto p = kind == PulseKind::primitive_pi ? primitive_pi_cv<double>(tau_pi, w)
                                                 : dcg_not_cv<double>(tau_pi, w);
        return p.zz.norm2() + p.zy.norm2();
    };
    return make_filter(eval, Axis::z, tau, FilterProvenance::closed_form);
}

FilterFunction assembled_filter(const ControlSequence& seq, Axis axis, Precision prec) {
    CompiledSequence c = seq.compile();
    int i = static_cast<int>(axis);
    auto eval = [c, i, prec](double w) {
        if (prec == Precision::extended) {
            auto m = sequence_spectral_matrix<qreal>(c, qreal(w));
            qreal f = m[3 * i].norm2() + m[3 * i + 1].norm2() + m[3 * i + 2].norm2();
            return static_cast<double>(f);
        }
        auto m = sequence_spectral_matrix<double>(c, w);
        return m[3 * i].norm2() + m[3 * i + 1].norm2() + m[3 * i + 2].norm2();
    };
    return make_filter(eval, axis, seq.total_time(), FilterProvenance::assembled);
}

SuppressionFit suppression_order(const FilterFunction& ff, double w_lo_scaled,
                                 double w_hi_scaled, double scale, int points) {
    if (scale <= 0.0) scale = ff.tau;
    if (!(scale > 0.0)) throw FitError("no time scale for the fit window");
    if (!(w_hi_scaled > w_lo_scaled) || points < 2)
        throw FitError("invalid fit window");
    double lx = std::log10(w_lo_scaled / scale);
    double hx = std::log10(w_hi_scaled / scale);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    double ymin = std::numeric_limits<double>::infinity(), ymax = -ymin;
    for (int k = 0; k < points; ++k) {
        double x = lx + (hx - lx) * k / (points - 1);
        double w = std::pow(10.0, x);
        double f = ff.eval(w);
        if (!(f > 0.0) || !std::isfinite(f))
            throw FitError("filter has a zero or invalid value inside the fit window");
        double y = std::log10(f);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    // a window containing a filter null is not a power-law region: the
    // spread then vastly exceeds what any plausible slope could produce
    if (ymax - ymin > 40.0 * (hx - lx) + 1.0)
        throw FitError("fit window contains a filter zero");
    double slope = (points * sxy - sx * sy) / (points * sxx - sx * sx);
    SuppressionFit fit;
    fit.slope = slope;
    fit.alpha = slope / 2.0 - 1.0;
    fit.rolloff_db_per_octave = 6.0 * (fit.alpha + 1.0);
    return fit;
}

FilterSamples sample_standard_grid(const FilterFunction& ff, double omega_tau_min,
                                   double omega_tau_max, int points_per_decade) {
    if (!(ff.tau > 0.0)) throw ValidationError("filter has no time scale");
    double lx = std::log10(omega_tau_min);
    double hx = std::log10(omega_tau_max);
    int n = static_cast<int>(std::lround((hx - lx) * points_per_decade)) + 1;
    FilterSamples out;
    out.omega.reserve(n);
    out.value.reserve(n);
    for (int k = 0; k < n; ++k) {
        double wt = std::pow(10.0, lx + (hx - lx) * k / (n - 1));
        double w = wt / ff.tau;
        out.omega.push_back(w);
        out.value.push_back(ff.eval(w));
    }
    return out;
}

template PulseZRow<double> primitive_pi_cv<double>(double, double);
template PulseZRow<qreal> primitive_pi_cv<qreal>(qreal, qreal);
template PulseZRow<double> dcg_not_cv<double>(double, double);
template PulseZRow<qreal> dcg_not_cv<qreal>(qreal, qreal);
template Cx<double> bang_bang_control_vector<double>(const std::vector<double>&, double,
                                                     double, bool*);
template Cx<qreal> bang_bang_control_vector<qreal>(const std::vector<qreal>&, qreal,
                                                   qreal, bool*);
template std::array<Cx<double>, 3> dd_control_vector<double>(const DDSpec&, double);
template std::array<Cx<qreal>, 3> dd_control_vector<qreal>(const DDSpec&, qreal);
template Cx<double> dd_rzz_pulse_terms_zeroed<double>(const DDSpec&, double);
template Cx<qreal> dd_rzz_pulse_terms_zeroed<qreal>(const DDSpec&, qreal);

}  // namespace qcf
