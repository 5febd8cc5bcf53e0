#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qcfilter/fidelity.hpp"
#include "qcfilter/filters.hpp"
#include "qcfilter/mc.hpp"
#include "qcfilter/noise.hpp"
#include "qcfilter/sequence.hpp"
#include "qcfilter/su2.hpp"

namespace py = pybind11;
using namespace qcf;

namespace {

Vec3 to_vec3(py::sequence s) {
    if (s.size() != 3) throw py::value_error("expected a 3-vector");
    return {s[0].cast<double>(), s[1].cast<double>(), s[2].cast<double>()};
}

py::array_t<double> mat3_to_array(const Mat3& m) {
    py::array_t<double> out({3, 3});
    auto r = out.mutable_unchecked<2>();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = m(i, j);
    return out;
}

py::array_t<std::complex<double>> mat3c_to_array(const Mat3c& m) {
    py::array_t<std::complex<double>> out({3, 3});
    auto r = out.mutable_unchecked<2>();
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = m[3 * i + j];
    return out;
}

Precision parse_precision(const std::string& s) {
    if (s == "double") return Precision::dbl;
    if (s == "extended") return Precision::extended;
    throw py::value_error("precision must be 'double' or 'extended'");
}

Axis parse_axis(const std::string& s) {
    if (s == "x") return Axis::x;
    if (s == "y") return Axis::y;
    if (s == "z") return Axis::z;
    throw py::value_error("axis must be 'x', 'y' or 'z'");
}

PulseKind parse_pulse(const std::string& s) {
    if (s == "bang_bang") return PulseKind::bang_bang;
    if (s == "primitive_pi") return PulseKind::primitive_pi;
    if (s == "dcg_not") return PulseKind::dcg_not;
    throw py::value_error("pulse must be bang_bang, primitive_pi or dcg_not");
}

py::array_t<double> eval_filter(const FilterFunction& ff, py::array_t<double> omega) {
    auto w = omega.unchecked<1>();
    py::array_t<double> out(w.shape(0));
    auto o = out.mutable_unchecked<1>();
    for (py::ssize_t k = 0; k < w.shape(0); ++k) o(k) = ff.eval(w(k));
    return out;
}

}  // namespace

PYBIND11_MODULE(_qcfilter, m) {
    m.doc() = "generalized filter functions and fidelities for piecewise-constant "
              "single-qubit control under classical noise";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<NumericsError>(m, "NumericsError", PyExc_ArithmeticError);

    py::class_<SU2>(m, "SU2")
        .def_static("identity", &SU2::identity)
        .def_static(
            "from_axis_angle",
            [](double theta, py::sequence axis) {
                return SU2::from_axis_angle(theta, to_vec3(axis));
            },
            py::arg("theta"), py::arg("axis"))
        .def("dagger", &SU2::dagger)
        .def("rotation_angle", &SU2::rotation_angle)
        .def("error_vector",
             [](const SU2& u) {
                 Vec3 a = u.error_vector();
                 return py::make_tuple(a.x, a.y, a.z);
             })
        .def("matrix",
             [](const SU2& u) {
                 auto v = u.matrix();
                 py::array_t<std::complex<double>> out({2, 2});
                 auto r = out.mutable_unchecked<2>();
                 r(0, 0) = v[0];
                 r(0, 1) = v[1];
                 r(1, 0) = v[2];
                 r(1, 1) = v[3];
                 return out;
             })
        .def("__matmul__", [](const SU2& a, const SU2& b) { return compose(a, b); });

    m.def("compose", &compose);
    m.def("so3_from_su2", [](const SU2& u) { return mat3_to_array(so3_from_su2(u)); });
    m.def("trace_fidelity", &trace_fidelity);

    py::class_<ControlSegment>(m, "ControlSegment")
        .def_static("planar", &ControlSegment::planar, py::arg("duration"),
                    py::arg("rate"), py::arg("axis_phase") = 0.0)
        .def_static("free", &ControlSegment::free, py::arg("duration"))
        .def_static("z_rotation", &ControlSegment::z_rotation, py::arg("duration"),
                    py::arg("rate"))
        .def_readonly("duration", &ControlSegment::duration)
        .def_readonly("rate", &ControlSegment::rate)
        .def_readonly("axis_phase", &ControlSegment::axis_phase);

    py::class_<ControlSequence>(m, "ControlSequence")
        .def(py::init<std::vector<ControlSegment>>())
        .def_property_readonly("total_time", &ControlSequence::total_time)
        .def_property_readonly("target", &ControlSequence::target)
        .def("cumulative_operators", &ControlSequence::cumulative_operators)
        .def("control_matrix",
             [](const ControlSequence& s, double t) {
                 return mat3_to_array(s.control_matrix(t));
             })
        .def("spectral_matrix", [](const ControlSequence& s, double w) {
            return mat3c_to_array(s.spectral_matrix(w));
        });

    py::class_<SpectralControlMatrix>(m, "SpectralControlMatrix")
        .def(py::init<const ControlSequence&>())
        .def_property_readonly("total_time", &SpectralControlMatrix::total_time)
        .def("__call__",
             [](const SpectralControlMatrix& r, double w) { return mat3c_to_array(r(w)); })
        .def("row_norm2", [](const SpectralControlMatrix& r, const std::string& axis,
                             double w) {
            return r.row_norm2(static_cast<int>(parse_axis(axis)), w);
        });

    m.def("cp_locations", &cp_locations);
    m.def("udd_locations", &udd_locations);

    py::class_<DDSpec>(m, "DDSpec")
        .def_static(
            "make",
            [](std::vector<double> locations, double tau, double tau_p,
               const std::string& pulse) {
                return DDSpec::make(std::move(locations), tau, tau_p, parse_pulse(pulse));
            },
            py::arg("locations"), py::arg("tau"), py::arg("tau_p"), py::arg("pulse"))
        .def_static(
            "cp",
            [](int n, double tau, double tau_p, const std::string& pulse) {
                return DDSpec::cp(n, tau, tau_p, parse_pulse(pulse));
            },
            py::arg("n"), py::arg("tau"), py::arg("tau_p"), py::arg("pulse"))
        .def_static(
            "udd",
            [](int n, double tau, double tau_p, const std::string& pulse) {
                return DDSpec::udd(n, tau, tau_p, parse_pulse(pulse));
            },
            py::arg("n"), py::arg("tau"), py::arg("tau_p"), py::arg("pulse"))
        .def_readonly("locations", &DDSpec::locations)
        .def_readonly("tau", &DDSpec::tau)
        .def_readonly("tau_p", &DDSpec::tau_p);

    m.def("build_dd_sequence", &build_dd_sequence);
    m.def("primitive_pi_sequence", &primitive_pi_sequence);
    m.def("dcg_not_sequence", &dcg_not_sequence);

    py::class_<FilterFunction>(m, "FilterFunction")
        .def_property_readonly("tau", [](const FilterFunction& f) { return f.tau; })
        .def_property_readonly("quad_coeff",
                               [](const FilterFunction& f) { return f.quad_coeff; })
        .def("__call__", [](const FilterFunction& f, double w) { return f.eval(w); })
        .def("eval", &eval_filter);

    m.def(
        "first_order_filter",
        [](const SpectralControlMatrix& r, const std::string& axis) {
            return first_order_filter(r, parse_axis(axis));
        },
        py::arg("r"), py::arg("axis") = "z");
    m.def(
        "dd_filter",
        [](const DDSpec& spec, const std::string& precision) {
            return dd_filter(spec, parse_precision(precision));
        },
        py::arg("spec"), py::arg("precision") = "double");
    m.def(
        "pulse_filter",
        [](const std::string& kind, double tau_pi, const std::string& precision) {
            return pulse_filter(parse_pulse(kind), tau_pi, parse_precision(precision));
        },
        py::arg("kind"), py::arg("tau_pi"), py::arg("precision") = "double");
    m.def(
        "assembled_filter",
        [](const ControlSequence& seq, const std::string& axis,
           const std::string& precision) {
            return assembled_filter(seq, parse_axis(axis), parse_precision(precision));
        },
        py::arg("seq"), py::arg("axis") = "z", py::arg("precision") = "double");

    m.def(
        "suppression_order",
        [](const FilterFunction& ff, double w_lo, double w_hi, double scale, int points) {
            SuppressionFit fit = suppression_order(ff, w_lo, w_hi, scale, points);
            py::dict d;
            d["alpha"] = fit.alpha;
            d["slope"] = fit.slope;
            d["rolloff_db_per_octave"] = fit.rolloff_db_per_octave;
            return d;
        },
        py::arg("ff"), py::arg("w_lo") = 1e-3, py::arg("w_hi") = 1e-2,
        py::arg("scale") = 0.0, py::arg("points") = 40);

    py::class_<AxisSpectrum>(m, "AxisSpectrum")
        .def("psd", &AxisSpectrum::psd)
        .def("variance", &AxisSpectrum::variance)
        .def("autocorrelation", &AxisSpectrum::autocorrelation)
        .def_property_readonly("cutoff", &AxisSpectrum::cutoff);

    m.def("gaussian_psd", &gaussian_psd, py::arg("delta_beta"), py::arg("sigma"));

    py::class_<NoiseSpectrum>(m, "NoiseSpectrum")
        .def(py::init<>())
        .def("set",
             [](NoiseSpectrum& n, const std::string& axis, const AxisSpectrum& s) {
                 n.set(parse_axis(axis), s);
             })
        .def_static("single_axis",
                    [](const std::string& axis, const AxisSpectrum& s) {
                        return NoiseSpectrum::single_axis(parse_axis(axis), s);
                    })
        .def("variance_total", &NoiseSpectrum::variance_total);

    m.def("smallness_xi", &smallness_xi);
    m.def(
        "magnus_convergence_check",
        [](const NoiseSpectrum& spec, double tau, double c_m) {
            auto c = magnus_convergence_check(spec, tau, c_m);
            py::dict d;
            d["converges"] = c.converges;
            d["xi"] = c.xi;
            d["bound"] = c.bound;
            return d;
        },
        py::arg("spec"), py::arg("tau"), py::arg("c_m") = 3.0);

    m.def("chi_overlap", &chi_overlap);
    m.def("fidelity_first_order", &fidelity_first_order);
    m.def("universal_first_order", [](const SpectralControlMatrix& r,
                                      const NoiseSpectrum& spec) {
        auto u = universal_first_order(r, spec);
        py::dict d;
        d["per_axis"] = py::make_tuple(u.per_axis[0], u.per_axis[1], u.per_axis[2]);
        d["total"] = u.total;
        return d;
    });
    m.def("a1_time_domain", &a1_time_domain, py::arg("seq"), py::arg("spec"),
          py::arg("rel_tol") = 1e-7);
    m.def(
        "higher_order_terms",
        [](const ControlSequence& seq, const NoiseSpectrum& spec, int grid_n) {
            auto h = higher_order_terms(seq, spec, grid_n);
            py::dict d;
            d["a2_sq"] = h.a2_sq;
            d["a1a3"] = h.a1a3;
            d["a1_4"] = h.a1_4;
            d["bound_a2_sq"] = h.bound_a2_sq;
            d["bound_a1a3"] = h.bound_a1a3;
            d["bound_a1_4"] = h.bound_a1_4;
            return d;
        },
        py::arg("seq"), py::arg("spec"), py::arg("grid_n") = 48);

    py::class_<Trajectory>(m, "Trajectory")
        .def_static(
            "constant",
            [](py::sequence beta, double tau, double dt) {
                return Trajectory::constant(to_vec3(beta), tau, dt);
            },
            py::arg("beta"), py::arg("tau"), py::arg("dt"))
        .def_readonly("dt", &Trajectory::dt)
        .def_readonly("tau", &Trajectory::tau)
        .def_readonly("times", &Trajectory::times)
        .def("samples",
             [](const Trajectory& t, const std::string& axis) {
                 return t.samples[static_cast<int>(parse_axis(axis))];
             })
        .def("value", [](const Trajectory& t, double time) {
            Vec3 v = t.value(time);
            return py::make_tuple(v.x, v.y, v.z);
        });

    m.def("synthesize_trajectory", &synthesize_trajectory, py::arg("spec"),
          py::arg("tau"), py::arg("dt"), py::arg("seed"), py::arg("k_components") = 512);
    m.def(
        "evolve",
        [](const ControlSequence& seq, const Trajectory& traj, bool check) {
            return evolve(seq, traj, check ? StepCheck::on : StepCheck::off);
        },
        py::arg("seq"), py::arg("traj"), py::arg("check") = true);

    py::class_<EnsembleConfig>(m, "EnsembleConfig")
        .def(py::init<>())
        .def_readwrite("realizations", &EnsembleConfig::realizations)
        .def_readwrite("dt", &EnsembleConfig::dt)
        .def_readwrite("seed", &EnsembleConfig::seed)
        .def_readwrite("k_components", &EnsembleConfig::k_components);

    m.def("ensemble_fidelity", [](const ControlSequence& seq, const NoiseSpectrum& spec,
                                  const EnsembleConfig& cfg) {
        auto r = ensemble_fidelity(seq, spec, cfg);
        py::dict d;
        d["F_av"] = r.f_av;
        d["stderr"] = r.std_error;
        d["n_realizations"] = r.realizations;
        d["seed"] = r.seed;
        d["dt"] = r.dt;
        return d;
    });
    m.def("magnus_estimates", [](const ControlSequence& seq, const Trajectory& traj) {
        auto e = magnus_estimates(seq, traj);
        py::dict d;
        d["a1"] = py::make_tuple(e.a1.x, e.a1.y, e.a1.z);
        d["a2"] = py::make_tuple(e.a2.x, e.a2.y, e.a2.z);
        return d;
    });
}
