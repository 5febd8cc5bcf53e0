#include "qcfilter/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "qcfilter/errors.hpp"
#include "qcfilter/fidelity.hpp"
#include "qcfilter/mc.hpp"
#include "qcfilter/rng.hpp"

namespace qcf::cli {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::filesystem::path resolve_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("QCFILTER_OUT_DIR")) p = std::filesystem::path(dir) / p;
    }
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return p;
}

json load_config(const std::string& config_path, const std::string& preset) {
    if (!config_path.empty() && !preset.empty())
        throw ConfigError("give either --config or --preset, not both");
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open config file: " + config_path);
        try {
            return json::parse(in);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config parse error in ") + config_path + ": " +
                              e.what());
        }
    }
    if (!preset.empty()) return preset_config(preset);
    throw ConfigError("a run needs --config <file> or --preset <name>");
}

double require_number(const json& j, const char* field) {
    if (!j.contains(field) || !j[field].is_number())
        throw ConfigError(std::string("missing or non-numeric field: ") + field);
    return j[field].get<double>();
}

std::vector<double> sweep_grid(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int k = 0; k < n; ++k)
        v[k] = lo * std::pow(hi / lo, n == 1 ? 0.0 : double(k) / (n - 1));
    return v;
}

}  // namespace

json preset_config(const std::string& name) {
    auto dd = [](const char* rule, int n, double tau, const char* pulse, double tau_p) {
        json j;
        j["sequence"]["dd"] = {{"rule", rule}, {"n", n}, {"tau", tau}};
        j["sequence"]["dd"]["pulse"] = {{"kind", pulse}, {"tau_p", tau_p}};
        return j;
    };
    auto fig4 = [](const char* gate, double sigma, std::vector<double> taus) {
        json j;
        j["sweep"] = {{"variable", "tau_pi"}, {"values", taus}};
        j["gate"] = {{"kind", gate}};
        j["noise"]["axes"] = json::array({{{"axis", "z"},
                                           {"type", "gaussian"},
                                           {"delta_beta", 0.5},
                                           {"sigma", sigma},
                                           {"convention", "paper"}}});
        j["ensemble"] = {{"realizations", 100}, {"seed", 7}};
        return j;
    };

    if (name == "free-evolution") {
        json j;
        j["sequence"]["segments"] =
            json::array({{{"kind", "free_evolution"}, {"duration", 1.0}}});
        return j;
    }
    if (name == "primitive-pi") {
        json j;
        j["sequence"]["gate"] = {{"kind", "primitive_pi"}, {"tau_pi", 1.0}};
        return j;
    }
    if (name == "dcg") {
        json j;
        j["sequence"]["gate"] = {{"kind", "dcg_not"}, {"tau_pi", 1.0}};
        return j;
    }
    if (name == "cp6-bangbang") return dd("cp", 6, 1.0, "bang_bang", 0.0);
    if (name == "cp6-primitive") return dd("cp", 6, 1.0, "primitive_pi", 1.0 / 60.0);
    if (name == "cp6-dcg") return dd("cp", 6, 1.0, "dcg_not", 1.0 / 60.0);
    if (name == "udd2-bangbang") return dd("udd", 2, 1.0, "bang_bang", 0.0);
    if (name == "udd4-bangbang") return dd("udd", 4, 1.0, "bang_bang", 0.0);
    if (name == "udd6-bangbang") return dd("udd", 6, 1.0, "bang_bang", 0.0);
    if (name == "udd6-primitive") return dd("udd", 6, 1.0, "primitive_pi", 1.0 / 60.0);
    if (name == "udd6-dcg") return dd("udd", 6, 1.0, "dcg_not", 1.0 / 60.0);

    std::vector<double> fig4_taus = sweep_grid(0.1, 1.0, 8);
    if (name == "fig4-primitive-sigma1" || name == "fig4-primitive-\xcf\x83"
                                           "1")
        return fig4("primitive_pi", 1.0, fig4_taus);
    if (name == "fig4-primitive-sigma01") return fig4("primitive_pi", 0.1, fig4_taus);
    if (name == "fig4-primitive-sigma10") return fig4("primitive_pi", 10.0, fig4_taus);
    if (name == "fig4-dcg-sigma1") return fig4("dcg_not", 1.0, fig4_taus);
    if (name == "fig4-breakdown") {
        auto taus = sweep_grid(0.1, 1.0, 5);
        for (double t : {2.0, 5.0, 10.0, 20.0, 50.0}) taus.push_back(t);
        return fig4("primitive_pi", 1.0, taus);
    }
    throw ConfigError("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
    return {"free-evolution",    "primitive-pi",
            "dcg",               "cp6-bangbang",
            "cp6-primitive",     "cp6-dcg",
            "udd2-bangbang",     "udd4-bangbang",
            "udd6-bangbang",     "udd6-primitive",
            "udd6-dcg",          "fig4-primitive-sigma1",
            "fig4-primitive-sigma01", "fig4-primitive-sigma10",
            "fig4-dcg-sigma1",   "fig4-breakdown"};
}

SequenceSource sequence_from_json(const json& sec) {
    SequenceSource out;
    if (sec.contains("segments")) {
        if (sec["segments"].empty())
            throw ConfigError("sequence needs at least one segment");
        std::vector<ControlSegment> segs;
        for (const auto& sj : sec["segments"]) {
            std::string kind = sj.value("kind", "");
            double dur = require_number(sj, "duration");
            if (kind == "planar_rotation")
                segs.push_back(ControlSegment::planar(dur, require_number(sj, "rate"),
                                                      sj.value("axis_phase", 0.0)));
            else if (kind == "free_evolution")
                segs.push_back(ControlSegment::free(dur));
            else if (kind == "z_rotation")
                segs.push_back(ControlSegment::z_rotation(dur, require_number(sj, "rate")));
            else
                throw ConfigError("unknown segment kind: '" + kind + "'");
        }
        out.seq = ControlSequence(segs);
        out.tau = out.seq->total_time();
        out.fit_scale = out.tau;
        json rs;
        rs["segments"] = json::array();
        for (const auto& s : segs) {
            json sj;
            sj["duration"] = s.duration;
            switch (s.kind) {
                case SegmentKind::planar_rotation:
                    sj["kind"] = "planar_rotation";
                    sj["rate"] = s.rate;
                    sj["axis_phase"] = s.axis_phase;
                    break;
                case SegmentKind::free_evolution:
                    sj["kind"] = "free_evolution";
                    break;
                case SegmentKind::z_rotation:
                    sj["kind"] = "z_rotation";
                    sj["rate"] = s.rate;
                    break;
            }
            rs["segments"].push_back(sj);
        }
        out.resolved = rs;
        return out;
    }
    if (sec.contains("dd")) {
        const json& dj = sec["dd"];
        double tau = require_number(dj, "tau");
        std::vector<double> locations;
        std::string rule = dj.value("rule", "custom");
        LocationRule lrule = LocationRule::custom;
        if (rule == "cp") {
            locations = cp_locations(dj.value("n", 0));
            lrule = LocationRule::cp;
        } else if (rule == "udd") {
            locations = udd_locations(dj.value("n", 0));
            lrule = LocationRule::udd;
        } else if (rule == "custom") {
            locations = dj.value("locations", std::vector<double>{});
        } else {
            throw ConfigError("unknown dd rule: '" + rule + "'");
        }
        std::string pk = dj.contains("pulse") ? dj["pulse"].value("kind", "bang_bang")
                                              : std::string("bang_bang");
        double tau_p = dj.contains("pulse") ? dj["pulse"].value("tau_p", 0.0) : 0.0;
        PulseKind kind;
        if (pk == "bang_bang")
            kind = PulseKind::bang_bang;
        else if (pk == "primitive_pi")
            kind = PulseKind::primitive_pi;
        else if (pk == "dcg_not")
            kind = PulseKind::dcg_not;
        else
            throw ConfigError("unknown pulse kind: '" + pk + "'");
        out.dd = DDSpec::make(locations, tau, tau_p, kind, lrule);
        if (kind != PulseKind::bang_bang) out.seq = build_dd_sequence(*out.dd);
        out.tau = tau;
        out.fit_scale = tau;
        // the rule is preserved so extended-precision reruns regenerate
        // identical locations
        out.resolved["dd"] = {{"rule", rule},
                              {"tau", tau},
                              {"pulse", {{"kind", pk}, {"tau_p", tau_p}}}};
        if (lrule == LocationRule::custom)
            out.resolved["dd"]["locations"] = locations;
        else
            out.resolved["dd"]["n"] = dj.value("n", 0);
        return out;
    }
    if (sec.contains("gate")) {
        const json& gj = sec["gate"];
        std::string kind = gj.value("kind", "");
        double tau_pi = require_number(gj, "tau_pi");
        if (kind == "primitive_pi") {
            out.seq = primitive_pi_sequence(tau_pi);
        } else if (kind == "dcg_not") {
            out.seq = dcg_not_sequence(tau_pi);
        } else {
            throw ConfigError("unknown gate kind: '" + kind + "'");
        }
        out.tau = out.seq->total_time();
        out.fit_scale = tau_pi;
        out.resolved["gate"] = {{"kind", kind}, {"tau_pi", tau_pi}};
        return out;
    }
    throw ConfigError("sequence section needs 'segments', 'dd' or 'gate'");
}

NoiseSpectrum noise_from_json(const json& sec, std::string* convention_note) {
    NoiseSpectrum spec;
    if (!sec.contains("axes") || !sec["axes"].is_array())
        throw ConfigError("noise section needs an 'axes' array");
    for (const auto& aj : sec["axes"]) {
        std::string axis_s = aj.value("axis", "z");
        Axis axis;
        if (axis_s == "x")
            axis = Axis::x;
        else if (axis_s == "y")
            axis = Axis::y;
        else if (axis_s == "z")
            axis = Axis::z;
        else
            throw ConfigError("noise axis must be x, y or z");
        std::string type = aj.value("type", "");
        if (type == "gaussian") {
            double db = require_number(aj, "delta_beta");
            double sigma = require_number(aj, "sigma");
            if (aj.value("convention", "library") == std::string("paper")) {
                // H = beta sigma_z/2 convention maps onto the library's
                // H = beta.sigma by halving the amplitude (S -> S/4)
                db /= 2.0;
                if (convention_note)
                    *convention_note += "axis " + axis_s +
                                        ": paper half-operator convention, delta_beta " +
                                        fmt(db * 2.0) + " -> " + fmt(db) + "; ";
            }
            spec.set(axis, gaussian_psd(db, sigma));
        } else if (type == "power_law") {
            spec.set(axis, AxisSpectrum::power_law(
                               require_number(aj, "amplitude"),
                               require_number(aj, "exponent"), aj.value("omega_min", 0.0),
                               require_number(aj, "cutoff")));
        } else if (type == "tabulated") {
            std::vector<double> w, s;
            if (aj.contains("file")) {
                std::ifstream in(aj["file"].get<std::string>());
                if (!in)
                    throw ConfigError("cannot open tabulated spectrum file: " +
                                      aj["file"].get<std::string>());
                double a, b;
                while (in >> a >> b) {
                    w.push_back(a);
                    s.push_back(b);
                }
            } else {
                w = aj.value("omega", std::vector<double>{});
                s = aj.value("s", std::vector<double>{});
            }
            spec.set(axis, AxisSpectrum::tabulated(std::move(w), std::move(s)));
        } else {
            throw ConfigError("unknown noise type: '" + type + "'");
        }
    }
    return spec;
}

std::uint64_t sequence_hash(const json& resolved_sequence) {
    std::string dump = resolved_sequence.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {

struct GridSpec {
    double omega_tau_min = 1e-4;
    double omega_tau_max = 1e2;
    int points_per_decade = 200;
};

GridSpec grid_from_json(const json& cfg) {
    GridSpec g;
    if (cfg.contains("grid")) {
        const json& gj = cfg["grid"];
        g.omega_tau_min = gj.value("omega_tau_min", g.omega_tau_min);
        g.omega_tau_max = gj.value("omega_tau_max", g.omega_tau_max);
        g.points_per_decade = gj.value("points_per_decade", g.points_per_decade);
        if (!(g.omega_tau_max > g.omega_tau_min) || g.points_per_decade < 1)
            throw ConfigError("invalid grid section");
    }
    return g;
}

EnsembleConfig ensemble_from_json(const json& cfg, std::uint64_t seed_override,
                                  int realizations_override) {
    EnsembleConfig e;
    if (cfg.contains("ensemble")) {
        const json& ej = cfg["ensemble"];
        e.realizations = ej.value("realizations", e.realizations);
        e.dt = ej.value("dt", 0.0);
        e.seed = ej.value("seed", e.seed);
        e.k_components = ej.value("components", e.k_components);
    }
    if (seed_override) e.seed = seed_override;
    if (realizations_override > 0) e.realizations = realizations_override;
    return e;
}

struct FilterOutput {
    std::vector<double> omega;
    std::array<std::vector<double>, 3> f;  // F_x, F_y, F_z
    std::vector<std::string> axes_computed;
};

FilterOutput sample_filters(const SequenceSource& src, const GridSpec& grid,
                            Precision prec) {
    FilterOutput out;
    double lx = std::log10(grid.omega_tau_min);
    double hx = std::log10(grid.omega_tau_max);
    int n = static_cast<int>(std::lround((hx - lx) * grid.points_per_decade)) + 1;
    out.omega.resize(n);
    for (int k = 0; k < n; ++k)
        out.omega[k] = std::pow(10.0, lx + (hx - lx) * k / (n - 1)) / src.tau;

    if (src.seq) {
        CompiledSequence c = src.seq->compile();
        for (int i = 0; i < 3; ++i) out.f[i].resize(n);
        for (int k = 0; k < n; ++k) {
            if (prec == Precision::extended) {
                auto m = sequence_spectral_matrix<qreal>(c, qreal(out.omega[k]));
                for (int i = 0; i < 3; ++i)
                    out.f[i][k] = static_cast<double>(m[3 * i].norm2() +
                                                      m[3 * i + 1].norm2() +
                                                      m[3 * i + 2].norm2());
            } else {
                auto m = sequence_spectral_matrix<double>(c, out.omega[k]);
                for (int i = 0; i < 3; ++i)
                    out.f[i][k] = m[3 * i].norm2() + m[3 * i + 1].norm2() +
                                  m[3 * i + 2].norm2();
            }
        }
        out.axes_computed = {"x", "y", "z"};
    } else {
        out.f[0].assign(n, 0.0);
        out.f[1].assign(n, 0.0);
        out.f[2].resize(n);
        FilterFunction fz = dd_filter(*src.dd, prec);
        for (int k = 0; k < n; ++k) out.f[2][k] = fz.eval(out.omega[k]);
        out.axes_computed = {"z"};
    }
    return out;
}

FilterFunction z_filter(const SequenceSource& src, Precision prec) {
    if (src.seq) return assembled_filter(*src.seq, Axis::z, prec);
    return dd_filter(*src.dd, prec);
}

int cmd_filter(const json& cfg, const std::string& out_path, Precision prec) {
    if (!cfg.contains("sequence")) throw ConfigError("filter needs a sequence section");
    SequenceSource src = sequence_from_json(cfg["sequence"]);
    GridSpec grid = grid_from_json(cfg);
    FilterOutput data = sample_filters(src, grid, prec);

    SuppressionFit fit = suppression_order(z_filter(src, prec), 1e-3, 1e-2,
                                           src.fit_scale);

    auto path = resolve_out(out_path);
    std::ofstream csv(path);
    if (!csv) throw ConfigError("cannot write output: " + path.string());
    csv << "omega,omega_tau,F_x,F_y,F_z\n";
    for (std::size_t k = 0; k < data.omega.size(); ++k)
        csv << fmt(data.omega[k]) << ',' << fmt(data.omega[k] * src.tau) << ','
            << fmt(data.f[0][k]) << ',' << fmt(data.f[1][k]) << ',' << fmt(data.f[2][k])
            << '\n';

    json meta;
    meta["config"]["sequence"] = src.resolved;
    meta["config"]["grid"] = {{"omega_tau_min", grid.omega_tau_min},
                              {"omega_tau_max", grid.omega_tau_max},
                              {"points_per_decade", grid.points_per_decade}};
    char hash_buf[32];
    std::snprintf(hash_buf, sizeof hash_buf, "%016llx",
                  static_cast<unsigned long long>(sequence_hash(src.resolved)));
    meta["sequence_hash"] = hash_buf;
    if (src.dd) {
        meta["pulse_kind"] = src.resolved["dd"]["pulse"]["kind"];
        meta["n"] = src.dd->n();
        meta["tau_p_over_tau"] = src.dd->tau_p / src.dd->tau;
    }
    meta["axes"] = data.axes_computed;
    meta["columns"] = {"omega", "omega_tau", "F_x", "F_y", "F_z"};
    meta["alpha_fit"] = {{"alpha", fit.alpha},
                         {"slope", fit.slope},
                         {"rolloff_db_per_octave", fit.rolloff_db_per_octave},
                         {"window_scaled", {1e-3, 1e-2}},
                         {"scale", src.fit_scale},
                         {"precision", prec == Precision::extended ? "extended" : "double"}};
    auto meta_path = path;
    meta_path.replace_extension(".meta.json");
    std::ofstream mj(meta_path);
    mj << meta.dump(2) << '\n';
    return 0;
}

int cmd_locations(const std::string& rule, int n, const std::string& out_path) {
    std::vector<double> d;
    if (rule == "cp")
        d = cp_locations(n);
    else if (rule == "udd")
        d = udd_locations(n);
    else
        throw ConfigError("locations rule must be cp or udd");
    std::string line;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) line += ", ";
        line += fmt(d[i]);
    }
    line += '\n';
    if (out_path.empty()) {
        std::fputs(line.c_str(), stdout);
    } else {
        std::ofstream out(resolve_out(out_path));
        out << line;
    }
    return 0;
}

int cmd_fidelity(const json& cfg, const std::string& out_path, bool higher_order,
                 int grid_n, bool time_domain) {
    if (!cfg.contains("sequence") || !cfg.contains("noise"))
        throw ConfigError("fidelity needs sequence and noise sections");
    SequenceSource src = sequence_from_json(cfg["sequence"]);
    std::string note;
    NoiseSpectrum spec = noise_from_json(cfg["noise"], &note);

    json rep;
    if (time_domain) {
        if (!src.seq)
            throw ConfigError("the time-domain route needs a piecewise sequence");
        double a1 = a1_time_domain(*src.seq, spec);
        double xi = smallness_xi(spec, src.tau);
        rep["chi"] = a1;
        rep["f_av"] = fidelity_first_order(std::max(0.0, a1));
        rep["xi2"] = xi * xi;
        rep["weak_noise_valid"] = xi * xi < 0.1;
        rep["method"] = "time-domain";
    } else if (src.seq) {
        FidelityReport r = fidelity_report(*src.seq, spec, higher_order, grid_n);
        rep["chi"] = r.chi;
        rep["f_av"] = r.f_av;
        rep["a1_by_axis"] = {{"x", r.a1_by_axis[0]}, {"y", r.a1_by_axis[1]},
                             {"z", r.a1_by_axis[2]}};
        rep["xi2"] = r.xi2;
        rep["weak_noise_valid"] = r.weak_noise_valid;
        rep["method"] = r.method;
        if (r.higher) {
            rep["higher_order"] = {{"a2_sq", r.higher->a2_sq},
                                   {"a1a3", r.higher->a1a3},
                                   {"a1_4", r.higher->a1_4},
                                   {"bound_a2_sq", r.higher->bound_a2_sq},
                                   {"bound_a1a3", r.higher->bound_a1a3},
                                   {"bound_a1_4", r.higher->bound_a1_4},
                                   {"grid", r.higher->grid}};
        }
    } else {
        // bang-bang: dephasing-only closed form
        double chi = chi_overlap(z_filter(src, Precision::dbl), spec);
        double xi = smallness_xi(spec, src.tau);
        rep["chi"] = chi;
        rep["f_av"] = fidelity_first_order(chi);
        rep["a1_by_axis"] = {{"x", 0.0}, {"y", 0.0}, {"z", chi}};
        rep["xi2"] = xi * xi;
        rep["weak_noise_valid"] = xi * xi < 0.1;
        rep["method"] = "frequency";
    }
    rep["convention_note"] = note;
    std::string dump = rep.dump(2) + "\n";
    if (out_path.empty()) {
        std::fputs(dump.c_str(), stdout);
    } else {
        std::ofstream out(resolve_out(out_path));
        out << dump;
    }
    return 0;
}

int cmd_simulate(const json& cfg, const std::string& out_path,
                 std::uint64_t seed_override, int realizations_override,
                 const std::string& dump_path) {
    if (!cfg.contains("sequence") || !cfg.contains("noise"))
        throw ConfigError("simulate needs sequence and noise sections");
    SequenceSource src = sequence_from_json(cfg["sequence"]);
    if (!src.seq)
        throw ConfigError("simulate needs a piecewise sequence (bang-bang has none)");
    std::string note;
    NoiseSpectrum spec = noise_from_json(cfg["noise"], &note);
    EnsembleConfig ecfg = ensemble_from_json(cfg, seed_override, realizations_override);

    std::vector<double> per;
    EnsembleResult res = ensemble_fidelity(*src.seq, spec, ecfg,
                                           dump_path.empty() ? nullptr : &per);
    json rep;
    rep["F_av"] = res.f_av;
    rep["stderr"] = res.std_error;
    rep["n_realizations"] = res.realizations;
    rep["seed"] = res.seed;
    rep["dt"] = res.dt;
    rep["convention_note"] = note;
    std::string dump = rep.dump(2) + "\n";
    if (out_path.empty()) {
        std::fputs(dump.c_str(), stdout);
    } else {
        std::ofstream out(resolve_out(out_path));
        out << dump;
    }
    if (!dump_path.empty()) {
        std::ofstream dcsv(resolve_out(dump_path));
        dcsv << "realization,trace_fidelity\n";
        for (std::size_t k = 0; k < per.size(); ++k)
            dcsv << k << ',' << fmt(per[k]) << '\n';
    }
    return 0;
}

int cmd_compare(const json& cfg, const std::string& out_path,
                std::uint64_t seed_override, int realizations_override) {
    if (!cfg.contains("noise")) throw ConfigError("compare needs a noise section");
    std::string note;
    NoiseSpectrum spec = noise_from_json(cfg["noise"], &note);
    EnsembleConfig base = ensemble_from_json(cfg, seed_override, realizations_override);

    std::vector<double> values;
    std::string variable = "tau_pi";
    if (cfg.contains("sweep")) {
        variable = cfg["sweep"].value("variable", "tau_pi");
        values = cfg["sweep"].value("values", std::vector<double>{});
    }
    if (variable != "tau_pi") throw ConfigError("compare sweeps over tau_pi only");
    std::string gate = cfg.contains("gate") ? cfg["gate"].value("kind", "primitive_pi")
                                            : std::string("primitive_pi");

    auto path = resolve_out(out_path);
    std::ofstream csv(path);
    if (!csv) throw ConfigError("cannot write output: " + path.string());
    csv << "tau_pi,analytic_error,mc_error,mc_stderr,xi2,valid\n";
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        double tau_pi = values[idx];
        ControlSequence seq = gate == "dcg_not" ? dcg_not_sequence(tau_pi)
                                                : primitive_pi_sequence(tau_pi);
        SpectralControlMatrix r(seq);
        double analytic = universal_first_order(r, spec).total;
        EnsembleConfig ecfg = base;
        ecfg.seed = mix_seed(base.seed, 0x51000000ULL + idx);
        EnsembleResult mc = ensemble_fidelity(seq, spec, ecfg);
        double xi = smallness_xi(spec, seq.total_time());
        csv << fmt(tau_pi) << ',' << fmt(analytic) << ',' << fmt(1.0 - mc.f_av) << ','
            << fmt(mc.std_error) << ',' << fmt(xi * xi) << ','
            << (xi * xi < 0.1 ? "true" : "false") << '\n';
    }
    return 0;
}

int cmd_figure(const std::string& name, const std::string& out_dir,
               std::uint64_t seed_override, int realizations_override) {
    auto dir = resolve_out(out_dir.empty() ? std::string(".") : out_dir);
    std::filesystem::create_directories(dir);
    auto run_filter = [&](const std::string& preset, Precision prec) {
        json cfg = preset_config(preset);
        cmd_filter(cfg, (dir / (preset + ".csv")).string(), prec);
    };
    auto run_compare = [&](const std::string& preset) {
        json cfg = preset_config(preset);
        cmd_compare(cfg, (dir / (preset + ".csv")).string(), seed_override,
                    realizations_override);
    };
    if (name == "fig3a") {
        run_filter("primitive-pi", Precision::extended);
        run_filter("dcg", Precision::extended);
        run_filter("cp6-bangbang", Precision::extended);
        run_filter("cp6-primitive", Precision::extended);
        run_filter("cp6-dcg", Precision::extended);
        return 0;
    }
    if (name == "fig3b") {
        run_filter("udd6-bangbang", Precision::extended);
        run_filter("udd6-primitive", Precision::extended);
        run_filter("udd6-dcg", Precision::extended);
        return 0;
    }
    if (name == "fig4") {
        run_compare("fig4-primitive-sigma01");
        run_compare("fig4-primitive-sigma1");
        run_compare("fig4-primitive-sigma10");
        run_compare("fig4-dcg-sigma1");
        return 0;
    }
    throw ConfigError("unknown figure: " + name + " (fig3a, fig3b, fig4)");
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"generalized filter functions and fidelities for piecewise-constant "
                 "single-qubit control under classical noise"};
    app.require_subcommand(1);

    std::string config_path, preset, out_path, precision_s = "double", dump_path;
    std::uint64_t seed = 0;
    int realizations = 0;

    auto add_common = [&](CLI::App* sub, bool with_out_default) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--preset", preset, "named built-in configuration");
        auto* o = sub->add_option("--out", out_path, "output path");
        if (with_out_default) o->required();
        sub->add_option("--seed", seed, "RNG seed override");
        sub->add_option("--realizations", realizations, "realization count override");
        sub->add_option("--precision", precision_s, "double | extended")
            ->check(CLI::IsMember({"double", "extended"}));
    };

    auto* filter_cmd = app.add_subcommand("filter", "sampled filter functions + metadata");
    add_common(filter_cmd, true);

    auto* locations_cmd = app.add_subcommand("locations", "print cp/udd pulse locations");
    std::string rule;
    int loc_n = 0;
    locations_cmd->add_option("rule", rule, "cp | udd")->required();
    locations_cmd->add_option("n", loc_n, "pulse count")->required();
    locations_cmd->add_option("--out", out_path, "output path");

    auto* fidelity_cmd = app.add_subcommand("fidelity", "first-order fidelity report");
    add_common(fidelity_cmd, false);
    bool higher_order = false, time_domain = false;
    int grid_n = 48;
    fidelity_cmd->add_flag("--higher-order", higher_order,
                           "include fourth-order Magnus terms");
    fidelity_cmd->add_option("--grid", grid_n, "quadrature nodes per dimension");
    fidelity_cmd->add_flag("--time-domain", time_domain,
                           "first order via the time-domain double integral");

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo ensemble fidelity");
    add_common(simulate_cmd, false);
    simulate_cmd->add_option("--dump-realizations", dump_path,
                             "per-realization fidelity CSV");

    auto* compare_cmd = app.add_subcommand("compare", "analytic vs Monte Carlo sweep");
    add_common(compare_cmd, true);

    auto* figure_cmd = app.add_subcommand("figure", "write a full figure data set");
    std::string fig_name, out_dir;
    figure_cmd->add_option("--preset", fig_name, "fig3a | fig3b | fig4")->required();
    figure_cmd->add_option("--out-dir", out_dir, "output directory");
    figure_cmd->add_option("--seed", seed, "RNG seed override");
    figure_cmd->add_option("--realizations", realizations, "realization count override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    Precision prec = precision_s == "extended" ? Precision::extended : Precision::dbl;
    try {
        if (filter_cmd->parsed())
            return cmd_filter(load_config(config_path, preset), out_path, prec);
        if (locations_cmd->parsed()) return cmd_locations(rule, loc_n, out_path);
        if (fidelity_cmd->parsed())
            return cmd_fidelity(load_config(config_path, preset), out_path, higher_order,
                                grid_n, time_domain);
        if (simulate_cmd->parsed())
            return cmd_simulate(load_config(config_path, preset), out_path, seed,
                                realizations, dump_path);
        if (compare_cmd->parsed())
            return cmd_compare(load_config(config_path, preset), out_path, seed,
                               realizations);
        if (figure_cmd->parsed())
            return cmd_figure(fig_name, out_dir, seed, realizations);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericsError& e) {
        std::fprintf(stderr, "numerical validity error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}

}  // namespace qcf::cli
