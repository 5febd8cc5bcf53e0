#include "qcfilter/fidelity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "qcfilter/errors.hpp"
#include "qcfilter/quadrature.hpp"
#include "qcfilter/util.hpp"

namespace qcf {

namespace {

constexpr double kPi = std::numbers::pi;

double overlap_integral(const FilterFunction& ff, const AxisSpectrum& s) {
    double tau = ff.tau;
    double w_lo = 1e-4 / tau;
    double w_max = std::max(s.cutoff(), 50.0 / tau);

    // below w_lo the filter is replaced by its quadratic limit
    double head = integrate_adaptive(
        [&](double w) { return s.psd(w) * ff.quad_coeff; }, 0.0, w_lo,
        {1e-8, 0.0, 200, {}});

    AdaptiveOptions opts;
    opts.rel_tol = 1e-8;
    opts.max_intervals = 20000;
    // seed splits at the filter oscillation scale and the passband knee
    int n_splits = static_cast<int>(std::min(128.0, w_max * tau / kPi));
    for (int k = 1; k <= n_splits; ++k) opts.split_points.push_back(kPi * k / tau);
    if (n_splits >= 128) {
        // too oscillatory for per-lobe seeding: log-spaced seeds instead
        opts.split_points.clear();
        for (int k = 1; k < 64; ++k)
            opts.split_points.push_back(w_lo * std::pow(w_max / w_lo, k / 64.0));
    }
    double body = integrate_adaptive(
        [&](double w) { return s.psd(w) * ff.eval(w) / (w * w); }, w_lo, w_max, opts);
    return (head + body) / kPi;
}

}  // namespace

double chi_overlap(const FilterFunction& f_z, const NoiseSpectrum& spec) {
    if (!spec.has(Axis::z)) return 0.0;
    return overlap_integral(f_z, spec.axis(Axis::z));
}

double fidelity_first_order(double chi) {
    if (!(chi >= 0.0)) throw ValidationError("chi must be >= 0");
    return 0.5 * (1.0 + std::exp(-chi));
}

UniversalFirstOrder universal_first_order(const SpectralControlMatrix& r,
                                          const NoiseSpectrum& spec) {
    UniversalFirstOrder out;
    for (int i = 0; i < 3; ++i) {
        if (!spec.maybe(i)) continue;
        FilterFunction fi = first_order_filter(r, static_cast<Axis>(i));
        out.per_axis[i] = overlap_integral(fi, *spec.maybe(i));
        out.total += out.per_axis[i];
    }
    return out;
}

namespace {

// Correlation evaluator: analytic for Gaussian spectra, tabulated with
// linear interpolation otherwise (one quadrature per table entry, built
// once instead of per 4D-grid point).
class Correlation {
  public:
    Correlation(const AxisSpectrum& s, double t_span) {
        if (s.kind() == AxisSpectrum::Kind::gaussian) {
            analytic_ = true;
            amp_ = s.delta_beta() * s.delta_beta() / 4.0;
            inv2tc2_ = s.sigma() * s.sigma() / 2.0;
        } else {
            analytic_ = false;
            span_ = t_span;
            int n = 4096;
            table_.resize(n + 1);
            for (int k = 0; k <= n; ++k)
                table_[k] = s.autocorrelation(t_span * k / n);
        }
    }

    double operator()(double t) const {
        double at = std::abs(t);
        if (analytic_) return amp_ * std::exp(-at * at * inv2tc2_);
        double u = at / span_ * (table_.size() - 1);
        std::size_t k = std::min(static_cast<std::size_t>(u), table_.size() - 2);
        double f = u - k;
        return table_[k] + f * (table_[k + 1] - table_[k]);
    }

  private:
    bool analytic_ = true;
    double amp_ = 0.0, inv2tc2_ = 0.0, span_ = 1.0;
    std::vector<double> table_;
};

struct AxisData {
    int index;
    Correlation corr;
};

std::vector<AxisData> collect_axes(const NoiseSpectrum& spec, double t_span) {
    std::vector<AxisData> v;
    for (int i = 0; i < 3; ++i)
        if (spec.maybe(i)) v.push_back({i, Correlation(*spec.maybe(i), t_span)});
    return v;
}

// 1D quadrature mesh over the sequence resolving both the control
// rotation scale and the shortest correlation time.
void time_mesh(const ControlSequence& seq, double tc_min, int refine,
               std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    const int order = 12;
    std::vector<double> px, pw;
    for (std::size_t l = 0; l < seq.size(); ++l) {
        const auto& s = seq.segments()[l];
        double h = s.duration;
        if (s.rate > 0.0) h = std::min(h, kPi / (4.0 * s.rate));
        if (std::isfinite(tc_min)) h = std::min(h, tc_min / 3.0);
        int m = static_cast<int>(std::ceil(s.duration / h)) * refine;
        m = std::min(m, 4000);
        double a = seq.boundary(l);
        for (int p = 0; p < m; ++p) {
            gauss_nodes(order, a + s.duration * p / m, a + s.duration * (p + 1) / m, px,
                        pw);
            x.insert(x.end(), px.begin(), px.end());
            w.insert(w.end(), pw.begin(), pw.end());
        }
    }
}

}  // namespace

double a1_time_domain(const ControlSequence& seq, const NoiseSpectrum& spec,
                      double rel_tol) {
    double tau = seq.total_time();
    if (tau <= 0.0) return 0.0;
    auto axes = collect_axes(spec, tau);
    if (axes.empty()) return 0.0;
    double tc_min = spec.min_correlation_time();

    auto evaluate = [&](int refine) {
        std::vector<double> x, w;
        time_mesh(seq, tc_min, refine, x, w);
        std::size_t n = x.size();
        // cache control-matrix rows for the present axes
        std::vector<std::array<Vec3, 3>> rows(n);
        for (std::size_t a = 0; a < n; ++a) {
            Mat3 r = seq.control_matrix(x[a]);
            rows[a] = {r.row(0), r.row(1), r.row(2)};
        }
        KahanSum total;
        for (const auto& ax : axes) {
            int i = ax.index;
            for (std::size_t a = 0; a < n; ++a) {
                const Vec3& ra = rows[a][i];
                KahanSum inner;
                for (std::size_t b = 0; b < n; ++b)
                    inner.add(w[b] * ax.corr(x[a] - x[b]) * ra.dot(rows[b][i]));
                total.add(w[a] * inner.value());
            }
        }
        return total.value();
    };

    double coarse = evaluate(1);
    double fine = evaluate(2);
    double scale = std::max(std::abs(fine), 1e-300);
    if (std::abs(fine - coarse) > rel_tol * scale) {
        double finer = evaluate(4);
        if (std::abs(finer - fine) > rel_tol * std::max(std::abs(finer), 1e-300))
            throw NumericsError("a1 time-domain quadrature did not converge");
        return finer;
    }
    return fine;
}

namespace {

struct HigherOrderGrids {
    // outer nodes u (and x for the free dimensions) on (0,1)
    std::vector<double> u, wu;
};

// rows of the control matrix at an arbitrary set of times
std::vector<std::array<Vec3, 3>> rows_at(const ControlSequence& seq,
                                         const std::vector<double>& t) {
    std::vector<std::array<Vec3, 3>> rows(t.size());
    for (std::size_t k = 0; k < t.size(); ++k) {
        Mat3 r = seq.control_matrix(t[k]);
        rows[k] = {r.row(0), r.row(1), r.row(2)};
    }
    return rows;
}

// <a2^2> via the ordered-pair x ordered-pair product domain
double a2_squared(const ControlSequence& seq, const std::vector<AxisData>& axes,
                  int n) {
    double tau = seq.total_time();
    std::vector<double> u, wu;
    gauss_nodes(n, 0.0, 1.0, u, wu);

    // t1[a] = tau u_a ; t2[a][b] = t1[a] u_b
    std::vector<double> t1(n);
    for (int a = 0; a < n; ++a) t1[a] = tau * u[a];
    std::vector<double> t2(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) t2[a * n + b] = t1[a] * u[b];

    auto rows1 = rows_at(seq, t1);
    auto rows2 = rows_at(seq, t2);

    int na = static_cast<int>(axes.size());
    // cross products Rt_ij(t1, t2) on the pair grid
    std::vector<Vec3> rt(na * na * n * n);
    auto rt_at = [&](int i, int j, int a, int b) -> Vec3& {
        return rt[((i * na + j) * n + a) * n + b];
    };
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    rt_at(i, j, a, b) = rows1[a][axes[i].index].cross(
                        rows2[a * n + b][axes[j].index]);

    // correlator tables
    std::vector<double> c12(na * n * n), c13(na * n * n), c14(na * n * n * n);
    for (int i = 0; i < na; ++i) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                c12[(i * n + a) * n + b] = axes[i].corr(t1[a] - t2[a * n + b]);
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c)
                c13[(i * n + a) * n + c] = axes[i].corr(t1[a] - t1[c]);
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d)
                    c14[((i * n + a) * n + c) * n + d] =
                        axes[i].corr(t1[a] - t2[c * n + d]);
    }

    std::vector<double> wpair(n * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) wpair[a * n + b] = wu[a] * wu[b] * tau * t1[a];

    KahanSum acc;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double w12 = wpair[a * n + b];
            double t2ab = t2[a * n + b];
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double w = w12 * wpair[c * n + d];
                    double t2cd = t2[c * n + d];
                    double sum = 0.0;
                    for (int i = 0; i < na; ++i)
                        for (int j = 0; j < na; ++j) {
                            double term1 = c12[(i * n + a) * n + b] *
                                           c12[(j * n + c) * n + d] *
                                           rt_at(i, i, a, b).dot(rt_at(j, j, c, d));
                            double term2 = c13[(i * n + a) * n + c] *
                                           axes[j].corr(t2ab - t2cd) *
                                           rt_at(i, j, a, b).dot(rt_at(i, j, c, d));
                            double term3 = c14[((i * n + a) * n + c) * n + d] *
                                           c14[((j * n + c) * n + a) * n + b] *
                                           rt_at(i, j, a, b).dot(rt_at(j, i, c, d));
                            sum += term1 + term2 + term3;
                        }
                    acc.add(w * sum);
                }
        }
    return acc.value();
}

// <a1.a3^T> over the free x ordered-triple domain
double a1a3_term(const ControlSequence& seq, const std::vector<AxisData>& axes,
                 int n) {
    double tau = seq.total_time();
    std::vector<double> u, wu;
    gauss_nodes(n, 0.0, 1.0, u, wu);

    std::vector<double> t1(n), t2(n);
    for (int a = 0; a < n; ++a) t1[a] = tau * u[a];
    for (int b = 0; b < n; ++b) t2[b] = tau * u[b];
    std::vector<double> t3(n * n), t4(n * n * n);
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) t3[b * n + c] = t2[b] * u[c];
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
            for (int d = 0; d < n; ++d)
                t4[(b * n + c) * n + d] = t3[b * n + c] * u[d];

    auto rows1 = rows_at(seq, t1);
    auto rows2 = rows_at(seq, t2);
    auto rows3 = rows_at(seq, t3);
    auto rows4 = rows_at(seq, t4);

    int na = static_cast<int>(axes.size());
    // correlator tables (everything except C_i(t1 - t4))
    std::vector<double> c12(na * n * n), c34(na * n * n * n), c13(na * n * n * n),
        c24(na * n * n * n), c32(na * n * n);
    for (int i = 0; i < na; ++i) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                c12[(i * n + a) * n + b] = axes[i].corr(t1[a] - t2[b]);
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                c32[(i * n + b) * n + c] = axes[i].corr(t3[b * n + c] - t2[b]);
                for (int d = 0; d < n; ++d) {
                    c34[((i * n + b) * n + c) * n + d] =
                        axes[i].corr(t3[b * n + c] - t4[(b * n + c) * n + d]);
                    c24[((i * n + b) * n + c) * n + d] =
                        axes[i].corr(t2[b] - t4[(b * n + c) * n + d]);
                }
            }
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    c13[((i * n + a) * n + b) * n + c] =
                        axes[i].corr(t1[a] - t3[b * n + c]);
    }

    auto rtilde = [](const Vec3& ra, const Vec3& rb, const Vec3& rc) {
        // R_a(ta) x [R_b(tb) x R_c(tc)] + R_c(tc) x [R_b(tb) x R_a(ta)]
        return ra.cross(rb.cross(rc)) + rc.cross(rb.cross(ra));
    };

    KahanSum acc;
    for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
            double w_bc = wu[b] * wu[c] * tau * tau * tau * u[b] * u[b] * u[c];
            for (int d = 0; d < n; ++d) {
                double w_bcd = w_bc * wu[d];
                const Vec3* r2 = rows2[b].data();
                const Vec3* r3 = rows3[b * n + c].data();
                const Vec3* r4 = rows4[(b * n + c) * n + d].data();
                for (int a = 0; a < n; ++a) {
                    double w = w_bcd * wu[a] * tau;
                    double sum = 0.0;
                    for (int i = 0; i < na; ++i) {
                        int ii = axes[i].index;
                        const Vec3& r1i = rows1[a][ii];
                        double c1_4 = axes[i].corr(t1[a] - t4[(b * n + c) * n + d]);
                        for (int j = 0; j < na; ++j) {
                            int jj = axes[j].index;
                            double term1 = c12[(i * n + a) * n + b] *
                                           c34[((j * n + b) * n + c) * n + d] *
                                           r1i.dot(rtilde(r2[ii], r3[jj], r4[jj]));
                            double term2 = c13[((i * n + a) * n + b) * n + c] *
                                           c24[((j * n + b) * n + c) * n + d] *
                                           r1i.dot(rtilde(r2[jj], r3[ii], r4[jj]));
                            double term3 = c1_4 * c32[(j * n + b) * n + c] *
                                           r1i.dot(rtilde(r2[jj], r3[jj], r4[ii]));
                            sum += term1 + term2 + term3;
                        }
                    }
                    acc.add(w * sum);
                }
            }
        }
    return acc.value() * (2.0 / 3.0);
}

// <a1^4> over the full hypercube
double a1_fourth(const ControlSequence& seq, const std::vector<AxisData>& axes,
                 int n) {
    double tau = seq.total_time();
    std::vector<double> u, wu;
    gauss_nodes(n, 0.0, 1.0, u, wu);
    std::vector<double> t(n), w(n);
    for (int a = 0; a < n; ++a) {
        t[a] = tau * u[a];
        w[a] = tau * wu[a];
    }
    auto rows = rows_at(seq, t);

    int na = static_cast<int>(axes.size());
    std::vector<double> corr(na * n * n);
    for (int i = 0; i < na; ++i)
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                corr[(i * n + a) * n + b] = axes[i].corr(t[a] - t[b]);
    // P_ij(a, b) = R_i(t_a) . R_j(t_b)
    std::vector<double> p(na * na * n * n);
    auto p_at = [&](int i, int j, int a, int b) -> double& {
        return p[((i * na + j) * n + a) * n + b];
    };
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < na; ++j)
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b)
                    p_at(i, j, a, b) = rows[a][axes[i].index].dot(rows[b][axes[j].index]);

    KahanSum acc;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            double wab = w[a] * w[b];
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double wall = wab * w[c] * w[d];
                    double sum = 0.0;
                    for (int i = 0; i < na; ++i)
                        for (int j = 0; j < na; ++j) {
                            double term1 = corr[(i * n + a) * n + b] *
                                           corr[(j * n + c) * n + d] *
                                           p_at(i, i, a, b) * p_at(j, j, c, d);
                            double term2 = corr[(i * n + a) * n + c] *
                                           corr[(j * n + b) * n + d] *
                                           p_at(i, j, a, b) * p_at(i, j, c, d);
                            double term3 = corr[(i * n + a) * n + d] *
                                           corr[(j * n + c) * n + b] *
                                           p_at(i, j, a, b) * p_at(j, i, c, d);
                            sum += term1 + term2 + term3;
                        }
                    acc.add(wall * sum);
                }
        }
    return acc.value();
}

}  // namespace

HigherOrderTerms higher_order_terms(const ControlSequence& seq,
                                    const NoiseSpectrum& spec, int grid_n) {
    if (grid_n < 8) throw ValidationError("higher-order grid must be >= 8 nodes");
    double tau = seq.total_time();
    auto axes = collect_axes(spec, tau);

    double xi = smallness_xi(spec, tau);
    double xi4 = xi * xi * xi * xi;
    HigherOrderTerms out;
    out.bound_a2_sq = 0.75 * xi4;
    out.bound_a1a3 = xi4 / 3.0;
    out.bound_a1_4 = 3.0 * xi4;
    out.grid = grid_n;
    if (axes.empty() || tau <= 0.0) return out;

    int coarse_n = std::max(8, grid_n / 2);
    auto run = [&](int n) {
        return std::array<double, 3>{a2_squared(seq, axes, n), a1a3_term(seq, axes, n),
                                     a1_fourth(seq, axes, n)};
    };
    auto coarse = run(coarse_n);
    auto fine = run(grid_n);
    std::array<double, 3> scales = {std::max(std::abs(fine[0]), 1e-3 * out.bound_a2_sq),
                                    std::max(std::abs(fine[1]), 1e-3 * out.bound_a1a3),
                                    std::max(std::abs(fine[2]), 1e-3 * out.bound_a1_4)};
    for (int k = 0; k < 3; ++k)
        if (scales[k] > 0.0 && std::abs(fine[k] - coarse[k]) > 0.2 * scales[k])
            throw RefinementError("higher-order quadrature grid too coarse");
    out.a2_sq = fine[0];
    out.a1a3 = fine[1];
    out.a1_4 = fine[2];
    return out;
}

FidelityReport fidelity_report(const ControlSequence& seq, const NoiseSpectrum& spec,
                               bool with_higher_order, int grid_n) {
    FidelityReport rep;
    SpectralControlMatrix r(seq);
    auto uni = universal_first_order(r, spec);
    rep.a1_by_axis = uni.per_axis;
    rep.chi = uni.total;
    rep.f_av = fidelity_first_order(std::max(0.0, rep.chi));
    double xi = smallness_xi(spec, seq.total_time());
    rep.xi2 = xi * xi;
    rep.weak_noise_valid = rep.xi2 < 0.1;
    if (with_higher_order) rep.higher = higher_order_terms(seq, spec, grid_n);
    return rep;
}

}  // namespace qcf
