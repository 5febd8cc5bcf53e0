#pragma once

#include <functional>
#include <span>
#include <vector>

namespace qcf {

struct GaussRule {
    std::vector<double> nodes;    // on (-1, 1)
    std::vector<double> weights;
};

// Gauss-Legendre rule of order n (cached per n).
const GaussRule& gauss_legendre(int n);

// Nodes/weights mapped onto [a, b].
void gauss_nodes(int n, double a, double b, std::vector<double>& x,
                 std::vector<double>& w);

struct AdaptiveOptions {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    int max_intervals = 4000;
    std::vector<double> split_points;  // interior seed splits
};

// Globally adaptive Gauss-Kronrod 7/15 on [a, b]. Throws NumericsError
// if the interval budget is exhausted before reaching tolerance.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const AdaptiveOptions& opts = {});

}  // namespace qcf
