#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace dll {

struct SimpsonOptions {
    double abs_tol = 1e-10;
    int max_depth = 20;
};

/// Adaptive Simpson integration of f over [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        const SimpsonOptions& options = {});

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

GaussRule gauss_legendre(int points);

}  // namespace dll
