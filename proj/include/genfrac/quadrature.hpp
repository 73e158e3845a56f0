#pragma once

#include <functional>

#include "genfrac/errors.hpp"

namespace genfrac {

struct QuadratureOptions {
    double abs_tol = 1e-12;
    double rel_tol = 1e-11;
    int max_intervals = 4000;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    bool converged = false;
    bool diverging = false;  ///< successive refinements grew without bound
    int intervals = 0;
};

/// Adaptive Gauss-Kronrod (7-15) integration. The rule is open: the integrand
/// is never evaluated at the interval endpoints, so integrable endpoint
/// singularities are handled by bisection toward the endpoint.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& opts = {});

/// Convenience wrapper that throws QuadratureFailureError when the estimate
/// does not converge and NotIntegrableError when it grows without bound.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

} // namespace genfrac
