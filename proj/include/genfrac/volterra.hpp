#pragma once

#include "genfrac/grid.hpp"
#include "genfrac/kernels.hpp"

namespace genfrac {

/// Inputs of the resolvent computation. The kernel must be a difference
/// kernel with finite nonzero k(0); k(0) = 1 is the normalized case, other
/// values are accepted by rescaling (reported through `rescaled`).
struct ResolventSpec {
    Kernel kernel;
    double horizon = 1.0;
    int n = 256;
};

/// Resolvent r of the kernel, defined through k + k*r = k(0) on (0, horizon]
/// (the time-domain form of r~ = 1/(s k~) - 1). Product-trapezoid marching;
/// the value at t = 0 comes from the differentiated equation,
/// r(0) = -k'(0)/k(0).
GridFunction resolvent(const ResolventSpec& spec, bool* rescaled = nullptr);

/// Solves int_0^t k(t - tau) y(tau) dtau = rhs(t) by product-trapezoid
/// marching (lower-triangular forward substitution). Requires k(0) finite and
/// nonzero and rhs(a) = 0.
GridFunction volterra_first_kind(const Kernel& kernel, const GridFunction& rhs);

/// The Mittag-Leffler extremal y(t) = xi * int_a^t E_{1-alpha,1}(-(t-tau)^{1-alpha}) dtau,
/// evaluated by adaptive quadrature of the series integrand per node.
GridFunction example1_extremal(double alpha, double xi, double a, double b, Eigen::Index n);

} // namespace genfrac
