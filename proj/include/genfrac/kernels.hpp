#pragma once

#include <functional>
#include <optional>
#include <string>

#include "genfrac/errors.hpp"
#include "genfrac/expr.hpp"

namespace genfrac {

/// A two-variable (or difference) kernel k(t, tau) of order alpha in (0, 1).
///
/// Difference kernels depend only on t - tau and may carry closed-form cell
/// moments, which is what lets the product quadrature integrate exactly
/// through a weakly singular diagonal. Kernels are immutable after
/// construction and safe to share across evaluation workers.
struct Kernel {
    enum class Kind { General, Difference };

    double order = 0.5;
    Kind kind = Kind::General;
    bool singular_at_diagonal = false;
    std::string name = "custom";

    /// k(t, tau); for Difference kernels this forwards to the one-argument form.
    std::function<double(double, double)> eval2;
    /// k(s) with s = t - tau; only set for Difference kernels.
    std::function<double(double)> eval1;
    /// Exact integral of k(s) over [s1, s2], 0 <= s1 < s2 (Difference only).
    std::function<double(double, double)> moment;
    /// Exact integral of s*k(s) over [s1, s2]; companion weight for the
    /// piecewise-linear product rule.
    std::function<double(double, double)> first_moment;

    bool is_difference() const { return kind == Kind::Difference; }
    bool has_moments() const { return static_cast<bool>(moment) && static_cast<bool>(first_moment); }

    /// Kernel value with the diagonal guard: evaluating a singular kernel
    /// exactly on its singular set is a domain error, not an infinity.
    double operator()(double t, double tau) const;

    void validate() const;
};

Kernel riemann_liouville_kernel(double alpha);
Kernel exponential_kernel(double alpha);
Kernel cosine_kernel(double alpha);
Kernel constant_one_kernel();
/// k(t,tau) = (t^2 - tau^2) / (t^2 + tau^2)^2, not square integrable near the
/// origin; exercises the failure mode of the integration-by-parts identity.
Kernel counterexample_kernel();

/// Builds a difference kernel from an expression in s (and alpha).
Kernel difference_kernel_from_expression(const std::string& expr, double alpha, bool singular);
/// Builds a general kernel from an expression in t, tau (and alpha).
Kernel general_kernel_from_expression(const std::string& expr, double alpha, bool singular);

struct SeparabilityReport {
    bool holds = false;
    double max_mixed_difference = 0.0;
};

/// Tests whether S(t,tau) = int_a^t k(theta,tau) dtheta + int_a^tau k(t,theta) dtheta
/// splits as g(t) + f(tau), by measuring the largest mixed second difference
/// of S on an n x n grid, normalized by h^2. The probe stays on the
/// sub-diagonal triangle tau <= t - h so every kernel evaluation sees
/// arguments ordered the same way the operators order them.
SeparabilityReport check_separability(const Kernel& kernel, double a, double b, int n, double tol);

/// int_0^length |k(s)| ds for difference kernels; uses the closed-form moment
/// when the kernel does not change sign on (0, length], adaptive quadrature
/// split at the origin otherwise. Divergent integrals raise NotIntegrableError.
double l1_norm_estimate(const Kernel& kernel, double length);

} // namespace genfrac
