#pragma once

#include <optional>
#include <string>

#include "genfrac/operators.hpp"

namespace genfrac {

/// Outcome of one structural-identity check. lhs/rhs are filled for
/// scalar-valued identities; grid-valued ones report only the residual.
struct IdentityReport {
    std::string name;
    int grid_n = 0;
    double lhs = std::numeric_limits<double>::quiet_NaN();
    double rhs = std::numeric_limits<double>::quiet_NaN();
    double residual = 0.0;
    double tolerance = 0.0;
    bool holds = false;
    bool degraded = false;  ///< masked nodes intersected an integration region

    void apply_tolerance(double tol) {
        tolerance = tol;
        holds = residual <= tol;
    }
};

/// Residual of A_P y = p y(a) k(t,a) - q y(b) k(b,t) + B_P y over unmasked
/// interior nodes. The kernel must pass the separability probe on [a, b];
/// otherwise the relation is not claimed and HypothesisViolationError is
/// thrown.
IdentityReport relation_residual(const ParamSet& P, const Kernel& kernel_1ma,
                                 const GridFunction& y, const OperatorConfig& cfg, double tol);

/// | int g (K_P f) - int f (K_{P*} g) | with trapezoid outer integrals.
IdentityReport ibp_k_residual(const ParamSet& P, const Kernel& kernel, const GridFunction& f,
                              const GridFunction& g, const OperatorConfig& cfg, double tol);

/// | int g (A_P f) - ( [g K_P^{1-a} f]_a^b - int f (B_{P*} g) ) |.
/// Boundary evaluations of K keep their surviving one-sided term.
IdentityReport ibp_a_residual(const ParamSet& P, const Kernel& kernel_1ma, const GridFunction& f,
                              const GridFunction& g, const OperatorConfig& cfg, double tol,
                              const std::optional<GridFunction>& f_prime = std::nullopt,
                              const std::optional<GridFunction>& g_prime = std::nullopt);

/// | int g (B_P f) - ( [f K_{P*}^{1-a} g]_a^b - int f (A_{P*} g) ) |.
IdentityReport ibp_b_residual(const ParamSet& P, const Kernel& kernel_1ma, const GridFunction& f,
                              const GridFunction& g, const OperatorConfig& cfg, double tol,
                              const std::optional<GridFunction>& f_prime = std::nullopt,
                              const std::optional<GridFunction>& g_prime = std::nullopt);

} // namespace genfrac
