#pragma once

#include <functional>
#include <optional>

#include "genfrac/identities.hpp"
#include "genfrac/operators.hpp"

namespace genfrac {

/// Integrand F(t, y, u, v, w) with its four partial derivatives. Slots:
/// u = y'(t), v = (B y)(t) of order alpha, w = (K y)(t) of order beta.
/// Construct through `checked`, which verifies each partial against central
/// finite differences at random points before accepting it.
struct Lagrangian {
    using Fn = std::function<double(double, double, double, double, double)>;

    Fn value;
    Fn d2;  ///< partial with respect to y
    Fn d3;  ///< partial with respect to u
    Fn d4;  ///< partial with respect to v
    Fn d5;  ///< partial with respect to w

    static Lagrangian checked(Fn value, Fn d2, Fn d3, Fn d4, Fn d5);
};

struct BoundaryCondition {
    enum class Type { Fixed, FreeStart };
    Type type = Type::Fixed;
    double ya = 0.0;  ///< ignored for FreeStart
    double yb = 0.0;

    static BoundaryCondition fixed(double ya, double yb) { return {Type::Fixed, ya, yb}; }
    static BoundaryCondition free_start(double yb) { return {Type::FreeStart, 0.0, yb}; }
};

struct IsoperimetricConstraint {
    Lagrangian G;
    double xi = 0.0;
};

struct VariationalProblem {
    double a = 0.0;
    double b = 1.0;
    ParamSet P1;
    ParamSet P2;
    double alpha = 0.5;
    double beta = 0.5;
    Kernel kernel_B;  ///< order 1-alpha, drives the B (and dual A) operator
    Kernel kernel_K;  ///< order beta
    Lagrangian F;
    BoundaryCondition bc;
    std::optional<IsoperimetricConstraint> constraint;

    void validate() const;
};

struct SolveResult {
    GridFunction y;
    std::optional<double> lambda;
    /// Stationarity of the discrete problem: max-norm of the projected
    /// gradient of the (multiplier-adjusted) discrete objective.
    double el_residual = 0.0;
    std::optional<double> constraint_residual;
    double objective = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Pointwise Euler-Lagrange residual
///   R = d2F - d/dt d3F - A_{P1*} d4F + K_{P2*} d5F
/// along y. Masked nodes (endpoint singularities of the dual A operator, the
/// two boundary nodes, and a 5% boundary layer when a kernel is weakly
/// singular) are reported through `mask` and excluded from residual norms.
GridFunction el_residual(const VariationalProblem& prob, const GridFunction& y,
                         const OperatorConfig& cfg, NodeMask* mask = nullptr);

/// max of |R| over unmasked nodes.
double el_residual_norm(const VariationalProblem& prob, const GridFunction& y,
                        const OperatorConfig& cfg);

/// |d3F{y}(a) + (K_{P1*}^{1-alpha} d4F{y})(a)| for free-start problems.
double natural_bc_residual(const VariationalProblem& prob, const GridFunction& y,
                           const OperatorConfig& cfg);

/// Direct method for the unconstrained problem: nodal values are the decision
/// variables, the objective is the midpoint-cell discretization of int F with
/// exact gradients through the discrete linear operators, minimized by
/// spectral-step (Barzilai-Borwein) gradient descent with a nonmonotone
/// backtracking line search.
SolveResult solve_fundamental(const VariationalProblem& prob, Eigen::Index n, double tol,
                              int max_iter);

/// Isoperimetric problem: secant iteration on the multiplier driving the
/// constraint defect of the inner unconstrained solves to zero.
SolveResult solve_isoperimetric(const VariationalProblem& prob, Eigen::Index n, double tol,
                                int max_iter);

/// For P = <a,b,p,-p> and a reduced integrand F(t, y, w): compares the two
/// discrete Euler-Lagrange forms d2F - K_P d5F and d2F + K_{P*} d5F. They
/// agree to rounding; the report carries their pointwise max difference.
IdentityReport coherence_check(const Kernel& kernel, double p, const Lagrangian& F,
                               const GridFunction& y, const OperatorConfig& cfg,
                               double tol = 1e-12);

} // namespace genfrac
