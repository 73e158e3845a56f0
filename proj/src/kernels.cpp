#include "genfrac/kernels.hpp"

#include <array>
#include <cmath>

#include "genfrac/quadrature.hpp"
#include "genfrac/specfun.hpp"

namespace genfrac {

double Kernel::operator()(double t, double tau) const {
    if (is_difference()) {
        const double s = t - tau;
        if (singular_at_diagonal && s == 0.0)
            throw InvalidDomainError("kernel '" + name + "': evaluation on the singular diagonal");
        return eval1(s);
    }
    return eval2(t, tau);
}

void Kernel::validate() const {
    if (!(order > 0.0 && order < 1.0))
        throw PreconditionError("kernel '" + name + "': order must lie in (0, 1)");
    if (is_difference() && !eval1)
        throw PreconditionError("kernel '" + name + "': difference kernel without eval1");
    if (!is_difference() && !eval2)
        throw PreconditionError("kernel '" + name + "': general kernel without eval2");
}

Kernel riemann_liouville_kernel(double alpha) {
    Kernel k;
    k.order = alpha;
    k.kind = Kernel::Kind::Difference;
    k.singular_at_diagonal = true;
    k.name = "riemann_liouville";
    const double g = gamma_fn(alpha);
    k.eval1 = [alpha, g](double s) { return std::pow(s, alpha - 1.0) / g; };
    k.eval2 = [k](double t, double tau) { return k.eval1(t - tau); };
    k.moment = [alpha, g](double s1, double s2) {
        return (std::pow(s2, alpha) - std::pow(s1, alpha)) / (alpha * g);
    };
    k.first_moment = [alpha, g](double s1, double s2) {
        return (std::pow(s2, alpha + 1.0) - std::pow(s1, alpha + 1.0)) / ((alpha + 1.0) * g);
    };
    k.validate();
    return k;
}

Kernel exponential_kernel(double alpha) {
    Kernel k;
    k.order = alpha;
    k.kind = Kernel::Kind::Difference;
    k.singular_at_diagonal = false;
    k.name = "exponential";
    k.eval1 = [alpha](double s) { return std::exp(alpha * s); };
    k.eval2 = [alpha](double t, double tau) { return std::exp(alpha * (t - tau)); };
    k.moment = [alpha](double s1, double s2) {
        return (std::exp(alpha * s2) - std::exp(alpha * s1)) / alpha;
    };
    k.first_moment = [alpha](double s1, double s2) {
        auto anti = [alpha](double s) { return std::exp(alpha * s) * (s / alpha - 1.0 / (alpha * alpha)); };
        return anti(s2) - anti(s1);
    };
    k.validate();
    return k;
}

Kernel cosine_kernel(double alpha) {
    Kernel k;
    k.order = alpha;
    k.kind = Kernel::Kind::Difference;
    k.singular_at_diagonal = false;
    k.name = "cosine";
    k.eval1 = [alpha](double s) { return std::cos(alpha * s); };
    k.eval2 = [alpha](double t, double tau) { return std::cos(alpha * (t - tau)); };
    k.moment = [alpha](double s1, double s2) {
        return (std::sin(alpha * s2) - std::sin(alpha * s1)) / alpha;
    };
    k.first_moment = [alpha](double s1, double s2) {
        auto anti = [alpha](double s) {
            return (std::cos(alpha * s) + alpha * s * std::sin(alpha * s)) / (alpha * alpha);
        };
        return anti(s2) - anti(s1);
    };
    k.validate();
    return k;
}

Kernel constant_one_kernel() {
    Kernel k;
    k.order = 0.5;
    k.kind = Kernel::Kind::Difference;
    k.singular_at_diagonal = false;
    k.name = "constant_one";
    k.eval1 = [](double) { return 1.0; };
    k.eval2 = [](double, double) { return 1.0; };
    k.moment = [](double s1, double s2) { return s2 - s1; };
    k.first_moment = [](double s1, double s2) { return 0.5 * (s2 * s2 - s1 * s1); };
    k.validate();
    return k;
}

Kernel counterexample_kernel() {
    Kernel k;
    k.order = 0.5;
    k.kind = Kernel::Kind::General;
    k.singular_at_diagonal = true;  // the singular point (0,0) lies on the diagonal
    k.name = "counterexample";
    k.eval2 = [](double t, double tau) {
        const double d = t * t + tau * tau;
        if (d == 0.0)
            throw InvalidDomainError("counterexample kernel: evaluation at the origin");
        return (t * t - tau * tau) / (d * d);
    };
    k.validate();
    return k;
}

Kernel difference_kernel_from_expression(const std::string& expr, double alpha, bool singular) {
    Kernel k;
    k.order = alpha;
    k.kind = Kernel::Kind::Difference;
    k.singular_at_diagonal = singular;
    k.name = "expr:" + expr;
    auto compiled = Expression::parse(expr, {"s", "alpha"});
    k.eval1 = [compiled, alpha](double s) {
        const std::array<double, 2> env{s, alpha};
        return compiled.eval(env);
    };
    k.eval2 = [e = k.eval1](double t, double tau) { return e(t - tau); };
    k.validate();
    return k;
}

Kernel general_kernel_from_expression(const std::string& expr, double alpha, bool singular) {
    Kernel k;
    k.order = alpha;
    k.kind = Kernel::Kind::General;
    k.singular_at_diagonal = singular;
    k.name = "expr:" + expr;
    auto compiled = Expression::parse(expr, {"t", "tau", "alpha"});
    k.eval2 = [compiled, alpha](double t, double tau) {
        const std::array<double, 3> env{t, tau, alpha};
        return compiled.eval(env);
    };
    k.validate();
    return k;
}

SeparabilityReport check_separability(const Kernel& kernel, double a, double b, int n, double tol) {
    if (!(a < b)) throw InvalidDomainError("check_separability: requires a < b");
    if (n < 8) throw PreconditionError("check_separability: n must be at least 8");
    kernel.validate();
    const double h = (b - a) / n;

    QuadratureOptions opts;
    opts.abs_tol = 1e-13;
    opts.rel_tol = 1e-12;
    opts.max_intervals = 2000;

    auto kv = [&](double t, double tau) { return kernel.is_difference() ? kernel.eval1(t - tau) : kernel.eval2(t, tau); };

    double worst = 0.0;
    // Mixed second difference of S at the square [t, t+h] x [tau, tau+h]:
    //   int_t^{t+h} [k(theta, tau+h) - k(theta, tau)] dtheta
    // + int_tau^{tau+h} [k(t+h, theta) - k(t, theta)] dtheta.
    // Restricted to tau + h <= t so the first argument never drops below the
    // second; the quadrature never touches the diagonal except as an
    // integrable endpoint.
    for (int i = 1; i < n; ++i) {
        const double t = a + i * h;
        for (int j = 0; j <= i - 1; ++j) {
            const double tau = a + j * h;
            QuadratureResult q1, q2;
            try {
                q1 = integrate_adaptive(
                    [&](double th) { return kv(th, tau + h) - kv(th, tau); }, t, t + h, opts);
                q2 = integrate_adaptive(
                    [&](double th) { return kv(t + h, th) - kv(t, th); }, tau, tau + h, opts);
            } catch (const Error&) {
                throw QuadratureFailureError("check_separability: kernel not integrable near the diagonal at this resolution");
            }
            if (q1.diverging || q2.diverging)
                throw QuadratureFailureError("check_separability: kernel not integrable near the diagonal at this resolution");
            const double mixed = std::abs(q1.value + q2.value) / (h * h);
            if (mixed > worst) worst = mixed;
        }
    }
    return {worst <= tol, worst};
}

double l1_norm_estimate(const Kernel& kernel, double length) {
    if (!kernel.is_difference())
        throw PreconditionError("l1_norm_estimate: difference kernels only");
    if (!(length > 0.0)) throw InvalidDomainError("l1_norm_estimate: length must be positive");

    // Sign scan away from the origin; with a constant sign the closed-form
    // moment already is the L1 integral up to sign.
    if (kernel.moment) {
        bool constant_sign = true;
        int sign = 0;
        for (int i = 1; i <= 64; ++i) {
            const double s = length * i / 64.0;
            const double v = kernel.eval1(s);
            const int sv = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
            if (sv == 0) continue;
            if (sign == 0) sign = sv;
            else if (sign != sv) {
                constant_sign = false;
                break;
            }
        }
        if (constant_sign) return std::abs(kernel.moment(0.0, length));
    }

    QuadratureOptions opts;
    opts.abs_tol = 1e-12;
    opts.rel_tol = 1e-10;
    opts.max_intervals = 20000;
    QuadratureResult r = integrate_adaptive(
        [&](double s) { return std::abs(kernel.eval1(s)); }, 0.0, length, opts);
    if (r.diverging)
        throw NotIntegrableError("l1_norm_estimate: kernel '" + kernel.name +
                                 "' is not integrable on (0, length]");
    if (!r.converged)
        throw QuadratureFailureError("l1_norm_estimate: adaptive quadrature did not converge");
    return r.value;
}

} // namespace genfrac
