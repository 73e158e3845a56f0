#include "genfrac/volterra.hpp"

#include <cmath>

#include "genfrac/quadrature.hpp"
#include "genfrac/specfun.hpp"

namespace genfrac {

namespace {

struct MarchWeights {
    Eigen::ArrayXd m0, m1;
    double h = 0.0;

    // contribution of nodal value y_j over the cell m = i - j cells back
    double far_weight(Eigen::Index m) const {
        const double s0 = (m - 1) * h;
        return (m1[m - 1] - s0 * m0[m - 1]) / h;
    }
    double near_weight(Eigen::Index m) const {
        const double s1 = m * h;
        return (s1 * m0[m - 1] - m1[m - 1]) / h;
    }
};

MarchWeights build_weights(const Kernel& kernel, double h, Eigen::Index n) {
    MarchWeights w;
    w.h = h;
    w.m0.resize(n);
    w.m1.resize(n);
    if (kernel.has_moments()) {
        for (Eigen::Index m = 1; m <= n; ++m) {
            w.m0[m - 1] = kernel.moment((m - 1) * h, m * h);
            w.m1[m - 1] = kernel.first_moment((m - 1) * h, m * h);
        }
    } else {
        QuadratureOptions opts;
        opts.abs_tol = 1e-14;
        opts.rel_tol = 1e-13;
        for (Eigen::Index m = 1; m <= n; ++m) {
            const double s0 = (m - 1) * h, s1 = m * h;
            w.m0[m - 1] = integrate(kernel.eval1, s0, s1, opts);
            w.m1[m - 1] = integrate([&](double s) { return s * kernel.eval1(s); }, s0, s1, opts);
        }
    }
    return w;
}

double check_invertible(const Kernel& kernel, const char* who) {
    if (!kernel.is_difference())
        throw PreconditionError(std::string(who) + ": difference kernels only");
    const double k0 = kernel.eval1(0.0);
    if (!std::isfinite(k0) || k0 == 0.0)
        throw NonInvertibleError(std::string(who) + ": k(0) must be finite and nonzero");
    return k0;
}

// third-order one-sided derivative at the first node
double edge_derivative(const Eigen::ArrayXd& v, double h) {
    return (-11.0 * v[0] + 18.0 * v[1] - 9.0 * v[2] + 2.0 * v[3]) / (6.0 * h);
}

} // namespace

GridFunction resolvent(const ResolventSpec& spec, bool* rescaled) {
    const double k0 = check_invertible(spec.kernel, "resolvent");
    if (rescaled) *rescaled = std::abs(k0 - 1.0) > 1e-12;
    if (!(spec.horizon > 0.0)) throw InvalidDomainError("resolvent: horizon must be positive");
    if (spec.n < 4) throw PreconditionError("resolvent: n must be at least 4");

    const Eigen::Index n = spec.n;
    const double h = spec.horizon / static_cast<double>(n);
    const MarchWeights w = build_weights(spec.kernel, h, n);

    Eigen::ArrayXd kv(n + 1);
    for (Eigen::Index i = 0; i <= n; ++i) kv[i] = spec.kernel.eval1(i * h);

    Eigen::ArrayXd r(n + 1);
    r[0] = -edge_derivative(kv, h) / k0;
    const double w_new = w.near_weight(1);
    for (Eigen::Index i = 1; i <= n; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const Eigen::Index m = i - j;
            acc += w.far_weight(m) * r[j];
            if (j + 1 < i) acc += w.near_weight(m) * r[j + 1];
        }
        r[i] = (k0 - kv[i] - acc) / w_new;
    }
    return GridFunction(0.0, spec.horizon, std::move(r));
}

GridFunction volterra_first_kind(const Kernel& kernel, const GridFunction& rhs) {
    const double k0 = check_invertible(kernel, "volterra_first_kind");
    const Eigen::Index n = rhs.n();
    if (n < 4) throw PreconditionError("volterra_first_kind: n must be at least 4");
    const double h = rhs.step();
    const double scale = std::max(1.0, rhs.values.abs().maxCoeff());
    if (std::abs(rhs.values[0]) > 1e-9 * scale)
        throw InconsistentDataError("volterra_first_kind: rhs(a) must vanish for a first-kind equation");

    const MarchWeights w = build_weights(kernel, h, n);
    Eigen::ArrayXd y(n + 1);
    y[0] = edge_derivative(rhs.values, h) / k0;  // differentiated equation at t = a
    const double w_new = w.near_weight(1);
    for (Eigen::Index i = 1; i <= n; ++i) {
        double acc = 0.0;
        for (Eigen::Index j = 0; j < i; ++j) {
            const Eigen::Index m = i - j;
            acc += w.far_weight(m) * y[j];
            if (j + 1 < i) acc += w.near_weight(m) * y[j + 1];
        }
        y[i] = (rhs.values[i] - acc) / w_new;
    }
    return GridFunction(rhs.a, rhs.b, std::move(y));
}

GridFunction example1_extremal(double alpha, double xi, double a, double b, Eigen::Index n) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw PreconditionError("example1_extremal: alpha must lie in (0, 1)");
    if (!(a < b)) throw InvalidDomainError("example1_extremal: requires a < b");

    const MLParams mlp{1.0 - alpha, 1.0, 1e-14, 4000};
    auto integrand = [&](double s) { return mittag_leffler(mlp, -std::pow(s, 1.0 - alpha)); };

    const double h = (b - a) / static_cast<double>(n);
    QuadratureOptions opts;
    opts.abs_tol = 1e-13;
    opts.rel_tol = 1e-12;
    Eigen::ArrayXd y(n + 1);
    y[0] = 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 1; i <= n; ++i) {
        acc += integrate(integrand, (i - 1) * h, i * h, opts);
        y[i] = xi * acc;
    }
    return GridFunction(a, b, std::move(y));
}

} // namespace genfrac
