#include "genfrac/specfun.hpp"

#include <cmath>
#include <string>

namespace genfrac {
namespace {

// Lanczos coefficients, g = 7, 9 terms.
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,     12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6,  1.5056327351493116e-7};

constexpr double kPi = 3.14159265358979323846;

double lanczos_positive(double x) {
    // valid for x >= 0.5
    const double z = x - 1.0;
    double acc = kLanczos[0];
    for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (z + i);
    const double t = z + 7.5;
    return std::sqrt(2.0 * kPi) * std::pow(t, z + 0.5) * std::exp(-t) * acc;
}

} // namespace

double gamma_fn(double x) {
    if (x <= 0.0 && x == std::floor(x))
        throw PoleError("gamma: pole at non-positive integer " + std::to_string(x));
    if (x >= 0.5) return lanczos_positive(x);
    // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return kPi / (std::sin(kPi * x) * lanczos_positive(1.0 - x));
}

void MLParams::validate() const {
    if (!(alpha > 0.0)) throw PreconditionError("mittag_leffler: alpha must be positive");
    if (!(beta > 0.0)) throw PreconditionError("mittag_leffler: beta must be positive");
    if (!(tol > 0.0)) throw PreconditionError("mittag_leffler: tol must be positive");
    if (max_terms < 10) throw PreconditionError("mittag_leffler: max_terms must be >= 10");
}

double mittag_leffler(const MLParams& p, double z) {
    p.validate();
    double sum = 0.0;
    double comp = 0.0;  // Kahan compensation: the alternating tail cancels badly otherwise
    double last_term = 0.0;
    for (int k = 0; k < p.max_terms; ++k) {
        const double g = p.alpha * k + p.beta;
        double term;
        if (g > 170.0) {
            // Gamma would overflow; go through logs (the term is tiny by now)
            const double lt = k * std::log(std::abs(z)) - std::lgamma(g);
            term = (z < 0.0 && (k % 2 == 1)) ? -std::exp(lt) : std::exp(lt);
        } else {
            term = std::pow(z, k) / gamma_fn(g);
        }
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        last_term = std::abs(term);
        if (k >= 2 && last_term < p.tol * (1.0 + std::abs(sum))) return sum;
        if (!std::isfinite(sum))
            throw TruncationFailureError("mittag_leffler: sum overflowed at term " +
                                         std::to_string(k));
    }
    throw TruncationFailureError(
        "mittag_leffler: no convergence within " + std::to_string(p.max_terms) +
        " terms; last term magnitude " + std::to_string(last_term));
}

} // namespace genfrac
