#pragma once

#include "genfrac/errors.hpp"

namespace genfrac {

/// Gamma function via a Lanczos rational approximation (reflection formula
/// for arguments left of 1/2). Relative accuracy is better than 1e-12 on
/// (0, 30]. Throws PoleError at non-positive integers.
double gamma_fn(double x);

/// Truncation parameters for the two-parameter Mittag-Leffler series.
struct MLParams {
    double alpha;
    double beta;
    double tol = 1e-14;
    int max_terms = 2000;

    void validate() const;
};

/// E_{alpha,beta}(z) by direct series summation with compensated
/// accumulation. The sum stops once the next term falls below
/// tol * (1 + |partial sum|); if that never happens within max_terms a
/// TruncationFailureError is thrown reporting the last term magnitude.
/// Intended for desk-scale arguments (|z| <= 50).
double mittag_leffler(const MLParams& p, double z);

} // namespace genfrac
