#ifndef PRICEBAND_ROOTS_HPP
#define PRICEBAND_ROOTS_HPP

#include "priceband/errors.hpp"

#include <cmath>
#include <utility>

namespace priceband {

struct RootResult {
    double x;
    int iterations;
    bool converged;
};

/// Bisection on [lo, hi]; f(lo) and f(hi) must have opposite signs (either
/// may be zero). Stops when the bracket width drops below x_tol or after
/// max_iter halvings, whichever comes first.
template <class F>
RootResult bisect(F&& f, double lo, double hi, double x_tol = 1e-13, int max_iter = 200) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) return {lo, 0, true};
    if (fhi == 0.0) return {hi, 0, true};
    if (!(flo < 0.0) == !(fhi < 0.0))
        throw DomainError("bisect: root not bracketed");
    int it = 0;
    while (it < max_iter && hi - lo > x_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break; // bracket at floating-point resolution
        const double fmid = f(mid);
        ++it;
        if (fmid == 0.0) return {mid, it, true};
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return {0.5 * (lo + hi), it, hi - lo <= x_tol || it < max_iter};
}

/// Expands hi geometrically until f changes sign relative to f(lo).
/// Returns the bracketing pair; throws if no sign change within max_doublings.
template <class F>
std::pair<double, double> expand_bracket_up(F&& f, double lo, double hi0, int max_doublings = 200) {
    const double flo = f(lo);
    double hi = hi0;
    for (int i = 0; i < max_doublings; ++i) {
        const double fhi = f(hi);
        if (fhi == 0.0 || (fhi < 0.0) != (flo < 0.0)) return {lo, hi};
        hi *= 2.0;
    }
    throw DomainError("expand_bracket_up: no sign change found");
}

} // namespace priceband

#endif
