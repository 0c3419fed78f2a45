#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string_view>
#include <utility>

#include "upsr/errors.hpp"

namespace upsr {

struct BisectionOptions {
    int max_expansions = 8;
    double x_tol = 1e-10;
    int max_iterations = 400;
};

/// Solve f(x) = target for a nondecreasing f, starting from the bracket
/// [center - half_width, center + half_width]. The half width is doubled up to
/// options.max_expansions times until the bracket straddles the target. An optional
/// seed inside the bracket replaces whichever endpoint it improves on.
template <class F>
double bisect_increasing(F&& f, double target, double center, double half_width,
                         const BisectionOptions& options, std::string_view what,
                         std::optional<double> seed = std::nullopt) {
    double lo = center - half_width;
    double hi = center + half_width;
    double flo = f(lo);
    double fhi = f(hi);
    int expansions = 0;
    while (!(flo <= target && target <= fhi)) {
        if (expansions == options.max_expansions || !std::isfinite(half_width)) {
            std::ostringstream msg;
            msg << what << ": failed to bracket target " << target << " after " << expansions
                << " expansions; f(" << lo << ") = " << flo << ", f(" << hi << ") = " << fhi;
            throw NumericalError(msg.str());
        }
        half_width *= 2.0;
        lo = center - half_width;
        hi = center + half_width;
        flo = f(lo);
        fhi = f(hi);
        ++expansions;
    }
    if (flo == target) {
        return lo;
    }
    if (fhi == target) {
        return hi;
    }
    if (seed && std::isfinite(*seed) && *seed > lo && *seed < hi) {
        const double fs = f(*seed);
        if (fs == target) {
            return *seed;
        }
        (fs < target ? lo : hi) = *seed;
    }
    for (int it = 0; it < options.max_iterations && hi - lo > options.x_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double fm = f(mid);
        if (fm == target) {
            return mid;
        }
        (fm < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Endpoint of a prediction interval: solve G(psi) = target for an increasing G, starting
/// from psi in center +- 6 width.
template <class G>
double solve_prediction_endpoint(G&& g, double target, double center, double width) {
    BisectionOptions opts;
    opts.max_expansions = 8;
    opts.x_tol = 1e-13 * std::max(1.0, std::abs(center) + width);
    return bisect_increasing(std::forward<G>(g), target, center, 6.0 * width, opts, "prediction interval");
}

} // namespace upsr
