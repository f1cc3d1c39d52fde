#pragma once

#include <cmath>

namespace atslab {

inline constexpr double kSqrt2       = 1.4142135623730950488016887242096981;
inline constexpr double kSqrt2Pi     = 2.5066282746310005024157652848110453;
inline constexpr double kInvSqrt2Pi  = 0.3989422804014326779399460599343819;
inline constexpr double kSqrtPiOver2 = 1.2533141373155002512078826424055226;

inline double norm_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

// erfc-based so both tails keep full relative accuracy.
inline double norm_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// N(a) - N(b) without cancellation when the arguments are close: midpoint
// expansion N'(m) h (1 + h^2 (m^2 - 1)/24) for |a-b| < 1e-5.
inline double norm_cdf_diff(double a, double b) {
    const double h = a - b;
    if (std::abs(h) < 1e-5) {
        const double m = 0.5 * (a + b);
        if (!std::isfinite(m)) return 0.0;  // both arguments in the same saturated tail
        return norm_pdf(m) * h * (1.0 + h * h * (m * m - 1.0) / 24.0);
    }
    return norm_cdf(a) - norm_cdf(b);
}

// Inverse standard normal CDF, |relative error| ~ 1e-15 after one Halley step.
double inv_norm_cdf(double p);

}  // namespace atslab
