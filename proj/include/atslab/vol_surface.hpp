#pragma once

#include <limits>
#include <span>
#include <vector>

#include "atslab/pricer.hpp"

namespace atslab {

struct SmilePoint {
    double t;
    double y;
    double price;
    double implied_vol;
    double achieved_tol;  // root-finder step at termination
};

// Unique vol with black_price(vol, spec) = price. Safeguarded Newton within a
// bracket that starts at [1e-8, 5] and doubles the upper end once to 10
// before failing (Case-2 diagnostics need the large-vol headroom); terminates
// when the step falls below 1e-10. Throws PriceBoundsError outside the
// no-arbitrage band and BracketError past vol = 10.
double implied_vol(double price, const OptionSpec& spec, double* achieved_tol = nullptr);

// Black ATM implied volatility of the quadrature price at y = 0 (call; the
// put gives the same by parity, which is asserted against the quadrature).
double atm_vol(double t, const AtsParams& p);

// Skew term by the closed ATM formula:
// xi_t = (N(-sig_t sqrt(t)/2) - E[N(l_t^{S_t} - sigma sqrt(S_t t)/2)]) / N'(-sig_t sqrt(t)/2).
double skew_term_closed(double t, const AtsParams& p);

// Central difference of the smile in y with one Richardson step (h, h/2);
// below t = 1e-6 the step is widened to 1e-3 to dominate pricing noise.
double skew_term_fd(double t, const AtsParams& p, double h = 1e-4);

// Short-time skew for beta = 1, delta = -1/2 (RegimeError otherwise):
//   xi_0 = -sqrt(pi/2) E[erf(sigma_bar eta_bar r(S)/2)],  r(z) = sqrt2 (1/sqrt z - sqrt z),
// with S the t-invariant law. (The erf argument carries the factor 1/2 that
// the dominated-convergence limit of the ATM formula produces.)
double skew_limit_case5(const AtsParams& p);

enum class ShortTimeQuantity { atm_vol, skew_term };
enum class LimitClass { converging, vanishing, diverging, inconclusive };

struct ExtrapolationThresholds {
    double vanish_ratio = 0.02;   // |last| < ratio * |first|
    double vanish_min_slope = 0.1;
    double diverge_ratio = 50.0;  // |last| > ratio * |first|
};

struct ExtrapolationResult {
    LimitClass classification = LimitClass::inconclusive;
    double limit = std::numeric_limits<double>::quiet_NaN();         // converging only
    double fitted_power = std::numeric_limits<double>::quiet_NaN();  // log-log slope in t
    std::vector<double> ts;
    std::vector<double> values;
};

// Evaluate the quantity along t_k = t0 2^{-k}, k = 0..levels-1, and classify
// the sequence (vanishing / diverging / Aitken-accelerated limit).
ExtrapolationResult short_time_extrapolate(const AtsParams& p, ShortTimeQuantity q,
                                           double t0, int levels,
                                           const ExtrapolationThresholds& thr = {});

struct SurfaceRow {
    double alpha;
    double k_bar;
    double sigma_eta;  // the product sigma_bar * eta_bar
    double xi0;
};

// Tabulates the Case-5 short-time skew over (alpha, k_bar, sigma_eta) grids;
// row order is alpha-major, then k_bar, then sigma_eta.
std::vector<SurfaceRow> skew_surface(std::span<const double> alphas,
                                     std::span<const double> k_grid,
                                     std::span<const double> se_grid, int threads = 1);

namespace detail {
// xi_0 for given (alpha, k_bar, sigma_bar*eta_bar); shared by skew_limit_case5
// and the surface generator (the law depends only on alpha and k_bar).
double skew_limit_core(double alpha, double k_bar, double sigma_eta);
}

}  // namespace atslab
