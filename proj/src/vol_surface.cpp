#include "atslab/vol_surface.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "atslab/errors.hpp"
#include "atslab/math.hpp"
#include "atslab/parallel.hpp"

namespace atslab {

namespace {

std::pair<double, double> no_arb_bounds(const OptionSpec& spec) {
    const double ex = std::exp(spec.y * std::sqrt(spec.t));
    if (spec.kind == OptionKind::call) return {std::max(0.0, 1.0 - ex), 1.0};
    return {std::max(0.0, ex - 1.0), ex};
}

double atm_vol_from_context(detail::PricingContext& ctx) {
    double ach_c = 0.0, ach_p = 0.0;
    const double c = ctx.price(0.0, OptionKind::call, 1e-10, &ach_c);
    const double put = ctx.price(0.0, OptionKind::put, 1e-10, &ach_p);
    const double parity_tol = std::max(1e-9, 50.0 * (ach_c + ach_p));
    if (std::abs(c - put) > parity_tol)
        throw QuadratureError("atm_vol: ATM call/put parity violated by the quadrature",
                              std::abs(c - put));
    return implied_vol(c, {ctx.t(), 0.0, OptionKind::call});
}

}  // namespace

double implied_vol(double price, const OptionSpec& spec, double* achieved_tol) {
    const auto [lo_arb, hi_arb] = no_arb_bounds(spec);
    if (!(price > lo_arb && price < hi_arb))
        throw PriceBoundsError("implied_vol: price outside the no-arbitrage bounds");

    double lo = 1e-8, hi = 5.0;
    while (black_price(lo, spec) > price && lo > 1e-250) lo *= 0.25;
    if (black_price(hi, spec) < price) {
        hi = 10.0;  // one doubling of headroom, then fail
        if (black_price(hi, spec) < price)
            throw BracketError("implied_vol: no root below vol = 10");
    }

    double v = std::clamp(price * kSqrt2Pi / std::sqrt(spec.t), lo, hi);  // ATM-style seed
    double step = hi - lo;
    for (int it = 0; it < 200; ++it) {
        const double diff = black_price(v, spec) - price;
        (diff < 0.0 ? lo : hi) = v;
        const double vega = black_vega(v, spec);
        double next = (vega > 1e-300) ? v - diff / vega : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        step = std::abs(next - v);
        v = next;
        if (step < 1e-10) break;
    }
    if (achieved_tol) *achieved_tol = step;
    return v;
}

double atm_vol(double t, const AtsParams& p) {
    detail::PricingContext ctx(p, t);
    return atm_vol_from_context(ctx);
}

double skew_term_closed(double t, const AtsParams& p) {
    detail::PricingContext ctx(p, t);
    const double sig = atm_vol_from_context(ctx);
    const double en = ctx.smirk_expectation(1e-10);
    const double h = 0.5 * sig * std::sqrt(t);
    return (norm_cdf(-h) - en) / norm_pdf(h);
}

double skew_term_fd(double t, const AtsParams& p, double h) {
    if (!(h > 0.0)) throw std::domain_error("skew_term_fd: h must be > 0");
    if (t < 1e-6) h = std::max(h, 1e-3);
    detail::PricingContext ctx(p, t);
    const auto iv_at = [&](double y) {
        const double pr = ctx.price(y, OptionKind::call, 1e-10);
        return implied_vol(pr, {t, y, OptionKind::call});
    };
    const auto central = [&](double step) {
        return (iv_at(step) - iv_at(-step)) / (2.0 * step);
    };
    const double d_h = central(h);
    const double d_h2 = central(0.5 * h);
    return (4.0 * d_h2 - d_h) / 3.0;
}

namespace detail {

double skew_limit_core(double alpha, double k_bar, double sigma_eta) {
    const SubordinatorLaw law(alpha, 1.0, k_bar);  // beta=1: the law is t-invariant
    LawGrid grid(law, std::array<double, 1>{1.0});
    const double c = sigma_eta / kSqrt2;
    const double v = grid.integrate(
        [c](double z) {
            const double rz = 1.0 / std::sqrt(z) - std::sqrt(z);
            return std::erf(c * rz);
        },
        1e-10);
    return -kSqrtPiOver2 * v;
}

}  // namespace detail

double skew_limit_case5(const AtsParams& p) {
    const ValidationReport rep = validate(p);
    if (!rep.ok) throw RegimeError("skew_limit_case5: " + rep.violation);
    if (!(p.beta == 1.0 && p.delta == -0.5))
        throw RegimeError("skew_limit_case5: requires beta = 1 and delta = -1/2");
    return detail::skew_limit_core(p.alpha, p.k_bar, p.sigma_bar * p.eta_bar);
}

ExtrapolationResult short_time_extrapolate(const AtsParams& p, ShortTimeQuantity q,
                                           double t0, int levels,
                                           const ExtrapolationThresholds& thr) {
    if (levels < 4) throw std::invalid_argument("short_time_extrapolate: levels must be >= 4");
    ExtrapolationResult out;
    for (int k = 0; k < levels; ++k) {
        const double t = t0 * std::pow(2.0, -k);
        out.ts.push_back(t);
        out.values.push_back(q == ShortTimeQuantity::atm_vol ? atm_vol(t, p)
                                                             : skew_term_closed(t, p));
    }

    // Log-log regression of |value| on t over all levels.
    const int n = levels;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(out.ts[i]);
        const double ly = std::log(std::max(std::abs(out.values[i]), 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.fitted_power = slope;

    const double first = std::abs(out.values.front());
    const double last = std::abs(out.values.back());
    if (last < thr.vanish_ratio * first && slope > thr.vanish_min_slope) {
        out.classification = LimitClass::vanishing;
        return out;
    }
    if (last > thr.diverge_ratio * first) {
        out.classification = LimitClass::diverging;
        return out;
    }
    const double a = out.values[n - 3], b = out.values[n - 2], c = out.values[n - 1];
    if (std::abs(c - b) > std::abs(b - a) * 1.001) {
        out.classification = LimitClass::inconclusive;  // not contracting
        return out;
    }
    const double d2 = c - 2.0 * b + a;
    out.classification = LimitClass::converging;
    out.limit = (std::abs(d2) < 1e-300) ? c : c - (c - b) * (c - b) / d2;
    return out;
}

std::vector<SurfaceRow> skew_surface(std::span<const double> alphas,
                                     std::span<const double> k_grid,
                                     std::span<const double> se_grid, int threads) {
    std::vector<SurfaceRow> rows(alphas.size() * k_grid.size() * se_grid.size());
    // One (alpha, k_bar) task builds one law/grid and sweeps the se axis.
    const std::size_t tasks = alphas.size() * k_grid.size();
    parallel_for(tasks, threads, [&](std::size_t task) {
        const std::size_t ia = task / k_grid.size();
        const std::size_t ik = task % k_grid.size();
        const double alpha = alphas[ia], k_bar = k_grid[ik];
        const SubordinatorLaw law(alpha, 1.0, k_bar);
        LawGrid grid(law, std::array<double, 1>{1.0});
        for (std::size_t is = 0; is < se_grid.size(); ++is) {
            const double c = se_grid[is] / kSqrt2;
            const double v = grid.integrate(
                [c](double z) { return std::erf(c * (1.0 / std::sqrt(z) - std::sqrt(z))); },
                1e-10);
            rows[(ia * k_grid.size() + ik) * se_grid.size() + is] =
                {alpha, k_bar, se_grid[is], -kSqrtPiOver2 * v};
        }
    });
    return rows;
}

}  // namespace atslab
