#include "atslab/pricer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

#include "atslab/errors.hpp"
#include "atslab/math.hpp"

namespace atslab {

double l_term(double z, double t, const AtsParams& p) {
    if (!(z > 0.0)) throw std::domain_error("l_term: z must be > 0");
    const double phi_t = phi(t, p);
    return -p.sigma_bar * p.eta_t(t) * std::sqrt(z * t) +
           phi_t * std::sqrt(t) / (p.sigma_bar * std::sqrt(z));
}

double black_price(double vol, const OptionSpec& spec) {
    if (!(vol > 0.0)) throw std::domain_error("black_price: vol must be > 0");
    const double h = 0.5 * vol * std::sqrt(spec.t);
    const double x = spec.y * std::sqrt(spec.t);
    if (spec.kind == OptionKind::call) {
        const double a = -spec.y / vol + h;
        const double b = -spec.y / vol - h;
        return std::max(0.0, norm_cdf_diff(a, b) - std::expm1(x) * norm_cdf(b));
    }
    const double a = spec.y / vol + h;
    const double b = spec.y / vol - h;
    return std::max(0.0, norm_cdf_diff(a, b) + std::expm1(x) * norm_cdf(a));
}

double black_vega(double vol, const OptionSpec& spec) {
    const double h = 0.5 * vol * std::sqrt(spec.t);
    const double d1 = -spec.y / vol + h;
    return std::sqrt(spec.t) * norm_pdf(d1);
}

namespace detail {

PricingContext::PricingContext(const AtsParams& p, double t, int base_panels)
    : params_(p),
      t_(t),
      sigma_(p.sigma_bar),
      eta_t_(p.eta_t(t)),
      law_(subordinator_law(t, p)),
      phi_tt_(-law_.log_laplace(t * sigma_ * sigma_ * eta_t_)),
      z_star_(phi_tt_ / (t * sigma_ * sigma_ * eta_t_)),
      grid_(law_, std::array<double, 2>{1.0, z_star_}, base_panels) {}

double PricingContext::l_term(double z) const {
    return -sigma_ * eta_t_ * std::sqrt(z * t_) +
           phi_tt_ / (std::sqrt(t_) * sigma_ * std::sqrt(z));
}

double PricingContext::conditional_payoff(double z, double y, OptionKind kind) const {
    const double s = sigma_ * std::sqrt(z * t_);
    const double x = y * std::sqrt(t_);
    // The -y/(sigma sqrt z) part of the moneyness and the phi part of l_t^z
    // share the 1/sqrt(z) pole; combining them first keeps z -> 0 finite.
    const double A = (phi_tt_ / std::sqrt(t_) - y) / (sigma_ * std::sqrt(z)) +
                     sigma_ * std::sqrt(z * t_) * (0.5 - eta_t_);
    const double B = A - s;
    const double E = phi_tt_ - t_ * sigma_ * sigma_ * eta_t_ * z;
    double v;
    if (kind == OptionKind::call) {
        v = norm_cdf_diff(A, B) + std::expm1(E - x) * norm_cdf(A);
    } else {
        v = norm_cdf_diff(-B, -A) - std::expm1(E - x) * norm_cdf(-A);
    }
    return std::max(0.0, std::exp(x) * v);
}

double PricingContext::price(double y, OptionKind kind, double rel_tol, double* achieved) {
    return grid_.integrate(
        [this, y, kind](double z) { return conditional_payoff(z, y, kind); }, rel_tol,
        achieved);
}

double PricingContext::smirk_expectation(double rel_tol, double* achieved) {
    return grid_.integrate(
        [this](double z) {
            return norm_cdf(l_term(z) - 0.5 * sigma_ * std::sqrt(z * t_));
        },
        rel_tol, achieved);
}

}  // namespace detail

double conditional_payoff(double z, const OptionSpec& spec, const AtsParams& p) {
    if (!(z > 0.0)) throw std::domain_error("conditional_payoff: z must be > 0");
    detail::PricingContext ctx(p, spec.t);
    return ctx.conditional_payoff(z, spec.y, spec.kind);
}

QuadPrice price_quadrature(const OptionSpec& spec, const AtsParams& p, double rel_tol) {
    detail::PricingContext ctx(p, spec.t);
    double achieved = 0.0;
    const double v = ctx.price(spec.y, spec.kind, rel_tol, &achieved);
    return {v, achieved};
}

McPrice price_mc(const OptionSpec& spec, const AtsParams& p, std::size_t paths,
                 std::uint64_t seed) {
    if (paths < 1) throw std::invalid_argument("price_mc: paths must be >= 1");
    const std::vector<double> f = sample_log_forward(spec.t, p, paths, seed);
    const double ex = std::exp(spec.y * std::sqrt(spec.t));
    double sum = 0.0, sum2 = 0.0;
    for (const double fi : f) {
        const double payoff = (spec.kind == OptionKind::call)
                                  ? std::max(0.0, std::exp(fi) - ex)
                                  : std::max(0.0, ex - std::exp(fi));
        sum += payoff;
        sum2 += payoff * payoff;
    }
    const double n = static_cast<double>(paths);
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

}  // namespace atslab
