#pragma once

#include <cstdint>

#include "atslab/ats_model.hpp"
#include "atslab/subordinator.hpp"

namespace atslab {

enum class OptionKind { call, put };

// European option under the internal normalization F0(t) = 1, B_t = 1;
// y is the moneyness degree, x = y sqrt(t) = ln(K/F0).
struct OptionSpec {
    double t;
    double y;
    OptionKind kind;
};

struct QuadPrice {
    double value;
    double achieved_tol;  // abs-error estimate of the quadrature
};

struct McPrice {
    double price;
    double std_error;
};

// l_t^z = -sigma eta_t sqrt(z t) + phi_t sqrt(t) / (sigma sqrt(z)).
double l_term(double z, double t, const AtsParams& p);

// Black-76 price in the y-parameterization; vol > 0.
double black_price(double vol, const OptionSpec& spec);
double black_vega(double vol, const OptionSpec& spec);  // d black_price / d vol

// Bracketed quantity of the conditional (Hull-White style) price at S_t = z;
// nonnegative by construction.
double conditional_payoff(double z, const OptionSpec& spec, const AtsParams& p);

// E[conditional_payoff(S_t, .)] against the subordinator density.
QuadPrice price_quadrature(const OptionSpec& spec, const AtsParams& p, double rel_tol = 1e-9);

// Monte Carlo price over sample_log_forward draws.
McPrice price_mc(const OptionSpec& spec, const AtsParams& p, std::size_t paths,
                 std::uint64_t seed);

namespace detail {

// Per-(params, t) pricing state: drift, subordinator law and a shared density
// grid, so several integrals (call, put, smirk expectation) reuse one grid.
class PricingContext {
public:
    PricingContext(const AtsParams& p, double t, int base_panels = 32);

    double price(double y, OptionKind kind, double rel_tol = 1e-9,
                 double* achieved = nullptr);
    double conditional_payoff(double z, double y, OptionKind kind) const;
    double l_term(double z) const;
    // E[N(l_t^{S_t} - sigma sqrt(S_t t)/2)], the smirk-formula expectation.
    double smirk_expectation(double rel_tol = 1e-10, double* achieved = nullptr);

    double t() const { return t_; }
    double phi_tt() const { return phi_tt_; }
    double z_star() const { return z_star_; }  // phi_t / (sigma^2 eta_t)
    const AtsParams& params() const { return params_; }
    const SubordinatorLaw& law() const { return law_; }

private:
    AtsParams params_;
    double t_, sigma_, eta_t_;
    SubordinatorLaw law_;
    double phi_tt_, z_star_;
    LawGrid grid_;
};

}  // namespace detail

}  // namespace atslab
