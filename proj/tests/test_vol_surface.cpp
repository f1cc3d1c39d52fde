#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "atslab/errors.hpp"
#include "atslab/math.hpp"
#include "atslab/rng.hpp"
#include "atslab/vol_surface.hpp"
#include "oracles.hpp"

using namespace atslab;

namespace {
const AtsParams kCase5{0.0, 1.0, -0.5, 1.0, 1.0, 0.2};
const AtsParams kCase4{0.0, 0.5, -0.5, 1.0, 1.0, 0.2};
const AtsParams kCase3{0.0, 1.0, -0.25, 1.0, 1.0, 0.2};
}

TEST_CASE("implied_vol: round trip, boundary behavior, error paths") {
    const OptionSpec spec{0.5, 0.4, OptionKind::call};
    double ach = 0.0;
    CHECK(implied_vol(black_price(0.25, spec), spec, &ach) ==
          doctest::Approx(0.25).epsilon(1e-9));
    CHECK(ach < 1e-10);

    // 200 random triples (the 1000-triple sweep runs in cmd_validate)
    Rng rng(5150);
    for (int i = 0; i < 200; ++i) {
        const double vol = 0.1 + 1.4 * rng.uniform();
        const double t = std::exp(std::log(0.01) + rng.uniform() * std::log(200.0));
        const double y = vol * (8.0 * rng.uniform() - 4.0);
        const OptionSpec s{t, y, i % 2 ? OptionKind::put : OptionKind::call};
        CHECK(std::abs(implied_vol(black_price(vol, s), s) - vol) < 1e-9);
    }

    // price just above the lower no-arbitrage bound: small positive vol
    // (the bound is approached like exp(-1/(2v^2)), so +1e-10 maps to v ~ 0.18)
    const OptionSpec itm{1.0, -1.0, OptionKind::call};
    const double lo = 1.0 - std::exp(-1.0);
    const double iv = implied_vol(lo + 1e-10, itm);
    CHECK(iv > 0.0);
    CHECK(iv < 0.25);
    CHECK(black_price(iv, itm) == doctest::Approx(lo + 1e-10).epsilon(1e-9));

    CHECK_THROWS_AS(implied_vol(1.5, spec), PriceBoundsError);
    CHECK_THROWS_AS(implied_vol(-0.1, spec), PriceBoundsError);
    // a price this close to the upper bound needs vol > 10
    CHECK_THROWS_AS(implied_vol(0.9999999999, {1.0, 0.0, OptionKind::call}), BracketError);
}

TEST_CASE("atm_vol: Case-5 value sits inside the Prop-4 price bounds") {
    const double t = 1e-4;
    const double sig = atm_vol(t, kCase5);
    CHECK(sig > 0.0);
    CHECK(std::isfinite(sig));

    // Upper bound: E[c] <= sqrt(t/2pi) sigma E[sqrt S] + (e^{phi_t t} - 1).
    const SubordinatorLaw law = subordinator_law(t, kCase5);
    const double root_t_2pi = std::sqrt(t / (2.0 * M_PI));
    const double phi_tt = phi(t, kCase5) * t;
    const double upper_price = root_t_2pi * kCase5.sigma_bar * law.fractional_moment(0.5) +
                               std::expm1(phi_tt);
    // Lower bound: c >= c(z*, 0) P(S <= z*) (the integrand is decreasing there).
    const double eta_t = kCase5.eta_t(t);
    const double z_star = phi_tt / (t * kCase5.sigma_bar * kCase5.sigma_bar * eta_t);
    const double c_star =
        2.0 * norm_cdf(0.5 * kCase5.sigma_bar * std::sqrt(z_star * t)) - 1.0;
    const double lower_price = c_star * law.cdf(z_star);

    const double price = black_price(sig, {t, 0.0, OptionKind::call});
    CHECK(price <= upper_price * (1.0 + 1e-9));
    CHECK(price >= lower_price * (1.0 - 1e-9));

    // Case 5: finite positive also at t = 1e-6
    const double sig6 = atm_vol(1e-6, kCase5);
    CHECK(sig6 > 0.0);
    CHECK(sig6 < 1.0);
}

TEST_CASE("atm_vol: Case-1 decay and Case-2 growth") {
    const AtsParams case1{0.0, 0.5, 0.0, 1.0, 25.0, 0.2};
    double prev = 1e9;
    for (int k = 2; k <= 5; ++k) {
        const double v = atm_vol(std::pow(10.0, -k), case1);
        CHECK(v < prev);
        prev = v;
    }

    const AtsParams case2{0.5, 1.0, -0.75, 1.5, 25.0, 0.1};
    prev = 0.0;
    for (int k = 2; k <= 4; ++k) {
        const double v = atm_vol(std::pow(10.0, -k), case2);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("skew_term_closed: Case-4 limit, Case-3 vanishing, Case-5 consistency") {
    // Case 4: -sqrt(pi/2) within 0.05 at t = 1e-5, with decreasing error
    double prev_err = 1e9;
    for (const double t : {1e-3, 1e-4, 1e-5}) {
        const double err = std::abs(skew_term_closed(t, kCase4) + kSqrtPiOver2);
        CHECK(err < prev_err);
        prev_err = err;
    }
    CHECK(prev_err < 0.05);

    // Case 3: vanishing skew
    const double s2 = skew_term_closed(1e-2, kCase3);
    const double s4 = skew_term_closed(1e-4, kCase3);
    CHECK(std::abs(s4) < std::abs(s2));
    CHECK(std::abs(s4) < 0.02);

    // Case 5: matches the closed-form limit at small t
    CHECK(std::abs(skew_term_closed(1e-5, kCase5) - skew_limit_case5(kCase5)) < 1e-2);
}

TEST_CASE("skew_term_fd agrees with the closed form (Cases 3-5)") {
    const double h = 1e-4;
    for (const AtsParams& p : {kCase3, kCase4, kCase5}) {
        for (const double t : {1e-2, 1e-4}) {
            const double closed = skew_term_closed(t, p);
            const double fd = skew_term_fd(t, p, h);
            CHECK(std::abs(fd - closed) < std::max(1e-3, 10.0 * h * h));
        }
    }
    CHECK_THROWS_AS(skew_term_fd(1e-2, kCase5, 0.0), std::domain_error);
}

TEST_CASE("skew in x-coordinates equals xi_t / sqrt(t)") {
    const double t = 0.01;
    const double closed = skew_term_closed(t, kCase5);
    // reparameterized finite difference: dI/dx at x=0 with I(x) = smile(y = x/sqrt t)
    const double hx = 1e-4 * std::sqrt(t);
    detail::PricingContext ctx(kCase5, t);
    const auto iv_at_x = [&](double x) {
        const double y = x / std::sqrt(t);
        const double pr = ctx.price(y, OptionKind::call, 1e-11);
        return implied_vol(pr, {t, y, OptionKind::call});
    };
    const double dx = (iv_at_x(hx) - iv_at_x(-hx)) / (2.0 * hx);
    CHECK(dx == doctest::Approx(closed / std::sqrt(t)).epsilon(2e-3));
}

TEST_CASE("skew_term_fd: flat-smile degeneration") {
    // eta -> 0 with S_t concentrated at 1: Black world, zero skew
    const AtsParams flat{0.0, 1.0, -0.5, 1e-6, 1e-12, 0.2};
    CHECK(std::abs(skew_term_fd(0.1, flat, 1e-4)) < 1e-5);
}

TEST_CASE("skew_limit_case5: regime guard, frozen values, limits, brute force") {
    CHECK_THROWS_AS(skew_limit_case5(kCase4), RegimeError);                  // beta < 1
    CHECK_THROWS_AS(skew_limit_case5({0.0, 1.0, -0.4, 1, 1, 0.2}), RegimeError);
    CHECK_THROWS_AS(skew_limit_case5({0.0, 1.2, -0.5, 1, 1, -1.0}), RegimeError);

    // frozen oracle values (50-digit quadrature of the limit formula)
    CHECK(skew_limit_case5(kCase5) ==
          doctest::Approx(-0.13571020623845016).epsilon(1e-9));
    CHECK(skew_limit_case5({0.5, 1.0, -0.5, 1.0, 1.0, 0.2}) ==
          doctest::Approx(-0.077110083360577475).epsilon(1e-9));
    CHECK(skew_limit_case5({0.0, 1.0, -0.5, 1.0, 1.0, 1.0}) ==
          doctest::Approx(-0.30257262589881515).epsilon(1e-9));

    // vanishing limits in sigma*eta and k_bar
    CHECK(std::abs(skew_limit_case5({0.0, 1.0, -0.5, 1.0, 1e-8, 0.2})) < 1e-7);
    CHECK(std::abs(skew_limit_case5({0.0, 1.0, -0.5, 1e-7, 1.0, 0.2})) < 1e-3);
    CHECK(std::abs(skew_limit_case5({0.5, 1.0, -0.5, 1e-7, 1.0, 0.2})) < 1e-3);

    // independent brute-force quadrature (test-side Simpson, Exp(1) density)
    const double se = 1.0;
    const double brute =
        -kSqrtPiOver2 *
        oracles::integrate_segments(
            [se](double z) {
                return std::exp(-z) *
                       std::erf(se * (1.0 / std::sqrt(z) - std::sqrt(z)) / std::sqrt(2.0));
            },
            {1e-13, 1e-8, 1e-4, 0.01, 0.1, 1.0, 10.0, 40.0}, 1e-13);
    CHECK(std::abs(skew_limit_case5({0.0, 1.0, -0.5, 1.0, 1.0, 1.0}) - brute) < 1e-8);
}

TEST_CASE("short_time_extrapolate: three regimes") {
    // Case 5 skew: converging to the closed-form limit
    const auto conv = short_time_extrapolate(kCase5, ShortTimeQuantity::skew_term, 1e-3, 5);
    CHECK(conv.classification == LimitClass::converging);
    CHECK(std::abs(conv.limit - skew_limit_case5(kCase5)) < 1e-2);

    // Case 1 ATM vol: vanishing (thresholds tuned to the t^{1/4} decay over
    // 12 halvings; the defaults are calibrated for decade grids)
    ExtrapolationThresholds thr;
    thr.vanish_ratio = 0.3;
    const AtsParams case1{0.0, 0.5, 0.0, 1.0, 25.0, 0.2};
    const auto van =
        short_time_extrapolate(case1, ShortTimeQuantity::atm_vol, 1e-2, 12, thr);
    CHECK(van.classification == LimitClass::vanishing);
    CHECK(van.fitted_power > 0.1);

    // Case 2 ATM vol: diverging
    thr.diverge_ratio = 5.0;
    const AtsParams case2{0.5, 1.0, -0.75, 1.5, 25.0, 0.1};
    const auto div =
        short_time_extrapolate(case2, ShortTimeQuantity::atm_vol, 1e-2, 12, thr);
    CHECK(div.classification == LimitClass::diverging);
    CHECK(div.fitted_power < 0.0);

    CHECK_THROWS_AS(short_time_extrapolate(kCase5, ShortTimeQuantity::skew_term, 1e-3, 3),
                    std::invalid_argument);
}

TEST_CASE("skew_surface: signs, bounds, monotonicity on a coarse grid") {
    const std::array<double, 2> alphas{0.0, 0.5};
    const std::array<double, 4> ks{0.01, 0.5, 1.0, 2.0};
    const std::array<double, 4> ses{0.01, 0.5, 1.0, 2.0};
    const auto rows = skew_surface(alphas, ks, ses, 1);
    REQUIRE(rows.size() == alphas.size() * ks.size() * ses.size());
    for (const auto& r : rows) {
        CHECK(r.xi0 <= 1e-12);
        CHECK(r.xi0 >= -kSqrtPiOver2 - 1e-12);
        if (r.k_bar >= 0.5 && r.sigma_eta >= 0.5) CHECK(r.xi0 < -1e-3);  // interior: strictly negative
        if (r.k_bar == 0.01 || r.sigma_eta == 0.01) CHECK(std::abs(r.xi0) < 0.05);
    }
    // nonincreasing along both axes
    const std::size_t ns = ses.size(), nk = ks.size();
    for (std::size_t ia = 0; ia < alphas.size(); ++ia) {
        for (std::size_t ik = 0; ik < nk; ++ik)
            for (std::size_t is = 0; is + 1 < ns; ++is)
                CHECK(rows[(ia * nk + ik) * ns + is + 1].xi0 <=
                      rows[(ia * nk + ik) * ns + is].xi0 + 1e-9);
        for (std::size_t is = 0; is < ns; ++is)
            for (std::size_t ik = 0; ik + 1 < nk; ++ik)
                CHECK(rows[(ia * nk + ik + 1) * ns + is].xi0 <=
                      rows[(ia * nk + ik) * ns + is].xi0 + 1e-9);
    }
}

TEST_CASE("smirk denominator tends to 1/sqrt(2 pi) (Cases 3-5)") {
    for (const AtsParams& p : {kCase3, kCase4, kCase5}) {
        const double sig = atm_vol(1e-8, p);
        const double den = norm_pdf(-0.5 * sig * std::sqrt(1e-8));
        CHECK(std::abs(den - kInvSqrt2Pi) < 1e-4);
    }
}
