#include "atslab/validation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "atslab/math.hpp"
#include "atslab/pricer.hpp"
#include "atslab/subordinator.hpp"
#include "atslab/vol_surface.hpp"

namespace atslab {

namespace {

const AtsParams kCase5{0.0, 1.0, -0.5, 1.0, 1.0, 0.2};

CheckResult martingale_quadrature(Rng& rng, int sets) {
    CheckResult r{"martingale_quadrature", false, 0.0, 1e-8, 0.0};
    for (int i = 0; i < sets; ++i) {
        const AtsParams p = random_admissible(rng);
        for (const double t : {1e-3, 1e-1, 1.0}) {
            const SubordinatorLaw law = subordinator_law(t, p);
            const double u0 = t * p.sigma_bar * p.sigma_bar * p.eta_t(t);
            const double phi_tt = -law.log_laplace(u0);
            LawGrid grid(law, std::array<double, 1>{1.0});
            const double m = grid.integrate(
                [&](double z) { return std::exp(phi_tt - u0 * z); }, 1e-11);
            r.observed = std::max(r.observed, std::abs(m - 1.0));
        }
    }
    r.pass = r.observed < r.bound;
    return r;
}

CheckResult put_call_parity() {
    CheckResult r{"put_call_parity", false, 0.0, 1e-9, 0.0};
    for (const double t : {0.01, 0.1, 1.0}) {
        detail::PricingContext ctx(kCase5, t);
        for (const double y : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
            const double c = ctx.price(y, OptionKind::call, 1e-11);
            const double p = ctx.price(y, OptionKind::put, 1e-11);
            const double residual = std::abs(c - p - (1.0 - std::exp(y * std::sqrt(t))));
            r.observed = std::max(r.observed, residual);
        }
    }
    r.pass = r.observed < r.bound;
    return r;
}

CheckResult mc_vs_quadrature(const ValidationConfig& cfg) {
    CheckResult r{"mc_vs_quadrature", false, 0.0, 3.0, 0.0};
    const OptionSpec spec{0.1, 0.0, OptionKind::call};
    const QuadPrice q = price_quadrature(spec, kCase5, 1e-10);
    const McPrice mc = price_mc(spec, kCase5, cfg.mc_paths, cfg.seed);
    r.observed = std::abs(mc.price - q.value) / mc.std_error;
    r.pass = r.observed < r.bound;
    return r;
}

CheckResult berry_esseen() {
    CheckResult r{"berry_esseen_bound", false, 0.0, 1.0, 0.0};
    for (const double alpha : {0.0, 0.5}) {
        for (const double beta : {1.0, 1.5}) {
            for (const double t : {1e-1, 1e-2, 1e-3}) {
                const double k_t = std::pow(t, beta);  // k_bar = 1
                const SubordinatorLaw law(alpha, t, k_t);
                const double bound = law.gaussian_cdf_bound();
                const double sd = std::sqrt(law.variance());
                const double zlo = std::max(1e-9, 1.0 - 10.0 * sd);
                const double zhi = 1.0 + 10.0 * sd;
                double worst = 0.0;
                for (int i = 0; i < 512; ++i) {
                    const double z = zlo + (zhi - zlo) * i / 511.0;
                    const double gauss = norm_cdf((z - 1.0) * std::sqrt(law.nu()));
                    worst = std::max(worst, std::abs(law.cdf(z) - gauss));
                }
                r.observed = std::max(r.observed, worst / bound);
            }
        }
    }
    r.pass = r.observed <= r.bound;
    return r;
}

CheckResult char_fn_mc(const ValidationConfig& cfg) {
    CheckResult r{"char_fn_mc_match", false, 0.0, 4.0, 0.0};
    const std::size_t n = cfg.mc_paths;
    int stream = 0;
    for (const double t : {1e-3, 1e-1, 1.0}) {
        const std::vector<double> f =
            sample_log_forward(t, kCase5, n, derive_seed(cfg.seed, 100 + stream++));
        for (const double u : {0.5, 1.0, 2.0, 5.0, 10.0}) {
            double sc = 0, ss = 0, sc2 = 0, ss2 = 0;
            for (const double fi : f) {
                const double c = std::cos(u * fi), s = std::sin(u * fi);
                sc += c;
                ss += s;
                sc2 += c * c;
                ss2 += s * s;
            }
            const double nn = static_cast<double>(n);
            const double mre = sc / nn, mim = ss / nn;
            const double se_re = std::sqrt(std::max(0.0, sc2 / nn - mre * mre) / nn);
            const double se_im = std::sqrt(std::max(0.0, ss2 / nn - mim * mim) / nn);
            const std::complex<double> cf = characteristic_fn({u, 0.0}, t, kCase5);
            r.observed = std::max(r.observed, std::abs(mre - cf.real()) / se_re);
            r.observed = std::max(r.observed, std::abs(mim - cf.imag()) / se_im);
        }
    }
    r.pass = r.observed < r.bound;
    return r;
}

CheckResult iv_round_trip(Rng& rng) {
    CheckResult r{"implied_vol_round_trip", false, 0.0, 1e-9, 0.0};
    for (int i = 0; i < 1000; ++i) {
        const double vol = 0.1 + 1.4 * rng.uniform();
        const double t = std::exp(std::log(0.01) + rng.uniform() * std::log(2.0 / 0.01));
        const double y = vol * (8.0 * rng.uniform() - 4.0);
        const OptionSpec spec{t, y, (i % 2 == 0) ? OptionKind::call : OptionKind::put};
        const double iv = implied_vol(black_price(vol, spec), spec);
        r.observed = std::max(r.observed, std::abs(iv - vol));
    }
    r.pass = r.observed < r.bound;
    return r;
}

CheckResult payoff_nonnegative(Rng& rng, int sets) {
    CheckResult r{"conditional_payoff_nonnegative", false, 0.0, 0.0, 0.0};
    double worst = 0.0;
    for (int i = 0; i < sets; ++i) {
        const AtsParams p = random_admissible(rng);
        const double t = std::exp(std::log(1e-4) + rng.uniform() * std::log(1.0 / 1e-4));
        detail::PricingContext ctx(p, t);
        for (int j = 0; j <= 60; ++j) {
            const double z = std::pow(10.0, -6.0 + 9.0 * j / 60.0);
            for (const double y : {-1.0, 0.0, 1.0}) {
                worst = std::min(worst, ctx.conditional_payoff(z, y, OptionKind::call));
                worst = std::min(worst, ctx.conditional_payoff(z, y, OptionKind::put));
            }
        }
    }
    r.observed = worst;
    r.pass = worst >= 0.0;
    return r;
}

CheckResult laplace_bound_a3() {
    CheckResult r{"laplace_bound_lemma_a3", false, 0.0, 0.0, 1e-14};
    for (const double alpha : {0.0, 0.3, 0.5, 0.8}) {
        for (const double nu : {0.25, 1.0, 4.0}) {
            const SubordinatorLaw law(alpha, 1.0, 1.0 / nu);
            for (const double c : {1.0, 2.0}) {
                for (int i = 0; i <= 100; ++i) {
                    const double u = 50.0 * i / 100.0;
                    const double lhs = -std::expm1(law.log_laplace(u));
                    const double rhs = -std::expm1(-c * u);
                    r.observed = std::max(r.observed, lhs - rhs);
                }
            }
        }
    }
    r.pass = r.observed <= r.tolerance;
    return r;
}

CheckResult laplace_monotone_a3() {
    CheckResult r{"laplace_monotone_in_t_lemma_a3", false, 0.0, 0.0, 1e-14};
    double worst = 0.0;  // most negative increment
    for (const double alpha : {0.0, 0.4, 0.5, 0.75}) {
        for (const double beta : {1.0, 1.2}) {
            for (const double u : {0.5, 2.0, 10.0}) {
                double prev = -1.0;
                for (int k = 0; k <= 12; ++k) {
                    const double t = 1e-4 * std::pow(2.0, k);
                    const SubordinatorLaw law(alpha, t, std::pow(t, beta));
                    const double lt = std::exp(law.log_laplace(u));
                    if (prev >= 0.0) worst = std::min(worst, lt - prev);
                    prev = lt;
                }
            }
        }
    }
    r.observed = -worst;
    r.pass = r.observed <= r.tolerance;
    return r;
}

CheckResult phi_ratio_bound(Rng& rng, int sets) {
    CheckResult r{"phi_ratio_bound_lemma_a6", false, 0.0, 1.0, 1e-12};
    for (int i = 0; i < sets; ++i) {
        const AtsParams p = random_admissible(rng);
        for (int k = 0; k <= 10; ++k) {
            const double t = 1e-6 * std::pow(4.0, k);
            const double ratio = phi(t, p) / (p.sigma_bar * p.sigma_bar * p.eta_t(t));
            r.observed = std::max(r.observed, ratio);
        }
    }
    r.pass = r.observed <= r.bound + r.tolerance;
    return r;
}

CheckResult phi_ratio_limit() {
    CheckResult r{"phi_ratio_limit_lemma_a6", false, 0.0, 1e-3, 0.0};
    // delta > -min(1, beta) in all three cases below.
    const AtsParams ps[] = {{0.0, 1.0, -0.25, 1.0, 1.0, 0.2},
                            {0.5, 1.0, -0.5, 2.0, 1.5, 0.3},
                            {0.3, 0.8, -0.5, 0.5, 2.0, 0.4}};
    for (const AtsParams& p : ps) {
        const double t = 1e-8;
        const double ratio = phi(t, p) / (p.sigma_bar * p.sigma_bar * p.eta_t(t));
        r.observed = std::max(r.observed, std::abs(ratio - 1.0));
    }
    r.pass = r.observed < r.bound;
    return r;
}

CheckResult sqrt_moment_bound(Rng& rng, int sets) {
    CheckResult r{"sqrt_moment_bound_lemma_a5", false, 0.0, kSqrt2, 0.0};
    for (int i = 0; i < sets; ++i) {
        const AtsParams p = random_admissible(rng);
        const double t = std::exp(std::log(1e-6) + rng.uniform() * std::log(1.0 / 1e-6));
        const double m = subordinator_law(t, p).fractional_moment(0.5);
        r.observed = std::max(r.observed, m);
        if (m < 0.0) r.observed = kSqrt2 + 1.0;
    }
    r.pass = r.observed <= r.bound;
    return r;
}

CheckResult sqrt_moment_limits() {
    CheckResult r{"sqrt_moment_limits_lemma_a5", false, 0.0, 1.0, 0.0};
    // beta < 1: E[sqrt S_t] -> 0.
    const AtsParams p_lt{0.0, 0.5, 0.0, 1.0, 1.0, 0.2};
    const double v_lt = subordinator_law(1e-12, p_lt).fractional_moment(0.5);
    // beta > 1: -> 1.
    const AtsParams p_gt{0.5, 1.5, -0.5, 1.0, 1.0, 0.2};
    const double v_gt = subordinator_law(1e-8, p_gt).fractional_moment(0.5);
    // beta = 1: constant in t.
    const AtsParams p_eq{0.0, 1.0, -0.5, 1.0, 1.0, 0.2};
    const double d_eq = std::abs(subordinator_law(1e-2, p_eq).fractional_moment(0.5) -
                                 subordinator_law(1e-6, p_eq).fractional_moment(0.5));
    r.observed = std::max({v_lt / 0.02, std::abs(v_gt - 1.0) / 1e-3, d_eq / 1e-9});
    r.pass = r.observed < r.bound;
    return r;
}

CheckResult density_sign_sec4() {
    CheckResult r{"density_sign_sec4", false, 0.0, 0.0, 0.0};
    double worst = 1e300;
    for (const double alpha : {0.0, 0.5}) {
        for (const double k_bar : {0.5, 1.0, 2.0}) {
            const SubordinatorLaw law(alpha, 1.0, k_bar);
            for (int i = 1; i <= 60; ++i) {
                const double z = i / 61.0;
                const double d = law.density(z) - law.density(1.0 / z) / (z * z);
                worst = std::min(worst, d);
            }
        }
    }
    r.observed = worst;
    r.pass = worst > 0.0;
    return r;
}

}  // namespace

AtsParams random_admissible(Rng& rng) {
    AtsParams p{};
    p.alpha = 0.95 * rng.uniform();
    const double beta_max = 1.0 / (1.0 - p.alpha / 2.0);
    p.beta = beta_max * rng.uniform();
    const double lb = (p.alpha == 0.0)
                          ? -p.beta
                          : -std::min(p.beta, (1.0 - p.beta * (1.0 - p.alpha)) / p.alpha);
    p.delta = lb * 0.97 * rng.uniform();
    p.k_bar = std::exp(std::log(0.3) + rng.uniform() * std::log(10.0));
    p.eta_bar = std::exp(std::log(0.3) + rng.uniform() * std::log(10.0));
    p.sigma_bar = 0.1 + 0.5 * rng.uniform();
    return p;
}

std::vector<CheckResult> run_validation_suite(const ValidationConfig& cfg) {
    Rng rng(cfg.seed);
    std::vector<CheckResult> out;
    out.push_back(martingale_quadrature(rng, cfg.random_param_sets));
    out.push_back(put_call_parity());
    out.push_back(mc_vs_quadrature(cfg));
    out.push_back(berry_esseen());
    out.push_back(char_fn_mc(cfg));
    out.push_back(iv_round_trip(rng));
    out.push_back(payoff_nonnegative(rng, cfg.random_param_sets));
    out.push_back(laplace_bound_a3());
    out.push_back(laplace_monotone_a3());
    out.push_back(phi_ratio_bound(rng, cfg.random_param_sets));
    out.push_back(phi_ratio_limit());
    out.push_back(sqrt_moment_bound(rng, cfg.random_param_sets));
    out.push_back(sqrt_moment_limits());
    out.push_back(density_sign_sec4());
    return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CheckResult& c) { return c.pass; });
}

}  // namespace atslab
