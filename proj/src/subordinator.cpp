#include "atslab/subordinator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "atslab/errors.hpp"
#include "atslab/math.hpp"
#include "atslab/quadrature.hpp"
#include "atslab/rng.hpp"

namespace atslab {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

// ln Phi(-b) for b >= 0 without underflow (needed by the IG cdf where the
// e^{2 nu} prefactor can be astronomically large against a tiny tail).
double log_norm_cdf_neg(double b) {
    if (b < 35.0) return std::log(norm_cdf(-b));
    const double b2 = b * b;
    const double series = -1.0 / b2 + 3.0 / (b2 * b2) - 15.0 / (b2 * b2 * b2);
    return -0.5 * b2 - std::log(b) - std::log(kSqrt2Pi) + std::log1p(series);
}

double ig_pdf(double z, double nu) {
    if (z <= 0.0) return 0.0;
    const double lg = 0.5 * (std::log(nu) - std::log(2.0 * kPi) - 3.0 * std::log(z)) -
                      nu * (z - 1.0) * (z - 1.0) / (2.0 * z);
    return std::exp(lg);
}

double ig_cdf(double z, double nu) {
    if (z <= 0.0) return 0.0;
    const double a = std::sqrt(nu / z);
    const double t1 = norm_cdf(a * (z - 1.0));
    const double t2 = std::exp(2.0 * nu + log_norm_cdf_neg(a * (z + 1.0)));
    return std::min(1.0, t1 + t2);
}

double ig_quantile(double p, double nu) {
    double lo = 1.0, hi = 1.0;
    int guard = 0;
    while (ig_cdf(lo, nu) > p && lo > 1e-300 && ++guard < 4000) lo *= 0.5;
    guard = 0;
    while (ig_cdf(hi, nu) < p && hi < 1e300 && ++guard < 4000) hi *= 2.0;
    for (int i = 0; i < 200 && (hi - lo) > 1e-13 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (ig_cdf(mid, nu) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double gamma_quantile(double p, double nu) {
    try {
        if (p <= 0.5) return boost::math::gamma_p_inv(nu, p) / nu;
        return boost::math::gamma_q_inv(nu, 1.0 - p) / nu;
    } catch (const std::exception&) {
        double lo = 0.0, hi = 1.0;
        while (boost::math::gamma_p(nu, nu * hi) < p && hi < 1e300) hi *= 2.0;
        for (int i = 0; i < 200 && (hi - lo) > 1e-13 * (hi + 1e-300); ++i) {
            const double mid = 0.5 * (lo + hi);
            (boost::math::gamma_p(nu, nu * mid) < p ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
}

// Monotone cubic (Fritsch-Carlson) interpolant on given knots.
struct MonotoneCubic {
    std::vector<double> x, y, m;

    void build(std::vector<double> xs, std::vector<double> ys) {
        x = std::move(xs);
        y = std::move(ys);
        const std::size_t n = x.size();
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        m.assign(n, 0.0);
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i)
            m[i] = (d[i - 1] * d[i] <= 0.0) ? 0.0 : 0.5 * (d[i - 1] + d[i]);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (d[i] == 0.0) {
                m[i] = m[i + 1] = 0.0;
            } else {
                const double a = m[i] / d[i], b = m[i + 1] / d[i];
                const double s = a * a + b * b;
                if (s > 9.0) {
                    const double f = 3.0 / std::sqrt(s);
                    m[i] = f * a * d[i];
                    m[i + 1] = f * b * d[i];
                }
            }
        }
    }

    double eval_on(std::size_t i, double z) const {
        const double h = x[i + 1] - x[i];
        const double tt = (z - x[i]) / h;
        const double t2 = tt * tt, t3 = t2 * tt;
        return y[i] * (2 * t3 - 3 * t2 + 1) + h * m[i] * (t3 - 2 * t2 + tt) +
               y[i + 1] * (-2 * t3 + 3 * t2) + h * m[i + 1] * (t3 - t2);
    }

    double eval(double z) const {
        const std::size_t i =
            std::min<std::size_t>(std::upper_bound(x.begin(), x.end(), z) - x.begin(),
                                  x.size() - 1) - 1;
        return eval_on(std::min(i, x.size() - 2), z);
    }

    // Inverse on segment i by bisection (interpolant is monotone by construction).
    double invert(double target) const {
        std::size_t i =
            std::min<std::size_t>(std::upper_bound(y.begin(), y.end(), target) - y.begin(),
                                  y.size() - 1) - 1;
        i = std::min(i, x.size() - 2);
        double lo = x[i], hi = x[i + 1];
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (eval_on(i, mid) < target ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// detail::InversionCache
// ---------------------------------------------------------------------------

namespace detail {

InversionCache::InversionCache(double alpha, double nu) : alpha_(alpha), nu_(nu) {
    double g = kPi / 4.0;
    if (alpha_ > 0.0) g = std::min(g, 0.95 * kPi * (1.0 - alpha_) / (2.0 * alpha_));
    const double ridge = 8.0 / ((1.0 - alpha_) * nu_);
    if (ridge < 1.0) g = std::min(g, std::asin(ridge));
    gamma_ = std::max(g, 1e-3);

    // Support window for quantile bracketing.
    const double sd = std::sqrt(1.0 / nu_);
    z_hi_ = 1.0 + 8.0 * sd;
    int guard = 0;
    while (cdf(z_hi_) < 1.0 - 1e-13 && ++guard < 300) z_hi_ *= 1.7;
    z_lo_ = std::max(1e-12, 1.0 - 8.0 * sd);
    guard = 0;
    while (z_lo_ > 1e-250 && cdf(z_lo_) > 1e-13 && ++guard < 900) z_lo_ *= 0.4;
}

std::complex<double> InversionCache::log_laplace(std::complex<double> w) const {
    const double b = 1.0 / (nu_ * (1.0 - alpha_));
    const std::complex<double> one_pwb = 1.0 + w * b;
    return nu_ * (1.0 - alpha_) / alpha_ *
           (1.0 - std::exp(alpha_ * std::log(one_pwb)));
}

double InversionCache::ray_integral(double z, bool cdf_kernel) const {
    const double cg = std::cos(gamma_), sg = std::sin(gamma_);
    const std::complex<double> ray(cg, -sg);       // e^{-i gamma}
    const std::complex<double> mins_i_ray(-sg, -cg);  // -i e^{-i gamma}

    const auto kernel = [&](double s) -> std::complex<double> {
        return std::exp(std::complex<double>(0.0, -z * s) * ray +
                        log_laplace(mins_i_ray * s));
    };
    const auto f = [&](double s) {
        const std::complex<double> k = kernel(s);
        if (cdf_kernel) return k.imag() / s;
        return (ray * k).real();
    };
    const auto envelope = [&](double s) {
        return std::exp(std::real(log_laplace(mins_i_ray * s)) - z * s * sg);
    };

    const double s1 = 1.0 + std::sqrt(nu_);
    double acc = 0.0;
    double lo = 0.0;
    for (int k = 0; k < 200; ++k) {
        const double hi = s1 * std::pow(2.0, k);
        const QuadResult r = integrate_gk(f, lo, hi, 1e-11, 1e-16, 800);
        acc += r.value;
        lo = hi;
        const double rem = envelope(hi) * (hi + 1.0 / (z * sg + 1e-300) + 1.0);
        if (k >= 2 && rem <= 1e-16 * (std::abs(acc) + 1e-8)) return acc;
    }
    throw QuadratureError("subordinator inversion: truncation not reached", 1e99);
}

double InversionCache::density(double z) const {
    if (z <= 0.0) return 0.0;
    return std::max(0.0, ray_integral(z, false) / kPi);
}

double InversionCache::cdf(double z) const {
    if (z <= 0.0) return 0.0;
    const double v = 0.5 + gamma_ / kPi - ray_integral(z, true) / kPi;
    return std::min(1.0, std::max(0.0, v));
}

double InversionCache::quantile(double p, double rel_tol) const {
    double lo = z_lo_, hi = z_hi_;
    if (cdf(lo) > p) return lo;
    if (cdf(hi) < p) return hi;
    for (int i = 0; i < 120 && (hi - lo) > rel_tol * (std::abs(hi) + 1e-30); ++i) {
        const double mid = 0.5 * (lo + hi);
        (cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// SubordinatorLaw
// ---------------------------------------------------------------------------

SubordinatorLaw::SubordinatorLaw(double alpha, double t, double k_t)
    : alpha_(alpha), t_(t), k_t_(k_t) {
    if (!(alpha >= 0.0 && alpha < 1.0))
        throw std::invalid_argument("SubordinatorLaw: alpha must be in [0,1)");
    if (!(t > 0.0)) throw std::invalid_argument("SubordinatorLaw: t must be > 0");
    if (!(k_t > 0.0)) throw std::invalid_argument("SubordinatorLaw: k_t must be > 0");
    nu_ = t_ / k_t_;
    if (!has_closed_form())
        inv_ = std::make_shared<const detail::InversionCache>(alpha_, nu_);
}

double SubordinatorLaw::log_laplace(double u) const {
    if (u < 0.0) throw std::domain_error("log_laplace: u must be >= 0");
    if (alpha_ == 0.0) return -nu_ * std::log1p(u / nu_);
    const double b = 1.0 / (nu_ * (1.0 - alpha_));
    // 1 - (1+ub)^alpha in expm1 form keeps small-u accuracy.
    return -nu_ * (1.0 - alpha_) / alpha_ * std::expm1(alpha_ * std::log1p(u * b));
}

std::complex<double> SubordinatorLaw::log_laplace(std::complex<double> w) const {
    const double b = (alpha_ == 0.0) ? 1.0 / nu_ : 1.0 / (nu_ * (1.0 - alpha_));
    const std::complex<double> arg = 1.0 + w * b;
    if (arg.imag() == 0.0 && arg.real() <= 0.0)
        throw std::domain_error("log_laplace: argument on the branch cut");
    if (alpha_ == 0.0) return -nu_ * std::log(arg);
    return nu_ * (1.0 - alpha_) / alpha_ * (1.0 - std::exp(alpha_ * std::log(arg)));
}

double SubordinatorLaw::density(double z) const {
    if (!(z > 0.0)) throw std::domain_error("density: z must be > 0");
    if (alpha_ == 0.0)
        return std::exp(nu_ * std::log(nu_) + (nu_ - 1.0) * std::log(z) - nu_ * z -
                        std::lgamma(nu_));
    if (alpha_ == 0.5) return ig_pdf(z, nu_);
    return inv_->density(z);
}

double SubordinatorLaw::cdf(double z) const {
    if (z <= 0.0) return 0.0;
    if (alpha_ == 0.0) return boost::math::gamma_p(nu_, nu_ * z);
    if (alpha_ == 0.5) return ig_cdf(z, nu_);
    return inv_->cdf(z);
}

double SubordinatorLaw::quantile(double p) const {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile: p must be in (0,1)");
    if (alpha_ == 0.0) return gamma_quantile(p, nu_);
    if (alpha_ == 0.5) return ig_quantile(p, nu_);
    return inv_->quantile(p, 1e-10);
}

double SubordinatorLaw::gaussian_cdf_bound() const {
    return (2.0 - alpha_) / (1.0 - alpha_) * std::sqrt(k_t_ / t_);
}

double SubordinatorLaw::fractional_moment(double s) const {
    if (!(s > 0.0 && s < 1.0))
        throw std::domain_error("fractional_moment: s must be in (0,1)");
    // E[S^s] = int (L(u)-1) / (Gamma(-s) u^{s+1}) du, split at u=1.
    // [0,1]: substitute u = v^p with p = 1/(1-s); the integrand collapses to
    // p * expm1(lnL(v^p)) / v^p, bounded and smooth (expm1 avoids the
    // cancellation of L ~ 1 at small u).
    const double p = 1.0 / (1.0 - s);
    const auto f_head = [&](double v) {
        const double u = std::pow(v, p);
        if (u < 1e-280) return -p;
        return p * std::expm1(log_laplace(u)) / u;
    };
    const QuadResult head = integrate_gk(f_head, 0.0, 1.0, 1e-12, 1e-14, 2000);

    // [1,inf): int (L-1) u^{-s-1} = int L u^{-s-1} - 1/s, geometric panels with
    // the analytic remainder bound L(U) U^{-s} / s (L is decreasing).
    const auto f_tail = [&](double u) {
        return std::exp(log_laplace(u) - (s + 1.0) * std::log(u));
    };
    double tail = 0.0, lo = 1.0;
    double rem = 1e99;
    bool ok = false;
    for (int k = 1; k <= 90; ++k) {
        const double hi = std::pow(2.0, k);
        tail += integrate_gk(f_tail, lo, hi, 1e-12, 1e-15, 800).value;
        lo = hi;
        rem = std::exp(log_laplace(hi)) * std::pow(hi, -s) / s;
        if (rem < 1e-13 * (std::abs(head.value) + tail + 1.0 / s)) {
            ok = true;
            break;
        }
    }
    if (!ok || !head.converged)
        throw QuadratureError("fractional_moment: integral did not converge",
                              std::max(rem, head.abs_error));
    const double integral = head.value + tail - 1.0 / s;
    return integral / std::tgamma(-s);
}

double SubordinatorLaw::inverse_moment(int n) const {
    if (n < 1) throw std::domain_error("inverse_moment: n must be >= 1");
    // Divergence check per the tail-exponent rule: fit the log-log slope of
    // the integrand u^{n-1} L(u) over the last decade of the probe range and
    // signal divergence if it is >= -n-1+0.1.
    const auto log_f = [&](double u) {
        return (n - 1.0) * std::log(u) + log_laplace(u);
    };
    const double u_probe = 1e8;
    const double slope = (log_f(u_probe) - log_f(u_probe / 10.0)) / std::log(10.0);
    if (slope >= -static_cast<double>(n) - 1.0 + 0.1)
        throw DivergentIntegralError("inverse_moment: tail exponent " + std::to_string(slope) +
                                     " indicates divergence for n=" + std::to_string(n));

    const auto f = [&](double u) { return std::exp(log_f(u)); };
    double acc = integrate_gk([&](double u) { return std::pow(u, n - 1.0) *
                                                     std::exp(log_laplace(u)); },
                              0.0, 1.0, 1e-12, 1e-15, 2000).value;
    double lo = 1.0;
    bool ok = false;
    for (int k = 1; k <= 120; ++k) {
        const double hi = std::pow(2.0, k);
        acc += integrate_gk(f, lo, hi, 1e-12, 1e-16, 800).value;
        lo = hi;
        // remaining <= f(hi) * hi / (|slope_hi| - ...) ~ crude geometric bound
        const double fh = f(hi);
        if (fh * hi < 1e-13 * (std::abs(acc) + 1e-30)) {
            ok = true;
            break;
        }
    }
    if (!ok)
        throw QuadratureError("inverse_moment: integral did not converge", 1e99);
    return acc / std::tgamma(static_cast<double>(n));
}

std::vector<double> SubordinatorLaw::sample(std::size_t count, std::uint64_t seed,
                                            SampleInfo* info) const {
    if (count < 1) throw std::invalid_argument("sample: count must be >= 1");
    std::vector<double> out(count);
    Rng rng(seed);
    if (alpha_ == 0.0) {
        for (auto& v : out) v = rng.gamma(nu_, 1.0 / nu_);
        if (info) *info = {"gamma-marsaglia-tsang", 0.0};
        return out;
    }
    if (alpha_ == 0.5) {
        for (auto& v : out) v = rng.inverse_gaussian(1.0, nu_);
        if (info) *info = {"inverse-gaussian-michael-schucany-haas", 0.0};
        return out;
    }

    // Generic alpha: inverse transform on a 4096-knot monotone-cubic CDF table
    // spanning [q(1e-9), q(1-1e-9)].
    constexpr std::size_t kKnots = 4096;
    const double z0 = inv_->quantile(1e-9, 1e-8);
    const double z1 = inv_->quantile(1.0 - 1e-9, 1e-8);
    const bool log_spaced = z0 > 0.0 && z1 / z0 > 100.0;
    std::vector<double> zs(kKnots), Fs(kKnots);
    for (std::size_t j = 0; j < kKnots; ++j) {
        const double w = static_cast<double>(j) / (kKnots - 1);
        zs[j] = log_spaced ? z0 * std::pow(z1 / z0, w) : z0 + (z1 - z0) * w;
        Fs[j] = inv_->cdf(zs[j]);
        if (j > 0) Fs[j] = std::max(Fs[j], Fs[j - 1]);
    }
    MonotoneCubic table;
    table.build(zs, Fs);

    double tol = 0.0;
    for (std::size_t j = 31; j + 1 < kKnots; j += 64) {
        const double zm = 0.5 * (zs[j] + zs[j + 1]);
        tol = std::max(tol, std::abs(table.eval(zm) - inv_->cdf(zm)));
    }
    if (info) *info = {"inverse-cdf-table", tol};

    const double f_lo = Fs.front(), f_hi = Fs.back();
    for (auto& v : out) {
        const double u = std::min(f_hi, std::max(f_lo, rng.uniform()));
        v = table.invert(u);
    }
    return out;
}

// ---------------------------------------------------------------------------
// LawGrid
// ---------------------------------------------------------------------------

LawGrid::LawGrid(const SubordinatorLaw& law, std::span<const double> breakpoints,
                 int base_panels)
    : law_(law) {
    const double nu = law_.nu();
    log_pref_ = 0.0;

    const auto add_panels = [&](const std::vector<double>& knots, bool in_w) {
        for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
            if (!(knots[i + 1] > knots[i])) continue;
            Panel p;
            fill_panel(knots[i], knots[i + 1], in_w, 0, &p);
            panels_.push_back(p);
        }
    };
    const auto insert_breaks = [&](std::vector<double>* knots, double lo, double hi,
                                   const auto& map) {
        for (double zb : breakpoints)
            if (zb > lo && zb < hi) knots->push_back(map(zb));
        std::sort(knots->begin(), knots->end());
        knots->erase(std::unique(knots->begin(), knots->end(),
                                 [](double a, double b) {
                                     return b - a < 1e-14 * (std::abs(a) + 1e-300);
                                 }),
                     knots->end());
    };

    if (law_.alpha() == 0.0 && nu < 1.0) {
        // The density is z^{nu-1}-singular at 0 but has a plain e^{-nu z} tail.
        // Head in w = z^nu (the measure becomes exp(log_pref_ - nu z) dw,
        // bounded and smooth at w = 0); tail in z on log-spaced panels, since
        // mapping the tail to w would compress e^{-nu z} into one panel.
        log_pref_ = (nu - 1.0) * std::log(nu) - std::lgamma(nu);
        const double z_mid = 2.0;
        const double q_hi = std::max(2.0 * z_mid, gamma_quantile(1.0 - 1e-16, nu));
        const double w_mid = std::exp(nu * std::log(z_mid));
        const int head = std::max(8, base_panels * 3 / 4);
        std::vector<double> w_knots;
        for (int j = 0; j <= head; ++j) w_knots.push_back(w_mid * j / head);
        insert_breaks(&w_knots, 0.0, z_mid,
                      [&](double z) { return std::exp(nu * std::log(z)); });
        add_panels(w_knots, true);

        const int tail = std::max(8, base_panels / 2);
        std::vector<double> z_knots;
        for (int j = 0; j <= tail; ++j)
            z_knots.push_back(z_mid * std::pow(q_hi / z_mid, static_cast<double>(j) / tail));
        insert_breaks(&z_knots, z_mid, q_hi, [](double z) { return z; });
        add_panels(z_knots, false);
        tail_mass_ = 1e-16;
    } else {
        const bool generic = !law_.has_closed_form();
        const double p_tail = generic ? 1e-12 : 1e-16;
        std::vector<double> knots;
        knots.push_back(generic ? law_.inversion()->quantile(p_tail, 1e-4)
                                : law_.quantile(p_tail));
        for (int j = 1; j < base_panels; ++j) {
            const double p = static_cast<double>(j) / base_panels;
            knots.push_back(generic ? law_.inversion()->quantile(p, 1e-4)
                                    : law_.quantile(p));
        }
        knots.push_back(generic ? law_.inversion()->quantile(1.0 - p_tail, 1e-4)
                                : law_.quantile(1.0 - p_tail));
        insert_breaks(&knots, knots.front(), knots.back(), [](double z) { return z; });
        add_panels(knots, false);
        tail_mass_ = 2.0 * p_tail;
    }
}

double LawGrid::z_of(double u, bool in_w) const {
    if (!in_w) return u;
    if (u <= 0.0) return 1e-300;
    // floor keeps integrands with 1/sqrt(z) poles representable
    return std::max(std::exp(std::log(u) / law_.nu()), 1e-300);
}

double LawGrid::weighted_density(double u, bool in_w) const {
    if (in_w) {
        // p(z) dz = exp(log_pref_ - nu z(w)) dw
        return std::exp(log_pref_ - law_.nu() * z_of(u, true));
    }
    if (law_.alpha() == 0.0) {
        const double nu = law_.nu();
        return std::exp(nu * std::log(nu) + (nu - 1.0) * std::log(u) - nu * u -
                        std::lgamma(nu));
    }
    if (law_.alpha() == 0.5) return ig_pdf(u, law_.nu());
    return law_.inversion()->density(u);
}

void LawGrid::fill_panel(double a, double b, bool in_w, int depth, Panel* p) const {
    p->a = a;
    p->b = b;
    p->in_w = in_w;
    p->depth = depth;
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    int idx = 0;
    for (int j = 0; j < 7; ++j) {
        for (double sgn : {-1.0, 1.0}) {
            const double u = c + sgn * h * detail::kGk15X[j];
            const double wd = weighted_density(u, in_w);
            p->z[idx] = z_of(u, in_w);
            p->wk[idx] = detail::kGk15WK[j] * h * wd;
            p->wg[idx] = (j % 2 == 1) ? detail::kGk15WG[j / 2] * h * wd : 0.0;
            ++idx;
        }
    }
    const double wd = weighted_density(c, in_w);
    p->z[14] = z_of(c, in_w);
    p->wk[14] = detail::kGk15WK[7] * h * wd;
    p->wg[14] = detail::kGk15WG[3] * h * wd;
}

double LawGrid::integrate(const std::function<double(double)>& g, double rel_tol,
                          double* achieved) {
    struct Ev {
        double v, e;
    };
    std::vector<Ev> evs(panels_.size());
    double total = 0.0, err = 0.0, sum_abs = 0.0, gmax = 0.0;

    const auto eval_panel = [&](const Panel& p) -> Ev {
        double k15 = 0.0, g7 = 0.0;
        for (int i = 0; i < 15; ++i) {
            const double gv = g(p.z[i]);
            gmax = std::max(gmax, std::abs(gv));
            k15 += p.wk[i] * gv;
            if (p.wg[i] != 0.0) g7 += p.wg[i] * gv;
        }
        return {k15, std::abs(k15 - g7)};
    };

    for (std::size_t i = 0; i < panels_.size(); ++i) {
        evs[i] = eval_panel(panels_[i]);
        total += evs[i].v;
        err += evs[i].e;
        sum_abs += std::abs(evs[i].v);
    }

    int budget = 600;
    while (budget-- > 0) {
        const double tol = std::max(rel_tol * std::abs(total), 5e-17 * sum_abs + 1e-300);
        if (err <= tol) break;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < evs.size(); ++i)
            if (evs[i].e > evs[worst].e) worst = i;
        Panel& wp = panels_[worst];
        const double mid = 0.5 * (wp.a + wp.b);
        if (wp.depth >= 30 || !(mid > wp.a && mid < wp.b)) {
            evs[worst].e = 0.0;  // cannot refine further; accept
            err = 0.0;
            for (const auto& e : evs) err += e.e;
            continue;
        }
        Panel left, right;
        fill_panel(wp.a, mid, wp.in_w, wp.depth + 1, &left);
        fill_panel(mid, wp.b, wp.in_w, wp.depth + 1, &right);
        total -= evs[worst].v;
        err -= evs[worst].e;
        sum_abs -= std::abs(evs[worst].v);
        panels_[worst] = left;
        evs[worst] = eval_panel(left);
        panels_.push_back(right);
        evs.push_back(eval_panel(right));
        total += evs[worst].v + evs.back().v;
        err += evs[worst].e + evs.back().e;
        sum_abs += std::abs(evs[worst].v) + std::abs(evs.back().v);
    }

    const double tail_term = 2.0 * tail_mass_ * gmax;
    const double tol_final = std::max(rel_tol * std::abs(total), 5e-17 * sum_abs + 1e-300);
    if (err > 100.0 * tol_final + 1e-10)
        throw QuadratureError("LawGrid::integrate: refinement budget exhausted",
                              err + tail_term);
    if (achieved) *achieved = err + tail_term;
    return total;
}

}  // namespace atslab
