#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace atslab {

struct SampleInfo {
    std::string method;
    // Max |interpolated - exact| CDF probed at knot midpoints; nonzero only for
    // the generic-alpha inverse-transform table.
    double table_tolerance = 0.0;
};

namespace detail {

// Fourier inversion of the S_t law for alpha outside {0, 1/2}.
//
// Both density and CDF are Gil-Pelaez-type integrals of L(-iu) over u in
// [0, inf). The ray is rotated into the lower half-plane, u = s e^{-i gamma},
// which is valid because the only branch point of log L sits on the negative
// imaginary axis at -i nu (1-alpha); the rotation gives the kernel a damping
// factor e^{-z s sin gamma} so the integrand dies after O(1) oscillations for
// every z. The angle is capped three ways:
//   * pi/4 overall;
//   * 0.95 pi (1-alpha)/(2 alpha), so |L(-i s e^{-i gamma})| still decays at
//     large s (keeps alpha (pi/2+gamma) < pi/2);
//   * asin(8/((1-alpha) nu)), so the transient growth of |L| along the ray
//     (at most e^{nu (1-alpha) sin gamma}) cannot amplify cancellation.
// Truncation control: the s-integral is evaluated on geometrically growing
// panels [0,s1], [s1,2 s1], ... each with adaptive GK15 at rel. tol 1e-11;
// panels stop once two consecutive contributions fall below 1e-14 of the
// accumulated integral. The CDF integral carries the +gamma/pi endpoint
// correction from deforming through the u=0 pole of the Gil-Pelaez kernel.
class InversionCache {
public:
    InversionCache(double alpha, double nu);

    double density(double z) const;
    double cdf(double z) const;
    // Bisection on cdf; rel_tol is on z (panel knots need only coarse accuracy).
    double quantile(double p, double rel_tol = 1e-6) const;
    double angle() const { return gamma_; }

private:
    double alpha_, nu_, gamma_;
    double z_lo_, z_hi_;  // support window found at construction (cdf in [1e-13, 1-1e-13])

    std::complex<double> log_laplace(std::complex<double> w) const;
    double ray_integral(double z, bool cdf_kernel) const;
};

}  // namespace detail

// Marginal law S_t of Definition-1 type: unit mean, variance k_t/t.
// Immutable after construction; cheap to copy (the inversion cache is shared).
class SubordinatorLaw {
public:
    SubordinatorLaw(double alpha, double t, double k_t);

    double alpha() const { return alpha_; }
    double t() const { return t_; }
    double k_t() const { return k_t_; }
    double nu() const { return nu_; }  // t/k_t
    double mean() const { return 1.0; }
    double variance() const { return 1.0 / nu_; }

    // ln E[e^{-u S_t}], u >= 0 (domain error otherwise); always <= 0.
    double log_laplace(double u) const;
    // Principal-branch complex extension (argument must stay off the cut
    // 1 + w k_t/((1-alpha) t) in (-inf, 0]).
    std::complex<double> log_laplace(std::complex<double> w) const;

    double density(double z) const;       // z > 0
    double cdf(double z) const;           // 0 for z <= 0
    double quantile(double p) const;      // p in (0,1)
    double gaussian_cdf_bound() const;    // ((2-alpha)/(1-alpha)) sqrt(k_t/t)

    double fractional_moment(double s) const;  // s in (0,1), E[S^s]
    double inverse_moment(int n) const;        // E[S^-n]; DivergentIntegralError if divergent

    std::vector<double> sample(std::size_t count, std::uint64_t seed,
                               SampleInfo* info = nullptr) const;

    const std::shared_ptr<const detail::InversionCache>& inversion() const { return inv_; }
    bool has_closed_form() const { return alpha_ == 0.0 || alpha_ == 0.5; }

private:
    double alpha_, t_, k_t_, nu_;
    std::shared_ptr<const detail::InversionCache> inv_;  // only for generic alpha
};

// Fixed quadrature grid against a law's density. Node positions and
// density-weighted GK15 weights are cached so many integrands can be swept
// over one law cheaply (the skew surface evaluates ~30 integrands per law).
// integrate() refines panels on demand; refinements persist.
// Not thread-safe: use one LawGrid per thread.
class LawGrid {
public:
    explicit LawGrid(const SubordinatorLaw& law, std::span<const double> breakpoints = {},
                     int base_panels = 32);

    // Integral of g against the density. `achieved` (optional) receives the
    // abs-error estimate including the un-gridded tail mass bound.
    double integrate(const std::function<double(double)>& g, double rel_tol = 1e-10,
                     double* achieved = nullptr);

    double tail_mass() const { return tail_mass_; }
    const SubordinatorLaw& law() const { return law_; }

private:
    struct Panel {
        double a, b;   // in the panel's integration variable
        bool in_w;     // true: variable is w = z^nu (Gamma nu < 1 head only)
        int depth;
        double z[15];
        double wk[15];  // kronrod weight * density * jacobian
        double wg[15];  // embedded gauss weights (0 where unused)
    };

    SubordinatorLaw law_;
    double log_pref_;     // w-space density prefactor, log scale
    double tail_mass_;
    std::vector<Panel> panels_;

    void fill_panel(double a, double b, bool in_w, int depth, Panel* p) const;
    double weighted_density(double u, bool in_w) const;  // density * du-jacobian
    double z_of(double u, bool in_w) const;
};

}  // namespace atslab
