#include "atslab/ats_model.hpp"

#include <cassert>
#include <stdexcept>

#include "atslab/math.hpp"
#include "atslab/rng.hpp"

namespace atslab {

void to_json(nlohmann::json& j, const AtsParams& p) {
    j = nlohmann::json{{"alpha", p.alpha},     {"beta", p.beta},
                       {"delta", p.delta},     {"k_bar", p.k_bar},
                       {"eta_bar", p.eta_bar}, {"sigma_bar", p.sigma_bar}};
}

void from_json(const nlohmann::json& j, AtsParams& p) {
    j.at("alpha").get_to(p.alpha);
    j.at("beta").get_to(p.beta);
    j.at("delta").get_to(p.delta);
    j.at("k_bar").get_to(p.k_bar);
    j.at("eta_bar").get_to(p.eta_bar);
    j.at("sigma_bar").get_to(p.sigma_bar);
}

namespace {

// -min(beta, (1-beta(1-alpha))/alpha); lower (open) admissible bound on delta.
double delta_lower_bound(const AtsParams& p) {
    if (p.alpha == 0.0) return -p.beta;
    return -std::min(p.beta, (1.0 - p.beta * (1.0 - p.alpha)) / p.alpha);
}

}  // namespace

ValidationReport validate(const AtsParams& p) {
    if (!(p.alpha >= 0.0 && p.alpha < 1.0))
        return {false, "alpha outside [0,1)"};
    if (!(p.k_bar > 0.0)) return {false, "k_bar not positive"};
    if (!(p.eta_bar > 0.0)) return {false, "eta_bar not positive"};
    if (!(p.sigma_bar > 0.0)) return {false, "sigma_bar not positive"};
    if (!(p.beta >= 0.0)) return {false, "beta negative"};
    if (!(p.delta <= 0.0)) return {false, "delta positive"};

    if (p.beta == 0.0 && p.delta == 0.0) return {};

    const double beta_max = 1.0 / (1.0 - p.alpha / 2.0);
    if (p.beta > beta_max + 1e-12)
        return {false, "condition 1 violated: beta > 1/(1-alpha/2)"};
    const double lb = delta_lower_bound(p);
    if (!(p.delta > lb))
        return {false, p.beta == 0.0
                           ? "condition 2 violated: beta = 0 admits only delta = 0"
                           : "condition 2 violated: delta <= -min(beta, (1-beta(1-alpha))/alpha)"};
    return {};
}

RegimeCase classify(const AtsParams& p) {
    if (!validate(p).ok)
        return {CaseTag::inadmissible, Sigma0::not_applicable, Xi0::not_applicable};
    CaseTag tag;
    if (p.beta == 1.0 && p.delta == -0.5) {
        tag = CaseTag::case5;
    } else if (p.beta < 1.0 && p.delta == -0.5) {
        tag = CaseTag::case4;
    } else if (p.beta < 1.0 &&
               (p.delta > -std::min(0.5, p.beta) || (p.beta == 0.0 && p.delta == 0.0))) {
        tag = CaseTag::case1;
    } else if (p.beta >= 1.0 && p.delta >= -p.beta / 2.0) {
        tag = CaseTag::case3;
    } else if (p.delta < -0.5 * std::max(p.beta, 1.0) && p.delta > delta_lower_bound(p)) {
        tag = CaseTag::case2;
    } else {
        // Admissible points are fully partitioned by the cases above.
        throw std::logic_error("classify: admissible point escaped the case partition");
    }
    switch (tag) {
        case CaseTag::case1: return {tag, Sigma0::zero, Xi0::not_applicable};
        case CaseTag::case2: return {tag, Sigma0::infinite, Xi0::not_applicable};
        case CaseTag::case3: return {tag, Sigma0::finite_positive, Xi0::zero};
        case CaseTag::case4: return {tag, Sigma0::finite_positive, Xi0::minus_sqrt_pi_over_2};
        default:             return {tag, Sigma0::finite_positive, Xi0::negative_finite};
    }
}

double phi(double t, const AtsParams& p) {
    if (!(t > 0.0)) throw std::domain_error("phi: t must be > 0");
    const SubordinatorLaw law = subordinator_law(t, p);
    const double u = t * p.sigma_bar * p.sigma_bar * p.eta_t(t);
    return -law.log_laplace(u) / t;
}

std::complex<double> characteristic_fn(std::complex<double> u, double t, const AtsParams& p) {
    if (!(t > 0.0)) throw std::domain_error("characteristic_fn: t must be > 0");
    const SubordinatorLaw law = subordinator_law(t, p);
    const double s2 = p.sigma_bar * p.sigma_bar;
    const double eta_t = p.eta_t(t);
    const std::complex<double> i(0.0, 1.0);
    const std::complex<double> w = i * u * (t * (0.5 + eta_t) * s2) + t * u * u * s2 * 0.5;
    if (u.imag() == 0.0) {
        // Real u keeps Re(1 + w k_t/((1-alpha) t)) > 0: no branch crossing.
        assert(w.real() >= 0.0);
    }
    const double phi_tt = -law.log_laplace(t * s2 * eta_t);
    return std::exp(law.log_laplace(w) + i * u * phi_tt);
}

std::vector<double> sample_log_forward(double t, const AtsParams& p, std::size_t count,
                                       std::uint64_t seed) {
    if (!(t > 0.0)) throw std::domain_error("sample_log_forward: t must be > 0");
    const SubordinatorLaw law = subordinator_law(t, p);
    const double s2 = p.sigma_bar * p.sigma_bar;
    const double eta_t = p.eta_t(t);
    const double phi_tt = -law.log_laplace(t * s2 * eta_t);
    std::vector<double> f = law.sample(count, derive_seed(seed, 0));
    Rng gauss_rng(derive_seed(seed, 1));
    for (auto& v : f) {
        const double s = v;
        v = -(eta_t + 0.5) * s2 * s * t + p.sigma_bar * std::sqrt(s * t) * gauss_rng.gauss() +
            phi_tt;
    }
    return f;
}

SubordinatorLaw subordinator_law(double t, const AtsParams& p) {
    return SubordinatorLaw(p.alpha, t, p.k_t(t));
}

const char* to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::case1: return "Case1";
        case CaseTag::case2: return "Case2";
        case CaseTag::case3: return "Case3";
        case CaseTag::case4: return "Case4";
        case CaseTag::case5: return "Case5";
        default: return "Inadmissible";
    }
}

std::string describe(const RegimeCase& rc) {
    switch (rc.tag) {
        case CaseTag::case1: return "Case1: σ̂₀ = 0";
        case CaseTag::case2: return "Case2: σ̂₀ = ∞";
        case CaseTag::case3: return "Case3: σ̂₀ finite, ξ̂₀ = 0";
        case CaseTag::case4:
            return "Case4: σ̂₀ finite, ξ̂₀ = -√(π/2)";
        case CaseTag::case5:
            return "Case5: σ̂₀ finite, ξ̂₀ negative finite";
        default: return "Inadmissible";
    }
}

}  // namespace atslab
