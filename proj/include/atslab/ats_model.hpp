#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "atslab/subordinator.hpp"

namespace atslab {

// Power-law scaling parameters: k_t = k_bar t^beta, eta_t = eta_bar t^delta.
struct AtsParams {
    double alpha;      // tempered-stable index, [0,1)
    double beta;       // scaling of the jump variance, >= 0
    double delta;      // scaling of the asymmetry, <= 0
    double k_bar;      // > 0
    double eta_bar;    // > 0
    double sigma_bar;  // > 0

    double k_t(double t) const { return k_bar * std::pow(t, beta); }
    double eta_t(double t) const { return eta_bar * std::pow(t, delta); }
};

void to_json(nlohmann::json& j, const AtsParams& p);
void from_json(const nlohmann::json& j, AtsParams& p);

enum class CaseTag { case1, case2, case3, case4, case5, inadmissible };
enum class Sigma0 { zero, infinite, finite_positive, not_applicable };
enum class Xi0 { zero, minus_sqrt_pi_over_2, negative_finite, not_applicable };

struct RegimeCase {
    CaseTag tag;
    Sigma0 predicted_sigma0;
    Xi0 predicted_xi0;
};

struct ValidationReport {
    bool ok = true;
    std::string violation;  // names the violated condition when !ok
};

// Admissibility of (alpha, beta, delta): either beta = delta = 0, or
//   1.  0 <= beta <= 1/(1 - alpha/2)              (equality admissible;
//       violations smaller than 1e-12 are forgiven)
//   2.  -min(beta, (1-beta(1-alpha))/alpha) < delta <= 0
//       (for alpha = 0 the bound is -beta < delta <= 0)
ValidationReport validate(const AtsParams& p);

// Short-time regime partition. Boundary membership uses exact floating-point
// comparisons: the short-time behaviors are discontinuous across boundaries,
// so callers wanting fuzzy classification must snap parameters first.
RegimeCase classify(const AtsParams& p);

// Per-unit-time drift: phi_t = -ln L_t(t sigma^2 eta_t) / t, which makes
// E[e^{f_t}] = 1 by construction.
double phi(double t, const AtsParams& p);

// E[e^{i u f_t}]; accepts complex u (u = -i evaluates the exponential moment).
std::complex<double> characteristic_fn(std::complex<double> u, double t, const AtsParams& p);

// i.i.d. draws of f_t = -(eta_t + 1/2) sigma^2 S_t t + sigma sqrt(S_t t) g + phi_t t.
// Subordinator and Gaussian streams use derive_seed(seed, 0) and (seed, 1).
std::vector<double> sample_log_forward(double t, const AtsParams& p, std::size_t count,
                                       std::uint64_t seed);

// Marginal law of S_t for these parameters.
SubordinatorLaw subordinator_law(double t, const AtsParams& p);

const char* to_string(CaseTag tag);
std::string describe(const RegimeCase& rc);  // one-line Table-1 style summary

}  // namespace atslab
