#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "atslab/ats_model.hpp"
#include "atslab/math.hpp"
#include "atslab/rng.hpp"

using namespace atslab;

TEST_CASE("validate: Theorem-1 examples") {
    CHECK(validate({0.5, 1.0, -0.5, 1.0, 1.0, 0.2}).ok);
    // delta must exceed -min(1.2, 0.8) = -0.8 strictly
    const auto bad = validate({0.5, 1.2, -0.8, 1.0, 1.0, 0.2});
    CHECK_FALSE(bad.ok);
    CHECK(bad.violation.find("condition 2") != std::string::npos);
    CHECK(validate({0.3, 0.0, 0.0, 1.0, 1.0, 0.2}).ok);  // beta = delta = 0
    // condition 1: beta > 1/(1-alpha/2)
    const auto bad1 = validate({0.9, 2.0, -0.5, 1.0, 1.0, 0.2});
    CHECK_FALSE(bad1.ok);
    CHECK(bad1.violation.find("condition 1") != std::string::npos);
    // equality in condition 1 is admissible
    CHECK(validate({0.5, 1.0 / (1.0 - 0.25), -0.1, 1.0, 1.0, 0.2}).ok);
    // beta = 0 with delta < 0 is flagged via condition 2
    const auto b0 = validate({0.2, 0.0, -0.1, 1.0, 1.0, 0.2});
    CHECK_FALSE(b0.ok);
    CHECK(b0.violation.find("beta = 0") != std::string::npos);
}

TEST_CASE("classify: section-2 examples and Table-1 mapping") {
    const RegimeCase c5 = classify({0.3, 1.0, -0.5, 1.0, 1.0, 0.2});
    CHECK(c5.tag == CaseTag::case5);
    CHECK(c5.predicted_sigma0 == Sigma0::finite_positive);
    CHECK(c5.predicted_xi0 == Xi0::negative_finite);

    // Case 4 is the delta = -1/2 line with beta < 1; Theorem 1's strict lower
    // bound makes its admissible part beta > 1/2, so beta = 0.5 exactly is out.
    const RegimeCase c4 = classify({0.3, 0.75, -0.5, 1.0, 1.0, 0.2});
    CHECK(c4.tag == CaseTag::case4);
    CHECK(c4.predicted_xi0 == Xi0::minus_sqrt_pi_over_2);
    CHECK(classify({0.3, 0.5, -0.5, 1.0, 1.0, 0.2}).tag == CaseTag::inadmissible);

    // delta < -max(beta,1)/2 = -0.6 and delta > -min(1.2, 0.8)
    const RegimeCase c2 = classify({0.5, 1.2, -0.7, 1.0, 1.0, 0.2});
    CHECK(c2.tag == CaseTag::case2);
    CHECK(c2.predicted_sigma0 == Sigma0::infinite);

    const RegimeCase c1 = classify({0.0, 0.0, 0.0, 1.0, 1.0, 0.2});
    CHECK(c1.tag == CaseTag::case1);
    CHECK(c1.predicted_sigma0 == Sigma0::zero);

    const RegimeCase c3 = classify({0.0, 1.0, -0.25, 1.0, 1.0, 0.2});
    CHECK(c3.tag == CaseTag::case3);
    CHECK(c3.predicted_xi0 == Xi0::zero);

    CHECK(classify({0.2, 0.0, -0.1, 1.0, 1.0, 0.2}).tag == CaseTag::inadmissible);

    // Case-3 boundary ownership: beta = 1, delta = -1/2 belongs to Case 5 only.
    CHECK(classify({0.9, 1.0, -0.5, 1.0, 1.0, 0.2}).tag == CaseTag::case5);
    CHECK(classify({0.9, 1.0, -0.4999999, 1.0, 1.0, 0.2}).tag == CaseTag::case3);
    // Case 1 owns its upper boundary (delta = 0, 0 < beta < 1).
    CHECK(classify({0.0, 0.7, 0.0, 1.0, 1.0, 0.2}).tag == CaseTag::case1);
}

TEST_CASE("classify: partition of a grid over the admissible region") {
    for (const double alpha : {0.0, 0.3, 0.6}) {
        const double beta_max = 1.0 / (1.0 - alpha / 2.0);
        int counts[5] = {0, 0, 0, 0, 0};
        for (int i = 1; i <= 50; ++i) {
            for (int j = 0; j < 50; ++j) {
                AtsParams p{alpha, beta_max * i / 50.0, 0.0, 1.0, 1.0, 0.2};
                const double lb = (alpha == 0.0)
                                      ? -p.beta
                                      : -std::min(p.beta, (1.0 - p.beta * (1.0 - alpha)) / alpha);
                p.delta = lb * (j + 0.5) / 50.0 * 0.999;
                REQUIRE(validate(p).ok);
                const CaseTag tag = classify(p).tag;
                REQUIRE(tag != CaseTag::inadmissible);
                ++counts[static_cast<int>(tag)];
            }
        }
        CHECK(counts[0] + counts[1] + counts[2] + counts[3] + counts[4] == 50 * 50);
        CHECK(counts[0] > 0);  // case 1
        CHECK(counts[1] > 0);  // case 2
        CHECK(counts[2] > 0);  // case 3
    }
}

TEST_CASE("phi: definition round trip, limits and Lemma A.6") {
    const AtsParams p{0.0, 1.0, -0.5, 1.0, 1.0, 0.2};

    // eta -> 0 limit: phi -> 0
    AtsParams tiny_eta = p;
    tiny_eta.eta_bar = 1e-14;
    CHECK(std::abs(phi(0.5, tiny_eta)) < 1e-13);

    // definition round trip vs log_laplace
    for (const double t : {0.01, 0.5, 2.0}) {
        const SubordinatorLaw law = subordinator_law(t, p);
        const double u = t * p.sigma_bar * p.sigma_bar * p.eta_t(t);
        CHECK(phi(t, p) * t == doctest::Approx(-law.log_laplace(u)).epsilon(1e-15));
    }

    // Lemma A.6 point 1: 2-term expansion within 1% once t eta_t k_t < 1e-3
    for (const AtsParams q : {AtsParams{0.0, 1.0, -0.5, 1.0, 1.0, 0.2},
                              AtsParams{0.5, 1.0, -0.25, 2.0, 1.5, 0.4},
                              AtsParams{0.3, 0.8, -0.3, 0.7, 2.0, 0.3}}) {
        for (const double t : {1e-4, 1e-6}) {
            if (t * q.eta_t(t) * q.k_t(t) >= 1e-3) continue;
            const double u = t * q.sigma_bar * q.sigma_bar * q.eta_t(t);
            const double two_term = u - 0.5 * u * u * q.k_t(t) / t;
            const double exact = phi(t, q) * t;
            CHECK(std::abs(two_term - exact) / exact < 0.01);
        }
    }

    // Lemma A.6 point 2: phi/(sigma^2 eta_t) <= 1 on a geometric t-grid
    for (int k = 0; k <= 16; ++k) {
        const double t = 1e-6 * std::pow(3.0, k);
        const double ratio = phi(t, p) / (p.sigma_bar * p.sigma_bar * p.eta_t(t));
        CHECK(ratio <= 1.0 + 1e-12);
        CHECK(ratio > 0.0);
    }

    // Lemma A.6 point 3: ratio -> 1 for delta > -min(1, beta)
    const AtsParams q{0.0, 1.0, -0.25, 1.0, 1.0, 0.2};
    const double r = phi(1e-8, q) / (q.sigma_bar * q.sigma_bar * q.eta_t(1e-8));
    CHECK(std::abs(r - 1.0) < 1e-3);
}

TEST_CASE("characteristic_fn: basics and martingale value") {
    const AtsParams p{0.5, 1.0, -0.5, 1.0, 1.0, 0.2};
    const auto one = characteristic_fn({0.0, 0.0}, 0.5, p);
    CHECK(one.real() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(one.imag() == doctest::Approx(0.0).epsilon(1e-15));

    // E[e^{f_t}] = characteristic_fn(-i) = 1 by construction of phi
    for (const double t : {1e-3, 0.1, 1.0}) {
        const auto m = characteristic_fn({0.0, -1.0}, t, p);
        CHECK(std::abs(m - std::complex<double>(1.0, 0.0)) < 1e-10);
    }

    for (int i = 0; i <= 50; ++i) {
        const double u = -100.0 + 4.0 * i;
        CHECK(std::abs(characteristic_fn({u, 0.0}, 0.25, p)) <= 1.0 + 1e-12);
    }
}

TEST_CASE("characteristic_fn agrees with the empirical one (Monte Carlo)") {
    const AtsParams p{0.0, 1.0, -0.5, 1.0, 1.0, 0.2};
    const std::size_t n = 200000;
    for (const double t : {0.01, 0.25}) {
        const auto f = sample_log_forward(t, p, n, 99);
        for (const double u : {0.5, 2.0, 8.0}) {
            double sc = 0, ss = 0, sc2 = 0, ss2 = 0;
            for (const double fi : f) {
                const double c = std::cos(u * fi), s = std::sin(u * fi);
                sc += c;
                ss += s;
                sc2 += c * c;
                ss2 += s * s;
            }
            const double nn = n;
            const double mre = sc / nn, mim = ss / nn;
            const double se_re = std::sqrt((sc2 / nn - mre * mre) / nn);
            const double se_im = std::sqrt((ss2 / nn - mim * mim) / nn);
            const auto cf = characteristic_fn({u, 0.0}, t, p);
            CHECK(std::abs(mre - cf.real()) < 4.0 * se_re);
            CHECK(std::abs(mim - cf.imag()) < 4.0 * se_im);
        }
    }
}

TEST_CASE("sample_log_forward: martingale, mixture variance, determinism") {
    const AtsParams p{0.0, 1.0, -0.5, 1.0, 1.0, 0.2};
    const std::size_t n = 1000000;
    const auto f = sample_log_forward(0.25, p, n, 2024);
    double sum = 0, sum2 = 0;
    for (const double fi : f) {
        const double e = std::exp(fi);
        sum += e;
        sum2 += e * e;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sum2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) < 4.0 * se);

    // eta -> 0: Var[f] = sigma^2 t E[S] + sigma^4 t^2 Var[S]/4
    AtsParams q{0.0, 1.0, -0.5, 1.0, 1e-10, 0.5};
    const double t = 0.5;
    const auto g = sample_log_forward(t, q, n, 7);
    double m1 = 0, m2 = 0;
    for (const double gi : g) m1 += gi;
    m1 /= n;
    for (const double gi : g) m2 += (gi - m1) * (gi - m1);
    m2 /= n;
    const double s2 = q.sigma_bar * q.sigma_bar;
    const double expected_var = s2 * t + s2 * s2 * t * t / 4.0;  // Var[S] = k_bar = 1
    CHECK(m2 == doctest::Approx(expected_var).epsilon(0.02));

    const auto a = sample_log_forward(0.1, p, 100, 5);
    const auto b = sample_log_forward(0.1, p, 100, 5);
    CHECK(a == b);
}

TEST_CASE("AtsParams json round trip") {
    const AtsParams p{0.25, 1.0, -0.5, 1.5, 2.0, 0.3};
    nlohmann::json j = p;
    CHECK(j.at("alpha") == 0.25);
    CHECK(j.at("k_bar") == 1.5);
    const AtsParams q = j.get<AtsParams>();
    CHECK(q.alpha == p.alpha);
    CHECK(q.beta == p.beta);
    CHECK(q.delta == p.delta);
    CHECK(q.k_bar == p.k_bar);
    CHECK(q.eta_bar == p.eta_bar);
    CHECK(q.sigma_bar == p.sigma_bar);
}

TEST_CASE("describe matches the CLI wording") {
    CHECK(describe(classify({0.0, 1.0, -0.5, 1.0, 1.0, 0.2})).substr(0, 5) == "Case5");
    CHECK(describe(classify({0.0, 0.0, 0.0, 1.0, 1.0, 0.2})).substr(0, 5) == "Case1");
}
