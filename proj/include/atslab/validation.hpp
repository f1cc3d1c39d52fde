#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "atslab/ats_model.hpp"
#include "atslab/rng.hpp"

namespace atslab {

struct CheckResult {
    std::string name;
    bool pass = false;
    double observed = 0.0;
    double bound = 0.0;
    double tolerance = 0.0;
};

struct ValidationConfig {
    std::uint64_t seed = 20240517;
    std::size_t mc_paths = 1000000;
    int random_param_sets = 20;
};

// Cross-module property suite: martingale, parity, MC-vs-quadrature,
// Berry-Esseen, characteristic-function match, implied-vol round trip,
// payoff nonnegativity, the Laplace/drift/sqrt-moment lemma bounds and the
// density sign inequality.
std::vector<CheckResult> run_validation_suite(const ValidationConfig& cfg = {});

bool all_passed(const std::vector<CheckResult>& results);

// Uniform draw over the Theorem-1 admissible region; k_bar and eta_bar are
// log-uniform on [0.3, 3], sigma_bar uniform on [0.1, 0.6].
AtsParams random_admissible(Rng& rng);

}  // namespace atslab
