#pragma once

#include <stdexcept>
#include <string>

namespace atslab {

// Quadrature failed to reach the requested tolerance; carries the achieved one.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double achieved_tol)
        : std::runtime_error(what), achieved_tol_(achieved_tol) {}
    double achieved_tol() const noexcept { return achieved_tol_; }

private:
    double achieved_tol_;
};

// Integral diagnosed as divergent (e.g. inverse moments of heavy Gamma laws).
class DivergentIntegralError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Root bracket could not be expanded to enclose the target.
class BracketError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Price outside the no-arbitrage bounds for the requested option.
class PriceBoundsError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Operation requested for a parameter regime where it is undefined.
class RegimeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace atslab
