#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sewkernel {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};
inline constexpr cplx two_pi_i{0.0, 2.0 * std::numbers::pi};

// Bad parameters or points outside a domain of definition.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// A series did not converge within the allowed number of cutoff doublings.
class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Evaluation point too close to a zero or pole.
class PoleProximity : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Characteristic theta vanishes at the base point.
class DegenerateCharacteristic : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace sewkernel
