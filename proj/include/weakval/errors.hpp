#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace weakval {

// Invalid construction or call: a stated inequality does not hold.
// Messages quote the violated constraint.
struct ConstraintViolation : std::domain_error {
    using std::domain_error::domain_error;
};

// Weak value undefined: |<phi|psi>| at or below the orthogonality threshold.
struct OrthogonalSelection : std::domain_error {
    using std::domain_error::domain_error;
};

// The linearized outcome probabilities would be negative at this strength
// (lambda * |Re a_w| > 1 for some post-selection in the measured basis).
struct InadmissibleStrength : std::domain_error {
    using std::domain_error::domain_error;
};

// Post-selected meter distribution carries (numerically) zero weight.
struct VanishingPostselection : std::domain_error {
    using std::domain_error::domain_error;
};

// Fewer than two trials survived the post-selection filter.
class InsufficientPostselection : public std::runtime_error {
public:
    InsufficientPostselection(std::uint64_t n_postselected, std::uint64_t n_total)
        : std::runtime_error("insufficient post-selection: " + std::to_string(n_postselected) +
                             " of " + std::to_string(n_total) +
                             " trials passed the filter (need >= 2, observed rate " +
                             std::to_string(n_total ? static_cast<double>(n_postselected) /
                                                          static_cast<double>(n_total)
                                                    : 0.0) +
                             ")"),
          n_postselected_(n_postselected),
          n_total_(n_total) {}

    std::uint64_t n_postselected() const { return n_postselected_; }
    std::uint64_t n_total() const { return n_total_; }
    double observed_rate() const {
        return n_total_ ? static_cast<double>(n_postselected_) / static_cast<double>(n_total_) : 0.0;
    }

private:
    std::uint64_t n_postselected_;
    std::uint64_t n_total_;
};

// Adaptive quadrature could not reach the requested tolerance.
class QuadratureNonConvergence : public std::runtime_error {
public:
    QuadratureNonConvergence(double achieved, double requested)
        : std::runtime_error("quadrature did not converge: achieved error estimate " +
                             std::to_string(achieved) + " > requested " +
                             std::to_string(requested)),
          achieved_(achieved),
          requested_(requested) {}

    double achieved_error() const { return achieved_; }
    double requested_tolerance() const { return requested_; }

private:
    double achieved_;
    double requested_;
};

}  // namespace weakval
