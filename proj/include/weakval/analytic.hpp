#pragma once

#include <array>
#include <utility>

#include "weakval/qubit.hpp"

namespace weakval {

// Sign of a coarse-grained measurement outcome.
enum class Sign : int { plus = +1, minus = -1 };

inline constexpr int sign_value(Sign s) { return static_cast<int>(s); }
inline constexpr std::array<Sign, 2> kBothSigns{Sign::plus, Sign::minus};
inline constexpr int sign_index(Sign s) { return s == Sign::plus ? 0 : 1; }

// Weak measurement of observable A at strength lambda = 2x/sqrt(2 pi sigma^2).
// Requires 0 < lambda < 1. Admissibility (lambda*|Re a_w| <= 1) is a property
// of the (setup, pre, post) triple and is policed by validate_admissible /
// require_admissible at experiment-configuration time.
struct WeakSetup {
    WeakSetup(HermitianOperator observable, double strength);

    HermitianOperator A;
    double lambda;
};

// Conditional bit-flip disturbance p(s) = (1 + s*lambda - delta)/(1 + s*lambda)
// applied after the weak reading, pre-selection fixed to +1.
// Requires 0 < lambda < 1 and 0 < delta < 1 - lambda so every p is in (0,1).
struct DisturbanceChannel {
    DisturbanceChannel(double disturbance, double strength);

    double delta;
    double lambda;
};

// a_w = <phi|A|psi> / <phi|psi>. Throws OrthogonalSelection when
// |<phi|psi>| <= 1e-14.
Cx weak_value(const HermitianOperator& A, const PureState& psi, const PureState& phi);

// E_s(rho) = (1/2)[rho + s(lambda/2)(A rho + rho A)], the first-order
// operation for outcome sign s. rho must have unit trace within 1e-12.
// Tr E_s(|psi><psi|) = outcome_prob(psi, s).
HermitianOperator apply_weak_operation(const WeakSetup& setup, const HermitianOperator& rho,
                                       Sign s);

// Pr(s|psi) = (1 + s*lambda*<psi|A|psi>)/2
double outcome_prob(const WeakSetup& setup, const PureState& psi, Sign s);

// Pr(s, phi|psi) = <phi|E_s(|psi><psi|)|phi>
//               = (1/2)[|<phi|psi>|^2 + s*lambda*Re(<phi|A|psi><psi|phi>)].
// Throws InadmissibleStrength when the value would be negative.
double joint_prob(const WeakSetup& setup, const PureState& psi, const PureState& phi, Sign s);

// E[s | phi, psi] = sum_s s*Pr(s,phi|psi)/Pr(phi|psi); equals lambda*Re(a_w).
double conditional_expectation_s(const WeakSetup& setup, const PureState& psi,
                                 const PureState& phi);

// E[s/lambda | phi, psi]; equals Re(weak_value) for admissible setups.
double weak_value_via_conditioning(const WeakSetup& setup, const PureState& psi,
                                   const PureState& phi);

// Law of total expectation over a complete post-selection basis:
//   lhs = <psi|A|psi>,  rhs = sum_k |<phi_k|psi>|^2 * Re(a_w(phi_k)).
// Requires phi_basis orthonormal and every <phi_k|psi> nonzero.
std::pair<double, double> total_expectation_identity(const WeakSetup& setup,
                                                     const PureState& psi,
                                                     const std::array<PureState, 2>& phi_basis);

// True iff the four first-order joint probabilities over s in {+1,-1} and the
// measured basis {phi, phi_perp} are all nonnegative, i.e. lambda*|Re a_w| <= 1
// for every post-selection in the basis.
bool validate_admissible(const WeakSetup& setup, const PureState& psi, const PureState& phi);

// Largest lambda admissible for this (A, psi, phi) triple (capped at 1).
double max_admissible_lambda(const HermitianOperator& A, const PureState& psi,
                             const PureState& phi);

// Throws InadmissibleStrength naming the maximal admissible lambda.
void require_admissible(const WeakSetup& setup, const PureState& psi, const PureState& phi);

// Exact conditional/joint/marginal tables of the disturbance analysis with
// pre-selection fixed to +1. Index 0 <-> s = +1, index 1 <-> s = -1.
struct DisturbanceTables {
    std::array<double, 2> stay_given_s;  // Pr(phi=+1 | s, psi=+1) = delta/(1+s*lambda)
    std::array<double, 2> flip_given_s;  // Pr(phi=-1 | s, psi=+1) = (1+s*lambda-delta)/(1+s*lambda)
    std::array<double, 2> joint_stay;    // Pr(phi=+1, s | psi=+1) = delta/2
    std::array<double, 2> joint_flip;    // Pr(phi=-1, s | psi=+1) = (1+s*lambda-delta)/2
    double marginal_stay;                // Pr(phi=+1 | psi=+1) = delta
    double marginal_flip;                // Pr(phi=-1 | psi=+1) = 1 - delta
};

DisturbanceTables quantum_disturbance_tables(const DisturbanceChannel& channel);

// a_w = sum_s (s/2lambda)(1+s*lambda-delta)/(1-delta), post-selecting on -1;
// equals 1/(1-delta).
double quantum_disturbance_weak_value(const DisturbanceChannel& channel);

}  // namespace weakval
