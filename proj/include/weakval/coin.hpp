#pragma once

#include <array>

#include "weakval/analytic.hpp"

namespace weakval {

// Coin face; Heads carries the sign +1, Tails the sign -1.
enum class Face : int { heads = +1, tails = -1 };

inline constexpr int face_value(Face f) { return static_cast<int>(f); }
inline constexpr int face_index(Face f) { return f == Face::heads ? 0 : 1; }

// Weak coin reading of strength lambda followed by the conditional bit-flip
// disturbance delta. The reading misreports with probability
// alpha = (1 - lambda)/2; the flip probability after reporting s is
// p = (1 + s*lambda - delta)/(1 + s*lambda). The "lambda liar, delta
// deceiver" story is this same stochastic map, not a separate code path.
// Requires 0 < lambda < 1 and 0 < delta < 1 - lambda.
struct ClassicalModel {
    ClassicalModel(double strength, double disturbance);

    double lambda;
    double delta;

    double alpha() const { return (1.0 - lambda) / 2.0; }
};

// One protocol run: toss psi, report s, maybe flip, reveal phi.
// Invariant: phi = psi flipped iff `flipped`.
struct TrialRecord {
    Face psi;
    Sign s;
    bool flipped;
    Face phi;
};

// Pr(s | psi) = (1 + lambda * s * psi)/2
double report_prob(const ClassicalModel& model, Face psi, Sign s);

// Flip probability p = (1 + s*lambda - delta)/(1 + s*lambda). The model
// defines the disturbance only for psi = Heads; anything else is rejected.
double flip_prob(const ClassicalModel& model, Face psi, Sign s);

// Closed-form joints Pr(s, phi | psi=Heads) and marginals Pr(phi | psi=Heads).
// Sign index 0 <-> s = +1.
struct CoinTables {
    std::array<double, 2> joint_heads;  // delta/2 for each s
    std::array<double, 2> joint_tails;  // (1 + s*lambda - delta)/2
    double marginal_heads;              // delta
    double marginal_tails;              // 1 - delta
};

CoinTables joint_and_marginal_tables(const ClassicalModel& model);

// a_w = sum_s (s/lambda) Pr(s, Tails | Heads) / Pr(Tails | Heads) = 1/(1-delta),
// evaluated through the closed-form tables.
double exact_weak_value(const ClassicalModel& model);

// Brute-force enumeration of the four (s, flipped) branches from the
// report/flip primitives alone, with none of the derived closed forms.
// Ground truth for the tables, the weak value, and sampled distributions.
struct OracleAtom {
    Sign s;
    bool flipped;
    Face phi;
    double prob;
};

struct OracleDistribution {
    std::array<OracleAtom, 4> atoms;
    double lambda;

    CoinTables tables() const;
    double probability(Sign s, Face phi) const;
    double marginal(Face phi) const;
    // E[s/lambda | phi]
    double conditional_mean_s_over_lambda(Face phi) const;
};

OracleDistribution enumerate_oracle(const ClassicalModel& model);

}  // namespace weakval
