#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>

#include "weakval/analytic.hpp"
#include "weakval/coin.hpp"

namespace weakval {

// splitmix64 over a per-substream state double-mixed from
// (master_seed, stream_index). Period 2^64; identical
// (master_seed, stream_index, draw count) gives identical draws
// within one build.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_index);

    std::uint64_t next_u64();
    // Uniform in [0, 1), 53 random bits.
    double next_unit();

private:
    std::uint64_t state_;
};

enum class Mode { quantum, classical, meter };

// Simulation configuration. `trials` counts pre-selected trials: for the
// classical protocol, tosses that land Tails fail pre-selection and are
// tracked separately without being counted; quantum trials always pre-select.
// `postselect_target` is the label of the accepted final outcome: the coin
// face sign for classical runs, +1 for the phi basis state and -1 for its
// complement in quantum runs.
struct RunConfig {
    Mode mode = Mode::classical;
    double theta = 0.0;   // quantum
    double delta = 0.0;   // classical
    double lambda = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t seed = 0;
    int postselect_target = -1;
    unsigned workers = 1;
};

struct PostselectedEstimate {
    std::uint64_t n_total = 0;
    std::uint64_t n_postselected = 0;
    double mean = 0.0;               // estimate of E[s/lambda | phi]
    double stderr_mean = 0.0;        // sample std / sqrt(n_postselected)
    double postselection_rate = 0.0; // n_postselected / n_total
};

// Mergeable running statistics. The estimator's samples are s/lambda with
// s in {+1,-1}, so the running sum is the integer sum of signs; sum and
// sum-of-squares of s/lambda follow exactly at finalize time. Integer
// merges are exactly associative and commutative, making the result
// independent of partitioning.
struct EstimateAccumulator {
    // config tag; merging requires identical tags
    Mode mode = Mode::classical;
    double param = 0.0;  // theta or delta
    double lambda = 0.0;
    int postselect_target = 0;
    std::uint64_t seed = 0;

    std::uint64_t n_total = 0;
    std::uint64_t n_postselected = 0;
    std::uint64_t n_preselection_rejected = 0;
    std::int64_t sign_sum = 0;

    void add_postselected(Sign s) {
        ++n_postselected;
        sign_sum += sign_value(s);
    }
};

// Protocol steps 1-4: fair toss, weak report, conditional flip (Heads
// pre-selection only), reveal. Tails pre-selections come back unflipped with
// phi = psi and are excluded downstream.
TrialRecord sample_classical_trial(const ClassicalModel& model, RngStream& rng);

// Draws (s, basis index) by inverse CDF over the four joint probabilities
// Pr(s, phi_k | psi). Caller must have validated admissibility.
std::pair<Sign, int> sample_quantum_trial(const WeakSetup& setup, const PureState& psi,
                                          const std::array<PureState, 2>& phi_basis,
                                          RngStream& rng);

// Associative, commutative; throws ConstraintViolation on config mismatch.
EstimateAccumulator merge(EstimateAccumulator a, const EstimateAccumulator& b);

// Throws InsufficientPostselection when fewer than two trials passed.
PostselectedEstimate finalize(const EstimateAccumulator& acc);

// Post-selected mean of s/lambda over an explicit stream of trials.
// Classical records failing pre-selection (psi != Heads) are excluded from
// n_total; the quantum overload takes (sign, basis index) pairs.
PostselectedEstimate estimate_weak_value(std::span<const TrialRecord> trials, double lambda,
                                         Face postselect_target);
PostselectedEstimate estimate_weak_value(std::span<const std::pair<Sign, int>> trials,
                                         double lambda, int postselect_index);

// Full run: validates the configuration (including admissibility for
// quantum mode), partitions trials into fixed blocks with one RNG substream
// per block, fans out over `workers` threads, and merges block accumulators
// in block order. The result is identical for any worker count.
PostselectedEstimate run_simulation(const RunConfig& config);

// Exact E[s/lambda | postselect_target] for the configured experiment:
// Re(a_w) of the targeted basis state in quantum mode, the enumeration
// oracle's conditional mean in classical mode.
double exact_conditional_value(const RunConfig& config);

}  // namespace weakval
