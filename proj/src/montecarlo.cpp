#include "weakval/montecarlo.hpp"

#include <cmath>
#include <thread>
#include <vector>

#include "weakval/errors.hpp"

namespace weakval {

namespace {

constexpr std::uint64_t kTrialsPerBlock = 1ull << 16;

std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

struct QuantumExperiment {
    WeakSetup setup;
    PureState psi;
    std::array<PureState, 2> basis;
    std::array<double, 4> cdf;  // (s=+1,phi0), (s=-1,phi0), (s=+1,phi1), (s=-1,phi1)
    int target_index;
};

QuantumExperiment make_quantum_experiment(const RunConfig& config) {
    const StatePair pair = make_state_pair(config.theta);
    WeakSetup setup(HermitianOperator::pauli_z(), config.lambda);
    std::array<PureState, 2> basis{pair.phi, orthogonal_complement(pair.phi)};
    require_admissible(setup, pair.psi, basis[0]);
    require_admissible(setup, pair.psi, basis[1]);

    std::array<double, 4> cdf{};
    double cumulative = 0.0;
    int k = 0;
    for (const PureState& phi : basis)
        for (Sign s : kBothSigns) {
            cumulative += joint_prob(setup, pair.psi, phi, s);
            cdf[k++] = cumulative;
        }
    return QuantumExperiment{setup, pair.psi, basis, cdf,
                             config.postselect_target == +1 ? 0 : 1};
}

EstimateAccumulator tagged_accumulator(const RunConfig& config) {
    EstimateAccumulator acc;
    acc.mode = config.mode;
    acc.param = config.mode == Mode::quantum ? config.theta : config.delta;
    acc.lambda = config.lambda;
    acc.postselect_target = config.postselect_target;
    acc.seed = config.seed;
    return acc;
}

// One block of `count` pre-selected trials on substream `block`.
EstimateAccumulator run_classical_block(const RunConfig& config, const ClassicalModel& model,
                                        std::uint64_t block, std::uint64_t count) {
    EstimateAccumulator acc = tagged_accumulator(config);
    RngStream rng(config.seed, block);
    const Face target = config.postselect_target == +1 ? Face::heads : Face::tails;
    while (acc.n_total < count) {
        const TrialRecord trial = sample_classical_trial(model, rng);
        if (trial.psi != Face::heads) {
            ++acc.n_preselection_rejected;
            continue;
        }
        ++acc.n_total;
        if (trial.phi == target) acc.add_postselected(trial.s);
    }
    return acc;
}

EstimateAccumulator run_quantum_block(const RunConfig& config, const QuantumExperiment& exp,
                                      std::uint64_t block, std::uint64_t count) {
    EstimateAccumulator acc = tagged_accumulator(config);
    RngStream rng(config.seed, block);
    for (std::uint64_t i = 0; i < count; ++i) {
        const double u = rng.next_unit();
        int k = 0;
        while (k < 3 && u >= exp.cdf[k]) ++k;
        const Sign s = (k % 2 == 0) ? Sign::plus : Sign::minus;
        const int phi_index = k / 2;
        ++acc.n_total;
        if (phi_index == exp.target_index) acc.add_postselected(s);
    }
    return acc;
}

// Each block owns a fixed trial range and substream; workers pick blocks
// round-robin, so the set of per-block results never depends on the worker
// count. Distinct vector slots per block, no synchronization needed.
template <class BlockFn>
void run_blocks(std::vector<EstimateAccumulator>& blocks, unsigned workers, BlockFn fn) {
    const std::uint64_t n_blocks = blocks.size();
    const unsigned n_workers =
        static_cast<unsigned>(std::min<std::uint64_t>(workers, n_blocks));
    auto work = [&](unsigned w) {
        for (std::uint64_t b = w; b < n_blocks; b += n_workers) blocks[b] = fn(b);
    };
    if (n_workers <= 1) {
        work(0);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) threads.emplace_back(work, w);
    for (std::thread& t : threads) t.join();
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : state_(mix64(mix64(master_seed) ^ (stream_index + 0x9E3779B97F4A7C15ull))) {}

std::uint64_t RngStream::next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
}

double RngStream::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

TrialRecord sample_classical_trial(const ClassicalModel& model, RngStream& rng) {
    const Face psi = rng.next_unit() < 0.5 ? Face::heads : Face::tails;
    const Sign s =
        rng.next_unit() < report_prob(model, psi, Sign::plus) ? Sign::plus : Sign::minus;
    if (psi != Face::heads) return TrialRecord{psi, s, false, psi};
    const bool flipped = rng.next_unit() < flip_prob(model, psi, s);
    return TrialRecord{psi, s, flipped, flipped ? Face::tails : Face::heads};
}

std::pair<Sign, int> sample_quantum_trial(const WeakSetup& setup, const PureState& psi,
                                          const std::array<PureState, 2>& phi_basis,
                                          RngStream& rng) {
    const double u = rng.next_unit();
    double cumulative = 0.0;
    int k = 0;
    for (const PureState& phi : phi_basis)
        for (Sign s : kBothSigns) {
            cumulative += joint_prob(setup, psi, phi, s);
            if (u < cumulative || k == 3) return {s, k / 2};
            ++k;
        }
    return {Sign::minus, 1};  // unreachable: cumulative reaches 1
}

EstimateAccumulator merge(EstimateAccumulator a, const EstimateAccumulator& b) {
    const bool same_config = a.mode == b.mode && a.param == b.param &&
                             a.lambda == b.lambda &&
                             a.postselect_target == b.postselect_target && a.seed == b.seed;
    if (!same_config)
        throw ConstraintViolation("merge requires accumulators from identical configurations");
    a.n_total += b.n_total;
    a.n_postselected += b.n_postselected;
    a.n_preselection_rejected += b.n_preselection_rejected;
    a.sign_sum += b.sign_sum;
    return a;
}

PostselectedEstimate estimate_weak_value(std::span<const TrialRecord> trials, double lambda,
                                         Face postselect_target) {
    EstimateAccumulator acc;
    acc.lambda = lambda;
    acc.postselect_target = face_value(postselect_target);
    for (const TrialRecord& trial : trials) {
        if (trial.psi != Face::heads) {
            ++acc.n_preselection_rejected;
            continue;
        }
        ++acc.n_total;
        if (trial.phi == postselect_target) acc.add_postselected(trial.s);
    }
    return finalize(acc);
}

PostselectedEstimate estimate_weak_value(std::span<const std::pair<Sign, int>> trials,
                                         double lambda, int postselect_index) {
    EstimateAccumulator acc;
    acc.lambda = lambda;
    acc.postselect_target = postselect_index == 0 ? +1 : -1;
    for (const auto& [s, phi_index] : trials) {
        ++acc.n_total;
        if (phi_index == postselect_index) acc.add_postselected(s);
    }
    return finalize(acc);
}

PostselectedEstimate finalize(const EstimateAccumulator& acc) {
    if (acc.n_postselected < 2)
        throw InsufficientPostselection(acc.n_postselected, acc.n_total);
    const double n = static_cast<double>(acc.n_postselected);
    const double mean =
        static_cast<double>(acc.sign_sum) / (n * acc.lambda);
    // Samples are s/lambda, so sum of squares is exactly n/lambda^2.
    const double sum_sq = n / (acc.lambda * acc.lambda);
    const double variance = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    PostselectedEstimate est;
    est.n_total = acc.n_total;
    est.n_postselected = acc.n_postselected;
    est.mean = mean;
    est.stderr_mean = std::sqrt(variance / n);
    est.postselection_rate = n / static_cast<double>(acc.n_total);
    return est;
}

PostselectedEstimate run_simulation(const RunConfig& config) {
    if (config.trials < 1) throw ConstraintViolation("trials must be >= 1");
    if (config.workers < 1) throw ConstraintViolation("workers must be >= 1");
    if (config.postselect_target != +1 && config.postselect_target != -1)
        throw ConstraintViolation("postselect_target must be +1 or -1");
    if (config.mode == Mode::meter)
        throw ConstraintViolation("meter mode is analytic only; nothing to simulate");

    const std::uint64_t n_blocks = (config.trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
    auto block_count = [&](std::uint64_t b) {
        const std::uint64_t start = b * kTrialsPerBlock;
        return std::min(kTrialsPerBlock, config.trials - start);
    };

    std::vector<EstimateAccumulator> blocks(n_blocks);
    if (config.mode == Mode::classical) {
        const ClassicalModel model(config.lambda, config.delta);
        run_blocks(blocks, config.workers, [&](std::uint64_t b) {
            return run_classical_block(config, model, b, block_count(b));
        });
    } else {
        const QuantumExperiment exp = make_quantum_experiment(config);
        run_blocks(blocks, config.workers, [&](std::uint64_t b) {
            return run_quantum_block(config, exp, b, block_count(b));
        });
    }

    EstimateAccumulator total = tagged_accumulator(config);
    for (const EstimateAccumulator& b : blocks) total = merge(total, b);
    return finalize(total);
}

double exact_conditional_value(const RunConfig& config) {
    if (config.mode == Mode::classical) {
        const ClassicalModel model(config.lambda, config.delta);
        const Face target = config.postselect_target == +1 ? Face::heads : Face::tails;
        return enumerate_oracle(model).conditional_mean_s_over_lambda(target);
    }
    const StatePair pair = make_state_pair(config.theta);
    const PureState target =
        config.postselect_target == +1 ? pair.phi : orthogonal_complement(pair.phi);
    return weak_value(HermitianOperator::pauli_z(), pair.psi, target).real();
}

}  // namespace weakval
