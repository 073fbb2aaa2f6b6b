#include "weakval/montecarlo.hpp"

#include <array>
#include <cmath>
#include <doctest.h>
#include <numbers>
#include <random>
#include <vector>

#include "weakval/errors.hpp"

using namespace weakval;

namespace {
const HermitianOperator Z = HermitianOperator::pauli_z();

// 3-sigma band for an empirical frequency of probability p over n draws
double freq_band(double p, double n) { return 3.0 * std::sqrt(p * (1.0 - p) / n); }
}

TEST_CASE("rng streams are reproducible and distinct") {
    RngStream a(12345, 0);
    RngStream b(12345, 0);
    for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());

    RngStream c(12345, 1);
    RngStream d(54321, 0);
    RngStream base(12345, 0);
    int same_c = 0, same_d = 0;
    for (int i = 0; i < 64; ++i) {
        const std::uint64_t v = base.next_u64();
        same_c += v == c.next_u64();
        same_d += v == d.next_u64();
    }
    CHECK(same_c == 0);
    CHECK(same_d == 0);

    RngStream u(7, 3);
    for (int i = 0; i < 1000; ++i) {
        const double x = u.next_unit();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("classical trials follow the protocol") {
    const ClassicalModel model(0.1, 0.5);
    RngStream rng(2024, 0);

    std::uint64_t heads = 0, tails = 0;
    std::uint64_t s_plus_given_heads = 0;
    std::array<std::array<std::uint64_t, 2>, 2> joint{};  // [sign][face]
    const std::uint64_t n = 1000000;
    for (std::uint64_t i = 0; i < n; ++i) {
        const TrialRecord trial = sample_classical_trial(model, rng);
        CHECK(trial.phi == (trial.flipped ? (trial.psi == Face::heads ? Face::tails
                                                                      : Face::heads)
                                          : trial.psi));
        if (trial.psi == Face::heads) {
            ++heads;
            if (trial.s == Sign::plus) ++s_plus_given_heads;
            ++joint[sign_index(trial.s)][face_index(trial.phi)];
        } else {
            ++tails;
            CHECK_FALSE(trial.flipped);  // disturbance undefined off the pre-selection
        }
    }
    CHECK(heads + tails == n);
    CHECK(std::abs(static_cast<double>(heads) / n - 0.5) < freq_band(0.5, n));

    const double nh = static_cast<double>(heads);
    CHECK(std::abs(s_plus_given_heads / nh - 0.55) < freq_band(0.55, nh));

    const OracleDistribution oracle = enumerate_oracle(model);
    for (Sign s : kBothSigns)
        for (Face phi : {Face::heads, Face::tails}) {
            const double expected = oracle.probability(s, phi);
            const double observed = joint[sign_index(s)][face_index(phi)] / nh;
            CHECK(std::abs(observed - expected) < freq_band(expected, nh));
        }
}

TEST_CASE("classical marginal at the anomalous working point") {
    const ClassicalModel model(0.005, 0.99);
    RngStream rng(99, 0);
    std::uint64_t heads = 0, heads_to_tails = 0;
    for (std::uint64_t i = 0; i < 2000000; ++i) {
        const TrialRecord trial = sample_classical_trial(model, rng);
        if (trial.psi != Face::heads) continue;
        ++heads;
        heads_to_tails += trial.phi == Face::tails;
    }
    const double rate = static_cast<double>(heads_to_tails) / static_cast<double>(heads);
    CHECK(std::abs(rate - 0.01) < freq_band(0.01, static_cast<double>(heads)));
}

TEST_CASE("quantum trials follow the analytic joint distribution") {
    SUBCASE("eigenstate never leaves the phi branch") {
        const StatePair p = make_state_pair(0.0);
        const std::array<PureState, 2> basis{p.phi, orthogonal_complement(p.phi)};
        const WeakSetup setup(Z, 0.2);
        RngStream rng(5, 0);
        std::uint64_t s_plus = 0;
        const std::uint64_t n = 200000;
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto [s, phi_index] = sample_quantum_trial(setup, p.psi, basis, rng);
            CHECK(phi_index == 0);
            s_plus += s == Sign::plus;
        }
        const double observed = static_cast<double>(s_plus) / n;
        CHECK(std::abs(observed - 0.6) < freq_band(0.6, n));
    }

    SUBCASE("four-cell joint at theta = pi/3, lambda = 0.2") {
        const StatePair p = make_state_pair(std::numbers::pi / 3.0);
        const std::array<PureState, 2> basis{p.phi, orthogonal_complement(p.phi)};
        const WeakSetup setup(Z, 0.2);
        RngStream rng(17, 0);
        std::array<std::array<std::uint64_t, 2>, 2> counts{};  // [phi][sign]
        const std::uint64_t n = 1000000;
        for (std::uint64_t i = 0; i < n; ++i) {
            const auto [s, phi_index] = sample_quantum_trial(setup, p.psi, basis, rng);
            ++counts[phi_index][sign_index(s)];
        }
        std::uint64_t total = 0;
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j) {
                total += counts[k][j];
                const double expected =
                    joint_prob(setup, p.psi, basis[k], j == 0 ? Sign::plus : Sign::minus);
                const double observed = static_cast<double>(counts[k][j]) / n;
                CHECK(std::abs(observed - expected) < freq_band(expected, n));
            }
        CHECK(total == n);
    }
}

TEST_CASE("estimates recover the exact conditional values") {
    SUBCASE("classical anomalous case") {
        RunConfig config;
        config.mode = Mode::classical;
        config.lambda = 0.005;
        config.delta = 0.99;
        config.trials = 1000000;
        config.seed = 42;
        config.postselect_target = -1;
        const PostselectedEstimate est = run_simulation(config);
        CHECK(std::abs(est.mean - 100.0) <= 3.0 * est.stderr_mean);
        CHECK(est.stderr_mean < 2.0);
        CHECK(est.n_total == config.trials);
        CHECK(std::abs(est.postselection_rate - 0.01) < freq_band(0.01, 1e6));
        CHECK(exact_conditional_value(config) == doctest::Approx(100.0).epsilon(1e-12));
    }

    SUBCASE("quantum conditioning at cos(theta) = 0.1") {
        RunConfig config;
        config.mode = Mode::quantum;
        config.theta = std::acos(0.1);
        config.lambda = 0.05;
        config.trials = 1000000;
        config.seed = 42;
        config.postselect_target = +1;
        const PostselectedEstimate est = run_simulation(config);
        CHECK(exact_conditional_value(config) == doctest::Approx(10.0).epsilon(1e-12));
        CHECK(std::abs(est.mean - 10.0) <= 3.0 * est.stderr_mean);
    }

    SUBCASE("trivial post-selection on phi = psi at theta = 0") {
        RunConfig config;
        config.mode = Mode::quantum;
        config.theta = 0.0;
        config.lambda = 0.3;
        config.trials = 200000;
        config.seed = 7;
        config.postselect_target = +1;
        const PostselectedEstimate est = run_simulation(config);
        CHECK(est.n_postselected == config.trials);
        CHECK(std::abs(est.mean - 1.0) <= 3.0 * est.stderr_mean);
    }

    SUBCASE("observed stderr tracks the analytic prediction") {
        RunConfig config;
        config.mode = Mode::classical;
        config.lambda = 0.005;
        config.delta = 0.99;
        config.trials = 1000000;
        config.seed = 3;
        config.postselect_target = -1;
        const PostselectedEstimate est = run_simulation(config);
        const double a_w = 100.0;
        const double predicted =
            std::sqrt((1.0 - config.lambda * a_w * config.lambda * a_w) /
                      static_cast<double>(est.n_postselected)) /
            config.lambda;
        CHECK(est.stderr_mean > predicted / 2.0);
        CHECK(est.stderr_mean < predicted * 2.0);
    }
}

TEST_CASE("admissibility is enforced before sampling") {
    RunConfig config;
    config.mode = Mode::quantum;
    config.theta = 1.5608;
    config.lambda = 0.02;
    config.trials = 100;
    config.postselect_target = +1;
    CHECK_THROWS_AS(run_simulation(config), InadmissibleStrength);
}

TEST_CASE("insufficient post-selection is reported with the observed rate") {
    RunConfig config;
    config.mode = Mode::classical;
    config.lambda = 0.005;
    config.delta = 0.985;
    config.trials = 10;
    config.seed = 1;
    config.postselect_target = -1;
    try {
        run_simulation(config);
        FAIL("expected InsufficientPostselection");
    } catch (const InsufficientPostselection& e) {
        CHECK(e.n_postselected() < 2);
        CHECK(e.n_total() == 10);
        CHECK(e.observed_rate() <= 0.1);
    }
}

TEST_CASE("merging") {
    RunConfig config;
    config.mode = Mode::classical;
    config.lambda = 0.1;
    config.delta = 0.5;
    config.trials = 300000;
    config.seed = 11;
    config.postselect_target = -1;

    SUBCASE("identity element") {
        EstimateAccumulator acc;
        acc.mode = Mode::classical;
        acc.param = 0.5;
        acc.lambda = 0.1;
        acc.postselect_target = -1;
        acc.seed = 11;
        EstimateAccumulator filled = acc;
        filled.n_total = 10;
        filled.n_postselected = 4;
        filled.sign_sum = 2;
        const EstimateAccumulator merged = merge(filled, acc);
        CHECK(merged.n_total == 10);
        CHECK(merged.n_postselected == 4);
        CHECK(merged.sign_sum == 2);
    }

    SUBCASE("config mismatch is rejected") {
        EstimateAccumulator a;
        a.lambda = 0.1;
        EstimateAccumulator b;
        b.lambda = 0.2;
        CHECK_THROWS_AS(merge(a, b), ConstraintViolation);
    }

    SUBCASE("worker count does not change the result") {
        const PostselectedEstimate serial = run_simulation(config);
        for (unsigned workers : {2u, 4u}) {
            RunConfig parallel = config;
            parallel.workers = workers;
            const PostselectedEstimate est = run_simulation(parallel);
            CHECK(est.n_total == serial.n_total);
            CHECK(est.n_postselected == serial.n_postselected);
            CHECK(est.mean == serial.mean);
            CHECK(est.stderr_mean == serial.stderr_mean);
        }
    }

    SUBCASE("repeat runs are bit-identical") {
        const PostselectedEstimate once = run_simulation(config);
        const PostselectedEstimate twice = run_simulation(config);
        CHECK(once.mean == twice.mean);
        CHECK(once.stderr_mean == twice.stderr_mean);
        CHECK(once.n_postselected == twice.n_postselected);
    }
}

TEST_CASE("estimate_weak_value over explicit trial streams") {
    SUBCASE("handcrafted records pin the estimator arithmetic") {
        // lambda = 0.5 so each post-selected sample is s/lambda = +-2;
        // post-selected signs {+1, +1, -1}: mean = 1/(3*0.5) = 2/3,
        // sample variance 16/3, stderr = 4/3
        const std::vector<TrialRecord> trials{
            {Face::heads, Sign::plus, true, Face::tails},
            {Face::heads, Sign::plus, false, Face::heads},
            {Face::heads, Sign::plus, true, Face::tails},
            {Face::heads, Sign::minus, true, Face::tails},
            {Face::tails, Sign::minus, false, Face::tails},  // failed pre-selection
        };
        const PostselectedEstimate est = estimate_weak_value(trials, 0.5, Face::tails);
        CHECK(est.n_total == 4);
        CHECK(est.n_postselected == 3);
        CHECK(est.mean == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
        CHECK(est.stderr_mean == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
        CHECK(est.postselection_rate == doctest::Approx(0.75).epsilon(1e-15));
    }

    SUBCASE("sampled classical stream recovers the exact value") {
        const ClassicalModel model(0.1, 0.5);
        RngStream rng(314, 0);
        std::vector<TrialRecord> trials(200000);
        for (TrialRecord& t : trials) t = sample_classical_trial(model, rng);
        const PostselectedEstimate est = estimate_weak_value(trials, 0.1, Face::tails);
        CHECK(std::abs(est.mean - 2.0) <= 3.0 * est.stderr_mean);
    }

    SUBCASE("sampled quantum stream recovers the weak value") {
        const StatePair p = make_state_pair(1.2);
        const std::array<PureState, 2> basis{p.phi, orthogonal_complement(p.phi)};
        const WeakSetup setup(Z, 0.05);
        RngStream rng(315, 0);
        std::vector<std::pair<Sign, int>> trials(200000);
        for (auto& t : trials) t = sample_quantum_trial(setup, p.psi, basis, rng);
        const PostselectedEstimate est = estimate_weak_value(trials, 0.05, 0);
        const double a_w = weak_value(Z, p.psi, p.phi).real();
        CHECK(std::abs(est.mean - a_w) <= 3.0 * est.stderr_mean);
    }

    SUBCASE("fewer than two survivors is an error") {
        const std::vector<TrialRecord> trials{
            {Face::heads, Sign::plus, true, Face::tails},
            {Face::heads, Sign::plus, false, Face::heads},
        };
        CHECK_THROWS_AS(estimate_weak_value(trials, 0.5, Face::tails),
                        InsufficientPostselection);
    }
}

TEST_CASE("merge grouping is immaterial") {
    // eight block accumulators folded as one chain vs pairwise tree
    std::vector<EstimateAccumulator> blocks(8);
    std::mt19937_64 rng(8);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        blocks[i].lambda = 0.1;
        blocks[i].n_total = 1000 + i;
        blocks[i].n_postselected = 100 + 7 * i;
        blocks[i].n_preselection_rejected = i;
        blocks[i].sign_sum = static_cast<std::int64_t>(rng() % 201) - 100;
    }
    EstimateAccumulator chain = blocks[0];
    for (std::size_t i = 1; i < blocks.size(); ++i) chain = merge(chain, blocks[i]);

    auto pair_merge = [](const EstimateAccumulator& a, const EstimateAccumulator& b) {
        return merge(a, b);
    };
    const EstimateAccumulator tree =
        pair_merge(pair_merge(pair_merge(blocks[0], blocks[1]), pair_merge(blocks[2], blocks[3])),
                   pair_merge(pair_merge(blocks[4], blocks[5]), pair_merge(blocks[6], blocks[7])));

    CHECK(chain.n_total == tree.n_total);
    CHECK(chain.n_postselected == tree.n_postselected);
    CHECK(chain.n_preselection_rejected == tree.n_preselection_rejected);
    CHECK(chain.sign_sum == tree.sign_sum);
    const PostselectedEstimate a = finalize(chain);
    const PostselectedEstimate b = finalize(tree);
    CHECK(a.mean == b.mean);
    CHECK(a.stderr_mean == b.stderr_mean);
}

TEST_CASE("estimate consistency tightens with more trials") {
    // |mean - a_w| measured in stderr units stays within the 3-sigma band as
    // the sample grows by decades
    for (std::uint64_t trials : {10000ull, 100000ull, 1000000ull}) {
        RunConfig config;
        config.mode = Mode::classical;
        config.lambda = 0.05;
        config.delta = 0.5;
        config.trials = trials;
        config.seed = 2718;
        config.postselect_target = -1;
        const PostselectedEstimate est = run_simulation(config);
        CHECK(std::abs(est.mean - 2.0) <= 3.0 * est.stderr_mean);
    }
}
