#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weakval/analytic.hpp"
#include "weakval/coin.hpp"
#include "weakval/errors.hpp"
#include "weakval/meter.hpp"
#include "weakval/montecarlo.hpp"
#include "weakval/qubit.hpp"

namespace {

using namespace weakval;

constexpr const char* kConstraintFooter =
    "Constraints: 0<λ<1 (0<lambda<1); 0<δ<1−λ (0<delta<1-lambda); "
    "admissibility λ|a_w|≤1 (lambda*|a_w|<=1). Angles are radians.";

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string integer(std::uint64_t v) { return std::to_string(v); }

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const {
        std::string out;
        auto join = [&out](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        join(header);
        for (const auto& row : rows) join(row);
        return out;
    }
};

// CSV goes to stdout; --out additionally writes the same bytes to a file.
void emit(const Csv& csv, const std::string& out_path) {
    const std::string text = csv.str();
    std::fwrite(text.data(), 1, text.size(), stdout);
    if (!out_path.empty()) {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw ConstraintViolation("cannot open output file: " + out_path);
        f << text;
    }
}

struct RangeSpec {
    double lo;
    double hi;
    unsigned steps;
};

RangeSpec parse_range(const std::string& text) {
    RangeSpec r{};
    char colon1 = 0, colon2 = 0;
    std::istringstream is(text);
    if (!(is >> r.lo >> colon1 >> r.hi >> colon2 >> r.steps) || colon1 != ':' ||
        colon2 != ':' || !is.eof())
        throw ConstraintViolation("range must be lo:hi:steps, got '" + text + "'");
    if (!(r.steps >= 2)) throw ConstraintViolation("range steps must be >= 2");
    if (!(r.lo < r.hi)) throw ConstraintViolation("range requires lo < hi");
    return r;
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("WEAKVAL_SEED"))
        return std::strtoull(env, nullptr, 10);
    return 0;
}

int parse_postselect(const std::string& text) {
    if (text == "heads" || text == "+1" || text == "1" || text == "plus" || text == "phi")
        return +1;
    if (text == "tails" || text == "-1" || text == "minus" || text == "phi-perp")
        return -1;
    throw ConstraintViolation("postselect must be one of heads/tails/+1/-1/phi/phi-perp, got '" +
                              text + "'");
}

// Inclusive linear grid with open-boundary endpoint clipping: an endpoint
// violating an open bound moves inward by half the original step; a closed
// bound clips to the bound itself. Clipping is reported on stderr.
struct Bounds {
    double lo;
    bool lo_open;
    double hi;
    bool hi_open;
};

std::vector<double> clipped_linear_grid(const std::string& name, RangeSpec range,
                                        const Bounds& bounds) {
    const double step = (range.hi - range.lo) / (range.steps - 1);
    bool clipped = false;
    auto invalid_low = [&](double v) {
        return bounds.lo_open ? v <= bounds.lo : v < bounds.lo;
    };
    auto invalid_high = [&](double v) {
        return bounds.hi_open ? v >= bounds.hi : v > bounds.hi;
    };
    double lo = range.lo;
    double hi = range.hi;
    if (invalid_low(lo)) {
        lo = bounds.lo_open ? bounds.lo + step / 2.0 : bounds.lo;
        clipped = true;
    }
    if (invalid_high(hi)) {
        hi = bounds.hi_open ? bounds.hi - step / 2.0 : bounds.hi;
        clipped = true;
    }
    if (!(lo < hi))
        throw ConstraintViolation(name + " range is empty after clipping to the valid interval");
    if (clipped)
        std::fprintf(stderr, "# clipped %s range to [%s, %s]\n", name.c_str(),
                     num(lo).c_str(), num(hi).c_str());
    std::vector<double> grid(range.steps);
    for (unsigned k = 0; k < range.steps; ++k)
        grid[k] = lo + (hi - lo) * static_cast<double>(k) / (range.steps - 1);
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

// ---------------------------------------------------------------- weak-value

struct WeakValueOpts {
    double theta = 0.0;
    std::optional<double> lambda;
    std::string out;
};

void run_weak_value(const WeakValueOpts& opt) {
    const StatePair pair = make_state_pair(opt.theta);
    const HermitianOperator Z = HermitianOperator::pauli_z();
    const double a_w = weak_value(Z, pair.psi, pair.phi).real();
    const double exp_z = expectation(Z, pair.psi);
    const double overlap_sq = std::norm(inner(pair.phi, pair.psi));

    Csv csv;
    if (opt.lambda) {
        const WeakSetup setup(Z, *opt.lambda);
        require_admissible(setup, pair.psi, pair.phi);
        const double a_w_cond = weak_value_via_conditioning(setup, pair.psi, pair.phi);
        csv.header = {"theta", "lambda", "a_w", "a_w_conditioning", "expectation_z",
                      "overlap_sq"};
        csv.rows.push_back({num(opt.theta), num(*opt.lambda), num(a_w), num(a_w_cond),
                            num(exp_z), num(overlap_sq)});
    } else {
        csv.header = {"theta", "a_w", "expectation_z", "overlap_sq"};
        csv.rows.push_back({num(opt.theta), num(a_w), num(exp_z), num(overlap_sq)});
    }
    emit(csv, opt.out);
    std::fprintf(stderr, "# a_w = %s at theta = %s (overlap^2 = %s)\n", num(a_w).c_str(),
                 num(opt.theta).c_str(), num(overlap_sq).c_str());
}

// ------------------------------------------------------------------ simulate

struct SimulateOpts {
    std::string mode;
    std::optional<double> theta;
    std::optional<double> delta;
    double lambda = 0.0;
    std::uint64_t trials = 1000000;
    std::uint64_t seed = default_seed();
    std::string postselect;
    unsigned workers = 1;
    std::string out;
};

RunConfig simulate_config(const SimulateOpts& opt) {
    RunConfig config;
    config.lambda = opt.lambda;
    config.trials = opt.trials;
    config.seed = opt.seed;
    config.workers = opt.workers;
    if (opt.mode == "quantum") {
        if (!opt.theta) throw ConstraintViolation("quantum mode requires --theta");
        config.mode = Mode::quantum;
        config.theta = *opt.theta;
        config.postselect_target =
            opt.postselect.empty() ? +1 : parse_postselect(opt.postselect);
    } else {
        if (!opt.delta) throw ConstraintViolation("classical mode requires --delta");
        config.mode = Mode::classical;
        config.delta = *opt.delta;
        config.postselect_target =
            opt.postselect.empty() ? -1 : parse_postselect(opt.postselect);
    }
    return config;
}

void simulate_row(Csv& csv, const RunConfig& config) {
    const double exact = exact_conditional_value(config);
    const PostselectedEstimate est = run_simulation(config);
    csv.rows.push_back({config.mode == Mode::quantum ? "quantum" : "classical",
                        num(config.mode == Mode::quantum ? config.theta : config.delta),
                        num(config.lambda), integer(config.trials),
                        integer(est.n_postselected), num(est.postselection_rate), num(exact),
                        num(est.mean), num(est.stderr_mean), integer(config.seed)});
    const double gap = std::abs(est.mean - exact);
    const double band = 3.0 * est.stderr_mean;
    std::fprintf(stderr,
                 "# |estimate - exact| = %s; 3*stderr = %s; consistent: %s "
                 "(n_postselected = %llu of %llu)\n",
                 num(gap).c_str(), num(band).c_str(), gap <= band ? "yes" : "NO",
                 static_cast<unsigned long long>(est.n_postselected),
                 static_cast<unsigned long long>(est.n_total));
}

void run_simulate(const SimulateOpts& opt) {
    Csv csv;
    csv.header = {"mode",     "theta_or_delta",     "lambda",
                  "trials",   "n_postselected",     "postselection_rate",
                  "a_w_exact", "a_w_estimate",      "stderr",
                  "seed"};
    simulate_row(csv, simulate_config(opt));
    emit(csv, opt.out);
}

// --------------------------------------------------------------------- meter

struct MeterOpts {
    double theta = 0.0;
    double x = 0.0;
    std::optional<double> sigma;
    std::optional<std::string> sweep_sigma;
    std::string out;
};

void run_meter(const MeterOpts& opt) {
    if (opt.sigma.has_value() == opt.sweep_sigma.has_value())
        throw ConstraintViolation("meter requires exactly one of --sigma or --sweep-sigma");

    std::vector<double> sigmas;
    if (opt.sigma) {
        sigmas.push_back(*opt.sigma);
    } else {
        const RangeSpec range = parse_range(*opt.sweep_sigma);
        if (!(range.lo > 0.0))
            throw ConstraintViolation("sigma sweep requires lo > 0 (sigma>0)");
        // geometric spacing: the weak limit lives on sigma/x decades
        for (unsigned k = 0; k < range.steps; ++k)
            sigmas.push_back(range.lo * std::pow(range.hi / range.lo,
                                                 static_cast<double>(k) / (range.steps - 1)));
    }

    const StatePair pair = make_state_pair(opt.theta);
    const HermitianOperator Z = HermitianOperator::pauli_z();
    const double a_w_target = weak_value(Z, pair.psi, pair.phi).real();

    Csv csv;
    csv.header = {"theta",          "x",           "sigma",
                  "lambda",         "mean_shift_closed", "mean_shift_quadrature",
                  "mean_over_x",    "a_w_target",  "abs_error"};
    for (double sigma : sigmas) {
        GaussianMeter meter(sigma, opt.x);
        const double closed = postselected_mean_shift(meter, pair.psi, pair.phi);
        const double quad = postselected_mean_shift_quadrature(meter, pair.psi, pair.phi);
        const double mean_over_x = closed / opt.x;
        csv.rows.push_back({num(opt.theta), num(opt.x), num(sigma), num(lambda_of(meter)),
                            num(closed), num(quad), num(mean_over_x), num(a_w_target),
                            num(std::abs(mean_over_x - a_w_target))});
    }
    emit(csv, opt.out);
    std::fprintf(stderr, "# meter rows: %zu (sigma ascending), a_w target %s\n",
                 csv.rows.size(), num(a_w_target).c_str());
}

// --------------------------------------------------------------------- sweep

struct SweepOpts {
    std::string param;
    std::string range_text;
    std::optional<double> theta;
    std::optional<double> delta;
    std::optional<double> lambda;
    std::optional<double> x;
    std::optional<std::uint64_t> trials;
    std::uint64_t seed = default_seed();
    std::string postselect;
    unsigned workers = 1;
    std::string out;
};

void validate_grid_point(const std::string& param, double value,
                         const std::function<void(double)>& check) {
    try {
        check(value);
    } catch (const std::exception& e) {
        throw ConstraintViolation("invalid grid point " + param + " = " + num(value) + ": " +
                                  e.what());
    }
}

void run_sweep(const SweepOpts& opt) {
    const RangeSpec range = parse_range(opt.range_text);
    const HermitianOperator Z = HermitianOperator::pauli_z();
    const bool simulating = opt.trials.has_value();
    const double half_pi = std::numbers::pi / 2.0;

    std::vector<double> grid;
    std::function<void(double)> check;
    std::function<double(double)> exact_of;

    if (opt.param == "theta") {
        grid = clipped_linear_grid("theta", range, {0.0, false, half_pi, true});
        check = [&](double theta) {
            const StatePair pair = make_state_pair(theta);
            if (opt.lambda) {
                const WeakSetup setup(Z, *opt.lambda);
                require_admissible(setup, pair.psi, pair.phi);
            }
        };
        exact_of = [&](double theta) {
            const StatePair pair = make_state_pair(theta);
            return weak_value(Z, pair.psi, pair.phi).real();
        };
        if (simulating && !opt.lambda)
            throw ConstraintViolation("simulated theta sweep requires --lambda");
    } else if (opt.param == "delta") {
        const double hi_bound = opt.lambda ? 1.0 - *opt.lambda : 1.0;
        grid = clipped_linear_grid("delta", range, {0.0, true, hi_bound, true});
        check = [&](double delta) {
            const double lambda = opt.lambda ? *opt.lambda : (1.0 - delta) / 2.0;
            ClassicalModel model(lambda, delta);
        };
        exact_of = [&](double delta) {
            const double lambda = opt.lambda ? *opt.lambda : (1.0 - delta) / 2.0;
            return exact_weak_value(ClassicalModel(lambda, delta));
        };
        if (simulating && !opt.lambda)
            throw ConstraintViolation("simulated delta sweep requires --lambda");
    } else if (opt.param == "lambda") {
        if (opt.theta.has_value() == opt.delta.has_value())
            throw ConstraintViolation(
                "lambda sweep requires exactly one of --theta (quantum) or --delta (classical)");
        const double hi_bound = opt.delta ? 1.0 - *opt.delta : 1.0;
        grid = clipped_linear_grid("lambda", range, {0.0, true, hi_bound, true});
        if (opt.theta) {
            check = [&](double lambda) {
                const StatePair pair = make_state_pair(*opt.theta);
                const WeakSetup setup(Z, lambda);
                require_admissible(setup, pair.psi, pair.phi);
            };
            exact_of = [&](double) {
                const StatePair pair = make_state_pair(*opt.theta);
                return weak_value(Z, pair.psi, pair.phi).real();
            };
        } else {
            check = [&](double lambda) { ClassicalModel model(lambda, *opt.delta); };
            exact_of = [&](double lambda) {
                return exact_weak_value(ClassicalModel(lambda, *opt.delta));
            };
        }
    } else if (opt.param == "sigma") {
        if (!opt.theta || !opt.x)
            throw ConstraintViolation("sigma sweep requires fixed --theta and --x");
        if (simulating)
            throw ConstraintViolation("sigma sweep is analytic only; --trials is not supported");
        const double lo_bound = *opt.x * std::sqrt(2.0 / std::numbers::pi);
        grid = clipped_linear_grid("sigma", range,
                                   {lo_bound, true, std::numeric_limits<double>::infinity(),
                                    true});
        check = [&](double sigma) {
            GaussianMeter meter(sigma, *opt.x);
            (void)make_state_pair(*opt.theta);
        };
        exact_of = [&](double sigma) {
            const StatePair pair = make_state_pair(*opt.theta);
            const GaussianMeter meter(sigma, *opt.x);
            return postselected_mean_shift(meter, pair.psi, pair.phi) / *opt.x;
        };
    } else {
        throw ConstraintViolation("param must be one of theta, lambda, delta, sigma");
    }

    for (double v : grid) validate_grid_point(opt.param, v, check);

    Csv csv;
    if (simulating) {
        csv.header = {"param",          "value",              "lambda",
                      "trials",         "n_postselected",     "postselection_rate",
                      "a_w_exact",      "a_w_estimate",       "stderr",
                      "seed"};
    } else {
        csv.header = {"param", "value", "a_w_exact"};
    }

    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double v = grid[k];
        const double exact = exact_of(v);
        if (!simulating) {
            csv.rows.push_back({opt.param, num(v), num(exact)});
            continue;
        }
        RunConfig config;
        config.trials = *opt.trials;
        config.seed = opt.seed + k;  // row k gets substream family seed+k
        config.workers = opt.workers;
        if (opt.param == "delta" || (opt.param == "lambda" && opt.delta)) {
            config.mode = Mode::classical;
            config.delta = opt.param == "delta" ? v : *opt.delta;
            config.lambda = opt.param == "lambda" ? v : *opt.lambda;
            config.postselect_target =
                opt.postselect.empty() ? -1 : parse_postselect(opt.postselect);
        } else {
            config.mode = Mode::quantum;
            config.theta = opt.param == "theta" ? v : *opt.theta;
            config.lambda = opt.param == "lambda" ? v : *opt.lambda;
            config.postselect_target =
                opt.postselect.empty() ? +1 : parse_postselect(opt.postselect);
        }
        const PostselectedEstimate est = run_simulation(config);
        csv.rows.push_back({opt.param, num(v), num(config.lambda), integer(config.trials),
                            integer(est.n_postselected), num(est.postselection_rate),
                            num(exact), num(est.mean), num(est.stderr_mean),
                            integer(config.seed)});
    }
    emit(csv, opt.out);
    std::fprintf(stderr, "# sweep rows: %zu over %s in [%s, %s]\n", csv.rows.size(),
                 opt.param.c_str(), num(grid.front()).c_str(), num(grid.back()).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "weakval: weak values of a qubit observable and of a classical coin under "
        "pre-selection, post-selection and disturbance: exact formulas, Gaussian-meter "
        "model, and seedable Monte Carlo. CSV on stdout, report on stderr."};
    app.require_subcommand(1);
    app.footer(kConstraintFooter);

    WeakValueOpts wv;
    CLI::App* wv_cmd = app.add_subcommand(
        "weak-value", "Analytic weak value a_w for the theta state pair");
    wv_cmd->footer(kConstraintFooter);
    wv_cmd->add_option("--theta", wv.theta, "theta in [0, pi/2), radians")->required();
    wv_cmd->add_option("--lambda", wv.lambda,
                       "measurement strength, 0<λ<1; adds the conditioning route");
    wv_cmd->add_option("--out", wv.out, "also write the CSV to this file");
    wv_cmd->callback([&wv] { run_weak_value(wv); });

    SimulateOpts sim;
    CLI::App* sim_cmd = app.add_subcommand(
        "simulate", "Monte Carlo estimate of E[s/λ | postselection]");
    sim_cmd->footer(kConstraintFooter);
    sim_cmd->add_option("--mode", sim.mode, "quantum or classical")
        ->required()
        ->check(CLI::IsMember({"quantum", "classical"}));
    sim_cmd->add_option("--theta", sim.theta, "quantum: theta in [0, pi/2)");
    sim_cmd->add_option("--delta", sim.delta, "classical: disturbance, 0<δ<1−λ");
    sim_cmd->add_option("--lambda", sim.lambda, "measurement strength, 0<λ<1")->required();
    sim_cmd->add_option("--trials", sim.trials, "pre-selected trials (default 1000000)");
    sim_cmd->add_option("--seed", sim.seed,
                        "master seed (default: WEAKVAL_SEED env or 0)");
    sim_cmd->add_option("--postselect", sim.postselect,
                        "heads/tails (classical), phi/phi-perp or +1/-1 (quantum); "
                        "defaults: tails, phi");
    sim_cmd->add_option("--workers", sim.workers, "worker threads (default 1)");
    sim_cmd->add_option("--out", sim.out, "also write the CSV to this file");
    sim_cmd->callback([&sim] { run_simulate(sim); });

    MeterOpts met;
    CLI::App* met_cmd = app.add_subcommand(
        "meter", "Gaussian-meter mean shift: closed form vs quadrature");
    met_cmd->footer(kConstraintFooter);
    met_cmd->add_option("--theta", met.theta, "theta in [0, pi/2), radians")->required();
    met_cmd->add_option("--x", met.x, "coupling constant x > 0")->required();
    met_cmd->add_option("--sigma", met.sigma, "meter width sigma > 0 (single row)");
    met_cmd->add_option("--sweep-sigma", met.sweep_sigma,
                        "lo:hi:steps, geometric grid of sigma values");
    met_cmd->add_option("--out", met.out, "also write the CSV to this file");
    met_cmd->callback([&met] { run_meter(met); });

    SweepOpts sw;
    CLI::App* sw_cmd = app.add_subcommand(
        "sweep", "Linear parameter sweep with exact a_w (and optional simulation)");
    sw_cmd->footer(kConstraintFooter);
    sw_cmd->add_option("--param", sw.param, "theta, lambda, delta, or sigma")->required();
    sw_cmd->add_option("--range", sw.range_text,
                       "lo:hi:steps, inclusive linear grid; endpoints violating an open "
                       "bound are clipped inward by half a step (reported on stderr)")
        ->required();
    sw_cmd->add_option("--theta", sw.theta, "fixed theta");
    sw_cmd->add_option("--delta", sw.delta, "fixed delta, 0<δ<1−λ");
    sw_cmd->add_option("--lambda", sw.lambda, "fixed lambda, 0<λ<1");
    sw_cmd->add_option("--x", sw.x, "fixed meter coupling (sigma sweeps)");
    sw_cmd->add_option("--trials", sw.trials, "simulate each grid point with this many trials");
    sw_cmd->add_option("--seed", sw.seed, "master seed; row k uses seed+k");
    sw_cmd->add_option("--postselect", sw.postselect, "post-selection target");
    sw_cmd->add_option("--workers", sw.workers, "worker threads (default 1)");
    sw_cmd->add_option("--out", sw.out, "also write the CSV to this file");
    sw_cmd->callback([&sw] { run_sweep(sw); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const InsufficientPostselection& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
