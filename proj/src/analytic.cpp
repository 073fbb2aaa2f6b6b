#include "weakval/analytic.hpp"

#include <cmath>
#include <sstream>

#include "weakval/errors.hpp"

namespace weakval {

namespace {

// Allow this much negative slack before declaring a first-order probability
// genuinely negative; keeps the admissibility boundary lambda*|Re a_w| = 1
// from flapping on rounding.
constexpr double kProbSlack = 1e-15;

// Raw joint value, no sign policing.
double joint_prob_raw(const WeakSetup& setup, const PureState& psi, const PureState& phi,
                      Sign s) {
    const Cx overlap = inner(phi, psi);
    const Cx cross = matrix_element(setup.A, phi, psi) * inner(psi, phi);
    return 0.5 * (std::norm(overlap) + sign_value(s) * setup.lambda * cross.real());
}

void check_strength(double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        std::ostringstream os;
        os << "lambda = " << lambda << " violates 0<lambda<1";
        throw ConstraintViolation(os.str());
    }
}

}  // namespace

WeakSetup::WeakSetup(HermitianOperator observable, double strength)
    : A(observable), lambda(strength) {
    check_strength(lambda);
}

DisturbanceChannel::DisturbanceChannel(double disturbance, double strength)
    : delta(disturbance), lambda(strength) {
    check_strength(lambda);
    if (!(delta > 0.0 && delta < 1.0 - lambda)) {
        std::ostringstream os;
        os << "delta = " << delta << " violates 0<delta<1-lambda (1-lambda = "
           << 1.0 - lambda << ")";
        throw ConstraintViolation(os.str());
    }
}

Cx weak_value(const HermitianOperator& A, const PureState& psi, const PureState& phi) {
    const Cx overlap = inner(phi, psi);
    if (std::abs(overlap) <= kOrthogonalTol)
        throw OrthogonalSelection("weak value undefined: |<phi|psi>| <= 1e-14");
    return matrix_element(A, phi, psi) / overlap;
}

HermitianOperator apply_weak_operation(const WeakSetup& setup, const HermitianOperator& rho,
                                       Sign s) {
    const Cx tr = rho.matrix().trace();
    if (std::abs(tr - Cx(1.0)) > kHermitianTol)
        throw ConstraintViolation("apply_weak_operation requires trace(rho) = 1 within 1e-12");
    const Mat2 anti = setup.A.matrix() * rho.matrix() + rho.matrix() * setup.A.matrix();
    const Mat2 out = 0.5 * (rho.matrix() + (sign_value(s) * setup.lambda / 2.0) * anti);
    return HermitianOperator(out);
}

double outcome_prob(const WeakSetup& setup, const PureState& psi, Sign s) {
    return 0.5 * (1.0 + sign_value(s) * setup.lambda * expectation(setup.A, psi));
}

double joint_prob(const WeakSetup& setup, const PureState& psi, const PureState& phi, Sign s) {
    const double v = joint_prob_raw(setup, psi, phi, s);
    if (v < -kProbSlack) {
        std::ostringstream os;
        os << "joint probability " << v << " is negative at lambda = " << setup.lambda
           << "; the first-order model requires lambda*|Re a_w| <= 1";
        throw InadmissibleStrength(os.str());
    }
    return std::max(v, 0.0);
}

double conditional_expectation_s(const WeakSetup& setup, const PureState& psi,
                                 const PureState& phi) {
    if (std::abs(inner(phi, psi)) <= kOrthogonalTol)
        throw OrthogonalSelection("conditional expectation undefined: |<phi|psi>| <= 1e-14");
    const double p_plus = joint_prob(setup, psi, phi, Sign::plus);
    const double p_minus = joint_prob(setup, psi, phi, Sign::minus);
    return (p_plus - p_minus) / (p_plus + p_minus);
}

double weak_value_via_conditioning(const WeakSetup& setup, const PureState& psi,
                                   const PureState& phi) {
    return conditional_expectation_s(setup, psi, phi) / setup.lambda;
}

std::pair<double, double> total_expectation_identity(const WeakSetup& setup,
                                                     const PureState& psi,
                                                     const std::array<PureState, 2>& phi_basis) {
    if (std::abs(inner(phi_basis[0], phi_basis[1])) > kHermitianTol)
        throw ConstraintViolation("phi_basis is not orthonormal within 1e-12");
    const double lhs = expectation(setup.A, psi);
    double rhs = 0.0;
    for (const PureState& phi : phi_basis) {
        const Cx overlap = inner(phi, psi);
        if (std::abs(overlap) <= kOrthogonalTol)
            throw OrthogonalSelection("basis element orthogonal to psi: weak value undefined");
        rhs += std::norm(overlap) * weak_value(setup.A, psi, phi).real();
    }
    return {lhs, rhs};
}

bool validate_admissible(const WeakSetup& setup, const PureState& psi, const PureState& phi) {
    const PureState perp = orthogonal_complement(phi);
    for (const PureState* post : {&phi, &perp})
        for (Sign s : kBothSigns)
            if (joint_prob_raw(setup, psi, *post, s) < -kProbSlack) return false;
    return true;
}

double max_admissible_lambda(const HermitianOperator& A, const PureState& psi,
                             const PureState& phi) {
    const PureState perp = orthogonal_complement(phi);
    double best = 1.0;
    for (const PureState* post : {&phi, &perp}) {
        const double overlap2 = std::norm(inner(*post, psi));
        const double cross =
            std::abs((matrix_element(A, *post, psi) * inner(psi, *post)).real());
        if (cross > 0.0) best = std::min(best, overlap2 / cross);
    }
    return best;
}

void require_admissible(const WeakSetup& setup, const PureState& psi, const PureState& phi) {
    if (validate_admissible(setup, psi, phi)) return;
    std::ostringstream os;
    os << "lambda = " << setup.lambda << " exceeds the maximal admissible lambda = "
       << max_admissible_lambda(setup.A, psi, phi)
       << " for this pre/post-selection (requires lambda*|Re a_w| <= 1)";
    throw InadmissibleStrength(os.str());
}

DisturbanceTables quantum_disturbance_tables(const DisturbanceChannel& channel) {
    DisturbanceTables t{};
    for (Sign s : kBothSigns) {
        const int i = sign_index(s);
        const double one_plus = 1.0 + sign_value(s) * channel.lambda;
        t.stay_given_s[i] = channel.delta / one_plus;
        t.flip_given_s[i] = (one_plus - channel.delta) / one_plus;
        t.joint_stay[i] = channel.delta / 2.0;
        t.joint_flip[i] = 0.5 * (one_plus - channel.delta);
    }
    t.marginal_stay = channel.delta;
    t.marginal_flip = 1.0 - channel.delta;
    return t;
}

double quantum_disturbance_weak_value(const DisturbanceChannel& channel) {
    double a_w = 0.0;
    for (Sign s : kBothSigns) {
        const double sv = sign_value(s);
        a_w += sv / (2.0 * channel.lambda) * (1.0 + sv * channel.lambda - channel.delta) /
               (1.0 - channel.delta);
    }
    return a_w;
}

}  // namespace weakval
