#include "weakval/coin.hpp"

#include <sstream>

#include "weakval/errors.hpp"

namespace weakval {

ClassicalModel::ClassicalModel(double strength, double disturbance)
    : lambda(strength), delta(disturbance) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        std::ostringstream os;
        os << "lambda = " << lambda << " violates 0<lambda<1";
        throw ConstraintViolation(os.str());
    }
    if (!(delta > 0.0 && delta < 1.0 - lambda)) {
        std::ostringstream os;
        os << "delta = " << delta << " violates 0<delta<1-lambda (1-lambda = "
           << 1.0 - lambda << ")";
        throw ConstraintViolation(os.str());
    }
}

double report_prob(const ClassicalModel& model, Face psi, Sign s) {
    return 0.5 * (1.0 + model.lambda * sign_value(s) * face_value(psi));
}

double flip_prob(const ClassicalModel& model, Face psi, Sign s) {
    if (psi != Face::heads)
        throw ConstraintViolation(
            "flip probability is defined only for pre-selection psi = Heads (+1)");
    const double one_plus = 1.0 + sign_value(s) * model.lambda;
    return (one_plus - model.delta) / one_plus;
}

CoinTables joint_and_marginal_tables(const ClassicalModel& model) {
    CoinTables t{};
    for (Sign s : kBothSigns) {
        const int i = sign_index(s);
        t.joint_heads[i] = model.delta / 2.0;
        t.joint_tails[i] = 0.5 * (1.0 + sign_value(s) * model.lambda - model.delta);
    }
    t.marginal_heads = model.delta;
    t.marginal_tails = 1.0 - model.delta;
    return t;
}

double exact_weak_value(const ClassicalModel& model) {
    const CoinTables t = joint_and_marginal_tables(model);
    double a_w = 0.0;
    for (Sign s : kBothSigns)
        a_w += sign_value(s) / model.lambda * t.joint_tails[sign_index(s)] / t.marginal_tails;
    return a_w;
}

OracleDistribution enumerate_oracle(const ClassicalModel& model) {
    OracleDistribution dist{};
    dist.lambda = model.lambda;
    int k = 0;
    for (Sign s : kBothSigns) {
        // Pr(report s | prepare Heads) from the misreport primitive alone
        const double p_report =
            s == Sign::plus ? 1.0 - model.alpha() : model.alpha();
        const double p_flip = flip_prob(model, Face::heads, s);
        for (bool flipped : {false, true}) {
            const double branch = flipped ? p_flip : 1.0 - p_flip;
            dist.atoms[k++] = OracleAtom{
                s, flipped, flipped ? Face::tails : Face::heads, p_report * branch};
        }
    }
    return dist;
}

CoinTables OracleDistribution::tables() const {
    CoinTables t{};
    for (const OracleAtom& a : atoms) {
        auto& joint = a.phi == Face::heads ? t.joint_heads : t.joint_tails;
        joint[sign_index(a.s)] += a.prob;
    }
    t.marginal_heads = t.joint_heads[0] + t.joint_heads[1];
    t.marginal_tails = t.joint_tails[0] + t.joint_tails[1];
    return t;
}

double OracleDistribution::probability(Sign s, Face phi) const {
    double p = 0.0;
    for (const OracleAtom& a : atoms)
        if (a.s == s && a.phi == phi) p += a.prob;
    return p;
}

double OracleDistribution::marginal(Face phi) const {
    return probability(Sign::plus, phi) + probability(Sign::minus, phi);
}

double OracleDistribution::conditional_mean_s_over_lambda(Face phi) const {
    double num = 0.0;
    for (const OracleAtom& a : atoms)
        if (a.phi == phi) num += sign_value(a.s) / lambda * a.prob;
    return num / marginal(phi);
}

}  // namespace weakval
