#pragma once

#include "weakval/analytic.hpp"
#include "weakval/qubit.hpp"

namespace weakval {

// Gaussian pointer of initial width sigma coupled to the system through
// H = A (x) P for an effective duration x, in units hbar = 1. The derived
// strength lambda = 2x/sqrt(2 pi sigma^2) must lie in (0, 1); the limit
// lambda -> 0 is identical to sigma -> infinity.
//
// Sign convention: eigenvalue a of A shifts the pointer wavefunction to
// Phi(q - x*a), so a positive reading signals the +1 eigenvalue. The
// coarse-grained outcome sign s is the sign of q (q >= 0 maps to +1, the
// boundary point being measure-zero).
struct GaussianMeter {
    GaussianMeter(double width, double coupling);

    double sigma;
    double x;
};

// lambda = 2x/sqrt(2 pi sigma^2)
double lambda_of(const GaussianMeter& meter);

// Phi(q) = (2 pi sigma^2)^(-1/4) exp(-q^2 / 4 sigma^2); even, L2-normalized.
double meter_wavefunction(const GaussianMeter& meter, double q);

// M_q = <q|U(x)|Phi> = diag(Phi(q - x*a0), Phi(q - x*a1)) for observables
// diagonal in the Z basis with eigenvalues +-1. Anything else is rejected.
Mat2 exact_kraus(const GaussianMeter& meter, const HermitianOperator& A, double q);

// First order in x: M_q = [I + q(x/2 sigma^2) A] Phi(q). The residual against
// exact_kraus is O(x^2).
Mat2 first_order_kraus(const GaussianMeter& meter, const HermitianOperator& A, double q);

// Joint density Pr(q, phi | psi, Phi) for real-amplitude states:
//   density(q) = (c_plus Phi(q-x) + c_minus Phi(q+x))^2,
//   c_plus = <phi|+1><+1|psi>, c_minus = <phi|-1><-1|psi>.
// Its integral (the post-selection weight) has the closed form
//   c_plus^2 + c_minus^2 + 2 c_plus c_minus exp(-x^2/2 sigma^2),
// which tends to |<phi|psi>|^2 as sigma -> infinity.
class PositionDensity {
public:
    PositionDensity(GaussianMeter meter, double coeff_plus, double coeff_minus);

    double operator()(double q) const;
    double normalization() const;
    double normalization_by_quadrature() const;

    double coeff_plus() const { return cp_; }
    double coeff_minus() const { return cm_; }
    const GaussianMeter& meter() const { return meter_; }

private:
    GaussianMeter meter_;
    double cp_;
    double cm_;
};

// Requires psi and phi real within 1e-12 (the theta-state family).
PositionDensity joint_density(const GaussianMeter& meter, const PureState& psi,
                              const PureState& phi);

// E[q | phi] = Int q density(q) dq / normalization, closed form
// x (c_plus^2 - c_minus^2) / normalization. Throws VanishingPostselection
// when the normalization is <= 1e-14.
double postselected_mean_shift(const GaussianMeter& meter, const PureState& psi,
                               const PureState& phi);

// Same quantity by adaptive quadrature over [-8 sigma - x, 8 sigma + x]
// (Gaussian tails beyond 8 sigma contribute < 1e-14).
double postselected_mean_shift_quadrature(const GaussianMeter& meter, const PureState& psi,
                                          const PureState& phi);

// E_s(rho) = Int over {q : sign(q) = s} of M_q rho M_q^dagger with the
// first-order Kraus operators; matches apply_weak_operation up to O(lambda^2).
Mat2 coarse_grained_operation(const GaussianMeter& meter, const HermitianOperator& A,
                              const HermitianOperator& rho, Sign s);

}  // namespace weakval
