#include "weakval/meter.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "weakval/errors.hpp"
#include "weakval/quadrature.hpp"

namespace weakval {

namespace {

constexpr double kVanishingTol = 1e-14;

// The +-Z family: diagonal in the Z basis with a traceless +-1 spectrum.
// Anything else is rejected.
std::array<double, 2> z_like_eigenvalues(const HermitianOperator& A) {
    const Mat2& m = A.matrix();
    const bool diagonal =
        std::abs(m(0, 1)) <= kHermitianTol && std::abs(m(1, 0)) <= kHermitianTol;
    const double a0 = m(0, 0).real();
    const double a1 = m(1, 1).real();
    const bool unit = std::abs(std::abs(a0) - 1.0) <= kHermitianTol &&
                      std::abs(std::abs(a1) - 1.0) <= kHermitianTol;
    const bool traceless = std::abs(a0 + a1) <= kHermitianTol;
    if (!diagonal || !unit || !traceless)
        throw ConstraintViolation(
            "unsupported observable: must be +-Z (diagonal with eigenvalues +1, -1)");
    return {a0 < 0 ? -1.0 : 1.0, a1 < 0 ? -1.0 : 1.0};
}

double window(const GaussianMeter& meter) { return 8.0 * meter.sigma + meter.x; }

}  // namespace

GaussianMeter::GaussianMeter(double width, double coupling) : sigma(width), x(coupling) {
    std::ostringstream os;
    if (!(sigma > 0.0)) {
        os << "sigma = " << sigma << " violates sigma>0";
        throw ConstraintViolation(os.str());
    }
    if (!(x > 0.0)) {
        os << "x = " << x << " violates x>0";
        throw ConstraintViolation(os.str());
    }
    const double lambda = lambda_of(*this);
    if (!(lambda < 1.0)) {
        os << "derived lambda = 2x/sqrt(2 pi sigma^2) = " << lambda
           << " violates 0<lambda<1";
        throw ConstraintViolation(os.str());
    }
}

double lambda_of(const GaussianMeter& meter) {
    return 2.0 * meter.x / std::sqrt(2.0 * std::numbers::pi * meter.sigma * meter.sigma);
}

double meter_wavefunction(const GaussianMeter& meter, double q) {
    const double s2 = meter.sigma * meter.sigma;
    return std::pow(2.0 * std::numbers::pi * s2, -0.25) * std::exp(-q * q / (4.0 * s2));
}

Mat2 exact_kraus(const GaussianMeter& meter, const HermitianOperator& A, double q) {
    const auto eig = z_like_eigenvalues(A);
    Mat2 m;
    m(0, 0) = meter_wavefunction(meter, q - meter.x * eig[0]);
    m(1, 1) = meter_wavefunction(meter, q - meter.x * eig[1]);
    return m;
}

Mat2 first_order_kraus(const GaussianMeter& meter, const HermitianOperator& A, double q) {
    const double phi = meter_wavefunction(meter, q);
    const double c = q * meter.x / (2.0 * meter.sigma * meter.sigma);
    return phi * Mat2::identity() + (phi * c) * A.matrix();
}

PositionDensity::PositionDensity(GaussianMeter meter, double coeff_plus, double coeff_minus)
    : meter_(meter), cp_(coeff_plus), cm_(coeff_minus) {}

double PositionDensity::operator()(double q) const {
    const double amp = cp_ * meter_wavefunction(meter_, q - meter_.x) +
                       cm_ * meter_wavefunction(meter_, q + meter_.x);
    return amp * amp;
}

double PositionDensity::normalization() const {
    const double overlap =
        std::exp(-meter_.x * meter_.x / (2.0 * meter_.sigma * meter_.sigma));
    return cp_ * cp_ + cm_ * cm_ + 2.0 * cp_ * cm_ * overlap;
}

double PositionDensity::normalization_by_quadrature() const {
    const double w = window(meter_);
    return integrate([this](double q) { return (*this)(q); }, -w, w);
}

PositionDensity joint_density(const GaussianMeter& meter, const PureState& psi,
                              const PureState& phi) {
    if (!psi.is_real() || !phi.is_real())
        throw ConstraintViolation(
            "joint_density requires real-amplitude states (imaginary parts <= 1e-12)");
    const double c_plus = phi[0].real() * psi[0].real();
    const double c_minus = phi[1].real() * psi[1].real();
    return PositionDensity(meter, c_plus, c_minus);
}

double postselected_mean_shift(const GaussianMeter& meter, const PureState& psi,
                               const PureState& phi) {
    const PositionDensity density = joint_density(meter, psi, phi);
    const double norm = density.normalization();
    if (norm <= kVanishingTol)
        throw VanishingPostselection(
            "post-selected meter distribution has weight <= 1e-14");
    const double cp = density.coeff_plus();
    const double cm = density.coeff_minus();
    return meter.x * (cp * cp - cm * cm) / norm;
}

double postselected_mean_shift_quadrature(const GaussianMeter& meter, const PureState& psi,
                                          const PureState& phi) {
    const PositionDensity density = joint_density(meter, psi, phi);
    const double norm = density.normalization_by_quadrature();
    if (norm <= kVanishingTol)
        throw VanishingPostselection(
            "post-selected meter distribution has weight <= 1e-14");
    const double w = window(meter);
    const double first_moment = integrate([&](double q) { return q * density(q); }, -w, w);
    return first_moment / norm;
}

Mat2 coarse_grained_operation(const GaussianMeter& meter, const HermitianOperator& A,
                              const HermitianOperator& rho, Sign s) {
    const Cx tr = rho.matrix().trace();
    if (std::abs(tr - Cx(1.0)) > kHermitianTol)
        throw ConstraintViolation(
            "coarse_grained_operation requires trace(rho) = 1 within 1e-12");
    const double w = window(meter);
    const double lo = s == Sign::plus ? 0.0 : -w;
    const double hi = s == Sign::plus ? w : 0.0;
    auto integrand = [&](double q) {
        const Mat2 m = first_order_kraus(meter, A, q);
        return m * rho.matrix() * m.adjoint();
    };
    return integrate(integrand, lo, hi);
}

}  // namespace weakval
