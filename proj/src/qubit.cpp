#include "weakval/qubit.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "weakval/errors.hpp"

namespace weakval {

Mat2 Mat2::identity() {
    Mat2 m;
    m(0, 0) = 1.0;
    m(1, 1) = 1.0;
    return m;
}

Mat2 Mat2::adjoint() const {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = std::conj((*this)(j, i));
    return r;
}

double Mat2::max_abs_entry() const {
    double m = 0.0;
    for (const Cx& v : e) m = std::max(m, std::abs(v));
    return m;
}

bool Mat2::is_hermitian(double tol) const {
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (std::abs((*this)(i, j) - std::conj((*this)(j, i))) > tol) return false;
    return true;
}

Mat2 operator+(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.e[i] = a.e[i] + b.e[i];
    return r;
}

Mat2 operator-(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.e[i] = a.e[i] - b.e[i];
    return r;
}

Mat2 operator*(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r(i, j) = a(i, 0) * b(0, j) + a(i, 1) * b(1, j);
    return r;
}

Mat2 operator*(Cx s, const Mat2& m) {
    Mat2 r;
    for (int i = 0; i < 4; ++i) r.e[i] = s * m.e[i];
    return r;
}

Mat2 operator*(double s, const Mat2& m) { return Cx(s, 0.0) * m; }

PureState::PureState(Cx plus_component, Cx minus_component)
    : amp_{plus_component, minus_component} {
    const double n2 = std::norm(amp_[0]) + std::norm(amp_[1]);
    if (std::abs(n2 - 1.0) > kNormTol) {
        std::ostringstream os;
        os << "PureState norm^2 = " << n2 << " violates |norm^2 - 1| <= 1e-12";
        throw ConstraintViolation(os.str());
    }
}

bool PureState::is_real(double tol) const {
    return std::abs(amp_[0].imag()) <= tol && std::abs(amp_[1].imag()) <= tol;
}

HermitianOperator::HermitianOperator(const Mat2& m) : m_(m) {
    if (!m.is_hermitian(kHermitianTol))
        throw ConstraintViolation(
            "HermitianOperator entries violate M = M^dagger within 1e-12");
}

HermitianOperator HermitianOperator::identity() {
    return HermitianOperator(Mat2::identity());
}

HermitianOperator HermitianOperator::pauli_x() {
    Mat2 m;
    m(0, 1) = 1.0;
    m(1, 0) = 1.0;
    return HermitianOperator(m);
}

HermitianOperator HermitianOperator::pauli_y() {
    Mat2 m;
    m(0, 1) = Cx(0.0, -1.0);
    m(1, 0) = Cx(0.0, 1.0);
    return HermitianOperator(m);
}

HermitianOperator HermitianOperator::pauli_z() {
    Mat2 m;
    m(0, 0) = 1.0;
    m(1, 1) = -1.0;
    return HermitianOperator(m);
}

Cx inner(const PureState& a, const PureState& b) {
    return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

std::array<Cx, 2> apply(const Mat2& m, const PureState& v) {
    return {m(0, 0) * v[0] + m(0, 1) * v[1], m(1, 0) * v[0] + m(1, 1) * v[1]};
}

Cx matrix_element(const HermitianOperator& A, const PureState& bra, const PureState& ket) {
    const auto av = apply(A.matrix(), ket);
    return std::conj(bra[0]) * av[0] + std::conj(bra[1]) * av[1];
}

double expectation(const HermitianOperator& A, const PureState& psi) {
    const Cx v = matrix_element(A, psi, psi);
    if (std::abs(v.imag()) >= kHermitianTol)
        throw ConstraintViolation("expectation value has imaginary part >= 1e-12");
    return v.real();
}

HermitianOperator anticommutator(const HermitianOperator& A, const HermitianOperator& B) {
    return HermitianOperator(A.matrix() * B.matrix() + B.matrix() * A.matrix());
}

HermitianOperator projector(const PureState& psi) {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = psi[i] * std::conj(psi[j]);
    return HermitianOperator(m);
}

PureState orthogonal_complement(const PureState& psi) {
    return PureState(-std::conj(psi[1]), std::conj(psi[0]));
}

StatePair make_state_pair(double theta) {
    if (!(theta >= 0.0 && theta < std::numbers::pi / 2.0)) {
        std::ostringstream os;
        os << "theta = " << theta << " violates 0 <= theta < pi/2";
        throw ConstraintViolation(os.str());
    }
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    return StatePair{theta, PureState(c, s), PureState(c, -s)};
}

}  // namespace weakval
