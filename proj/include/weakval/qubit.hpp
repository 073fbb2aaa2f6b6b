#pragma once

#include <array>
#include <complex>

namespace weakval {

using Cx = std::complex<double>;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kNormTol = 1e-12;
inline constexpr double kOrthogonalTol = 1e-14;

// General complex 2x2 matrix, row-major. Dimension is fixed at 2 throughout;
// everything here is a qubit or a coin.
struct Mat2 {
    std::array<Cx, 4> e{};

    Cx& operator()(int r, int c) { return e[2 * r + c]; }
    const Cx& operator()(int r, int c) const { return e[2 * r + c]; }

    static Mat2 zero() { return {}; }
    static Mat2 identity();

    Mat2 adjoint() const;
    Cx trace() const { return e[0] + e[3]; }
    double max_abs_entry() const;
    bool is_hermitian(double tol) const;
};

Mat2 operator+(const Mat2& a, const Mat2& b);
Mat2 operator-(const Mat2& a, const Mat2& b);
Mat2 operator*(const Mat2& a, const Mat2& b);
Mat2 operator*(Cx s, const Mat2& m);
Mat2 operator*(double s, const Mat2& m);

// Normalized ket with components in the Z eigenbasis {|+1>, |-1>}.
// Construction rejects |norm^2 - 1| > 1e-12.
class PureState {
public:
    PureState(Cx plus_component, Cx minus_component);

    Cx operator[](int i) const { return amp_[i]; }
    bool is_real(double tol = kHermitianTol) const;

    static PureState z_plus() { return PureState(1.0, 0.0); }
    static PureState z_minus() { return PureState(0.0, 1.0); }

private:
    std::array<Cx, 2> amp_;
};

// 2x2 Hermitian matrix. Hermiticity is checked at construction and violations
// are rejected, not repaired. Positivity is deliberately not required: the
// linearized conditional operators may carry a small negative eigenvalue.
class HermitianOperator {
public:
    explicit HermitianOperator(const Mat2& m);

    const Mat2& matrix() const { return m_; }
    const Cx& operator()(int r, int c) const { return m_(r, c); }

    static HermitianOperator identity();
    static HermitianOperator pauli_x();
    static HermitianOperator pauli_y();
    static HermitianOperator pauli_z();

private:
    Mat2 m_;
};

// theta-parameterized pre/post pair
//   psi = (cos t/2,  sin t/2),  phi = (cos t/2, -sin t/2),
// both real, with <phi|psi> = cos t.
struct StatePair {
    double theta;
    PureState psi;
    PureState phi;
};

// <a|b>
Cx inner(const PureState& a, const PureState& b);

// m|v> as a raw (generally unnormalized) pair of amplitudes
std::array<Cx, 2> apply(const Mat2& m, const PureState& v);

// <bra|A|ket>
Cx matrix_element(const HermitianOperator& A, const PureState& bra, const PureState& ket);

// <psi|A|psi>, guaranteed real; the residual imaginary part must be < 1e-12
// and is dropped.
double expectation(const HermitianOperator& A, const PureState& psi);

// {A,B} = AB + BA
HermitianOperator anticommutator(const HermitianOperator& A, const HermitianOperator& B);

// |psi><psi|
HermitianOperator projector(const PureState& psi);

// The state orthogonal to psi (unique up to phase): (-conj(a1), conj(a0)).
PureState orthogonal_complement(const PureState& psi);

// Requires 0 <= theta < pi/2 so that <phi|psi> = cos(theta) > 0.
StatePair make_state_pair(double theta);

}  // namespace weakval
