#pragma once

#include <cmath>
#include <complex>
#include <random>

#include "weakval/qubit.hpp"

namespace testsupport {

using weakval::Cx;
using weakval::HermitianOperator;
using weakval::Mat2;
using weakval::PureState;

inline std::mt19937_64 make_rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline PureState random_pure_state(std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Cx a(gauss(rng), gauss(rng));
    Cx b(gauss(rng), gauss(rng));
    double n = std::sqrt(std::norm(a) + std::norm(b));
    while (n < 1e-6) {
        a = Cx(gauss(rng), gauss(rng));
        b = Cx(gauss(rng), gauss(rng));
        n = std::sqrt(std::norm(a) + std::norm(b));
    }
    return PureState(a / n, b / n);
}

// Random Hermitian with eigenvalues in [-1, 1]: a*I + b*(n . sigma) with
// |a| + |b| <= 1 and n a unit vector.
inline HermitianOperator random_unit_spectrum_hermitian(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * 3.14159265358979323846);
    const double a = unit(rng);
    const double b = (1.0 - std::abs(a)) * unit(rng);
    const double phi = angle(rng);
    const double cz = unit(rng);
    const double sz = std::sqrt(1.0 - cz * cz);
    const double nx = sz * std::cos(phi), ny = sz * std::sin(phi), nz = cz;
    Mat2 m;
    m(0, 0) = a + b * nz;
    m(1, 1) = a - b * nz;
    m(0, 1) = Cx(b * nx, -b * ny);
    m(1, 0) = Cx(b * nx, b * ny);
    return HermitianOperator(m);
}

// Raw 2x2 complex helpers, independent of the library's Mat2 path; used to
// build brute-force oracles in tests.
struct RawMat {
    Cx m[2][2]{};
};

inline RawMat raw_mul(const RawMat& a, const RawMat& b) {
    RawMat r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j];
    return r;
}

inline RawMat raw_add(const RawMat& a, const RawMat& b) {
    RawMat r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}

inline RawMat raw_scale(Cx s, const RawMat& a) {
    RawMat r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = s * a.m[i][j];
    return r;
}

inline RawMat raw_outer(const Cx v[2]) {
    RawMat r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r.m[i][j] = v[i] * std::conj(v[j]);
    return r;
}

// <bra| M |ket>
inline Cx raw_sandwich(const Cx bra[2], const RawMat& M, const Cx ket[2]) {
    Cx acc = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) acc += std::conj(bra[i]) * M.m[i][j] * ket[j];
    return acc;
}

// Brute-force <phi| E_s(|psi><psi|) |phi> with E_s rho = (rho + s(l/2){Z,rho})/2,
// entirely in raw arithmetic.
inline double oracle_joint_prob(double theta, double lambda, int s) {
    const double c = std::cos(theta / 2.0), sn = std::sin(theta / 2.0);
    const Cx psi[2] = {c, sn};
    const Cx phi[2] = {c, -sn};
    RawMat Z;
    Z.m[0][0] = 1.0;
    Z.m[1][1] = -1.0;
    const RawMat rho = raw_outer(psi);
    const RawMat anti = raw_add(raw_mul(Z, rho), raw_mul(rho, Z));
    const RawMat es = raw_scale(0.5, raw_add(rho, raw_scale(s * lambda / 2.0, anti)));
    return raw_sandwich(phi, es, phi).real();
}

// Composite Simpson on a uniform grid; slow and simple, independent of the
// library quadrature.
template <class F>
double simpson(F f, double a, double b, int n_panels) {
    const int n = 2 * n_panels;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

}  // namespace testsupport
