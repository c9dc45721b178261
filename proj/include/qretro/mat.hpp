#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <type_traits>

namespace qretro {

using cplx = std::complex<double>;

/// Fixed-size dense square matrix, row-major.
template <typename T, std::size_t N>
struct SquareMatrix {
    static constexpr std::size_t dim = N;
    std::array<T, N * N> data{};

    constexpr T &operator()(std::size_t r, std::size_t c) { return data[r * N + c]; }
    constexpr const T &operator()(std::size_t r, std::size_t c) const { return data[r * N + c]; }

    static constexpr SquareMatrix identity() {
        SquareMatrix m;
        for (std::size_t k = 0; k < N; ++k) m(k, k) = T(1);
        return m;
    }

    SquareMatrix &operator+=(const SquareMatrix &o) {
        for (std::size_t k = 0; k < N * N; ++k) data[k] += o.data[k];
        return *this;
    }
    SquareMatrix &operator-=(const SquareMatrix &o) {
        for (std::size_t k = 0; k < N * N; ++k) data[k] -= o.data[k];
        return *this;
    }
    SquareMatrix &operator*=(T s) {
        for (auto &x : data) x *= s;
        return *this;
    }

    friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix &b) { return a += b; }
    friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix &b) { return a -= b; }
    friend SquareMatrix operator*(SquareMatrix a, T s) { return a *= s; }
    friend SquareMatrix operator*(T s, SquareMatrix a) { return a *= s; }
    friend SquareMatrix operator-(SquareMatrix a) { return a *= T(-1); }

    friend SquareMatrix operator*(const SquareMatrix &a, const SquareMatrix &b) {
        SquareMatrix out;
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t k = 0; k < N; ++k) {
                const T aik = a(i, k);
                for (std::size_t j = 0; j < N; ++j) out(i, j) += aik * b(k, j);
            }
        }
        return out;
    }

    bool operator==(const SquareMatrix &) const = default;
};

using CMat2 = SquareMatrix<cplx, 2>;
using CMat4 = SquareMatrix<cplx, 4>;
using RMat3 = SquareMatrix<double, 3>;
using RMat4 = SquareMatrix<double, 4>;
using Vec3 = std::array<double, 3>;

template <typename T, std::size_t N>
T trace(const SquareMatrix<T, N> &m) {
    T t{};
    for (std::size_t k = 0; k < N; ++k) t += m(k, k);
    return t;
}

template <std::size_t N>
SquareMatrix<cplx, N> dagger(const SquareMatrix<cplx, N> &m) {
    SquareMatrix<cplx, N> out;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out(i, j) = std::conj(m(j, i));
    return out;
}

template <typename T, std::size_t N>
SquareMatrix<T, N> transpose(const SquareMatrix<T, N> &m) {
    SquareMatrix<T, N> out;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) out(i, j) = m(j, i);
    return out;
}

/// Largest absolute entry of a - b.
template <typename T, std::size_t N>
double max_abs_diff(const SquareMatrix<T, N> &a, const SquareMatrix<T, N> &b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < N * N; ++k) worst = std::max(worst, std::abs(a.data[k] - b.data[k]));
    return worst;
}

template <typename T, std::size_t N>
double max_abs(const SquareMatrix<T, N> &a) {
    double worst = 0.0;
    for (const auto &x : a.data) worst = std::max(worst, std::abs(x));
    return worst;
}

/// Squared Frobenius (Schatten-2) norm.
template <typename T, std::size_t N>
double frobenius2(const SquareMatrix<T, N> &a) {
    double s = 0.0;
    for (const auto &x : a.data) s += std::norm(x);
    return s;
}

template <typename T, std::size_t N>
bool all_finite(const SquareMatrix<T, N> &a) {
    for (const auto &x : a.data) {
        if constexpr (std::is_same_v<T, cplx>) {
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
        } else {
            if (!std::isfinite(x)) return false;
        }
    }
    return true;
}

template <std::size_t N>
bool is_hermitian(const SquareMatrix<cplx, N> &m, double tol = 1e-12) {
    return all_finite(m) && max_abs_diff(m, dagger(m)) <= tol;
}

/// sigma_0 = identity, sigma_1..3 = X, Y, Z.
const CMat2 &pauli(int k);

/// Kronecker product; `a` acts on the first (left) qubit.
CMat4 tensor(const CMat2 &a, const CMat2 &b);

/// AB + BA.
template <std::size_t N>
SquareMatrix<cplx, N> anticommutator(const SquareMatrix<cplx, N> &a, const SquareMatrix<cplx, N> &b) {
    return a * b + b * a;
}

/// Two-qubit swap, sum_ij |i><j| (x) |j><i|.
CMat4 swap_matrix();

enum class Subsystem { first, second };

/// Transpose of the 2x2 factor on the chosen subsystem. Involution.
CMat4 partial_transpose(const CMat4 &m, Subsystem which);

/// Real Pauli-basis coefficients of a two-qubit operator:
/// a(i, j) = Tr[M (sigma_i (x) sigma_j)] / 4, so that M = sum a(i, j) sigma_i (x) sigma_j.
struct PauliCoeffs {
    RMat4 a;

    double &operator()(int i, int j) { return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); }
    double operator()(int i, int j) const { return a(static_cast<std::size_t>(i), static_cast<std::size_t>(j)); }
};

/// Takes the real part of each coefficient; exact for Hermitian input.
PauliCoeffs pauli_expand(const CMat4 &m);
SquareMatrix<cplx, 4> pauli_expand_complex(const CMat4 &m);
CMat4 pauli_reconstruct(const PauliCoeffs &c);

/// Single-qubit analogue: (Tr M, Tr M sigma_1, ..) / 2.
std::array<cplx, 4> pauli_expand(const CMat2 &m);
CMat2 pauli_reconstruct(const std::array<cplx, 4> &c);

template <std::size_t N>
struct HermitianEigen {
    std::array<double, N> values;   // ascending
    SquareMatrix<cplx, N> vectors;  // eigenvector k is column k
};

/// Cyclic complex Jacobi eigensolver. Throws NotHermitian if |M - M^dagger| > 1e-10.
HermitianEigen<4> herm_eig(const CMat4 &m);
HermitianEigen<2> herm_eig(const CMat2 &m);

// ---- small real 3x3 helpers ----

Vec3 matvec(const RMat3 &m, const Vec3 &v);
double dot(const Vec3 &a, const Vec3 &b);
double norm2(const Vec3 &v);
double det(const RMat3 &m);
RMat3 adjugate(const RMat3 &m);
RMat3 diag(const Vec3 &v);

/// A = u * diag(s) * v^T with u, v orthogonal and s >= 0 descending.
struct Svd3 {
    RMat3 u;
    Vec3 s;
    RMat3 v;
};
Svd3 svd(const RMat3 &m);

}  // namespace qretro
