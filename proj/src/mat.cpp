#include "qretro/mat.hpp"

#include <numeric>
#include <string>

#include "qretro/errors.hpp"

namespace qretro {

namespace {

constexpr cplx I_UNIT{0.0, 1.0};

const std::array<CMat2, 4> PAULIS = {
    CMat2{{1.0, 0.0, 0.0, 1.0}},
    CMat2{{0.0, 1.0, 1.0, 0.0}},
    CMat2{{0.0, -I_UNIT, I_UNIT, 0.0}},
    CMat2{{1.0, 0.0, 0.0, -1.0}},
};

template <std::size_t N>
HermitianEigen<N> jacobi_eig(const SquareMatrix<cplx, N> &m) {
    if (!all_finite(m)) throw NotHermitian("herm_eig: matrix has non-finite entries");
    double asym = max_abs_diff(m, dagger(m));
    if (asym > 1e-10) throw NotHermitian("herm_eig: |M - M^dagger| = " + std::to_string(asym));

    SquareMatrix<cplx, N> a = (m + dagger(m)) * cplx(0.5);
    auto v = SquareMatrix<cplx, N>::identity();
    const double scale = std::max(1.0, std::sqrt(frobenius2(a)));

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = 0; q < N; ++q)
                if (p != q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= 1e-13 * scale) break;

        for (std::size_t p = 0; p + 1 < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                const cplx apq = a(p, q);
                const double g = std::abs(apq);
                if (g == 0.0) continue;
                const cplx phase = apq / g;
                const double theta = (a(q, q).real() - a(p, p).real()) / (2.0 * g);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                // Q = diag(1, conj(phase)) * [[c, s], [-s, c]] on the (p, q) plane.
                const cplx qpp = c, qpq = s, qqp = -s * std::conj(phase), qqq = c * std::conj(phase);

                for (std::size_t k = 0; k < N; ++k) {
                    const cplx akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * qpp + akq * qqp;
                    a(k, q) = akp * qpq + akq * qqq;
                    const cplx vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * qpp + vkq * qqp;
                    v(k, q) = vkp * qpq + vkq * qqq;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    const cplx apk = a(p, k), aqk = a(q, k);
                    a(p, k) = std::conj(qpp) * apk + std::conj(qqp) * aqk;
                    a(q, k) = std::conj(qpq) * apk + std::conj(qqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }

    std::array<std::size_t, N> order;
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x).real() < a(y, y).real(); });
    HermitianEigen<N> out;
    for (std::size_t k = 0; k < N; ++k) {
        out.values[k] = a(order[k], order[k]).real();
        for (std::size_t r = 0; r < N; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

Vec3 column(const RMat3 &m, std::size_t c) { return {m(0, c), m(1, c), m(2, c)}; }

}  // namespace

const CMat2 &pauli(int k) {
    if (k < 0 || k > 3) throw InvalidArgument("pauli index must be in 0..3, got " + std::to_string(k));
    return PAULIS[static_cast<std::size_t>(k)];
}

CMat4 tensor(const CMat2 &a, const CMat2 &b) {
    CMat4 out;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l) out(2 * i + k, 2 * j + l) = a(i, j) * b(k, l);
    return out;
}

CMat4 swap_matrix() {
    CMat4 out;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) out(2 * i + j, 2 * j + i) = 1.0;
    return out;
}

CMat4 partial_transpose(const CMat4 &m, Subsystem which) {
    CMat4 out;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t l = 0; l < 2; ++l) {
                    // m(ik, jl) with i,j on the first factor and k,l on the second.
                    if (which == Subsystem::first) {
                        out(2 * j + k, 2 * i + l) = m(2 * i + k, 2 * j + l);
                    } else {
                        out(2 * i + l, 2 * j + k) = m(2 * i + k, 2 * j + l);
                    }
                }
    return out;
}

SquareMatrix<cplx, 4> pauli_expand_complex(const CMat4 &m) {
    SquareMatrix<cplx, 4> out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            out(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = trace(m * tensor(pauli(i), pauli(j))) / 4.0;
    return out;
}

PauliCoeffs pauli_expand(const CMat4 &m) {
    auto c = pauli_expand_complex(m);
    PauliCoeffs out;
    for (std::size_t k = 0; k < 16; ++k) out.a.data[k] = c.data[k].real();
    return out;
}

CMat4 pauli_reconstruct(const PauliCoeffs &c) {
    CMat4 out;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double x = c(i, j);
            if (x != 0.0) out += tensor(pauli(i), pauli(j)) * cplx(x);
        }
    return out;
}

std::array<cplx, 4> pauli_expand(const CMat2 &m) {
    std::array<cplx, 4> out;
    for (int k = 0; k < 4; ++k) out[static_cast<std::size_t>(k)] = trace(m * pauli(k)) / 2.0;
    return out;
}

CMat2 pauli_reconstruct(const std::array<cplx, 4> &c) {
    CMat2 out;
    for (int k = 0; k < 4; ++k) out += pauli(k) * c[static_cast<std::size_t>(k)];
    return out;
}

HermitianEigen<4> herm_eig(const CMat4 &m) { return jacobi_eig(m); }
HermitianEigen<2> herm_eig(const CMat2 &m) { return jacobi_eig(m); }

Vec3 matvec(const RMat3 &m, const Vec3 &v) {
    Vec3 out{};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) out[i] += m(i, j) * v[j];
    return out;
}

double dot(const Vec3 &a, const Vec3 &b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm2(const Vec3 &v) { return dot(v, v); }

double det(const RMat3 &m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

RMat3 adjugate(const RMat3 &m) {
    RMat3 cof;
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const std::size_t i1 = (i + 1) % 3, i2 = (i + 2) % 3;
            const std::size_t j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            // Cyclic index choice absorbs the (-1)^(i+j) sign.
            cof(i, j) = m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1);
        }
    }
    return transpose(cof);
}

RMat3 diag(const Vec3 &v) {
    RMat3 out;
    for (std::size_t k = 0; k < 3; ++k) out(k, k) = v[k];
    return out;
}

Svd3 svd(const RMat3 &m) {
    // One-sided (Hestenes) Jacobi: rotate columns of W = M V until mutually orthogonal.
    RMat3 w = m;
    RMat3 v = RMat3::identity();
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t j = i + 1; j < 3; ++j) {
                double alpha = 0, beta = 0, gamma = 0;
                for (std::size_t k = 0; k < 3; ++k) {
                    alpha += w(k, i) * w(k, i);
                    beta += w(k, j) * w(k, j);
                    gamma += w(k, i) * w(k, j);
                }
                if (gamma == 0.0 || std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < 3; ++k) {
                    const double wi = w(k, i), wj = w(k, j);
                    w(k, i) = c * wi - s * wj;
                    w(k, j) = s * wi + c * wj;
                    const double vi = v(k, i), vj = v(k, j);
                    v(k, i) = c * vi - s * vj;
                    v(k, j) = s * vi + c * vj;
                }
            }
        }
        if (!rotated) break;
    }

    std::array<double, 3> sv;
    for (std::size_t k = 0; k < 3; ++k) sv[k] = std::sqrt(norm2(column(w, k)));
    std::array<std::size_t, 3> order{0, 1, 2};
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return sv[a] > sv[b]; });

    Svd3 out;
    const double smax = sv[order[0]];
    std::array<bool, 3> have{};
    for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t src = order[k];
        out.s[k] = sv[src];
        for (std::size_t r = 0; r < 3; ++r) out.v(r, k) = v(r, src);
        if (sv[src] > 1e-14 * std::max(smax, 1e-300)) {
            for (std::size_t r = 0; r < 3; ++r) out.u(r, k) = w(r, src) / sv[src];
            have[k] = true;
        }
    }
    // Complete u on the numerical null space by Gram-Schmidt against the unit vectors.
    for (std::size_t k = 0; k < 3; ++k) {
        if (have[k]) continue;
        double best_norm = -1.0;
        Vec3 best{};
        for (std::size_t e = 0; e < 3; ++e) {
            Vec3 cand{};
            cand[e] = 1.0;
            for (std::size_t o = 0; o < 3; ++o) {
                if (!have[o]) continue;
                const Vec3 uo = column(out.u, o);
                const double proj = dot(cand, uo);
                for (std::size_t r = 0; r < 3; ++r) cand[r] -= proj * uo[r];
            }
            const double nn = norm2(cand);
            if (nn > best_norm) {
                best_norm = nn;
                best = cand;
            }
        }
        const double nrm = std::sqrt(best_norm);
        for (std::size_t r = 0; r < 3; ++r) out.u(r, k) = best[r] / nrm;
        have[k] = true;
    }
    return out;
}

}  // namespace qretro
