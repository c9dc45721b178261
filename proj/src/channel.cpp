#include "qretro/channel.hpp"

#include <cmath>
#include <numeric>

#include "qretro/errors.hpp"

namespace qretro {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

CMat2 choi_block(const CMat4 &c, std::size_t i, std::size_t j) {
    CMat2 b;
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t d = 0; d < 2; ++d) b(a, d) = c(2 * i + a, 2 * j + d);
    return b;
}

CMat2 apply_via_choi(const CMat4 &c, const CMat2 &w) {
    CMat2 out;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            if (w(i, j) != cplx(0.0)) out += choi_block(c, i, j) * w(i, j);
    return out;
}

CMat2 apply_via_ptm(const RMat4 &r, const CMat2 &w) {
    const auto in = pauli_expand(w);
    std::array<cplx, 4> out{};
    for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t k = 0; k < 4; ++k) out[m] += r(m, k) * in[k];
    return pauli_reconstruct(out);
}

CMat4 choi_from_kraus(const KrausSet &ops) {
    CMat4 c;
    for (const auto &k : ops)
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j)
                for (std::size_t a = 0; a < 2; ++a)
                    for (std::size_t b = 0; b < 2; ++b) c(2 * i + a, 2 * j + b) += k(a, i) * std::conj(k(b, j));
    return c;
}

RMat4 ptm_from_action(const ChannelRep &ch) {
    RMat4 r;
    for (int k = 0; k < 4; ++k) {
        const CMat2 img = apply_operator(ch, pauli(k));
        for (int m = 0; m < 4; ++m)
            r(static_cast<std::size_t>(m), static_cast<std::size_t>(k)) = (trace(pauli(m) * img) / 2.0).real();
    }
    return r;
}

CMat4 choi_from_ptm(const RMat4 &r) {
    CMat4 c;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            CMat2 unit;
            unit(i, j) = 1.0;
            const CMat2 img = apply_via_ptm(r, unit);
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 2; ++b) c(2 * i + a, 2 * j + b) = img(a, b);
        }
    return c;
}

}  // namespace

// ---------------- BlochState ----------------

BlochState::BlochState(const Vec3 &r) : r_(r) {
    for (double x : r)
        if (!std::isfinite(x)) throw InvalidArgument("Bloch vector has non-finite component");
    if (std::sqrt(norm2(r)) > 1.0 + 1e-12)
        throw InvalidArgument("Bloch vector outside the unit ball: |r| = " + std::to_string(std::sqrt(norm2(r))));
}

BlochState BlochState::from_matrix(const CMat2 &rho) {
    if (!is_hermitian(rho, 1e-10)) throw InvalidArgument("state matrix is not Hermitian");
    const auto c = pauli_expand(rho);
    if (std::abs(c[0] - cplx(0.5)) > 1e-10) throw InvalidArgument("state matrix does not have unit trace");
    return BlochState(Vec3{2.0 * c[1].real(), 2.0 * c[2].real(), 2.0 * c[3].real()});
}

CMat2 BlochState::matrix() const {
    return pauli_reconstruct(std::array<cplx, 4>{0.5, 0.5 * r_[0], 0.5 * r_[1], 0.5 * r_[2]});
}

// ---------------- PauliChannel ----------------

PauliChannel::PauliChannel(const std::array<double, 4> &p) : p_(p) {
    double total = 0.0;
    for (double x : p) {
        if (!std::isfinite(x) || x < -1e-12) throw InvalidArgument("Pauli probabilities must be non-negative");
        total += x;
    }
    if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("Pauli probabilities must sum to 1");
    for (double &x : p_) x = std::max(x, 0.0);
}

PauliChannel PauliChannel::from_lambda(const Vec3 &l) {
    return PauliChannel({(1 + l[0] + l[1] + l[2]) / 4, (1 + l[0] - l[1] - l[2]) / 4, (1 - l[0] + l[1] - l[2]) / 4,
                         (1 - l[0] - l[1] + l[2]) / 4});
}

PauliChannel PauliChannel::depolarizing(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("depolarizing parameter must lie in [0, 1]");
    return PauliChannel({1.0 - p, p / 3.0, p / 3.0, p / 3.0});
}

PauliChannel PauliChannel::bb84(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("BB84 parameter must lie in [0, 1]");
    const double q = 1.0 - p;
    return PauliChannel({q * q, p * q, p * p, p * q});
}

Vec3 PauliChannel::lambda() const {
    return {p_[0] + p_[1] - p_[2] - p_[3], p_[0] + p_[2] - p_[1] - p_[3], p_[0] + p_[3] - p_[1] - p_[2]};
}

int PauliChannel::support_size(double eps) const {
    return static_cast<int>(std::count_if(p_.begin(), p_.end(), [eps](double x) { return x > eps; }));
}

CMat2 PauliChannel::apply(const CMat2 &w) const {
    CMat2 out;
    for (int k = 0; k < 4; ++k)
        if (p_[static_cast<std::size_t>(k)] != 0.0) out += pauli(k) * w * pauli(k) * cplx(p_[static_cast<std::size_t>(k)]);
    return out;
}

// ---------------- ChannelRep ----------------

ChannelRep ChannelRep::identity() { return from_kraus({CMat2::identity()}); }

ChannelRep ChannelRep::from_kraus(KrausSet ops) {
    if (ops.empty()) throw InvalidArgument("Kraus set must not be empty");
    return ChannelRep(Storage(std::move(ops)));
}

ChannelRep ChannelRep::from_choi(const CMat4 &choi) {
    if (!is_hermitian(choi, 1e-10)) throw NotHermitian("Choi matrix is not Hermitian");
    return ChannelRep(Storage(Choi{choi}));
}

ChannelRep ChannelRep::from_jamiolkowski(const CMat4 &jam) {
    if (!is_hermitian(jam, 1e-10)) throw NotHermitian("Jamiolkowski operator is not Hermitian");
    return ChannelRep(Storage(Jam{jam}));
}

ChannelRep ChannelRep::from_ptm(const RMat4 &ptm) {
    if (!all_finite(ptm)) throw InvalidArgument("PTM has non-finite entries");
    return ChannelRep(Storage(ptm));
}

ChannelRep ChannelRep::from_pauli(const PauliChannel &p) {
    const Vec3 l = p.lambda();
    RMat4 r;
    r(0, 0) = 1.0;
    for (std::size_t k = 0; k < 3; ++k) r(k + 1, k + 1) = l[k];
    return from_ptm(r);
}

ChannelRep ChannelRep::unitary(const CMat2 &u) {
    if (max_abs_diff(u * dagger(u), CMat2::identity()) > 1e-10) throw InvalidArgument("operator is not unitary");
    return from_kraus({u});
}

ChannelRep::Kind ChannelRep::kind() const {
    return std::visit(overloaded{[](const KrausSet &) { return Kind::kraus; },
                                 [](const Choi &) { return Kind::choi; },
                                 [](const Jam &) { return Kind::jamiolkowski; },
                                 [](const RMat4 &) { return Kind::ptm; }},
                      rep_);
}

std::string ChannelRep::kind_name() const {
    switch (kind()) {
        case Kind::kraus:
            return "kraus";
        case Kind::choi:
            return "choi";
        case Kind::jamiolkowski:
            return "jamiolkowski";
        case Kind::ptm:
            return "ptm";
    }
    return "unknown";
}

RMat4 ChannelRep::ptm() const {
    if (const auto *r = std::get_if<RMat4>(&rep_)) return *r;
    return ptm_from_action(*this);
}

CMat4 ChannelRep::choi() const {
    return std::visit(overloaded{[](const KrausSet &k) { return choi_from_kraus(k); },
                                 [](const Choi &c) { return c.m; },
                                 [](const Jam &j) { return choi_from_jam(j.m); },
                                 [](const RMat4 &r) { return choi_from_ptm(r); }},
                      rep_);
}

CMat4 ChannelRep::jamiolkowski() const {
    if (const auto *j = std::get_if<Jam>(&rep_)) return j->m;
    return jam_from_choi(choi());
}

KrausSet ChannelRep::kraus() const {
    if (const auto *k = std::get_if<KrausSet>(&rep_)) return *k;
    return kraus_from_choi(choi());
}

bool ChannelRep::is_trace_preserving(double tol) const {
    const RMat4 r = ptm();
    return std::abs(r(0, 0) - 1.0) <= tol && std::abs(r(0, 1)) <= tol && std::abs(r(0, 2)) <= tol &&
           std::abs(r(0, 3)) <= tol;
}

bool ChannelRep::is_unital(double tol) const {
    const RMat4 r = ptm();
    return std::abs(r(0, 0) - 1.0) <= tol && std::abs(r(1, 0)) <= tol && std::abs(r(2, 0)) <= tol &&
           std::abs(r(3, 0)) <= tol;
}

// ---------------- free functions ----------------

CMat2 apply_operator(const ChannelRep &ch, const CMat2 &w) {
    switch (ch.kind()) {
        case ChannelRep::Kind::kraus: {
            CMat2 out;
            for (const auto &k : ch.kraus()) out += k * w * dagger(k);
            return out;
        }
        case ChannelRep::Kind::ptm:
            return apply_via_ptm(ch.ptm(), w);
        default:
            return apply_via_choi(ch.choi(), w);
    }
}

BlochState apply(const ChannelRep &ch, const BlochState &s) {
    const auto c = pauli_expand(apply_operator(ch, s.matrix()));
    // Trace is restored exactly; only the Bloch part carries channel error.
    const Vec3 r{2.0 * c[1].real(), 2.0 * c[2].real(), 2.0 * c[3].real()};
    const double len = std::sqrt(norm2(r));
    if (!std::isfinite(len) || len > 1.0 + 1e-10)
        throw InternalCPViolation("channel output leaves the Bloch ball: |r| = " + std::to_string(len));
    if (len > 1.0) return BlochState(Vec3{r[0] / len, r[1] / len, r[2] / len});
    return BlochState(r);
}

CMat4 jamiolkowski(const ChannelRep &ch) { return ch.jamiolkowski(); }

CMat4 choi_from_jam(const CMat4 &jam) { return partial_transpose(jam, Subsystem::first); }

CMat4 jam_from_choi(const CMat4 &choi) { return partial_transpose(choi, Subsystem::first); }

ChannelRep adjoint(const ChannelRep &ch) {
    switch (ch.kind()) {
        case ChannelRep::Kind::kraus: {
            KrausSet out;
            for (const auto &k : ch.kraus()) out.push_back(dagger(k));
            return ChannelRep::from_kraus(std::move(out));
        }
        case ChannelRep::Kind::ptm:
            return ChannelRep::from_ptm(transpose(ch.ptm()));
        case ChannelRep::Kind::choi:
            return ChannelRep::from_choi(choi_from_ptm(transpose(ch.ptm())));
        case ChannelRep::Kind::jamiolkowski:
            return ChannelRep::from_jamiolkowski(jam_from_choi(choi_from_ptm(transpose(ch.ptm()))));
    }
    throw InvalidArgument("unknown channel representation");
}

ChannelRep compose(const ChannelRep &f, const ChannelRep &g) {
    if (f.kind() == ChannelRep::Kind::kraus && g.kind() == ChannelRep::Kind::kraus) {
        KrausSet out;
        for (const auto &a : f.kraus())
            for (const auto &b : g.kraus()) out.push_back(a * b);
        return ChannelRep::from_kraus(std::move(out));
    }
    return ChannelRep::from_ptm(f.ptm() * g.ptm());
}

bool is_cptp(const ChannelRep &ch, double tol) {
    if (!ch.is_trace_preserving(tol)) return false;
    const CMat4 c = ch.choi();
    if (!is_hermitian(c, 1e-10)) return false;
    return herm_eig(c).values[0] >= -tol;
}

bool fujiwara_algoet(const Vec3 &l, double tol) {
    return std::abs(l[0] + l[1]) <= std::abs(1.0 + l[2]) + tol && std::abs(l[0] - l[1]) <= std::abs(1.0 - l[2]) + tol;
}

KrausSet kraus_from_choi(const CMat4 &choi, double tol) {
    const auto eig = herm_eig(choi);
    if (eig.values[0] < -tol)
        throw NotPSD("Choi matrix has eigenvalue " + std::to_string(eig.values[0]) + " below -tol");
    KrausSet out;
    for (int k = 3; k >= 0; --k) {
        const double mu = eig.values[static_cast<std::size_t>(k)];
        if (mu < 1e-12) continue;
        const double amp = std::sqrt(mu);
        CMat2 op;
        // |K> = sum_i |i> (x) K|i>, so component (i, a) holds K(a, i).
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t a = 0; a < 2; ++a) op(a, i) = amp * eig.vectors(2 * i + a, static_cast<std::size_t>(k));
        out.push_back(op);
    }
    if (out.empty()) throw NotPSD("Choi matrix has no eigenvalue above the rank threshold");
    return out;
}

RMat3 rotation_of_unitary(const CMat2 &u) {
    RMat3 rot;
    for (int j = 1; j <= 3; ++j) {
        const CMat2 img = u * pauli(j) * dagger(u);
        for (int i = 1; i <= 3; ++i)
            rot(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) = (trace(pauli(i) * img) / 2.0).real();
    }
    return rot;
}

CMat2 unitary_of_rotation(const RMat3 &m) {
    // Quaternion (w, x, y, z) with U = w 1 - i (x X + y Y + z Z); branch on the largest component.
    const double tr = m(0, 0) + m(1, 1) + m(2, 2);
    double w, x, y, z;
    if (tr > m(0, 0) && tr > m(1, 1) && tr > m(2, 2)) {
        const double s = 2.0 * std::sqrt(std::max(0.0, 1.0 + tr));
        w = 0.25 * s;
        x = (m(2, 1) - m(1, 2)) / s;
        y = (m(0, 2) - m(2, 0)) / s;
        z = (m(1, 0) - m(0, 1)) / s;
    } else if (m(0, 0) >= m(1, 1) && m(0, 0) >= m(2, 2)) {
        const double s = 2.0 * std::sqrt(std::max(0.0, 1.0 + m(0, 0) - m(1, 1) - m(2, 2)));
        w = (m(2, 1) - m(1, 2)) / s;
        x = 0.25 * s;
        y = (m(0, 1) + m(1, 0)) / s;
        z = (m(0, 2) + m(2, 0)) / s;
    } else if (m(1, 1) >= m(2, 2)) {
        const double s = 2.0 * std::sqrt(std::max(0.0, 1.0 + m(1, 1) - m(0, 0) - m(2, 2)));
        w = (m(0, 2) - m(2, 0)) / s;
        x = (m(0, 1) + m(1, 0)) / s;
        y = 0.25 * s;
        z = (m(1, 2) + m(2, 1)) / s;
    } else {
        const double s = 2.0 * std::sqrt(std::max(0.0, 1.0 + m(2, 2) - m(0, 0) - m(1, 1)));
        w = (m(1, 0) - m(0, 1)) / s;
        x = (m(0, 2) + m(2, 0)) / s;
        y = (m(1, 2) + m(2, 1)) / s;
        z = 0.25 * s;
    }
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n, x /= n, y /= n, z /= n;
    if (w < 0) w = -w, x = -x, y = -y, z = -z;
    const cplx i{0.0, 1.0};
    return CMat2::identity() * cplx(w) - i * (pauli(1) * cplx(x) + pauli(2) * cplx(y) + pauli(3) * cplx(z));
}

UnitalDecomposition unital_to_pauli(const ChannelRep &ch, double tol) {
    const RMat4 r = ch.ptm();
    if (!ch.is_unital(tol)) {
        std::string msg = "channel is not unital: PTM column 0 = (";
        for (std::size_t k = 0; k < 4; ++k) msg += std::to_string(r(k, 0)) + (k < 3 ? ", " : ")");
        throw NotUnital(msg);
    }
    if (!is_cptp(ch, tol)) throw NotCPTP("channel is not completely positive and trace preserving");

    RMat3 block;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) block(i, j) = r(i + 1, j + 1);
    Svd3 d = svd(block);
    // Fold improper factors into the last singular value so both factors are proper rotations.
    if (det(d.u) < 0) {
        for (std::size_t k = 0; k < 3; ++k) d.u(k, 2) = -d.u(k, 2);
        d.s[2] = -d.s[2];
    }
    if (det(d.v) < 0) {
        for (std::size_t k = 0; k < 3; ++k) d.v(k, 2) = -d.v(k, 2);
        d.s[2] = -d.s[2];
    }

    Vec3 l = d.s;
    std::array<double, 4> p{(1 + l[0] + l[1] + l[2]) / 4, (1 + l[0] - l[1] - l[2]) / 4,
                            (1 - l[0] + l[1] - l[2]) / 4, (1 - l[0] - l[1] + l[2]) / 4};
    double total = 0.0;
    for (double &x : p) {
        if (x < -tol) throw NotCPTP("Pauli reduction produced a negative probability");
        x = std::max(x, 0.0);
        total += x;
    }
    for (double &x : p) x /= total;

    return UnitalDecomposition{unitary_of_rotation(d.u), PauliChannel(p), unitary_of_rotation(transpose(d.v))};
}

ChannelRep transport_inverse(const CMat2 &u, const CMat2 &v, const ChannelRep &f) {
    return compose(ChannelRep::unitary(dagger(v)), compose(f, ChannelRep::unitary(dagger(u))));
}

}  // namespace qretro
