#include "qretro/bayes.hpp"

#include <cmath>
#include <string>

#include "qretro/errors.hpp"

namespace qretro {

namespace {

constexpr double kBoundaryEps = 1e-12;
constexpr double kProbSupportEps = 1e-12;
constexpr double kBlochSupportEps = 1e-10;

void check_pauli_index(int k, const char *what) {
    if (k < 1 || k > 3) throw InvalidArgument(std::string(what) + ": Pauli index must be in 1..3");
}

/// Sign of sigma_k rho sigma_k on Bloch axis i (k = 0..3, i = 1..3).
double conjugation_sign(int k, int i) { return (k == 0 || k == i) ? 1.0 : -1.0; }

double sum_lambda2_r2(const Vec3 &l, const Vec3 &r) {
    return l[0] * l[0] * r[0] * r[0] + l[1] * l[1] * r[1] * r[1] + l[2] * l[2] * r[2] * r[2];
}

/// Doubled Pauli coefficients of the closed-form solution of Bayes' rule.
PauliCoeffs formula_coefficients(const Vec3 &l, const Vec3 &r, double S) {
    PauliCoeffs a;
    a(0, 0) = 1.0;
    for (int j = 1; j <= 3; ++j) {
        const double lj = l[static_cast<std::size_t>(j - 1)];
        a(0, j) = r[static_cast<std::size_t>(j - 1)] * (1.0 - lj * lj) / (1.0 - S);
    }
    for (int i = 1; i <= 3; ++i) {
        const double li = l[static_cast<std::size_t>(i - 1)];
        const double ri = r[static_cast<std::size_t>(i - 1)];
        for (int j = 1; j <= 3; ++j) a(i, j) = (i == j ? li : 0.0) - li * ri * a(0, j);
    }
    return a;
}

CMat4 jam_from_doubled_coeffs(const PauliCoeffs &a) {
    PauliCoeffs half = a;
    half.a *= 0.5;
    return pauli_reconstruct(half);
}

PauliCoeffs doubled_coeffs_of_jam(const CMat4 &jam) {
    PauliCoeffs a = pauli_expand(jam);
    a.a *= 2.0;
    return a;
}

KrausSet pauli_kraus(const PauliChannel &p) {
    KrausSet out;
    for (int k = 0; k < 4; ++k) {
        const double pk = p.p()[static_cast<std::size_t>(k)];
        if (pk > 0.0) out.push_back(pauli(k) * cplx(std::sqrt(pk)));
    }
    return out;
}

bool on_boundary(const Vec3 &l) {
    for (double x : l)
        if (std::abs(x) >= 1.0 - kBoundaryEps) return true;
    return false;
}

}  // namespace

// ---------------- two-time quantities ----------------

PseudoDensityMatrix star_product(const ChannelRep &ch, const BlochState &s) {
    const CMat4 lhs = tensor(s.matrix(), CMat2::identity());
    return PseudoDensityMatrix{anticommutator(lhs, ch.jamiolkowski()) * cplx(0.5)};
}

double two_time_expectation(const PseudoDensityMatrix &pdm, int i, int j) {
    check_pauli_index(i, "two_time_expectation");
    check_pauli_index(j, "two_time_expectation");
    return trace(pdm.m * tensor(pauli(i), pauli(j))).real();
}

double two_time_projector(const BlochState &s, const ChannelRep &ch, int a, int b) {
    check_pauli_index(a, "two_time_projector");
    check_pauli_index(b, "two_time_projector");
    const CMat2 plus = (CMat2::identity() + pauli(a)) * cplx(0.5);
    const CMat2 minus = (CMat2::identity() - pauli(a)) * cplx(0.5);
    const CMat2 rho = s.matrix();
    const CMat2 up = apply_operator(ch, plus * rho * plus);
    const CMat2 down = apply_operator(ch, minus * rho * minus);
    return (trace(up * pauli(b)) - trace(down * pauli(b))).real();
}

TwoTimeTable two_time_table(const BlochState &s, const ChannelRep &ch) {
    TwoTimeTable t{};
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b)
            t[static_cast<std::size_t>(a - 1)][static_cast<std::size_t>(b - 1)] = two_time_projector(s, ch, a, b);
    return t;
}

double time_reversal_discrepancy(const ChannelRep &e, const BlochState &s, const ChannelRep &f) {
    const TwoTimeTable forward = two_time_table(s, e);
    const TwoTimeTable backward = two_time_table(apply(e, s), f);
    double worst = 0.0;
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t b = 0; b < 3; ++b) worst = std::max(worst, std::abs(forward[a][b] - backward[b][a]));
    return worst;
}

double bayes_residual(const ChannelRep &e, const BlochState &s, const ChannelRep &f) {
    const CMat2 image = apply_operator(e, s.matrix());
    const CMat4 lhs = anticommutator(tensor(image, CMat2::identity()), f.jamiolkowski());
    const CMat4 rhs = anticommutator(tensor(CMat2::identity(), s.matrix()), adjoint(e).jamiolkowski());
    return max_abs_diff(lhs, rhs);
}

// ---------------- unscathed classification ----------------

std::array<double, 4> unscathed_residuals(const PauliChannel &p, const BlochState &s) {
    const CMat2 rho = s.matrix();
    const CMat2 image = p.apply(rho);
    std::array<double, 4> out{};
    for (int k = 0; k < 4; ++k) out[static_cast<std::size_t>(k)] = max_abs_diff(image, pauli(k) * rho * pauli(k));
    return out;
}

std::optional<int> is_unscathed(const PauliChannel &p, const BlochState &s) {
    std::array<bool, 3> axis{};
    int naxes = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        axis[i] = std::abs(s.r()[i]) > kBlochSupportEps;
        naxes += axis[i] ? 1 : 0;
    }
    if (naxes == 0) return 0;

    std::array<int, 4> support{};
    int nsupport = 0;
    for (int k = 0; k < 4; ++k)
        if (p.p()[static_cast<std::size_t>(k)] > kProbSupportEps) support[static_cast<std::size_t>(nsupport++)] = k;

    if (nsupport >= 3) return std::nullopt;

    // Sign pattern the channel imposes on each occupied axis, then the smallest conjugation matching it.
    auto smallest_matching = [&](auto imposed_sign) -> std::optional<int> {
        for (int k = 0; k < 4; ++k) {
            bool ok = true;
            for (int i = 1; i <= 3 && ok; ++i)
                if (axis[static_cast<std::size_t>(i - 1)]) ok = conjugation_sign(k, i) == imposed_sign(i);
            if (ok) return k;
        }
        return std::nullopt;
    };

    if (nsupport == 1) {
        const int u = support[0];
        return smallest_matching([u](int i) { return conjugation_sign(u, i); });
    }

    // Two entries: {p_0, p_i} leaves axis i invariant, {p_j, p_k} flips the complementary axis.
    const int lo = support[0], hi = support[1];
    const int designated = (lo == 0) ? hi : 6 - lo - hi;
    for (int i = 1; i <= 3; ++i)
        if (axis[static_cast<std::size_t>(i - 1)] != (i == designated)) return std::nullopt;
    const double sign = (lo == 0) ? 1.0 : -1.0;
    return smallest_matching([sign](int) { return sign; });
}

bool adjoint_is_inverse(const PauliChannel &p, const BlochState &s) { return is_unscathed(p, s).has_value(); }

// ---------------- feasibility ----------------

std::optional<int> FeasibilityReport::failed_inequality() const {
    std::optional<int> worst;
    for (int k = 0; k < 3; ++k) {
        const double x = slack[static_cast<std::size_t>(k)];
        if (x < -tol && (!worst || x < slack[static_cast<std::size_t>(*worst)])) worst = k;
    }
    return worst;
}

FeasibilityReport gamel_report(const CMat4 &choi, double tol) {
    if (!is_hermitian(choi, 1e-10)) throw NotHermitian("gamel_report: Choi matrix is not Hermitian");
    const double tr = trace(choi).real();
    if (!(tr > 0.0)) throw InvalidArgument("gamel_report: Choi matrix has non-positive trace");
    const CMat4 state = choi * cplx(1.0 / tr);
    const PauliCoeffs c = pauli_expand(state);

    FeasibilityReport rep;
    rep.tol = tol;
    for (int j = 1; j <= 3; ++j) rep.v[static_cast<std::size_t>(j - 1)] = 4.0 * c(0, j);
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j)
            rep.R(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) = 4.0 * c(i, j);

    rep.eta = norm2(rep.v) + frobenius2(rep.R);
    rep.detR = det(rep.R);
    rep.normRv2 = norm2(matvec(rep.R, rep.v));
    rep.normAdjR2 = frobenius2(adjugate(rep.R));
    rep.slack = {3.0 - rep.eta, 1.0 - 2.0 * rep.detR - rep.eta,
                 (rep.eta - 1.0) * (rep.eta - 1.0) - 8.0 * rep.detR - 4.0 * (rep.normRv2 + rep.normAdjR2)};
    rep.feasible = rep.slack[0] >= -tol && rep.slack[1] >= -tol && rep.slack[2] >= -tol;
    rep.min_choi_eigenvalue = herm_eig(state).values[0];
    return rep;
}

// ---------------- inverses ----------------

ChannelRep InverseRecord::channel() const {
    if (!kraus.empty()) return ChannelRep::from_kraus(kraus);
    return ChannelRep::from_choi(choi);
}

InverseRecord analytic_inverse(const PauliChannel &p, const BlochState &s, double tol) {
    const Vec3 l = p.lambda();
    if (on_boundary(l))
        throw EigenvalueOnBoundary("analytic_inverse: some |lambda_i| >= 1 - 1e-12; use the unscathed path");
    const double S = sum_lambda2_r2(l, s.r());
    if (S >= 1.0 - kBoundaryEps) throw SingularS("analytic_inverse: S = " + std::to_string(S) + " too close to 1");

    InverseRecord rec;
    rec.route = InverseRoute::analytic;
    rec.S = S;
    rec.a = formula_coefficients(l, s.r(), S);
    const CMat4 jam = jam_from_doubled_coeffs(rec.a);
    rec.choi = choi_from_jam(jam);
    rec.report = gamel_report(rec.choi, tol);
    // E(rho) has Bloch length sqrt(S) < 1, hence full rank.
    rec.unique = true;
    if (rec.report.feasible) {
        try {
            rec.kraus = kraus_from_choi(rec.choi, tol);
        } catch (const NotPSD &) {
            rec.kraus.clear();
        }
    }
    rec.residual = bayes_residual(ChannelRep::from_pauli(p), s, ChannelRep::from_jamiolkowski(jam));
    return rec;
}

AnticommutatorSolution solve_anticommutator(const CMat2 &m, const CMat4 &b) {
    const auto eig = herm_eig(m);
    if (eig.values[0] < -1e-12) throw InvalidArgument("solve_anticommutator: M is not positive semidefinite");
    const CMat4 u = tensor(eig.vectors, CMat2::identity());
    const CMat4 bp = dagger(u) * b * u;

    AnticommutatorSolution sol;
    CMat4 xp;
    for (std::size_t k = 0; k < 2; ++k) {
        for (std::size_t l = 0; l < 2; ++l) {
            const double denom = eig.values[k] + eig.values[l];
            double block_size = 0.0;
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t c = 0; c < 2; ++c) block_size = std::max(block_size, std::abs(bp(2 * k + a, 2 * l + c)));
            if (denom <= 1e-12) {
                if (block_size > 1e-12)
                    throw RankDeficient("solve_anticommutator: no solution, B has weight on a null block of M");
                sol.unique = false;
                continue;
            }
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t c = 0; c < 2; ++c) xp(2 * k + a, 2 * l + c) = bp(2 * k + a, 2 * l + c) / denom;
        }
    }
    sol.x = u * xp * dagger(u);
    return sol;
}

std::string to_string(NoInverse::Reason r) {
    switch (r) {
        case NoInverse::Reason::not_unscathed:
            return "not-unscathed";
        case NoInverse::Reason::infeasible:
            return "infeasible";
        case NoInverse::Reason::verification_failed:
            return "verification-failed";
    }
    return "unknown";
}

PauliVerdict decide_pauli(const PauliChannel &p, const BlochState &s, double tol) {
    const Vec3 l = p.lambda();
    PauliVerdict out;
    if (!on_boundary(l)) {
        const double S = sum_lambda2_r2(l, s.r());
        const PauliCoeffs a = formula_coefficients(l, s.r(), S);
        out.route = InverseRoute::analytic;
        out.report = gamel_report(choi_from_jam(jam_from_doubled_coeffs(a)), tol);
        out.feasible = out.report.feasible;
        return out;
    }
    out.route = InverseRoute::adjoint;
    out.unscathed_index = is_unscathed(p, s);
    out.feasible = out.unscathed_index.has_value();
    const double S = sum_lambda2_r2(l, s.r());
    if (S < 1.0 - kBoundaryEps) {
        out.report = gamel_report(choi_from_jam(jam_from_doubled_coeffs(formula_coefficients(l, s.r(), S))), tol);
    } else {
        out.report = gamel_report(ChannelRep::from_pauli(p).choi(), tol);
    }
    return out;
}

InversionResult bayesian_inverse(const ChannelRep &e, const BlochState &s, double tol) {
    const UnitalDecomposition dec = unital_to_pauli(e, tol);
    const BlochState reduced = BlochState::from_matrix(dec.right * s.matrix() * dagger(dec.right));
    const PauliChannel &p = dec.pauli;
    const Vec3 l = p.lambda();

    NoInverse fail;
    fail.lambda = l;
    fail.unscathed_residuals = unscathed_residuals(p, reduced);

    InverseRecord rec;
    if (on_boundary(l)) {
        if (!is_unscathed(p, reduced)) {
            fail.reason = NoInverse::Reason::not_unscathed;
            fail.message = "state is not unscathed for a Pauli channel with an eigenvalue of modulus 1";
            return fail;
        }
        rec.route = InverseRoute::adjoint;
        rec.S = sum_lambda2_r2(l, reduced.r());
        rec.kraus = pauli_kraus(p);
        rec.unique = rec.S < 1.0 - kBoundaryEps;
        rec.report = gamel_report(ChannelRep::from_pauli(p).choi(), tol);
    } else {
        rec = analytic_inverse(p, reduced, tol);
        if (!rec.report.feasible) {
            fail.reason = NoInverse::Reason::infeasible;
            const int which = rec.report.failed_inequality().value_or(0);
            fail.message = "positivity inequality " + std::to_string(which + 1) + " violated";
            fail.report = rec.report;
            return fail;
        }
        if (rec.kraus.empty()) {
            fail.reason = NoInverse::Reason::verification_failed;
            fail.message = "inequalities hold within tolerance but the Choi matrix is not positive";
            fail.report = rec.report;
            return fail;
        }
    }

    const ChannelRep f = transport_inverse(dec.left, dec.right, ChannelRep::from_kraus(rec.kraus));
    rec.kraus = f.kraus();
    rec.choi = f.choi();
    rec.a = doubled_coeffs_of_jam(f.jamiolkowski());
    rec.residual = bayes_residual(e, s, f);
    if (!is_cptp(f, tol) || rec.residual > tol) {
        fail.reason = NoInverse::Reason::verification_failed;
        fail.message = "constructed inverse failed verification (residual " + std::to_string(rec.residual) + ")";
        fail.report = rec.report;
        return fail;
    }
    return rec;
}

}  // namespace qretro
