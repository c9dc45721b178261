#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>

#include "qretro/channel.hpp"
#include "qretro/mat.hpp"

namespace qretro {

/// Default acceptance threshold for feasibility slacks and Bayes residuals.
inline constexpr double kDefaultTol = 1e-9;

/// Hermitian, unit-trace two-time operator N*w = {w (x) 1, J[N]} / 2. Not necessarily positive.
struct PseudoDensityMatrix {
    CMat4 m;
};

PseudoDensityMatrix star_product(const ChannelRep &ch, const BlochState &s);

/// <sigma_i, sigma_j> = Tr(pdm (sigma_i (x) sigma_j)), i, j in 1..3.
double two_time_expectation(const PseudoDensityMatrix &pdm, int i, int j);

/// Tr(E(P+ rho P+) sigma_b) - Tr(E(P- rho P-) sigma_b), with P+- the eigenprojectors of sigma_a; a, b in 1..3.
double two_time_projector(const BlochState &s, const ChannelRep &ch, int a, int b);

/// table[a-1][b-1] = <sigma_a, sigma_b> for the dynamics (s, ch), via the projector formula.
using TwoTimeTable = std::array<std::array<double, 3>, 3>;
TwoTimeTable two_time_table(const BlochState &s, const ChannelRep &ch);

/// Max over the nine Pauli pairs of |<a,b>_(rho,E) - <b,a>_(E(rho),F)|.
double time_reversal_discrepancy(const ChannelRep &e, const BlochState &s, const ChannelRep &f);

/// Max-entry difference between the two sides of {E(rho) (x) 1, J[F]} = {1 (x) rho, J[E^dagger]}.
double bayes_residual(const ChannelRep &e, const BlochState &s, const ChannelRep &f);

/// Smallest k in 0..3 with P(rho) = sigma_k rho sigma_k, or nullopt.
///
/// Classification follows the support of the probability vector: the maximally mixed state is
/// always unscathed; with three or more non-zero p_i nothing else is; with two non-zero entries
/// {p_0, p_i} or {p_j, p_k} exactly the states on axis i are; a unitary channel leaves every
/// state unscathed.
std::optional<int> is_unscathed(const PauliChannel &p, const BlochState &s);

/// Whether the adjoint P^dagger = P is a Bayesian inverse of P with respect to s.
bool adjoint_is_inverse(const PauliChannel &p, const BlochState &s);

/// Max-entry residual |P(rho) - sigma_k rho sigma_k| for k = 0..3.
std::array<double, 4> unscathed_residuals(const PauliChannel &p, const BlochState &s);

struct FeasibilityReport {
    Vec3 v{};
    RMat3 R{};
    double eta = 0.0;
    double detR = 0.0;
    double normRv2 = 0.0;
    double normAdjR2 = 0.0;
    /// (3 - eta, 1 - 2 det R - eta, (eta - 1)^2 - 8 det R - 4 (|Rv|^2 + |adj R|^2)).
    std::array<double, 3> slack{};
    bool feasible = false;
    double tol = kDefaultTol;
    /// Smallest eigenvalue of the trace-normalised Choi matrix, kept for cross-checking.
    double min_choi_eigenvalue = 0.0;

    /// Index of the most violated inequality, if any.
    std::optional<int> failed_inequality() const;
};

/// Positivity test of a trace-preserving qubit Choi matrix through its Bloch block form.
/// The matrix is normalised to unit trace, w_ij = Tr[C (sigma_i (x) sigma_j)], v = w_0., R = w_ij (i, j >= 1).
FeasibilityReport gamel_report(const CMat4 &choi, double tol = kDefaultTol);

enum class InverseRoute { analytic, adjoint };

struct InverseRecord {
    /// Coefficients of J[F] normalised so that J[F] = (1/2) sum a_ij sigma_i (x) sigma_j; a_00 = 1.
    PauliCoeffs a;
    /// sum lambda_i^2 r_i^2 of the Pauli-reduced problem.
    double S = 0.0;
    CMat4 choi;
    /// Filled only when the inverse is completely positive.
    KrausSet kraus;
    FeasibilityReport report;
    InverseRoute route = InverseRoute::analytic;
    /// False when E(rho) is rank deficient and Bayes' rule has other solutions.
    bool unique = true;
    double residual = 0.0;

    /// Kraus form when available, otherwise the Choi matrix.
    ChannelRep channel() const;
};

/// Closed-form solution of Bayes' rule for a Pauli channel with all |lambda_i| < 1.
/// Throws EigenvalueOnBoundary (some |lambda_i| >= 1 - 1e-12) or SingularS (S >= 1 - 1e-12).
InverseRecord analytic_inverse(const PauliChannel &p, const BlochState &s, double tol = kDefaultTol);

struct AnticommutatorSolution {
    CMat4 x;
    bool unique = true;
};

/// Solves {M (x) 1, X} = B for X with M Hermitian PSD. In the eigenbasis of M the
/// (k, l) block is B_kl / (m_k + m_l). Throws RankDeficient when m_k + m_l <= 1e-12 and
/// B_kl != 0; a zero B_kl there yields the minimal-norm block and unique = false.
AnticommutatorSolution solve_anticommutator(const CMat2 &m, const CMat4 &b);

struct NoInverse {
    enum class Reason { not_unscathed, infeasible, verification_failed };
    Reason reason = Reason::infeasible;
    std::string message;
    /// Present for the analytic route (which inequality failed) and for verification failures.
    std::optional<FeasibilityReport> report;
    /// Residuals of P(rho) = sigma_k rho sigma_k for the Pauli-reduced problem.
    std::array<double, 4> unscathed_residuals{};
    Vec3 lambda{};
};

std::string to_string(NoInverse::Reason r);

using InversionResult = std::variant<InverseRecord, NoInverse>;

/// Pauli-level verdict without building Kraus operators.
struct PauliVerdict {
    bool feasible = false;
    InverseRoute route = InverseRoute::analytic;
    std::optional<int> unscathed_index;
    /// Analytic route: the candidate's report. Adjoint route: report of the formula
    /// solution when S < 1 (diagnostic), else of the adjoint.
    FeasibilityReport report;
};

/// Routes |lambda_i| >= 1 - 1e-12 through the unscathed test, everything else through the
/// closed-form candidate and its positivity slacks.
PauliVerdict decide_pauli(const PauliChannel &p, const BlochState &s, double tol = kDefaultTol);

/// Full pipeline for a unital CPTP channel: Pauli reduction, decision, construction, transport
/// back, and verification (is_cptp and bayes_residual <= tol).
InversionResult bayesian_inverse(const ChannelRep &e, const BlochState &s, double tol = kDefaultTol);

}  // namespace qretro
