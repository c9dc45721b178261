#pragma once

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "qretro/mat.hpp"

namespace qretro {

/// Qubit density operator rho = (1 + r . sigma) / 2 stored by its Bloch vector.
class BlochState {
   public:
    /// The maximally mixed state.
    BlochState() = default;
    /// Throws InvalidArgument if |r| > 1 + 1e-12 or r is not finite.
    explicit BlochState(const Vec3 &r);

    static BlochState maximally_mixed() { return BlochState(); }
    /// Throws InvalidArgument unless `rho` is Hermitian with unit trace.
    static BlochState from_matrix(const CMat2 &rho);

    const Vec3 &r() const { return r_; }
    /// Squared Bloch radius |r|^2.
    double t() const { return norm2(r_); }
    CMat2 matrix() const;
    double purity() const { return 0.5 * (1.0 + t()); }

   private:
    Vec3 r_{};
};

/// Mixture of Pauli conjugations, P(w) = sum_i p_i sigma_i w sigma_i.
class PauliChannel {
   public:
    /// Throws InvalidArgument unless p_i >= -1e-12 and sum p_i = 1 to 1e-12.
    explicit PauliChannel(const std::array<double, 4> &p);

    /// Inverse of the eigenvalue map; throws InvalidArgument if the result is not a probability vector.
    static PauliChannel from_lambda(const Vec3 &lambda);
    /// (1 - p) w + p/3 sum_i sigma_i w sigma_i.
    static PauliChannel depolarizing(double p);
    /// q^2 w + pq X w X + p^2 Y w Y + pq Z w Z with q = 1 - p.
    static PauliChannel bb84(double p);

    const std::array<double, 4> &p() const { return p_; }
    /// lambda_i = p_0 + p_i - p_j - p_k, the eigenvalue of sigma_i.
    Vec3 lambda() const;
    /// Number of entries with p_i > eps.
    int support_size(double eps = 1e-12) const;

    CMat2 apply(const CMat2 &w) const;

   private:
    std::array<double, 4> p_;
};

using KrausSet = std::vector<CMat2>;

/// A Hermiticity-preserving qubit map held in exactly one of four representations.
///
/// Conventions:
///   choi        C[N] = sum_ij |i><j| (x) N(|i><j|)
///   jamiolkowski J[N] = (id (x) N)(SWAP) = partial transpose of C[N] on the first factor
///   ptm         R_mk = Tr(sigma_m N(sigma_k)) / 2
class ChannelRep {
   public:
    enum class Kind { kraus, choi, jamiolkowski, ptm };

    static ChannelRep identity();
    static ChannelRep from_kraus(KrausSet ops);
    /// Throws NotHermitian for non-Hermitian input.
    static ChannelRep from_choi(const CMat4 &choi);
    static ChannelRep from_jamiolkowski(const CMat4 &jam);
    static ChannelRep from_ptm(const RMat4 &ptm);
    static ChannelRep from_pauli(const PauliChannel &p);
    /// w -> U w U^dagger.
    static ChannelRep unitary(const CMat2 &u);

    Kind kind() const;
    std::string kind_name() const;

    RMat4 ptm() const;
    CMat4 choi() const;
    CMat4 jamiolkowski() const;
    /// Stored operators for Kraus form; otherwise extracted from the Choi matrix
    /// (throws NotPSD when the map is not completely positive).
    KrausSet kraus() const;

    bool is_trace_preserving(double tol = 1e-10) const;
    bool is_unital(double tol = 1e-10) const;

   private:
    struct Choi {
        CMat4 m;
    };
    struct Jam {
        CMat4 m;
    };
    using Storage = std::variant<KrausSet, Choi, Jam, RMat4>;

    explicit ChannelRep(Storage s) : rep_(std::move(s)) {}
    Storage rep_;
};

/// Channel action on an arbitrary 2x2 operator.
CMat2 apply_operator(const ChannelRep &ch, const CMat2 &w);

/// Channel action on a state. Throws InternalCPViolation if the image leaves the Bloch ball by more than 1e-10.
BlochState apply(const ChannelRep &ch, const BlochState &s);

CMat4 jamiolkowski(const ChannelRep &ch);
/// Partial transpose on the first factor; maps J[N] to C[N] and back.
CMat4 choi_from_jam(const CMat4 &jam);
CMat4 jam_from_choi(const CMat4 &choi);

/// Hilbert-Schmidt adjoint. Kraus operators are conjugate-transposed, PTMs transposed.
ChannelRep adjoint(const ChannelRep &ch);

/// f after g; PTM(result) = PTM(f) * PTM(g). Kraus inputs stay in Kraus form.
ChannelRep compose(const ChannelRep &f, const ChannelRep &g);

/// Minimum Choi eigenvalue >= -tol and PTM row 0 equal to (1, 0, 0, 0) within tol.
bool is_cptp(const ChannelRep &ch, double tol = 1e-10);

/// Complete positivity of the PTM-diagonal unital map diag(1, l1, l2, l3):
/// |l1 + l2| <= 1 + l3 and |l1 - l2| <= 1 - l3.
bool fujiwara_algoet(const Vec3 &lambda, double tol = 0.0);

/// Kraus operators from the eigendecomposition of a Choi matrix, ordered by descending eigenvalue.
/// Eigenvalues below 1e-12 are dropped. Throws NotPSD if the smallest eigenvalue is below -tol.
KrausSet kraus_from_choi(const CMat4 &choi, double tol = 1e-9);

/// 3x3 rotation block of the PTM of w -> U w U^dagger.
RMat3 rotation_of_unitary(const CMat2 &u);
/// SU(2) lift of a proper rotation, with non-negative trace.
CMat2 unitary_of_rotation(const RMat3 &rot);

/// ch = Ad(left) o pauli o Ad(right), where Ad(U)(w) = U w U^dagger.
struct UnitalDecomposition {
    CMat2 left;
    PauliChannel pauli;
    CMat2 right;
};

/// Unitary-equivalence reduction of a unital qubit channel to a Pauli channel.
/// Throws NotUnital or NotCPTP.
UnitalDecomposition unital_to_pauli(const ChannelRep &ch, double tol = 1e-9);

/// Given an inverse `f` of the Pauli-reduced problem, returns V^dagger o f o U^dagger.
ChannelRep transport_inverse(const CMat2 &u, const CMat2 &v, const ChannelRep &f);

}  // namespace qretro
