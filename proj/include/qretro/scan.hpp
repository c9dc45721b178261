#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qretro/bayes.hpp"
#include "qretro/mat.hpp"

namespace qretro {

/// Sampling grid over (p, t) with t = |r|^2 and r = sqrt(t) * direction.
struct ScanGrid {
    std::vector<double> p_axis;
    std::vector<double> t_axis;
    Vec3 direction{1.0, 0.0, 0.0};

    /// `resolution` evenly spaced points on [0, 1] for both axes.
    static ScanGrid uniform(int resolution, const Vec3 &direction = {1.0, 0.0, 0.0});

    /// Throws InvalidArgument unless both axes are strictly increasing in [0, 1]
    /// and the direction is a unit vector.
    void validate() const;
};

/// Diagonal Bloch ray used for the BB84 family.
inline Vec3 diagonal_direction() {
    const double c = 1.0 / std::sqrt(3.0);
    return {c, c, c};
}

struct RegionCell {
    double p = 0.0;
    double t = 0.0;
    bool feasible = false;
    std::array<double, 3> slack{};
    /// "inequality-k" or "not-unscathed" for infeasible cells.
    std::optional<std::string> witness;
};

/// Closed forms for the depolarizing channel with eigenvalue lambda at |r|^2 = t.
struct DepolarizingQuantities {
    double norm_v2;
    double norm_R2;
    double norm_Rv2;
    double det_R;
    double norm_adjR2;
};

/// Throws DomainError unless lambda in (-1, 1), t in [0, 1] and lambda^2 t < 1.
DepolarizingQuantities depolarizing_quantities(double lambda, double t);

/// Evaluates one Pauli-channel family over the grid; cells are row-major with p as the outer index.
/// `threads` = 0 uses the hardware concurrency.
std::vector<RegionCell> scan_depolarizing(const ScanGrid &grid, double tol = kDefaultTol, unsigned threads = 0);
std::vector<RegionCell> scan_bb84(const ScanGrid &grid, double tol = kDefaultTol, unsigned threads = 0);

RegionCell evaluate_cell(const PauliChannel &channel, double p, double t, const Vec3 &direction, double tol);

struct ChiEstimate {
    double chi = 0.0;
    /// False when feasibility was not monotone in t; chi is then the largest feasible grid t.
    bool monotone = true;
    int bisection_steps = 0;
};

/// Largest t with the depolarizing channel at parameter p invertible for all |r|^2 <= t.
/// Throws DomainError unless p in (0, 1).
ChiEstimate boundary_chi(double p, double tol = 1e-10, double feasibility_tol = kDefaultTol, int check_points = 201);

struct ThreeEntryHit {
    std::array<double, 4> p;
    Vec3 r;
    double residual;
};

struct ThreeEntrySummary {
    int resolution = 0;
    int channels = 0;
    int bloch_samples = 0;
    std::uint64_t seed = 0;
    long cells = 0;
    /// Channels whose maximally mixed row was feasible (expected: all of them).
    int mixed_feasible = 0;
    /// Feasible cells with |r| > 1e-6 that passed the full pipeline re-check.
    std::vector<ThreeEntryHit> hits;
    /// Feasible by the inequalities but rejected by the re-check.
    long unconfirmed = 0;
    /// Per-channel feasible counts among the non-mixed samples, in enumeration order.
    std::vector<std::pair<std::array<double, 4>, long>> per_channel;
};

/// Sweeps probability vectors with exactly three non-zero entries on a simplex lattice of the
/// given resolution against `bloch_samples` seeded uniform Bloch-ball states (plus the maximally
/// mixed state). Throws InvalidArgument if resolution < 8.
ThreeEntrySummary scan_three_entry(int resolution, int bloch_samples = 1000, std::uint64_t seed = 0,
                                   double tol = kDefaultTol, unsigned threads = 0);

/// Header `p,t,feasible,slack1,slack2,slack3`, one row per cell, 17 significant digits.
std::string emit_csv(const std::vector<RegionCell> &cells);

/// Flat raster heat map of feasible vs infeasible cells with axes p and |r|^2.
std::string emit_svg(const std::vector<RegionCell> &cells, const std::string &title = "");

/// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)> &fn);

}  // namespace qretro
