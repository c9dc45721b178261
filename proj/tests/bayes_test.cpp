#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qretro/bayes.hpp"
#include "qretro/errors.hpp"

using namespace qretro;

namespace {

KrausSet to_set(const oracle::Kraus &k) { return KrausSet(k.begin(), k.end()); }

ChannelRep pauli_rep(const std::array<double, 4> &p) { return ChannelRep::from_pauli(PauliChannel(p)); }

/// Random channel from a handful of structured families and the full simplex.
std::array<double, 4> mixed_probs(oracle::Sampler &rng) {
    std::array<double, 4> p{};
    switch (rng.integer(0, 3)) {
        case 0:
            p[static_cast<std::size_t>(rng.integer(0, 3))] = 1.0;
            return p;
        case 1: {
            const int a = rng.integer(0, 3);
            int b = rng.integer(0, 2);
            if (b >= a) ++b;
            const double q = rng.uniform(0.05, 0.95);
            p[static_cast<std::size_t>(a)] = q;
            p[static_cast<std::size_t>(b)] = 1.0 - q;
            return p;
        }
        default:
            return rng.simplex();
    }
}

Vec3 axis_state(int axis, double x) {
    Vec3 r{};
    r[static_cast<std::size_t>(axis)] = x;
    return r;
}

}  // namespace

TEST(star_product, examples) {
    const PseudoDensityMatrix pdm = star_product(ChannelRep::identity(), BlochState());
    EXPECT_LE(max_abs_diff(pdm.m, swap_matrix() * cplx(0.5)), 1e-15);
    const auto e = herm_eig(pdm.m);
    EXPECT_NEAR(e.values[0], -0.5, 1e-12);
    for (std::size_t k = 1; k < 4; ++k) EXPECT_NEAR(e.values[k], 0.5, 1e-12);

    const PseudoDensityMatrix pure = star_product(ChannelRep::identity(), BlochState(Vec3{0.0, 0.0, 1.0}));
    EXPECT_LT(oracle::min_eigenvalue(pure.m), -1e-3);
}

TEST(star_product, unit_trace_and_marginal) {
    oracle::Sampler rng(40);
    for (int n = 0; n < 100; ++n) {
        const auto ks = oracle::unital_kraus(rng.unitary(), rng.simplex(), rng.unitary());
        const ChannelRep ch = ChannelRep::from_kraus(to_set(ks));
        const Vec3 r = rng.ball();
        const CMat4 m = star_product(ch, BlochState(r)).m;
        EXPECT_NEAR(trace(m).real(), 1.0, 1e-12);
        EXPECT_NEAR(trace(m).imag(), 0.0, 1e-12);
        EXPECT_TRUE(is_hermitian(m));
        CMat2 marginal;
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) marginal(a, b) = m(a, b) + m(2 + a, 2 + b);
        EXPECT_LE(max_abs_diff(marginal, oracle::act(ks, oracle::density(r))), 1e-12);
    }
}

TEST(two_time, expectation_examples) {
    const PseudoDensityMatrix id = star_product(ChannelRep::identity(), BlochState());
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) EXPECT_NEAR(two_time_expectation(id, i, j), i == j ? 1.0 : 0.0, 1e-15);
    const double lambda = 1.0 - 4.0 * 0.3 / 3.0;
    const PseudoDensityMatrix dep = star_product(ChannelRep::from_pauli(PauliChannel::depolarizing(0.3)), BlochState());
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) EXPECT_NEAR(two_time_expectation(dep, i, j), i == j ? lambda : 0.0, 1e-15);
    EXPECT_THROW(two_time_expectation(id, 0, 1), InvalidArgument);
    EXPECT_THROW(two_time_expectation(id, 1, 4), InvalidArgument);
    EXPECT_THROW(two_time_projector(BlochState(), ChannelRep::identity(), 0, 1), InvalidArgument);
}

TEST(two_time, projector_examples) {
    const BlochState zero(Vec3{0.0, 0.0, 1.0});
    EXPECT_NEAR(two_time_projector(zero, ChannelRep::identity(), 3, 3), 1.0, 1e-15);
    EXPECT_NEAR(two_time_projector(zero, ChannelRep::identity(), 1, 3), 0.0, 1e-15);
}

TEST(two_time, dual_path_agreement) {
    oracle::Sampler rng(41);
    for (int n = 0; n < 1000; ++n) {
        const std::array<double, 4> probs = rng.simplex();
        const ChannelRep ch =
            n % 2 ? pauli_rep(probs) : ChannelRep::from_kraus(to_set(oracle::unital_kraus(rng.unitary(), probs, rng.unitary())));
        const BlochState s(rng.ball());
        const int a = rng.integer(1, 3), b = rng.integer(1, 3);
        EXPECT_NEAR(two_time_expectation(star_product(ch, s), a, b), two_time_projector(s, ch, a, b), 1e-12);
    }
}

TEST(bayes_residual, examples) {
    oracle::Sampler rng(42);
    for (int n = 0; n < 20; ++n) {
        const ChannelRep e = ChannelRep::from_kraus(to_set(oracle::unital_kraus(rng.unitary(), rng.simplex(), rng.unitary())));
        EXPECT_LE(bayes_residual(e, BlochState(), adjoint(e)), 1e-14);
        const ChannelRep u = ChannelRep::unitary(rng.unitary());
        EXPECT_LE(bayes_residual(u, BlochState(rng.ball()), adjoint(u)), 1e-14);
    }
    const ChannelRep dep = ChannelRep::from_pauli(PauliChannel::depolarizing(0.2));
    EXPECT_GT(bayes_residual(dep, BlochState(Vec3{0.8, 0.0, 0.0}), adjoint(dep)), 0.01);
}

TEST(bayes_residual, matches_direct_evaluation) {
    oracle::Sampler rng(43);
    for (int n = 0; n < 100; ++n) {
        const auto e = oracle::unital_kraus(rng.unitary(), rng.simplex(), rng.unitary());
        const auto f = oracle::unital_kraus(rng.unitary(), rng.simplex(), rng.unitary());
        const Vec3 r = rng.ball();
        EXPECT_NEAR(bayes_residual(ChannelRep::from_kraus(to_set(e)), BlochState(r), ChannelRep::from_kraus(to_set(f))),
                    oracle::bayes_gap(e, r, oracle::jam(f)), 1e-13);
    }
}

TEST(unscathed, examples) {
    oracle::Sampler rng(44);
    for (int n = 0; n < 20; ++n) EXPECT_TRUE(is_unscathed(PauliChannel(rng.simplex()), BlochState()).has_value());
    for (double q : {0.1, 0.5, 0.9})
        for (double x = -1.0; x <= 1.0; x += 0.25)
            EXPECT_TRUE(is_unscathed(PauliChannel({q, 1 - q, 0, 0}), BlochState(Vec3{x, 0, 0})).has_value());
    EXPECT_FALSE(is_unscathed(PauliChannel({0.4, 0.3, 0.3, 0}), BlochState(Vec3{0.5, 0, 0})).has_value());
    EXPECT_EQ(is_unscathed(PauliChannel({0.2, 0.8, 0, 0}), BlochState()), 0);
    EXPECT_EQ(is_unscathed(PauliChannel({0, 0, 0.5, 0.5}), BlochState(Vec3{0.7, 0, 0})), 2);
    EXPECT_EQ(is_unscathed(PauliChannel({0, 0, 1, 0}), BlochState(Vec3{0, 0.6, 0})), 0);
    EXPECT_EQ(is_unscathed(PauliChannel({0, 0, 1, 0}), BlochState(Vec3{0.6, 0, 0})), 2);
}

TEST(unscathed, classifier_matches_direct_equation) {
    oracle::Sampler rng(45);
    int positives = 0;
    for (int n = 0; n < 4000; ++n) {
        const auto p = mixed_probs(rng);
        Vec3 r;
        switch (n % 3) {
            case 0:
                r = rng.ball();
                break;
            case 1:
                r = axis_state(rng.integer(0, 2), rng.uniform(-1, 1));
                break;
            default:
                r = {};
        }
        const auto got = is_unscathed(PauliChannel(p), BlochState(r));
        EXPECT_EQ(got, oracle::unscathed_direct(p, r)) << p[0] << " " << p[1] << " " << p[2] << " " << p[3];
        positives += got.has_value();
    }
    EXPECT_GT(positives, 1000);
}

TEST(unscathed, preserves_purity) {
    oracle::Sampler rng(46);
    for (int n = 0; n < 1000; ++n) {
        const auto p = mixed_probs(rng);
        const Vec3 r = n % 2 ? rng.ball() : axis_state(rng.integer(0, 2), rng.uniform(-1, 1));
        if (!is_unscathed(PauliChannel(p), BlochState(r))) continue;
        const CMat2 out = oracle::pauli_act(p, oracle::density(r));
        const CMat2 in = oracle::density(r);
        EXPECT_NEAR(trace(out * out).real(), trace(in * in).real(), 1e-12);
    }
}

TEST(unscathed, residuals_report_each_sigma) {
    const auto res = unscathed_residuals(PauliChannel({0, 0, 1, 0}), BlochState(Vec3{0.6, 0, 0}));
    EXPECT_GT(res[0], 0.1);
    EXPECT_GT(res[1], 0.1);
    EXPECT_LE(res[2], 1e-15);
}

TEST(adjoint_is_inverse, examples) {
    oracle::Sampler rng(47);
    for (int k = 0; k < 4; ++k) {
        std::array<double, 4> p{};
        p[static_cast<std::size_t>(k)] = 1.0;
        EXPECT_TRUE(adjoint_is_inverse(PauliChannel(p), BlochState(rng.ball())));
    }
    EXPECT_FALSE(adjoint_is_inverse(PauliChannel::depolarizing(0.3), BlochState(Vec3{0, 0, 0.5})));
    EXPECT_TRUE(adjoint_is_inverse(PauliChannel({0, 0, 0.5, 0.5}), BlochState(Vec3{0.7, 0, 0})));
}

TEST(adjoint_is_inverse, matches_residual) {
    oracle::Sampler rng(48);
    for (int n = 0; n < 1000; ++n) {
        const auto p = mixed_probs(rng);
        const Vec3 r = n % 2 ? rng.ball() : axis_state(rng.integer(0, 2), rng.uniform(-1, 1));
        const bool residual_zero = oracle::bayes_gap(oracle::pauli_kraus(p), r, oracle::jam(oracle::pauli_kraus(p))) <= 1e-10;
        EXPECT_EQ(adjoint_is_inverse(PauliChannel(p), BlochState(r)), residual_zero);
    }
}

TEST(gamel_report, examples) {
    oracle::Sampler rng(49);
    for (int n = 0; n < 50; ++n) {
        const Vec3 r = rng.ball();
        const double t = norm2(r);
        const InverseRecord rec = analytic_inverse(PauliChannel::depolarizing(0.75), BlochState(r));
        EXPECT_NEAR(rec.report.slack[0], 3.0 - t, 1e-12);
        EXPECT_NEAR(rec.report.slack[1], 1.0 - t, 1e-12);
        EXPECT_NEAR(rec.report.slack[2], (t - 1.0) * (t - 1.0), 1e-12);
        EXPECT_TRUE(rec.report.feasible);
        for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(rec.report.v[k], r[k], 1e-12);
    }
    for (int n = 0; n < 50; ++n) {
        const PauliChannel p(rng.simplex());
        const FeasibilityReport rep = gamel_report(ChannelRep::from_pauli(p).choi());
        EXPECT_TRUE(rep.feasible);
        const Vec3 l = p.lambda();
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_NEAR(rep.v[k], 0.0, 1e-14);
            EXPECT_NEAR(std::abs(rep.R(k, k)), std::abs(l[k]), 1e-14);
        }
        EXPECT_NEAR(rep.eta, norm2(rep.v) + frobenius2(rep.R), 1e-12);
    }
    CMat4 bad = CMat4::identity();
    bad(0, 1) = 1.0;
    EXPECT_THROW(gamel_report(bad), NotHermitian);
}

TEST(gamel_report, agrees_with_choi_eigenvalues) {
    oracle::Sampler rng(50);
    int infeasible = 0;
    for (int n = 0; n < 10000; ++n) {
        const PauliChannel p(rng.simplex());
        const Vec3 l = p.lambda();
        if (std::max({std::abs(l[0]), std::abs(l[1]), std::abs(l[2])}) >= 1.0 - 1e-12) continue;
        const Vec3 r = rng.ball();
        const CMat4 c = choi_from_jam(oracle::from_coeffs(oracle::inverse_coeffs(l, r)));
        const double mu = oracle::min_eigenvalue(c) / trace(c).real();
        if (std::abs(mu) < 1e-8) continue;
        const FeasibilityReport rep = gamel_report(c);
        EXPECT_EQ(rep.feasible, mu >= 0.0) << "min eigenvalue " << mu;
        infeasible += !rep.feasible;
    }
    EXPECT_GT(infeasible, 100);
}

TEST(analytic_inverse, examples) {
    const InverseRecord dp = analytic_inverse(PauliChannel::depolarizing(0.75), BlochState(Vec3{0.6, 0, 0}));
    EXPECT_NEAR(dp.a(0, 0), 1.0, 1e-15);
    EXPECT_NEAR(dp.a(0, 1), 0.6, 1e-15);
    EXPECT_NEAR(dp.a(0, 2), 0.0, 1e-15);
    for (int i = 1; i < 4; ++i)
        for (int j = 1; j < 4; ++j) EXPECT_NEAR(dp.a(i, j), 0.0, 1e-15);
    EXPECT_TRUE(dp.report.feasible);
    ASSERT_FALSE(dp.kraus.empty());
    oracle::Sampler rng(51);
    for (int n = 0; n < 10; ++n) {
        const CMat2 out = oracle::act(oracle::Kraus(dp.kraus.begin(), dp.kraus.end()), oracle::density(rng.ball()));
        EXPECT_LE(oracle::max_entry(out, oracle::density({0.6, 0, 0})), 1e-12);
    }

    const PauliChannel p({0.5, 0.2, 0.2, 0.1});
    const InverseRecord mu = analytic_inverse(p, BlochState());
    const Vec3 l = p.lambda();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            const double expect = i != j ? 0.0 : (i == 0 ? 1.0 : l[static_cast<std::size_t>(i - 1)]);
            EXPECT_NEAR(mu.a(i, j), expect, 1e-15);
        }
    EXPECT_THROW(analytic_inverse(PauliChannel({0.5, 0.5, 0, 0}), BlochState()), EigenvalueOnBoundary);
}

TEST(analytic_inverse, matches_closed_form_and_bayes_rule) {
    oracle::Sampler rng(52);
    int feasible = 0;
    for (int n = 0; n < 500; ++n) {
        const PauliChannel p(rng.simplex());
        const Vec3 l = p.lambda();
        if (std::max({std::abs(l[0]), std::abs(l[1]), std::abs(l[2])}) >= 1.0 - 1e-12) continue;
        const Vec3 r = rng.ball();
        const InverseRecord rec = analytic_inverse(p, BlochState(r));
        const auto want = oracle::inverse_coeffs(l, r);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) EXPECT_NEAR(rec.a(i, j), want[i][j], 1e-12);
        EXPECT_LE(oracle::bayes_gap(oracle::pauli_kraus(p.p()), r, oracle::from_coeffs(want)), 1e-10);
        EXPECT_LE(rec.residual, 1e-10);
        EXPECT_LT(rec.S, 1.0);
        EXPECT_TRUE(rec.unique);
        if (rec.report.feasible) {
            ++feasible;
            ASSERT_FALSE(rec.kraus.empty());
            EXPECT_LE(oracle::max_entry(oracle::choi(oracle::Kraus(rec.kraus.begin(), rec.kraus.end())), rec.choi), 1e-9);
        } else {
            EXPECT_TRUE(rec.kraus.empty());
        }
    }
    EXPECT_GT(feasible, 50);
}

TEST(solve_anticommutator, examples) {
    oracle::Sampler rng(53);
    const CMat4 b = rng.hermitian4();
    const auto half = solve_anticommutator(CMat2::identity() * cplx(0.5), b);
    EXPECT_LE(max_abs_diff(half.x, b), 1e-14);
    EXPECT_TRUE(half.unique);

    CMat2 proj;
    proj(0, 0) = 1.0;
    EXPECT_THROW(solve_anticommutator(proj, rng.hermitian4()), RankDeficient);

    CMat4 allowed = rng.hermitian4();
    for (std::size_t a = 0; a < 2; ++a)
        for (std::size_t c = 0; c < 2; ++c) allowed(2 + a, 2 + c) = 0.0;
    const auto partial = solve_anticommutator(proj, allowed);
    EXPECT_FALSE(partial.unique);
    const CMat4 m = tensor(proj, CMat2::identity());
    EXPECT_LE(max_abs_diff(m * partial.x + partial.x * m, allowed), 1e-12);
}

TEST(solve_anticommutator, substitution) {
    oracle::Sampler rng(54);
    for (int n = 0; n < 200; ++n) {
        const Vec3 r = rng.ball();
        const CMat2 m = oracle::density({0.9 * r[0], 0.9 * r[1], 0.9 * r[2]});
        const CMat4 b = rng.hermitian4();
        const auto sol = solve_anticommutator(m, b);
        const CMat4 mm = tensor(m, CMat2::identity());
        EXPECT_LE(max_abs_diff(mm * sol.x + sol.x * mm, b), 1e-10);
        EXPECT_TRUE(sol.unique);
    }
}

TEST(solve_anticommutator, equals_analytic_inverse) {
    oracle::Sampler rng(55);
    for (int n = 0; n < 200; ++n) {
        const PauliChannel p(rng.simplex());
        const Vec3 l = p.lambda();
        if (std::max({std::abs(l[0]), std::abs(l[1]), std::abs(l[2])}) >= 1.0 - 1e-12) continue;
        const Vec3 r = rng.ball();
        const auto ks = oracle::pauli_kraus(p.p());
        const CMat2 rho = oracle::density(r);
        const CMat4 lhs = oracle::kron(oracle::sigma(0), rho);
        const CMat4 je = oracle::jam(oracle::dagger_all(ks));
        const auto sol = solve_anticommutator(oracle::act(ks, rho), lhs * je + je * lhs);
        EXPECT_LE(max_abs_diff(sol.x, oracle::from_coeffs(oracle::inverse_coeffs(l, r))), 1e-10);
    }
}

TEST(bayesian_inverse, examples) {
    const InversionResult off = bayesian_inverse(pauli_rep({0.5, 0.5, 0, 0}), BlochState(Vec3{0, 0.4, 0.3}));
    ASSERT_TRUE(std::holds_alternative<NoInverse>(off));
    EXPECT_EQ(std::get<NoInverse>(off).reason, NoInverse::Reason::not_unscathed);
    EXPECT_EQ(to_string(std::get<NoInverse>(off).reason), "not-unscathed");

    oracle::Sampler rng(56);
    for (int n = 0; n < 10; ++n) {
        const Vec3 r = rng.ball();
        const InversionResult dp = bayesian_inverse(pauli_rep({0.25, 0.25, 0.25, 0.25}), BlochState(r));
        ASSERT_TRUE(std::holds_alternative<InverseRecord>(dp));
        const ChannelRep f = std::get<InverseRecord>(dp).channel();
        const BlochState out = apply(f, BlochState(rng.ball()));
        for (std::size_t k = 0; k < 3; ++k) EXPECT_NEAR(out.r()[k], r[k], 1e-10);
    }
    for (int n = 0; n < 10; ++n) {
        const CMat2 u = rng.unitary();
        const ChannelRep e = ChannelRep::unitary(u);
        const InversionResult res = bayesian_inverse(e, BlochState(rng.ball()));
        ASSERT_TRUE(std::holds_alternative<InverseRecord>(res));
        const auto &rec = std::get<InverseRecord>(res);
        EXPECT_LE(rec.residual, 1e-12);
        EXPECT_EQ(rec.route, InverseRoute::adjoint);
        EXPECT_LE(max_abs_diff(rec.channel().ptm(), adjoint(e).ptm()), 1e-10);
    }
}

TEST(bayesian_inverse, infeasible_reports_failed_inequality) {
    const InversionResult res = bayesian_inverse(ChannelRep::from_pauli(PauliChannel::depolarizing(0.2)), BlochState(Vec3{0.99, 0, 0}));
    ASSERT_TRUE(std::holds_alternative<NoInverse>(res));
    const auto &none = std::get<NoInverse>(res);
    EXPECT_EQ(none.reason, NoInverse::Reason::infeasible);
    ASSERT_TRUE(none.report.has_value());
    EXPECT_FALSE(none.report->feasible);
    EXPECT_TRUE(none.report->failed_inequality().has_value());
}

TEST(bayesian_inverse, rejects_non_unital) {
    RMat4 r = RMat4::identity();
    r(3, 0) = 0.2;
    r(3, 3) = 0.8;
    EXPECT_THROW(bayesian_inverse(ChannelRep::from_ptm(r), BlochState()), NotUnital);
}

TEST(bayesian_inverse, pure_state_on_boundary_route_is_not_unique) {
    const InversionResult res = bayesian_inverse(pauli_rep({0, 1, 0, 0}), BlochState(Vec3{0, 0, 1}));
    ASSERT_TRUE(std::holds_alternative<InverseRecord>(res));
    EXPECT_FALSE(std::get<InverseRecord>(res).unique);
}

TEST(bayesian_inverse, time_reversal_symmetry) {
    oracle::Sampler rng(57);
    int successes = 0;
    for (int n = 0; n < 3000 && successes < 300; ++n) {
        const auto probs = mixed_probs(rng);
        const CMat2 u = rng.unitary(), v = rng.unitary();
        const ChannelRep e = ChannelRep::from_kraus(to_set(oracle::unital_kraus(u, probs, v)));
        Vec3 r = n % 3 == 0 ? rng.ball() : Vec3{0.4 * rng.gauss(), 0.4 * rng.gauss(), 0.4 * rng.gauss()};
        if (norm2(r) > 1.0) r = rng.ball();
        const BlochState s(r);
        const InversionResult res = bayesian_inverse(e, s);
        if (!std::holds_alternative<InverseRecord>(res)) continue;
        ++successes;
        const ChannelRep f = std::get<InverseRecord>(res).channel();
        EXPECT_TRUE(is_cptp(f, 1e-9));
        EXPECT_LE(time_reversal_discrepancy(e, s, f), 1e-9);
        EXPECT_LE(oracle::bayes_gap(oracle::unital_kraus(u, probs, v), r, f.jamiolkowski()), 1e-9);
    }
    EXPECT_EQ(successes, 300);
}
