#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "hsaa/anderson.hpp"
#include "hsaa/spectral.hpp"
#include "hsaa/theory.hpp"
#include "test_support.hpp"

using namespace hsaa;
using hsaa::testing::IdentityWeighting;
using hsaa::testing::LambdaProblem;
using hsaa::testing::ScaledWeighting;
using hsaa::testing::scalar_affine;

namespace {

SyntheticLinearProblem seeded_linear(Eigen::Index n, double a, double b, std::uint64_t seed) {
    SpectrumSpec spec;
    spec.n = n;
    spec.a = a;
    spec.b = b;
    spec.basis_seed = seed;
    spec.e0_seed = seed + 1;
    return SyntheticLinearProblem(realize_spectrum(spec));
}

}  // namespace

TEST(PicardRun, ScalarArithmetic) {
    const auto problem = scalar_affine(0.5, 1.0);
    const auto run = picard_run<double>(problem, Eigen::VectorXd::Zero(1), 3);
    EXPECT_DOUBLE_EQ(run.final_iterate[0], 1.75);  // x1=1, x2=1.5, x3=1.75
    ASSERT_EQ(run.record.rows.size(), 4u);
    EXPECT_DOUBLE_EQ(run.record.rows[0].res_l2, 1.0);
    EXPECT_DOUBLE_EQ(run.record.rows[1].res_l2, 0.5);
    EXPECT_DOUBLE_EQ(run.record.rows[2].res_l2, 0.25);
}

TEST(PicardRun, FixedPointStart) {
    const auto problem = scalar_affine(0.5, 1.0);
    Eigen::VectorXd x0(1);
    x0 << 2.0;
    const auto run = picard_run<double>(problem, x0, 5);
    for (const auto& row : run.record.rows) EXPECT_EQ(row.res_l2, 0.0);
}

TEST(PicardRun, NoncontractiveGrowth) {
    const auto problem = scalar_affine(2.0, 1.0);
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    const auto run = picard_run<double>(problem, x0, 4);
    for (size_t k = 1; k < run.record.rows.size(); ++k) {
        EXPECT_DOUBLE_EQ(run.record.rows[k].res_l2, 2.0 * run.record.rows[k - 1].res_l2);
    }
}

TEST(PicardRun, DivergenceFlagged) {
    const auto problem = scalar_affine(1e7, 0.0);
    Eigen::VectorXd x0(1);
    x0 << 1.0;
    const auto run = picard_run<double>(problem, x0, 500);
    EXPECT_EQ(run.record.status, RunStatus::Diverged);
    for (const auto& row : run.record.rows) EXPECT_TRUE(std::isfinite(row.res_l2));
}

TEST(SolveGamma, ExactRepresentation) {
    const IdentityWeighting w(6);
    const Eigen::VectorXd f = random_normal_vector(6, 3);
    Eigen::MatrixXd cols(6, 1);
    cols.col(0) = f;
    const auto gamma = solve_gamma<double>(cols, f, w);
    ASSERT_TRUE(gamma.has_value());
    EXPECT_NEAR((*gamma)[0], 1.0, 1e-14);
}

TEST(SolveGamma, OneDimensionalProjection) {
    const auto w = build_weight({1}, 8, 0.2);
    const Eigen::VectorXd d = random_normal_vector(8, 4);
    const Eigen::VectorXd f = random_normal_vector(8, 5);
    Eigen::MatrixXd cols(8, 1);
    cols.col(0) = d;
    const auto gamma = solve_gamma<double>(cols, f, w);
    ASSERT_TRUE(gamma.has_value());
    const double expected = weighted_inner<double>(w, d, f) / weighted_inner<double>(w, d, d);
    EXPECT_NEAR((*gamma)[0], expected, 1e-13 * std::abs(expected));
}

TEST(SolveGamma, InvariantUnderWeightScaling) {
    const auto base = build_weight({1}, 16, 1.0 / 15);
    Eigen::MatrixXd cols(16, 3);
    for (int j = 0; j < 3; ++j) cols.col(j) = random_normal_vector(16, 50 + j);
    const Eigen::VectorXd f = random_normal_vector(16, 49);
    const auto gamma = solve_gamma<double>(cols, f, base);
    ASSERT_TRUE(gamma.has_value());
    for (double c : {1e-6, 3.0, 1e8}) {
        const ScaledWeighting scaled(base, c);
        const auto gamma_scaled = solve_gamma<double>(cols, f, scaled);
        ASSERT_TRUE(gamma_scaled.has_value());
        EXPECT_LE((*gamma - *gamma_scaled).cwiseAbs().maxCoeff(),
                  1e-12 * gamma->cwiseAbs().maxCoeff());
    }
}

TEST(SolveGamma, MatchesExtendedPrecisionNormalEquations) {
    using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
    const Eigen::Index n = 50;
    const int m = 6;
    const double h = 1.0 / (n - 1);
    const auto w = build_weight({2}, n, h);

    Eigen::MatrixXd cols(n, m);
    for (int j = 0; j < m; ++j) cols.col(j) = random_normal_vector(n, 600 + j);
    const Eigen::VectorXd f = random_normal_vector(n, 599);

    // dense weighted normal equations at extended precision
    const MatL winv = w.matrix().to_dense().cast<long double>().llt().solve(
        MatL::Identity(n, n));
    const MatL colsl = cols.cast<long double>();
    const MatL gram = colsl.transpose() * winv * colsl;
    const VecL rhs = colsl.transpose() * winv * f.cast<long double>();
    const Eigen::VectorXd oracle = gram.llt().solve(rhs).cast<double>();

    const auto gamma = solve_gamma<double>(cols, f, w);
    ASSERT_TRUE(gamma.has_value());
    EXPECT_LE((*gamma - oracle).norm(), 1e-9 * oracle.norm());
}

TEST(SolveGamma, ResidualIsWeightOrthogonalToWindow) {
    const Eigen::Index n = 40;
    const auto w = build_weight({2}, n, 1.0 / (n + 1));
    Eigen::MatrixXd cols(n, 5);
    for (int j = 0; j < 5; ++j) cols.col(j) = random_normal_vector(n, 700 + j);
    const Eigen::VectorXd f = random_normal_vector(n, 699);
    const auto gamma = solve_gamma<double>(cols, f, w);
    ASSERT_TRUE(gamma.has_value());
    const Eigen::VectorXd residual = f - cols * (*gamma);
    const double fw = weighted_norm<double>(w, f);
    for (int j = 0; j < 5; ++j) {
        const Eigen::VectorXd d = cols.col(j);
        const double dw = weighted_norm<double>(w, d);
        EXPECT_LE(std::abs(weighted_inner<double>(w, d, residual)), 1e-10 * dw * fw);
    }
}

TEST(SolveGamma, AllColumnsDroppedReturnsEmpty) {
    const IdentityWeighting w(4);
    Eigen::MatrixXd cols = Eigen::MatrixXd::Zero(4, 2);
    const Eigen::VectorXd f = random_normal_vector(4, 9);
    const auto gamma = solve_gamma<double>(cols, f, w, /*reg=*/0.0);
    EXPECT_FALSE(gamma.has_value());
}

TEST(AAStep, ScalarSecantReachesFixedPoint) {
    // G(x) = 0.5 x + 1 from x0 = 0 with m = 1: f0=1, f1=0.5, gamma=-1, x2=2.
    const auto problem = scalar_affine(0.5, 1.0);
    const IdentityWeighting w(1);
    AndersonAccelerator<double> acc(w, 1);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(1);
    Eigen::VectorXd gx = problem.apply_G(x);
    x = acc.step(x, gx);  // empty window -> Picard: x1 = 1
    EXPECT_DOUBLE_EQ(x[0], 1.0);
    gx = problem.apply_G(x);
    x = acc.step(x, gx);
    EXPECT_NEAR(x[0], 2.0, 1e-14);
}

TEST(AAStep, MemoryZeroIsPicard) {
    const auto problem = seeded_linear(12, 0.2, 0.8, 21);
    const IdentityWeighting w(12);
    AndersonAccelerator<double> acc(w, 0);
    Eigen::VectorXd x = problem.initial_iterate();
    for (int k = 0; k < 5; ++k) {
        const Eigen::VectorXd gx = problem.apply_G(x);
        const Eigen::VectorXd next = acc.step(x, gx);
        EXPECT_EQ((next - gx).cwiseAbs().maxCoeff(), 0.0);  // bitwise Picard
        x = next;
    }
}

TEST(AAStep, MatchesMultisecantUpdate) {
    // x_{k+1} = x_k + (I - S_k) f_k with the dense multisecant operator.
    const auto problem = seeded_linear(16, 0.25, 0.85, 31);
    for (int s : {0, 2}) {
        const auto w = build_weight({s}, 16, problem.spacing());
        AndersonAccelerator<double> acc(w, 4);
        Eigen::VectorXd x = problem.initial_iterate();
        for (int k = 0; k < 10; ++k) {
            const Eigen::VectorXd gx = problem.apply_G(x);
            acc.register_iterate(x, gx);
            const Eigen::VectorXd next = acc.accelerated();
            if (acc.window_size() > 0) {
                const int m = acc.window_size();
                Eigen::MatrixXd xk(16, m), dk(16, m);
                for (int i = 0; i < m; ++i) {
                    xk.col(i) = acc.dx_columns()[static_cast<size_t>(i)];
                    dk.col(i) = acc.df_columns()[static_cast<size_t>(i)];
                }
                const Eigen::MatrixXd s_tilde = multisecant_operator<double>(xk, dk, w);
                const Eigen::VectorXd f = gx - x;
                const Eigen::VectorXd via_secant = x + f - s_tilde * f;
                EXPECT_LE((next - via_secant).norm(), 1e-10 * (1.0 + next.norm()))
                    << "s=" << s << " iteration " << k;
            }
            x = next;
        }
    }
}

TEST(AARun, ScalarLinearConvergesInThreeIterations) {
    const auto problem = scalar_affine(0.5, 1.0);
    AAConfig config;
    config.memory = 1;
    config.tol = 1e-15;
    config.max_iters = 10;
    const auto run = aa_run<double>(problem, config, Eigen::VectorXd::Zero(1),
                                    IdentityWeighting(1));
    EXPECT_EQ(run.record.status, RunStatus::Converged);
    const auto iters = run.record.iterations_to(1e-15);
    ASSERT_TRUE(iters.has_value());
    EXPECT_LE(*iters, 3);
    EXPECT_NEAR(run.final_iterate[0], 2.0, 1e-14);
}

TEST(AARun, MemoryZeroReproducesPicardBitwise) {
    const auto problem = seeded_linear(20, 0.3, 0.9, 77);
    AAConfig config;
    config.memory = 0;
    config.tol = 0.0;
    config.max_iters = 50;
    const auto w = build_weight({0}, 20, problem.spacing());
    const auto aa = aa_run<double>(problem, config, problem.initial_iterate(), w);
    const auto picard = picard_run<double>(problem, problem.initial_iterate(), 50, 0.0, &w);
    ASSERT_EQ(aa.record.rows.size(), picard.record.rows.size());
    for (size_t k = 0; k < aa.record.rows.size(); ++k) {
        EXPECT_EQ(aa.record.rows[k].res_l2, picard.record.rows[k].res_l2) << "row " << k;
    }
    EXPECT_EQ((aa.final_iterate - picard.final_iterate).cwiseAbs().maxCoeff(), 0.0);
}

TEST(AARun, BetaWrapsTheMap) {
    // AA with beta is AA with beta=1 applied to G_beta.
    const auto problem = seeded_linear(10, 0.3, 0.8, 99);
    const double beta = 0.6;
    const LambdaProblem<double> wrapped(
        10, 1.0,
        [&](const Eigen::VectorXd& x) {
            return ((1.0 - beta) * x + beta * problem.apply_G(x)).eval();
        },
        true, problem.exact_solution());
    AAConfig config;
    config.memory = 3;
    config.tol = 0.0;
    config.max_iters = 15;
    AAConfig config_beta = config;
    config_beta.beta = beta;
    const IdentityWeighting w(10);
    const auto direct = aa_run<double>(wrapped, config, problem.initial_iterate(), w);
    const auto mixed = aa_run<double>(problem, config_beta, problem.initial_iterate(), w);
    ASSERT_EQ(direct.record.rows.size(), mixed.record.rows.size());
    for (size_t k = 0; k < direct.record.rows.size(); ++k) {
        EXPECT_NEAR(mixed.record.rows[k].res_l2, direct.record.rows[k].res_l2,
                    1e-12 * (1.0 + direct.record.rows[k].res_l2));
    }
}

TEST(ConstrainedAlpha, SingleColumn) {
    const IdentityWeighting w(5);
    Eigen::MatrixXd cols(5, 1);
    cols.col(0) = random_normal_vector(5, 8);
    const Eigen::VectorXd alpha = constrained_alpha<double>(cols, w);
    ASSERT_EQ(alpha.size(), 1);
    EXPECT_DOUBLE_EQ(alpha[0], 1.0);
}

TEST(ConstrainedAlpha, SumsToOne) {
    const auto w = build_weight({1}, 12, 0.1);
    for (int m : {2, 3, 6}) {
        Eigen::MatrixXd cols(12, m);
        for (int j = 0; j < m; ++j) cols.col(j) = random_normal_vector(12, 80 + 7 * m + j);
        const Eigen::VectorXd alpha = constrained_alpha<double>(cols, w);
        EXPECT_NEAR(alpha.sum(), 1.0, 1e-14);
    }
}

TEST(ConstrainedAlpha, AlgorithmOneEqualsAlgorithmTwo) {
    // The iterate built from alpha (original form, beta=1) must equal the
    // unconstrained update at every iteration of a linear problem.
    const auto problem = seeded_linear(18, 0.35, 0.9, 55);
    for (int s : {0, 2}) {
        const auto w = build_weight({s}, 18, problem.spacing());
        const int memory = 4;
        AndersonAccelerator<double> acc(w, memory);
        std::vector<Eigen::VectorXd> xs, fs;
        Eigen::VectorXd x = problem.initial_iterate();
        for (int k = 0; k < 14; ++k) {
            const Eigen::VectorXd gx = problem.apply_G(x);
            xs.push_back(x);
            fs.push_back(gx - x);
            acc.register_iterate(x, gx);
            const Eigen::VectorXd next = acc.accelerated();

            const int mk = std::min<int>(memory, k);
            Eigen::MatrixXd residuals(18, mk + 1);
            for (int i = 0; i <= mk; ++i) residuals.col(i) = fs[static_cast<size_t>(k - mk + i)];
            const Eigen::VectorXd alpha = constrained_alpha<double>(residuals, w);
            Eigen::VectorXd rebuilt = Eigen::VectorXd::Zero(18);
            for (int i = 0; i <= mk; ++i) {
                const auto idx = static_cast<size_t>(k - mk + i);
                rebuilt += alpha[i] * (xs[idx] + fs[idx]);
            }
            EXPECT_LE((rebuilt - next).norm(), 1e-10 * (1.0 + next.norm()))
                << "s=" << s << " iteration " << k;
            x = next;
        }
    }
}

TEST(OneStepAA, FullKrylovSpanKillsTheError) {
    const Eigen::Index n = 6;
    const auto problem = seeded_linear(n, 0.3, 0.9, 13);
    const IdentityWeighting w(n);
    const Eigen::VectorXd e = one_step_aa<double>(problem, problem.initial_iterate(),
                                                  static_cast<int>(n), static_cast<int>(n), w);
    EXPECT_LE(e.norm(), 1e-9 * problem.initial_iterate().norm());
}

TEST(OneStepAA, RejectsBadParameters) {
    const auto problem = seeded_linear(8, 0.3, 0.9, 14);
    const IdentityWeighting w(8);
    EXPECT_THROW(one_step_aa<double>(problem, problem.initial_iterate(), 2, 3, w),
                 std::invalid_argument);
    EXPECT_THROW(one_step_aa<double>(problem, problem.initial_iterate(), 3, 0, w),
                 std::invalid_argument);
}

TEST(MultisecantOperator, SecantConstraint) {
    const Eigen::Index n = 14;
    const int m = 3;
    const auto w = build_weight({2}, n, 1.0 / (n + 1));
    Eigen::MatrixXd xk(n, m), dk(n, m);
    for (int j = 0; j < m; ++j) {
        xk.col(j) = random_normal_vector(n, 900 + j);
        dk.col(j) = random_normal_vector(n, 910 + j);
    }
    const Eigen::MatrixXd s = multisecant_operator<double>(xk, dk, w);
    EXPECT_LE((s * dk - (xk + dk)).cwiseAbs().maxCoeff(),
              1e-10 * (xk + dk).cwiseAbs().maxCoeff());
}

TEST(MultisecantOperator, IdentityWeightReduction) {
    const Eigen::Index n = 12;
    const int m = 3;
    Eigen::MatrixXd xk(n, m), dk(n, m);
    for (int j = 0; j < m; ++j) {
        xk.col(j) = random_normal_vector(n, 920 + j);
        dk.col(j) = random_normal_vector(n, 930 + j);
    }
    const IdentityWeighting w(n);
    const Eigen::MatrixXd got = multisecant_operator<double>(xk, dk, w);
    const Eigen::MatrixXd gram = dk.transpose() * dk;
    const Eigen::MatrixXd expected =
        (xk + dk) * gram.llt().solve(Eigen::MatrixXd(dk.transpose()));
    EXPECT_LE((got - expected).cwiseAbs().maxCoeff(), 1e-10 * expected.cwiseAbs().maxCoeff());
}

TEST(MultisecantOperator, MinimizesWeightedFrobeniusNorm) {
    // ||P S P^{-1}||_F^2 = trace(P^2 S P^{-2} S^T) needs only P^2 = W^{-1}
    // (band solve) and P^{-2} = W (band multiply); no square roots.
    const Eigen::Index n = 12;
    const int m = 3;
    const auto w = build_weight({2}, n, 1.0 / (n - 1));
    Eigen::MatrixXd xk(n, m), dk(n, m);
    for (int j = 0; j < m; ++j) {
        xk.col(j) = random_normal_vector(n, 940 + j);
        dk.col(j) = random_normal_vector(n, 950 + j);
    }
    const Eigen::MatrixXd s = multisecant_operator<double>(xk, dk, w);

    const auto weighted_frobenius_sq = [&](const Eigen::MatrixXd& mat) {
        Eigen::MatrixXd right(n, n);  // W mat^T
        for (Eigen::Index c = 0; c < n; ++c) {
            right.col(c) = w.matrix().multiply<double>(Eigen::VectorXd(mat.row(c)));
        }
        const Eigen::MatrixXd middle = mat * right;  // S W S^T ... then W^{-1} applied
        double trace = 0.0;
        for (Eigen::Index c = 0; c < n; ++c) {
            trace += w.apply_psq(Eigen::VectorXd(middle.col(c)))[c];
        }
        return trace;
    };

    // projector onto the orthogonal complement of span(D): E = R (I - P_D)
    const Eigen::MatrixXd pd =
        dk * (dk.transpose() * dk).llt().solve(Eigen::MatrixXd(dk.transpose()));
    const Eigen::MatrixXd annihilator = Eigen::MatrixXd::Identity(n, n) - pd;

    const double base = weighted_frobenius_sq(s);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd r(n, n);
        for (Eigen::Index c = 0; c < n; ++c) r.col(c) = random_normal_vector(n, 1000 + 13 * trial + c);
        const Eigen::MatrixXd feasible = s + r * annihilator;
        EXPECT_LE((feasible * dk - (xk + dk)).cwiseAbs().maxCoeff(),
                  1e-8 * (xk + dk).cwiseAbs().maxCoeff());
        EXPECT_GE(weighted_frobenius_sq(feasible), base * (1.0 - 1e-10)) << "trial " << trial;
    }
}

TEST(MultisecantOperator, RankDeficientThrows) {
    const Eigen::Index n = 10;
    Eigen::MatrixXd xk(n, 2), dk(n, 2);
    dk.col(0) = random_normal_vector(n, 960);
    dk.col(1).setZero();  // exactly rank deficient window
    xk.setZero();
    const IdentityWeighting w(n);
    EXPECT_THROW(multisecant_operator<double>(xk, dk, w), SingularGram);
}

TEST(Drivers, InnerSolveFailureHaltsWithStatus) {
    const LambdaProblem<double> problem(
        3, 1.0,
        [](const Eigen::VectorXd& x) -> Eigen::VectorXd {
            if (x.norm() > 0.5) throw SingularSystem("inner solve blew up");
            return (0.5 * x).eval() + Eigen::VectorXd::Ones(3);
        },
        false);
    Eigen::VectorXd x0 = Eigen::VectorXd::Ones(3);
    const auto picard = picard_run<double>(problem, x0, 20);
    EXPECT_EQ(picard.record.status, RunStatus::InnerSolveFailure);
    AAConfig config;
    config.memory = 2;
    config.max_iters = 20;
    const auto aa = aa_run<double>(problem, config, x0, IdentityWeighting(3));
    EXPECT_EQ(aa.record.status, RunStatus::InnerSolveFailure);
}
