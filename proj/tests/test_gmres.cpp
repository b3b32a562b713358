#include <gtest/gtest.h>

#include <Eigen/Dense>

#include "hsaa/anderson.hpp"
#include "hsaa/gmres.hpp"
#include "hsaa/spectral.hpp"
#include "hsaa/theory.hpp"
#include "test_support.hpp"

using namespace hsaa;
using hsaa::testing::IdentityWeighting;
using hsaa::testing::LambdaProblem;

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

TEST(Gmres, IdentitySystemOneIteration) {
    // G(x) = b constant; I - A = I.
    const Eigen::VectorXd b = random_normal_vector(8, 3);
    const LambdaProblem<double> problem(8, 1.0, [b](const Eigen::VectorXd&) { return b; }, true);
    const AffineSystem system(problem);
    GmresOptions options;
    options.tol = 1e-12;
    const auto result = gmres_restarted(system, Eigen::VectorXd::Zero(8), options);
    EXPECT_EQ(result.record.status, RunStatus::Converged);
    ASSERT_EQ(result.record.rows.size(), 2u);
    EXPECT_LE(result.record.rows[1].res_l2, 1e-12 * b.norm());
    EXPECT_LE((result.solution - b).norm(), 1e-12 * b.norm());
}

TEST(Gmres, ScaledIdentityOneIteration) {
    // G(x) = -x + b, so (I - A) = 2I and the solution is b/2.
    const Eigen::VectorXd b = random_normal_vector(10, 5);
    const LambdaProblem<double> problem(
        10, 1.0, [b](const Eigen::VectorXd& x) { return (b - x).eval(); }, true);
    const AffineSystem system(problem);
    GmresOptions options;
    options.tol = 1e-13;
    const auto result = gmres_restarted(system, Eigen::VectorXd::Zero(10), options);
    EXPECT_EQ(result.record.status, RunStatus::Converged);
    ASSERT_EQ(result.record.rows.size(), 2u);
    EXPECT_LE((result.solution - 0.5 * b).norm(), 1e-12 * b.norm());
}

TEST(Gmres, ResidualsNonincreasingWithinCycle) {
    const auto problem = seeded_linear(24, 0.2, 0.85, 7);
    const AffineSystem system(problem);
    GmresOptions options;
    options.restart = 6;
    options.tol = 1e-10;
    options.max_outer = 50;
    const auto result = gmres_restarted(system, Eigen::VectorXd::Zero(24), options);
    EXPECT_EQ(result.record.status, RunStatus::Converged);
    for (size_t k = 1; k < result.record.rows.size(); ++k) {
        const bool cycle_start = (result.record.rows[k].iter - 1) % options.restart == 0;
        if (!cycle_start) {
            EXPECT_LE(result.record.rows[k].res_l2,
                      result.record.rows[k - 1].res_l2 * (1.0 + 1e-12))
                << "iter " << result.record.rows[k].iter;
        }
    }
}

TEST(Gmres, ArnoldiBasisStaysOrthogonal) {
    const auto problem = seeded_linear(32, 0.1, 0.9, 11);
    const AffineSystem system(problem);
    GmresOptions options;
    options.restart = 12;
    options.tol = 1e-9;
    options.track_basis_defect = true;
    const auto result = gmres_restarted(system, Eigen::VectorXd::Zero(32), options);
    EXPECT_EQ(result.record.status, RunStatus::Converged);
    EXPECT_LE(result.max_basis_defect, 1e-10);
}

TEST(Gmres, RestartedConvergesOnSpd) {
    const auto problem = seeded_linear(40, 0.15, 0.8, 13);
    const AffineSystem system(problem);
    GmresOptions options;
    options.restart = 5;
    options.tol = 1e-8;
    options.max_outer = 200;
    const auto result = gmres_restarted(system, Eigen::VectorXd::Zero(40), options);
    EXPECT_EQ(result.record.status, RunStatus::Converged);
    const Eigen::VectorXd residual = system.rhs() - system.apply(result.solution);
    EXPECT_LE(residual.norm(), 1e-8 * system.rhs().norm());
}

TEST(Gmres, AffineSystemRejectsNonlinear) {
    const LambdaProblem<double> nonlinear(
        3, 1.0, [](const Eigen::VectorXd& x) { return x.cwiseProduct(x).eval(); }, false);
    EXPECT_THROW(AffineSystem{nonlinear}, std::invalid_argument);
}

namespace {

// Max relative mismatch of the Walker-Ni correspondence over `horizon`
// iterations: for affine G the AA iterate obeys x^{AA}_{k+1} = G(x^G_k),
// hence ||f^{AA}_{k+1}|| = ||A r^G_k||.
double walker_ni_mismatch(double a, double b, std::uint64_t seed, int horizon) {
    const Eigen::Index n = 32;
    const auto spectral = seeded_linear(n, a, b, seed);
    const Eigen::VectorXd offset = random_normal_vector(n, seed + 2);
    const LambdaProblem<double> problem(
        n, 1.0,
        [&](const Eigen::VectorXd& x) { return (spectral.apply_G(x) + offset).eval(); }, true);
    const Eigen::VectorXd x0 = Eigen::VectorXd::Zero(n);

    const AffineSystem system(problem);
    GmresOptions options;
    options.restart = horizon + 5;  // no restart within the horizon
    options.tol = 1e-15;
    options.max_outer = 1;
    options.store_iterates = true;
    const auto gmres = gmres_restarted(system, x0, options);
    EXPECT_GE(gmres.iterates.size(), static_cast<size_t>(horizon) + 1);

    const IdentityWeighting w(n);
    AndersonAccelerator<double> acc(w, kUnboundedMemory);
    Eigen::VectorXd x = x0;
    std::vector<Eigen::VectorXd> aa_iterates{x};
    std::vector<double> aa_res;
    for (int k = 0; k <= horizon; ++k) {
        const Eigen::VectorXd gx = problem.apply_G(x);
        aa_res.push_back((gx - x).norm());
        x = acc.step(x, gx);
        aa_iterates.push_back(x);
    }

    double worst = 0.0;
    for (int k = 0; k < horizon; ++k) {
        const Eigen::VectorXd& xg = gmres.iterates[static_cast<size_t>(k)];
        const Eigen::VectorXd expected_next = problem.apply_G(xg);
        worst = std::max(worst, (aa_iterates[static_cast<size_t>(k + 1)] - expected_next).norm() /
                                    (1.0 + expected_next.norm()));
        const Eigen::VectorXd rg = system.rhs() - system.apply(xg);
        const double expected_res = spectral.apply_G(rg).norm();  // ||A r||
        worst = std::max(worst,
                         std::abs(aa_res[static_cast<size_t>(k + 1)] - expected_res) / expected_res);
    }
    return worst;
}

}  // namespace

TEST(Gmres, EquivalentToUnboundedMemoryAA) {
    // SPD spectrum away from 1 keeps both trajectories numerically coherent
    // over the full horizon.
    EXPECT_LE(walker_ni_mismatch(2.0, 100.0, 17, 20), 1e-8);
}

TEST(Gmres, EquivalentToUnboundedMemoryAAContractive) {
    // Contractive spectra decohere once the window Gram conditioning crosses
    // the double-precision budget; the correspondence is still clean over a
    // shorter horizon.
    EXPECT_LE(walker_ni_mismatch(0.3, 0.9, 17, 10), 1e-8);
}
