#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "glyphdraw/kernel_checks.hpp"
#include "glyphdraw/losses.hpp"

using namespace glyphdraw;

namespace {

struct AalInputs {
    Matrix q, k, v, k_c, v_c;
};

AalInputs random_inputs(Rng& rng, std::size_t n, std::size_t m, std::size_t d, std::size_t dv) {
    return {Matrix::random(n, d, rng), Matrix::random(m, d, rng), Matrix::random(m, dv, rng),
            Matrix::random(m, d, rng), Matrix::random(m, dv, rng)};
}

Matrix& select(AalInputs& in, AalParam p) {
    switch (p) {
    case AalParam::q: return in.q;
    case AalParam::k: return in.k;
    case AalParam::v: return in.v;
    case AalParam::k_c: return in.k_c;
    case AalParam::v_c: return in.v_c;
    }
    return in.q;
}

constexpr AalParam all_params[] = {AalParam::q, AalParam::k, AalParam::v, AalParam::k_c, AalParam::v_c};

}  // namespace

TEST(AalLoss, ZeroWhenFrozenCopyIsIdentical) {
    Rng rng(1);
    for (int t = 0; t < 100; ++t) {
        const auto in = random_inputs(rng, 3, 4, 5, 2);
        EXPECT_EQ(aal_loss(in.q, in.k, in.v, in.k, in.v, 5), 0.0);
    }
}

TEST(AalLoss, SingleTokenIsValueDifferenceNorm) {
    Rng rng(2);
    const auto in = random_inputs(rng, 3, 1, 4, 3);
    // Every query row sees weight 1 on the single token, so the output rows all equal v - v_c.
    const double row = frobenius_norm(in.v - in.v_c);
    EXPECT_NEAR(aal_loss(in.q, in.k, in.v, in.k_c, in.v_c, 4), std::sqrt(3.0) * row, 1e-14);
    const auto one = random_inputs(rng, 1, 1, 4, 3);
    EXPECT_NEAR(aal_loss(one.q, one.k, one.v, one.k_c, one.v_c, 4), frobenius_norm(one.v - one.v_c), 1e-15);
}

TEST(AalLoss, MatchesKernelComposition) {
    Rng rng(3);
    const auto in = random_inputs(rng, 2, 2, 3, 2);
    const double inv = 1.0 / std::sqrt(3.0);
    const Matrix live = matmul(row_softmax(scaled(matmul(in.q, transpose(in.k)), inv)), in.v);
    const Matrix frozen = matmul(row_softmax(scaled(matmul(in.q, transpose(in.k_c)), inv)), in.v_c);
    EXPECT_NEAR(aal_loss(in.q, in.k, in.v, in.k_c, in.v_c, 3), frobenius_norm(live - frozen), 1e-15);
}

TEST(AalLoss, ShapeErrors) {
    Rng rng(4);
    const auto in = random_inputs(rng, 2, 3, 4, 2);
    EXPECT_THROW(aal_loss(in.q, in.k, in.v, in.k_c, Matrix(3, 5), 4), ShapeError);
    EXPECT_THROW(aal_loss(in.q, Matrix(3, 2), in.v, in.k_c, in.v_c, 4), ShapeError);
    EXPECT_THROW(aal_loss(in.q, in.k, Matrix(2, 2), in.k_c, in.v_c, 4), ShapeError);
    EXPECT_THROW(aal_loss(in.q, in.k, in.v, in.k_c, in.v_c, 0), ShapeError);
}

TEST(AalGrad, SingleTokenValueGradientIsUnitDifference) {
    Rng rng(5);
    const auto in = random_inputs(rng, 1, 1, 3, 4);
    const Matrix g = aal_grad(in.q, in.k, in.v, in.k_c, in.v_c, 3, AalParam::v);
    const Matrix diff = in.v - in.v_c;
    EXPECT_LE(max_abs_diff(g, scaled(diff, 1.0 / frobenius_norm(diff))), 1e-15);
}

TEST(AalGrad, SingularAtZeroLoss) {
    Rng rng(6);
    const auto in = random_inputs(rng, 2, 2, 3, 3);
    EXPECT_THROW(aal_grad(in.q, in.k, in.v, in.k, in.v, 3, AalParam::q), SingularityError);
    EXPECT_THROW(aal_grad(in.q, in.k, in.v, in.k, in.v, 3, AalParam::q), NumericError);
}

TEST(AalGrad, SwappingBranchesKeepsGradientOfSameMatrix) {
    Rng rng(7);
    for (int t = 0; t < 20; ++t) {
        const auto in = random_inputs(rng, 3, 3, 4, 4);
        const Matrix gv = aal_grad(in.q, in.k, in.v, in.k_c, in.v_c, 4, AalParam::v);
        const Matrix gv_swapped = aal_grad(in.q, in.k_c, in.v_c, in.k, in.v, 4, AalParam::v_c);
        EXPECT_LE(max_abs_diff(gv, gv_swapped), 1e-14);
    }
}

TEST(AalGrad, SharedKeysGiveOppositeValueGradients) {
    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        const auto in = random_inputs(rng, 3, 3, 4, 4);
        const Matrix gv = aal_grad(in.q, in.k, in.v, in.k, in.v_c, 4, AalParam::v);
        const Matrix gvc = aal_grad(in.q, in.k, in.v, in.k, in.v_c, 4, AalParam::v_c);
        EXPECT_LE(max_abs_diff(gv, scaled(gvc, -1.0)), 1e-15);
    }
}

TEST(AalGrad, MatchesFiniteDifferences) {
    Rng rng(8);
    for (AalParam p : all_params) {
        for (int t = 0; t < 100; ++t) {
            auto in = random_inputs(rng, 3, 3, 4, 4);
            const Matrix analytic = aal_grad(in.q, in.k, in.v, in.k_c, in.v_c, 4, p);
            const Matrix at = select(in, p);
            const Matrix numeric = finite_diff_grad(
                [&](const Matrix& probe) {
                    select(in, p) = probe;
                    return aal_loss(in.q, in.k, in.v, in.k_c, in.v_c, 4);
                },
                at);
            EXPECT_LE(relative_error(analytic, numeric), 1e-4) << to_string(p) << " trial " << t;
        }
    }
}

TEST(AalGrad, UnequalTokenCountsAndWidths) {
    Rng rng(9);
    for (AalParam p : all_params) {
        AalInputs in{Matrix::random(2, 3, rng), Matrix::random(4, 3, rng), Matrix::random(4, 5, rng),
                     Matrix::random(6, 3, rng), Matrix::random(6, 5, rng)};
        const Matrix analytic = aal_grad(in.q, in.k, in.v, in.k_c, in.v_c, 3, p);
        const Matrix numeric = finite_diff_grad(
            [&](const Matrix& probe) {
                AalInputs copy = in;
                select(copy, p) = probe;
                return aal_loss(copy.q, copy.k, copy.v, copy.k_c, copy.v_c, 3);
            },
            select(in, p));
        EXPECT_LE(relative_error(analytic, numeric), 1e-4) << to_string(p);
    }
}

TEST(ProjectionGrad, ChainRuleThroughRightMultiply) {
    Rng rng(10);
    auto in = random_inputs(rng, 3, 3, 4, 4);
    const Matrix cond = Matrix::random(3, 5, rng), w_v = Matrix::random(5, 4, rng);
    in.v = matmul(cond, w_v);
    const Matrix analytic = projection_grad(cond, aal_grad(in.q, in.k, in.v, in.k_c, in.v_c, 4, AalParam::v));
    const Matrix numeric = finite_diff_grad(
        [&](const Matrix& w) { return aal_loss(in.q, in.k, matmul(cond, w), in.k_c, in.v_c, 4); }, w_v);
    EXPECT_LE(relative_error(analytic, numeric), 1e-4);
}

TEST(DiffusionMse, Basics) {
    Rng rng(11);
    const Matrix n = Matrix::random(3, 4, rng);
    EXPECT_EQ(diffusion_mse(n, n), 0.0);
    EXPECT_EQ(diffusion_mse(Matrix{{1, 1}, {1, 1}}, Matrix(2, 2)), 1.0);
    const Matrix p = Matrix::random(3, 4, rng);
    double s = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j)
            s += (n(i, j) - p(i, j)) * (n(i, j) - p(i, j));
    EXPECT_NEAR(diffusion_mse(n, p), s / 12.0, 1e-15);
    EXPECT_THROW(diffusion_mse(n, Matrix(4, 3)), ShapeError);
}

TEST(TotalLoss, Examples) {
    Rng rng(12);
    const DiffusionSample sample{Matrix::random(2, 3, rng), 10, Matrix::random(2, 3, rng), {}};
    const Matrix pred = Matrix::random(2, 3, rng);
    const double mse = diffusion_mse(sample.noise, pred);
    const std::vector<double> terms{0.5, 0.5};
    EXPECT_EQ(total_loss(sample, pred, terms, {0.0, AalAggregation::sum}), mse);
    EXPECT_EQ(total_loss(sample, pred, {}, LossConfig{}), mse);
    EXPECT_NEAR(total_loss(sample, pred, terms, {2.0, AalAggregation::sum}), mse + 2.0, 1e-15);
    EXPECT_NEAR(total_loss(sample, pred, terms, {2.0, AalAggregation::mean}), mse + 1.0, 1e-15);
    EXPECT_EQ(LossConfig{}.lambda, 0.1);
}

TEST(TotalLoss, NegativeTermIsDomainError) {
    Rng rng(13);
    const DiffusionSample sample{Matrix::random(2, 2, rng), 1, Matrix::random(2, 2, rng), {}};
    const std::vector<double> terms{0.2, -1e-9};
    EXPECT_THROW(total_loss(sample, sample.noise, terms, LossConfig{}), DomainError);
}

TEST(TotalLoss, MonotoneInLambda) {
    Rng rng(14);
    const DiffusionSample sample{Matrix::random(2, 2, rng), 1, Matrix::random(2, 2, rng), {}};
    const Matrix pred = Matrix::random(2, 2, rng);
    const std::vector<double> terms{0.3, 1.2, 0.01};
    double prev = -1.0;
    for (double lambda = 0.0; lambda <= 5.0; lambda += 0.25) {
        const double l = total_loss(sample, pred, terms, {lambda, AalAggregation::sum});
        EXPECT_GE(l, prev);
        prev = l;
    }
}

TEST(KernelChecks, AllPassInCleanBuild) {
    const KernelReport r = run_kernel_checks(0, 20);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.checks.size(), 8u);
    for (const auto& c : r.checks)
        EXPECT_LE(c.max_error, c.tolerance) << c.name;
}

TEST(KernelChecks, SeedDeterminesReport) {
    const auto a = kernel_report_to_json(run_kernel_checks(3, 10)).dump();
    const auto b = kernel_report_to_json(run_kernel_checks(3, 10)).dump();
    EXPECT_EQ(a, b);
}
