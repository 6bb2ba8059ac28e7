#include <gtest/gtest.h>

#include <cmath>

#include "glyphdraw/linalg.hpp"
#include "glyphdraw/rng.hpp"

using namespace glyphdraw;

TEST(Matrix, RejectsNonFiniteAndBadLength) {
    EXPECT_THROW(Matrix(1, 2, {1.0, NAN}), NumericError);
    EXPECT_THROW(Matrix(1, 2, {1.0, INFINITY}), NumericError);
    EXPECT_THROW(Matrix(2, 2, {1.0, 2.0, 3.0}), ShapeError);
}

TEST(Matmul, IdentityLeavesMatrixUnchanged) {
    const Matrix m{{1.5, -2.0}, {0.25, 7.0}};
    EXPECT_EQ(matmul(Matrix::identity(2), m), m);
}

TEST(Matmul, HandExpandedProduct) {
    EXPECT_EQ(matmul(Matrix{{1, 2}, {3, 4}}, Matrix{{0}, {1}}), (Matrix{{2}, {4}}));
}

TEST(Matmul, ZeroAnnihilates) {
    Rng rng(3);
    const Matrix m = Matrix::random(3, 4, rng);
    EXPECT_EQ(matmul(Matrix(2, 3), m), Matrix(2, 4));
}

TEST(Matmul, ShapeErrorNamesBothShapes) {
    try {
        matmul(Matrix(2, 3), Matrix(4, 5));
        FAIL();
    } catch (const ShapeError& e) {
        const std::string what = e.what();
        EXPECT_NE(what.find("2x3"), std::string::npos);
        EXPECT_NE(what.find("4x5"), std::string::npos);
    }
}

TEST(Matmul, AssociativeOnRandom4x4) {
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        const Matrix a = Matrix::random(4, 4, rng), b = Matrix::random(4, 4, rng), c = Matrix::random(4, 4, rng);
        EXPECT_LE(max_abs_diff(matmul(matmul(a, b), c), matmul(a, matmul(b, c))), 1e-10);
    }
}

TEST(Matmul, TransposedVariantAgrees) {
    Rng rng(5);
    const Matrix a = Matrix::random(3, 4, rng), b = Matrix::random(5, 4, rng);
    EXPECT_LE(max_abs_diff(matmul_bt(a, b), matmul(a, transpose(b))), 1e-15);
}

TEST(RowSoftmax, UniformRow) {
    const Matrix p = row_softmax(Matrix{{0, 0, 0}});
    for (double x : p.data())
        EXPECT_NEAR(x, 1.0 / 3.0, 1e-15);
}

TEST(RowSoftmax, SaturatesWithoutOverflow) {
    const Matrix p = row_softmax(Matrix{{1000, 0}});
    EXPECT_NEAR(p(0, 0), 1.0, 1e-12);
    EXPECT_NEAR(p(0, 1), 0.0, 1e-12);
}

TEST(RowSoftmax, LogWeights) {
    const Matrix p = row_softmax(Matrix{{std::log(1.0), std::log(3.0)}});
    EXPECT_NEAR(p(0, 0), 0.25, 1e-15);
    EXPECT_NEAR(p(0, 1), 0.75, 1e-15);
}

TEST(RowSoftmax, EmptyIsShapeError) { EXPECT_THROW(row_softmax(Matrix(0, 0)), ShapeError); }

TEST(RowSoftmax, RowsSumToOne) {
    Rng rng(2);
    for (double scale : {1.0, 10.0, 1e3}) {
        for (int t = 0; t < 100; ++t) {
            const Matrix p = row_softmax(Matrix::random(4, 9, rng, -scale, scale));
            for (std::size_t i = 0; i < p.rows(); ++i) {
                double s = 0.0;
                for (double x : p.row(i))
                    s += x;
                EXPECT_NEAR(s, 1.0, 1e-12);
            }
        }
    }
}

TEST(RowSoftmax, ShiftInvariant) {
    Rng rng(8);
    for (int t = 0; t < 100; ++t) {
        Matrix m = Matrix::random(3, 6, rng, -5, 5);
        Matrix shifted = m;
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const double c = rng.uniform(-50, 50);
            for (double& x : shifted.row(i))
                x += c;
        }
        EXPECT_LE(max_abs_diff(row_softmax(m), row_softmax(shifted)), 1e-12);
    }
}

TEST(Frobenius, Basics) {
    EXPECT_EQ(frobenius_norm(Matrix(3, 3)), 0.0);
    EXPECT_EQ(frobenius_norm(Matrix{{3, 4}}), 5.0);
}

TEST(Frobenius, MatchesElementwiseSum) {
    Rng rng(1);
    for (int t = 0; t < 50; ++t) {
        const Matrix m = Matrix::random(2, 2, rng);
        const double oracle = std::sqrt(m(0, 0) * m(0, 0) + m(0, 1) * m(0, 1) + m(1, 0) * m(1, 0) + m(1, 1) * m(1, 1));
        EXPECT_NEAR(frobenius_norm(m), oracle, 1e-15);
    }
}

TEST(Frobenius, TriangleInequality) {
    Rng rng(4);
    for (int t = 0; t < 500; ++t) {
        const Matrix a = Matrix::random(3, 5, rng, -10, 10), b = Matrix::random(3, 5, rng, -10, 10);
        EXPECT_LE(frobenius_norm(a + b), frobenius_norm(a) + frobenius_norm(b) + 1e-12);
    }
}

TEST(FiniteDiff, SumGivesOnes) {
    Rng rng(6);
    const Matrix at = Matrix::random(2, 3, rng);
    const Matrix g = finite_diff_grad(
        [](const Matrix& m) {
            double s = 0.0;
            for (double x : m.data())
                s += x;
            return s;
        },
        at);
    for (double x : g.data())
        EXPECT_NEAR(x, 1.0, 1e-9);
}

TEST(FiniteDiff, SquaredNormGivesTwiceInput) {
    Rng rng(7);
    const Matrix at = Matrix::random(3, 3, rng);
    const Matrix g = finite_diff_grad(
        [](const Matrix& m) {
            const double n = frobenius_norm(m);
            return n * n;
        },
        at);
    EXPECT_LE(max_abs_diff(g, scaled(at, 2.0)), 1e-8);
}

TEST(FiniteDiff, NonFiniteValueIsNumericError) {
    EXPECT_THROW(finite_diff_grad([](const Matrix&) { return NAN; }, Matrix(1, 1)), NumericError);
    EXPECT_THROW(finite_diff_grad([](const Matrix& m) { return 1.0 / (m(0, 0) - m(0, 0)); }, Matrix(1, 1)),
                 NumericError);
}

TEST(FiniteDiff, BadStepIsDomainError) {
    EXPECT_THROW(finite_diff_grad([](const Matrix&) { return 0.0; }, Matrix(1, 1), 0.0), DomainError);
    EXPECT_THROW(finite_diff_grad([](const Matrix&) { return 0.0; }, Matrix(1, 1), -1e-5), DomainError);
}

TEST(Rng, SameSeedSameStream) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i)
        EXPECT_EQ(a.uniform_int(-5, 5), b.uniform_int(-5, 5));
}

TEST(Rng, BoundedDrawsStayInRange) {
    Rng rng(9);
    for (int i = 0; i < 10000; ++i) {
        const auto x = rng.uniform_int(3, 7);
        EXPECT_GE(x, 3);
        EXPECT_LE(x, 7);
        const double u = rng.uniform01();
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}
