#include "polymkl/kernelset.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace polymkl;
namespace pt = polymkl::testing;

TEST(BaseKernels, LinearKernelIsOuterProduct)
{
    const Matrix x = (Matrix(2, 1) << 1, -1).finished();
    const BaseKernelSet ks(x, false, 2);
    EXPECT_EQ(ks.r(), 1);
    EXPECT_EQ(ks.base(0), (Matrix(2, 2) << 1, -1, -1, 1).finished());
}

TEST(BaseKernels, ConstantKernelAppended)
{
    const Matrix x = (Matrix(2, 1) << 1, -1).finished();
    const BaseKernelSet ks(x, true, 1);
    ASSERT_EQ(ks.r(), 2);
    EXPECT_TRUE(ks.has_constant());
    EXPECT_EQ(ks.base(1), Matrix::Ones(2, 2));
}

TEST(BaseKernels, SumMatchesIndependentSummation)
{
    const Matrix x = pt::random_matrix(10, 3, 5);
    for (bool constant : {false, true}) {
        const BaseKernelSet ks(x, constant, 3);
        Matrix expected = x * x.transpose();
        if (constant) expected.array() += 1.0;
        EXPECT_LE((ks.sum() - expected).cwiseAbs().maxCoeff(), 1e-12);
        for (int j = 0; j < ks.r(); ++j) {
            EXPECT_EQ(ks.base(j), ks.base(j).transpose());
            EXPECT_GE(pt::min_eigenvalue(ks.base(j)), -1e-8 * std::max(1.0, ks.base(j).norm()));
        }
        EXPECT_EQ(ks.power(0), Matrix::Ones(10, 10));
        for (int d = 0; d < 3; ++d) EXPECT_EQ(ks.power(d + 1), ks.power(d).cwiseProduct(ks.sum()));
    }
}

TEST(HadamardPower, Cases)
{
    EXPECT_EQ(hadamard_power((Matrix(1, 1) << 2).finished(), 3)(0, 0), 8.0);
    const Matrix m = pt::random_matrix(4, 4, 2);
    EXPECT_EQ(hadamard_power(m, 0), Matrix::Ones(4, 4));
    EXPECT_EQ(hadamard_power(m, 1), m);
    Matrix repeated = m;
    for (int k = 1; k < 4; ++k) repeated = repeated.cwiseProduct(m);
    EXPECT_EQ(hadamard_power(m, 4), repeated);
    EXPECT_THROW(hadamard_power(m, -1), InvalidArgument);
}

TEST(ProductKernel, SingleFactorEmptyAndPair)
{
    const Matrix x = pt::random_matrix(6, 3, 8);
    const BaseKernelSet ks(x, false, 3);
    EXPECT_EQ(product_kernel_matrix(ks, {1}), ks.base(1));
    EXPECT_EQ(product_kernel_matrix(ks, {}), Matrix::Ones(6, 6));
    const Matrix pair = product_kernel_matrix(ks, {0, 1});
    for (int t = 0; t < 6; ++t)
        for (int s = 0; s < 6; ++s)
            EXPECT_NEAR(pair(t, s), x(t, 0) * x(s, 0) * x(t, 1) * x(s, 1), 1e-15);
    EXPECT_THROW(product_kernel_matrix(ks, {3}), InvalidArgument);
    EXPECT_THROW(product_kernel_matrix(ks, {0, 0, 0, 0}), InvalidArgument);
}

TEST(ProductKernel, SchurClosureKeepsPsd)
{
    const Matrix x = pt::random_matrix(12, 3, 21);
    const BaseKernelSet ks(x, true, 3);
    for (const auto& idx : pt::all_tuples(ks.r(), 3)) {
        const Matrix g = product_kernel_matrix(ks, idx);
        EXPECT_GE(pt::min_eigenvalue(g), -1e-8 * std::max(1.0, g.norm())) << idx;
    }
}

TEST(ProductKernel, TupleSumEqualsHadamardPowerOfSum)
{
    const Matrix x = pt::random_matrix(7, 3, 4);
    const BaseKernelSet ks(x, true, 3);
    for (int d = 0; d <= 3; ++d) {
        Matrix total = Matrix::Zero(7, 7);
        for (const auto& idx : pt::tuples_of_degree(ks.r(), d)) total += product_kernel_matrix(ks, idx);
        const double scale = ks.power(d).cwiseAbs().maxCoeff();
        EXPECT_LE((total - ks.power(d)).cwiseAbs().maxCoeff(), 1e-9 * scale) << "degree " << d;
    }
}

TEST(ProductKernel, DepthFirstSweepMatchesDirectProducts)
{
    const Matrix x = pt::random_matrix(5, 2, 13);
    const BaseKernelSet ks(x, false, 3);
    std::vector<MultiIndex> seen;
    for_each_product_kernel(ks, 3, [&](const MultiIndex& idx, const Matrix& g) {
        seen.push_back(idx);
        EXPECT_LE((g - pt::gram_from_inputs(x, idx)).cwiseAbs().maxCoeff(), 1e-14);
    });
    EXPECT_EQ(seen.size(), 15u);
    EXPECT_TRUE(std::is_sorted(seen.begin(), seen.end()));
}

TEST(ProductKernelCross, SelfConsistencyAndRecomputation)
{
    const Matrix train = pt::random_matrix(4, 2, 1);
    const Matrix query = pt::random_matrix(3, 2, 2);
    const BaseKernelSet ks(train, true, 2);
    for (const auto& idx : pt::all_tuples(3, 2))
        EXPECT_LE((product_kernel_cross(train, train, idx) - product_kernel_matrix(ks, idx)).cwiseAbs().maxCoeff(),
                  1e-15);

    EXPECT_EQ(product_kernel_cross(train, query, {}), Matrix::Ones(3, 4));
    const Matrix sq = product_kernel_cross(train, query, {0, 0});
    ASSERT_EQ(sq.rows(), 3);
    ASSERT_EQ(sq.cols(), 4);
    for (int q = 0; q < 3; ++q)
        for (int t = 0; t < 4; ++t) EXPECT_NEAR(sq(q, t), std::pow(query(q, 0) * train(t, 0), 2), 1e-15);

    EXPECT_THROW(product_kernel_cross(train, pt::random_matrix(3, 3, 1), {0}), InvalidArgument);
    EXPECT_THROW(product_kernel_cross(train, query, {3}), InvalidArgument);
}

TEST(CountIndexSet, Values)
{
    const auto c53 = count_index_set(5, 3);
    EXPECT_EQ(c53.ordered, 156u);
    EXPECT_EQ(c53.distinct, 56u);
    for (int D = 0; D < 6; ++D) EXPECT_EQ(count_index_set(1, D).ordered, static_cast<std::uint64_t>(D + 1));
    EXPECT_EQ(count_index_set(20, 3).ordered, 8421u);
    EXPECT_EQ(count_index_set(20, 3).distinct, 1771u);
    EXPECT_EQ(count_index_set(60, 3).distinct, 39711u);
    EXPECT_THROW(count_index_set(1000, 10), Error);
    EXPECT_THROW(count_index_set(0, 1), InvalidArgument);
}
