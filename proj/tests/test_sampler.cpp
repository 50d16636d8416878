#include "polymkl/sampler.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <chrono>

using namespace polymkl;
namespace pt = polymkl::testing;

namespace {

std::map<MultiIndex, double> empirical(const Vector& a, const BaseKernelSet& ks, const RhoSchedule& rho, int draws,
                                       std::uint64_t seed)
{
    std::map<MultiIndex, double> freq;
    PolynomialKernelSampler sampler;
    const auto m = degree_masses(a, ks, rho);
    Rng rng(seed);
    for (int k = 0; k < draws; ++k) freq[sampler.sample(a, ks, rho, m, rng)] += 1.0 / draws;
    return freq;
}

} // namespace

TEST(Sampler, ScalarEqualMasses)
{
    const BaseKernelSet ks((Matrix(1, 1) << 1.0).finished(), false, 1);
    const Vector a = Vector::Ones(1);
    const auto rho = RhoSchedule::uniform(1);
    const auto q = brute_force_q(a, ks, rho, 1);
    EXPECT_DOUBLE_EQ(q.at({}), 0.5);
    EXPECT_DOUBLE_EQ(q.at({0}), 0.5);
    const auto f = empirical(a, ks, rho, 40000, 3);
    EXPECT_EQ(f.size(), 2u);   // degree 1 forces z1 = 0
    EXPECT_NEAR(f.at({0}), 0.5, 3 * std::sqrt(0.25 / 40000));
}

TEST(Sampler, ScalarUnequalMasses)
{
    const BaseKernelSet ks((Matrix(1, 1) << std::sqrt(2.0)).finished(), false, 1);
    const Vector a = Vector::Ones(1);
    const auto rho = RhoSchedule::uniform(1);
    const auto q = brute_force_q(a, ks, rho, 1);
    EXPECT_NEAR(q.at({0}), 2.0 / 3.0, 1e-15);
    const auto f = empirical(a, ks, rho, 40000, 4);
    EXPECT_NEAR(f.at({0}), 2.0 / 3.0, 3 * std::sqrt(2.0 / 9.0 / 40000));
}

TEST(Sampler, TotalVariationAgainstEnumeration)
{
    const Matrix x = pt::random_matrix(10, 3, 17);
    const BaseKernelSet ks(x, false, 2);
    const Vector a = pt::random_vector(10, 18);
    const auto rho = RhoSchedule::uniform(2);
    const auto q = brute_force_q(a, ks, rho, 2);
    ASSERT_EQ(q.size(), 13u);
    const auto f = empirical(a, ks, rho, 50000, 19);
    double tv = 0.0;
    for (const auto& [idx, p] : q) tv += std::abs(p - (f.count(idx) ? f.at(idx) : 0.0));
    for (const auto& [idx, p] : f) EXPECT_TRUE(q.count(idx)) << idx;
    EXPECT_LE(0.5 * tv, 0.02);
}

TEST(Sampler, DeterministicGivenSeed)
{
    const Matrix x = pt::random_matrix(8, 3, 2);
    const BaseKernelSet ks(x, true, 3);
    const Vector a = pt::random_vector(8, 3);
    const auto rho = RhoSchedule::uniform(3);
    PolynomialKernelSampler s1, s2;
    Rng r1(99), r2(99);
    for (int k = 0; k < 200; ++k) EXPECT_EQ(s1.sample(a, ks, rho, r1), s2.sample(a, ks, rho, r2));
}

TEST(Sampler, RejectsZeroMass)
{
    const BaseKernelSet ks(pt::random_matrix(4, 2, 1), false, 2);
    Rng rng(1);
    EXPECT_THROW(sample_multi_index(Vector::Zero(4), ks, RhoSchedule::uniform(2), rng), InvalidArgument);
}

TEST(Sampler, TelescopingIdentity)
{
    // sum_j tr(M .* K_j .* S^{.p}) == tr(M .* S^{.p+1}) for accreted M.
    const Matrix x = pt::random_matrix(9, 4, 23);
    const BaseKernelSet ks(x, true, 3);
    const Vector a = pt::random_vector(9, 24);
    Matrix M = a * a.transpose();
    for (int z : {2, 0, 4}) {
        for (int p = 0; p < 3; ++p) {
            double lhs = 0.0;
            for (int j = 0; j < ks.r(); ++j) lhs += M.cwiseProduct(ks.base(j)).cwiseProduct(ks.power(p)).sum();
            const double rhs = M.cwiseProduct(ks.power(p + 1)).sum();
            EXPECT_LE(std::abs(lhs - rhs), 1e-9 * std::max(std::abs(rhs), 1e-300));
        }
        M = M.cwiseProduct(ks.base(z));
    }
}

TEST(BruteForceQ, SingleAtomSymmetryAndDegreeSums)
{
    {
        const BaseKernelSet ks((Matrix(2, 1) << 1.0, 2.0).finished(), false, 1);
        const auto q = brute_force_q((Vector(2) << 1.0, -1.0).finished(), ks, RhoSchedule::uniform(1), 1);
        EXPECT_EQ(q.at({0}), 1.0);
        EXPECT_EQ(q.at({}), 0.0);
    }
    const Matrix x = pt::random_matrix(7, 3, 31);
    const BaseKernelSet ks(x, false, 2);
    const RhoSchedule rho({0.5, 1.0, 3.0});
    const Vector a = pt::random_vector(7, 32);
    const auto q = brute_force_q(a, ks, rho, 2);
    EXPECT_EQ(q.at({0, 1}), q.at({1, 0}));
    EXPECT_EQ(q.at({1, 2}), q.at({2, 1}));

    const auto m = degree_masses(a, ks, rho);
    std::vector<double> by_degree(3, 0.0);
    double total = 0.0;
    for (const auto& [idx, p] : q) {
        by_degree[static_cast<std::size_t>(idx.degree())] += p;
        total += p;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (int d = 0; d <= 2; ++d)
        EXPECT_NEAR(by_degree[static_cast<std::size_t>(d)], m.delta[static_cast<std::size_t>(d)] / m.total, 1e-12);

    EXPECT_THROW(brute_force_q(a, ks, rho, 2, 5), InvalidArgument);
}

TEST(Sampler, MarginalDegreeLaw)
{
    const Matrix x = pt::random_matrix(10, 3, 41);
    const BaseKernelSet ks(x, false, 3);
    const Vector a = pt::random_vector(10, 42);
    const RhoSchedule rho({1.0, 1.0, 1.0, 4.0});
    const auto m = degree_masses(a, ks, rho);
    const int draws = 40000;
    std::vector<double> counts(4, 0.0);
    PolynomialKernelSampler sampler;
    Rng rng(43);
    for (int k = 0; k < draws; ++k) counts[static_cast<std::size_t>(sampler.sample(a, ks, rho, m, rng).degree())] += 1;
    for (int d = 0; d <= 3; ++d) {
        const double p = m.delta[static_cast<std::size_t>(d)] / m.total;
        EXPECT_LE(std::abs(counts[static_cast<std::size_t>(d)] / draws - p), 3 * std::sqrt(p * (1 - p) / draws) + 1e-12);
    }
}

TEST(Sampler, CostScalesLinearlyInR)
{
    // Time per sampled factor (one O(r n^2) pass) at fixed n, D.
    auto per_factor = [](int r) {
        const Matrix x = pt::random_matrix(80, r, 50 + static_cast<std::uint64_t>(r));
        const BaseKernelSet ks(x, false, 2);
        const Vector a = pt::random_vector(80, 51);
        const auto rho = RhoSchedule::uniform(2);
        const auto m = degree_masses(a, ks, rho);
        PolynomialKernelSampler sampler;
        Rng rng(52);
        long factors = 0;
        const auto start = std::chrono::steady_clock::now();
        for (int k = 0; k < 400; ++k) factors += sampler.sample(a, ks, rho, m, rng).degree();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return secs / static_cast<double>(std::max(1L, factors));
    };
    per_factor(4);   // warm-up
    const double t4 = per_factor(4), t16 = per_factor(16);
    const double ratio = t16 / t4;
    EXPECT_GE(ratio, 4.0 / 2.0 / 1.5) << "ratio " << ratio;   // fixed O(n^2) overhead per factor dilutes the low end
    EXPECT_LE(ratio, 4.0 * 2.0) << "ratio " << ratio;
}
