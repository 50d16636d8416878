#include "polymkl/gradient.hpp"
#include "polymkl/sampler.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace polymkl;
namespace pt = polymkl::testing;

TEST(GradComponent, ZeroDualAndIdentity)
{
    EXPECT_EQ(grad_component(Vector::Zero(3), pt::random_psd(3, 2, 1), 1.0), 0.0);
    EXPECT_DOUBLE_EQ(grad_component(Vector::Ones(2), Matrix::Identity(2, 2), 1.0), -kGradScale * 2.0);
    EXPECT_THROW(grad_component(Vector::Ones(2), Matrix::Identity(3, 3), 1.0), InvalidArgument);
    EXPECT_THROW(grad_component(Vector::Ones(2), Matrix::Identity(2, 2), 0.0), InvalidArgument);
}

// Central differences of J in every coordinate at an interior theta. This is
// what fixes kGradScale.
TEST(GradComponent, MatchesFiniteDifferencesOfJ)
{
    struct Case { int r; int D; int n; bool constant; std::uint64_t seed; };
    for (const auto& c : {Case{2, 2, 12, false, 1}, Case{3, 2, 20, false, 2}, Case{2, 2, 15, true, 3},
                          Case{3, 1, 8, false, 4}}) {
        const Matrix x = pt::random_matrix(c.n, c.r, c.seed);
        const Vector y = pt::random_vector(c.n, c.seed + 10);
        const BaseKernelSet ks(x, c.constant, c.D);
        const RhoSchedule rho({1.0, 0.5, 2.0});

        const auto tuples = pt::all_tuples(ks.r(), c.D);
        Rng rng(c.seed);
        SparseTheta::Map values;
        for (const auto& t : tuples) values[t] = 0.1 + uniform01(rng);
        double nrm = 0.0;
        for (auto& [k, v] : values) nrm += v * v;
        for (auto& [k, v] : values) v *= 0.5 / std::sqrt(nrm);

        const auto st = solve_at(SparseTheta::from_values(values), ks, rho, y);
        const double h = 1e-5;
        for (const auto& t : tuples) {
            auto plus = values, minus = values;
            plus[t] += h;
            minus[t] -= h;
            const double fd = (objective_J(SparseTheta::from_values(plus), ks, rho, y) -
                               objective_J(SparseTheta::from_values(minus), ks, rho, y)) / (2 * h);
            const double g = grad_component(st.alpha, product_kernel_matrix(ks, t), rho.rho_sq(t.degree()));
            EXPECT_LE(g, 0.0);
            EXPECT_LE(std::abs(g - fd), 1e-5 * (1 + std::abs(fd))) << t << " g=" << g << " fd=" << fd;
        }
    }
}

TEST(DegreeMasses, HandEnumeration)
{
    const Matrix x = (Matrix(1, 1) << std::sqrt(2.0)).finished();
    const BaseKernelSet ks(x, false, 1);
    const auto m = degree_masses((Vector(1) << 1.0).finished(), ks, RhoSchedule::uniform(1));
    ASSERT_EQ(m.delta.size(), 2u);
    EXPECT_NEAR(m.delta[0], 1.0, 1e-15);
    EXPECT_NEAR(m.delta[1], 2.0, 1e-15);
    EXPECT_NEAR(total_mass_C(m), kGradScale * 3.0, 1e-15);

    const auto zero = degree_masses(Vector::Zero(1), ks, RhoSchedule::uniform(1));
    EXPECT_EQ(zero.delta, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(total_mass_C(zero), 0.0);
}

TEST(DegreeMasses, EqualsSumOverOrderedTuples)
{
    const Matrix x = pt::random_matrix(9, 3, 6);
    const BaseKernelSet ks(x, false, 3);
    const RhoSchedule rho({1.0, 2.0, 0.5, 3.0});
    const Vector a = pt::random_vector(9, 7);
    const auto m = degree_masses(a, ks, rho);
    for (int d = 0; d <= 3; ++d) {
        double brute = 0.0;
        for (const auto& t : pt::tuples_of_degree(3, d)) brute += a.dot(pt::gram_from_inputs(x, t) * a);
        const double got = m.delta[static_cast<std::size_t>(d)] * rho.rho_sq(d);
        EXPECT_LE(std::abs(got - brute), 1e-9 * std::abs(brute)) << "degree " << d;
    }
}

TEST(TotalMass, EqualsL1NormOfEnumeratedGradient)
{
    const Matrix x = pt::random_matrix(5, 2, 8);
    const BaseKernelSet ks(x, false, 2);
    const RhoSchedule rho({1.0, 1.5, 0.7});
    const Vector a = pt::random_vector(5, 9);
    double l1 = 0.0;
    for (const auto& t : pt::all_tuples(2, 2))
        l1 += std::abs(grad_component(a, pt::gram_from_inputs(x, t), rho.rho_sq(t.degree())));
    const double C = total_mass_C(degree_masses(a, ks, rho));
    EXPECT_LE(std::abs(C - l1), 1e-9 * l1);
}

TEST(ImportanceEstimate, SingleAtomIsExactGradient)
{
    // alpha sums to zero so the degree-0 mass vanishes and (0) is the only atom.
    const Matrix x = (Matrix(2, 1) << 1.0, 2.0).finished();
    const BaseKernelSet ks(x, false, 1);
    const RhoSchedule rho = RhoSchedule::uniform(1);
    const Vector a = (Vector(2) << 1.0, -1.0).finished();
    const auto m = degree_masses(a, ks, rho);
    EXPECT_EQ(m.delta[0], 0.0);
    PolynomialKernelSampler sampler;
    Rng rng(1);
    for (int k = 0; k < 20; ++k) {
        const auto s = importance_estimate(sampler.sample(a, ks, rho, m, rng), m);
        EXPECT_EQ(s.index, MultiIndex{0});
        EXPECT_DOUBLE_EQ(s.value, grad_component(a, ks.base(0), 1.0));
        EXPECT_DOUBLE_EQ(s.mass, -s.value);
    }
}

TEST(ImportanceEstimate, ZeroMassAndProposalRatio)
{
    DegreeMasses zero{{0.0, 0.0}, 0.0};
    EXPECT_THROW(importance_estimate(MultiIndex{0}, zero), InvalidArgument);
    const auto s = importance_estimate(MultiIndex{1}, -0.3, 0.25);
    EXPECT_DOUBLE_EQ(s.value, -1.2);
    EXPECT_THROW(importance_estimate(MultiIndex{1}, -0.3, 0.0), InvalidArgument);
}

TEST(ImportanceEstimate, UnbiasedAndQWeighted)
{
    // Smaller-sample version of the acceptance check.
    const Matrix x = pt::random_matrix(5, 2, 40);
    const Vector a = pt::random_vector(5, 41);
    const BaseKernelSet ks(x, false, 1);
    const RhoSchedule rho = RhoSchedule::uniform(1);
    const auto m = degree_masses(a, ks, rho);
    const auto tuples = pt::all_tuples(2, 1);

    const int draws = 20000;
    std::map<MultiIndex, double> sum, sum_sq;
    PolynomialKernelSampler sampler;
    Rng rng(5);
    for (int k = 0; k < draws; ++k) {
        const auto s = importance_estimate(sampler.sample(a, ks, rho, m, rng), m);
        sum[s.index] += s.value;
        sum_sq[s.index] += s.value * s.value;
    }
    const double C = total_mass_C(m);
    for (const auto& t : tuples) {
        const double g = grad_component(a, pt::gram_from_inputs(x, t), 1.0);
        const double mean = sum[t] / draws;
        const double var = sum_sq[t] / draws - mean * mean;
        const double se = std::sqrt(var / draws);
        EXPECT_LE(std::abs(mean - g), 3 * se + 1e-12) << t;
        const double p = std::abs(g) / C;
        const double freq = -sum[t] / C / draws;
        EXPECT_LE(std::abs(freq - p), 3 * std::sqrt(p * (1 - p) / draws) + 1e-12) << t;
    }
}
