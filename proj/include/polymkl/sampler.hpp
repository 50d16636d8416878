#pragma once

#include "polymkl/common.hpp"
#include "polymkl/gradient.hpp"
#include "polymkl/kernelset.hpp"
#include "polymkl/multi_index.hpp"
#include "polymkl/rho_schedule.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace polymkl {

/// Draws j with probability weights[j] / sum(weights) from one uniform variate.
/// Round-off negatives down to -tol * sum|w| are treated as zero.
inline std::size_t sample_categorical(std::span<const double> weights, Rng& rng, double tol = 1e-12)
{
    double total = 0.0;
    double abs_total = 0.0;
    for (double w : weights) {
        abs_total += std::abs(w);
        if (w > 0.0) total += w;
    }
    for (double w : weights)
        if (w < -tol * abs_total) throw NumericalError("sample_categorical: negative mass (corrupted kernel?)");
    if (!(total > 0.0) || !std::isfinite(total)) throw NumericalError("sample_categorical: no positive mass");

    const double u = uniform01(rng) * total;
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        if (weights[j] <= 0.0) continue;
        cum += weights[j];
        last_positive = j;
        if (u < cum) return j;
    }
    return last_positive;
}

/// Draws ordered tuples from q(i) proportional to alpha^T K_i alpha / rho_{d(i)}^2
/// without enumerating the index set: first the degree from the degree
/// masses, then each factor from its conditional given the prefix, with
/// M <- alpha alpha^T accreting the chosen base kernels. Cost per draw is
/// O(r n^2 D). Scratch matrices are reused between draws, so one sampler must
/// not be shared between threads.
class PolynomialKernelSampler {
public:
    /// Runtime check of the telescoping identity (numerators at one position
    /// summing to the chosen numerator of the previous one).
    static constexpr double kTelescopeTol = 1e-9;

    MultiIndex sample(const Vector& alpha, const BaseKernelSet& ks, const RhoSchedule& rho,
                      const DegreeMasses& masses, Rng& rng)
    {
        if (!(masses.total > 0.0)) throw InvalidArgument("sampler: all degree masses are zero");
        const int r = ks.r();
        const int d = static_cast<int>(sample_categorical(masses.delta, rng));

        MultiIndex out;
        if (d == 0) return out;

        M_.noalias() = alpha * alpha.transpose();
        numer_.resize(static_cast<std::size_t>(r));
        [[maybe_unused]] double expected = masses.delta[static_cast<std::size_t>(d)] * rho.rho_sq(d);
        for (int i = 1; i <= d; ++i) {
            W_ = M_.cwiseProduct(ks.power(d - i));
            double denom = 0.0;
            for (int j = 0; j < r; ++j) {
                numer_[static_cast<std::size_t>(j)] = frobenius_inner(W_, ks.base(j));
                denom += numer_[static_cast<std::size_t>(j)];
            }
            if (denom <= -1e-12) throw NumericalError("sampler: negative conditional normalizer");
            assert(std::abs(denom - expected) <= kTelescopeTol * std::max({std::abs(denom), std::abs(expected), 1e-300}) &&
                   "telescoping identity violated");
            const auto z = static_cast<int>(sample_categorical(numer_, rng));
            expected = numer_[static_cast<std::size_t>(z)];
            out.push_back(z);
            if (i < d) M_.array() *= ks.base(z).array();
        }
        return out;
    }

    MultiIndex sample(const Vector& alpha, const BaseKernelSet& ks, const RhoSchedule& rho, Rng& rng)
    {
        return sample(alpha, ks, rho, degree_masses(alpha, ks, rho), rng);
    }

private:
    Matrix M_;
    Matrix W_;
    std::vector<double> numer_;
};

inline MultiIndex sample_multi_index(const Vector& alpha, const BaseKernelSet& ks, const RhoSchedule& rho, Rng& rng)
{
    PolynomialKernelSampler sampler;
    return sampler.sample(alpha, ks, rho, rng);
}

inline constexpr std::uint64_t kEnumerationGuard = 1'000'000;

/// Exact q over every ordered tuple of degree <= D by enumeration. Test
/// oracle for the sampler; refuses index sets above `guard`.
inline std::map<MultiIndex, double> brute_force_q(const Vector& alpha, const BaseKernelSet& ks,
                                                  const RhoSchedule& rho, int max_degree,
                                                  std::uint64_t guard = kEnumerationGuard)
{
    if (count_index_set(ks.r(), max_degree).ordered > guard)
        throw InvalidArgument("brute_force_q: index set exceeds enumeration guard");
    std::map<MultiIndex, double> q;
    double total = 0.0;
    for_each_product_kernel(ks, max_degree, [&](const MultiIndex& idx, const Matrix& gram) {
        double g = quadratic_form(alpha, gram) / rho.rho_sq(idx.degree());
        if (g < 0.0) g = 0.0;
        q.emplace_hint(q.end(), idx, g);
        total += g;
    });
    if (!(total > 0.0)) throw InvalidArgument("brute_force_q: gradient is identically zero");
    for (auto& [idx, v] : q) v /= total;
    return q;
}

} // namespace polymkl
