#pragma once

#include "polymkl/common.hpp"
#include "polymkl/dual.hpp"
#include "polymkl/gradient.hpp"
#include "polymkl/kernelset.hpp"
#include "polymkl/optimizer.hpp"
#include "polymkl/rho_schedule.hpp"
#include "polymkl/sampler.hpp"
#include "polymkl/sparse_theta.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

namespace polymkl {

/// Every ordered tuple of degree <= D, in lexicographic order.
struct EnumeratedIndexSet {
    std::vector<MultiIndex> tuples;
    std::vector<Matrix> grams;   // empty unless precompute_grams() succeeded

    std::size_t size() const { return tuples.size(); }

    /// Caches every Gram matrix if they fit in `max_bytes`; returns whether it did.
    bool precompute_grams(const BaseKernelSet& ks, std::size_t max_bytes)
    {
        const auto bytes = static_cast<double>(tuples.size()) * static_cast<double>(ks.n()) *
                           static_cast<double>(ks.n()) * sizeof(double);
        if (bytes > static_cast<double>(max_bytes)) return false;
        grams.clear();
        grams.reserve(tuples.size());
        for_each_product_kernel(ks, max_degree(), [&](const MultiIndex&, const Matrix& g) { grams.push_back(g); });
        return true;
    }

    int max_degree() const
    {
        int d = 0;
        for (const auto& t : tuples) d = std::max(d, t.degree());
        return d;
    }

    Matrix gram(const BaseKernelSet& ks, std::size_t k) const
    {
        return grams.empty() ? product_kernel_matrix(ks, tuples[k]) : grams[k];
    }
};

inline EnumeratedIndexSet enumerate_index_set(int r, int max_degree, std::uint64_t guard = kEnumerationGuard)
{
    const auto count = count_index_set(r, max_degree);
    if (count.ordered > guard)
        throw InvalidArgument("enumerate_index_set: " + std::to_string(count.ordered) + " tuples exceed guard " +
                              std::to_string(guard));
    EnumeratedIndexSet set;
    set.tuples.reserve(static_cast<std::size_t>(count.ordered));
    MultiIndex prefix;
    auto rec = [&](auto&& self) -> void {
        set.tuples.push_back(prefix);
        if (prefix.degree() == max_degree) return;
        for (int j = 0; j < r; ++j) {
            prefix.push_back(j);
            self(self);
            prefix.pop_back();
        }
    };
    rec(rec);
    return set;
}

/// Uniform coordinate descent: I_k uniform over the enumerated set and
/// g_hat = |I| g_{I_k} e_{I_k}. Same loop, step rule and averaging as the
/// importance-sampled solver.
inline RunResult run_ucd(const SolverOptions& opts, const Vector& y, const BaseKernelSet& ks, const RhoSchedule& rho,
                         const EnumeratedIndexSet& index_set)
{
    if (index_set.size() == 0) throw InvalidArgument("run_ucd: empty index set");
    const double size = static_cast<double>(index_set.size());
    return run_with_estimator(opts, y, ks, rho, [&](const Vector& alpha, const DegreeMasses& masses, Rng& rng) {
        const std::size_t k = uniform_index(rng, index_set.size());
        const MultiIndex& idx = index_set.tuples[k];
        const double g = grad_component(alpha, index_set.gram(ks, k), rho.rho_sq(idx.degree()));
        return importance_estimate(idx, g, 1.0 / size, total_mass_C(masses));
    });
}

// ---------------------------------------------------------------------------
// Deterministic full-gradient projected descent (optimum oracle)

struct FullGradientOptions {
    std::int64_t max_iterations = 10000;
    double tol = 1e-10;       // stop when |J_prev - J| / J <= tol
    double armijo = 1e-4;
    SparseTheta::Map initial;   // starting point (projected); empty means theta = 0
    std::function<void(const RunRecord&)> on_record;
};

struct FullGradientResult {
    SparseTheta theta_star;
    double J_star = 0.0;
    DualState final;
    std::vector<RunRecord> records;
    bool converged = false;   // false: iteration cap hit, partial result
    std::int64_t iterations = 0;
};

namespace detail {

/// Full gradient over the enumerated set via one depth-first sweep.
inline Vector full_gradient(const Vector& alpha, const BaseKernelSet& ks, const RhoSchedule& rho, int max_degree,
                            std::size_t size)
{
    Vector g(static_cast<Eigen::Index>(size));
    Eigen::Index k = 0;
    for_each_product_kernel(ks, max_degree, [&](const MultiIndex& idx, const Matrix& gram) {
        g(k++) = -kGradScale * quadratic_form(alpha, gram) / rho.rho_sq(idx.degree());
    });
    return g;
}

inline Matrix dense_k_theta(const Vector& theta, const BaseKernelSet& ks, const RhoSchedule& rho, int max_degree)
{
    Matrix K = Matrix::Zero(ks.n(), ks.n());
    Eigen::Index k = 0;
    for_each_product_kernel(ks, max_degree, [&](const MultiIndex& idx, const Matrix& gram) {
        const double w = theta(k++);
        if (w != 0.0) K.noalias() += (w / rho.rho_sq(idx.degree())) * gram;
    });
    return K;
}

inline Vector project_dense(Vector v)
{
    v = v.cwiseMax(0.0);
    if (const double nrm = v.norm(); nrm > 1.0 + kBallSlack) v /= nrm;
    return v;
}

} // namespace detail

/// Projected gradient descent with the exact gradient over all |I|
/// coordinates (O(|I| n^2) per iteration) and backtracking line search.
inline FullGradientResult run_full_gradient(const FullGradientOptions& opts, const Vector& y, const BaseKernelSet& ks,
                                            const RhoSchedule& rho, std::uint64_t guard = kEnumerationGuard)
{
    const int D = ks.max_degree();
    if (rho.max_degree() < D) throw InvalidArgument("run_full_gradient: rho schedule shorter than D");
    const auto index_set = enumerate_index_set(ks.r(), D, guard);
    const auto size = index_set.size();

    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();

    FullGradientResult result;
    Vector theta = Vector::Zero(static_cast<Eigen::Index>(size));
    for (const auto& [idx, v] : opts.initial) {
        const auto it = std::lower_bound(index_set.tuples.begin(), index_set.tuples.end(), idx);
        if (it == index_set.tuples.end() || *it != idx)
            throw InvalidArgument("run_full_gradient: initial point has an index outside the enumerated set");
        theta(it - index_set.tuples.begin()) = v;
    }
    theta = detail::project_dense(std::move(theta));
    DualState dual = solve_alpha(detail::dense_k_theta(theta, ks, rho, D), y);
    double step = 0.0;

    for (std::int64_t it = 1; it <= opts.max_iterations; ++it) {
        const Vector g = detail::full_gradient(dual.alpha, ks, rho, D, size);
        const double C = g.cwiseAbs().sum();

        RunRecord rec;
        rec.iter = it;
        rec.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
        rec.J_value = dual.J_value;
        rec.C_value = C;
        rec.support_size = static_cast<std::size_t>((theta.array() > 0.0).count());
        rec.theta_norm = theta.norm();
        result.records.push_back(rec);
        result.iterations = it;
        if (opts.on_record) opts.on_record(rec);

        if (!(C > 0.0)) {
            result.converged = true;
            break;
        }
        if (step == 0.0) step = 1.0 / g.norm();

        // Backtracking: halve until the Armijo condition along the projection arc holds.
        bool accepted = false;
        Vector candidate;
        DualState cand_dual;
        for (int bt = 0; bt < 200; ++bt) {
            candidate = detail::project_dense(theta - step * g);
            const Vector move = candidate - theta;
            if (move.squaredNorm() == 0.0) break;
            cand_dual = solve_alpha(detail::dense_k_theta(candidate, ks, rho, D), y);
            if (cand_dual.J_value <= dual.J_value + opts.armijo * g.dot(move)) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // No descent available along the projected arc: stationary.
            result.converged = true;
            break;
        }

        const double J_prev = dual.J_value;
        theta = std::move(candidate);
        dual = std::move(cand_dual);
        step *= 2.0;
        const double denom = std::max(std::abs(dual.J_value), std::numeric_limits<double>::min());
        if (std::abs(J_prev - dual.J_value) / denom <= opts.tol) {
            result.converged = true;
            break;
        }
    }

    SparseTheta::Map values;
    for (std::size_t k = 0; k < size; ++k)
        if (theta(static_cast<Eigen::Index>(k)) > 0.0)
            values.emplace_hint(values.end(), index_set.tuples[k], theta(static_cast<Eigen::Index>(k)));
    result.theta_star = SparseTheta::from_values(values);
    result.J_star = dual.J_value;
    result.final = std::move(dual);
    return result;
}

} // namespace polymkl
