#pragma once

#include "polymkl/common.hpp"
#include "polymkl/dual.hpp"
#include "polymkl/gradient.hpp"
#include "polymkl/kernelset.hpp"
#include "polymkl/rho_schedule.hpp"
#include "polymkl/sampler.hpp"
#include "polymkl/sparse_theta.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace polymkl {

/// One row of the per-iteration trace. J and C are evaluated at the iterate
/// the step starts from.
struct RunRecord {
    std::int64_t iter = 0;
    double wall_time = 0.0;   // seconds since the run started
    double J_value = 0.0;
    double C_value = 0.0;
    std::size_t support_size = 0;
    double theta_norm = 0.0;
};

/// Psi(x) = |x|^2 / 2 on the nonnegative orthant, projected onto the unit
/// l2 ball. The mirror step is a plain gradient step and the Bregman
/// projection is the Euclidean one.
struct EuclideanPotential {
    /// Change to coordinate i for gradient estimate value g and step eta.
    static double coordinate_delta(double g, double eta) { return -eta * g; }

    /// Rescales onto the ball if outside; returns the factor applied.
    static double project(SparseTheta& theta)
    {
        const double nrm = theta.norm();
        if (nrm > 1.0 + kBallSlack) {
            theta.rescale(1.0 / nrm);
            return 1.0 / nrm;
        }
        return 1.0;
    }
};

/// Running average of the iterates theta^(0), theta^(1), ... kept lazily.
/// Between two touches a coordinate only moves through the global scale, so
/// its contribution over that stretch is raw_i times a difference of prefix
/// sums of the scale.
class LazyAverage {
public:
    /// Adds the current iterate (represented by its scale) to the average.
    void push_iterate(double scale) { prefix_.push_back(prefix_.back() + scale); }

    std::size_t count() const { return prefix_.size() - 1; }

    /// Must be called before raw_i changes from `old_raw`.
    void on_touch(const MultiIndex& idx, double old_raw)
    {
        auto [it, inserted] = entries_.try_emplace(idx, Entry{0.0, count()});
        if (!inserted) flush(it->second, old_raw);
        it->second.last = count();
    }

    /// Must be called before every raw weight is multiplied by a common factor.
    /// Every live entry is flushed, so the prefix can restart from zero; stale
    /// entries only ever multiply a zero raw weight.
    void on_fold(const SparseTheta& theta)
    {
        for (const auto& [idx, raw] : theta.raw()) on_touch(idx, raw);
        prefix_.back() = 0.0;
    }

    SparseTheta finalize(const SparseTheta& current) const
    {
        if (count() == 0) throw InvalidArgument("average: no iterates recorded");
        SparseTheta::Map avg;
        const double inv = 1.0 / static_cast<double>(count());
        for (const auto& [idx, e] : entries_) {
            const double total = e.acc + current.raw_value(idx) * (prefix_[count()] - prefix_[e.last]);
            if (total > 0.0) avg.emplace_hint(avg.end(), idx, total * inv);
        }
        return SparseTheta::from_values(avg);
    }

private:
    struct Entry {
        double acc;
        std::size_t last;   // first iterate index whose raw value is the current one
    };

    void flush(Entry& e, double raw) const { e.acc += raw * (prefix_[count()] - prefix_[e.last]); }

    std::vector<double> prefix_{0.0};
    std::map<MultiIndex, Entry> entries_;
};

/// Sparse theta together with the combined Gram matrix maintained
/// incrementally as K_theta = scale * K_raw, and the lazy iterate average.
template <class Potential = EuclideanPotential>
class MirrorDescentState {
public:
    /// Scale below which it is folded into the raw weights. Raw weights grow
    /// like 1/scale while prefix-sum differences keep absolute precision, so
    /// this bounds the averaging error.
    static constexpr double kMinScale = 1e-3;

    MirrorDescentState(const BaseKernelSet& ks, const RhoSchedule& rho)
        : ks_(&ks), rho_(&rho), K_raw_(Matrix::Zero(ks.n(), ks.n()))
    {
        if (rho.max_degree() < ks.max_degree()) throw InvalidArgument("optimizer: rho schedule shorter than D");
    }

    const SparseTheta& theta() const { return theta_; }
    std::int64_t steps() const { return steps_; }
    Matrix k_theta() const { return theta_.scale() * K_raw_; }

    /// Adds theta^(k) to the running average (call once per iterate).
    void record_iterate() { average_.push_iterate(theta_.scale()); }

    /// theta <- Proj(theta - eta * g_hat) for a single-coordinate estimate.
    void step(const GradSample& sample, double eta)
    {
        if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidArgument("step: eta must be finite and > 0");
        if (!std::isfinite(sample.value)) throw NumericalError("step: non-finite gradient estimate");
        ++steps_;
        const double delta = Potential::coordinate_delta(sample.value, eta);
        if (delta == 0.0) return;

        const MultiIndex& idx = sample.index;
        average_.on_touch(idx, theta_.raw_value(idx));
        const double raw_change = theta_.add(idx, delta);
        if (raw_change != 0.0)
            K_raw_.noalias() += (raw_change / rho_->rho_sq(idx.degree())) * product_kernel_matrix(*ks_, idx);
        Potential::project(theta_);

        if (theta_.scale() < kMinScale) {
            average_.on_fold(theta_);
            K_raw_ *= theta_.scale();
            theta_.fold_scale();
        }
    }

    /// Average of every recorded iterate.
    SparseTheta average_theta() const { return average_.finalize(theta_); }

    Matrix rebuild_k_theta() const { return assemble_k_theta(theta_, *ks_, *rho_); }

    /// Relative Frobenius distance between the maintained and rebuilt K_theta.
    double k_theta_drift() const
    {
        const Matrix rebuilt = rebuild_k_theta();
        const double ref = rebuilt.norm();
        const double diff = (k_theta() - rebuilt).norm();
        return ref > 0.0 ? diff / ref : diff;
    }

    /// Replaces the maintained Gram by a fresh rebuild.
    void resync()
    {
        K_raw_ = rebuild_k_theta() / theta_.scale();
    }

private:
    const BaseKernelSet* ks_;
    const RhoSchedule* rho_;
    SparseTheta theta_;
    Matrix K_raw_;
    LazyAverage average_;
    std::int64_t steps_ = 0;
};

using OptimizerState = MirrorDescentState<EuclideanPotential>;

/// eta = sqrt(2 * sigma * delta / (B T)) with modulus sigma = 1 and
/// delta = sup Psi - Psi(0) = 1/2 on the unit ball, i.e. 1 / sqrt(B T).
inline double default_step_size(double B_estimate, std::int64_t T)
{
    if (!(B_estimate > 0.0) || T < 1) throw InvalidArgument("default_step_size: need B > 0 and T >= 1");
    return std::sqrt(1.0 / (B_estimate * static_cast<double>(T)));
}

/// Gradient mass C at theta = 0, where alpha = y / n.
inline double initial_mass(const Vector& y, const BaseKernelSet& ks, const RhoSchedule& rho)
{
    const Vector alpha = y / static_cast<double>(y.size());
    return total_mass_C(degree_masses(alpha, ks, rho));
}

struct SolverOptions {
    std::int64_t iterations = 1000;   // T
    std::optional<double> step;       // overrides the default 1/sqrt(C0^2 T)
    std::uint64_t seed = 1;
    std::int64_t checkpoint_every = 0;   // 0 disables the K_theta rebuild check
    double c_bound_factor = 10.0;     // flag iterations with C > factor * C0
    std::function<void(const RunRecord&)> on_record;   // called as each record is produced
};

struct RunResult {
    SparseTheta theta_avg;    // (1/T) sum_{k<T} theta^(k)
    SparseTheta theta_last;   // theta^(T)
    DualState final;          // dual solve at theta_avg
    double J_last = 0.0;      // J(theta_last)
    std::vector<RunRecord> records;
    bool converged = false;   // stopped early on a zero gradient
    double C0 = 0.0;
    double step_size = 0.0;
    double max_k_theta_drift = 0.0;
    std::int64_t c_bound_exceeded = 0;
    std::vector<std::int64_t> sampled_degree_counts;   // per degree 0..D
};

/// Shared loop: solve the dual at the current iterate, ask `estimator` for a
/// one-coordinate gradient estimate, take a projected step. `estimator` is
/// called as estimator(alpha, masses, rng) -> GradSample.
template <class Estimator>
RunResult run_with_estimator(const SolverOptions& opts, const Vector& y, const BaseKernelSet& ks,
                             const RhoSchedule& rho, Estimator&& estimator)
{
    if (opts.iterations < 1) throw InvalidArgument("run: need at least one iteration");
    if (y.size() != ks.n()) throw InvalidArgument("run: target length does not match kernel size");

    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();

    RunResult result;
    result.C0 = initial_mass(y, ks, rho);
    result.sampled_degree_counts.assign(static_cast<std::size_t>(ks.max_degree()) + 1, 0);
    if (opts.step) {
        if (!(*opts.step > 0.0)) throw InvalidArgument("run: step override must be > 0");
        result.step_size = *opts.step;
    } else if (result.C0 > 0.0) {
        result.step_size = default_step_size(result.C0 * result.C0, opts.iterations);
    }

    OptimizerState state(ks, rho);
    Rng rng(opts.seed);
    result.records.reserve(static_cast<std::size_t>(opts.iterations));

    for (std::int64_t k = 1; k <= opts.iterations; ++k) {
        state.record_iterate();
        const DualState dual = solve_alpha(state.k_theta(), y);
        const DegreeMasses masses = degree_masses(dual.alpha, ks, rho);
        const double C = total_mass_C(masses);

        RunRecord rec;
        rec.iter = k;
        rec.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
        rec.J_value = dual.J_value;
        rec.C_value = C;
        rec.support_size = state.theta().support_size();
        rec.theta_norm = state.theta().norm();
        result.records.push_back(rec);
        if (opts.on_record) opts.on_record(rec);

        if (!(C > 0.0)) {
            result.converged = true;
            break;
        }
        if (C > opts.c_bound_factor * result.C0) ++result.c_bound_exceeded;

        GradSample sample = estimator(dual.alpha, masses, rng);
        ++result.sampled_degree_counts[static_cast<std::size_t>(sample.index.degree())];
        state.step(sample, result.step_size);

        if (opts.checkpoint_every > 0 && k % opts.checkpoint_every == 0) {
            result.max_k_theta_drift = std::max(result.max_k_theta_drift, state.k_theta_drift());
            state.resync();
        }
    }

    result.theta_last = state.theta();
    result.theta_avg = state.average_theta();
    result.final = solve_at(result.theta_avg, ks, rho, y);
    result.J_last = objective_J(result.theta_last, ks, rho, y);
    return result;
}

/// Projected stochastic gradient on the unit l2 ball with gradient estimates
/// importance-sampled from q proportional to |grad J|.
inline RunResult run(const SolverOptions& opts, const Vector& y, const BaseKernelSet& ks, const RhoSchedule& rho)
{
    PolynomialKernelSampler sampler;
    return run_with_estimator(opts, y, ks, rho, [&](const Vector& alpha, const DegreeMasses& masses, Rng& rng) {
        return importance_estimate(sampler.sample(alpha, ks, rho, masses, rng), masses);
    });
}

} // namespace polymkl
