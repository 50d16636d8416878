#pragma once

#include "polymkl/common.hpp"
#include "polymkl/multi_index.hpp"

#include <cmath>
#include <map>
#include <string>

namespace polymkl {

/// Norm slack below which a point counts as inside the unit ball; keeps the
/// projection idempotent under round-off.
inline constexpr double kBallSlack = 1e-14;

/// Kernel weights theta with few nonzeros, stored as theta_i = scale * raw_i
/// so that a global rescale (the projection onto the l2 ball) costs O(1).
/// Stored raw weights are strictly positive; zeros are evicted.
class SparseTheta {
public:
    using Map = std::map<MultiIndex, double>;

    SparseTheta() = default;

    /// Nonnegative finite weights; zeros are dropped.
    static SparseTheta from_values(const Map& values)
    {
        SparseTheta t;
        for (const auto& [idx, v] : values) {
            if (!std::isfinite(v) || v < 0.0) throw InvalidArgument("theta: weights must be finite and >= 0");
            if (v > 0.0) t.raw_.emplace(idx, v);
        }
        t.recompute_norm();
        return t;
    }

    double scale() const { return scale_; }
    const Map& raw() const { return raw_; }

    double value(const MultiIndex& idx) const
    {
        const auto it = raw_.find(idx);
        return it == raw_.end() ? 0.0 : scale_ * it->second;
    }

    double raw_value(const MultiIndex& idx) const
    {
        const auto it = raw_.find(idx);
        return it == raw_.end() ? 0.0 : it->second;
    }

    double norm_sq() const { return scale_ * scale_ * raw_norm_sq_; }
    double norm() const { return std::sqrt(norm_sq()); }
    std::size_t support_size() const { return raw_.size(); }
    bool empty() const { return raw_.empty(); }

    /// Materialized theta values (scale folded in).
    Map values() const
    {
        Map out;
        for (const auto& [idx, v] : raw_) out.emplace_hint(out.end(), idx, scale_ * v);
        return out;
    }

    /// theta_i <- max(theta_i + delta, 0). Returns the applied change in raw units.
    double add(const MultiIndex& idx, double delta)
    {
        if (!std::isfinite(delta)) throw NumericalError("theta: non-finite update");
        auto it = raw_.find(idx);
        const double old_raw = it == raw_.end() ? 0.0 : it->second;
        double new_raw = old_raw + delta / scale_;
        if (new_raw <= 0.0) new_raw = 0.0;
        raw_norm_sq_ += new_raw * new_raw - old_raw * old_raw;
        if (raw_norm_sq_ < 0.0) raw_norm_sq_ = 0.0;
        if (new_raw == 0.0) {
            if (it != raw_.end()) raw_.erase(it);
        } else if (it == raw_.end()) {
            raw_.emplace(idx, new_raw);
        } else {
            it->second = new_raw;
        }
        return new_raw - old_raw;
    }

    /// theta <- factor * theta
    void rescale(double factor)
    {
        if (!(factor > 0.0) || !std::isfinite(factor)) throw NumericalError("theta: invalid rescale factor");
        scale_ *= factor;
    }

    /// Folds the scale into the raw weights; scale becomes 1.
    void fold_scale()
    {
        for (auto& [idx, v] : raw_) v *= scale_;
        scale_ = 1.0;
        recompute_norm();
    }

    void recompute_norm()
    {
        raw_norm_sq_ = 0.0;
        for (const auto& [idx, v] : raw_) raw_norm_sq_ += v * v;
    }

    /// Direct recomputation of ||theta||^2, bypassing the cache.
    double norm_sq_direct() const
    {
        double s = 0.0;
        for (const auto& [idx, v] : raw_) s += (scale_ * v) * (scale_ * v);
        return s;
    }

    bool feasible(double tol = 1e-12) const
    {
        for (const auto& [idx, v] : raw_)
            if (!(v > 0.0)) return false;
        return scale_ > 0.0 && norm() <= 1.0 + tol;
    }

private:
    double scale_ = 1.0;
    Map raw_;
    double raw_norm_sq_ = 0.0;
};

/// Euclidean projection of an arbitrary finite point onto the nonnegative part
/// of the unit l2 ball: clip negatives, then shrink onto the sphere if outside.
inline SparseTheta project_pos_l2ball(const SparseTheta::Map& point)
{
    SparseTheta::Map clipped;
    for (const auto& [idx, v] : point) {
        if (!std::isfinite(v)) throw InvalidArgument("projection: non-finite coordinate");
        if (v > 0.0) clipped.emplace_hint(clipped.end(), idx, v);
    }
    auto theta = SparseTheta::from_values(clipped);
    if (const double nrm = theta.norm(); nrm > 1.0 + kBallSlack) theta.rescale(1.0 / nrm);
    return theta;
}

inline SparseTheta project_pos_l2ball(const SparseTheta& theta)
{
    SparseTheta out = theta;
    if (const double nrm = out.norm(); nrm > 1.0 + kBallSlack) out.rescale(1.0 / nrm);
    return out;
}

} // namespace polymkl
