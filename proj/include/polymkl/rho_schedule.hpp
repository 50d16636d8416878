#pragma once

#include "polymkl/common.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace polymkl {

/// Per-degree penalty weights rho_d^2, d = 0..D. Every product kernel of
/// degree d shares rho_d.
class RhoSchedule {
public:
    explicit RhoSchedule(std::vector<double> rho_sq) : rho_sq_(std::move(rho_sq))
    {
        if (rho_sq_.empty()) throw InvalidArgument("rho schedule: need at least one entry (degree 0)");
        for (double v : rho_sq_)
            if (!(v > 0.0) || !std::isfinite(v))
                throw InvalidArgument("rho schedule: entries must be finite and > 0");
    }

    static RhoSchedule uniform(int max_degree, double value = 1.0)
    {
        return RhoSchedule(std::vector<double>(static_cast<std::size_t>(max_degree) + 1, value));
    }

    /// Multiplying the whole penalty by lambda is the same as rho^2 -> lambda rho^2.
    RhoSchedule with_lambda(double lambda) const
    {
        if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InvalidArgument("lambda must be finite and > 0");
        auto scaled = rho_sq_;
        for (auto& v : scaled) v *= lambda;
        return RhoSchedule(std::move(scaled));
    }

    int max_degree() const { return static_cast<int>(rho_sq_.size()) - 1; }
    double rho_sq(int d) const { return rho_sq_.at(static_cast<std::size_t>(d)); }
    const std::vector<double>& values() const { return rho_sq_; }

private:
    std::vector<double> rho_sq_;
};

} // namespace polymkl
