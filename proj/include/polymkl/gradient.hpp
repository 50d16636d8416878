#pragma once

#include "polymkl/common.hpp"
#include "polymkl/kernelset.hpp"
#include "polymkl/multi_index.hpp"
#include "polymkl/rho_schedule.hpp"

#include <cmath>
#include <vector>

namespace polymkl {

/// dJ/dtheta_i = -kGradScale * alpha^T K_i alpha / rho_i^2. The 1/2 comes from
/// the 1/2 in front of the penalty; the finite-difference tests pin it.
inline constexpr double kGradScale = 0.5;

inline double quadratic_form(const Vector& alpha, const Matrix& K)
{
    return alpha.dot(K * alpha);
}

/// One coordinate of the exact gradient of J. Always <= 0 for PSD K_i.
inline double grad_component(const Vector& alpha, const Matrix& K_i, double rho_sq_d)
{
    if (K_i.rows() != alpha.size() || K_i.cols() != alpha.size())
        throw InvalidArgument("grad_component: dimension mismatch");
    if (!(rho_sq_d > 0.0)) throw InvalidArgument("grad_component: rho^2 must be > 0");
    return -kGradScale * quadratic_form(alpha, K_i) / rho_sq_d;
}

/// Gradient mass of each degree: delta(d) = alpha^T S^{.d} alpha / rho_d^2,
/// i.e. the summed |gradient| of all ordered d-tuples (up to kGradScale).
struct DegreeMasses {
    std::vector<double> delta;
    double total = 0.0;
};

inline DegreeMasses degree_masses(const Vector& alpha, const BaseKernelSet& ks, const RhoSchedule& rho)
{
    const int D = ks.max_degree();
    if (rho.max_degree() < D) throw InvalidArgument("degree_masses: rho schedule shorter than kernel degree");
    if (alpha.size() != ks.n()) throw InvalidArgument("degree_masses: alpha length mismatch");
    DegreeMasses m;
    m.delta.resize(static_cast<std::size_t>(D) + 1);
    for (int d = 0; d <= D; ++d) {
        const double v = quadratic_form(alpha, ks.power(d)) / rho.rho_sq(d);
        // S^{.d} is PSD; tiny negatives are round-off.
        m.delta[static_cast<std::size_t>(d)] = v < 0.0 ? 0.0 : v;
        m.total += m.delta[static_cast<std::size_t>(d)];
    }
    return m;
}

/// C = ||grad J||_1. All components share a sign, so this is the plain sum.
inline double total_mass_C(const DegreeMasses& masses)
{
    return kGradScale * masses.total;
}

/// A single-coordinate gradient estimate: value * e_index.
struct GradSample {
    MultiIndex index;
    double value = 0.0;   // g_I / s_I
    double mass = 0.0;    // C at sampling time
};

/// Estimate for an index drawn from q (proportional to |gradient|): the ratio
/// g_I / q_I collapses to -C.
inline GradSample importance_estimate(MultiIndex sampled, const DegreeMasses& masses)
{
    const double C = total_mass_C(masses);
    if (!(C > 0.0)) throw InvalidArgument("importance_estimate: zero gradient mass (converged)");
    return {std::move(sampled), -C, C};
}

/// Estimate for an index drawn from an arbitrary proposal s with s_I > 0.
inline GradSample importance_estimate(MultiIndex sampled, double gradient_component, double proposal_prob,
                                      double mass = 0.0)
{
    if (!(proposal_prob > 0.0)) throw InvalidArgument("importance_estimate: proposal probability must be > 0");
    return {std::move(sampled), gradient_component / proposal_prob, mass};
}

} // namespace polymkl
