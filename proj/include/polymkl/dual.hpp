#pragma once

#include "polymkl/common.hpp"
#include "polymkl/kernelset.hpp"
#include "polymkl/rho_schedule.hpp"
#include "polymkl/sparse_theta.hpp"

#include <Eigen/Cholesky>

#include <string>

namespace polymkl {

/// Per-sample loss l_t and its convex conjugate l*_t. Only the squared loss
/// l_t(tau) = (tau - y_t)^2 / 2 is instantiated.
struct SquaredLoss {
    static double loss(double tau, double y) { return 0.5 * (tau - y) * (tau - y); }
    static double conjugate(double v, double y) { return 0.5 * v * v + v * y; }
    static double conjugate_derivative(double v, double y) { return v + y; }
};

/// Dual solution for a fixed kernel weighting.
struct DualState {
    Vector alpha;       // alpha*(theta)
    Matrix K_theta;     // sum_i theta_i / rho_i^2 K_i
    double J_value = 0.0;

    Eigen::Index n() const { return alpha.size(); }
};

/// Minimizes 1/2 a^T K a + 1/n sum_t l*_t(-n a_t). For the squared loss the
/// minimizer solves (K + n I) a = y and the optimal value of the primal is
/// J = y^T a / 2.
inline DualState solve_alpha(Matrix K_theta, const Vector& y)
{
    const auto n = K_theta.rows();
    if (K_theta.cols() != n || y.size() != n)
        throw InvalidArgument("solve_alpha: K is " + std::to_string(K_theta.rows()) + "x" +
                              std::to_string(K_theta.cols()) + ", y has length " + std::to_string(y.size()));
    if (n == 0) throw InvalidArgument("solve_alpha: empty system");

    Matrix system = K_theta;
    system.diagonal().array() += static_cast<double>(n);
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success || !system.allFinite())
        throw NumericalError("solve_alpha: K_theta + nI is not positive definite (corrupted kernel?)");

    DualState state;
    state.alpha = llt.solve(y);
    if (!state.alpha.allFinite()) throw NumericalError("solve_alpha: non-finite dual solution");
    state.J_value = 0.5 * y.dot(state.alpha);
    state.K_theta = std::move(K_theta);
    return state;
}

/// Regularized empirical risk L_n(K a) + 1/2 a^T K a evaluated from the dual
/// vector (representer form of the primal).
inline double primal_value(const Matrix& K_theta, const Vector& alpha, const Vector& y)
{
    const Vector f = K_theta * alpha;
    double risk = 0.0;
    for (Eigen::Index t = 0; t < y.size(); ++t) risk += SquaredLoss::loss(f(t), y(t));
    return risk / static_cast<double>(y.size()) + 0.5 * alpha.dot(f);
}

/// K_theta = sum over the support of theta_i / rho_{d(i)}^2 K_i, rebuilt from scratch.
inline Matrix assemble_k_theta(const SparseTheta& theta, const BaseKernelSet& ks, const RhoSchedule& rho)
{
    Matrix K = Matrix::Zero(ks.n(), ks.n());
    for (const auto& [idx, raw] : theta.raw()) {
        const double w = theta.scale() * raw / rho.rho_sq(idx.degree());
        K.noalias() += w * product_kernel_matrix(ks, idx);
    }
    return K;
}

inline DualState solve_at(const SparseTheta& theta, const BaseKernelSet& ks, const RhoSchedule& rho, const Vector& y)
{
    return solve_alpha(assemble_k_theta(theta, ks, rho), y);
}

/// J(theta) = inf_w J(w, theta).
inline double objective_J(const SparseTheta& theta, const BaseKernelSet& ks, const RhoSchedule& rho, const Vector& y)
{
    return solve_at(theta, ks, rho, y).J_value;
}

/// Predictions sum_t alpha_t k_theta(x_t, x_q) for each query row.
inline Vector predict(const DualState& state, const SparseTheta& theta, const Matrix& train_inputs,
                      const Matrix& query_inputs, const RhoSchedule& rho)
{
    if (state.alpha.size() != train_inputs.rows())
        throw InvalidArgument("predict: alpha length does not match training rows");
    Vector out = Vector::Zero(query_inputs.rows());
    for (const auto& [idx, raw] : theta.raw()) {
        if (idx.degree() > rho.max_degree()) throw InvalidArgument("predict: theta index exceeds rho degree");
        const double w = theta.scale() * raw / rho.rho_sq(idx.degree());
        out.noalias() += w * (product_kernel_cross(train_inputs, query_inputs, idx) * state.alpha);
    }
    return out;
}

inline double mean_squared_error(const Vector& pred, const Vector& truth)
{
    if (pred.size() != truth.size() || pred.size() == 0) throw InvalidArgument("mse: size mismatch");
    return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

} // namespace polymkl
