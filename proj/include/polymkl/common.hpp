#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace polymkl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input that violates a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Numerical state that can only arise from upstream corruption (NaN, inf,
/// loss of positive definiteness).
class NumericalError : public Error {
public:
    using Error::Error;
};

using Rng = std::mt19937_64;

/// Uniform draw on [0, 1) built from the top 53 bits, so sequences are
/// identical across standard library implementations.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Uniform integer on [0, n). Rejection sampling keeps it unbiased and
/// library-independent.
inline std::size_t uniform_index(Rng& rng, std::size_t n)
{
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

/// sum_{t,s} a_ts * b_ts
inline double frobenius_inner(const Matrix& a, const Matrix& b)
{
    return a.cwiseProduct(b).sum();
}

} // namespace polymkl
