#pragma once

#include "polymkl/common.hpp"
#include "polymkl/dataset.hpp"
#include "polymkl/multi_index.hpp"

#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace polymkl {

/// Elementwise d-th power; d = 0 yields the all-ones matrix.
inline Matrix hadamard_power(const Matrix& mat, int d)
{
    if (d < 0) throw InvalidArgument("hadamard_power: negative exponent " + std::to_string(d));
    Matrix out = Matrix::Ones(mat.rows(), mat.cols());
    for (int k = 0; k < d; ++k) out.array() *= mat.array();
    return out;
}

/// The r per-variable linear Gram matrices K_j = x_j x_j^T (plus an optional
/// all-ones constant kernel appended as the last base index), their sum S,
/// and the cached Hadamard powers S^0 .. S^D. Immutable once built.
class BaseKernelSet {
public:
    BaseKernelSet(const Matrix& inputs, bool include_constant, int max_degree)
        : n_inputs_(static_cast<int>(inputs.cols())), has_constant_(include_constant), max_degree_(max_degree)
    {
        if (max_degree < 0) throw InvalidArgument("kernelset: degree must be nonnegative");
        if (inputs.rows() < 1 || inputs.cols() < 1) throw InvalidArgument("kernelset: empty input matrix");
        if (!inputs.allFinite()) throw InvalidArgument("kernelset: non-finite input");

        const auto n = inputs.rows();
        base_.reserve(static_cast<std::size_t>(inputs.cols()) + (include_constant ? 1 : 0));
        for (Eigen::Index j = 0; j < inputs.cols(); ++j) base_.push_back(inputs.col(j) * inputs.col(j).transpose());
        if (include_constant) base_.push_back(Matrix::Ones(n, n));

        sum_ = Matrix::Zero(n, n);
        for (const auto& k : base_) sum_ += k;

        powers_.reserve(static_cast<std::size_t>(max_degree) + 1);
        powers_.push_back(Matrix::Ones(n, n));
        for (int d = 1; d <= max_degree; ++d) powers_.push_back(powers_.back().cwiseProduct(sum_));
    }

    Eigen::Index n() const { return sum_.rows(); }
    /// Number of base kernels, including the constant kernel when present.
    int r() const { return static_cast<int>(base_.size()); }
    int n_inputs() const { return n_inputs_; }
    int max_degree() const { return max_degree_; }
    bool has_constant() const { return has_constant_; }

    const Matrix& base(int j) const { return base_.at(static_cast<std::size_t>(j)); }
    const std::vector<Matrix>& bases() const { return base_; }
    const Matrix& sum() const { return sum_; }
    /// S^{.d}, elementwise power of the base-kernel sum.
    const Matrix& power(int d) const { return powers_.at(static_cast<std::size_t>(d)); }

    void check_index(const MultiIndex& idx) const
    {
        if (idx.degree() > max_degree_)
            throw InvalidArgument("kernelset: index degree " + std::to_string(idx.degree()) + " exceeds D=" +
                                  std::to_string(max_degree_));
        for (int j : idx)
            if (j < 0 || j >= r())
                throw InvalidArgument("kernelset: base index " + std::to_string(j) + " out of range [0," +
                                      std::to_string(r()) + ")");
    }

private:
    int n_inputs_;
    bool has_constant_;
    int max_degree_;
    std::vector<Matrix> base_;
    Matrix sum_;
    std::vector<Matrix> powers_;
};

inline BaseKernelSet build_base_kernels(const Dataset& data, bool include_constant, int max_degree)
{
    return BaseKernelSet(data.inputs, include_constant, max_degree);
}

/// Gram matrix of the product kernel named by `idx`: K_{r_1} .* ... .* K_{r_d}.
inline Matrix product_kernel_matrix(const BaseKernelSet& ks, const MultiIndex& idx)
{
    ks.check_index(idx);
    if (idx.empty()) return Matrix::Ones(ks.n(), ks.n());
    Matrix out = ks.base(idx[0]);
    for (int i = 1; i < idx.degree(); ++i) out.array() *= ks.base(idx[i]).array();
    return out;
}

/// Cross-Gram (n_query x n_train) of the product kernel between query rows and
/// training rows. Base index `train.cols()` denotes the constant kernel.
inline Matrix product_kernel_cross(const Matrix& train_inputs, const Matrix& query_inputs, const MultiIndex& idx)
{
    if (train_inputs.cols() != query_inputs.cols())
        throw InvalidArgument("product_kernel_cross: train has " + std::to_string(train_inputs.cols()) +
                              " columns, query has " + std::to_string(query_inputs.cols()));
    const auto r = static_cast<int>(train_inputs.cols());
    Matrix out = Matrix::Ones(query_inputs.rows(), train_inputs.rows());
    for (int j : idx) {
        if (j < 0 || j > r) throw InvalidArgument("product_kernel_cross: base index out of range");
        if (j == r) continue;   // constant kernel
        out.array() *= (query_inputs.col(j) * train_inputs.col(j).transpose()).array();
    }
    return out;
}

namespace detail {

template <class Visitor>
void visit_products(const BaseKernelSet& ks, int max_degree, MultiIndex& prefix, const Matrix& gram,
                    std::vector<Matrix>& stack, Visitor& visit)
{
    visit(static_cast<const MultiIndex&>(prefix), gram);
    if (prefix.degree() == max_degree) return;
    auto& child = stack[static_cast<std::size_t>(prefix.degree())];
    for (int j = 0; j < ks.r(); ++j) {
        child = gram.cwiseProduct(ks.base(j));
        prefix.push_back(j);
        visit_products(ks, max_degree, prefix, child, stack, visit);
        prefix.pop_back();
    }
}

} // namespace detail

/// Visits every ordered tuple of degree <= max_degree in lexicographic
/// (depth-first pre-order) order together with its Gram matrix. Each Gram is
/// one Hadamard product away from its parent's, so a full sweep costs
/// O(|I| n^2) with O(D n^2) memory.
template <class Visitor>
void for_each_product_kernel(const BaseKernelSet& ks, int max_degree, Visitor&& visit)
{
    if (max_degree < 0 || max_degree > ks.max_degree())
        throw InvalidArgument("for_each_product_kernel: degree out of range");
    MultiIndex prefix;
    std::vector<Matrix> stack(static_cast<std::size_t>(max_degree));
    const Matrix ones = Matrix::Ones(ks.n(), ks.n());
    detail::visit_products(ks, max_degree, prefix, ones, stack, visit);
}

struct IndexSetCount {
    std::uint64_t ordered;    // sum_{d=0}^D r^d
    std::uint64_t distinct;   // C(r+D, D)
};

/// Sizes of the ordered-tuple index set and of its permutation classes.
/// Throws instead of wrapping on 64-bit overflow.
inline IndexSetCount count_index_set(int r, int max_degree)
{
    if (r < 1 || max_degree < 0) throw InvalidArgument("count_index_set: need r >= 1 and D >= 0");
    constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
    const auto ur = static_cast<std::uint64_t>(r);

    std::uint64_t ordered = 0;
    std::uint64_t term = 1;
    for (int d = 0; d <= max_degree; ++d) {
        if (ordered > kMax - term) throw Error("count_index_set: ordered count overflows 64 bits");
        ordered += term;
        if (d < max_degree) {
            if (term > kMax / ur) throw Error("count_index_set: ordered count overflows 64 bits");
            term *= ur;
        }
    }

    // C(r+D, D) built as a running product that stays integral at each step.
    std::uint64_t distinct = 1;
    for (int k = 1; k <= max_degree; ++k) {
        const std::uint64_t num = ur + static_cast<std::uint64_t>(k);
        const std::uint64_t g = std::gcd(distinct, static_cast<std::uint64_t>(k));
        const std::uint64_t a = distinct / g;
        const std::uint64_t b = num / (static_cast<std::uint64_t>(k) / g);
        if (a > kMax / b) throw Error("count_index_set: distinct count overflows 64 bits");
        distinct = a * b;
    }
    return {ordered, distinct};
}

} // namespace polymkl
