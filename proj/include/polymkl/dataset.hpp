#pragma once

#include "polymkl/common.hpp"
#include "polymkl/multi_index.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace polymkl {

/// Regression data: n rows of r real inputs plus one real target per row.
struct Dataset {
    Matrix inputs;                       // n x r
    Vector targets;                      // n
    std::vector<std::string> feature_names;

    Eigen::Index n() const { return inputs.rows(); }
    Eigen::Index r() const { return inputs.cols(); }

    /// Throws unless shapes agree and every entry is finite.
    void validate() const
    {
        if (inputs.rows() != targets.size())
            throw InvalidArgument("dataset: inputs have " + std::to_string(inputs.rows()) +
                                  " rows but targets have " + std::to_string(targets.size()));
        if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != inputs.cols())
            throw InvalidArgument("dataset: feature_names size does not match column count");
        if (!inputs.allFinite() || !targets.allFinite())
            throw InvalidArgument("dataset: non-finite entry");
    }

    /// Rows selected by `rows`, in that order.
    Dataset subset(const std::vector<Eigen::Index>& rows) const
    {
        Dataset out;
        out.inputs.resize(static_cast<Eigen::Index>(rows.size()), inputs.cols());
        out.targets.resize(static_cast<Eigen::Index>(rows.size()));
        for (std::size_t k = 0; k < rows.size(); ++k) {
            out.inputs.row(static_cast<Eigen::Index>(k)) = inputs.row(rows[k]);
            out.targets(static_cast<Eigen::Index>(k)) = targets(rows[k]);
        }
        out.feature_names = feature_names;
        return out;
    }
};

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

inline std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline double parse_cell(const std::string& raw, std::size_t row, std::size_t col)
{
    const std::string text = trim(raw);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (text.empty() || used != text.size() || !std::isfinite(value))
        throw InvalidArgument("csv: non-numeric cell '" + text + "' at row " + std::to_string(row) +
                              ", column " + std::to_string(col));
    return value;
}

} // namespace detail

/// Reads comma-separated rows; the final column is the target. Row and column
/// numbers in error messages are 1-based file positions.
inline Dataset load_csv(const std::string& path, bool has_header)
{
    std::ifstream in(path);
    if (!in) throw InvalidArgument("csv: cannot open '" + path + "'");

    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::size_t width = 0;
    std::size_t line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        auto cells = detail::split_csv_line(line);
        if (has_header && header.empty() && rows.empty()) {
            for (auto& c : cells) header.push_back(detail::trim(c));
            width = header.size();
            continue;
        }
        if (width == 0) width = cells.size();
        if (cells.size() != width)
            throw InvalidArgument("csv: ragged row " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " columns, expected " + std::to_string(width));
        std::vector<double> values(width);
        for (std::size_t c = 0; c < width; ++c) values[c] = detail::parse_cell(cells[c], line_no, c + 1);
        rows.push_back(std::move(values));
    }
    if (rows.empty()) throw InvalidArgument("csv: no rows in '" + path + "'");
    if (width < 2) throw InvalidArgument("csv: need at least one input column and a target column");

    Dataset data;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto r = static_cast<Eigen::Index>(width - 1);
    data.inputs.resize(n, r);
    data.targets.resize(n);
    for (Eigen::Index t = 0; t < n; ++t) {
        for (Eigen::Index j = 0; j < r; ++j) data.inputs(t, j) = rows[t][j];
        data.targets(t) = rows[t][r];
    }
    if (!header.empty()) data.feature_names.assign(header.begin(), header.end() - 1);
    return data;
}

// ---------------------------------------------------------------------------
// Standardization

/// Affine map fitted on one dataset and reusable on others. Scales use the
/// population convention (divide by n); constant columns get scale 1.
struct StandardizerParams {
    Vector input_mean;
    Vector input_scale;
    double target_mean = 0.0;
    double target_scale = 1.0;

    Dataset apply(const Dataset& data) const
    {
        if (data.r() != input_mean.size()) throw InvalidArgument("standardize: column count mismatch");
        Dataset out = data;
        for (Eigen::Index j = 0; j < data.r(); ++j)
            out.inputs.col(j) = (data.inputs.col(j).array() - input_mean(j)) / input_scale(j);
        out.targets = (data.targets.array() - target_mean) / target_scale;
        return out;
    }

    Dataset invert(const Dataset& data) const
    {
        if (data.r() != input_mean.size()) throw InvalidArgument("standardize: column count mismatch");
        Dataset out = data;
        for (Eigen::Index j = 0; j < data.r(); ++j)
            out.inputs.col(j) = data.inputs.col(j).array() * input_scale(j) + input_mean(j);
        out.targets = data.targets.array() * target_scale + target_mean;
        return out;
    }
};

namespace detail {

inline std::pair<double, double> mean_and_scale(const Vector& v)
{
    const double mean = v.mean();
    const double var = (v.array() - mean).square().mean();
    const double sd = std::sqrt(var);
    // Relative threshold: a column whose spread is pure round-off is constant.
    const double tiny = 1e-12 * std::max(1.0, std::abs(mean));
    return {mean, sd > tiny ? sd : 1.0};
}

} // namespace detail

inline StandardizerParams fit_standardizer(const Dataset& data)
{
    if (data.n() < 2) throw InvalidArgument("standardize: need at least 2 rows");
    StandardizerParams p;
    p.input_mean.resize(data.r());
    p.input_scale.resize(data.r());
    for (Eigen::Index j = 0; j < data.r(); ++j) {
        const auto [m, s] = detail::mean_and_scale(data.inputs.col(j));
        p.input_mean(j) = m;
        p.input_scale(j) = s;
    }
    std::tie(p.target_mean, p.target_scale) = detail::mean_and_scale(data.targets);
    return p;
}

inline std::pair<Dataset, StandardizerParams> standardize(const Dataset& data)
{
    auto params = fit_standardizer(data);
    return {params.apply(data), params};
}

// ---------------------------------------------------------------------------
// Splitting

struct SplitResult {
    Dataset train;
    Dataset val;
    Dataset test;
};

/// Disjoint random subsets of the requested sizes, deterministic in `seed`.
/// Fit standardization on `train` only.
inline SplitResult split(const Dataset& data, Eigen::Index n_train, Eigen::Index n_val, Eigen::Index n_test,
                         std::uint64_t seed)
{
    if (n_train < 0 || n_val < 0 || n_test < 0) throw InvalidArgument("split: negative size");
    if (n_train + n_val + n_test > data.n())
        throw InvalidArgument("split: requested " + std::to_string(n_train + n_val + n_test) + " rows but only " +
                              std::to_string(data.n()) + " available");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(data.n()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);

    auto take = [&](Eigen::Index from, Eigen::Index count) {
        return data.subset(std::vector<Eigen::Index>(order.begin() + from, order.begin() + from + count));
    };
    return {take(0, n_train), take(n_train, n_val), take(n_train + n_val, n_test)};
}

// ---------------------------------------------------------------------------
// Synthetic monomial regression benchmark

struct SyntheticSpec {
    int r = 5;
    int n_train = 500;
    int n_test = 1000;
    int n_terms = 10;
    int max_degree = 3;
    std::uint64_t seed = 1;

    void validate() const
    {
        if (r < 1 || n_train < 1 || n_test < 1 || n_terms < 1 || max_degree < 0)
            throw InvalidArgument("synthetic: r, train, test, terms must be positive and maxdeg nonnegative");
    }
};

struct SyntheticData {
    Dataset train;
    Dataset test;
    std::vector<MultiIndex> truth;   // sorted variable tuples, one per monomial
};

/// Number of distinct monomials (multisets of variables) of degree 1..max_degree,
/// or 1 (the constant) when max_degree is 0. Saturates at `cap`.
inline long double count_monomials(int r, int max_degree, long double cap = 1e18L)
{
    if (max_degree == 0) return 1;
    long double total = 0;
    long double c = 1;   // C(r+d-1, d), starting at d = 0
    for (int d = 1; d <= max_degree; ++d) {
        c = c * (r + d - 1) / d;
        total += c;
        if (total > cap) return cap;
    }
    return total;
}

/// Evaluates sum over `terms` of prod_{j in term} x_j for every row.
inline Vector evaluate_monomials(const Matrix& inputs, const std::vector<MultiIndex>& terms)
{
    Vector y = Vector::Zero(inputs.rows());
    for (const auto& term : terms) {
        Vector m = Vector::Ones(inputs.rows());
        for (int j : term) m = m.cwiseProduct(inputs.col(j));
        y += m;
    }
    return y;
}

/// Inputs i.i.d. uniform on [-1, 1]^r; noise-free target equal to the
/// equal-weight sum of `n_terms` distinct random monomials.
inline SyntheticData gen_synthetic(const SyntheticSpec& spec)
{
    spec.validate();
    if (static_cast<long double>(spec.n_terms) > count_monomials(spec.r, spec.max_degree))
        throw InvalidArgument("synthetic: " + std::to_string(spec.n_terms) + " terms requested but only " +
                              std::to_string(static_cast<long long>(count_monomials(spec.r, spec.max_degree))) +
                              " distinct monomials exist");

    Rng rng(spec.seed);
    std::set<MultiIndex> chosen;
    std::vector<MultiIndex> truth;
    while (static_cast<int>(truth.size()) < spec.n_terms) {
        const int degree = spec.max_degree == 0
                               ? 0
                               : 1 + static_cast<int>(uniform_index(rng, static_cast<std::size_t>(spec.max_degree)));
        std::vector<int> vars(static_cast<std::size_t>(degree));
        for (auto& v : vars) v = static_cast<int>(uniform_index(rng, static_cast<std::size_t>(spec.r)));
        std::sort(vars.begin(), vars.end());
        MultiIndex term(std::move(vars));
        if (chosen.insert(term).second) truth.push_back(std::move(term));
    }

    auto draw = [&](int n) {
        Dataset d;
        d.inputs.resize(n, spec.r);
        for (int t = 0; t < n; ++t)
            for (int j = 0; j < spec.r; ++j) d.inputs(t, j) = 2.0 * uniform01(rng) - 1.0;
        d.targets = evaluate_monomials(d.inputs, truth);
        return d;
    };
    SyntheticData out;
    out.train = draw(spec.n_train);
    out.test = draw(spec.n_test);
    out.truth = std::move(truth);
    return out;
}

} // namespace polymkl
