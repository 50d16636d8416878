#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

namespace polymkl {

/// Ordered tuple (r_1, ..., r_d) of zero-based base-kernel indices naming the
/// product kernel k_{r_1} * ... * k_{r_d}. The empty tuple is the degree-0
/// kernel, identically 1. Permutations are distinct coordinates.
class MultiIndex {
public:
    MultiIndex() = default;
    MultiIndex(std::initializer_list<int> entries) : entries_(entries) {}
    explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {}

    int degree() const { return static_cast<int>(entries_.size()); }
    bool empty() const { return entries_.empty(); }
    int operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<int>& entries() const { return entries_; }

    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }

    void push_back(int j) { entries_.push_back(j); }
    void pop_back() { entries_.pop_back(); }

    /// Colon-separated form used in persisted files; "" for degree 0.
    std::string to_string() const
    {
        std::string out;
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (i) out += ':';
            out += std::to_string(entries_[i]);
        }
        return out;
    }

    static MultiIndex parse(const std::string& text)
    {
        MultiIndex idx;
        std::size_t pos = 0;
        while (pos < text.size()) {
            const auto next = text.find(':', pos);
            const auto token = text.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            idx.push_back(std::stoi(token));
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        return idx;
    }

    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

    friend std::ostream& operator<<(std::ostream& os, const MultiIndex& idx)
    {
        return os << '(' << idx.to_string() << ')';
    }

private:
    std::vector<int> entries_;
};

} // namespace polymkl
