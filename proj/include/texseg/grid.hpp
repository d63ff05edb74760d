#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace texseg {

/// Zero-based pixel coordinate (row, col).
struct Pixel {
    long row = 0;
    long col = 0;

    friend bool operator==(const Pixel&, const Pixel&) = default;
    friend auto operator<=>(const Pixel&, const Pixel&) = default;
};

/// Row-major 2-D grid with value semantics.
template <typename T>
class Grid {
public:
    Grid() = default;
    Grid(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
    Grid(std::size_t rows, std::size_t cols, std::vector<T> values)
        : rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_)
            throw std::invalid_argument("grid: value count does not match shape");
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    T& operator[](std::size_t i) { return values_[i]; }
    const T& operator[](std::size_t i) const { return values_[i]; }

    bool contains(Pixel p) const noexcept {
        return p.row >= 0 && p.col >= 0 && static_cast<std::size_t>(p.row) < rows_ &&
               static_cast<std::size_t>(p.col) < cols_;
    }
    const T& at(Pixel p) const {
        if (!contains(p)) throw std::out_of_range("grid: pixel outside grid");
        return (*this)(static_cast<std::size_t>(p.row), static_cast<std::size_t>(p.col));
    }

    std::span<T> values() noexcept { return values_; }
    std::span<const T> values() const noexcept { return values_; }
    const std::vector<T>& storage() const noexcept { return values_; }

    bool same_shape(const Grid& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> values_;
};

/// Real-valued image X.
using Field = Grid<double>;

/// Cluster index per pixel; doubles as ground truth and estimate.
using LabelMap = Grid<std::uint32_t>;

inline void require_finite(const Field& f) {
    for (double v : f.values())
        if (!std::isfinite(v)) throw std::invalid_argument("field: non-finite value");
}

/// Number of distinct labels assuming contiguous labels from zero (max + 1).
inline std::uint32_t label_count(const LabelMap& labels) {
    std::uint32_t k = 0;
    for (auto l : labels.values()) k = std::max(k, l + 1);
    return k;
}

inline std::string shape_string(std::size_t rows, std::size_t cols) {
    return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace texseg
