#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <vector>

namespace texseg {

/// Dense row-major point matrix (count x dim); the input to every clustering back end.
class PointSet {
public:
    PointSet() = default;
    explicit PointSet(std::size_t dim) : dim_(dim) {}
    PointSet(std::size_t count, std::size_t dim) : dim_(dim), data_(count * dim, 0.0) {}
    PointSet(std::size_t dim, std::vector<double> data) : dim_(dim), data_(std::move(data)) {
        if (dim_ == 0 || data_.size() % dim_ != 0) throw std::invalid_argument("point set: ragged data");
    }
    PointSet(std::initializer_list<std::initializer_list<double>> rows) {
        for (const auto& r : rows) push_back(std::vector<double>(r));
    }
    explicit PointSet(const std::vector<std::vector<double>>& rows) {
        for (const auto& r : rows) push_back(r);
    }

    std::size_t size() const noexcept { return dim_ ? data_.size() / dim_ : 0; }
    std::size_t dim() const noexcept { return dim_; }
    bool empty() const noexcept { return data_.empty(); }

    std::span<double> operator[](std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }
    std::span<const double> operator[](std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }

    void push_back(std::span<const double> p) {
        if (dim_ == 0 && data_.empty()) dim_ = p.size();
        if (p.size() != dim_) throw std::invalid_argument("point set: dimension mismatch");
        data_.insert(data_.end(), p.begin(), p.end());
    }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

private:
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

inline double squared_euclidean(std::span<const double> x, std::span<const double> y) noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] - y[j];
        s += d * d;
    }
    return s;
}

inline double linf_distance(std::span<const double> x, std::span<const double> y) noexcept {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double d = x[j] > y[j] ? x[j] - y[j] : y[j] - x[j];
        if (d > s) s = d;
    }
    return s;
}

}  // namespace texseg
