#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace wristband {

/// N x d row-major block of float64 points, one embedding per row.
class PointBatch {
public:
    PointBatch() = default;
    PointBatch(std::size_t n, std::size_t dim) : n_(n), dim_(dim), data_(n * dim, 0.0) {}
    PointBatch(std::size_t n, std::size_t dim, std::vector<double> data)
        : n_(n), dim_(dim), data_(std::move(data)) {
        require(data_.size() == n_ * dim_, "PointBatch: buffer length does not match n*d");
    }

    std::size_t n() const noexcept { return n_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return data_.size(); }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * dim_, dim_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * dim_, dim_}; }

    double& operator()(std::size_t i, std::size_t k) noexcept { return data_[i * dim_ + k]; }
    double operator()(std::size_t i, std::size_t k) const noexcept { return data_[i * dim_ + k]; }

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    bool all_finite() const noexcept {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    friend bool operator==(const PointBatch&, const PointBatch&) = default;

private:
    std::size_t n_ = 0;
    std::size_t dim_ = 0;
    std::vector<double> data_;
};

/// Loss value plus its gradient with respect to the raw points (same layout as the batch).
struct LossValueGrad {
    double value = 0.0;
    std::vector<double> grad;
};

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

inline double norm(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

}  // namespace wristband
