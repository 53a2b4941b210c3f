// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace analogia {

/// Dense row-major tensor of rank 1 or 2.
///
/// A rank-1 tensor of length n behaves as a column vector in matmul. Scalars
/// are rank-1 tensors of length 1.
template <typename T>
class Tensor {
public:
    using value_type = T;

    Tensor() = default;

    /// Zero-filled tensor of the given shape. Throws DimensionError for rank
    /// outside [1, 2] or a zero extent.
    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, std::vector<T> data);

    static Tensor vector(std::initializer_list<T> values);
    static Tensor vector(std::vector<T> values);
    static Tensor matrix(std::initializer_list<std::initializer_list<T>> rows);
    static Tensor scalar(T value) { return vector({value}); }
    static Tensor zeros_like(const Tensor& other) {
        Tensor t = other;
        std::fill(t.data_.begin(), t.data_.end(), T{});
        return t;
    }

    std::vector<std::size_t> shape() const;
    std::size_t rank() const noexcept { return rank_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }
    bool is_scalar() const noexcept { return rank_ == 1 && data_.size() == 1; }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    T& operator[](std::size_t i) { return data_[i]; }
    const T& operator[](std::size_t i) const { return data_[i]; }
    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }
    std::vector<T>& storage() noexcept { return data_; }
    const std::vector<T>& storage() const noexcept { return data_; }

    T item() const;

    bool same_shape(const Tensor& other) const noexcept {
        return rank_ == other.rank_ && rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const noexcept;

    /// Returns "[r, c]" or "[n]".
    std::string shape_string() const;

    template <typename U>
    Tensor<U> cast() const {
        std::vector<U> out(data_.begin(), data_.end());
        return Tensor<U>(shape(), std::move(out));
    }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.same_shape(b) && a.data_ == b.data_;
    }

private:
    std::size_t rank_ = 0;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

std::string shape_string(const std::vector<std::size_t>& shape);

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace analogia
