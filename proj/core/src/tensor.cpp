// SPDX-License-Identifier: Apache-2.0
#include "analogia/tensor.hpp"

#include <cmath>
#include <sstream>

#include "analogia/error.hpp"

namespace analogia {

std::string shape_string(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << ", ";
        os << shape[i];
    }
    os << ']';
    return os.str();
}

template <typename T>
Tensor<T>::Tensor(std::vector<std::size_t> shape) {
    if (shape.empty() || shape.size() > 2) {
        throw DimensionError("tensor rank must be 1 or 2, got shape " + analogia::shape_string(shape));
    }
    for (auto extent : shape) {
        if (extent == 0) throw DimensionError("tensor extents must be positive, got " + analogia::shape_string(shape));
    }
    rank_ = shape.size();
    rows_ = shape[0];
    cols_ = rank_ == 2 ? shape[1] : 1;
    data_.assign(rows_ * cols_, T{});
}

template <typename T>
Tensor<T>::Tensor(std::vector<std::size_t> shape, std::vector<T> data) : Tensor(std::move(shape)) {
    if (data.size() != data_.size()) {
        throw DimensionError("tensor of shape " + shape_string() + " needs " + std::to_string(data_.size()) +
                             " values, got " + std::to_string(data.size()));
    }
    data_ = std::move(data);
}

template <typename T>
Tensor<T> Tensor<T>::vector(std::initializer_list<T> values) {
    return Tensor({values.size()}, std::vector<T>(values));
}

template <typename T>
Tensor<T> Tensor<T>::vector(std::vector<T> values) {
    const std::size_t n = values.size();
    return Tensor({n}, std::move(values));
}

template <typename T>
Tensor<T> Tensor<T>::matrix(std::initializer_list<std::initializer_list<T>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r ? rows.begin()->size() : 0;
    std::vector<T> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw DimensionError("ragged matrix literal");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Tensor({r, c}, std::move(data));
}

template <typename T>
std::vector<std::size_t> Tensor<T>::shape() const {
    if (rank_ == 2) return {rows_, cols_};
    if (rank_ == 1) return {rows_};
    return {};
}

template <typename T>
T Tensor<T>::item() const {
    if (!is_scalar()) throw DimensionError("item() on non-scalar tensor of shape " + shape_string());
    return data_[0];
}

template <typename T>
bool Tensor<T>::all_finite() const noexcept {
    for (T x : data_) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

template <typename T>
std::string Tensor<T>::shape_string() const {
    return analogia::shape_string(shape());
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace analogia
