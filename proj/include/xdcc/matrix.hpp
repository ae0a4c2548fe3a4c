#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace xdcc {

/// Row-major dense matrix with value semantics.
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const T> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<const T> values() const noexcept { return data_; }
    std::span<T> values() noexcept { return data_; }

    void push_row(std::span<const T> values) {
        if (rows_ == 0 && data_.empty())
            cols_ = values.size();
        if (values.size() != cols_)
            throw std::invalid_argument("Matrix::push_row: row width mismatch");
        data_.insert(data_.end(), values.begin(), values.end());
        ++rows_;
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// Binary label matrix; entries are 0 or 1.
using LabelMatrix = Matrix<unsigned char>;
/// Per-cell probabilities or raw scores.
using RealMatrix = Matrix<double>;

} // namespace xdcc
