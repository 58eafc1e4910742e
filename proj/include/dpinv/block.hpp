#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dpinv {

using Vector = std::vector<double>;

/// Tall dense block stored column-major: each column is contiguous, which is
/// what Krylov bases, subspace blocks and pseudo-inverse column sets want.
class ColumnBlock {
public:
    ColumnBlock() = default;
    ColumnBlock(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<double> col(std::size_t j) noexcept {
        return {data_.data() + j * rows_, rows_};
    }
    std::span<const double> col(std::size_t j) const noexcept {
        return {data_.data() + j * rows_, rows_};
    }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    /// Drops trailing columns; storage of the kept columns is untouched.
    void truncate_cols(std::size_t cols) {
        cols_ = cols;
        data_.resize(rows_ * cols_);
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

}  // namespace dpinv
