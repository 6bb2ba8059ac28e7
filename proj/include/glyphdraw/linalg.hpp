#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "glyphdraw/error.hpp"
#include "glyphdraw/rng.hpp"

namespace glyphdraw {

/// Dense row-major matrix of doubles. Entries are checked to be finite
/// when a matrix is built from external data.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_)
            throw ShapeError("matrix data length " + std::to_string(data_.size()) + " != " +
                             std::to_string(rows_) + "x" + std::to_string(cols_));
        check_finite();
    }

    Matrix(std::initializer_list<std::initializer_list<double>> rows) {
        rows_ = rows.size();
        cols_ = rows_ ? rows.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& r : rows) {
            if (r.size() != cols_)
                throw ShapeError("ragged matrix literal");
            data_.insert(data_.end(), r.begin(), r.end());
        }
        check_finite();
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = 1.0;
        return m;
    }

    static Matrix random(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
        Matrix m(rows, cols);
        for (double& x : m.data_)
            x = rng.uniform(lo, hi);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    std::string shape() const { return std::to_string(rows_) + "x" + std::to_string(cols_); }

    bool same_shape(const Matrix& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

    void check_finite() const {
        for (double x : data_)
            if (!std::isfinite(x))
                throw NumericError("non-finite matrix entry");
    }

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows())
        throw ShapeError("matmul: " + a.shape() + " x " + b.shape());
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto o = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            const auto br = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                o[j] += aik * br[j];
        }
    }
    return out;
}

inline Matrix transpose(const Matrix& m) {
    Matrix t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            t(j, i) = m(i, j);
    return t;
}

/// a · bᵀ without materializing the transpose.
inline Matrix matmul_bt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols())
        throw ShapeError("matmul_bt: " + a.shape() + " x (" + b.shape() + ")^T");
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto ar = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const auto br = b.row(j);
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k)
                s += ar[k] * br[k];
            out(i, j) = s;
        }
    }
    return out;
}

inline Matrix scaled(const Matrix& m, double s) {
    Matrix out = m;
    for (double& x : out.data())
        x *= s;
    return out;
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b))
        throw ShapeError("add: " + a.shape() + " vs " + b.shape());
    Matrix out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] += bd[i];
    return out;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b))
        throw ShapeError("sub: " + a.shape() + " vs " + b.shape());
    Matrix out = a;
    auto o = out.data();
    auto bd = b.data();
    for (std::size_t i = 0; i < o.size(); ++i)
        o[i] -= bd[i];
    return out;
}

/// Row-wise softmax, stabilized by subtracting each row's maximum.
inline Matrix row_softmax(const Matrix& m) {
    if (m.empty())
        throw ShapeError("row_softmax: empty matrix " + m.shape());
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto in = m.row(i);
        auto o = out.row(i);
        const double mx = *std::max_element(in.begin(), in.end());
        double sum = 0.0;
        for (std::size_t j = 0; j < in.size(); ++j) {
            o[j] = std::exp(in[j] - mx);
            sum += o[j];
        }
        for (double& x : o)
            x /= sum;
    }
    return out;
}

inline double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double x : m.data())
        s += x * x;
    return std::sqrt(s);
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b))
        throw ShapeError("max_abs_diff: " + a.shape() + " vs " + b.shape());
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a.data()[i] - b.data()[i]));
    return d;
}

/// ‖a − b‖_F / max(‖a‖_F, ‖b‖_F); 0 when both are zero.
inline double relative_error(const Matrix& a, const Matrix& b) {
    const double denom = std::max(frobenius_norm(a), frobenius_norm(b));
    const double num = frobenius_norm(a - b);
    return denom == 0.0 ? num : num / denom;
}

inline constexpr double default_fd_step = 1e-5;

/// Central-difference gradient of a scalar function of a matrix.
inline Matrix finite_diff_grad(const std::function<double(const Matrix&)>& f, const Matrix& at,
                               double h = default_fd_step) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw DomainError("finite_diff_grad: step must be positive and finite");
    Matrix grad(at.rows(), at.cols());
    Matrix probe = at;
    for (std::size_t i = 0; i < at.size(); ++i) {
        const double x0 = at.data()[i];
        probe.data()[i] = x0 + h;
        const double fp = f(probe);
        probe.data()[i] = x0 - h;
        const double fm = f(probe);
        probe.data()[i] = x0;
        if (!std::isfinite(fp) || !std::isfinite(fm))
            throw NumericError("finite_diff_grad: non-finite function value at entry " + std::to_string(i));
        grad.data()[i] = (fp - fm) / (2.0 * h);
    }
    return grad;
}

}  // namespace glyphdraw
