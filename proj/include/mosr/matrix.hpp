#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace mosr {

// Dense row-major matrix of 64-bit reals. The universal numeric carrier:
// log-prob matrices, context/embedding matrices, parameter tensors and
// gradients are all Matrix values.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    // Takes ownership of `data`, which must have length rows*cols and be finite.
    static Matrix from_data(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    bool same_shape(const Matrix& other) const {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    Matrix transposed() const;

    // Frobenius norm.
    double frobenius() const;

    // Throws numeric_error if any entry is NaN/Inf. `what` names the operation.
    void check_finite(const char* what) const;

    // Elementwise in-place update; shapes must match.
    void add_scaled(const Matrix& other, double scale);
    void fill(double value);
    void scale(double factor);

    std::string shape_str() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// CSV round trip: plain decimal with '.' radix, ',' separators, one row per
// line, 17 significant digits so doubles survive exactly.
void write_csv(const Matrix& m, std::ostream& out);
void write_csv_file(const Matrix& m, const std::string& path);
Matrix read_csv(std::istream& in);
Matrix read_csv_file(const std::string& path);

}  // namespace mosr
