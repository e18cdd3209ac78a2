#include "mosr/matrix.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include "mosr/errors.hpp"

namespace mosr {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) {
        throw contract_error("Matrix dimensions must be positive, got " + shape_str());
    }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) {
        throw contract_error("Matrix initializer must be non-empty");
    }
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw contract_error("Matrix initializer rows have unequal lengths");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_data(std::size_t rows, std::size_t cols, std::vector<double> data) {
    if (data.size() != rows * cols) {
        throw contract_error("Matrix::from_data: " + std::to_string(data.size()) +
                             " values for shape " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    Matrix m(rows, cols);
    m.data_ = std::move(data);
    m.check_finite("Matrix::from_data");
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::frobenius() const {
    double sum = 0.0;
    for (double v : data_) sum += v * v;
    return std::sqrt(sum);
}

void Matrix::check_finite(const char* what) const {
    for (double v : data_) {
        if (!std::isfinite(v)) {
            throw numeric_error(std::string(what) + ": non-finite entry in " + shape_str() +
                                " matrix");
        }
    }
}

void Matrix::add_scaled(const Matrix& other, double scale) {
    if (!same_shape(other)) {
        throw contract_error("add_scaled shape mismatch: " + shape_str() + " vs " +
                             other.shape_str());
    }
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += scale * other.data_[i];
}

void Matrix::fill(double value) {
    for (double& v : data_) v = value;
}

void Matrix::scale(double factor) {
    for (double& v : data_) v *= factor;
}

std::string Matrix::shape_str() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

// ---------------------------------------------------------------------------
// CSV round trip
// ---------------------------------------------------------------------------

void write_csv(const Matrix& m, std::ostream& out) {
    char buf[64];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
            if (j) out << ',';
            out << buf;
        }
        out << '\n';
    }
}

void write_csv_file(const Matrix& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw format_error("cannot open for writing: " + path);
    write_csv(m, out);
    if (!out) throw format_error("write failed: " + path);
}

Matrix read_csv(std::istream& in) {
    std::vector<double> data;
    std::size_t rows = 0, cols = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() && in.eof()) break;
        std::size_t row_cols = 0;
        const char* p = line.c_str();
        while (true) {
            char* end = nullptr;
            double v = std::strtod(p, &end);
            if (end == p) throw format_error("CSV parse error at row " + std::to_string(rows));
            data.push_back(v);
            ++row_cols;
            if (*end == ',') {
                p = end + 1;
            } else if (*end == '\0' || *end == '\r') {
                break;
            } else {
                throw format_error("CSV unexpected character at row " + std::to_string(rows));
            }
        }
        if (rows == 0) {
            cols = row_cols;
        } else if (row_cols != cols) {
            throw format_error("CSV ragged row " + std::to_string(rows));
        }
        ++rows;
    }
    if (rows == 0) throw format_error("CSV input is empty");
    return Matrix::from_data(rows, cols, std::move(data));
}

Matrix read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw format_error("cannot open for reading: " + path);
    return read_csv(in);
}

}  // namespace mosr
