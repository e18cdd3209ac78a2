#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mosr/matrix.hpp"

namespace mosr {

// Singular values of a matrix, sorted non-increasing, together with the
// shape of the matrix they came from (needed for the rank threshold).
struct SvdSpectrum {
    std::vector<double> values;
    std::size_t source_rows = 0;
    std::size_t source_cols = 0;
};

Matrix matmul(const Matrix& a, const Matrix& b);
// a * b^T without forming the transpose; same contract as matmul(a, b.transposed()).
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// a^T * b without forming the transpose; same contract as matmul(a.transposed(), b).
Matrix matmul_tn(const Matrix& a, const Matrix& b);

// log(sum(exp(v))) computed as max + log(sum(exp(v - max))).
double log_sum_exp(std::span<const double> v);

Matrix row_softmax(const Matrix& m);
Matrix row_log_softmax(const Matrix& m);

// In-place log-softmax of a single row vector.
void log_softmax_inplace(std::span<double> v);
void softmax_inplace(std::span<double> v);

// out[i][j] = m[i][j] + lambda[i]; the row-wise shift that generates F(m).
Matrix row_shift(const Matrix& m, std::span<const double> lambda);

struct SvdOptions {
    std::size_t max_sweeps = 100;     // hard cap; exceeding it is a numeric_error
    double rel_tolerance = 1e-12;     // off-diagonal convergence threshold
};

// Singular values by one-sided Jacobi, applied along the smaller dimension
// (the input is transposed first when cols > rows would be cheaper).
SvdSpectrum svd_values(const Matrix& m, const SvdOptions& opts = {});

// Numerical-rank threshold: max(n, m) * machine-epsilon * sigma_max.
double rank_threshold(const SvdSpectrum& s);

// Count of singular values above rank_threshold(s); 0 for a zero spectrum.
std::size_t numerical_rank(const SvdSpectrum& s);

inline const char* svd_algorithm_tag() { return "one-sided-jacobi"; }

}  // namespace mosr
