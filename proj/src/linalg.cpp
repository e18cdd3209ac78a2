#include "mosr/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mosr/errors.hpp"

namespace mosr {

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw contract_error("matmul dimension mismatch: " + a.shape_str() + " * " +
                             b.shape_str());
    }
    Matrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.data() + i * a.cols();
        double* orow = out.data() + i * out.cols();
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = arow[k];
            if (aik == 0.0) continue;
            const double* brow = b.data() + k * b.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
        }
    }
    out.check_finite("matmul");
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw contract_error("matmul_nt dimension mismatch: " + a.shape_str() + " * " +
                             b.shape_str() + "^T");
    }
    Matrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.data() + i * a.cols();
        double* orow = out.data() + i * out.cols();
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.data() + j * b.cols();
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * brow[k];
            orow[j] = acc;
        }
    }
    out.check_finite("matmul_nt");
    return out;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) {
        throw contract_error("matmul_tn dimension mismatch: " + a.shape_str() + "^T * " +
                             b.shape_str());
    }
    Matrix out(a.cols(), b.cols(), 0.0);
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* arow = a.data() + k * a.cols();
        const double* brow = b.data() + k * b.cols();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = arow[i];
            if (aki == 0.0) continue;
            double* orow = out.data() + i * out.cols();
            for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aki * brow[j];
        }
    }
    out.check_finite("matmul_tn");
    return out;
}

double log_sum_exp(std::span<const double> v) {
    if (v.empty()) throw contract_error("log_sum_exp of empty vector");
    double m = v[0];
    for (double x : v) m = std::max(m, x);
    double sum = 0.0;
    for (double x : v) sum += std::exp(x - m);
    return m + std::log(sum);
}

void softmax_inplace(std::span<double> v) {
    const double lse = log_sum_exp(v);
    for (double& x : v) x = std::exp(x - lse);
}

void log_softmax_inplace(std::span<double> v) {
    const double lse = log_sum_exp(v);
    for (double& x : v) x -= lse;
}

Matrix row_softmax(const Matrix& m) {
    Matrix out = m;
    for (std::size_t i = 0; i < out.rows(); ++i) softmax_inplace(out.row(i));
    return out;
}

Matrix row_log_softmax(const Matrix& m) {
    Matrix out = m;
    for (std::size_t i = 0; i < out.rows(); ++i) log_softmax_inplace(out.row(i));
    return out;
}

Matrix row_shift(const Matrix& m, std::span<const double> lambda) {
    if (lambda.size() != m.rows()) {
        throw contract_error("row_shift: lambda length " + std::to_string(lambda.size()) +
                             " does not match row count " + std::to_string(m.rows()));
    }
    Matrix out = m;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        for (double& x : out.row(i)) x += lambda[i];
    }
    return out;
}

// ---------------------------------------------------------------------------
// One-sided Jacobi SVD
// ---------------------------------------------------------------------------

SvdSpectrum svd_values(const Matrix& m, const SvdOptions& opts) {
    m.check_finite("svd_values");

    // Orthogonalize along the smaller dimension: work on a k x n buffer whose
    // k rows are the vectors being rotated, k = min(rows, cols).
    Matrix w = (m.rows() >= m.cols()) ? m.transposed() : m;
    const std::size_t k = w.rows();
    const std::size_t n = w.cols();

    bool converged = false;
    for (std::size_t sweep = 0; sweep < opts.max_sweeps && !converged; ++sweep) {
        converged = true;
        for (std::size_t p = 0; p + 1 < k; ++p) {
            for (std::size_t q = p + 1; q < k; ++q) {
                double* rp = w.data() + p * n;
                double* rq = w.data() + q * n;
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    alpha += rp[i] * rp[i];
                    beta += rq[i] * rq[i];
                    gamma += rp[i] * rq[i];
                }
                if (std::abs(gamma) <= opts.rel_tolerance * std::sqrt(alpha * beta)) continue;
                converged = false;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t =
                    (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const double vp = rp[i];
                    const double vq = rq[i];
                    rp[i] = c * vp - s * vq;
                    rq[i] = s * vp + c * vq;
                }
            }
        }
    }
    if (!converged) {
        throw numeric_error("svd_values: one-sided Jacobi did not converge within " +
                            std::to_string(opts.max_sweeps) + " sweeps for " + m.shape_str());
    }

    SvdSpectrum spectrum;
    spectrum.source_rows = m.rows();
    spectrum.source_cols = m.cols();
    spectrum.values.resize(k);
    for (std::size_t p = 0; p < k; ++p) {
        double norm2 = 0.0;
        const double* rp = w.data() + p * n;
        for (std::size_t i = 0; i < n; ++i) norm2 += rp[i] * rp[i];
        spectrum.values[p] = std::sqrt(norm2);
    }
    std::sort(spectrum.values.begin(), spectrum.values.end(), std::greater<double>());
    return spectrum;
}

double rank_threshold(const SvdSpectrum& s) {
    const double eps = std::numeric_limits<double>::epsilon();
    const double sigma_max = s.values.empty() ? 0.0 : s.values.front();
    return static_cast<double>(std::max(s.source_rows, s.source_cols)) * eps * sigma_max;
}

std::size_t numerical_rank(const SvdSpectrum& s) {
    if (s.values.empty() || s.values.front() == 0.0) return 0;
    const double tol = rank_threshold(s);
    std::size_t rank = 0;
    for (double v : s.values) {
        if (v > tol) ++rank;
    }
    return rank;
}

}  // namespace mosr
