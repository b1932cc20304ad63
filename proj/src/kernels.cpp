#include "gridsentinel/kernels.hpp"

#include <cmath>

namespace gridsentinel {

double minkowski(std::span<const double> x, std::span<const double> y, double p) {
    if (x.size() != y.size()) throw ValidationError("minkowski: dimension mismatch");
    if (!(p >= 1.0)) throw ValidationError("minkowski: p must be >= 1");
    double s = 0.0;
    if (p == 1.0) {
        for (std::size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
        return s;
    }
    if (p == 2.0) {
        for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
        return std::sqrt(s);
    }
    for (std::size_t i = 0; i < x.size(); ++i) s += std::pow(std::abs(x[i] - y[i]), p);
    return std::pow(s, 1.0 / p);
}

namespace {

void check_widths(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw ValidationError("pairwise kernel: column counts differ");
}

void minkowski_row(const Matrix& a, const Matrix& b, double p, Eigen::Index i, Matrix& out) {
    const std::span<const double> x(a.row(i).data(), static_cast<std::size_t>(a.cols()));
    for (Eigen::Index j = 0; j < b.rows(); ++j)
        out(i, j) = minkowski(x, {b.row(j).data(), static_cast<std::size_t>(b.cols())}, p);
}

void sq_block(const Matrix& a, const Matrix& b, const Eigen::VectorXd& bn, Eigen::Index r0, Matrix& out) {
    const Eigen::Index rows = std::min(kKernelBlockRows, a.rows() - r0);
    const auto blk = a.middleRows(r0, rows);
    Matrix g = blk * b.transpose();
    for (Eigen::Index i = 0; i < rows; ++i) {
        const double an = blk.row(i).squaredNorm();
        for (Eigen::Index j = 0; j < b.rows(); ++j) out(r0 + i, j) = std::max(0.0, an + bn[j] - 2.0 * g(i, j));
    }
}

}  // namespace

Matrix pairwise_minkowski(const Matrix& a, const Matrix& b, double p) {
    check_widths(a, b);
    if (!(p >= 1.0)) throw ValidationError("minkowski: p must be >= 1");
    Matrix out(a.rows(), b.rows());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < a.rows(); ++i) minkowski_row(a, b, p, i, out);
    return out;
}

Matrix pairwise_minkowski_serial(const Matrix& a, const Matrix& b, double p) {
    check_widths(a, b);
    if (!(p >= 1.0)) throw ValidationError("minkowski: p must be >= 1");
    Matrix out(a.rows(), b.rows());
    for (Eigen::Index i = 0; i < a.rows(); ++i) minkowski_row(a, b, p, i, out);
    return out;
}

Matrix pairwise_sq_euclidean(const Matrix& a, const Matrix& b) {
    check_widths(a, b);
    Matrix out(a.rows(), b.rows());
    const Eigen::VectorXd bn = b.rowwise().squaredNorm();
    const Eigen::Index blocks = (a.rows() + kKernelBlockRows - 1) / kKernelBlockRows;
#pragma omp parallel for schedule(dynamic)
    for (Eigen::Index k = 0; k < blocks; ++k) sq_block(a, b, bn, k * kKernelBlockRows, out);
    return out;
}

Matrix pairwise_sq_euclidean_serial(const Matrix& a, const Matrix& b) {
    check_widths(a, b);
    Matrix out(a.rows(), b.rows());
    const Eigen::VectorXd bn = b.rowwise().squaredNorm();
    for (Eigen::Index r0 = 0; r0 < a.rows(); r0 += kKernelBlockRows) sq_block(a, b, bn, r0, out);
    return out;
}

Matrix rbf_from_sq_distances(const Matrix& sq, double gamma) {
    Matrix k(sq.rows(), sq.cols());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < sq.rows(); ++i)
        for (Eigen::Index j = 0; j < sq.cols(); ++j) k(i, j) = std::exp(-gamma * sq(i, j));
    return k;
}

}  // namespace gridsentinel
