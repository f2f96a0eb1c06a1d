#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "overlapkit/rng.hpp"

namespace overlapkit {

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Small dense matrix, row-major. Everything here is kd x kd at most, so no
// attempt at blocking or external linear algebra.
struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

    static Matrix identity(std::size_t n);
    bool is_symmetric(double tol) const;
    double trace() const;
};

Matrix mat_mul(const Matrix& x, const Matrix& y);
std::vector<double> mat_vec(const Matrix& x, const std::vector<double>& v);

// p x p correlation matrix: symmetric (1e-12), unit diagonal, PSD up to a
// small negative eigenvalue tolerance (clipped when factoring).
struct CorrelationMatrix {
    Matrix m;
    explicit CorrelationMatrix(Matrix mat);
    std::size_t dim() const { return m.rows; }
};

struct McParams {
    std::size_t sample_count = 100000;
    std::uint64_t seed = 0;
    double target_se = 5e-4;
};

double normal_cdf(double x);
double std_normal_quantile(double p);

// regularized lower incomplete gamma P(a, x)
double regularized_gamma_p(double a, double x);

double chi_square_cdf(double df, double x);
double chi_square_quantile(double df, double p);
double f_nu_inf_quantile(double nu, double p);

struct MvnProb {
    double prob;
    double std_error;
};

// P(lower <= Z <= upper), Z ~ N(0, corr), by sequential conditioning on a
// Cholesky factor with variable reordering, randomized lattice points.
// Deterministic given mc.seed. +-infinity bounds allowed.
MvnProb mvn_rectangle_prob(const CorrelationMatrix& corr,
                           const std::vector<double>& lower,
                           const std::vector<double>& upper, const McParams& mc);

// q with P(|Z_j| <= q for all j) = conf; shared-seed bisection.
double equicoordinate_quantile(const CorrelationMatrix& corr, double conf,
                               const McParams& mc);

struct EigenSym {
    std::vector<double> values;  // unordered
    Matrix vectors;              // column j = eigenvector j
};

// cyclic Jacobi rotation eigendecomposition of a symmetric matrix
EigenSym jacobi_eigen(const Matrix& m, double tol = 1e-14, int max_sweeps = 64);

struct Pseudoinverse {
    Matrix inv;
    std::size_t effective_rank = 0;
    double max_eigenvalue = 0.0;
    double min_retained_eigenvalue = 0.0;
};

Pseudoinverse sym_pseudoinverse(const Matrix& m, double rel_tol = 1e-10);

// lower-triangular L with L L^T = m + eps*I, eps escalating through
// {0, 1e-12, 1e-10, 1e-8} * trace(m)/p
Matrix cholesky_psd(const Matrix& m);

}  // namespace overlapkit
