#include "overlapkit/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace overlapkit {

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

bool Matrix::is_symmetric(double tol) const {
    if (rows != cols) return false;
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = i + 1; j < cols; ++j)
            if (std::abs((*this)(i, j) - (*this)(j, i)) > tol) return false;
    return true;
}

double Matrix::trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(rows, cols); ++i) t += (*this)(i, i);
    return t;
}

Matrix mat_mul(const Matrix& x, const Matrix& y) {
    if (x.cols != y.rows) throw std::invalid_argument("mat_mul: shape mismatch");
    Matrix out(x.rows, y.cols);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t l = 0; l < x.cols; ++l) {
            const double v = x(i, l);
            if (v == 0.0) continue;
            for (std::size_t j = 0; j < y.cols; ++j) out(i, j) += v * y(l, j);
        }
    return out;
}

std::vector<double> mat_vec(const Matrix& x, const std::vector<double>& v) {
    if (x.cols != v.size()) throw std::invalid_argument("mat_vec: shape mismatch");
    std::vector<double> out(x.rows, 0.0);
    for (std::size_t i = 0; i < x.rows; ++i)
        for (std::size_t j = 0; j < x.cols; ++j) out[i] += x(i, j) * v[j];
    return out;
}

CorrelationMatrix::CorrelationMatrix(Matrix mat) : m(std::move(mat)) {
    if (m.rows == 0 || m.rows != m.cols)
        throw std::invalid_argument("CorrelationMatrix: must be square and nonempty");
    if (!m.is_symmetric(1e-12))
        throw std::invalid_argument("CorrelationMatrix: not symmetric");
    for (std::size_t i = 0; i < m.rows; ++i)
        if (std::abs(m(i, i) - 1.0) > 1e-12)
            throw std::invalid_argument("CorrelationMatrix: diagonal must be 1");
    auto eig = jacobi_eigen(m);
    double max_ev = 0.0, min_ev = std::numeric_limits<double>::infinity();
    for (double v : eig.values) {
        max_ev = std::max(max_ev, v);
        min_ev = std::min(min_ev, v);
    }
    if (min_ev < -1e-8 * std::max(1.0, max_ev))
        throw numeric_error("CorrelationMatrix: not positive semidefinite");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Acklam's rational approximation for the standard normal quantile
double acklam_inv_cdf(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw std::domain_error("std_normal_quantile: p must be in (0,1)");
    double x = acklam_inv_cdf(p);
    // one Halley/Newton polish step against erfc
    const double e = normal_cdf(x) - p;
    const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double RngStream::next_normal() { return std_normal_quantile(next_uniform()); }

namespace {

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || x < 0.0)
        throw std::domain_error("regularized_gamma_p: invalid arguments");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double chi_square_cdf(double df, double x) {
    if (x <= 0.0) return 0.0;
    return regularized_gamma_p(0.5 * df, 0.5 * x);
}

double chi_square_quantile(double df, double p) {
    if (!(df > 0.0)) throw std::domain_error("chi_square_quantile: df must be positive");
    if (!(p > 0.0) || !(p < 1.0))
        throw std::domain_error("chi_square_quantile: p must be in (0,1)");
    // Wilson-Hilferty starting point
    const double z = std_normal_quantile(p);
    double x = df * std::pow(1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df)), 3.0);
    if (!(x > 0.0)) x = 0.5 * df * std::exp((std::log(p * df) + std::lgamma(0.5 * df)) / (0.5 * df));
    if (!(x > 0.0) || !std::isfinite(x)) x = df;
    // Newton on the regularized gamma
    for (int it = 0; it < 64; ++it) {
        const double f = chi_square_cdf(df, x) - p;
        const double pdf = std::exp((0.5 * df - 1.0) * std::log(x) - 0.5 * x -
                                    std::lgamma(0.5 * df) - 0.5 * df * std::log(2.0));
        if (pdf <= 0.0) break;
        double step = f / pdf;
        if (step > 0.5 * x) step = 0.5 * x;  // stay positive
        double x_new = x - step;
        if (x_new <= 0.0) x_new = 0.5 * x;
        if (std::abs(x_new - x) < 1e-12 * std::max(1.0, x)) { x = x_new; break; }
        x = x_new;
    }
    return x;
}

double f_nu_inf_quantile(double nu, double p) {
    if (!(nu > 0.0)) throw std::domain_error("f_nu_inf_quantile: nu must be positive");
    return chi_square_quantile(nu, p) / nu;
}

namespace {

const double kSqrtPrimes[] = {
    1.4142135623730951, 1.7320508075688772, 2.23606797749979,  2.6457513110645907,
    3.3166247903554,    3.605551275463989,  4.123105625617661, 4.358898943540674,
    4.795831523312719,  5.385164807134504,  5.5677643628300215, 6.082762530298219,
    6.4031242374328485, 6.557438524302,     6.855654600401044, 7.280109889280518,
    7.681145747868608,  7.810249675906654,  8.18535277187245,  8.426149773176359};

struct GenzProblem {
    std::size_t p = 0;
    Matrix chol;                 // lower-triangular factor of the reordered corr
    std::vector<double> lower, upper;  // reordered bounds
};

// Reorder variables so the tightest slabs come first (variance-reduction
// heuristic), then factor.
GenzProblem prepare_genz(const CorrelationMatrix& corr, const std::vector<double>& lower,
                         const std::vector<double>& upper) {
    const std::size_t p = corr.dim();
    if (lower.size() != p || upper.size() != p)
        throw std::invalid_argument("mvn_rectangle_prob: bound size mismatch");
    for (std::size_t i = 0; i < p; ++i)
        if (!(lower[i] < upper[i]))
            throw std::invalid_argument("mvn_rectangle_prob: need lower < upper");

    std::vector<std::size_t> order(p);
    for (std::size_t i = 0; i < p; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double pa = normal_cdf(upper[a]) - normal_cdf(lower[a]);
        const double pb = normal_cdf(upper[b]) - normal_cdf(lower[b]);
        return pa < pb;
    });

    Matrix reordered(p, p);
    GenzProblem prob;
    prob.p = p;
    prob.lower.resize(p);
    prob.upper.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        prob.lower[i] = lower[order[i]];
        prob.upper[i] = upper[order[i]];
        for (std::size_t j = 0; j < p; ++j) reordered(i, j) = corr.m(order[i], order[j]);
    }
    prob.chol = cholesky_psd(reordered);
    return prob;
}

// one integrand evaluation at a uniform point w in [0,1]^p
double genz_integrand(const GenzProblem& prob, const std::vector<double>& w) {
    const std::size_t p = prob.p;
    double f = 1.0;
    std::vector<double> y(p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
        double t = 0.0;
        for (std::size_t j = 0; j < i; ++j) t += prob.chol(i, j) * y[j];
        const double lii = prob.chol(i, i);
        double d, e;
        if (lii > 1e-10) {
            d = std::isinf(prob.lower[i]) ? 0.0 : normal_cdf((prob.lower[i] - t) / lii);
            e = std::isinf(prob.upper[i]) ? 1.0 : normal_cdf((prob.upper[i] - t) / lii);
        } else {
            const bool inside = t >= prob.lower[i] && t <= prob.upper[i];
            d = 0.0;
            e = inside ? 1.0 : 0.0;
        }
        if (e <= d) return 0.0;
        f *= (e - d);
        double u = d + w[i] * (e - d);
        u = std::min(std::max(u, 1e-15), 1.0 - 1e-15);
        y[i] = (lii > 1e-10) ? std_normal_quantile(u) : 0.0;
    }
    return f;
}

}  // namespace

MvnProb mvn_rectangle_prob(const CorrelationMatrix& corr, const std::vector<double>& lower,
                           const std::vector<double>& upper, const McParams& mc) {
    const std::size_t p = corr.dim();
    if (p == 1) {
        const double lo = std::isinf(lower[0]) ? 0.0 : normal_cdf(lower[0]);
        const double hi = std::isinf(upper[0]) ? 1.0 : normal_cdf(upper[0]);
        return {std::max(0.0, hi - lo), 0.0};
    }
    GenzProblem prob = prepare_genz(corr, lower, upper);

    // randomized lattice: Richtmyer sequence with independent uniform shifts
    constexpr std::size_t n_shifts = 10;
    const std::size_t batch = 500;
    RngStream shift_rng(mc.seed, 0x6d766e70ULL);
    std::vector<std::vector<double>> shifts(n_shifts, std::vector<double>(p));
    for (auto& sh : shifts)
        for (auto& v : sh) v = shift_rng.next_uniform();

    std::vector<double> sums(n_shifts, 0.0);
    std::vector<double> w(p);
    std::size_t pts_per_shift = 0;
    const std::size_t max_per_shift =
        std::max<std::size_t>(batch, mc.sample_count / n_shifts);

    double est = 0.0, se = 0.0;
    while (pts_per_shift < max_per_shift) {
        for (std::size_t m = pts_per_shift; m < pts_per_shift + batch; ++m) {
            for (std::size_t sft = 0; sft < n_shifts; ++sft) {
                for (std::size_t j = 0; j < p; ++j) {
                    double v = static_cast<double>(m + 1) *
                                   kSqrtPrimes[j % (sizeof(kSqrtPrimes) / sizeof(double))] +
                               shifts[sft][j];
                    w[j] = v - std::floor(v);
                }
                sums[sft] += genz_integrand(prob, w);
            }
        }
        pts_per_shift += batch;
        est = 0.0;
        for (double s : sums) est += s / static_cast<double>(pts_per_shift);
        est /= static_cast<double>(n_shifts);
        double var = 0.0;
        for (double s : sums) {
            const double m_s = s / static_cast<double>(pts_per_shift);
            var += (m_s - est) * (m_s - est);
        }
        var /= static_cast<double>(n_shifts - 1);
        se = std::sqrt(var / static_cast<double>(n_shifts));
        if (se <= mc.target_se) break;
    }
    return {std::min(1.0, std::max(0.0, est)), se};
}

double equicoordinate_quantile(const CorrelationMatrix& corr, double conf,
                               const McParams& mc) {
    if (!(conf > 0.0) || !(conf < 1.0))
        throw std::domain_error("equicoordinate_quantile: conf must be in (0,1)");
    const std::size_t p = corr.dim();
    if (p == 1) return std_normal_quantile(0.5 * (1.0 + conf));
    // shared seed keeps the bisection objective monotone and noise-free
    double lo = 0.0, hi = 15.0;
    std::vector<double> lb(p), ub(p);
    for (int it = 0; it < 40 && (hi - lo) > 1e-6; ++it) {
        const double q = 0.5 * (lo + hi);
        std::fill(lb.begin(), lb.end(), -q);
        std::fill(ub.begin(), ub.end(), q);
        const double pr = mvn_rectangle_prob(corr, lb, ub, mc).prob;
        (pr < conf ? lo : hi) = q;
    }
    return 0.5 * (lo + hi);
}

EigenSym jacobi_eigen(const Matrix& m, double tol, int max_sweeps) {
    if (!m.is_symmetric(1e-10))
        throw std::invalid_argument("jacobi_eigen: matrix must be symmetric");
    const std::size_t n = m.rows;
    Matrix a = m;
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        double scale = 0.0;
        for (std::size_t i = 0; i < n; ++i) scale += a(i, i) * a(i, i);
        if (off <= tol * tol * std::max(scale, 1e-300)) break;
        for (std::size_t pi = 0; pi < n; ++pi) {
            for (std::size_t qi = pi + 1; qi < n; ++qi) {
                const double apq = a(pi, qi);
                if (apq == 0.0) continue;
                const double theta = (a(qi, qi) - a(pi, pi)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t l = 0; l < n; ++l) {
                    const double alp = a(l, pi), alq = a(l, qi);
                    a(l, pi) = c * alp - s * alq;
                    a(l, qi) = s * alp + c * alq;
                }
                for (std::size_t l = 0; l < n; ++l) {
                    const double apl = a(pi, l), aql = a(qi, l);
                    a(pi, l) = c * apl - s * aql;
                    a(qi, l) = s * apl + c * aql;
                }
                for (std::size_t l = 0; l < n; ++l) {
                    const double vlp = v(l, pi), vlq = v(l, qi);
                    v(l, pi) = c * vlp - s * vlq;
                    v(l, qi) = s * vlp + c * vlq;
                }
            }
        }
    }
    EigenSym out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = a(i, i);
    out.vectors = std::move(v);
    return out;
}

Pseudoinverse sym_pseudoinverse(const Matrix& m, double rel_tol) {
    auto eig = jacobi_eigen(m);
    const std::size_t n = m.rows;
    double max_abs = 0.0;
    for (double v : eig.values) max_abs = std::max(max_abs, std::abs(v));
    Pseudoinverse out;
    out.inv = Matrix(n, n);
    out.max_eigenvalue = max_abs;
    out.min_retained_eigenvalue = max_abs;
    const double cut = rel_tol * max_abs;
    for (std::size_t e = 0; e < n; ++e) {
        const double lam = eig.values[e];
        if (std::abs(lam) <= cut || lam == 0.0) continue;
        ++out.effective_rank;
        out.min_retained_eigenvalue = std::min(out.min_retained_eigenvalue, std::abs(lam));
        const double inv_lam = 1.0 / lam;
        for (std::size_t i = 0; i < n; ++i) {
            const double vie = eig.vectors(i, e);
            if (vie == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j)
                out.inv(i, j) += inv_lam * vie * eig.vectors(j, e);
        }
    }
    return out;
}

Matrix cholesky_psd(const Matrix& m) {
    if (!m.is_symmetric(1e-10))
        throw std::invalid_argument("cholesky_psd: matrix must be symmetric");
    const std::size_t n = m.rows;
    const double base = m.trace() / static_cast<double>(n);
    const double jitters[] = {0.0, 1e-12, 1e-10, 1e-8};
    for (double j : jitters) {
        Matrix l(n, n);
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i) {
            for (std::size_t c = 0; c <= i && ok; ++c) {
                double sum = m(i, c) + (i == c ? j * base : 0.0);
                for (std::size_t t = 0; t < c; ++t) sum -= l(i, t) * l(c, t);
                if (i == c) {
                    if (sum < -1e-10 * std::max(base, 1.0)) { ok = false; break; }
                    l(i, i) = std::sqrt(std::max(sum, 0.0));
                } else {
                    l(i, c) = (l(c, c) > 0.0) ? sum / l(c, c) : 0.0;
                }
            }
        }
        if (!ok) continue;
        // verify reconstruction
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c <= i; ++c) {
                double sum = 0.0;
                for (std::size_t t = 0; t <= c; ++t) sum += l(i, t) * l(c, t);
                err = std::max(err, std::abs(sum - m(i, c)));
            }
        if (err <= 1e-6 * std::max(base, 1.0) + 1e-10) return l;
    }
    throw numeric_error("cholesky_psd: matrix not positive semidefinite after jitter");
}

}  // namespace overlapkit
