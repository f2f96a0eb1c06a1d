#include "overlapkit/ci.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "overlapkit/inference.hpp"

namespace overlapkit {

std::string ci_method_name(CiMethod m) {
    switch (m) {
        case CiMethod::bonferroni: return "bonferroni";
        case CiMethod::mvt: return "mvt";
        case CiMethod::ellipse_projection: return "ellipse_projection";
    }
    return "?";
}

bool IntervalSet::covers(const std::vector<double>& v) const {
    if (v.size() != lower.size()) throw std::invalid_argument("covers: size mismatch");
    for (std::size_t c = 0; c < v.size(); ++c)
        if (v[c] < lower[c] || v[c] > upper[c]) return false;
    return true;
}

double IntervalSet::mean_length() const {
    double sum = 0.0;
    for (std::size_t c = 0; c < lower.size(); ++c) sum += upper[c] - lower[c];
    return lower.empty() ? 0.0 : sum / static_cast<double>(lower.size());
}

namespace {

std::vector<std::string> default_labels(const OverlapMatrix& est) {
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < est.k; ++i)
        for (std::size_t s = 0; s < est.d; ++s)
            labels.push_back("g" + std::to_string(i + 1) + ":c" + std::to_string(s + 1));
    if (labels.size() != est.entries.size()) {
        labels.clear();
        for (std::size_t c = 0; c < est.entries.size(); ++c)
            labels.push_back("v" + std::to_string(c + 1));
    }
    return labels;
}

void finish(IntervalSet& out) {
    out.lower = out.raw_lower;
    out.upper = out.raw_upper;
    for (auto& v : out.lower) v = std::clamp(v, 0.0, 1.0);
    for (auto& v : out.upper) v = std::clamp(v, 0.0, 1.0);
}

}  // namespace

IntervalSet bonferroni_sci(const OverlapMatrix& est, const ReplicateMatrix& rep,
                           std::size_t total_n, double alpha) {
    const std::size_t kd = est.entries.size();
    const double p_lo = alpha / (2.0 * static_cast<double>(kd));
    const double root_n = std::sqrt(static_cast<double>(total_n));
    auto q = bootstrap_quantiles(rep, est.flattened(), total_n, {p_lo, 1.0 - p_lo});
    IntervalSet out;
    out.method = CiMethod::bonferroni;
    out.level = 1.0 - alpha;
    out.labels = default_labels(est);
    for (std::size_t c = 0; c < kd; ++c) {
        out.raw_lower.push_back(est.entries[c] - q[c][1] / root_n);
        out.raw_upper.push_back(est.entries[c] - q[c][0] / root_n);
    }
    finish(out);
    return out;
}

IntervalSet mvt_sci(const OverlapMatrix& est, const CovarianceEstimate& cov,
                    std::size_t total_n, double alpha, const McParams& mc) {
    (void)total_n;
    const std::size_t kd = est.entries.size();
    std::vector<std::size_t> active;
    IntervalSet out;
    out.method = CiMethod::mvt;
    out.level = 1.0 - alpha;
    out.labels = default_labels(est);
    for (std::size_t c = 0; c < kd; ++c) {
        if (cov.degenerate[c])
            out.notes.push_back("component " + std::to_string(c) +
                                " degenerate: zero-width interval");
        else
            active.push_back(c);
    }
    if (active.empty()) throw numeric_error("mvt_sci: all components degenerate");
    Matrix sub(active.size(), active.size());
    for (std::size_t a = 0; a < active.size(); ++a)
        for (std::size_t b = 0; b < active.size(); ++b)
            sub(a, b) = cov.correlation(active[a], active[b]);
    const double q = equicoordinate_quantile(CorrelationMatrix(sub), 1.0 - alpha, mc);
    for (std::size_t c = 0; c < kd; ++c) {
        const double half = cov.degenerate[c] ? 0.0 : q * cov.component_sd[c];
        out.raw_lower.push_back(est.entries[c] - half);
        out.raw_upper.push_back(est.entries[c] + half);
    }
    finish(out);
    return out;
}

IntervalSet ellipse_projection_sci(const OverlapMatrix& est, const CovarianceEstimate& cov,
                                   std::size_t total_n, double alpha) {
    const std::size_t kd = est.entries.size();
    IntervalSet out;
    out.method = CiMethod::ellipse_projection;
    out.level = 1.0 - alpha;
    out.labels = default_labels(est);
    if (!(cov.sigma_star.trace() > 0.0)) {
        out.notes.push_back("zero covariance: zero-width intervals");
        out.raw_lower = est.flattened();
        out.raw_upper = est.flattened();
        finish(out);
        return out;
    }
    EllipseRegion region = ellipse_region(est, cov, total_n, alpha);
    if (region.effective_rank < static_cast<double>(kd))
        out.notes.push_back("singular covariance: projection uses effective rank " +
                            std::to_string(static_cast<int>(region.effective_rank)));
    for (std::size_t c = 0; c < kd; ++c) {
        const double half = std::sqrt(std::max(0.0, region.threshold *
                                                        cov.sigma_star(c, c) /
                                                        static_cast<double>(total_n)));
        out.raw_lower.push_back(est.entries[c] - half);
        out.raw_upper.push_back(est.entries[c] + half);
    }
    finish(out);
    return out;
}

EllipseRegion ellipse_region(const OverlapMatrix& est, const CovarianceEstimate& cov,
                             std::size_t total_n, double alpha) {
    WaldMiddle mid = wald_middle_matrix(cov.sigma_star);
    EllipseRegion region;
    region.center = est.flattened();
    region.shape = std::move(mid.m);
    region.effective_rank = mid.df;
    region.threshold = chi_square_quantile(mid.df, 1.0 - alpha);
    region.total_n = total_n;
    return region;
}

bool ellipse_contains(const EllipseRegion& region, const std::vector<double>& v) {
    if (v.size() != region.center.size())
        throw std::invalid_argument("ellipse_contains: dimension mismatch");
    double q = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j)
            q += (region.center[i] - v[i]) * region.shape(i, j) * (region.center[j] - v[j]);
    return static_cast<double>(region.total_n) * q <= region.threshold;
}

}  // namespace overlapkit
