#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "overlapkit/bootstrap.hpp"
#include "overlapkit/numerics.hpp"
#include "overlapkit/overlap.hpp"

namespace overlapkit {

enum class CiMethod { bonferroni, mvt, ellipse_projection };

std::string ci_method_name(CiMethod m);

struct IntervalSet {
    CiMethod method = CiMethod::bonferroni;
    double level = 0.95;
    std::vector<double> lower, upper;          // clipped to [0,1]
    std::vector<double> raw_lower, raw_upper;  // pre-clip values
    std::vector<std::string> labels;           // "(group, component)" in flattening order
    std::vector<std::string> notes;

    bool covers(const std::vector<double>& v) const;
    double mean_length() const;
};

struct EllipseRegion {
    std::vector<double> center;
    Matrix shape;        // middle matrix of the quadratic form
    double threshold;    // chi-square quantile
    double effective_rank;
    std::size_t total_n;
};

// basic-bootstrap orientation with Bonferroni level alpha/(2kd) per component
IntervalSet bonferroni_sci(const OverlapMatrix& est, const ReplicateMatrix& rep,
                           std::size_t total_n, double alpha);

// equicoordinate normal quantile on the nondegenerate correlation block
IntervalSet mvt_sci(const OverlapMatrix& est, const CovarianceEstimate& cov,
                    std::size_t total_n, double alpha, const McParams& mc);

// exact coordinate projection of the Wald ellipsoid
IntervalSet ellipse_projection_sci(const OverlapMatrix& est, const CovarianceEstimate& cov,
                                   std::size_t total_n, double alpha);

EllipseRegion ellipse_region(const OverlapMatrix& est, const CovarianceEstimate& cov,
                             std::size_t total_n, double alpha);

bool ellipse_contains(const EllipseRegion& region, const std::vector<double>& v);

}  // namespace overlapkit
