#pragma once

#include <cstddef>
#include <vector>

#include "overlapkit/empirical.hpp"

namespace overlapkit {

// k x d matrix of estimated overlap indices, flattened group-major
// (group outer, component inner).
struct OverlapMatrix {
    std::size_t k = 0;
    std::size_t d = 0;
    std::vector<double> entries;  // entries[i*d + s]
    WeightScheme weights;

    double at(std::size_t i, std::size_t s) const { return entries[i * d + s]; }
    const std::vector<double>& flattened() const { return entries; }
};

// k x k x d pairwise overlaps I(F_j, F_i); second index i = splitting group.
struct PairwiseOverlap {
    std::size_t k = 0;
    std::size_t d = 0;
    std::vector<double> entries;  // entries[(j*k + i)*d + s]

    double at(std::size_t j, std::size_t i, std::size_t s) const {
        return entries[(j * k + i) * d + s];
    }
};

// Overlap of the evaluated sample with respect to the splitter:
// 2 ( int_{q}^inf F_eval dG_split - int_{-inf}^{q} F_eval dG_split ),
// q = empirical median of the splitter. For odd splitter size the median
// observation carries weight 1/2 on each side (the two halves cancel).
double pairwise_overlap(const Sample& splitter, const Sample& evaluated);

// Componentwise two-sample overlap I(F-hat, G-hat); splits on y.
// Even m uses the rank identity (2/(mn))(R.> - R.<) - m/(2n); odd m uses
// the exact plug-in sum.
std::vector<double> two_sample_overlap(const std::vector<Sample>& x,
                                       const std::vector<Sample>& y);

PairwiseOverlap all_pairwise_overlaps(const GroupedDataset& data);

// Canonical plug-in estimator: entry (i,s) = 2 * (upper - lower) integral of
// H-hat = sum_j lambda_j F-hat_j against F-hat_i, split at group i's median.
OverlapMatrix reference_overlap(const GroupedDataset& data, const WeightScheme& weights);

// O(N log N) rank fast path; proportional weights only. Agrees with
// reference_overlap to 1e-12 (including the odd-n_i half-weight handling,
// which the printed closed form below omits together with the
// self-contribution).
OverlapMatrix rank_reference_overlap(const GroupedDataset& data, const WeightScheme& weights);

// The closed form that subtracts within-sample rank sums. For even n_i it
// equals the plug-in value minus lambda_i/2; kept for verification only.
OverlapMatrix appendix_rank_overlap(const GroupedDataset& data, const WeightScheme& weights);

}  // namespace overlapkit
