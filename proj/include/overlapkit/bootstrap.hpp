#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "overlapkit/empirical.hpp"
#include "overlapkit/numerics.hpp"
#include "overlapkit/overlap.hpp"
#include "overlapkit/rng.hpp"

namespace overlapkit {

// B bootstrap copies of the flattened kd-vector of overlap estimates.
struct ReplicateMatrix {
    std::size_t b = 0;
    std::size_t kd = 0;
    std::vector<double> rows;  // rows[rep*kd + c]
    std::uint64_t seed = 0;

    double at(std::size_t rep, std::size_t c) const { return rows[rep * kd + c]; }
};

// kd x kd bootstrap covariance on the sqrt(N) scale plus derived quantities.
struct CovarianceEstimate {
    Matrix sigma_star;                   // N * unbiased sample covariance of rows
    Matrix correlation;                  // unit diagonal where sd > 0
    std::vector<double> component_sd;    // estimate-scale: sqrt(diag(sigma_star)/N)
    std::vector<bool> degenerate;        // components with zero replicate spread
};

// n rows drawn iid with replacement from the input rows (whole vectors).
std::vector<std::vector<double>> resample_group(const std::vector<std::vector<double>>& group,
                                                RngStream& rng);

// One replicate row per resampled dataset; per-(replicate, group) derived
// streams make the output independent of worker count.
ReplicateMatrix bootstrap_replicates(const GroupedDataset& data, const WeightScheme& weights,
                                     std::size_t b, std::uint64_t seed,
                                     unsigned workers = 1);

CovarianceEstimate bootstrap_covariance(const ReplicateMatrix& rep, std::size_t total_n);

// per-component inf-convention quantiles of sqrt(N) (I* - center)
std::vector<std::vector<double>> bootstrap_quantiles(const ReplicateMatrix& rep,
                                                     const std::vector<double>& center,
                                                     std::size_t total_n,
                                                     const std::vector<double>& probs);

}  // namespace overlapkit
