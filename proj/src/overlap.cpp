#include "overlapkit/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace overlapkit {

namespace {

// number of elements of `sorted` that are <= t
std::size_t count_leq(const std::vector<double>& sorted, double t) {
    return static_cast<std::size_t>(
        std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
}

// Plug-in sum over the median split: 2*(upper - lower) with the odd-n
// half-weight median terms cancelling.
// Signed count sum S = sum_{upper half} #{eval <= x_(r)} - sum_{lower half},
// an exact integer, so callers can divide once and keep e.g. the even-n
// self-overlap at exactly 1/2.
double plugin_count_sum(const std::vector<double>& split_sorted,
                        const std::vector<double>& eval_sorted) {
    const std::size_t n = split_sorted.size();
    const std::size_t l = (n + 1) / 2;  // ceil(n/2)
    const bool odd = (n % 2) != 0;
    double lower = 0.0, upper = 0.0;
    const std::size_t low_end = odd ? l - 1 : l;
    for (std::size_t r = 0; r < low_end; ++r)
        lower += static_cast<double>(count_leq(eval_sorted, split_sorted[r]));
    for (std::size_t r = l; r < n; ++r)
        upper += static_cast<double>(count_leq(eval_sorted, split_sorted[r]));
    return upper - lower;
}

}  // namespace

double pairwise_overlap(const Sample& splitter, const Sample& evaluated) {
    const auto& ev = evaluated.sorted();
    const auto& sp = splitter.sorted();
    return 2.0 * plugin_count_sum(sp, ev) /
           (static_cast<double>(sp.size()) * static_cast<double>(ev.size()));
}

std::vector<double> two_sample_overlap(const std::vector<Sample>& x,
                                       const std::vector<Sample>& y) {
    if (x.size() != y.size() || x.empty())
        throw std::invalid_argument("two_sample_overlap: dimension mismatch");
    std::vector<double> out;
    out.reserve(x.size());
    for (std::size_t s = 0; s < x.size(); ++s) {
        const auto& xs = x[s].sorted();
        const auto& ys = y[s].sorted();
        const std::size_t m = ys.size();
        const std::size_t n = xs.size();
        if (m % 2 == 0) {
            // Lemma rank form, even m: (2/(mn))(R.> - R.<) - m/(2n),
            // with combined-sample ranks of the y order statistics.
            const std::size_t L = m / 2;
            double r_low = 0.0, r_up = 0.0;
            for (std::size_t r = 0; r < m; ++r) {
                const double rank = static_cast<double>(
                    count_leq(xs, ys[r]) + count_leq(ys, ys[r]));
                (r < L ? r_low : r_up) += rank;
            }
            out.push_back(2.0 / (static_cast<double>(m) * static_cast<double>(n)) *
                              (r_up - r_low) -
                          static_cast<double>(m) / (2.0 * static_cast<double>(n)));
        } else {
            out.push_back(pairwise_overlap(y[s], x[s]));
        }
    }
    return out;
}

PairwiseOverlap all_pairwise_overlaps(const GroupedDataset& data) {
    PairwiseOverlap out;
    out.k = data.k();
    out.d = data.d();
    out.entries.resize(out.k * out.k * out.d);
    for (std::size_t j = 0; j < out.k; ++j)
        for (std::size_t i = 0; i < out.k; ++i)
            for (std::size_t s = 0; s < out.d; ++s)
                out.entries[(j * out.k + i) * out.d + s] =
                    pairwise_overlap(data.component(i, s), data.component(j, s));
    return out;
}

OverlapMatrix reference_overlap(const GroupedDataset& data, const WeightScheme& weights) {
    const std::size_t k = data.k();
    const std::size_t d = data.d();
    if (weights.weights.size() != k)
        throw std::invalid_argument("reference_overlap: weight/group count mismatch");
    OverlapMatrix out;
    out.k = k;
    out.d = d;
    out.weights = weights;
    out.entries.resize(k * d);
    for (std::size_t s = 0; s < d; ++s) {
        for (std::size_t i = 0; i < k; ++i) {
            const auto& split = data.component(i, s).sorted();
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                const auto& col = data.component(j, s).sorted();
                acc += weights.weights[j] * plugin_count_sum(split, col) /
                       static_cast<double>(col.size());
            }
            out.entries[i * d + s] = 2.0 * acc / static_cast<double>(split.size());
        }
    }
    return out;
}

namespace {

// sums of combined-sample closed-count ranks over the lower/upper median
// halves of group i (odd n_i drops the median term on both sides)
void half_rank_sums(const std::vector<double>& sorted, const GroupedDataset& data,
                    std::size_t s, bool within_only, std::size_t i,
                    double* low_sum, double* up_sum) {
    const std::size_t n = sorted.size();
    const std::size_t l = (n + 1) / 2;
    const bool odd = (n % 2) != 0;
    const std::size_t low_end = odd ? l - 1 : l;
    *low_sum = 0.0;
    *up_sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double rank = 0.0;
        if (within_only) {
            rank = static_cast<double>(count_leq(data.component(i, s).sorted(), sorted[r]));
        } else {
            for (std::size_t j = 0; j < data.k(); ++j)
                rank += static_cast<double>(
                    count_leq(data.component(j, s).sorted(), sorted[r]));
        }
        if (r < low_end) *low_sum += rank;
        else if (r >= l) *up_sum += rank;
    }
}

void require_proportional(const GroupedDataset& data, const WeightScheme& weights) {
    if (weights.weights.size() != data.k())
        throw std::invalid_argument("rank overlap: weight/group count mismatch");
    const double N = static_cast<double>(data.total_size());
    for (std::size_t i = 0; i < data.k(); ++i) {
        const double prop = static_cast<double>(data.group_size(i)) / N;
        if (std::abs(weights.weights[i] - prop) > 1e-12)
            throw std::invalid_argument(
                "rank overlap: the rank identity requires proportional weights");
    }
}

}  // namespace

OverlapMatrix rank_reference_overlap(const GroupedDataset& data, const WeightScheme& weights) {
    require_proportional(data, weights);
    const std::size_t k = data.k();
    const std::size_t d = data.d();
    const double N = static_cast<double>(data.total_size());
    OverlapMatrix out;
    out.k = k;
    out.d = d;
    out.weights = weights;
    out.entries.resize(k * d);
    for (std::size_t s = 0; s < d; ++s) {
        for (std::size_t i = 0; i < k; ++i) {
            double low = 0.0, up = 0.0;
            half_rank_sums(data.component(i, s).sorted(), data, s, false, i, &low, &up);
            out.entries[i * d + s] =
                2.0 / (static_cast<double>(data.group_size(i)) * N) * (up - low);
        }
    }
    return out;
}

OverlapMatrix appendix_rank_overlap(const GroupedDataset& data, const WeightScheme& weights) {
    require_proportional(data, weights);
    const std::size_t k = data.k();
    const std::size_t d = data.d();
    const double N = static_cast<double>(data.total_size());
    OverlapMatrix out;
    out.k = k;
    out.d = d;
    out.weights = weights;
    out.entries.resize(k * d);
    for (std::size_t s = 0; s < d; ++s) {
        for (std::size_t i = 0; i < k; ++i) {
            double low = 0.0, up = 0.0, low_w = 0.0, up_w = 0.0;
            const auto& sorted = data.component(i, s).sorted();
            half_rank_sums(sorted, data, s, false, i, &low, &up);
            half_rank_sums(sorted, data, s, true, i, &low_w, &up_w);
            out.entries[i * d + s] =
                2.0 / (static_cast<double>(data.group_size(i)) * N) *
                ((up - up_w) - (low - low_w));
        }
    }
    return out;
}

}  // namespace overlapkit
