#include "overlapkit/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace overlapkit {

Sample::Sample(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("Sample: empty value list");
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("Sample: non-finite value");
    }
    order_.resize(values.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    sorted_.reserve(values.size());
    for (std::size_t idx : order_) sorted_.push_back(values[idx]);
    for (std::size_t r = 1; r < sorted_.size(); ++r) {
        if (sorted_[r] == sorted_[r - 1]) { has_ties_ = true; break; }
    }
}

double Sample::ecdf(double t) const {
    if (!std::isfinite(t)) throw std::domain_error("ecdf: non-finite argument");
    auto it = std::upper_bound(sorted_.begin(), sorted_.end(), t);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double Sample::quantile(double u) const {
    if (!(u > 0.0) || u > 1.0) throw std::domain_error("quantile: u must be in (0,1]");
    // smallest order statistic with ecdf >= u
    const auto n = static_cast<double>(sorted_.size());
    auto r = static_cast<std::size_t>(std::ceil(u * n - 1e-12));
    if (r < 1) r = 1;
    if (r > sorted_.size()) r = sorted_.size();
    return sorted_[r - 1];
}

std::vector<double> midranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("midranks: non-finite value");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t r = 0;
    while (r < n) {
        std::size_t r2 = r;
        while (r2 + 1 < n && values[idx[r2 + 1]] == values[idx[r]]) ++r2;
        const double mid = 0.5 * static_cast<double>(r + 1 + r2 + 1);
        for (std::size_t j = r; j <= r2; ++j) ranks[idx[j]] = mid;
        r = r2 + 1;
    }
    return ranks;
}

WeightScheme WeightScheme::proportional(const std::vector<std::size_t>& group_sizes) {
    WeightScheme w;
    w.mode = Mode::proportional;
    std::size_t total = 0;
    for (auto n : group_sizes) total += n;
    if (total == 0) throw std::invalid_argument("WeightScheme: empty dataset");
    for (auto n : group_sizes)
        w.weights.push_back(static_cast<double>(n) / static_cast<double>(total));
    return w;
}

WeightScheme WeightScheme::equal(std::size_t k) {
    if (k == 0) throw std::invalid_argument("WeightScheme: k must be positive");
    WeightScheme w;
    w.mode = Mode::equal;
    w.weights.assign(k, 1.0 / static_cast<double>(k));
    return w;
}

WeightScheme WeightScheme::custom(std::vector<double> w) {
    WeightScheme scheme;
    scheme.mode = Mode::custom;
    double sum = 0.0;
    for (double wi : w) {
        if (!(wi >= 0.0) || !std::isfinite(wi))
            throw std::invalid_argument("WeightScheme: weights must be nonnegative");
        sum += wi;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("WeightScheme: weights must sum to 1");
    scheme.weights = std::move(w);
    return scheme;
}

GroupedDataset::GroupedDataset(std::vector<std::vector<std::vector<double>>> groups,
                               std::vector<std::string> group_labels,
                               std::vector<std::string> component_labels)
    : groups_(std::move(groups)),
      group_labels_(std::move(group_labels)),
      component_labels_(std::move(component_labels)) {
    if (groups_.empty()) throw std::invalid_argument("GroupedDataset: need k >= 1 groups");
    d_ = groups_[0].empty() ? 0 : groups_[0][0].size();
    if (d_ == 0) throw std::invalid_argument("GroupedDataset: need d >= 1 components");
    for (const auto& g : groups_) {
        if (g.size() < 2)
            throw std::invalid_argument("GroupedDataset: every group needs n_i >= 2");
        total_ += g.size();
        for (const auto& row : g) {
            if (row.size() != d_)
                throw std::invalid_argument("GroupedDataset: inconsistent row width");
            for (double v : row) {
                if (!std::isfinite(v))
                    throw std::invalid_argument("GroupedDataset: non-finite value");
            }
        }
    }
    if (group_labels_.empty()) {
        for (std::size_t i = 0; i < groups_.size(); ++i)
            group_labels_.push_back("group" + std::to_string(i + 1));
    }
    if (component_labels_.empty()) {
        for (std::size_t s = 0; s < d_; ++s)
            component_labels_.push_back("comp" + std::to_string(s + 1));
    }
    if (group_labels_.size() != groups_.size() || component_labels_.size() != d_)
        throw std::invalid_argument("GroupedDataset: label count mismatch");

    samples_.resize(groups_.size());
    std::vector<double> col;
    for (std::size_t i = 0; i < groups_.size(); ++i) {
        samples_[i].reserve(d_);
        for (std::size_t s = 0; s < d_; ++s) {
            col.clear();
            col.reserve(groups_[i].size());
            for (const auto& row : groups_[i]) col.push_back(row[s]);
            samples_[i].emplace_back(col);
        }
    }
}

bool GroupedDataset::has_ties() const {
    for (const auto& per_group : samples_)
        for (const auto& s : per_group)
            if (s.has_ties()) return true;
    return false;
}

const Sample& GroupedDataset::component(std::size_t i, std::size_t s) const {
    return samples_.at(i).at(s);
}

std::vector<std::size_t> GroupedDataset::group_sizes() const {
    std::vector<std::size_t> sizes;
    sizes.reserve(groups_.size());
    for (const auto& g : groups_) sizes.push_back(g.size());
    return sizes;
}

}  // namespace overlapkit
