#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace overlapkit {

// One group / one component of observations, kept sorted ascending.
// The original-order index map is retained so that seeded resampling can be
// defined on observation indices rather than values.
class Sample {
public:
    explicit Sample(const std::vector<double>& values);

    const std::vector<double>& sorted() const { return sorted_; }
    const std::vector<std::size_t>& order() const { return order_; }
    std::size_t size() const { return sorted_.size(); }
    bool has_ties() const { return has_ties_; }

    // F-hat(t) = (1/n) #{x <= t}; right-continuous step function.
    double ecdf(double t) const;

    // inf{y : F-hat(y) >= u}, 0 < u <= 1. No interpolation.
    double quantile(double u) const;

private:
    std::vector<double> sorted_;
    std::vector<std::size_t> order_;
    bool has_ties_ = false;
};

// rank of x = #{y < x} + (#{y <= x} - #{y < x} + 1)/2; untied data get 1..n
std::vector<double> midranks(const std::vector<double>& values);

struct WeightScheme {
    enum class Mode { proportional, equal, custom };
    Mode mode = Mode::proportional;
    std::vector<double> weights;  // one per group, sums to 1

    static WeightScheme proportional(const std::vector<std::size_t>& group_sizes);
    static WeightScheme equal(std::size_t k);
    static WeightScheme custom(std::vector<double> w);
};

// k independent samples of complete d-dimensional observation vectors.
class GroupedDataset {
public:
    // groups[i] is an n_i x d table (row = observation vector)
    GroupedDataset(std::vector<std::vector<std::vector<double>>> groups,
                   std::vector<std::string> group_labels = {},
                   std::vector<std::string> component_labels = {});

    std::size_t k() const { return groups_.size(); }
    std::size_t d() const { return d_; }
    std::size_t group_size(std::size_t i) const { return groups_[i].size(); }
    std::size_t total_size() const { return total_; }
    bool has_ties() const;

    const std::vector<std::vector<double>>& group(std::size_t i) const { return groups_[i]; }
    const std::vector<std::string>& group_labels() const { return group_labels_; }
    const std::vector<std::string>& component_labels() const { return component_labels_; }

    // column s of group i as a Sample (cached)
    const Sample& component(std::size_t i, std::size_t s) const;

    std::vector<std::size_t> group_sizes() const;

private:
    std::vector<std::vector<std::vector<double>>> groups_;
    std::vector<std::string> group_labels_;
    std::vector<std::string> component_labels_;
    std::size_t d_ = 0;
    std::size_t total_ = 0;
    std::vector<std::vector<Sample>> samples_;  // [i][s]
};

}  // namespace overlapkit
