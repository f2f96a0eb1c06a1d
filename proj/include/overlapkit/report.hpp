#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "overlapkit/bootstrap.hpp"
#include "overlapkit/ci.hpp"
#include "overlapkit/empirical.hpp"
#include "overlapkit/inference.hpp"

namespace overlapkit {

inline constexpr const char* kVersion = "0.1.0";

struct AnalysisConfig {
    std::string input_path;
    std::string group_col = "group";
    std::vector<std::string> components;  // empty = every other column
    WeightScheme::Mode weight_mode = WeightScheme::Mode::proportional;
    std::vector<double> custom_weights;
    double alpha = 0.05;
    std::size_t bootstrap_b = 2000;
    std::uint64_t seed = 0;
    std::vector<TestMethod> tests;
    std::vector<CiMethod> cis;
    bool posthoc = false;
    std::string format = "table";  // json | csv | table
    std::size_t mc_samples = 100000;
    unsigned workers = 1;
};

struct ParsedDataset {
    GroupedDataset data;
    std::size_t dropped_rows = 0;
    std::vector<std::string> warnings;
};

struct NamedTest {
    std::string name;  // e.g. "marginal:comp2" or "group:BDWF"
    TestResult result;
};

struct AnalysisReport {
    std::vector<std::string> group_labels;
    std::vector<std::string> component_labels;
    std::vector<std::size_t> group_sizes;
    std::size_t total_n = 0;
    std::vector<double> estimates;         // flattened kd, group-major
    std::vector<std::string> entry_labels; // "GROUP component" per flattened entry
    std::vector<double> weights;
    std::vector<TestResult> global_tests;
    std::vector<NamedTest> posthoc_tests;
    std::vector<IntervalSet> intervals;
    std::vector<std::string> warnings;
    std::uint64_t seed = 0;
    std::size_t bootstrap_b = 0;
    double alpha = 0.05;
    std::string version = kVersion;
};

ParsedDataset parse_dataset(const std::string& path, const AnalysisConfig& config);

AnalysisReport run_analysis(const AnalysisConfig& config);

// stable key order, doubles rounded to 12 significant digits
std::string report_to_json(const AnalysisReport& report);
AnalysisReport report_from_json(const std::string& json_text);

std::string report_to_text(const AnalysisReport& report);
std::string report_to_csv(const AnalysisReport& report);

// one row per (component, method) with a 0.5 reference line in the header
void emit_ci_plot_data(const AnalysisReport& report, const std::string& path);

}  // namespace overlapkit
