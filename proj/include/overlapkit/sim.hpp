#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "overlapkit/empirical.hpp"
#include "overlapkit/inference.hpp"
#include "overlapkit/numerics.hpp"
#include "overlapkit/rng.hpp"

namespace overlapkit {

struct GroupFamily {
    enum class Kind { mvnormal, mvt, mvnormal_lognormal_component };
    Kind kind = Kind::mvnormal;
    std::vector<double> mean;
    Matrix cov;              // covariance (mvnormal) or scale (mvt)
    double df = 1.0;         // mvt only
    std::size_t lognormal_component = 0;  // 0-based, lognormal variant only
    double lognormal_mu = -0.35;          // log-scale normal mean
    double lognormal_sigma2 = 0.7;        // log-scale normal variance
};

struct ScenarioSpec {
    std::size_t k = 2;
    std::size_t d = 2;
    std::vector<std::size_t> n;       // per-group sizes
    std::vector<GroupFamily> family;  // one per group
    WeightScheme::Mode weight_mode = WeightScheme::Mode::proportional;
    std::vector<double> custom_weights;
    double alpha = 0.05;
    std::size_t bootstrap_b = 500;
    std::size_t reps = 1000;
    std::uint64_t seed = 1;
    std::size_t mc_samples = 20000;  // for equicoordinate quantiles inside replications
    std::vector<double> truth;       // known overlap vector for coverage suites (optional)
    std::string name;
    // Two-sample mode (k must be 2): the estimand is the d-vector overlap of
    // group 2 evaluated against group 1's median split, as in the paired
    // two-sample tables, instead of the k x d reference overlap.
    bool two_sample = false;
};

struct MethodRate {
    std::string method;
    double rate = 0.0;      // rejection fraction or coverage fraction
    double mc_se = 0.0;     // sqrt(p(1-p)/reps)
    double mean_length = 0.0;  // coverage suites only
    std::size_t failures = 0;  // replications that errored/flagged degenerate
};

struct SimulationReport {
    std::string scenario;
    std::size_t reps = 0;
    std::vector<MethodRate> methods;
    double wall_seconds = 0.0;
    std::vector<std::string> notes;
};

std::vector<std::vector<double>> sample_mvnormal(const std::vector<double>& mean,
                                                 const Matrix& cov, std::size_t n,
                                                 RngStream& rng);

std::vector<std::vector<double>> sample_mvt(const std::vector<double>& mean,
                                            const Matrix& scale, double df, std::size_t n,
                                            RngStream& rng);

GroupedDataset generate_scenario(const ScenarioSpec& spec, std::size_t replication);

SimulationReport run_size_power(const ScenarioSpec& spec,
                                const std::vector<TestMethod>& methods);

SimulationReport run_coverage(const ScenarioSpec& spec,
                              const std::vector<std::string>& ci_methods);

// large-sample plug-in evaluation of the true overlap vector for a scenario
std::vector<double> large_sample_truth(const ScenarioSpec& spec, std::size_t n_per_group,
                                       std::uint64_t seed);

// plain key = value scenario files; see docs in the repo README
ScenarioSpec parse_scenario_file(const std::string& path);

void write_report_csv(const SimulationReport& report, const std::string& path);
void write_report_json(const SimulationReport& report, const std::string& path);

}  // namespace overlapkit
