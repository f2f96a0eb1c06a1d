#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "overlapkit/bootstrap.hpp"
#include "overlapkit/numerics.hpp"
#include "overlapkit/overlap.hpp"

namespace overlapkit {

enum class TestMethod { wald, anova_type, max_t, percentile };

std::string test_method_name(TestMethod m);

struct ComponentReadout {
    double statistic = 0.0;
    bool flagged = false;
};

struct TestResult {
    TestMethod method = TestMethod::wald;
    double statistic = 0.0;
    std::string reference;       // description of the null reference
    double p_value = 0.0;        // NaN when the method yields only a decision
    bool has_p_value = true;
    bool reject = false;
    double alpha = 0.05;
    double df = 0.0;             // chi^2 df or nu-hat; 0 when not applicable
    std::vector<ComponentReadout> per_component;
    std::vector<std::string> notes;
};

// middle matrix of the Wald quadratic form: plain inverse when the
// condition number is <= 1e12, else Moore-Penrose with effective-rank df.
// Shared by the Wald test and the elliptical region so their duality is exact.
struct WaldMiddle {
    Matrix m;
    double df = 0.0;
    bool pseudo = false;
};
WaldMiddle wald_middle_matrix(const Matrix& sigma_star);

TestResult wald_test(const OverlapMatrix& est, const CovarianceEstimate& cov,
                     std::size_t total_n, double alpha, double target = 0.5);

TestResult anova_type_test(const OverlapMatrix& est, const CovarianceEstimate& cov,
                           std::size_t total_n, double alpha);

TestResult max_t_test(const OverlapMatrix& est, const CovarianceEstimate& cov,
                      std::size_t total_n, double alpha, const McParams& mc);

// component_n optionally supplies the per-component group sample size used to
// apply the total-N-scaled quantiles (empty = use total_n, matched scale)
TestResult percentile_test(const OverlapMatrix& est, const ReplicateMatrix& rep,
                           std::size_t total_n, double alpha,
                           const std::vector<std::size_t>& component_n = {});

enum class SubvectorMethod { wald, anova_type };

// Post-hoc sub-test on the selected flattened components (marginal per
// component: selector = {i*d+s : i}; group: selector = {i*d+s : s}).
TestResult subvector_test(const OverlapMatrix& est, const CovarianceEstimate& cov,
                          std::size_t total_n, const std::vector<std::size_t>& selector,
                          SubvectorMethod method, double alpha);

}  // namespace overlapkit
