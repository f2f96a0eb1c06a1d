// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 10 is skipped (not failed) when the external
// stable-isotope dataset is not present.
#include <sys/stat.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "overlapkit/ci.hpp"
#include "overlapkit/inference.hpp"
#include "overlapkit/overlap.hpp"
#include "overlapkit/report.hpp"
#include "overlapkit/rng.hpp"
#include "overlapkit/sim.hpp"

using namespace overlapkit;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("criterion %2d: %s — %s\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    if (!pass) ++g_failures;
}

void report_skip(int criterion, const std::string& detail) {
    std::printf("criterion %2d: SKIP — %s\n", criterion, detail.c_str());
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4g", v);
    return buf;
}

GroupedDataset random_untied_dataset(RngStream& rng, bool even_sizes = false) {
    const std::size_t k = 1 + rng.next_below(4), d = 1 + rng.next_below(3);
    std::vector<std::vector<std::vector<double>>> groups;
    for (std::size_t i = 0; i < k; ++i) {
        std::size_t n = 2 + rng.next_below(8);
        if (even_sizes && n % 2) ++n;
        std::vector<std::vector<double>> g;
        for (std::size_t r = 0; r < n; ++r) {
            std::vector<double> row;
            for (std::size_t s = 0; s < d; ++s) row.push_back(rng.next_uniform());
            g.push_back(row);
        }
        groups.push_back(g);
    }
    return GroupedDataset(std::move(groups));
}

Matrix cov2(double v1, double v2, double off) {
    Matrix m(2, 2);
    m(0, 0) = v1;
    m(1, 1) = v2;
    m(0, 1) = m(1, 0) = off;
    return m;
}

// I(F,G) for centered normals, evaluated sd ratio a = sd_G_split... analytic
// truth for the two-sample normal scenario: evaluating N(0,1) against the
// median split of N(0,s^2) gives 4*(1/4 + atan(s)/(2 pi)) - 1.
double normal_truth(double splitter_sd_over_eval_sd) {
    return 4 * (0.25 + std::atan(splitter_sd_over_eval_sd) / (8 * std::atan(1.0)) / 1.0) -
           1.0;
}

// criteria 1 + 2 share the corpus
void criteria_oracles_linearity() {
    RngStream rng(20260826);
    bool rank_ok = true, appendix_ok = true, linear_ok = true;
    double worst_rank = 0, worst_lin = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        auto data = random_untied_dataset(rng);
        const std::size_t k = data.k(), d = data.d();
        auto prop = WeightScheme::proportional(data.group_sizes());
        const auto plug = reference_overlap(data, prop);
        const auto fast = rank_reference_overlap(data, prop);
        for (std::size_t c = 0; c < plug.entries.size(); ++c) {
            const double diff = std::abs(plug.entries[c] - fast.entries[c]);
            worst_rank = std::max(worst_rank, diff);
            if (diff > 1e-12) rank_ok = false;
        }
        const auto printed = appendix_rank_overlap(data, prop);
        for (std::size_t i = 0; i < k; ++i) {
            if (data.group_size(i) % 2) continue;
            for (std::size_t s = 0; s < d; ++s)
                if (std::abs(printed.at(i, s) -
                             (plug.at(i, s) - prop.weights[i] / 2)) > 1e-12)
                    appendix_ok = false;
        }

        const auto pw = all_pairwise_overlaps(data);
        std::vector<WeightScheme> schemes{prop, WeightScheme::equal(k)};
        {
            std::vector<double> w(k, 0.0);
            double total = 0;
            for (std::size_t i = 0; i < k; ++i) total += (w[i] = 1.0 + i);
            for (auto& v : w) v /= total;
            schemes.push_back(WeightScheme::custom(w));
        }
        for (const auto& scheme : schemes) {
            const auto est = reference_overlap(data, scheme);
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t s = 0; s < d; ++s) {
                    double lin = 0;
                    for (std::size_t j = 0; j < k; ++j)
                        lin += scheme.weights[j] * pw.at(j, i, s);
                    const double diff = std::abs(est.at(i, s) - lin);
                    worst_lin = std::max(worst_lin, diff);
                    if (diff > 1e-12) linear_ok = false;
                }
        }
    }
    report(1, rank_ok && appendix_ok,
           "rank fast path vs plug-in (worst " + fmt(worst_rank) +
               "), printed closed form = plug-in - w_i/2 on even groups");
    report(2, linear_ok,
           "linearity over pairwise decomposition, all weight schemes (worst " +
               fmt(worst_lin) + ")");
}

void criterion_self_overlap() {
    RngStream rng(3);
    bool exact_ok = true;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 * (1 + rng.next_below(10));
        std::vector<std::vector<double>> g;
        for (std::size_t r = 0; r < n; ++r) g.push_back({rng.next_uniform()});
        GroupedDataset data(std::vector<std::vector<std::vector<double>>>{g});
        auto est = reference_overlap(data, WeightScheme::proportional(data.group_sizes()));
        if (est.at(0, 0) != 0.5) exact_ok = false;
    }
    // population F = G at n = m = 20000
    std::vector<double> a, b;
    RngStream ra(11, 1, 1), rb(11, 1, 2);
    for (int i = 0; i < 20000; ++i) {
        a.push_back(ra.next_normal());
        b.push_back(rb.next_normal());
    }
    const double est =
        two_sample_overlap({Sample(a)}, {Sample(b)})[0];
    const bool pop_ok = std::abs(est - 0.5) <= 0.01;
    report(3, exact_ok && pop_ok,
           "even-n self-overlap exactly 1/2; equal-population estimate " + fmt(est) +
               " within 0.01 of 0.5");
}

void criterion_s1_truth() {
    const double truth = normal_truth(std::sqrt(2.0));  // 0.60817
    // finite-sample estimator at n = m = 20000
    std::vector<double> split, eval;
    RngStream rs(21, 1, 1), re(21, 1, 2);
    for (int i = 0; i < 20000; ++i) {
        split.push_back(std::sqrt(2.0) * rs.next_normal());
        eval.push_back(re.next_normal());
    }
    const double est = two_sample_overlap({Sample(eval)}, {Sample(split)})[0];

    // independent large-sample oracle through the scenario machinery
    ScenarioSpec spec;
    spec.k = 2;
    spec.d = 2;
    spec.n = {50, 50};
    spec.two_sample = true;
    GroupFamily fx, fy;
    fx.mean = {0, 0};
    fx.cov = cov2(2, 2, 0.25);
    fy.mean = {0, 0};
    fy.cov = cov2(1, 1, 0.25);
    spec.family = {fx, fy};
    const auto oracle = large_sample_truth(spec, 20000, 97);

    bool ok = std::abs(est - 0.6082) <= 0.01 && std::abs(truth - 0.6082) <= 5e-4;
    for (double t : oracle) ok = ok && std::abs(t - 0.6082) <= 0.01;
    report(4, ok,
           "two-sample truth 0.6082: analytic " + fmt(truth) + ", estimator " + fmt(est) +
               ", large-sample oracle " + fmt(oracle[0]) + "/" + fmt(oracle[1]));
}

void criterion_empirical_size() {
    ScenarioSpec spec;
    spec.k = 3;
    spec.d = 2;
    spec.n.assign(3, 50);
    GroupFamily fam;
    fam.mean = {1.0, 1.0};
    fam.cov = cov2(1, 1, 0.25);
    spec.family.assign(3, fam);
    spec.reps = 1000;
    spec.bootstrap_b = 500;
    spec.seed = 815;
    const auto rep = run_size_power(
        spec, {TestMethod::wald, TestMethod::anova_type, TestMethod::percentile});
    double wald = -1, anova = -1, pct = -1;
    for (const auto& m : rep.methods) {
        if (m.method == "wald") wald = m.rate;
        if (m.method == "anova_type") anova = m.rate;
        if (m.method == "percentile") pct = m.rate;
    }
    const bool ok = wald >= 0.005 && wald <= 0.05 && anova >= 0.005 && anova <= 0.05 &&
                    pct >= 0.0 && pct <= 0.02;
    report(5, ok,
           "k-sample size at n=50: wald " + fmt(wald) + ", anova " + fmt(anova) +
               " (targets 0.023/0.029 within 0.02), percentile " + fmt(pct) + " <= 0.02");
}

void criterion_coverage_length() {
    ScenarioSpec spec;
    spec.k = 2;
    spec.d = 2;
    spec.n.assign(2, 50);
    spec.two_sample = true;
    GroupFamily fx, fy;
    fx.mean = {0, 0};
    fx.cov = cov2(2, 2, 0.25);
    fy.mean = {0, 0};
    fy.cov = cov2(1, 1, 0.25);
    spec.family = {fx, fy};
    spec.reps = 500;
    spec.bootstrap_b = 500;
    spec.seed = 1123;
    spec.mc_samples = 4000;
    spec.truth.assign(2, normal_truth(std::sqrt(2.0)));
    const auto rep = run_coverage(spec, {"bonferroni", "mvt", "ellipse"});
    double bc = -1, bl = -1, ml = -1, el = -1;
    for (const auto& m : rep.methods) {
        if (m.method == "bonferroni") { bc = m.rate; bl = m.mean_length; }
        if (m.method == "mvt") ml = m.mean_length;
        if (m.method == "ellipse") el = m.mean_length;
    }
    const bool ok = std::abs(bc - 0.964) <= 0.03 && std::abs(bl - 0.271) <= 0.03 && el > ml;
    report(6, ok,
           "two-sample n=50: bonferroni coverage " + fmt(bc) + " (target 0.964), length " +
               fmt(bl) + " (target 0.271); ellipse length " + fmt(el) + " > mvt " +
               fmt(ml));
}

void criterion_power_ordering() {
    // variance-heterogeneity alternative, power in n
    bool ok = true;
    std::string detail = "anova power over n {50,100,150}:";
    double prev = -1;
    const std::size_t reps = 250;
    const double slack = 2 * std::sqrt(0.25 / reps);
    for (std::size_t n : {50u, 100u, 150u}) {
        ScenarioSpec spec;
        spec.k = 3;
        spec.d = 2;
        spec.n.assign(3, n);
        GroupFamily f1, f2;
        f1.mean = {1.0, 1.0};
        f1.cov = cov2(1, 1, 0.25);
        f2 = f1;
        f2.cov = cov2(1.5 * 1.5, 1.5 * 1.5, 0.25);
        spec.family = {f1, f2, f1};
        spec.reps = reps;
        spec.bootstrap_b = 300;
        spec.seed = 900 + n;
        const auto rep = run_size_power(spec, {TestMethod::wald, TestMethod::anova_type});
        double wald = 0, anova = 0;
        for (const auto& m : rep.methods) {
            if (m.method == "wald") wald = m.rate;
            if (m.method == "anova_type") anova = m.rate;
        }
        detail += " " + fmt(anova);
        if (anova < prev - slack) ok = false;
        if (anova < wald - slack) ok = false;
        prev = anova;
    }
    // two-sample power in the variance ratio
    detail += "; two-sample power over sigma {1.1,1.5,2.0}:";
    prev = -1;
    for (double sigma2 : {1.1, 1.5, 2.0}) {
        ScenarioSpec spec;
        spec.k = 2;
        spec.d = 2;
        spec.n.assign(2, 50);
        spec.two_sample = true;
        GroupFamily fx, fy;
        fx.mean = {0, 0};
        fx.cov = cov2(sigma2, sigma2, 0.25);
        fy.mean = {0, 0};
        fy.cov = cov2(1, 1, 0.25);
        spec.family = {fx, fy};
        spec.reps = reps;
        spec.bootstrap_b = 300;
        spec.seed = 7000 + static_cast<std::uint64_t>(sigma2 * 10);
        const auto rep = run_size_power(spec, {TestMethod::anova_type});
        const double p = rep.methods[0].rate;
        detail += " " + fmt(p);
        if (p < prev - slack) ok = false;
        prev = p;
    }
    report(7, ok, detail);
}

void criterion_numerics() {
    bool ok = true;
    McParams mc{80000, 14, 5e-4};
    // equicoordinate quantiles vs independence factorization
    for (std::size_t p : {1u, 2u, 3u, 5u}) {
        const double oracle = std_normal_quantile(0.5 * (1 + std::pow(0.95, 1.0 / p)));
        const double got =
            equicoordinate_quantile(CorrelationMatrix(Matrix::identity(p)), 0.95, mc);
        if (std::abs(got - oracle) > 1e-3 + 3 * 0.002) ok = false;
    }
    // chi-square and F quantiles vs bisection on the series-evaluated CDF
    for (double df : {1.0, 1.6, 4.0, 12.0}) {
        for (double p : {0.05, 0.5, 0.95, 0.99}) {
            double lo = 0, hi = 1e4;
            for (int i = 0; i < 200; ++i) {
                const double mid = 0.5 * (lo + hi);
                (regularized_gamma_p(df / 2, mid / 2) < p ? lo : hi) = mid;
            }
            const double oracle = 0.5 * (lo + hi);
            if (std::abs(chi_square_quantile(df, p) - oracle) > 1e-6 * oracle) ok = false;
            if (std::abs(f_nu_inf_quantile(df, p) - oracle / df) > 1e-6 * oracle / df)
                ok = false;
        }
    }
    // Penrose conditions on random symmetric 6x6
    RngStream rng(888);
    auto mad = [](const Matrix& a, const Matrix& b) {
        double w = 0;
        for (std::size_t i = 0; i < a.a.size(); ++i)
            w = std::max(w, std::abs(a.a[i] - b.a[i]));
        return w;
    };
    for (int trial = 0; trial < 30; ++trial) {
        Matrix m(6, 6);
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = 0; j <= i; ++j)
                m(i, j) = m(j, i) = 2 * rng.next_uniform() - 1;
        const Matrix p = sym_pseudoinverse(m).inv;
        const Matrix mp = mat_mul(m, p), pm = mat_mul(p, m);
        if (mad(mat_mul(mp, m), m) > 1e-8) ok = false;
        if (mad(mat_mul(pm, p), p) > 1e-8) ok = false;
        if (!mp.is_symmetric(1e-8) || !pm.is_symmetric(1e-8)) ok = false;
    }
    report(8, ok,
           "equicoordinate quantiles vs factorization oracles; chi-square/F quantiles vs "
           "bisection; Penrose conditions");
}

void criterion_determinism() {
    const char* path = "acceptance_determinism.csv";
    {
        std::ofstream out(path);
        out << "group,a,b\n";
        RngStream rng(5);
        for (int i = 0; i < 3; ++i)
            for (int r = 0; r < 20; ++r)
                out << "g" << i << ',' << rng.next_normal() << ',' << rng.next_normal()
                    << "\n";
    }
    AnalysisConfig config;
    config.input_path = path;
    config.seed = 77;
    config.bootstrap_b = 250;
    config.mc_samples = 6000;
    config.tests = {TestMethod::wald, TestMethod::anova_type, TestMethod::max_t,
                    TestMethod::percentile};
    config.cis = {CiMethod::bonferroni, CiMethod::mvt, CiMethod::ellipse_projection};
    config.posthoc = true;
    const std::string base = report_to_json(run_analysis(config));
    bool ok = report_to_json(run_analysis(config)) == base;
    config.workers = 3;
    ok = ok && report_to_json(run_analysis(config)) == base;
    config.workers = 7;
    ok = ok && report_to_json(run_analysis(config)) == base;
    std::remove(path);
    report(9, ok, "byte-identical JSON across reruns and worker counts {1,3,7}");
}

void criterion_case_study() {
    std::string found;
    for (const char* name : {"swanson.csv", "isotopes.csv", "case_study.csv"}) {
        const std::string candidate = std::string(OVERLAPKIT_DATA_DIR) + "/" + name;
        struct stat st{};
        if (::stat(candidate.c_str(), &st) == 0) { found = candidate; break; }
    }
    if (found.empty()) {
        report_skip(10, "external stable-isotope dataset not present under " +
                            std::string(OVERLAPKIT_DATA_DIR));
        return;
    }
    AnalysisConfig config;
    config.input_path = found;
    {
        // first header column is the group label
        std::ifstream in(found);
        std::string header;
        std::getline(in, header);
        config.group_col = header.substr(0, header.find(','));
    }
    config.seed = 2026;
    config.bootstrap_b = 2000;
    config.tests = {TestMethod::wald, TestMethod::anova_type};
    config.cis = {CiMethod::mvt};
    const auto rep = run_analysis(config);
    bool ok = rep.group_labels.size() == 4 && rep.component_labels.size() == 3;
    for (const auto& t : rep.global_tests) ok = ok && t.p_value < 0.001;
    // qualitative interval readout: for whitefish groups the carbon interval
    // contains (or nearly contains) 1/2 while the nitrogen/sulfur ones exclude it
    const auto& mvt = rep.intervals.front();
    for (std::size_t i = 0; i < rep.group_labels.size(); ++i) {
        const std::string& g = rep.group_labels[i];
        if (g.find("DWF") == std::string::npos && g.find("KWF") == std::string::npos)
            continue;
        const std::size_t base = i * 3;
        ok = ok && mvt.lower[base] - 0.02 <= 0.5 && 0.5 <= mvt.upper[base] + 0.02;
        for (std::size_t s = 1; s < 3; ++s)
            ok = ok && (0.5 < mvt.lower[base + s] || 0.5 > mvt.upper[base + s]);
    }
    report(10, ok, "case-study dataset " + found + ": global p-values < 0.001 and the "
                   "expected per-component interval pattern");
}

}  // namespace

int main() {
    criteria_oracles_linearity();
    criterion_self_overlap();
    criterion_s1_truth();
    criterion_empirical_size();
    criterion_coverage_length();
    criterion_power_ordering();
    criterion_numerics();
    criterion_determinism();
    criterion_case_study();
    if (g_failures) std::printf("%d criterion(s) FAILED\n", g_failures);
    else std::printf("all criteria passed (or skipped where conditional)\n");
    return g_failures ? 1 : 0;
}
