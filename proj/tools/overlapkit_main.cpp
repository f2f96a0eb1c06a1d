#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "overlapkit/numerics.hpp"
#include "overlapkit/report.hpp"
#include "overlapkit/sim.hpp"

namespace {

using namespace overlapkit;

struct CliOptions {
    AnalysisConfig config;
    std::string weights_arg = "proportional";
    std::string tests_arg;
    std::string ci_arg;
    std::string out_path;
    std::string plot_path;
};

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(item);
    return out;
}

void apply_weights_arg(AnalysisConfig& config, const std::string& arg) {
    if (arg == "proportional") {
        config.weight_mode = WeightScheme::Mode::proportional;
    } else if (arg == "equal") {
        config.weight_mode = WeightScheme::Mode::equal;
    } else {
        config.weight_mode = WeightScheme::Mode::custom;
        config.custom_weights.clear();
        for (const auto& tok : split_list(arg)) {
            char* end = nullptr;
            const double w = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw std::invalid_argument("bad --weights value: " + tok);
            config.custom_weights.push_back(w);
        }
    }
}

std::vector<TestMethod> parse_tests_arg(const std::string& arg) {
    std::vector<TestMethod> out;
    for (const auto& tok : split_list(arg)) {
        if (tok == "wald") out.push_back(TestMethod::wald);
        else if (tok == "anova" || tok == "anova_type") out.push_back(TestMethod::anova_type);
        else if (tok == "maxt" || tok == "max_t") out.push_back(TestMethod::max_t);
        else if (tok == "percentile") out.push_back(TestMethod::percentile);
        else throw std::invalid_argument("unknown test method: " + tok);
    }
    return out;
}

std::vector<CiMethod> parse_ci_arg(const std::string& arg) {
    std::vector<CiMethod> out;
    for (const auto& tok : split_list(arg)) {
        if (tok == "bonferroni") out.push_back(CiMethod::bonferroni);
        else if (tok == "mvt") out.push_back(CiMethod::mvt);
        else if (tok == "ellipse" || tok == "ellipse_projection")
            out.push_back(CiMethod::ellipse_projection);
        else throw std::invalid_argument("unknown ci method: " + tok);
    }
    return out;
}

void add_common_flags(CLI::App* cmd, CliOptions& opt, bool seed_given_tracker[1]) {
    cmd->add_option("--input", opt.config.input_path, "input CSV path")->required();
    cmd->add_option("--group-col", opt.config.group_col, "group label column");
    cmd->add_option("--components", opt.config.components,
                    "component column names (default: all non-group columns)")
        ->delimiter(',');
    cmd->add_option("--weights", opt.weights_arg, "proportional|equal|w1,w2,...");
    cmd->add_option("--alpha", opt.config.alpha, "significance level")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9));
    cmd->add_option("--bootstrap", opt.config.bootstrap_b, "bootstrap replicate count");
    cmd->add_option_function<std::uint64_t>(
           "--seed", [&opt, seed_given_tracker](std::uint64_t v) {
               opt.config.seed = v;
               seed_given_tracker[0] = true;
           },
           "RNG seed (fallback: OVERLAPKIT_SEED)");
    cmd->add_option("--format", opt.config.format, "json|csv|table")
        ->check(CLI::IsMember({"json", "csv", "table"}));
    cmd->add_option("--workers", opt.config.workers, "bootstrap worker threads");
    cmd->add_option("--out", opt.out_path, "write report here instead of stdout");
}

void finish_seed(AnalysisConfig& config, bool seed_given) {
    if (seed_given) return;
    if (const char* env = std::getenv("OVERLAPKIT_SEED")) {
        char* end = nullptr;
        config.seed = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw std::invalid_argument("OVERLAPKIT_SEED is not an integer");
    }
}

int emit_report(const AnalysisReport& report, const CliOptions& opt) {
    std::string body;
    if (opt.config.format == "json") body = report_to_json(report);
    else if (opt.config.format == "csv") body = report_to_csv(report);
    else body = report_to_text(report);
    if (opt.out_path.empty()) {
        std::cout << body;
    } else {
        std::ofstream out(opt.out_path);
        if (!out) throw std::runtime_error("cannot write " + opt.out_path);
        out << body;
    }
    if (!opt.plot_path.empty()) emit_ci_plot_data(report, opt.plot_path);
    return 0;
}

int run_simulate(const std::string& scenario_path, const std::string& mode,
                 const std::string& methods_arg, const std::string& out_path,
                 const std::string& format) {
    ScenarioSpec spec = parse_scenario_file(scenario_path);
    SimulationReport report;
    if (mode == "coverage") {
        std::vector<std::string> methods =
            methods_arg.empty() ? std::vector<std::string>{"bonferroni", "mvt", "ellipse"}
                                : split_list(methods_arg);
        report = run_coverage(spec, methods);
    } else {
        std::vector<TestMethod> methods =
            methods_arg.empty()
                ? std::vector<TestMethod>{TestMethod::wald, TestMethod::anova_type,
                                          TestMethod::max_t, TestMethod::percentile}
                : parse_tests_arg(methods_arg);
        report = run_size_power(spec, methods);
    }
    if (!out_path.empty()) {
        if (format == "csv") write_report_csv(report, out_path);
        else write_report_json(report, out_path);
    }
    std::cout << report.scenario << " (" << report.reps << " reps, "
              << report.wall_seconds << " s)\n";
    for (const auto& m : report.methods)
        std::cout << "  " << m.method << "  rate=" << m.rate << "  se=" << m.mc_se
                  << (mode == "coverage" ? "  mean_length=" + std::to_string(m.mean_length)
                                         : std::string())
                  << (m.failures ? "  failures=" + std::to_string(m.failures)
                                 : std::string())
                  << "\n";
    for (const auto& n : report.notes) std::cout << "  note: " << n << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nonparametric multivariate niche-overlap analysis"};
    app.require_subcommand(1);

    CliOptions opt;
    bool seed_given[1] = {false};

    auto* estimate = app.add_subcommand("estimate", "overlap estimates only");
    add_common_flags(estimate, opt, seed_given);

    auto* test = app.add_subcommand("test", "global/posthoc hypothesis tests");
    add_common_flags(test, opt, seed_given);
    test->add_option("--tests", opt.tests_arg, "wald,anova,maxt,percentile (default all)");
    test->add_flag("--posthoc", opt.config.posthoc, "marginal and per-group follow-up tests");

    auto* ci = app.add_subcommand("ci", "simultaneous confidence intervals");
    add_common_flags(ci, opt, seed_given);
    ci->add_option("--ci", opt.ci_arg, "bonferroni,mvt,ellipse (default all)");
    ci->add_option("--plot-data", opt.plot_path, "also write plot-ready interval CSV here");

    std::string scenario_path, sim_mode = "size", sim_methods, sim_out,
                sim_format = "json";
    auto* simulate = app.add_subcommand("simulate", "run a scenario file");
    simulate->add_option("--scenario", scenario_path, "scenario file (key = value)")
        ->required();
    simulate->add_option("--mode", sim_mode, "size|coverage")
        ->check(CLI::IsMember({"size", "coverage"}));
    simulate->add_option("--methods", sim_methods, "comma list of methods");
    simulate->add_option("--out", sim_out, "report output path");
    simulate->add_option("--format", sim_format, "json|csv")
        ->check(CLI::IsMember({"json", "csv"}));

    auto* version = app.add_subcommand("version", "print version");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (version->parsed()) {
            std::cout << "overlapkit " << overlapkit::kVersion << "\n";
            return 0;
        }
        if (simulate->parsed())
            return run_simulate(scenario_path, sim_mode, sim_methods, sim_out, sim_format);

        apply_weights_arg(opt.config, opt.weights_arg);
        finish_seed(opt.config, seed_given[0]);
        if (opt.config.bootstrap_b < 100)
            std::cerr << "warning: bootstrap replicate count below 100\n";
        if (test->parsed())
            opt.config.tests = opt.tests_arg.empty()
                                   ? std::vector<TestMethod>{TestMethod::wald,
                                                             TestMethod::anova_type,
                                                             TestMethod::max_t,
                                                             TestMethod::percentile}
                                   : parse_tests_arg(opt.tests_arg);
        if (ci->parsed())
            opt.config.cis = opt.ci_arg.empty()
                                 ? std::vector<CiMethod>{CiMethod::bonferroni, CiMethod::mvt,
                                                         CiMethod::ellipse_projection}
                                 : parse_ci_arg(opt.ci_arg);
        return emit_report(run_analysis(opt.config), opt);
    } catch (const overlapkit::numeric_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
