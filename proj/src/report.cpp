#include "overlapkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace overlapkit {

namespace {

using ordered_json = nlohmann::ordered_json;

double round12(double v) {
    if (!std::isfinite(v)) return v;
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string() : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

ParsedDataset parse_dataset(const std::string& path, const AnalysisConfig& config) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open input file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty input file: " + path);
    const auto header = split_csv_line(line);

    std::size_t group_idx = header.size();
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == config.group_col) group_idx = c;
    if (group_idx == header.size())
        throw std::invalid_argument("group column not found: " + config.group_col);

    std::vector<std::string> comps = config.components;
    if (comps.empty()) {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (c != group_idx) comps.push_back(header[c]);
    }
    std::vector<std::size_t> comp_idx;
    for (const auto& name : comps) {
        std::size_t found = header.size();
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) found = c;
        if (found == header.size())
            throw std::invalid_argument("component column not found: " + name);
        comp_idx.push_back(found);
    }
    if (comp_idx.empty()) throw std::invalid_argument("no component columns");

    std::vector<std::string> group_order;
    std::vector<std::vector<std::vector<double>>> groups;
    std::size_t dropped = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() <= group_idx)
            throw std::invalid_argument("row " + std::to_string(line_no) + ": too few fields");
        std::vector<double> row;
        bool missing = false;
        for (std::size_t c : comp_idx) {
            if (c >= fields.size() || fields[c].empty()) { missing = true; break; }
            char* end = nullptr;
            const double v = std::strtod(fields[c].c_str(), &end);
            if (end == fields[c].c_str() || *end != '\0')
                throw std::invalid_argument("row " + std::to_string(line_no) +
                                            ": non-numeric cell '" + fields[c] + "'");
            if (!std::isfinite(v)) { missing = true; break; }
            row.push_back(v);
        }
        if (missing) { ++dropped; continue; }
        const std::string& label = fields[group_idx];
        auto it = std::find(group_order.begin(), group_order.end(), label);
        std::size_t gi;
        if (it == group_order.end()) {
            gi = group_order.size();
            group_order.push_back(label);
            groups.emplace_back();
        } else {
            gi = static_cast<std::size_t>(it - group_order.begin());
        }
        groups[gi].push_back(std::move(row));
    }

    ParsedDataset out{GroupedDataset(std::move(groups), group_order, comps), dropped, {}};
    if (dropped > 0)
        out.warnings.push_back(std::to_string(dropped) +
                               " row(s) with missing components dropped");
    if (out.data.has_ties())
        out.warnings.push_back(
            "tied observations present; midrank handling applied (theory assumes "
            "continuous marginals)");
    return out;
}

AnalysisReport run_analysis(const AnalysisConfig& config) {
    ParsedDataset parsed = parse_dataset(config.input_path, config);
    const GroupedDataset& data = parsed.data;
    const bool needs_inference = !config.tests.empty() || !config.cis.empty();
    if (needs_inference && data.k() < 2)
        throw std::invalid_argument("tests and intervals require at least 2 groups");

    WeightScheme weights = [&] {
        switch (config.weight_mode) {
            case WeightScheme::Mode::proportional:
                return WeightScheme::proportional(data.group_sizes());
            case WeightScheme::Mode::equal: return WeightScheme::equal(data.k());
            case WeightScheme::Mode::custom:
                return WeightScheme::custom(config.custom_weights);
        }
        return WeightScheme::proportional(data.group_sizes());
    }();

    AnalysisReport report;
    report.group_labels = data.group_labels();
    report.component_labels = data.component_labels();
    report.group_sizes = data.group_sizes();
    report.total_n = data.total_size();
    report.warnings = parsed.warnings;
    report.seed = config.seed;
    report.bootstrap_b = config.bootstrap_b;
    report.alpha = config.alpha;
    report.weights = weights.weights;

    OverlapMatrix est = reference_overlap(data, weights);
    report.estimates = est.flattened();
    for (std::size_t i = 0; i < data.k(); ++i)
        for (std::size_t s = 0; s < data.d(); ++s)
            report.entry_labels.push_back(data.group_labels()[i] + " " +
                                          data.component_labels()[s]);

    if (!needs_inference) return report;

    ReplicateMatrix rep = bootstrap_replicates(data, weights, config.bootstrap_b,
                                               config.seed, config.workers);
    CovarianceEstimate cov = bootstrap_covariance(rep, data.total_size());
    for (std::size_t c = 0; c < cov.degenerate.size(); ++c)
        if (cov.degenerate[c])
            report.warnings.push_back("component '" + report.entry_labels[c] +
                                      "' has zero bootstrap variance");

    const McParams mc{config.mc_samples, hash_combine(config.seed, 0x3C01ULL),
                      5e-4};
    for (TestMethod method : config.tests) {
        TestResult res;
        switch (method) {
            case TestMethod::wald:
                res = wald_test(est, cov, data.total_size(), config.alpha);
                break;
            case TestMethod::anova_type:
                res = anova_type_test(est, cov, data.total_size(), config.alpha);
                break;
            case TestMethod::max_t:
                res = max_t_test(est, cov, data.total_size(), config.alpha, mc);
                break;
            case TestMethod::percentile: {
                std::vector<std::size_t> comp_n;
                comp_n.reserve(data.k() * data.d());
                for (std::size_t i = 0; i < data.k(); ++i)
                    comp_n.insert(comp_n.end(), data.d(), data.group_size(i));
                res = percentile_test(est, rep, data.total_size(), config.alpha, comp_n);
                break;
            }
        }
        for (const auto& note : res.notes) report.warnings.push_back(
            test_method_name(method) + ": " + note);
        report.global_tests.push_back(std::move(res));
    }

    for (CiMethod method : config.cis) {
        IntervalSet set;
        switch (method) {
            case CiMethod::bonferroni:
                set = bonferroni_sci(est, rep, data.total_size(), config.alpha);
                break;
            case CiMethod::mvt:
                set = mvt_sci(est, cov, data.total_size(), config.alpha, mc);
                break;
            case CiMethod::ellipse_projection:
                set = ellipse_projection_sci(est, cov, data.total_size(), config.alpha);
                break;
        }
        set.labels = report.entry_labels;
        for (const auto& note : set.notes)
            report.warnings.push_back(ci_method_name(method) + ": " + note);
        report.intervals.push_back(std::move(set));
    }

    if (config.posthoc) {
        const std::size_t k = data.k(), d = data.d();
        for (std::size_t s = 0; s < d; ++s) {
            std::vector<std::size_t> sel;
            for (std::size_t i = 0; i < k; ++i) sel.push_back(i * d + s);
            NamedTest t;
            t.name = "marginal:" + data.component_labels()[s];
            t.result = subvector_test(est, cov, data.total_size(), sel,
                                      SubvectorMethod::anova_type, config.alpha);
            report.posthoc_tests.push_back(std::move(t));
        }
        for (std::size_t i = 0; i < k; ++i) {
            std::vector<std::size_t> sel;
            for (std::size_t s = 0; s < d; ++s) sel.push_back(i * d + s);
            NamedTest t;
            t.name = "group:" + data.group_labels()[i];
            t.result = subvector_test(est, cov, data.total_size(), sel,
                                      SubvectorMethod::anova_type, config.alpha);
            report.posthoc_tests.push_back(std::move(t));
        }
    }
    return report;
}

namespace {

ordered_json test_to_json(const TestResult& t) {
    ordered_json j;
    j["method"] = test_method_name(t.method);
    j["statistic"] = round12(t.statistic);
    j["reference"] = t.reference;
    if (t.has_p_value) j["p_value"] = round12(t.p_value);
    else j["p_value"] = nullptr;
    j["reject"] = t.reject;
    j["alpha"] = round12(t.alpha);
    j["df"] = round12(t.df);
    if (!t.per_component.empty()) {
        ordered_json pc = ordered_json::array();
        for (const auto& c : t.per_component)
            pc.push_back({{"statistic", round12(c.statistic)}, {"flagged", c.flagged}});
        j["per_component"] = pc;
    }
    j["notes"] = t.notes;
    return j;
}

TestResult test_from_json(const ordered_json& j) {
    TestResult t;
    const std::string m = j.at("method");
    if (m == "wald") t.method = TestMethod::wald;
    else if (m == "anova_type") t.method = TestMethod::anova_type;
    else if (m == "max_t") t.method = TestMethod::max_t;
    else t.method = TestMethod::percentile;
    t.statistic = j.at("statistic");
    t.reference = j.at("reference");
    t.has_p_value = !j.at("p_value").is_null();
    t.p_value = t.has_p_value ? j.at("p_value").get<double>()
                              : std::numeric_limits<double>::quiet_NaN();
    t.reject = j.at("reject");
    t.alpha = j.at("alpha");
    t.df = j.at("df");
    if (j.contains("per_component"))
        for (const auto& c : j.at("per_component"))
            t.per_component.push_back({c.at("statistic"), c.at("flagged")});
    t.notes = j.at("notes").get<std::vector<std::string>>();
    return t;
}

ordered_json interval_to_json(const IntervalSet& s) {
    ordered_json j;
    j["method"] = ci_method_name(s.method);
    j["level"] = round12(s.level);
    ordered_json rows = ordered_json::array();
    for (std::size_t c = 0; c < s.lower.size(); ++c) {
        rows.push_back({{"label", s.labels[c]},
                        {"lower", round12(s.lower[c])},
                        {"upper", round12(s.upper[c])},
                        {"raw_lower", round12(s.raw_lower[c])},
                        {"raw_upper", round12(s.raw_upper[c])}});
    }
    j["components"] = rows;
    j["notes"] = s.notes;
    return j;
}

IntervalSet interval_from_json(const ordered_json& j) {
    IntervalSet s;
    const std::string m = j.at("method");
    if (m == "bonferroni") s.method = CiMethod::bonferroni;
    else if (m == "mvt") s.method = CiMethod::mvt;
    else s.method = CiMethod::ellipse_projection;
    s.level = j.at("level");
    for (const auto& row : j.at("components")) {
        s.labels.push_back(row.at("label"));
        s.lower.push_back(row.at("lower"));
        s.upper.push_back(row.at("upper"));
        s.raw_lower.push_back(row.at("raw_lower"));
        s.raw_upper.push_back(row.at("raw_upper"));
    }
    s.notes = j.at("notes").get<std::vector<std::string>>();
    return s;
}

}  // namespace

std::string report_to_json(const AnalysisReport& report) {
    ordered_json j;
    j["version"] = report.version;
    j["seed"] = report.seed;
    j["bootstrap_b"] = report.bootstrap_b;
    j["alpha"] = round12(report.alpha);
    j["group_labels"] = report.group_labels;
    j["component_labels"] = report.component_labels;
    j["group_sizes"] = report.group_sizes;
    j["total_n"] = report.total_n;
    ordered_json weights = ordered_json::array();
    for (double w : report.weights) weights.push_back(round12(w));
    j["weights"] = weights;
    ordered_json est = ordered_json::array();
    for (std::size_t c = 0; c < report.estimates.size(); ++c)
        est.push_back({{"label", report.entry_labels[c]},
                       {"estimate", round12(report.estimates[c])}});
    j["estimates"] = est;
    ordered_json tests = ordered_json::array();
    for (const auto& t : report.global_tests) tests.push_back(test_to_json(t));
    j["global_tests"] = tests;
    ordered_json posthoc = ordered_json::array();
    for (const auto& t : report.posthoc_tests) {
        ordered_json e = test_to_json(t.result);
        e["name"] = t.name;
        posthoc.push_back(e);
    }
    j["posthoc_tests"] = posthoc;
    ordered_json cis = ordered_json::array();
    for (const auto& s : report.intervals) cis.push_back(interval_to_json(s));
    j["intervals"] = cis;
    j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

AnalysisReport report_from_json(const std::string& json_text) {
    const auto j = ordered_json::parse(json_text);
    AnalysisReport r;
    r.version = j.at("version");
    r.seed = j.at("seed");
    r.bootstrap_b = j.at("bootstrap_b");
    r.alpha = j.at("alpha");
    r.group_labels = j.at("group_labels").get<std::vector<std::string>>();
    r.component_labels = j.at("component_labels").get<std::vector<std::string>>();
    r.group_sizes = j.at("group_sizes").get<std::vector<std::size_t>>();
    r.total_n = j.at("total_n");
    r.weights = j.at("weights").get<std::vector<double>>();
    for (const auto& e : j.at("estimates")) {
        r.entry_labels.push_back(e.at("label"));
        r.estimates.push_back(e.at("estimate"));
    }
    for (const auto& t : j.at("global_tests")) r.global_tests.push_back(test_from_json(t));
    for (const auto& t : j.at("posthoc_tests"))
        r.posthoc_tests.push_back({t.at("name"), test_from_json(t)});
    for (const auto& s : j.at("intervals")) r.intervals.push_back(interval_from_json(s));
    r.warnings = j.at("warnings").get<std::vector<std::string>>();
    return r;
}

std::string report_to_text(const AnalysisReport& report) {
    std::ostringstream out;
    out << "overlapkit " << report.version << "  (seed " << report.seed << ", B "
        << report.bootstrap_b << ", alpha " << report.alpha << ")\n";
    out << "groups:";
    for (std::size_t i = 0; i < report.group_labels.size(); ++i)
        out << ' ' << report.group_labels[i] << "(n=" << report.group_sizes[i] << ")";
    out << "\n\nestimates (benchmark 0.5):\n";
    for (std::size_t c = 0; c < report.estimates.size(); ++c) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "  %-24s %.6f\n", report.entry_labels[c].c_str(),
                      report.estimates[c]);
        out << buf;
    }
    if (!report.global_tests.empty()) {
        out << "\nglobal tests:\n";
        for (const auto& t : report.global_tests) {
            char buf[160];
            if (t.has_p_value)
                std::snprintf(buf, sizeof(buf), "  %-12s stat=%.5f  p=%.6g  %s\n",
                              test_method_name(t.method).c_str(), t.statistic, t.p_value,
                              t.reject ? "REJECT" : "accept");
            else
                std::snprintf(buf, sizeof(buf), "  %-12s margin=%.5f  %s\n",
                              test_method_name(t.method).c_str(), t.statistic,
                              t.reject ? "REJECT" : "accept");
            out << buf;
        }
    }
    for (const auto& t : report.posthoc_tests) {
        char buf[160];
        std::snprintf(buf, sizeof(buf), "  posthoc %-20s stat=%.5f  p=%.6g  %s\n",
                      t.name.c_str(), t.result.statistic, t.result.p_value,
                      t.result.reject ? "REJECT" : "accept");
        out << buf;
    }
    for (const auto& s : report.intervals) {
        out << "\n" << ci_method_name(s.method) << " SCI (level " << s.level << "):\n";
        for (std::size_t c = 0; c < s.lower.size(); ++c) {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "  %-24s [%.6f, %.6f]\n", s.labels[c].c_str(),
                          s.lower[c], s.upper[c]);
            out << buf;
        }
    }
    if (!report.warnings.empty()) {
        out << "\nwarnings:\n";
        for (const auto& w : report.warnings) out << "  - " << w << "\n";
    }
    return out.str();
}

std::string report_to_csv(const AnalysisReport& report) {
    std::ostringstream out;
    out << "label,estimate\n";
    for (std::size_t c = 0; c < report.estimates.size(); ++c) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g", report.estimates[c]);
        out << report.entry_labels[c] << ',' << buf << '\n';
    }
    return out.str();
}

void emit_ci_plot_data(const AnalysisReport& report, const std::string& path) {
    if (report.intervals.empty())
        throw std::invalid_argument("emit_ci_plot_data: report has no intervals");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "# reference = 0.5\n";
    out << "variable_label,method,estimate,lower,upper,level\n";
    char buf[64];
    for (const auto& set : report.intervals) {
        for (std::size_t c = 0; c < set.lower.size(); ++c) {
            out << set.labels[c] << ',' << ci_method_name(set.method) << ',';
            std::snprintf(buf, sizeof(buf), "%.12g", report.estimates[c]);
            out << buf << ',';
            std::snprintf(buf, sizeof(buf), "%.12g", set.lower[c]);
            out << buf << ',';
            std::snprintf(buf, sizeof(buf), "%.12g", set.upper[c]);
            out << buf << ',';
            std::snprintf(buf, sizeof(buf), "%.12g", set.level);
            out << buf << '\n';
        }
    }
    if (!out) throw std::runtime_error("write failure: " + path);
}

}  // namespace overlapkit
