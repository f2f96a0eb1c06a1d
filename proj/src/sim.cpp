#include "overlapkit/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "overlapkit/bootstrap.hpp"
#include "overlapkit/ci.hpp"

namespace overlapkit {

namespace {

// Marsaglia-Tsang gamma(shape, 1) sampler, deterministic per stream
double sample_gamma(double shape, RngStream& rng) {
    if (shape < 1.0) {
        const double u = rng.next_uniform();
        return sample_gamma(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = rng.next_normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.next_uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double sample_chi_square(double df, RngStream& rng) {
    return 2.0 * sample_gamma(0.5 * df, rng);
}

}  // namespace

std::vector<std::vector<double>> sample_mvnormal(const std::vector<double>& mean,
                                                 const Matrix& cov, std::size_t n,
                                                 RngStream& rng) {
    const std::size_t d = mean.size();
    Matrix l = cholesky_psd(cov);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d, 0.0));
    std::vector<double> z(d);
    for (std::size_t r = 0; r < n; ++r) {
        for (auto& v : z) v = rng.next_normal();
        for (std::size_t i = 0; i < d; ++i) {
            double x = mean[i];
            for (std::size_t j = 0; j <= i; ++j) x += l(i, j) * z[j];
            rows[r][i] = x;
        }
    }
    return rows;
}

std::vector<std::vector<double>> sample_mvt(const std::vector<double>& mean,
                                            const Matrix& scale, double df, std::size_t n,
                                            RngStream& rng) {
    if (!(df > 0.0)) throw std::invalid_argument("sample_mvt: df must be positive");
    const std::size_t d = mean.size();
    Matrix l = cholesky_psd(scale);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d, 0.0));
    std::vector<double> z(d);
    for (std::size_t r = 0; r < n; ++r) {
        for (auto& v : z) v = rng.next_normal();
        const double g = sample_chi_square(df, rng);
        const double denom = std::sqrt(g / df);
        for (std::size_t i = 0; i < d; ++i) {
            double x = 0.0;
            for (std::size_t j = 0; j <= i; ++j) x += l(i, j) * z[j];
            rows[r][i] = mean[i] + x / denom;
        }
    }
    return rows;
}

GroupedDataset generate_scenario(const ScenarioSpec& spec, std::size_t replication) {
    if (spec.family.size() != spec.k || spec.n.size() != spec.k)
        throw std::invalid_argument("generate_scenario: spec k mismatch");
    std::vector<std::vector<std::vector<double>>> groups;
    groups.reserve(spec.k);
    for (std::size_t i = 0; i < spec.k; ++i) {
        RngStream rng(spec.seed, replication + 1, 0xDA7A0000ULL + i);
        const GroupFamily& fam = spec.family[i];
        std::vector<std::vector<double>> rows;
        switch (fam.kind) {
            case GroupFamily::Kind::mvnormal:
                rows = sample_mvnormal(fam.mean, fam.cov, spec.n[i], rng);
                break;
            case GroupFamily::Kind::mvt:
                rows = sample_mvt(fam.mean, fam.cov, fam.df, spec.n[i], rng);
                break;
            case GroupFamily::Kind::mvnormal_lognormal_component: {
                rows = sample_mvnormal(fam.mean, fam.cov, spec.n[i], rng);
                const std::size_t c = fam.lognormal_component;
                if (c >= spec.d)
                    throw std::invalid_argument("generate_scenario: lognormal component index");
                const double sd = std::sqrt(fam.cov(c, c));
                const double sig = std::sqrt(fam.lognormal_sigma2);
                for (auto& row : rows) {
                    const double z = (row[c] - fam.mean[c]) / sd;
                    row[c] = std::exp(fam.lognormal_mu + sig * z);
                }
                break;
            }
        }
        groups.push_back(std::move(rows));
    }
    return GroupedDataset(std::move(groups));
}

namespace {

WeightScheme scheme_for(const ScenarioSpec& spec, const GroupedDataset& data) {
    switch (spec.weight_mode) {
        case WeightScheme::Mode::proportional:
            return WeightScheme::proportional(data.group_sizes());
        case WeightScheme::Mode::equal:
            return WeightScheme::equal(data.k());
        case WeightScheme::Mode::custom:
            return WeightScheme::custom(spec.custom_weights);
    }
    return WeightScheme::proportional(data.group_sizes());
}

std::vector<Sample> column_samples(const GroupedDataset& data, std::size_t i) {
    std::vector<Sample> out;
    for (std::size_t s = 0; s < data.d(); ++s) out.push_back(data.component(i, s));
    return out;
}

OverlapMatrix two_sample_estimate(const GroupedDataset& data) {
    OverlapMatrix est;
    est.k = 1;
    est.d = data.d();
    est.weights = WeightScheme::equal(1);
    est.entries = two_sample_overlap(column_samples(data, 1), column_samples(data, 0));
    return est;
}

ReplicateMatrix two_sample_bootstrap(const GroupedDataset& data, std::size_t b,
                                     std::uint64_t seed) {
    ReplicateMatrix rep;
    rep.b = b;
    rep.kd = data.d();
    rep.seed = seed;
    rep.rows.resize(b * rep.kd);
    for (std::size_t r = 0; r < b; ++r) {
        std::vector<std::vector<Sample>> boot(2);
        for (std::size_t i = 0; i < 2; ++i) {
            RngStream stream(seed, r + 1, i + 1);
            auto rows = resample_group(data.group(i), stream);
            for (std::size_t s = 0; s < data.d(); ++s) {
                std::vector<double> col;
                col.reserve(rows.size());
                for (const auto& row : rows) col.push_back(row[s]);
                boot[i].emplace_back(col);
            }
        }
        auto vals = two_sample_overlap(boot[1], boot[0]);
        std::copy(vals.begin(), vals.end(), rep.rows.begin() + r * rep.kd);
    }
    return rep;
}

struct ReplicationContext {
    OverlapMatrix est;
    ReplicateMatrix rep;
    CovarianceEstimate cov;
    std::size_t total_n = 0;
};

ReplicationContext make_context(const ScenarioSpec& spec, std::size_t r) {
    ReplicationContext ctx;
    GroupedDataset data = generate_scenario(spec, r);
    ctx.total_n = data.total_size();
    const std::uint64_t boot_seed = hash_combine(spec.seed, 0xB0075ULL + r);
    if (spec.two_sample) {
        if (spec.k != 2)
            throw std::invalid_argument("two-sample mode requires k = 2");
        ctx.est = two_sample_estimate(data);
        ctx.rep = two_sample_bootstrap(data, spec.bootstrap_b, boot_seed);
    } else {
        WeightScheme w = scheme_for(spec, data);
        ctx.est = reference_overlap(data, w);
        ctx.rep = bootstrap_replicates(data, w, spec.bootstrap_b, boot_seed);
    }
    ctx.cov = bootstrap_covariance(ctx.rep, ctx.total_n);
    return ctx;
}

double binom_se(double p, std::size_t n) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

}  // namespace

SimulationReport run_size_power(const ScenarioSpec& spec,
                                const std::vector<TestMethod>& methods) {
    const auto t0 = std::chrono::steady_clock::now();
    SimulationReport report;
    report.scenario = spec.name;
    report.reps = spec.reps;
    std::vector<std::size_t> rejects(methods.size(), 0);
    std::vector<std::size_t> failures(methods.size(), 0);

    for (std::size_t r = 0; r < spec.reps; ++r) {
        ReplicationContext ctx;
        try {
            ctx = make_context(spec, r);
        } catch (const std::exception&) {
            for (auto& f : failures) ++f;
            continue;
        }
        for (std::size_t m = 0; m < methods.size(); ++m) {
            try {
                TestResult res;
                switch (methods[m]) {
                    case TestMethod::wald:
                        res = wald_test(ctx.est, ctx.cov, ctx.total_n, spec.alpha);
                        break;
                    case TestMethod::anova_type:
                        res = anova_type_test(ctx.est, ctx.cov, ctx.total_n, spec.alpha);
                        break;
                    case TestMethod::max_t: {
                        McParams mc{spec.mc_samples,
                                    hash_combine(spec.seed, 0x3C0000ULL + r), 1e-3};
                        res = max_t_test(ctx.est, ctx.cov, ctx.total_n, spec.alpha, mc);
                        break;
                    }
                    case TestMethod::percentile: {
                        std::vector<std::size_t> comp_n;
                        if (spec.two_sample) {
                            comp_n.assign(spec.d, spec.n[1]);
                        } else {
                            for (std::size_t i = 0; i < spec.k; ++i)
                                comp_n.insert(comp_n.end(), spec.d, spec.n[i]);
                        }
                        res = percentile_test(ctx.est, ctx.rep, ctx.total_n, spec.alpha,
                                              comp_n);
                        break;
                    }
                }
                if (res.reject) ++rejects[m];
            } catch (const std::exception&) {
                ++failures[m];
            }
        }
    }
    for (std::size_t m = 0; m < methods.size(); ++m) {
        MethodRate rate;
        rate.method = test_method_name(methods[m]);
        const std::size_t ok = spec.reps - failures[m];
        rate.rate = ok ? static_cast<double>(rejects[m]) / static_cast<double>(ok) : 0.0;
        rate.mc_se = ok ? binom_se(rate.rate, ok) : 0.0;
        rate.failures = failures[m];
        report.methods.push_back(rate);
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

SimulationReport run_coverage(const ScenarioSpec& spec,
                              const std::vector<std::string>& ci_methods) {
    if (spec.truth.empty())
        throw std::invalid_argument("run_coverage: scenario truth vector required");
    const auto t0 = std::chrono::steady_clock::now();
    SimulationReport report;
    report.scenario = spec.name;
    report.reps = spec.reps;
    std::vector<std::size_t> covered(ci_methods.size(), 0);
    std::vector<double> length_sum(ci_methods.size(), 0.0);
    std::vector<std::size_t> failures(ci_methods.size(), 0);

    for (std::size_t r = 0; r < spec.reps; ++r) {
        ReplicationContext ctx;
        try {
            ctx = make_context(spec, r);
        } catch (const std::exception&) {
            for (auto& f : failures) ++f;
            continue;
        }
        if (spec.truth.size() != ctx.est.entries.size())
            throw std::invalid_argument("run_coverage: truth vector dimension mismatch");
        for (std::size_t m = 0; m < ci_methods.size(); ++m) {
            try {
                IntervalSet set;
                if (ci_methods[m] == "bonferroni") {
                    set = bonferroni_sci(ctx.est, ctx.rep, ctx.total_n, spec.alpha);
                } else if (ci_methods[m] == "mvt") {
                    McParams mc{spec.mc_samples,
                                hash_combine(spec.seed, 0x3C0000ULL + r), 1e-3};
                    set = mvt_sci(ctx.est, ctx.cov, ctx.total_n, spec.alpha, mc);
                } else if (ci_methods[m] == "ellipse") {
                    set = ellipse_projection_sci(ctx.est, ctx.cov, ctx.total_n, spec.alpha);
                } else {
                    throw std::invalid_argument("run_coverage: unknown ci method " +
                                                ci_methods[m]);
                }
                if (set.covers(spec.truth)) ++covered[m];
                length_sum[m] += set.mean_length();
            } catch (const numeric_error&) {
                ++failures[m];
            }
        }
    }
    for (std::size_t m = 0; m < ci_methods.size(); ++m) {
        MethodRate rate;
        rate.method = ci_methods[m];
        const std::size_t ok = spec.reps - failures[m];
        rate.rate = ok ? static_cast<double>(covered[m]) / static_cast<double>(ok) : 0.0;
        rate.mc_se = ok ? binom_se(rate.rate, ok) : 0.0;
        rate.mean_length = ok ? length_sum[m] / static_cast<double>(ok) : 0.0;
        rate.failures = failures[m];
        report.methods.push_back(rate);
    }
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return report;
}

std::vector<double> large_sample_truth(const ScenarioSpec& spec, std::size_t n_per_group,
                                       std::uint64_t seed) {
    ScenarioSpec big = spec;
    big.seed = seed;
    big.n.assign(spec.k, n_per_group);
    GroupedDataset data = generate_scenario(big, 0);
    if (spec.two_sample) return two_sample_estimate(data).entries;
    return reference_overlap(data, scheme_for(big, data)).entries;
}

namespace {

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<double> broadcast(std::vector<double> v, std::size_t d, const char* what) {
    if (v.size() == 1) v.assign(d, v[0]);
    if (v.size() != d)
        throw std::invalid_argument(std::string("scenario: bad length for ") + what);
    return v;
}

Matrix build_cov(const std::vector<double>& variances, double offdiag) {
    const std::size_t d = variances.size();
    Matrix cov(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            cov(i, j) = (i == j) ? variances[i] : offdiag;
    return cov;
}

}  // namespace

ScenarioSpec parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario: cannot open " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto get = [&](const std::string& key, const std::string& fallback) {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    };
    auto has = [&](const std::string& key) { return kv.count(key) > 0; };

    ScenarioSpec spec;
    spec.name = get("name", path);
    spec.k = std::stoul(get("k", "2"));
    spec.d = std::stoul(get("d", "2"));
    spec.two_sample = get("two_sample", "0") == "1";
    spec.alpha = std::stod(get("alpha", "0.05"));
    spec.bootstrap_b = std::stoul(get("bootstrap", "500"));
    spec.reps = std::stoul(get("reps", "1000"));
    spec.seed = std::stoull(get("seed", "1"));
    spec.mc_samples = std::stoul(get("mc_samples", "20000"));
    {
        auto sizes = parse_double_list(get("n", "50"));
        if (sizes.size() == 1) sizes.assign(spec.k, sizes[0]);
        if (sizes.size() != spec.k)
            throw std::invalid_argument("scenario: n list must have k entries");
        for (double v : sizes) spec.n.push_back(static_cast<std::size_t>(v));
    }
    const std::string wmode = get("weights", "proportional");
    if (wmode == "proportional") {
        spec.weight_mode = WeightScheme::Mode::proportional;
    } else if (wmode == "equal") {
        spec.weight_mode = WeightScheme::Mode::equal;
    } else {
        spec.weight_mode = WeightScheme::Mode::custom;
        spec.custom_weights = parse_double_list(wmode);
    }
    if (has("truth")) spec.truth = broadcast(parse_double_list(kv["truth"]),
                                             spec.two_sample ? spec.d : spec.k * spec.d,
                                             "truth");

    for (std::size_t i = 0; i < spec.k; ++i) {
        const std::string pfx = "family." + std::to_string(i + 1) + ".";
        auto fget = [&](const std::string& key, const std::string& fallback) {
            if (has(pfx + key)) return kv[pfx + key];
            if (has("family." + key)) return kv["family." + key];
            return fallback;
        };
        GroupFamily fam;
        const std::string kind = fget("kind", "mvnormal");
        if (kind == "mvnormal") fam.kind = GroupFamily::Kind::mvnormal;
        else if (kind == "mvt") fam.kind = GroupFamily::Kind::mvt;
        else if (kind == "mvnormal_lognormal")
            fam.kind = GroupFamily::Kind::mvnormal_lognormal_component;
        else throw std::invalid_argument("scenario: unknown family kind " + kind);
        fam.mean = broadcast(parse_double_list(fget("mean", "0")), spec.d, "mean");
        const auto vars =
            broadcast(parse_double_list(fget("variances", "1")), spec.d, "variances");
        fam.cov = build_cov(vars, std::stod(fget("offdiag", "0")));
        fam.df = std::stod(fget("df", "1"));
        fam.lognormal_component =
            static_cast<std::size_t>(std::stoul(fget("lognormal_component", "1"))) - 1;
        fam.lognormal_mu = std::stod(fget("lognormal_mu", "-0.35"));
        fam.lognormal_sigma2 = std::stod(fget("lognormal_sigma2", "0.7"));
        spec.family.push_back(fam);
    }
    return spec;
}

void write_report_csv(const SimulationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "scenario,method,rate,mc_se,mean_length,failures,reps\n";
    for (const auto& m : report.methods) {
        out << report.scenario << ',' << m.method << ',' << m.rate << ',' << m.mc_se << ','
            << m.mean_length << ',' << m.failures << ',' << report.reps << '\n';
    }
}

void write_report_json(const SimulationReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "{\n  \"scenario\": \"" << report.scenario << "\",\n  \"reps\": " << report.reps
        << ",\n  \"wall_seconds\": " << report.wall_seconds << ",\n  \"methods\": [\n";
    for (std::size_t i = 0; i < report.methods.size(); ++i) {
        const auto& m = report.methods[i];
        out << "    {\"method\": \"" << m.method << "\", \"rate\": " << m.rate
            << ", \"mc_se\": " << m.mc_se << ", \"mean_length\": " << m.mean_length
            << ", \"failures\": " << m.failures << "}";
        out << (i + 1 < report.methods.size() ? ",\n" : "\n");
    }
    out << "  ]\n}\n";
}

}  // namespace overlapkit
