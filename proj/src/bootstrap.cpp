#include "overlapkit/bootstrap.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace overlapkit {

std::vector<std::vector<double>> resample_group(const std::vector<std::vector<double>>& group,
                                                RngStream& rng) {
    const std::size_t n = group.size();
    std::vector<std::vector<double>> out;
    out.reserve(n);
    for (std::size_t r = 0; r < n; ++r) out.push_back(group[rng.next_below(n)]);
    return out;
}

namespace {

void compute_replicate(const GroupedDataset& data, const WeightScheme& weights,
                       std::uint64_t seed, std::size_t rep, double* row_out) {
    std::vector<std::vector<std::vector<double>>> resampled;
    resampled.reserve(data.k());
    for (std::size_t i = 0; i < data.k(); ++i) {
        RngStream stream(seed, rep + 1, i + 1);
        resampled.push_back(resample_group(data.group(i), stream));
    }
    GroupedDataset boot(std::move(resampled));
    OverlapMatrix est = reference_overlap(boot, weights);
    std::copy(est.entries.begin(), est.entries.end(), row_out);
}

}  // namespace

ReplicateMatrix bootstrap_replicates(const GroupedDataset& data, const WeightScheme& weights,
                                     std::size_t b, std::uint64_t seed, unsigned workers) {
    if (b < 1) throw std::invalid_argument("bootstrap_replicates: B must be >= 1");
    ReplicateMatrix rep;
    rep.b = b;
    rep.kd = data.k() * data.d();
    rep.seed = seed;
    rep.rows.resize(b * rep.kd);

    if (workers <= 1) {
        for (std::size_t r = 0; r < b; ++r)
            compute_replicate(data, weights, seed, r, &rep.rows[r * rep.kd]);
    } else {
        std::atomic<std::size_t> next{0};
        auto work = [&] {
            for (;;) {
                const std::size_t r = next.fetch_add(1);
                if (r >= b) return;
                compute_replicate(data, weights, seed, r, &rep.rows[r * rep.kd]);
            }
        };
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    return rep;
}

CovarianceEstimate bootstrap_covariance(const ReplicateMatrix& rep, std::size_t total_n) {
    if (rep.b < 2) throw std::invalid_argument("bootstrap_covariance: need B >= 2");
    const std::size_t kd = rep.kd;
    const double n_scale = static_cast<double>(total_n);
    std::vector<double> mean(kd, 0.0);
    for (std::size_t r = 0; r < rep.b; ++r)
        for (std::size_t c = 0; c < kd; ++c) mean[c] += rep.at(r, c);
    for (auto& m : mean) m /= static_cast<double>(rep.b);

    CovarianceEstimate out;
    out.sigma_star = Matrix(kd, kd);
    for (std::size_t r = 0; r < rep.b; ++r) {
        for (std::size_t c1 = 0; c1 < kd; ++c1) {
            const double d1 = rep.at(r, c1) - mean[c1];
            for (std::size_t c2 = c1; c2 < kd; ++c2)
                out.sigma_star(c1, c2) += d1 * (rep.at(r, c2) - mean[c2]);
        }
    }
    const double denom = static_cast<double>(rep.b - 1);
    for (std::size_t c1 = 0; c1 < kd; ++c1)
        for (std::size_t c2 = c1; c2 < kd; ++c2) {
            out.sigma_star(c1, c2) = out.sigma_star(c1, c2) / denom * n_scale;
            out.sigma_star(c2, c1) = out.sigma_star(c1, c2);
        }

    out.component_sd.resize(kd);
    out.degenerate.resize(kd);
    out.correlation = Matrix(kd, kd);
    for (std::size_t c = 0; c < kd; ++c) {
        const double var = std::max(0.0, out.sigma_star(c, c));
        out.component_sd[c] = std::sqrt(var / n_scale);
        out.degenerate[c] = var <= 0.0;
    }
    for (std::size_t c1 = 0; c1 < kd; ++c1) {
        for (std::size_t c2 = 0; c2 < kd; ++c2) {
            if (c1 == c2) { out.correlation(c1, c2) = 1.0; continue; }
            const double s1 = std::sqrt(std::max(0.0, out.sigma_star(c1, c1)));
            const double s2 = std::sqrt(std::max(0.0, out.sigma_star(c2, c2)));
            out.correlation(c1, c2) =
                (s1 > 0.0 && s2 > 0.0)
                    ? std::clamp(out.sigma_star(c1, c2) / (s1 * s2), -1.0, 1.0)
                    : 0.0;
        }
    }
    return out;
}

std::vector<std::vector<double>> bootstrap_quantiles(const ReplicateMatrix& rep,
                                                     const std::vector<double>& center,
                                                     std::size_t total_n,
                                                     const std::vector<double>& probs) {
    if (probs.empty()) throw std::invalid_argument("bootstrap_quantiles: empty probs");
    for (double p : probs)
        if (!(p > 0.0) || !(p < 1.0))
            throw std::domain_error("bootstrap_quantiles: probs must be in (0,1)");
    if (center.size() != rep.kd)
        throw std::invalid_argument("bootstrap_quantiles: center size mismatch");
    const double root_n = std::sqrt(static_cast<double>(total_n));
    std::vector<std::vector<double>> out(rep.kd);
    std::vector<double> scaled(rep.b);
    for (std::size_t c = 0; c < rep.kd; ++c) {
        for (std::size_t r = 0; r < rep.b; ++r)
            scaled[r] = root_n * (rep.at(r, c) - center[c]);
        Sample s(scaled);
        out[c].reserve(probs.size());
        for (double p : probs) out[c].push_back(s.quantile(p));
    }
    return out;
}

}  // namespace overlapkit
