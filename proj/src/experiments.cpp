#include "socperc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "socperc/oracle_tally.hpp"
#include "socperc/stats.hpp"

namespace socperc {

int resolve_workers(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("SOCPERC_WORKERS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

void run_tasks(std::int64_t count, int workers, const std::function<void(std::int64_t)>& task) {
    if (workers <= 1 || count <= 1) {
        for (std::int64_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    const int use = static_cast<int>(std::min<std::int64_t>(workers, count));
    for (int w = 0; w < use; ++w)
        pool.emplace_back([&] {
            while (true) {
                const std::int64_t i = next.fetch_add(1);
                if (i >= count) return;
                task(i);
            }
        });
    for (auto& t : pool) t.join();
}

std::string window_violation(const std::string& text) {
    return "parameter window violated: " + text;
}

}  // namespace

void validate_parameter_window(const ExperimentConfig& cfg) {
    const double d = cfg.dim;
    const double a = cfg.a;
    if (cfg.dim < 2) throw std::invalid_argument("dimension must be >= 2");
    if (cfg.torus && cfg.kind.which != Functional::kCmax)
        throw std::invalid_argument("periodic boundary conditions support only the cmax functional");
    switch (cfg.kind.which) {
        case Functional::kCmax:
            if (!(0.0 < a && a < d))
                throw std::invalid_argument(window_violation("cmax requires 0 < a < d"));
            break;
        case Functional::kBoundary:
            if (!(d - 1.0 < a && a < d))
                throw std::invalid_argument(window_violation("boundary requires d-1 < a < d"));
            break;
        case Functional::kBigClusters:
        case Functional::kBigDiameters: {
            if (!(5.0 * d / 6.0 < a && a < d))
                throw std::invalid_argument(window_violation("bnb requires 5d/6 < a < d"));
            const double b_max = 2.0 * a / d - 5.0 / 3.0;
            if (!(0.0 < cfg.kind.exponent && cfg.kind.exponent < b_max)) {
                std::ostringstream msg;
                msg << "bnb requires 0 < b < 2a/d - 5/3 = " << b_max;
                throw std::invalid_argument(window_violation(msg.str()));
            }
            break;
        }
    }
}

void validate_speed_window(const ExperimentConfig& cfg) {
    if (cfg.kind.which != Functional::kBigClusters)
        throw std::invalid_argument("the speed study is defined for the bnb functional");
    validate_parameter_window(cfg);
    if (!(cfg.beta_prime > 0.0) || !(cfg.gamma_prime > 0.0))
        throw std::invalid_argument("exponent hypotheses beta', gamma' must be positive");
    const double b = cfg.kind.exponent;
    const double limit = std::min({b / (2.0 * cfg.gamma_prime), (1.0 - b) / cfg.beta_prime,
                                   (static_cast<double>(cfg.dim) - cfg.a) / cfg.beta_prime});
    if (!(cfg.c >= 0.0 && cfg.c < limit)) {
        std::ostringstream msg;
        msg << "speed exponent requires 0 <= c < min(b/(2 gamma'), (1-b)/beta', (d-a)/beta') = "
            << limit;
        throw std::invalid_argument(window_violation(msg.str()));
    }
}

namespace {

struct PooledRun {
    std::vector<double> p_values;
    std::vector<double> f_values;
    std::vector<ChainSummary> per_chain;
    double chain_spread = 0.0;
};

PooledRun run_chains_for_n(const ExperimentConfig& cfg, int n) {
    const BoxGeometry box = build_box(cfg.dim, n, cfg.torus);
    const int workers = resolve_workers(cfg.workers);

    std::vector<std::vector<ChainSample>> per_chain(static_cast<std::size_t>(cfg.chains));
    run_tasks(cfg.chains, workers, [&](std::int64_t chain) {
        ChainOptions opts;
        opts.cold_start = cfg.cold_start;
        MarkovChain mc(box, cfg.kind, cfg.a,
                       subseed(cfg.seed, static_cast<std::uint64_t>(n),
                               static_cast<std::uint64_t>(chain)),
                       opts);
        per_chain[static_cast<std::size_t>(chain)] = mc.run(cfg.sweeps, cfg.burn_in, cfg.thin);
    });

    PooledRun out;
    double lo_mean = 0.0, hi_mean = 0.0;
    for (std::int64_t chain = 0; chain < cfg.chains; ++chain) {
        const auto& samples = per_chain[static_cast<std::size_t>(chain)];
        long double acc = 0.0L;
        for (const ChainSample& s : samples) {
            out.p_values.push_back(s.p);
            out.f_values.push_back(static_cast<double>(s.f));
            acc += s.p;
        }
        ChainSummary summary;
        summary.chain_id = chain;
        summary.samples = static_cast<std::int64_t>(samples.size());
        summary.mean_p = samples.empty() ? 0.0 : static_cast<double>(acc / samples.size());
        if (chain == 0 || summary.mean_p < lo_mean) lo_mean = summary.mean_p;
        if (chain == 0 || summary.mean_p > hi_mean) hi_mean = summary.mean_p;
        out.per_chain.push_back(summary);
    }
    out.chain_spread = hi_mean - lo_mean;
    return out;
}

}  // namespace

std::vector<ConcentrationRow> concentration_study(const ExperimentConfig& cfg) {
    validate_parameter_window(cfg);
    if (cfg.n_list.empty()) throw std::invalid_argument("no box sides requested");

    std::vector<ConcentrationRow> rows;
    for (int n : cfg.n_list) {
        PooledRun pooled = run_chains_for_n(cfg, n);
        ConcentrationRow row;
        row.n = n;
        row.pooled_samples = static_cast<std::int64_t>(pooled.p_values.size());
        row.mean_p = mean(pooled.p_values);
        row.mean_f = mean(pooled.f_values);
        row.q05 = quantile(pooled.p_values, 0.05);
        row.q25 = quantile(pooled.p_values, 0.25);
        row.q50 = quantile(pooled.p_values, 0.50);
        row.q75 = quantile(pooled.p_values, 0.75);
        row.q95 = quantile(pooled.p_values, 0.95);
        for (double eps : cfg.epsilon_list) {
            std::int64_t hits = 0;
            for (double p : pooled.p_values)
                if (std::abs(p - cfg.p_ref) >= eps) ++hits;
            row.tail_probs.push_back(static_cast<double>(hits) /
                                     static_cast<double>(pooled.p_values.size()));
        }
        row.per_chain = std::move(pooled.per_chain);
        row.chain_spread = pooled.chain_spread;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SpeedRow> speed_study(const ExperimentConfig& cfg) {
    validate_speed_window(cfg);
    if (cfg.n_list.empty()) throw std::invalid_argument("no box sides requested");

    std::vector<SpeedRow> rows;
    for (int n : cfg.n_list) {
        PooledRun pooled = run_chains_for_n(cfg, n);
        const double scale = std::pow(static_cast<double>(n), cfg.c);
        std::vector<double> scaled;
        scaled.reserve(pooled.p_values.size());
        std::vector<double> abs_scaled;
        abs_scaled.reserve(pooled.p_values.size());
        for (double p : pooled.p_values) {
            const double dev = scale * (p - cfg.p_ref);
            scaled.push_back(dev);
            abs_scaled.push_back(std::abs(dev));
        }
        SpeedRow row;
        row.n = n;
        row.pooled_samples = static_cast<std::int64_t>(scaled.size());
        row.q05 = quantile(scaled, 0.05);
        row.q25 = quantile(scaled, 0.25);
        row.q50 = quantile(scaled, 0.50);
        row.q75 = quantile(scaled, 0.75);
        row.q95 = quantile(scaled, 0.95);
        row.median_abs = quantile(abs_scaled, 0.50);
        rows.push_back(row);
    }
    return rows;
}

QnResult qn_fixed_point(const BoxGeometry& box, double a, double b, std::int64_t mc_samples,
                        double tol, std::uint64_t seed, bool use_exact) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    const FunctionalKind kind = FunctionalKind::big_clusters(b);

    QnResult out;
    out.exact = use_exact;
    std::int64_t samples = std::max<std::int64_t>(1, mc_samples);
    std::uint64_t eval_counter = 0;

    FunctionalTally tally;
    if (use_exact) tally = build_tally(box, kind);

    auto f_hat = [&](double p) {
        ++out.evaluations;
        if (use_exact) return phi_n(mean_from_tally(tally, p), box.side(), a);
        RandomStream rng(subseed(seed, eval_counter++, 0x9f1dULL));
        long double acc = 0.0L;
        for (std::int64_t i = 0; i < samples; ++i) {
            const Configuration config = sample_bernoulli(box, p, rng);
            acc += static_cast<long double>(evaluate_functional(kind, box, analyze(box, config)));
        }
        return phi_n(static_cast<double>(acc / samples), box.side(), a);
    };

    const double lo0 = 1e-9, hi0 = 1.0 - 1e-9;
    int retries = 0;
    while (true) {
        double lo = lo0, hi = hi0;
        double flo = f_hat(lo), fhi = f_hat(hi);
        // endpoint signs: phi(E_0[F]) = 1 > 0 and phi(E_1[F]) < 1
        if (!(flo - lo > 0.0 && fhi - hi < 0.0)) {
            if (use_exact) throw std::runtime_error("fixed-point bracket failure in exact mode");
            if (++retries > 8) throw std::runtime_error("fixed-point bracket failure after retries");
            samples *= 2;
            continue;
        }
        bool restart = false;
        while (hi - lo > tol) {
            const double mid = 0.5 * (lo + hi);
            const double fmid = f_hat(mid);
            if (fmid > flo + 1e-12 || fhi > fmid + 1e-12) {
                // the estimated map must stay decreasing; noise means more samples
                if (use_exact) throw std::runtime_error("exact fixed-point map not monotone");
                if (++retries > 8) throw std::runtime_error("fixed-point bracket failure after retries");
                samples *= 2;
                restart = true;
                break;
            }
            if (fmid - mid > 0.0) {
                lo = mid;
                flo = fmid;
            } else {
                hi = mid;
                fhi = fmid;
            }
        }
        if (restart) continue;
        out.qn = 0.5 * (lo + hi);
        out.samples_used = use_exact ? 0 : samples;
        return out;
    }
}

TailResult tail_decay_check(int dim, const FunctionalKind& kind, double p, double a, double A,
                            const std::vector<int>& n_list, std::int64_t samples,
                            std::uint64_t seed, double p_ref, int workers) {
    if (n_list.empty()) throw std::invalid_argument("no box sides requested");
    if (samples < 1) throw std::invalid_argument("need at least one sample");

    TailResult out;
    out.upper_tail = p < p_ref;
    const int use_workers = resolve_workers(workers);

    for (int n : n_list) {
        const BoxGeometry box = build_box(dim, n, false);
        const double threshold = A * std::pow(static_cast<double>(n), a);
        std::vector<std::int64_t> hits_per_task(static_cast<std::size_t>(use_workers), 0);
        run_tasks(use_workers, use_workers, [&](std::int64_t w) {
            const std::int64_t first = samples * w / use_workers;
            const std::int64_t last = samples * (w + 1) / use_workers;
            std::int64_t hits = 0;
            for (std::int64_t i = first; i < last; ++i) {
                RandomStream rng(subseed(seed, static_cast<std::uint64_t>(i),
                                         static_cast<std::uint64_t>(n)));
                const Configuration config = sample_bernoulli(box, p, rng);
                const std::int64_t f = evaluate_functional(kind, box, analyze(box, config));
                const bool hit = out.upper_tail ? static_cast<double>(f) > threshold
                                                : static_cast<double>(f) < threshold;
                if (hit) ++hits;
            }
            hits_per_task[static_cast<std::size_t>(w)] = hits;
        });
        TailRow row;
        row.n = n;
        row.samples = samples;
        for (std::int64_t h : hits_per_task) row.hits += h;
        row.estimate = static_cast<double>(row.hits) / static_cast<double>(samples);
        out.rows.push_back(row);
    }

    out.strictly_decreasing = true;
    for (std::size_t i = 1; i < out.rows.size(); ++i)
        if (!(out.rows[i].estimate < out.rows[i - 1].estimate)) out.strictly_decreasing = false;
    return out;
}

}  // namespace socperc
