#include "socperc/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "socperc/oracle_tally.hpp"

namespace socperc {

namespace {

void tally_range(const BoxGeometry& box, const FunctionalKind& kind, std::uint64_t first,
                 std::uint64_t last, std::vector<std::vector<std::int64_t>>& count,
                 std::vector<std::int32_t>* f_dense) {
    Configuration config = all_closed(box);
    const EdgeId r = box.edge_count();
    for (std::uint64_t idx = first; idx < last; ++idx) {
        for (EdgeId e = 0; e < r; ++e) config.set(e, (idx >> e) & 1u);
        const std::int64_t f = evaluate_functional(kind, box, analyze(box, config));
        const int o = std::popcount(idx);
        ++count[static_cast<std::size_t>(f)][static_cast<std::size_t>(o)];
        if (f_dense) (*f_dense)[static_cast<std::size_t>(idx)] = static_cast<std::int32_t>(f);
    }
}

// p^o (1-p)^(r-o) with the degenerate-endpoint conventions
double config_weight(double p, std::int64_t o, std::int64_t r) {
    if (p >= 1.0) return o == r ? 1.0 : 0.0;
    if (p <= 0.0) return o == 0 ? 1.0 : 0.0;
    return std::exp(static_cast<double>(o) * std::log(p) +
                    static_cast<double>(r - o) * std::log1p(-p));
}

double sorted_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    long double acc = 0.0L;
    for (double t : terms) acc += t;
    return static_cast<double>(acc);
}

}  // namespace

FunctionalTally build_tally(const BoxGeometry& box, const FunctionalKind& kind,
                            const EnumerationOptions& opts) {
    const EdgeId r = box.edge_count();
    if (r > kEnumerationHardCap)
        throw std::invalid_argument("edge count " + std::to_string(r) +
                                    " is beyond any feasible enumeration");
    if (r > opts.max_edges && !opts.allow_over_cap)
        throw std::invalid_argument("edge count " + std::to_string(r) +
                                    " exceeds the enumeration cap of " +
                                    std::to_string(opts.max_edges));
    if (r > opts.max_edges)
        std::fprintf(stderr, "warning: enumerating %d edges, 2^%d configurations\n",
                     static_cast<int>(r), static_cast<int>(r));

    FunctionalTally tally;
    tally.vertex_count = box.vertex_count();
    tally.edge_count = r;
    const std::uint64_t total = std::uint64_t{1} << r;
    const std::size_t rows = static_cast<std::size_t>(box.vertex_count()) + 1;
    tally.count.assign(rows, std::vector<std::int64_t>(static_cast<std::size_t>(r) + 1, 0));
    const bool dense = r <= opts.dense_weights_max_edges;
    if (dense) tally.f_per_config.assign(static_cast<std::size_t>(total), 0);

    int workers = opts.workers;
    if (workers <= 1 || total < (std::uint64_t{1} << 16)) {
        tally_range(box, kind, 0, total, tally.count, dense ? &tally.f_per_config : nullptr);
        return tally;
    }

    // disjoint index ranges with integer accumulators; the merge is exact, so
    // the result does not depend on the worker count
    std::vector<std::vector<std::vector<std::int64_t>>> partial(
        static_cast<std::size_t>(workers),
        std::vector<std::vector<std::int64_t>>(rows,
                                               std::vector<std::int64_t>(static_cast<std::size_t>(r) + 1, 0)));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
        const std::uint64_t first = total / static_cast<std::uint64_t>(workers) * static_cast<std::uint64_t>(w);
        const std::uint64_t last =
            w + 1 == workers ? total : total / static_cast<std::uint64_t>(workers) * static_cast<std::uint64_t>(w + 1);
        pool.emplace_back([&, w, first, last] {
            tally_range(box, kind, first, last, partial[static_cast<std::size_t>(w)],
                        dense ? &tally.f_per_config : nullptr);
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& part : partial)
        for (std::size_t f = 0; f < rows; ++f)
            for (std::size_t o = 0; o <= static_cast<std::size_t>(r); ++o)
                tally.count[f][o] += part[f][o];
    return tally;
}

ExactMeasure enumerate_measure(const BoxGeometry& box, const FunctionalKind& kind, double a,
                               const EnumerationOptions& opts) {
    const FunctionalTally tally = build_tally(box, kind, opts);
    const EdgeId r = tally.edge_count;
    const std::int64_t nd = tally.vertex_count;

    std::vector<double> phi(static_cast<std::size_t>(nd) + 1);
    for (std::int64_t b = 0; b <= nd; ++b)
        phi[static_cast<std::size_t>(b)] = phi_n(static_cast<double>(b), box.side(), a);

    ExactMeasure out;

    // direct accumulation, smallest weights first
    std::vector<double> terms;
    if (!tally.f_per_config.empty()) {
        out.per_config_weights.resize(tally.f_per_config.size());
        for (std::size_t idx = 0; idx < tally.f_per_config.size(); ++idx) {
            const std::int64_t f = tally.f_per_config[idx];
            const int o = std::popcount(static_cast<std::uint64_t>(idx));
            out.per_config_weights[idx] = config_weight(phi[static_cast<std::size_t>(f)], o, r);
        }
        terms = out.per_config_weights;
    } else {
        for (std::int64_t f = 0; f <= nd; ++f)
            for (std::int64_t o = 0; o <= r; ++o) {
                const std::int64_t n_fo = tally.count[static_cast<std::size_t>(f)][static_cast<std::size_t>(o)];
                if (n_fo > 0)
                    terms.push_back(static_cast<double>(n_fo) *
                                    config_weight(phi[static_cast<std::size_t>(f)], o, r));
            }
    }
    out.zn = sorted_sum(terms);

    // independent grouping: Zn as the sum over b of P_{phi(b)}(F = b)
    out.law_of_F.assign(static_cast<std::size_t>(nd) + 1, 0.0);
    {
        std::vector<double> group_terms;
        for (std::int64_t b = 0; b <= nd; ++b) {
            long double inner = 0.0L;
            for (std::int64_t o = 0; o <= r; ++o) {
                const std::int64_t n_fo = tally.count[static_cast<std::size_t>(b)][static_cast<std::size_t>(o)];
                if (n_fo > 0)
                    inner += static_cast<long double>(n_fo) *
                             config_weight(phi[static_cast<std::size_t>(b)], o, r);
            }
            out.law_of_F[static_cast<std::size_t>(b)] = static_cast<double>(inner);
            group_terms.push_back(static_cast<double>(inner));
        }
        out.zn_grouped = sorted_sum(group_terms);
    }

    long double mean_p = 0.0L;
    for (std::int64_t b = 0; b <= nd; ++b) {
        out.law_of_F[static_cast<std::size_t>(b)] /= out.zn;
        out.law_of_p.emplace_back(phi[static_cast<std::size_t>(b)], out.law_of_F[static_cast<std::size_t>(b)]);
        mean_p += static_cast<long double>(phi[static_cast<std::size_t>(b)]) *
                  static_cast<long double>(out.law_of_F[static_cast<std::size_t>(b)]);
    }
    out.mean_p = static_cast<double>(mean_p);
    return out;
}

std::vector<double> pushforward_from_tally(const FunctionalTally& tally, double p) {
    std::vector<double> dist(static_cast<std::size_t>(tally.vertex_count) + 1, 0.0);
    for (std::int64_t f = 0; f <= tally.vertex_count; ++f) {
        long double acc = 0.0L;
        for (std::int64_t o = 0; o <= tally.edge_count; ++o) {
            const std::int64_t n_fo = tally.count[static_cast<std::size_t>(f)][static_cast<std::size_t>(o)];
            if (n_fo > 0)
                acc += static_cast<long double>(n_fo) * config_weight(p, o, tally.edge_count);
        }
        dist[static_cast<std::size_t>(f)] = static_cast<double>(acc);
    }
    return dist;
}

double mean_from_tally(const FunctionalTally& tally, double p) {
    const std::vector<double> dist = pushforward_from_tally(tally, p);
    long double mean = 0.0L;
    for (std::size_t f = 0; f < dist.size(); ++f)
        mean += static_cast<long double>(f) * static_cast<long double>(dist[f]);
    return static_cast<double>(mean);
}

std::vector<double> exact_pp_pushforward(const BoxGeometry& box, const FunctionalKind& kind,
                                         double p, const EnumerationOptions& opts) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability must lie in [0, 1]");
    return pushforward_from_tally(build_tally(box, kind, opts), p);
}

double exact_pp_mean(const BoxGeometry& box, const FunctionalKind& kind, double p,
                     const EnumerationOptions& opts) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability must lie in [0, 1]");
    return mean_from_tally(build_tally(box, kind, opts), p);
}

MonteCarloEstimate importance_zn(const BoxGeometry& box, const FunctionalKind& kind, double a,
                                 double q, std::int64_t samples, std::uint64_t seed) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("proposal probability must lie in (0, 1)");
    if (samples < 1) throw std::invalid_argument("need at least one sample");

    RandomStream rng(seed);
    long double sum = 0.0L, sum_sq = 0.0L;
    for (std::int64_t i = 0; i < samples; ++i) {
        const Configuration config = sample_bernoulli(box, q, rng);
        const double p = feedback_p(kind, box, config, a);
        const double lw = log_weight(box, config, p) - log_weight(box, config, q);
        const double ratio = std::isfinite(lw) ? std::exp(lw) : 0.0;
        sum += ratio;
        sum_sq += static_cast<long double>(ratio) * ratio;
    }
    MonteCarloEstimate out;
    out.samples = samples;
    out.estimate = static_cast<double>(sum / samples);
    if (samples > 1) {
        const long double var =
            (sum_sq - sum * sum / samples) / (static_cast<long double>(samples) - 1);
        out.std_error = std::sqrt(std::max(0.0, static_cast<double>(var)) / static_cast<double>(samples));
    }
    return out;
}

}  // namespace socperc
