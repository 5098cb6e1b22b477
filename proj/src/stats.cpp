#include "socperc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace socperc {

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean of an empty sample");
    long double acc = 0.0L;
    for (double x : xs) acc += x;
    return static_cast<double>(acc / static_cast<long double>(xs.size()));
}

double quantile(std::vector<double> xs, double q) {
    if (xs.empty()) throw std::invalid_argument("quantile of an empty sample");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile level must lie in [0, 1]");
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= xs.size()) return xs.back();
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] * (1.0 - frac) + xs[lo + 1] * frac;
}

double log_binomial_pmf(std::int64_t n, std::int64_t k, double p) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (p <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
    const double lc = std::lgamma(static_cast<double>(n) + 1.0) -
                      std::lgamma(static_cast<double>(k) + 1.0) -
                      std::lgamma(static_cast<double>(n - k) + 1.0);
    return lc + static_cast<double>(k) * std::log(p) +
           static_cast<double>(n - k) * std::log1p(-p);
}

ChiSquareResult chi_square_binomial_gof(const std::map<std::int64_t, std::int64_t>& observed,
                                        std::int64_t trials, double p, std::int64_t samples,
                                        double min_expected) {
    std::vector<double> expected(static_cast<std::size_t>(trials) + 1, 0.0);
    for (std::int64_t k = 0; k <= trials; ++k)
        expected[static_cast<std::size_t>(k)] =
            static_cast<double>(samples) * std::exp(log_binomial_pmf(trials, k, p));

    std::vector<double> obs_counts(static_cast<std::size_t>(trials) + 1, 0.0);
    for (const auto& [k, c] : observed) {
        if (k < 0 || k > trials) throw std::invalid_argument("observed count out of support");
        obs_counts[static_cast<std::size_t>(k)] += static_cast<double>(c);
    }

    // pool from both tails towards the centre until every bin is heavy enough
    std::vector<std::pair<double, double>> bins;  // (observed, expected)
    double acc_obs = 0.0, acc_exp = 0.0;
    for (std::int64_t k = 0; k <= trials; ++k) {
        acc_obs += obs_counts[static_cast<std::size_t>(k)];
        acc_exp += expected[static_cast<std::size_t>(k)];
        if (acc_exp >= min_expected) {
            bins.emplace_back(acc_obs, acc_exp);
            acc_obs = acc_exp = 0.0;
        }
    }
    if (acc_exp > 0.0 || acc_obs > 0.0) {
        if (!bins.empty()) {
            bins.back().first += acc_obs;
            bins.back().second += acc_exp;
        } else {
            bins.emplace_back(acc_obs, acc_exp);
        }
    }

    ChiSquareResult out;
    out.bins = static_cast<int>(bins.size());
    out.degrees_of_freedom = std::max(0, out.bins - 1);
    for (const auto& [o, e] : bins)
        if (e > 0.0) out.statistic += (o - e) * (o - e) / e;
    if (out.degrees_of_freedom == 0) {
        out.p_value = 1.0;  // degenerate law, e.g. p == 1
        return out;
    }
    boost::math::chi_squared dist(out.degrees_of_freedom);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    return out;
}

double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = std::max(a.size(), b.size());
    double tv = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i < a.size() ? a[i] : 0.0;
        const double y = i < b.size() ? b[i] : 0.0;
        tv += std::abs(x - y);
    }
    return tv / 2.0;
}

}  // namespace socperc
