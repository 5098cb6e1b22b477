#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace socperc {

double mean(const std::vector<double>& xs);

// Linear-interpolation quantile of an unsorted sample; q in [0, 1].
double quantile(std::vector<double> xs, double q);

// log of the binomial pmf C(n,k) p^k (1-p)^(n-k)
double log_binomial_pmf(std::int64_t n, std::int64_t k, double p);

struct ChiSquareResult {
    double statistic = 0.0;
    int degrees_of_freedom = 0;
    double p_value = 1.0;
    int bins = 0;
};

// Goodness of fit of observed integer counts against Binomial(n, p).
// Low-expectation bins are pooled into the tails until every bin expects at
// least `min_expected`.
ChiSquareResult chi_square_binomial_gof(const std::map<std::int64_t, std::int64_t>& observed,
                                        std::int64_t trials, double p, std::int64_t samples,
                                        double min_expected = 5.0);

// Half the L1 distance between two probability mass functions on 0..K.
double total_variation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace socperc
