#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "socperc/oracle.hpp"
#include "socperc/oracle_tally.hpp"

using namespace socperc;

// Reference values from an independent brute-force enumeration (all 2^r
// configurations, exact arithmetic in a separate implementation).
namespace {
constexpr double kZn2Cmax_a1 = 0.63289878300124;
constexpr double kZn3Cmax_a1 = 0.496028754861398;
constexpr double kZn2Cmax_a15 = 0.641690441120532;
constexpr double kZn3Cmax_a15 = 0.506233630147269;
constexpr double kZn3Boundary_a1 = 0.934478609076731;
constexpr double kZn2Bnb05_a1 = 0.528163755727596;
constexpr double kMeanP3Cmax_a15 = 0.419392967322639;
}  // namespace

TEST_CASE("partition function on the 2x2 box matches the frozen reference") {
    const BoxGeometry box = build_box(2, 2, false);
    const ExactMeasure m = enumerate_measure(box, FunctionalKind::cmax(), 1.0);
    CHECK(m.zn == doctest::Approx(kZn2Cmax_a1).epsilon(1e-12));
    CHECK(m.zn_grouped == doctest::Approx(m.zn).epsilon(1e-12));
    CHECK(m.per_config_weights.size() == 16);

    double law_total = 0.0;
    for (double w : m.law_of_F) law_total += w;
    CHECK(law_total == doctest::Approx(1.0).epsilon(1e-12));

    const ExactMeasure m15 = enumerate_measure(box, FunctionalKind::cmax(), 1.5);
    CHECK(m15.zn == doctest::Approx(kZn2Cmax_a15).epsilon(1e-12));

    const ExactMeasure bnb = enumerate_measure(box, FunctionalKind::big_clusters(0.5), 1.0);
    CHECK(bnb.zn == doctest::Approx(kZn2Bnb05_a1).epsilon(1e-12));
}

TEST_CASE("partition function on the 3x3 box, both functionals") {
    const BoxGeometry box = build_box(2, 3, false);
    const ExactMeasure cmax1 = enumerate_measure(box, FunctionalKind::cmax(), 1.0);
    CHECK(cmax1.zn == doctest::Approx(kZn3Cmax_a1).epsilon(1e-12));
    const ExactMeasure cmax15 = enumerate_measure(box, FunctionalKind::cmax(), 1.5);
    CHECK(cmax15.zn == doctest::Approx(kZn3Cmax_a15).epsilon(1e-12));
    CHECK(cmax15.mean_p == doctest::Approx(kMeanP3Cmax_a15).epsilon(1e-12));
    const ExactMeasure mn = enumerate_measure(box, FunctionalKind::boundary(), 1.0);
    CHECK(mn.zn == doctest::Approx(kZn3Boundary_a1).epsilon(1e-12));

    // |M_n| >= 8 always, so its law lives on {8, 9}
    for (std::int64_t f = 0; f < 8; ++f) CHECK(mn.law_of_F[static_cast<std::size_t>(f)] == 0.0);
    CHECK(mn.law_of_F[8] + mn.law_of_F[9] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("law of p is the pushforward of the law of F through the feedback map") {
    const BoxGeometry box = build_box(2, 3, false);
    const double a = 1.5;
    const ExactMeasure m = enumerate_measure(box, FunctionalKind::cmax(), a);
    REQUIRE(m.law_of_p.size() == m.law_of_F.size());
    for (std::size_t b = 0; b < m.law_of_p.size(); ++b) {
        CHECK(m.law_of_p[b].first ==
              doctest::Approx(phi_n(static_cast<double>(b), 3, a)).epsilon(1e-15));
        CHECK(m.law_of_p[b].second == m.law_of_F[b]);
    }
}

TEST_CASE("zero-mass configurations under the big-cluster functional") {
    // any config with F = 0 has feedback probability 1 and hence zero weight
    // unless it is all-open; all-open has F = 4 > 0, so F = 0 carries no mass
    const BoxGeometry box = build_box(2, 2, false);
    const ExactMeasure m = enumerate_measure(box, FunctionalKind::big_clusters(0.5), 1.0);
    CHECK(m.law_of_F[0] == 0.0);
}

TEST_CASE("pushforward under the product measure hits the endpoints") {
    const BoxGeometry box = build_box(2, 2, false);
    const FunctionalKind kind = FunctionalKind::cmax();
    const auto at_one = exact_pp_pushforward(box, kind, 1.0);
    CHECK(at_one[4] == doctest::Approx(1.0));
    const auto at_zero = exact_pp_pushforward(box, kind, 0.0);
    CHECK(at_zero[1] == doctest::Approx(1.0));

    const auto mid = exact_pp_pushforward(box, kind, 0.5);
    // all sixteen configurations weigh 1/16: 1 empty, 4 singles, ...
    CHECK(mid[1] == doctest::Approx(1.0 / 16.0));
    CHECK(mid[2] == doctest::Approx(6.0 / 16.0));   // 4 one-edge + 2 opposite pairs
    CHECK(mid[3] == doctest::Approx(4.0 / 16.0));   // adjacent pairs
    CHECK(mid[4] == doctest::Approx(5.0 / 16.0));   // >= 3 edges
    double total = 0.0;
    for (double r : mid) total += r;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("enumeration cap is enforced but can be overridden") {
    const BoxGeometry box = build_box(2, 4, false);  // 24 edges
    EnumerationOptions opts;
    opts.max_edges = 12;
    CHECK_THROWS_AS(enumerate_measure(box, FunctionalKind::cmax(), 1.0, opts),
                    std::invalid_argument);
    const BoxGeometry big = build_box(2, 6, false);  // 60 edges: over any cap
    EnumerationOptions loose;
    loose.allow_over_cap = true;
    CHECK_THROWS(enumerate_measure(big, FunctionalKind::cmax(), 1.0, loose));
}

TEST_CASE("parallel tallies match the serial ones") {
    const BoxGeometry box = build_box(2, 3, false);
    EnumerationOptions serial;
    EnumerationOptions parallel;
    parallel.workers = 3;
    const FunctionalTally a = build_tally(box, FunctionalKind::cmax(), serial);
    const FunctionalTally b = build_tally(box, FunctionalKind::cmax(), parallel);
    CHECK(a.count == b.count);
}

TEST_CASE("importance sampling agrees with exact enumeration") {
    const BoxGeometry box = build_box(2, 2, false);
    const FunctionalKind kind = FunctionalKind::cmax();
    const double a = 1.0;
    const ExactMeasure exact = enumerate_measure(box, kind, a);

    const MonteCarloEstimate est = importance_zn(box, kind, a, 0.5, 40000, 1234);
    CHECK(std::abs(est.estimate - exact.zn) <= 3.0 * est.std_error);

    // determinism given the seed
    const MonteCarloEstimate again = importance_zn(box, kind, a, 0.5, 1000, 777);
    const MonteCarloEstimate again2 = importance_zn(box, kind, a, 0.5, 1000, 777);
    CHECK(again.estimate == again2.estimate);

    CHECK_THROWS_AS(importance_zn(box, kind, a, 0.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(importance_zn(box, kind, a, 1.0, 10, 1), std::invalid_argument);
}

TEST_CASE("importance sampling also covers the big-cluster model") {
    const BoxGeometry box = build_box(2, 3, false);
    const FunctionalKind kind = FunctionalKind::big_clusters(0.5);
    const double a = 1.0;
    const ExactMeasure exact = enumerate_measure(box, kind, a);
    const MonteCarloEstimate est = importance_zn(box, kind, a, 0.4, 60000, 555);
    CHECK(std::abs(est.estimate - exact.zn) <= 3.0 * est.std_error);
}
