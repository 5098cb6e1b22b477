#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "socperc/experiments.hpp"
#include "socperc/io.hpp"
#include "socperc/oracle_tally.hpp"

using namespace socperc;

TEST_CASE("parameter windows follow the admissibility conditions") {
    ExperimentConfig cfg;
    cfg.dim = 2;
    cfg.n_list = {4};

    cfg.kind = FunctionalKind::cmax();
    cfg.a = 1.0;
    CHECK_NOTHROW(validate_parameter_window(cfg));
    cfg.a = 2.0;  // a = d sits on the closed end
    CHECK_THROWS_WITH_AS(validate_parameter_window(cfg),
                         doctest::Contains("0 < a < d"), std::invalid_argument);

    cfg.kind = FunctionalKind::boundary();
    cfg.a = 1.5;
    CHECK_NOTHROW(validate_parameter_window(cfg));
    cfg.a = 1.0;  // a = d-1
    CHECK_THROWS_WITH_AS(validate_parameter_window(cfg),
                         doctest::Contains("d-1 < a < d"), std::invalid_argument);

    cfg.kind = FunctionalKind::big_clusters(0.1);
    cfg.a = 1.9;
    CHECK_NOTHROW(validate_parameter_window(cfg));
    cfg.a = 5.0 / 3.0;  // a = 5d/6
    CHECK_THROWS_WITH_AS(validate_parameter_window(cfg),
                         doctest::Contains("5d/6 < a < d"), std::invalid_argument);
    cfg.a = 1.9;
    cfg.kind = FunctionalKind::big_clusters(2.0 * 1.9 / 2.0 - 5.0 / 3.0);  // b on the edge
    CHECK_THROWS_WITH_AS(validate_parameter_window(cfg),
                         doctest::Contains("2a/d - 5/3"), std::invalid_argument);

    cfg.kind = FunctionalKind::cmax();
    cfg.a = 1.0;
    cfg.torus = true;
    CHECK_NOTHROW(validate_parameter_window(cfg));
    cfg.kind = FunctionalKind::boundary();
    cfg.a = 1.5;
    CHECK_THROWS_AS(validate_parameter_window(cfg), std::invalid_argument);
}

TEST_CASE("speed windows bound the scaling exponent") {
    ExperimentConfig cfg;
    cfg.dim = 2;
    cfg.n_list = {4};
    cfg.kind = FunctionalKind::big_clusters(0.15);
    cfg.a = 1.9;
    cfg.beta_prime = 0.15;
    cfg.gamma_prime = 2.5;
    // limit = min(0.15/5, 0.85/0.15, 0.1/0.15) = 0.03
    cfg.c = 0.0;
    CHECK_NOTHROW(validate_speed_window(cfg));
    cfg.c = 0.029;
    CHECK_NOTHROW(validate_speed_window(cfg));
    cfg.c = 0.03;
    CHECK_THROWS_WITH_AS(validate_speed_window(cfg), doctest::Contains("beta'"),
                         std::invalid_argument);
    cfg.c = 0.0;
    cfg.kind = FunctionalKind::cmax();
    CHECK_THROWS_AS(validate_speed_window(cfg), std::invalid_argument);
}

TEST_CASE("concentration study matches the enumerated mean at oracle scale") {
    ExperimentConfig cfg;
    cfg.dim = 2;
    cfg.n_list = {2, 3};
    cfg.kind = FunctionalKind::cmax();
    cfg.a = 1.5;
    cfg.chains = 4;
    cfg.sweeps = 4000;
    cfg.burn_in = 500;
    cfg.thin = 1;
    cfg.seed = 93;
    cfg.workers = 2;
    const auto rows = concentration_study(cfg);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        const BoxGeometry box = build_box(2, row.n, false);
        const ExactMeasure exact = enumerate_measure(box, cfg.kind, cfg.a);
        CHECK(std::abs(row.mean_p - exact.mean_p) < 0.01);
        CHECK(row.pooled_samples == 4 * 3500);
        CHECK(row.q05 <= row.q25);
        CHECK(row.q25 <= row.q50);
        CHECK(row.q50 <= row.q75);
        CHECK(row.q75 <= row.q95);
        REQUIRE(row.tail_probs.size() == cfg.epsilon_list.size());
        for (std::size_t i = 1; i < row.tail_probs.size(); ++i)
            CHECK(row.tail_probs[i] >= row.tail_probs[i - 1]);  // smaller eps, fatter tail
        for (const ChainSummary& c : row.per_chain) {
            CHECK(c.mean_p > 0.0);
            CHECK(c.mean_p <= 1.0);
        }
    }
}

TEST_CASE("study results are reproducible bit for bit") {
    ExperimentConfig cfg;
    cfg.dim = 2;
    cfg.n_list = {3};
    cfg.kind = FunctionalKind::cmax();
    cfg.a = 1.0;
    cfg.chains = 3;
    cfg.sweeps = 300;
    cfg.burn_in = 100;
    cfg.seed = 5;
    cfg.workers = 2;
    const auto a = concentration_study(cfg);
    const auto b = concentration_study(cfg);
    REQUIRE(a.size() == b.size());
    CHECK(a[0].mean_p == b[0].mean_p);
    CHECK(a[0].q50 == b[0].q50);
    for (std::size_t i = 0; i < a[0].tail_probs.size(); ++i)
        CHECK(a[0].tail_probs[i] == b[0].tail_probs[i]);
}

TEST_CASE("speed study at c = 0 reduces to centred concentration deviations") {
    ExperimentConfig cfg;
    cfg.dim = 2;
    cfg.n_list = {3};
    cfg.kind = FunctionalKind::big_clusters(0.2);
    cfg.a = 1.9;
    cfg.chains = 2;
    cfg.sweeps = 500;
    cfg.burn_in = 100;
    cfg.seed = 12;
    cfg.c = 0.0;
    const auto speed = speed_study(cfg);
    const auto conc = concentration_study(cfg);
    REQUIRE(speed.size() == 1);
    CHECK(speed[0].q50 == doctest::Approx(conc[0].q50 - cfg.p_ref).epsilon(1e-12));
}

TEST_CASE("the exact fixed point solves phi(E_p[F]) = p") {
    const BoxGeometry box = build_box(2, 3, false);
    const double a = 1.9, b = 0.2;
    const QnResult res = qn_fixed_point(box, a, b, 0, 1e-9, 1, true);
    CHECK(res.exact);
    CHECK(res.qn > 0.0);
    CHECK(res.qn < 1.0);
    const FunctionalTally tally = build_tally(box, FunctionalKind::big_clusters(b));
    const double f_at_qn = phi_n(mean_from_tally(tally, res.qn), 3, a);
    CHECK(std::abs(f_at_qn - res.qn) < 1e-7);

    // Monte Carlo mode lands close and is reproducible
    const QnResult mc = qn_fixed_point(box, a, b, 400, 1e-3, 99, false);
    CHECK(std::abs(mc.qn - res.qn) < 0.05);
    const QnResult mc2 = qn_fixed_point(box, a, b, 400, 1e-3, 99, false);
    CHECK(mc.qn == mc2.qn);
}

TEST_CASE("tail directions follow the phase") {
    const std::vector<int> ns = {4, 8};
    const TailResult sub = tail_decay_check(2, FunctionalKind::cmax(), 0.3, 1.0, 1.0, ns, 500, 3);
    CHECK(sub.upper_tail);
    const TailResult sup = tail_decay_check(2, FunctionalKind::cmax(), 0.7, 1.0, 1.0, ns, 500, 3);
    CHECK(!sup.upper_tail);
    for (const TailRow& row : sub.rows) {
        CHECK(row.estimate >= 0.0);
        CHECK(row.estimate <= 1.0);
        CHECK(row.samples == 500);
    }
    // deterministic under a fixed seed and worker split
    const TailResult again = tail_decay_check(2, FunctionalKind::cmax(), 0.3, 1.0, 1.0, ns, 500, 3);
    for (std::size_t i = 0; i < again.rows.size(); ++i)
        CHECK(again.rows[i].hits == sub.rows[i].hits);
}

TEST_CASE("csv and manifest writing") {
    const std::string path = "/tmp/socperc_test_out.csv";
    write_csv(path, {"n", "value"}, {{"2", "0.5"}, {"3", "0.25"}});
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "n,value");
    std::getline(in, line);
    CHECK(line == "2,0.5");

    nlohmann::json echo;
    echo["seed"] = 7;
    write_manifest(path, echo);
    std::ifstream min(path + ".manifest.json");
    REQUIRE(min.good());
    nlohmann::json manifest;
    min >> manifest;
    CHECK(manifest["config"]["seed"] == 7);
    CHECK(manifest.contains("version"));
    std::remove(path.c_str());
    std::remove((path + ".manifest.json").c_str());
}

TEST_CASE("worker resolution") {
    CHECK(resolve_workers(3) == 3);
    CHECK(resolve_workers(0) >= 1);
}
