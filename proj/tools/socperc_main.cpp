// socperc: self-organized critical percolation simulator.
//
// Subcommands: sample, couple, enumerate, carve-check, study
// (concentration | speed | qn | tails). Every CSV output gets a JSON run
// manifest written beside it.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "socperc/coupling.hpp"
#include "socperc/experiments.hpp"
#include "socperc/io.hpp"
#include "socperc/oracle.hpp"
#include "socperc/sampler.hpp"
#include "socperc/separator.hpp"
#include "socperc/version.hpp"

using namespace socperc;
using nlohmann::json;

namespace {

struct CommonModel {
    int dim = 2;
    int side = 8;
    bool torus = false;
    std::string functional = "cmax";
    double a = 1.5;
    double b = 0.5;

    FunctionalKind kind() const { return parse_functional(functional, b); }
    BoxGeometry box() const { return build_box(dim, side, torus); }

    void add_flags(CLI::App* app) {
        app->add_option("--dim", dim, "lattice dimension (>= 2)")->capture_default_str();
        app->add_option("--side", side, "box side length n")->capture_default_str();
        app->add_flag("--torus", torus, "periodic boundary conditions (cmax only)");
        app->add_option("--functional", functional, "cmax, boundary, bnb or bnb-diam")
            ->capture_default_str();
        app->add_option("--a", a, "feedback exponent a")->capture_default_str();
        app->add_option("--b", b, "cluster-size exponent b (bnb kinds)")->capture_default_str();
    }

    json echo() const {
        json j;
        j["dim"] = dim;
        j["side"] = side;
        j["torus"] = torus;
        j["functional"] = functional;
        j["a"] = a;
        j["b"] = b;
        return j;
    }
};

void warn_degenerate_threshold(const CommonModel& model) {
    if ((model.functional == "bnb" || model.functional == "bnb-diam") &&
        size_threshold(model.side, model.b) <= 1)
        std::cerr << "warning: n^b <= 1, every vertex counts and the functional is degenerate\n";
}

int run_sample(const CommonModel& model, std::int64_t sweeps, std::int64_t burn_in,
               std::int64_t thin, std::int64_t chains, std::uint64_t seed, bool cold_start,
               int workers, const std::string& out) {
    warn_degenerate_threshold(model);
    const BoxGeometry box = model.box();
    const FunctionalKind kind = model.kind();

    std::vector<std::vector<ChainSample>> results(static_cast<std::size_t>(chains));
    std::vector<std::string> errors(static_cast<std::size_t>(chains));
    {
        std::vector<std::thread> pool;
        std::atomic<std::int64_t> next{0};
        const int use = std::max(1, std::min<int>(resolve_workers(workers), static_cast<int>(chains)));
        for (int w = 0; w < use; ++w)
            pool.emplace_back([&] {
                while (true) {
                    const std::int64_t c = next.fetch_add(1);
                    if (c >= chains) return;
                    try {
                        ChainOptions opts;
                        opts.cold_start = cold_start;
                        MarkovChain mc(box, kind, model.a,
                                       subseed(seed, static_cast<std::uint64_t>(c), 0xc4a1ULL), opts);
                        results[static_cast<std::size_t>(c)] = mc.run(sweeps, burn_in, thin);
                    } catch (const std::exception& ex) {
                        errors[static_cast<std::size_t>(c)] = ex.what();
                    }
                }
            });
        for (auto& t : pool) t.join();
    }
    for (const std::string& err : errors)
        if (!err.empty()) throw std::runtime_error(err);

    std::vector<std::vector<std::string>> rows;
    for (std::int64_t c = 0; c < chains; ++c) {
        const auto& samples = results[static_cast<std::size_t>(c)];
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const std::int64_t sweep = burn_in + static_cast<std::int64_t>(i + 1) * thin;
            rows.push_back({std::to_string(c), std::to_string(sweep),
                            std::to_string(samples[i].f), format_double(samples[i].p)});
        }
    }
    write_csv(out, {"chain_id", "sweep", "F", "p_n"}, rows);

    json echo = model.echo();
    echo["sweeps"] = sweeps;
    echo["burn_in"] = burn_in;
    echo["thin"] = thin;
    echo["chains"] = chains;
    echo["seed"] = seed;
    echo["cold_start"] = cold_start;
    write_manifest(out, echo);
    std::cout << "wrote " << rows.size() << " samples to " << out << "\n";
    return 0;
}

int run_couple(const CommonModel& model, const std::string& emit, std::int64_t replicas,
               std::uint64_t seed, int workers, const std::string& out) {
    const BoxGeometry box = model.box();
    const FunctionalKind kind = model.kind();

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header;
    if (emit == "zn") {
        const ZnEstimate est =
            estimate_zn(box, model.a, kind, replicas, seed, resolve_workers(workers));
        header = {"replicas", "fixed_points", "zn_hat", "std_error"};
        rows.push_back({std::to_string(est.replicas), std::to_string(est.fixed_points),
                        format_double(est.estimate), format_double(est.std_error)});
        std::cout << "Z_n estimate " << est.estimate << " +- " << est.std_error << "\n";
    } else if (emit == "trajectory") {
        header = {"replica", "b", "F", "fixed_point"};
        for (std::int64_t i = 0; i < replicas; ++i) {
            const Trajectory t =
                coupling_trajectory(box, model.a, kind, subseed(seed, static_cast<std::uint64_t>(i), 0x2e91ULL));
            for (const TrajectoryPoint& pt : t.points)
                rows.push_back({std::to_string(i), std::to_string(pt.b), std::to_string(pt.value),
                                t.fixed_point ? "1" : "0"});
        }
    } else if (emit == "stopping") {
        header = {"replica", "B", "S", "value_at_stop", "B2", "S2", "value_at_stop2"};
        for (std::int64_t i = 0; i < replicas; ++i) {
            const StoppingRecord rec =
                detect_stopping(box, model.a, kind, subseed(seed, static_cast<std::uint64_t>(i), 0x570bULL));
            rows.push_back({std::to_string(i), std::to_string(rec.b), std::to_string(rec.s),
                            std::to_string(rec.value_at_stop),
                            rec.b2 ? std::to_string(*rec.b2) : "",
                            rec.s2 ? std::to_string(*rec.s2) : "",
                            rec.value_at_stop2 ? std::to_string(*rec.value_at_stop2) : ""});
        }
    } else {
        throw CLI::ValidationError("--emit must be zn, trajectory or stopping");
    }
    write_csv(out, header, rows);
    json echo = model.echo();
    echo["replicas"] = replicas;
    echo["seed"] = seed;
    echo["emit"] = emit;
    write_manifest(out, echo);
    return 0;
}

int run_enumerate(const CommonModel& model, int max_edges, bool allow_over_cap, int workers,
                  const std::string& out) {
    warn_degenerate_threshold(model);
    const BoxGeometry box = model.box();
    EnumerationOptions opts;
    opts.max_edges = max_edges;
    opts.allow_over_cap = allow_over_cap;
    opts.workers = resolve_workers(workers);
    const ExactMeasure measure = enumerate_measure(box, model.kind(), model.a, opts);

    std::vector<std::vector<std::string>> rows;
    for (std::size_t f = 0; f < measure.law_of_F.size(); ++f)
        rows.push_back({std::to_string(f), format_double(measure.law_of_p[f].first),
                        format_double(measure.law_of_F[f])});
    write_csv(out, {"F_value", "p_value", "mu_probability"}, rows);
    json echo = model.echo();
    echo["max_edges"] = max_edges;
    write_manifest(out, echo);
    std::cout << "Z_n = " << format_double(measure.zn) << " (grouped "
              << format_double(measure.zn_grouped) << "), mean p_n = "
              << format_double(measure.mean_p) << "\n";
    return 0;
}

int run_carve_check(const std::string& input, std::int64_t root, std::int64_t m) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error("cannot read '" + input + "'");
    const auto [box, config] = parse_config_dump(in);
    const ClusterAnalysis analysis = analyze(box, config);

    VertexId root_vertex = static_cast<VertexId>(root);
    if (root_vertex < 0) {
        // default: the smallest vertex inside a largest cluster
        std::vector<std::int64_t> label_size(static_cast<std::size_t>(box.vertex_count()), 0);
        for (VertexId v = 0; v < box.vertex_count(); ++v)
            ++label_size[static_cast<std::size_t>(analysis.label[static_cast<std::size_t>(v)])];
        for (VertexId v = 0; v < box.vertex_count() && root_vertex < 0; ++v)
            if (label_size[static_cast<std::size_t>(analysis.label[static_cast<std::size_t>(v)])] ==
                analysis.cmax_size)
                root_vertex = v;
    }
    if (root_vertex >= box.vertex_count())
        throw std::runtime_error("root vertex id out of range");

    const ClusterSubgraph sub = cluster_subgraph(box, analysis, root_vertex);
    std::int32_t root_index = -1;
    for (std::size_t i = 0; i < sub.vertex_ids.size(); ++i)
        if (sub.vertex_ids[i] == root_vertex) root_index = static_cast<std::int32_t>(i);

    const std::int64_t nv = sub.graph.vertex_count();
    if (m < 1 || m > nv) throw std::runtime_error("goal size m must lie in [1, |V|]");
    const auto cut = carve(sub.graph, root_index, m);

    // achieved size by an independent flood fill over the remaining edges
    std::vector<std::uint8_t> removed(sub.graph.edges.size(), 0);
    for (std::int32_t e : cut) removed[static_cast<std::size_t>(e)] = 1;
    std::vector<std::int8_t> seen(static_cast<std::size_t>(nv), 0);
    std::vector<std::int32_t> stack = {root_index};
    seen[static_cast<std::size_t>(root_index)] = 1;
    std::int64_t achieved = 0;
    while (!stack.empty()) {
        const std::int32_t v = stack.back();
        stack.pop_back();
        ++achieved;
        for (std::size_t e = 0; e < sub.graph.edges.size(); ++e) {
            if (removed[e]) continue;
            const auto& ed = sub.graph.edges[e];
            std::int32_t w = -1;
            if (ed.first == v) w = ed.second;
            if (ed.second == v) w = ed.first;
            if (w >= 0 && !seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                stack.push_back(w);
            }
        }
    }
    std::cout << "|V| = " << nv << "\nm = " << m << "\n|E_0| = " << cut.size()
              << "\nachieved component size = " << achieved << "\n";
    return achieved == m ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-organized critical percolation: sampler, coupling and exact baselines"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // ---- sample ----
    CommonModel sample_model;
    std::int64_t sweeps = 2000, burn_in = 500, thin = 1, chains = 4;
    std::uint64_t seed = 1;
    bool cold_start = false;
    int workers = 0;
    std::string out = "samples.csv";
    CLI::App* sample_cmd = app.add_subcommand("sample", "run Metropolis chains targeting the feedback measure");
    sample_model.add_flags(sample_cmd);
    sample_cmd->add_option("--sweeps", sweeps)->capture_default_str();
    sample_cmd->add_option("--burn-in", burn_in)->capture_default_str();
    sample_cmd->add_option("--thin", thin)->capture_default_str();
    sample_cmd->add_option("--chains", chains)->capture_default_str();
    sample_cmd->add_option("--seed", seed)->capture_default_str();
    sample_cmd->add_flag("--cold-start", cold_start, "start all-closed instead of all-open");
    sample_cmd->add_option("--workers", workers, "worker threads (default: SOCPERC_WORKERS or cores)");
    sample_cmd->add_option("--out", out, "output CSV path")->capture_default_str();
    sample_cmd->set_config("--config");

    // ---- couple ----
    CommonModel couple_model;
    std::string emit = "zn";
    std::int64_t replicas = 1000;
    std::uint64_t couple_seed = 1;
    int couple_workers = 0;
    std::string couple_out = "couple.csv";
    CLI::App* couple_cmd = app.add_subcommand("couple", "decreasing-coupling experiments");
    couple_model.add_flags(couple_cmd);
    couple_cmd->add_option("--replicas", replicas)->capture_default_str();
    couple_cmd->add_option("--seed", couple_seed)->capture_default_str();
    couple_cmd->add_option("--emit", emit, "zn, trajectory or stopping")->capture_default_str();
    couple_cmd->add_option("--workers", couple_workers);
    couple_cmd->add_option("--out", couple_out)->capture_default_str();
    couple_cmd->set_config("--config");

    // ---- enumerate ----
    CommonModel enum_model;
    enum_model.side = 3;
    int max_edges = 24;
    bool allow_over_cap = false;
    int enum_workers = 0;
    std::string enum_out = "measure.csv";
    CLI::App* enum_cmd = app.add_subcommand("enumerate", "exact law of the measure on a tiny box");
    enum_model.add_flags(enum_cmd);
    enum_cmd->add_option("--max-edges", max_edges)->capture_default_str();
    enum_cmd->add_flag("--allow-over-cap", allow_over_cap, "enumerate past the edge cap (slow)");
    enum_cmd->add_option("--workers", enum_workers);
    enum_cmd->add_option("--out", enum_out)->capture_default_str();
    enum_cmd->set_config("--config");

    // ---- carve-check ----
    std::string carve_input;
    std::int64_t carve_root = -1, carve_m = 1;
    CLI::App* carve_cmd = app.add_subcommand("carve-check", "carve a dumped cluster to an exact size");
    carve_cmd->add_option("--input", carve_input, "configuration dump file")->required();
    carve_cmd->add_option("--root", carve_root, "root vertex id (default: inside the largest cluster)");
    carve_cmd->add_option("--m", carve_m, "goal component size")->required();

    // ---- study ----
    CLI::App* study = app.add_subcommand("study", "experiment harness");
    study->require_subcommand(1);

    ExperimentConfig study_cfg;
    CommonModel study_model;
    std::vector<int> n_list = {8, 16};
    std::string study_out = "study.csv";

    auto add_study_flags = [&](CLI::App* cmd) {
        study_model.add_flags(cmd);
        cmd->add_option("--n", n_list, "box sides to sweep")->capture_default_str();
        cmd->add_option("--chains", study_cfg.chains)->capture_default_str();
        cmd->add_option("--sweeps", study_cfg.sweeps)->capture_default_str();
        cmd->add_option("--burn-in", study_cfg.burn_in)->capture_default_str();
        cmd->add_option("--thin", study_cfg.thin)->capture_default_str();
        cmd->add_option("--seed", study_cfg.seed)->capture_default_str();
        cmd->add_option("--p-ref", study_cfg.p_ref, "reference critical point")->capture_default_str();
        cmd->add_option("--epsilon", study_cfg.epsilon_list, "deviation thresholds")
            ->capture_default_str();
        cmd->add_flag("--cold-start", study_cfg.cold_start);
        cmd->add_option("--workers", study_cfg.workers);
        cmd->add_option("--out", study_out)->capture_default_str();
        cmd->set_config("--config");
    };

    CLI::App* conc_cmd = study->add_subcommand("concentration", "law of p_n across box sizes");
    add_study_flags(conc_cmd);

    CLI::App* speed_cmd = study->add_subcommand("speed", "scaled deviations n^c (p_n - p_ref)");
    add_study_flags(speed_cmd);
    speed_cmd->add_option("--c", study_cfg.c, "deviation scaling exponent")->capture_default_str();
    speed_cmd->add_option("--beta-prime", study_cfg.beta_prime)->capture_default_str();
    speed_cmd->add_option("--gamma-prime", study_cfg.gamma_prime)->capture_default_str();

    CLI::App* qn_cmd = study->add_subcommand("qn", "fixed point of p -> phi(E_p[F])");
    CommonModel qn_model;
    qn_model.side = 8;
    qn_model.functional = "bnb";
    qn_model.a = 1.9;
    qn_model.b = 0.2;
    std::int64_t qn_samples = 2000;
    double qn_tol = 1e-4;
    std::uint64_t qn_seed = 1;
    bool qn_exact = false;
    std::string qn_out = "qn.csv";
    qn_model.add_flags(qn_cmd);
    qn_cmd->add_option("--samples", qn_samples, "Monte Carlo samples per evaluation")
        ->capture_default_str();
    qn_cmd->add_option("--tol", qn_tol)->capture_default_str();
    qn_cmd->add_option("--seed", qn_seed)->capture_default_str();
    qn_cmd->add_flag("--exact", qn_exact, "use exact enumeration (small boxes)");
    qn_cmd->add_option("--out", qn_out)->capture_default_str();
    qn_cmd->set_config("--config");

    CLI::App* tails_cmd = study->add_subcommand("tails", "empirical tails of F under the product measure");
    CommonModel tails_model;
    double tails_p = 0.3, tails_A = 1.0;
    std::int64_t tails_samples = 10000;
    std::uint64_t tails_seed = 1;
    double tails_pref = 0.5;
    int tails_workers = 0;
    std::vector<int> tails_n = {8, 16, 32};
    std::string tails_out = "tails.csv";
    tails_model.add_flags(tails_cmd);
    tails_cmd->add_option("--p", tails_p, "edge probability")->capture_default_str();
    tails_cmd->add_option("--A", tails_A, "threshold prefactor")->capture_default_str();
    tails_cmd->add_option("--n", tails_n, "box sides")->capture_default_str();
    tails_cmd->add_option("--samples", tails_samples)->capture_default_str();
    tails_cmd->add_option("--seed", tails_seed)->capture_default_str();
    tails_cmd->add_option("--p-ref", tails_pref)->capture_default_str();
    tails_cmd->add_option("--workers", tails_workers);
    tails_cmd->add_option("--out", tails_out)->capture_default_str();
    tails_cmd->set_config("--config");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sample_cmd->parsed())
            return run_sample(sample_model, sweeps, burn_in, thin, chains, seed, cold_start,
                              workers, out);
        if (couple_cmd->parsed())
            return run_couple(couple_model, emit, replicas, couple_seed, couple_workers, couple_out);
        if (enum_cmd->parsed())
            return run_enumerate(enum_model, max_edges, allow_over_cap, enum_workers, enum_out);
        if (carve_cmd->parsed()) return run_carve_check(carve_input, carve_root, carve_m);

        if (study->parsed()) {
            study_cfg.dim = study_model.dim;
            study_cfg.torus = study_model.torus;
            study_cfg.kind = study_model.kind();
            study_cfg.a = study_model.a;
            study_cfg.n_list = n_list;
            json echo;
            echo["model"] = study_model.echo();
            echo["n"] = n_list;
            echo["chains"] = study_cfg.chains;
            echo["sweeps"] = study_cfg.sweeps;
            echo["burn_in"] = study_cfg.burn_in;
            echo["thin"] = study_cfg.thin;
            echo["seed"] = study_cfg.seed;
            echo["p_ref"] = study_cfg.p_ref;

            if (conc_cmd->parsed()) {
                warn_degenerate_threshold(study_model);
                const auto rows = concentration_study(study_cfg);
                std::vector<std::string> header = {"n",   "samples", "mean_p", "mean_F",
                                                   "q05", "q25",     "q50",    "q75",
                                                   "q95", "chain_spread"};
                for (double eps : study_cfg.epsilon_list)
                    header.push_back("tail_" + format_double(eps));
                std::vector<std::vector<std::string>> csv;
                for (const auto& row : rows) {
                    std::vector<std::string> r = {
                        std::to_string(row.n),        std::to_string(row.pooled_samples),
                        format_double(row.mean_p),    format_double(row.mean_f),
                        format_double(row.q05),       format_double(row.q25),
                        format_double(row.q50),       format_double(row.q75),
                        format_double(row.q95),       format_double(row.chain_spread)};
                    for (double t : row.tail_probs) r.push_back(format_double(t));
                    csv.push_back(std::move(r));
                    std::cout << "n=" << row.n << " mean p_n=" << row.mean_p
                              << " spread=" << row.chain_spread << "\n";
                }
                write_csv(study_out, header, csv);
                echo["epsilon"] = study_cfg.epsilon_list;
                write_manifest(study_out, echo);
                return 0;
            }
            if (speed_cmd->parsed()) {
                const auto rows = speed_study(study_cfg);
                std::vector<std::vector<std::string>> csv;
                for (const auto& row : rows) {
                    csv.push_back({std::to_string(row.n), std::to_string(row.pooled_samples),
                                   format_double(row.q05), format_double(row.q25),
                                   format_double(row.q50), format_double(row.q75),
                                   format_double(row.q95), format_double(row.median_abs)});
                    std::cout << "n=" << row.n << " median |n^c (p_n - p_ref)|=" << row.median_abs
                              << "\n";
                }
                write_csv(study_out, {"n", "samples", "q05", "q25", "q50", "q75", "q95", "median_abs"},
                          csv);
                echo["c"] = study_cfg.c;
                echo["beta_prime"] = study_cfg.beta_prime;
                echo["gamma_prime"] = study_cfg.gamma_prime;
                write_manifest(study_out, echo);
                return 0;
            }
            return 1;
        }

        if (qn_cmd->parsed()) {
            const BoxGeometry box = build_box(qn_model.dim, qn_model.side, false);
            const QnResult res =
                qn_fixed_point(box, qn_model.a, qn_model.b, qn_samples, qn_tol, qn_seed, qn_exact);
            write_csv(qn_out, {"qn", "evaluations", "samples_used", "exact"},
                      {{format_double(res.qn), std::to_string(res.evaluations),
                        std::to_string(res.samples_used), res.exact ? "1" : "0"}});
            json echo = qn_model.echo();
            echo["samples"] = qn_samples;
            echo["tol"] = qn_tol;
            echo["seed"] = qn_seed;
            write_manifest(qn_out, echo);
            std::cout << "q_n = " << res.qn << "\n";
            return 0;
        }
        if (tails_cmd->parsed()) {
            const TailResult res =
                tail_decay_check(tails_model.dim, tails_model.kind(), tails_p, tails_model.a,
                                 tails_A, tails_n, tails_samples, tails_seed, tails_pref,
                                 tails_workers);
            std::vector<std::vector<std::string>> csv;
            for (const TailRow& row : res.rows)
                csv.push_back({std::to_string(row.n), std::to_string(row.hits),
                               std::to_string(row.samples), format_double(row.estimate)});
            write_csv(tails_out, {"n", "hits", "samples", "tail_estimate"}, csv);
            json echo = tails_model.echo();
            echo["p"] = tails_p;
            echo["A"] = tails_A;
            echo["samples"] = tails_samples;
            echo["seed"] = tails_seed;
            echo["upper_tail"] = res.upper_tail;
            echo["strictly_decreasing"] = res.strictly_decreasing;
            write_manifest(tails_out, echo);
            std::cout << (res.upper_tail ? "P(F > A n^a)" : "P(F < A n^a)")
                      << (res.strictly_decreasing ? " strictly decreasing" : " not strictly decreasing")
                      << " over the requested sides\n";
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 1;
}
