// Command-line front end: generate, simulate, predict, threshold, sweep.

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "clusterepi/analytics.hpp"
#include "clusterepi/degree_models.hpp"
#include "clusterepi/graph_gen.hpp"
#include "clusterepi/harness.hpp"
#include "clusterepi/spread_sim.hpp"

namespace {

using namespace clusterepi;

struct ModelFlags {
    std::string model = "doubly-poisson";
    std::vector<double> lambda_s, lambda_t, lambda, c;
    std::string table;
};

struct StrainFlags {
    double t1 = 0.0, t2 = 0.0;
    std::optional<double> mu11, mu12, mu21, mu22;
};

void add_model_flags(CLI::App* app, ModelFlags& f) {
    app->add_option("--model", f.model, "doubly-poisson | cluster-tunable | table")
        ->check(CLI::IsMember({"doubly-poisson", "cluster-tunable", "table"}));
    app->add_option("--lambda-s", f.lambda_s, "mean single-edges (comma list for sweeps)")
        ->delimiter(',');
    app->add_option("--lambda-t", f.lambda_t, "mean triangles (comma list for sweeps)")
        ->delimiter(',');
    app->add_option("--lambda", f.lambda, "lambda_s = lambda_t = lambda, or the cluster-tunable scale")
        ->delimiter(',');
    app->add_option("--c", f.c, "cluster-tunable knob in [0,4]")->delimiter(',');
    app->add_option("--table", f.table, "CSV with header s,t,p");
}

void add_strain_flags(CLI::App* app, StrainFlags& f) {
    app->add_option("--t1", f.t1, "strain-1 transmissibility");
    app->add_option("--t2", f.t2, "strain-2 transmissibility");
    app->add_option("--mu11", f.mu11, "P(strain 1 stays strain 1)");
    app->add_option("--mu12", f.mu12, "P(strain 1 mutates to strain 2)");
    app->add_option("--mu21", f.mu21, "P(strain 2 mutates to strain 1)");
    app->add_option("--mu22", f.mu22, "P(strain 2 stays strain 2)");
}

StrainParams strain_params(const StrainFlags& f) {
    // A row given by one entry is completed to sum to one; the default is identity.
    auto row = [](std::optional<double> same, std::optional<double> other, double fallback) {
        if (same && other) return std::pair{*same, *other};
        if (same) return std::pair{*same, 1.0 - *same};
        if (other) return std::pair{1.0 - *other, *other};
        return std::pair{fallback, 1.0 - fallback};
    };
    const auto [m11, m12] = row(f.mu11, f.mu12, 1.0);
    const auto [m22, m21] = row(f.mu22, f.mu21, 1.0);
    return StrainParams::make(f.t1, f.t2, m11, m12, m21, m22);
}

double single(const std::vector<double>& v, const char* name) {
    if (v.size() != 1) throw std::invalid_argument(std::string("expected exactly one value for ") + name);
    return v.front();
}

JointDegreeModel single_model(const ModelFlags& f) {
    if (f.model == "table") return JointDegreeModel(load_table_csv(f.table));
    if (f.model == "cluster-tunable")
        return JointDegreeModel(ClusterTunable{single(f.lambda, "--lambda"), single(f.c, "--c")});
    if (!f.lambda.empty()) {
        const double l = single(f.lambda, "--lambda");
        return JointDegreeModel(DoublyPoisson{l, l});
    }
    return JointDegreeModel(
        DoublyPoisson{single(f.lambda_s, "--lambda-s"), single(f.lambda_t, "--lambda-t")});
}

std::vector<GridPoint> sweep_grid(const ModelFlags& f) {
    std::vector<GridPoint> grid;
    if (f.model == "table") {
        grid.push_back(table_point(load_table_csv(f.table)));
    } else if (f.model == "cluster-tunable") {
        if (f.lambda.empty() || f.c.empty())
            throw std::invalid_argument("cluster-tunable sweep needs --lambda and --c");
        for (const double c : f.c)
            for (const double l : f.lambda) grid.push_back(cluster_tunable_point(l, c));
    } else if (!f.lambda.empty()) {
        grid = diagonal_grid(f.lambda);
    } else {
        if (f.lambda_s.empty() || f.lambda_t.empty())
            throw std::invalid_argument("doubly-poisson sweep needs --lambda or --lambda-s/--lambda-t");
        const bool vary_t = f.lambda_t.size() > 1;
        for (const double ls : f.lambda_s)
            for (const double lt : f.lambda_t)
                grid.push_back(doubly_poisson_point(vary_t ? lt : ls, ls, lt));
    }
    return grid;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Clustered multi-strain epidemics: generation, simulation and prediction"};
    app.require_subcommand(1);

    ModelFlags mf;
    StrainFlags sf;
    std::size_t n = 20'000;
    std::size_t trials = 2'000;
    double frac_threshold = 0.05;
    int seed_strain = 1;
    std::uint64_t rng_seed = 1;
    std::size_t graphs_per_point = 10;
    std::string out_path;
    std::optional<std::uint32_t> seed_node;
    double lo = 0.01, hi = 10.0;
    unsigned threads = 0;

    auto* gen = app.add_subcommand("generate", "sample a clustered graph and dump its edge list");
    add_model_flags(gen, mf);
    gen->add_option("--n", n, "number of nodes");
    gen->add_option("--rng-seed", rng_seed, "master random seed");
    gen->add_option("--out", out_path, "edge-list path (stdout if omitted)");

    auto* sim = app.add_subcommand("simulate", "run one outbreak and print its outcome");
    add_model_flags(sim, mf);
    add_strain_flags(sim, sf);
    sim->add_option("--n", n, "number of nodes");
    sim->add_option("--rng-seed", rng_seed, "master random seed");
    sim->add_option("--seed-strain", seed_strain, "strain of the seed (1 or 2)")->check(CLI::Range(1, 2));
    sim->add_option("--seed-node", seed_node, "seed node id (uniform if omitted)");
    sim->add_option("--frac-threshold", frac_threshold, "epidemic if infected >= frac * n");

    auto* pred = app.add_subcommand("predict", "emergence probability, rho(J) and size heuristic");
    add_model_flags(pred, mf);
    add_strain_flags(pred, sf);

    auto* thr = app.add_subcommand("threshold", "bisect lambda where rho(J) = 1");
    add_model_flags(thr, mf);
    add_strain_flags(thr, sf);
    thr->add_option("--lo", lo, "lower bracket");
    thr->add_option("--hi", hi, "upper bracket");

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo vs. prediction over a parameter grid");
    add_model_flags(sweep, mf);
    add_strain_flags(sweep, sf);
    sweep->add_option("--n", n, "number of nodes");
    sweep->add_option("--trials", trials, "outbreaks per grid point");
    sweep->add_option("--frac-threshold", frac_threshold, "epidemic if infected >= frac * n");
    sweep->add_option("--seed-strain", seed_strain, "strain of the seed (1 or 2)")->check(CLI::Range(1, 2));
    sweep->add_option("--rng-seed", rng_seed, "master random seed");
    sweep->add_option("--graphs-per-point", graphs_per_point, "graphs sampled per grid point");
    sweep->add_option("--threads", threads, "worker threads (0: all cores)");
    sweep->add_option("--out", out_path, "CSV path (stdout if omitted)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto model = single_model(mf);
            Rng rng(rng_seed);
            const auto graph = generate_graph(model, n, rng);
            if (out_path.empty()) {
                write_edge_list(graph, std::cout);
            } else {
                auto out = open_out(out_path);
                write_edge_list(graph, out);
            }
            std::cerr << "global_clustering=" << global_clustering(graph) << '\n';
        } else if (sim->parsed()) {
            const auto model = single_model(mf);
            const auto params = strain_params(sf);
            Rng rng(rng_seed);
            const auto graph = generate_graph(model, n, rng);
            std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(n - 1));
            const NodeId seed = seed_node ? *seed_node : pick(rng);
            const auto o = simulate(graph, params, seed, strain_from_number(seed_strain), rng);
            std::cout << "total_infected=" << o.total_infected
                      << " strain1=" << o.infected_by_strain[0]
                      << " strain2=" << o.infected_by_strain[1] << " rounds=" << o.rounds
                      << " seed_node=" << o.seed_node << " seed_strain=" << strain_number(o.seed_strain)
                      << " epidemic=" << (classify(o, n, frac_threshold) ? "true" : "false") << '\n';
        } else if (pred->parsed()) {
            const auto model = single_model(mf);
            const auto params = strain_params(sf);
            std::cout << "rho_J=" << threshold_rho(model, params) << '\n';
            std::cout << "T_tilde=" << effective_transmissibility(params) << '\n';
            const auto sol = emergence_probability(model, params);
            std::cout << "h1=" << sol.h[0] << " h2=" << sol.h[1] << " g1=" << sol.g[0]
                      << " g2=" << sol.g[1] << '\n';
            std::cout << "pe_strain1=" << sol.prob_emergence[0] << '\n';
            std::cout << "pe_strain2=" << sol.prob_emergence[1] << '\n';
            std::cout << "decomposable=" << (sol.decomposable ? "true" : "false") << '\n';
            std::cout << "size_pred=" << size_heuristic(model, params) << '\n';
        } else if (thr->parsed()) {
            const auto params = strain_params(sf);
            ModelFamily family;
            if (mf.model == "cluster-tunable") family = cluster_tunable_family(single(mf.c, "--c"));
            else if (mf.model == "doubly-poisson") family = doubly_poisson_diagonal();
            else throw std::invalid_argument("threshold supports doubly-poisson and cluster-tunable");
            std::cout << "lambda_star=" << detail::format_double(critical_parameter(family, params, lo, hi))
                      << '\n';
        } else if (sweep->parsed()) {
            SweepConfig cfg;
            cfg.grid = sweep_grid(mf);
            cfg.params = strain_params(sf);
            cfg.n = n;
            cfg.trials = trials;
            cfg.frac_threshold = frac_threshold;
            cfg.master_seed = rng_seed;
            cfg.graphs_per_point = graphs_per_point;
            cfg.seed_strain = strain_from_number(seed_strain);
            cfg.threads = threads;
            const auto rows = run_sweep(cfg);
            if (out_path.empty()) {
                write_sweep_csv(rows, std::cout);
            } else {
                auto out = open_out(out_path);
                write_sweep_csv(rows, out);
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
