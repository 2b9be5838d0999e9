#pragma once

// Monte Carlo sweeps compared against analytic predictions, with CSV output.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "analytics.hpp"
#include "degree_models.hpp"
#include "graph_gen.hpp"
#include "spread_sim.hpp"

namespace clusterepi {

using Rng = std::mt19937_64;

/// Independent stream for (master seed, stream tag, index...).
inline Rng derive_rng(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                      std::uint64_t c = 0) {
    auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(master), hi(master), lo(a), hi(a), lo(b), hi(b), lo(c), hi(c)};
    return Rng(seq);
}

struct GridPoint {
    double grid_param = 0.0;
    JointDegreeModel model;
    double lambda_s = 0.0;  // mean single-edges per node
    double lambda_t = 0.0;  // mean triangles per node
    std::optional<double> c;
};

inline GridPoint doubly_poisson_point(double grid_param, double lambda_s, double lambda_t) {
    return {grid_param, JointDegreeModel(DoublyPoisson{lambda_s, lambda_t}), lambda_s, lambda_t,
            std::nullopt};
}

inline GridPoint cluster_tunable_point(double lambda, double c) {
    const ClusterTunable m{lambda, c};
    return {lambda, JointDegreeModel(m), 2.0 * m.pair_rate(), m.triangle_rate(), c};
}

inline GridPoint table_point(const Table& table, double grid_param = 0.0) {
    JointDegreeModel model(table);
    const auto mom = model.moments();
    return {grid_param, std::move(model), mom.mean_s, mom.mean_t, std::nullopt};
}

inline std::vector<GridPoint> diagonal_grid(const std::vector<double>& lambdas) {
    std::vector<GridPoint> grid;
    for (const double l : lambdas) grid.push_back(doubly_poisson_point(l, l, l));
    return grid;
}

inline std::vector<GridPoint> cluster_grid(const std::vector<double>& lambdas, double c) {
    std::vector<GridPoint> grid;
    for (const double l : lambdas) grid.push_back(cluster_tunable_point(l, c));
    return grid;
}

struct SweepConfig {
    std::vector<GridPoint> grid;
    StrainParams params;
    std::size_t n = 20'000;
    std::size_t trials = 2'000;
    double frac_threshold = 0.05;
    std::uint64_t master_seed = 1;
    std::size_t graphs_per_point = 10;
    Strain seed_strain = Strain::one;
    unsigned threads = 0;  // 0: hardware concurrency
    SolverOptions solver{};

    void validate() const {
        if (grid.empty()) throw std::invalid_argument("sweep: grid is empty");
        if (trials < 1) throw std::invalid_argument("sweep: trials must be >= 1");
        if (n < 10) throw std::invalid_argument("sweep: n must be >= 10");
        if (graphs_per_point < 1) throw std::invalid_argument("sweep: graphs_per_point must be >= 1");
        if (!(frac_threshold > 0.0 && frac_threshold < 1.0))
            throw std::invalid_argument("sweep: frac_threshold must lie in (0,1)");
        params.validate();
    }
};

struct SweepRow {
    double grid_param = 0.0;
    double lambda_s = 0.0;
    double lambda_t = 0.0;
    std::optional<double> c;
    std::size_t n = 0;
    std::size_t trials = 0;
    double rho_J = 0.0;
    double pe_pred = 0.0;
    double pe_emp = 0.0;
    double size_pred = 0.0;
    std::optional<double> size_emp;
    std::size_t trials_epidemic = 0;
    std::string error;
};

struct EmpiricalEstimates {
    double pe_emp = 0.0;
    std::optional<double> size_emp;  // empty when no trial was an epidemic
    std::size_t trials_epidemic = 0;
};

inline EmpiricalEstimates empirical_estimates(const std::vector<SimulationOutcome>& outcomes,
                                              std::size_t n, double frac_threshold) {
    if (outcomes.empty()) throw std::invalid_argument("empirical_estimates: no outcomes");
    EmpiricalEstimates est;
    double size_acc = 0.0;
    for (const auto& o : outcomes) {
        if (!classify(o, n, frac_threshold)) continue;
        ++est.trials_epidemic;
        size_acc += static_cast<double>(o.total_infected) / static_cast<double>(n);
    }
    est.pe_emp = static_cast<double>(est.trials_epidemic) / static_cast<double>(outcomes.size());
    if (est.trials_epidemic > 0) est.size_emp = size_acc / static_cast<double>(est.trials_epidemic);
    return est;
}

namespace detail {

inline constexpr std::uint64_t graph_stream = 0x67726170;  // "grap"
inline constexpr std::uint64_t trial_stream = 0x7472696c;  // "tril"

inline unsigned worker_count(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

}  // namespace detail

/// Runs `trials` outbreaks at one grid point. Trial j uses graph j mod
/// graphs_per_point, a uniformly random seed node and its own rng stream.
inline std::vector<SimulationOutcome> simulate_point(const SweepConfig& cfg, const GridPoint& point,
                                                     std::uint64_t grid_index) {
    std::vector<ClusteredGraph> graphs;
    graphs.reserve(cfg.graphs_per_point);
    for (std::size_t k = 0; k < cfg.graphs_per_point; ++k) {
        Rng rng = derive_rng(cfg.master_seed, detail::graph_stream, grid_index, k);
        graphs.push_back(generate_graph(point.model, cfg.n, rng));
    }

    std::vector<SimulationOutcome> outcomes(cfg.trials);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        Spreader spreader(cfg.n);
        for (std::size_t j = next++; j < cfg.trials; j = next++) {
            const auto& g = graphs[j % graphs.size()];
            Rng rng = derive_rng(cfg.master_seed, detail::trial_stream, grid_index, j);
            std::uniform_int_distribution<NodeId> pick(0, static_cast<NodeId>(g.node_count() - 1));
            const NodeId seed = pick(rng);
            outcomes[j] = spreader.run(g, cfg.params, seed, cfg.seed_strain, rng);
        }
    };
    const unsigned workers =
        std::min<unsigned>(detail::worker_count(cfg.threads), static_cast<unsigned>(cfg.trials));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    return outcomes;
}

/// Analytic columns for one grid point. Failures become NaN plus a note.
inline void fill_predictions(const SweepConfig& cfg, const GridPoint& point, SweepRow& row) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto note = [&](const std::string& what, const std::exception& e) {
        if (!row.error.empty()) row.error += "; ";
        row.error += what + ": " + e.what();
    };
    try {
        row.rho_J = threshold_rho(point.model, cfg.params);
    } catch (const std::exception& e) {
        row.rho_J = nan;
        note("rho_J", e);
    }
    try {
        row.pe_pred = emergence_probability(point.model, cfg.params, cfg.solver).pe(cfg.seed_strain);
    } catch (const std::exception& e) {
        row.pe_pred = nan;
        note("pe_pred", e);
    }
    try {
        row.size_pred = size_heuristic(point.model, cfg.params, cfg.solver);
    } catch (const std::exception& e) {
        row.size_pred = nan;
        note("size_pred", e);
    }
}

inline std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    cfg.validate();
    std::vector<SweepRow> rows;
    rows.reserve(cfg.grid.size());
    for (std::size_t gi = 0; gi < cfg.grid.size(); ++gi) {
        const GridPoint& point = cfg.grid[gi];
        SweepRow row;
        row.grid_param = point.grid_param;
        row.lambda_s = point.lambda_s;
        row.lambda_t = point.lambda_t;
        row.c = point.c;
        row.n = cfg.n;
        row.trials = cfg.trials;
        fill_predictions(cfg, point, row);

        const auto outcomes = simulate_point(cfg, point, gi);
        const auto est = empirical_estimates(outcomes, cfg.n, cfg.frac_threshold);
        row.pe_emp = est.pe_emp;
        row.size_emp = est.size_emp;
        row.trials_epidemic = est.trials_epidemic;
        rows.push_back(std::move(row));
    }
    return rows;
}

// --- CSV -------------------------------------------------------------------

inline constexpr const char* sweep_csv_header =
    "grid_param,lambda_s,lambda_t,c,n,trials,rho_J,pe_pred,pe_emp,size_pred,size_emp,"
    "trials_epidemic,error";

namespace detail {

// Shortest representation that parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& field) {
    if (field == "NaN" || field == "nan") return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw std::invalid_argument("sweep csv: bad number '" + field + "'");
    return v;
}

inline std::size_t parse_count(const std::string& field) {
    std::size_t v = 0;
    const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
    if (res.ec != std::errc{} || res.ptr != field.data() + field.size())
        throw std::invalid_argument("sweep csv: bad count '" + field + "'");
    return v;
}

inline std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    std::replace(s.begin(), s.end(), '\r', ' ');
    return s;
}

}  // namespace detail

inline void write_sweep_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    using detail::format_double;
    out << sweep_csv_header << '\n';
    for (const auto& r : rows) {
        out << format_double(r.grid_param) << ',' << format_double(r.lambda_s) << ','
            << format_double(r.lambda_t) << ',' << (r.c ? format_double(*r.c) : "") << ',' << r.n
            << ',' << r.trials << ',' << format_double(r.rho_J) << ',' << format_double(r.pe_pred)
            << ',' << format_double(r.pe_emp) << ',' << format_double(r.size_pred) << ','
            << (r.size_emp ? format_double(*r.size_emp) : "") << ',' << r.trials_epidemic << ','
            << detail::sanitize(r.error) << '\n';
    }
}

inline std::vector<SweepRow> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("sweep csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != sweep_csv_header) throw std::invalid_argument("sweep csv: unexpected header");

    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (!line.empty() && line.back() == ',') f.emplace_back();
        if (f.size() != 13) throw std::invalid_argument("sweep csv: expected 13 columns");
        SweepRow r;
        r.grid_param = detail::parse_double(f[0]);
        r.lambda_s = detail::parse_double(f[1]);
        r.lambda_t = detail::parse_double(f[2]);
        if (!f[3].empty()) r.c = detail::parse_double(f[3]);
        r.n = detail::parse_count(f[4]);
        r.trials = detail::parse_count(f[5]);
        r.rho_J = detail::parse_double(f[6]);
        r.pe_pred = detail::parse_double(f[7]);
        r.pe_emp = detail::parse_double(f[8]);
        r.size_pred = detail::parse_double(f[9]);
        if (!f[10].empty()) r.size_emp = detail::parse_double(f[10]);
        r.trials_epidemic = detail::parse_count(f[11]);
        r.error = f[12];
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace clusterepi
