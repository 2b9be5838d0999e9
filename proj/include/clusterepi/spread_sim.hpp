#pragma once

// Round-synchronous two-strain SIR spreading with mutation.

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "graph_gen.hpp"

namespace clusterepi {

enum class Strain : std::uint8_t { one = 0, two = 1 };

inline constexpr std::size_t index(Strain s) { return static_cast<std::size_t>(s); }

inline Strain strain_from_number(int k) {
    if (k == 1) return Strain::one;
    if (k == 2) return Strain::two;
    throw std::invalid_argument("strain must be 1 or 2, got " + std::to_string(k));
}

inline int strain_number(Strain s) { return static_cast<int>(index(s)) + 1; }

/// Per-strain transmissibility and row-stochastic mutation matrix.
/// mu[i][j]: probability that strain i becomes strain j inside a new host.
struct StrainParams {
    std::array<double, 2> T{0.0, 0.0};
    std::array<std::array<double, 2>, 2> mu{{{1.0, 0.0}, {0.0, 1.0}}};

    static StrainParams make(double t1, double t2, double mu11, double mu12, double mu21,
                             double mu22) {
        StrainParams p;
        p.T = {t1, t2};
        p.mu = {{{mu11, mu12}, {mu21, mu22}}};
        p.validate();
        return p;
    }

    void validate() const {
        for (const double t : T)
            if (!(t >= 0.0 && t <= 1.0))
                throw std::invalid_argument("transmissibility must lie in [0,1]");
        for (const auto& row : mu) {
            if (!(row[0] >= 0.0 && row[1] >= 0.0))
                throw std::invalid_argument("mutation probabilities must be >= 0");
            if (std::abs(row[0] + row[1] - 1.0) > 1e-12)
                throw std::invalid_argument("mutation matrix rows must sum to 1");
        }
    }

    /// One strain cannot reach the other through mutation.
    bool decomposable() const { return mu[0][1] == 0.0 || mu[1][0] == 0.0; }
};

struct SimulationOutcome {
    std::uint64_t total_infected = 0;
    std::array<std::uint64_t, 2> infected_by_strain{0, 0};
    std::uint64_t rounds = 0;
    NodeId seed_node = 0;
    Strain seed_strain = Strain::one;
};

/// Reusable buffers for repeated runs on graphs of the same size.
class Spreader {
public:
    explicit Spreader(std::size_t n = 0) { reserve(n); }

    template <class URBG>
    SimulationOutcome run(const ClusteredGraph& graph, const StrainParams& params, NodeId seed_node,
                          Strain seed_strain, URBG& rng) {
        const std::size_t n = graph.node_count();
        if (seed_node >= n) throw std::invalid_argument("simulate: seed node out of range");
        reserve(n);
        std::fill(infected_.begin(), infected_.begin() + static_cast<std::ptrdiff_t>(n), 0);

        std::uniform_real_distribution<double> unif(0.0, 1.0);
        SimulationOutcome out;
        out.seed_node = seed_node;
        out.seed_strain = seed_strain;

        // The seed carries its assigned strain unmutated.
        frontier_.clear();
        frontier_.emplace_back(seed_node, seed_strain);
        infected_[seed_node] = 1;
        out.total_infected = 1;
        out.infected_by_strain[index(seed_strain)] = 1;

        while (!frontier_.empty()) {
            ++out.rounds;
            touched_.clear();
            // Every attempt of the round is resolved before any adoption draw.
            for (const auto& [u, strain] : frontier_) {
                const double T = params.T[index(strain)];
                for (const NodeId v : graph.neighbors(u)) {
                    if (infected_[v]) continue;
                    if (!(unif(rng) < T)) continue;
                    if (exposures_[v][0] + exposures_[v][1] == 0) touched_.push_back(v);
                    ++exposures_[v][index(strain)];
                }
            }
            next_.clear();
            for (const NodeId v : touched_) {
                const auto [x, y] = exposures_[v];
                exposures_[v] = {0, 0};
                Strain adopted = Strain::one;
                if (x == 0) adopted = Strain::two;
                else if (y != 0 && !(unif(rng) * (x + y) < x)) adopted = Strain::two;
                const Strain carried =
                    unif(rng) < params.mu[index(adopted)][0] ? Strain::one : Strain::two;
                infected_[v] = 1;
                ++out.total_infected;
                ++out.infected_by_strain[index(carried)];
                next_.emplace_back(v, carried);
            }
            frontier_.swap(next_);
        }
        return out;
    }

private:
    void reserve(std::size_t n) {
        if (infected_.size() < n) {
            infected_.resize(n, 0);
            exposures_.resize(n, {0, 0});
        }
    }

    std::vector<std::uint8_t> infected_;  // ever infected (I or R)
    std::vector<std::array<std::uint32_t, 2>> exposures_;
    std::vector<NodeId> touched_;
    std::vector<std::pair<NodeId, Strain>> frontier_;
    std::vector<std::pair<NodeId, Strain>> next_;
};

template <class URBG>
SimulationOutcome simulate(const ClusteredGraph& graph, const StrainParams& params,
                           NodeId seed_node, Strain seed_strain, URBG& rng) {
    Spreader sp(graph.node_count());
    return sp.run(graph, params, seed_node, seed_strain, rng);
}

/// Inclusive threshold: an outbreak reaching frac_threshold * n nodes is an epidemic.
inline bool classify(const SimulationOutcome& outcome, std::size_t n, double frac_threshold) {
    if (!(frac_threshold > 0.0 && frac_threshold < 1.0))
        throw std::invalid_argument("classify: threshold must lie in (0,1)");
    return static_cast<double>(outcome.total_infected) >= frac_threshold * static_cast<double>(n);
}

}  // namespace clusterepi
