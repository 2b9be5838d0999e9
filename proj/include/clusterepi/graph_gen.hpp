#pragma once

// Clustered configuration model: single stubs are matched in pairs and
// triangle corners in trios, then the multigraph is simplified.

#include <algorithm>
#include <array>
#include <cstdint>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "degree_models.hpp"

namespace clusterepi {

using NodeId = std::uint32_t;

struct DegreeSequence {
    std::vector<DegreePair> nodes;

    std::uint64_t total_s() const {
        std::uint64_t acc = 0;
        for (const auto& d : nodes) acc += d.s;
        return acc;
    }
    std::uint64_t total_t() const {
        std::uint64_t acc = 0;
        for (const auto& d : nodes) acc += d.t;
        return acc;
    }
};

/// Draws n i.i.d. joint degrees, then forces sum(s) even and sum(t) % 3 == 0
/// by incrementing uniformly chosen nodes.
template <class URBG>
DegreeSequence sample_degree_sequence(const JointDegreeModel& model, std::size_t n, URBG& rng) {
    if (n == 0) throw std::invalid_argument("sample_degree_sequence: n must be >= 1");
    DegreeSequence seq;
    seq.nodes.reserve(n);
    for (std::size_t i = 0; i < n; ++i) seq.nodes.push_back(model.sample(rng));

    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    if (seq.total_s() % 2 != 0) seq.nodes[pick(rng)].s += 1;
    auto rem = seq.total_t() % 3;
    while (rem != 0) {
        seq.nodes[pick(rng)].t += 1;
        rem = (rem + 1) % 3;
    }
    return seq;
}

/// Multigraph produced by stub matching, before simplification.
struct RawMatching {
    std::size_t n = 0;
    std::vector<std::pair<NodeId, NodeId>> single_edges;
    std::vector<std::array<NodeId, 3>> triangles;
};

template <class URBG>
RawMatching match_stubs(const DegreeSequence& seq, URBG& rng) {
    if (seq.total_s() % 2 != 0 || seq.total_t() % 3 != 0)
        throw std::invalid_argument("match_stubs: degree sequence violates parity invariants");
    RawMatching raw;
    raw.n = seq.nodes.size();

    std::vector<NodeId> stubs;
    stubs.reserve(seq.total_s());
    std::vector<NodeId> corners;
    corners.reserve(seq.total_t());
    for (std::size_t i = 0; i < seq.nodes.size(); ++i) {
        stubs.insert(stubs.end(), seq.nodes[i].s, static_cast<NodeId>(i));
        corners.insert(corners.end(), seq.nodes[i].t, static_cast<NodeId>(i));
    }
    std::shuffle(stubs.begin(), stubs.end(), rng);
    std::shuffle(corners.begin(), corners.end(), rng);

    raw.single_edges.reserve(stubs.size() / 2);
    for (std::size_t k = 0; k + 1 < stubs.size(); k += 2)
        raw.single_edges.emplace_back(stubs[k], stubs[k + 1]);
    raw.triangles.reserve(corners.size() / 3);
    for (std::size_t k = 0; k + 2 < corners.size(); k += 3)
        raw.triangles.push_back({corners[k], corners[k + 1], corners[k + 2]});
    return raw;
}

struct GraphDiagnostics {
    std::uint64_t raw_edges = 0;  // single edges + 3 per triangle, before simplification
    std::uint64_t self_loops_removed = 0;
    std::uint64_t parallel_edges_merged = 0;
    std::uint64_t degenerate_triangles = 0;  // trios with a repeated node

    double removed_fraction() const {
        return raw_edges == 0 ? 0.0
                              : static_cast<double>(self_loops_removed + parallel_edges_merged) /
                                    static_cast<double>(raw_edges);
    }
};

/// Simple undirected graph in compressed adjacency form. Neighbor lists are sorted.
class ClusteredGraph {
public:
    ClusteredGraph() = default;

    /// Builds the simple graph spanned by `edges`. Dropped self-loops and
    /// merged duplicates are tallied on top of `diag`.
    static ClusteredGraph from_edges(std::size_t n, std::vector<std::pair<NodeId, NodeId>> edges,
                                     GraphDiagnostics diag = {}) {
        ClusteredGraph g;
        g.n_ = n;
        diag.raw_edges = edges.size();
        std::size_t kept = 0;
        for (auto& [u, v] : edges) {
            if (u >= n || v >= n) throw std::out_of_range("from_edges: node id out of range");
            if (u == v) {
                ++diag.self_loops_removed;
                continue;
            }
            if (u > v) std::swap(u, v);
            edges[kept++] = {u, v};
        }
        edges.resize(kept);
        std::sort(edges.begin(), edges.end());
        const auto last = std::unique(edges.begin(), edges.end());
        diag.parallel_edges_merged += static_cast<std::uint64_t>(edges.end() - last);
        edges.erase(last, edges.end());

        g.offsets_.assign(n + 1, 0);
        for (const auto& [u, v] : edges) {
            ++g.offsets_[u + 1];
            ++g.offsets_[v + 1];
        }
        for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] += g.offsets_[i];
        g.neighbors_.resize(g.offsets_[n]);
        std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
        for (const auto& [u, v] : edges) {
            g.neighbors_[cursor[u]++] = v;
            g.neighbors_[cursor[v]++] = u;
        }
        for (std::size_t i = 0; i < n; ++i)
            std::sort(g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
                      g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]));
        g.edge_count_ = edges.size();
        g.diag_ = diag;
        return g;
    }

    std::size_t node_count() const { return n_; }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t degree(NodeId u) const { return offsets_[u + 1] - offsets_[u]; }
    std::span<const NodeId> neighbors(NodeId u) const {
        return {neighbors_.data() + offsets_[u], degree(u)};
    }
    const GraphDiagnostics& diagnostics() const { return diag_; }

private:
    std::size_t n_ = 0;
    std::size_t edge_count_ = 0;
    std::vector<std::size_t> offsets_{0};
    std::vector<NodeId> neighbors_;
    GraphDiagnostics diag_;
};

inline ClusteredGraph simplify(const RawMatching& raw) {
    GraphDiagnostics diag;
    std::vector<std::pair<NodeId, NodeId>> edges(raw.single_edges);
    edges.reserve(raw.single_edges.size() + 3 * raw.triangles.size());
    for (const auto& tri : raw.triangles) {
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) ++diag.degenerate_triangles;
        edges.emplace_back(tri[0], tri[1]);
        edges.emplace_back(tri[1], tri[2]);
        edges.emplace_back(tri[0], tri[2]);
    }
    return ClusteredGraph::from_edges(raw.n, std::move(edges), diag);
}

template <class URBG>
ClusteredGraph assemble(const DegreeSequence& seq, URBG& rng) {
    return simplify(match_stubs(seq, rng));
}

template <class URBG>
ClusteredGraph generate_graph(const JointDegreeModel& model, std::size_t n, URBG& rng) {
    return assemble(sample_degree_sequence(model, n, rng), rng);
}

/// 3 * triangles / connected triples; 0 when the graph has no connected triple.
inline double global_clustering(const ClusteredGraph& g) {
    std::uint64_t triangles = 0;
    std::uint64_t triples = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        const auto nu = g.neighbors(u);
        const std::uint64_t d = nu.size();
        if (d > 1) triples += d * (d - 1) / 2;
        // Count each triangle once from its smallest vertex.
        for (const NodeId v : nu) {
            if (v <= u) continue;
            const auto nv = g.neighbors(v);
            auto a = std::upper_bound(nu.begin(), nu.end(), v);
            auto b = std::upper_bound(nv.begin(), nv.end(), v);
            while (a != nu.end() && b != nv.end()) {
                if (*a < *b) ++a;
                else if (*b < *a) ++b;
                else {
                    ++triangles;
                    ++a;
                    ++b;
                }
            }
        }
    }
    if (triples == 0) return 0.0;
    return 3.0 * static_cast<double>(triangles) / static_cast<double>(triples);
}

inline void write_edge_list(const ClusteredGraph& g, std::ostream& out) {
    for (NodeId u = 0; u < g.node_count(); ++u)
        for (const NodeId v : g.neighbors(u))
            if (u < v) out << u << ' ' << v << '\n';
    const auto& d = g.diagnostics();
    out << "# diagnostics: nodes=" << g.node_count() << " edges=" << g.edge_count()
        << " raw_edges=" << d.raw_edges << " self_loops_removed=" << d.self_loops_removed
        << " parallel_edges_merged=" << d.parallel_edges_merged
        << " degenerate_triangles=" << d.degenerate_triangles << '\n';
}

}  // namespace clusterepi
