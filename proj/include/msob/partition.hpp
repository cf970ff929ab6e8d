#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <json.hpp>

#include "msob/space.hpp"

namespace msob {

/// Scale-delta decomposition of a space into cells comparable to balls:
/// centers are pairwise further than delta apart, every point lands in the
/// cell of a nearly-closest center (slack eps), and each cell sits inside
/// B(center, 5*delta/4).
struct Partition {
    double delta = 0.0;
    double eps = 0.0;
    std::vector<std::size_t> centers;             // point index of each cell center
    std::vector<std::vector<std::size_t>> cells;  // disjoint, cover every point
    std::vector<std::size_t> cell_of;             // point index -> cell index

    std::size_t cell_count() const { return centers.size(); }
};

/// Cells i and j are neighbors when min over (x,y) in A_i x A_j of dist(x,y)
/// is strictly below delta. Ties at exactly delta do not count.
struct NeighborGraph {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // i < j, lexicographic
    std::vector<std::vector<std::size_t>> adj;               // sorted, per cell
    std::vector<std::size_t> degree;

    std::size_t max_degree() const;
};

/// Greedy center selection in input point order, then cell assignment by the
/// least index among the eps-near-minimizers of the distance to the centers.
/// eps defaults to delta/8; eps = 0 is allowed (finite spaces need no slack).
Partition build_partition(const Space& space, double delta);
Partition build_partition(const Space& space, double delta, double eps);

NeighborGraph neighbor_graph(const Space& space, const Partition& partition);
/// Reference single-thread implementation, kept for tests and benchmarks.
NeighborGraph neighbor_graph_serial(const Space& space, const Partition& partition);

/// Total mass per cell.
std::vector<double> cell_masses(const Space& space, const Partition& partition);

/// Verifies the structural bounds: neighbor centers within 4*delta, max
/// degree at most c_D^3 with c_D from the greedy covering estimator.
Report partition_diagnostics(const Space& space, const Partition& partition,
                             const NeighborGraph& graph);

/// Exhaustively re-checks every partition invariant (separation, membership
/// rule, containment radius, disjoint cover). Used by tests and audits.
Report check_partition_invariants(const Space& space, const Partition& partition);

nlohmann::json partition_to_json(const Space& space, const Partition& partition,
                                 const NeighborGraph& graph);

}  // namespace msob
