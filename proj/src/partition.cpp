#include "msob/partition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msob/diagnostics.hpp"
#include "msob/par.hpp"
#include "msob/report.hpp"

namespace msob {

std::size_t NeighborGraph::max_degree() const {
    std::size_t m = 0;
    for (std::size_t d : degree) m = std::max(m, d);
    return m;
}

Partition build_partition(const Space& space, double delta) {
    return build_partition(space, delta, delta / 8.0);
}

Partition build_partition(const Space& space, double delta, double eps) {
    if (!(delta > 0.0)) throw ConfigError("build_partition: delta must be positive");
    if (!(eps >= 0.0) || eps > delta / 8.0)
        throw ConfigError("build_partition: eps must lie in [0, delta/8]");
    const std::size_t n = space.size();

    Partition part;
    part.delta = delta;
    part.eps = eps;

    // Greedy center sweep in input order; a point is eligible while it
    // escapes the CLOSED delta-balls of all earlier centers.
    std::vector<char> blocked(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (blocked[i]) continue;
        part.centers.push_back(i);
        for (std::size_t j = 0; j < n; ++j)
            if (!blocked[j] && space.dist(i, j) <= delta) blocked[j] = 1;
    }

    const std::size_t cells = part.centers.size();
    part.cells.assign(cells, {});
    part.cell_of.assign(n, 0);

    // Dual assignment rule: among centers within eps of the best distance,
    // take the least center index.
    std::vector<std::size_t> assign(n);
    par::parallel_for(n, [&](std::size_t x) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < cells; ++c)
            best = std::min(best, space.dist(x, part.centers[c]));
        for (std::size_t c = 0; c < cells; ++c) {
            if (space.dist(x, part.centers[c]) <= best + eps) {
                assign[x] = c;
                break;
            }
        }
    });
    for (std::size_t x = 0; x < n; ++x) {
        part.cell_of[x] = assign[x];
        part.cells[assign[x]].push_back(x);
    }
    return part;
}

namespace {

// Exact set distance between two cells by full pair scan.
double cell_set_distance(const Space& space, const std::vector<std::size_t>& a,
                         const std::vector<std::size_t>& b) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t x : a)
        for (std::size_t y : b) best = std::min(best, space.dist(x, y));
    return best;
}

NeighborGraph build_graph_impl(const Space& space, const Partition& part, bool parallel) {
    const std::size_t cells = part.cell_count();
    NeighborGraph g;
    g.adj.assign(cells, {});
    g.degree.assign(cells, 0);

    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < cells; ++i)
        for (std::size_t j = i + 1; j < cells; ++j) {
            // Centers of neighboring cells sit within 3.5*delta of each
            // other, so farther pairs can be skipped without scanning.
            if (space.dist(part.centers[i], part.centers[j]) <= 3.5 * part.delta)
                candidates.emplace_back(i, j);
        }

    std::vector<char> is_pair(candidates.size(), 0);
    auto probe = [&](std::size_t k) {
        const auto [i, j] = candidates[k];
        is_pair[k] =
            cell_set_distance(space, part.cells[i], part.cells[j]) < part.delta ? 1 : 0;
    };
    if (parallel) {
        par::parallel_for(candidates.size(), probe);
    } else {
        for (std::size_t k = 0; k < candidates.size(); ++k) probe(k);
    }

    for (std::size_t k = 0; k < candidates.size(); ++k) {
        if (!is_pair[k]) continue;
        const auto [i, j] = candidates[k];
        g.pairs.emplace_back(i, j);
        g.adj[i].push_back(j);
        g.adj[j].push_back(i);
    }
    for (auto& list : g.adj) std::sort(list.begin(), list.end());
    for (std::size_t i = 0; i < cells; ++i) g.degree[i] = g.adj[i].size();
    return g;
}

}  // namespace

NeighborGraph neighbor_graph(const Space& space, const Partition& partition) {
    if (partition.cell_of.size() != space.size())
        throw ConfigError("neighbor_graph: partition does not match space");
    return build_graph_impl(space, partition, true);
}

NeighborGraph neighbor_graph_serial(const Space& space, const Partition& partition) {
    if (partition.cell_of.size() != space.size())
        throw ConfigError("neighbor_graph: partition does not match space");
    return build_graph_impl(space, partition, false);
}

std::vector<double> cell_masses(const Space& space, const Partition& partition) {
    std::vector<double> m(partition.cell_count(), 0.0);
    for (std::size_t x = 0; x < space.size(); ++x) m[partition.cell_of[x]] += space.mass(x);
    return m;
}

Report partition_diagnostics(const Space& space, const Partition& part,
                             const NeighborGraph& graph) {
    Report rep("partition_diagnostics");
    const double delta = part.delta;

    double max_center_dist = 0.0;
    for (const auto& [i, j] : graph.pairs)
        max_center_dist = std::max(max_center_dist, space.dist(part.centers[i], part.centers[j]));

    // Covering estimate probed at the exact radii the degree bound uses:
    // every point at 4d, 2d and d. The greedy cover composes across the
    // three halvings, so degree <= c^3 is a theorem for the estimate c.
    const std::size_t c_metric =
        covering_constant_at_scales(space, {4.0 * delta, 2.0 * delta, delta});
    const double bound = static_cast<double>(c_metric) * c_metric * c_metric;
    const std::size_t max_deg = graph.max_degree();

    rep.set("delta", delta);
    rep.set("cells", part.cell_count());
    rep.set("neighbor_pairs", graph.pairs.size());
    rep.set("max_center_pair_dist", max_center_dist);
    rep.set("max_degree", max_deg);
    rep.set("c_D_metric", c_metric);
    rep.set("degree_bound", bound);
    rep.check("neighbor_centers_within_4delta", max_center_dist <= 4.0 * delta + 0.0);
    rep.check("max_degree_le_cD_cubed", static_cast<double>(max_deg) <= bound);
    return rep;
}

Report check_partition_invariants(const Space& space, const Partition& part) {
    Report rep("partition_invariants");
    const std::size_t n = space.size();
    const std::size_t cells = part.cell_count();
    const double delta = part.delta;

    bool cover_ok = part.cell_of.size() == n && cells == part.cells.size();
    std::vector<std::size_t> seen(n, 0);
    for (std::size_t c = 0; c < cells && cover_ok; ++c)
        for (std::size_t x : part.cells[c]) {
            if (x >= n || part.cell_of[x] != c) cover_ok = false;
            else ++seen[x];
        }
    for (std::size_t x = 0; x < n; ++x)
        if (seen[x] != 1) cover_ok = false;
    rep.check("disjoint_cover", cover_ok);

    double min_center_sep = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < cells; ++a)
        for (std::size_t b = a + 1; b < cells; ++b)
            min_center_sep =
                std::min(min_center_sep, space.dist(part.centers[a], part.centers[b]));
    rep.set("min_center_separation", cells > 1 ? min_center_sep : 0.0);
    rep.check("center_separation_gt_delta", cells <= 1 || min_center_sep > delta);

    bool centers_in_cells = true;
    for (std::size_t c = 0; c < cells; ++c)
        if (part.cell_of[part.centers[c]] != c) centers_in_cells = false;
    rep.check("center_in_own_cell", centers_in_cells);

    double max_containment = 0.0;
    std::size_t third_rule_bad = 0;
    for (std::size_t x = 0; x < n; ++x) {
        max_containment = std::max(max_containment, space.dist(x, part.centers[part.cell_of[x]]));
        for (std::size_t c = 0; c < cells; ++c)
            if (space.dist(x, part.centers[c]) < delta / 3.0 && part.cell_of[x] != c)
                ++third_rule_bad;
    }
    rep.set("max_dist_to_own_center", max_containment);
    rep.check("containment_within_5delta_over_4", max_containment < 1.25 * delta);
    rep.check("third_radius_membership", third_rule_bad == 0,
              third_rule_bad ? std::to_string(third_rule_bad) + " bad" : "");
    return rep;
}

nlohmann::json partition_to_json(const Space& space, const Partition& part,
                                 const NeighborGraph& graph) {
    nlohmann::json doc;
    doc["delta"] = part.delta;
    doc["eps"] = part.eps;
    auto& cells = doc["cells"] = nlohmann::json::array();
    for (std::size_t c = 0; c < part.cell_count(); ++c) {
        nlohmann::json cell;
        cell["center"] = space.id(part.centers[c]);
        auto& members = cell["members"] = nlohmann::json::array();
        for (std::size_t x : part.cells[c]) members.push_back(space.id(x));
        cells.push_back(std::move(cell));
    }
    auto& nb = doc["neighbors"] = nlohmann::json::array();
    for (const auto& [i, j] : graph.pairs) nb.push_back({i, j});
    return doc;
}

}  // namespace msob
