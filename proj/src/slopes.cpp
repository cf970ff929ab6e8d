#include "msob/slopes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

#include <json.hpp>

#include "msob/energy.hpp"
#include "msob/fields.hpp"
#include "msob/par.hpp"
#include "msob/report.hpp"

namespace msob {

DiscreteCurve make_curve(const Space& space, std::vector<std::size_t> vertices) {
    if (vertices.empty()) throw ConfigError("make_curve: empty vertex list");
    DiscreteCurve c;
    for (std::size_t v : vertices)
        if (v >= space.size()) throw std::out_of_range("make_curve: unknown point index");
    for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
        if (vertices[k] == vertices[k + 1])
            throw ConfigError("make_curve: repeated consecutive vertex");
        const double len = space.dist(vertices[k], vertices[k + 1]);
        c.segment_lengths.push_back(len);
        c.total_length += len;
    }
    c.vertices = std::move(vertices);
    return c;
}

SlopeField slope_estimate(const Space& space, const ScalarField& f, double r) {
    if (!(r > 0.0)) throw ConfigError("slope_estimate: radius must be positive");
    if (f.size() != space.size()) throw ConfigError("slope_estimate: field size mismatch");
    const std::size_t n = space.size();
    SlopeField out;
    out.radius = r;
    out.values.assign(n, 0.0);
    out.no_neighbor.assign(n, 0);
    par::parallel_for(n, [&](std::size_t x) {
        double best = 0.0;
        bool any = false;
        for (std::size_t y = 0; y < n; ++y) {
            if (y == x) continue;
            const double d = space.dist(x, y);
            if (d < r && d > 0.0) {
                any = true;
                best = std::max(best, std::abs(f[y] - f[x]) / d);
            }
        }
        out.values[x] = best;
        out.no_neighbor[x] = any ? 0 : 1;
    });
    for (auto flag : out.no_neighbor) out.no_neighbor_count += flag;
    return out;
}

SlopeField asymptotic_lip_estimate(const Space& space, const ScalarField& f, double r) {
    if (!(r > 0.0)) throw ConfigError("asymptotic_lip_estimate: radius must be positive");
    if (f.size() != space.size()) throw ConfigError("asymptotic_lip_estimate: field size mismatch");
    const std::size_t n = space.size();
    SlopeField out;
    out.radius = r;
    out.values.assign(n, 0.0);
    out.no_neighbor.assign(n, 0);
    par::parallel_for(n, [&](std::size_t x) {
        std::vector<std::size_t> ball;
        for (std::size_t y = 0; y < n; ++y)
            if (space.dist(x, y) < r) ball.push_back(y);
        double best = 0.0;
        for (std::size_t a = 0; a < ball.size(); ++a)
            for (std::size_t b = a + 1; b < ball.size(); ++b) {
                const double d = space.dist(ball[a], ball[b]);
                if (d > 0.0) best = std::max(best, std::abs(f[ball[a]] - f[ball[b]]) / d);
            }
        out.values[x] = best;
        out.no_neighbor[x] = ball.size() >= 2 ? 0 : 1;
    });
    for (auto flag : out.no_neighbor) out.no_neighbor_count += flag;
    return out;
}

double curve_upper_gradient_check(const Space& space, const ScalarField& f, const ScalarField& g,
                                  const DiscreteCurve& curve) {
    if (f.size() != space.size() || g.size() != space.size())
        throw ConfigError("curve_upper_gradient_check: field size mismatch");
    if (curve.vertices.size() < 2) return 0.0;  // single vertex: no increment
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < curve.vertices.size(); ++k)
        integral += 0.5 * (g[curve.vertices[k]] + g[curve.vertices[k + 1]]) *
                    curve.segment_lengths[k];
    const double increment = std::abs(f[curve.vertices.back()] - f[curve.vertices.front()]);
    return integral - increment;
}

Report discrete_wug_check(const Space& space, const Partition& partition,
                          const NeighborGraph& graph, const ScalarField& u,
                          const std::vector<DiscreteCurve>& curves, double q) {
    Report rep("discrete_wug_check");
    const double delta = partition.delta;
    const CellField means = project_cells(space, partition, u);
    const CellField grad = gradient_cells(partition, graph, means, q);

    std::size_t skipped = 0;
    std::size_t tested_intervals = 0;
    std::size_t violations = 0;
    double min_residual = std::numeric_limits<double>::infinity();

    std::vector<double> per_curve_worst(curves.size(),
                                        std::numeric_limits<double>::infinity());
    std::vector<std::uint8_t> short_curve(curves.size(), 0);
    std::vector<std::size_t> curve_tested(curves.size(), 0);

    par::parallel_for(curves.size(), [&](std::size_t ci) {
        const DiscreteCurve& c = curves[ci];
        if (!(c.total_length > delta / 2.0)) {
            short_curve[ci] = 1;
            return;
        }
        const std::size_t K = c.vertices.size();
        std::vector<double> len_pref(K, 0.0);
        std::vector<double> int_pref(K, 0.0);  // trapezoid integral of the gradient field
        for (std::size_t k = 0; k + 1 < K; ++k) {
            const std::size_t a = c.vertices[k], b = c.vertices[k + 1];
            len_pref[k + 1] = len_pref[k] + c.segment_lengths[k];
            int_pref[k + 1] =
                int_pref[k] + 0.5 *
                                  (grad[partition.cell_of[a]] + grad[partition.cell_of[b]]) *
                                  c.segment_lengths[k];
        }
        double worst = std::numeric_limits<double>::infinity();
        std::size_t tested = 0;
        for (std::size_t a = 0; a < K; ++a) {
            const double pa = means[partition.cell_of[c.vertices[a]]];
            for (std::size_t b = a + 1; b < K; ++b) {
                if (!(len_pref[b] - len_pref[a] > delta / 2.0)) continue;
                const double increment =
                    std::abs(means[partition.cell_of[c.vertices[b]]] - pa);
                const double residual = 4.0 * (int_pref[b] - int_pref[a]) - increment;
                worst = std::min(worst, residual);
                ++tested;
            }
        }
        per_curve_worst[ci] = worst;
        curve_tested[ci] = tested;
    });

    for (std::size_t ci = 0; ci < curves.size(); ++ci) {
        if (short_curve[ci]) {
            ++skipped;
            continue;
        }
        tested_intervals += curve_tested[ci];
        if (curve_tested[ci] > 0) {
            min_residual = std::min(min_residual, per_curve_worst[ci]);
            if (per_curve_worst[ci] < -1e-12) ++violations;
        }
    }

    rep.set("delta", delta);
    rep.set("curves", curves.size());
    rep.set("skipped_short", skipped);
    rep.set("tested_subintervals", tested_intervals);
    rep.set("min_residual",
            std::isfinite(min_residual) ? min_residual : 0.0);
    rep.set("violating_curves", violations);
    rep.check("upper_gradient_inequality", violations == 0);
    return rep;
}

// -- curve generators ----------------------------------------------------------

std::vector<DiscreteCurve> monotone_interval_curves(const Space& space, std::size_t count,
                                                    Rng& rng) {
    const std::size_t n = space.size();
    if (n < 2) throw ConfigError("monotone_interval_curves: space too small");
    std::vector<DiscreteCurve> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t a = rng.below(n), b = rng.below(n);
        if (a == b) b = (a + 1) % n;
        if (a > b) std::swap(a, b);
        std::vector<std::size_t> verts;
        for (std::size_t v = a; v <= b; ++v) verts.push_back(v);
        out.push_back(make_curve(space, std::move(verts)));
    }
    return out;
}

std::vector<DiscreteCurve> monotone_grid_curves(const Space& space, std::size_t grid_n,
                                                std::size_t count, Rng& rng) {
    if (grid_n * grid_n != space.size())
        throw ConfigError("monotone_grid_curves: space is not grid2d(n)");
    std::vector<DiscreteCurve> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t i0 = rng.below(grid_n), j0 = rng.below(grid_n);
        std::size_t i1 = rng.below(grid_n), j1 = rng.below(grid_n);
        if (i0 > i1) std::swap(i0, i1);
        if (j0 > j1) std::swap(j0, j1);
        if (i0 == i1 && j0 == j1) {
            if (j1 + 1 < grid_n) ++j1;
            else --j0;
        }
        std::vector<std::size_t> verts;
        std::size_t i = i0, j = j0;
        verts.push_back(i * grid_n + j);
        while (i < i1 || j < j1) {
            const bool step_i = (j == j1) || (i < i1 && rng.below(2) == 0);
            if (step_i) ++i;
            else ++j;
            verts.push_back(i * grid_n + j);
        }
        out.push_back(make_curve(space, std::move(verts)));
    }
    return out;
}

std::vector<DiscreteCurve> neighbor_walk_curves(const Space& space, const Partition& partition,
                                                const NeighborGraph& graph, std::size_t count,
                                                std::size_t steps, Rng& rng) {
    std::vector<DiscreteCurve> out;
    out.reserve(count);
    const std::size_t cells = partition.cell_count();
    if (cells == 0) return out;
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t cell = rng.below(cells);
        std::vector<std::size_t> verts = {partition.centers[cell]};
        for (std::size_t s = 0; s < steps; ++s) {
            const auto& nb = graph.adj[cell];
            if (nb.empty()) break;
            cell = nb[rng.below(nb.size())];
            verts.push_back(partition.centers[cell]);
        }
        if (verts.size() >= 2) out.push_back(make_curve(space, std::move(verts)));
    }
    return out;
}

std::vector<DiscreteCurve> geodesic_curves(const Space& space, std::size_t count, Rng& rng) {
    if (space.metric_kind() != MetricKind::Graph)
        throw ConfigError("geodesic_curves: space does not carry a graph metric");
    const std::size_t n = space.size();
    // adjacency with edge lengths, rebuilt from the stored edges
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const auto& e : space.graph_edges()) {
        const auto a = space.index_of(e.a), b = space.index_of(e.b);
        adj[*a].emplace_back(*b, e.length);
        adj[*b].emplace_back(*a, e.length);
    }
    std::vector<DiscreteCurve> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t src = rng.below(n), dst = rng.below(n);
        if (src == dst) dst = (src + 1) % n;
        const double inf = std::numeric_limits<double>::infinity();
        std::vector<double> d(n, inf);
        std::vector<std::size_t> prev(n, n);
        d[src] = 0.0;
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.emplace(0.0, src);
        while (!heap.empty()) {
            auto [du, u] = heap.top();
            heap.pop();
            if (du > d[u]) continue;
            for (auto [v, w] : adj[u])
                if (du + w < d[v]) {
                    d[v] = du + w;
                    prev[v] = u;
                    heap.emplace(d[v], v);
                }
        }
        std::vector<std::size_t> verts;
        for (std::size_t v = dst; v != n; v = prev[v]) {
            verts.push_back(v);
            if (v == src) break;
        }
        std::reverse(verts.begin(), verts.end());
        if (verts.size() >= 2 && verts.front() == src)
            out.push_back(make_curve(space, std::move(verts)));
    }
    return out;
}

std::vector<DiscreteCurve> load_curves(const Space& space, const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open curve file: " + path.string());
    nlohmann::json doc;
    try {
        is >> doc;
    } catch (const std::exception& e) {
        throw ParseError("malformed curve file: " + std::string(e.what()));
    }
    if (!doc.contains("curves") || !doc["curves"].is_array())
        throw ParseError("curve file needs a 'curves' array");
    std::vector<DiscreteCurve> out;
    for (const auto& entry : doc["curves"]) {
        std::vector<std::size_t> verts;
        for (const auto& idv : entry) {
            const auto idx = space.index_of(idv.get<std::string>());
            if (!idx) throw ParseError("curve references unknown point " + idv.get<std::string>());
            verts.push_back(*idx);
        }
        out.push_back(make_curve(space, std::move(verts)));
    }
    return out;
}

}  // namespace msob
