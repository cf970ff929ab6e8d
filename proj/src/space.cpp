#include "msob/space.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "msob/par.hpp"
#include "msob/report.hpp"

namespace msob {

namespace {

double euclid(const std::array<double, 2>& a, const std::array<double, 2>& b) {
    return std::hypot(a[0] - b[0], a[1] - b[1]);
}

std::vector<std::string> numbered_ids(std::size_t n) {
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
    return ids;
}

}  // namespace

void Space::attach_coords(std::vector<std::array<double, 2>> coords) {
    if (coords.size() != n_) throw ConfigError("attach_coords: wrong size");
    coords_ = std::move(coords);
    has_coords_ = true;
}

std::optional<std::size_t> Space::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double Space::oracle_dist(std::size_t i, std::size_t j) const {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->rows.find(i);
    if (it == cache_->rows.end()) {
        std::vector<double> row(n_);
        for (std::size_t k = 0; k < n_; ++k) row[k] = euclid(coords_[i], coords_[k]);
        it = cache_->rows.emplace(i, std::move(row)).first;
    }
    return it->second[j];
}

void Space::finalize_stats() {
    n_ = mass_.size();
    index_.clear();
    for (std::size_t i = 0; i < n_; ++i) {
        if (!index_.emplace(ids_[i], i).second)
            throw ParseError("duplicate point id: " + ids_[i]);
    }
    total_mass_ = 0.0;
    support_.clear();
    for (std::size_t i = 0; i < n_; ++i) {
        if (mass_[i] < 0.0)
            throw ConfigError("negative mass at point " + ids_[i]);
        total_mass_ += mass_[i];
        if (mass_[i] > 0.0) support_.push_back(i);
    }
    double diam = 0.0;
    double minpos = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t j = i + 1; j < n_; ++j) {
            const double d =
                table_.empty() ? euclid(coords_[i], coords_[j]) : table_[i * n_ + j];
            diam = std::max(diam, d);
            if (d > 0.0) minpos = std::min(minpos, d);
        }
    }
    diameter_ = diam;
    min_pos_dist_ = std::isfinite(minpos) ? minpos : 0.0;
}

Space Space::from_table(std::vector<std::string> ids, std::vector<double> masses,
                        std::vector<double> table) {
    const std::size_t n = ids.size();
    if (masses.size() != n || table.size() != n * n)
        throw ConfigError("from_table: inconsistent sizes");
    Space s;
    s.ids_ = std::move(ids);
    s.mass_ = std::move(masses);
    s.table_ = std::move(table);
    s.metric_kind_ = MetricKind::Table;
    s.finalize_stats();
    return s;
}

Space Space::from_points(std::vector<std::string> ids, std::vector<double> masses,
                         std::vector<std::array<double, 2>> coords) {
    const std::size_t n = ids.size();
    if (masses.size() != n || coords.size() != n)
        throw ConfigError("from_points: inconsistent sizes");
    Space s;
    s.ids_ = std::move(ids);
    s.mass_ = std::move(masses);
    s.coords_ = std::move(coords);
    s.has_coords_ = true;
    s.metric_kind_ = MetricKind::Euclidean;
    if (n <= kDenseLimit) {
        s.table_.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double d = euclid(s.coords_[i], s.coords_[j]);
                s.table_[i * n + j] = d;
                s.table_[j * n + i] = d;
            }
    } else {
        s.cache_ = std::make_unique<RowCache>();
    }
    s.finalize_stats();
    return s;
}

Space Space::from_graph(std::vector<std::string> ids, std::vector<double> masses,
                        std::vector<GraphEdge> edges) {
    const std::size_t n = ids.size();
    if (masses.size() != n) throw ConfigError("from_graph: inconsistent sizes");
    Space s;
    s.ids_ = std::move(ids);
    s.mass_ = std::move(masses);
    s.metric_kind_ = MetricKind::Graph;
    s.index_.clear();
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.index_.emplace(s.ids_[i], i).second)
            throw ParseError("duplicate point id: " + s.ids_[i]);
    }

    std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
    for (const auto& e : edges) {
        auto ia = s.index_.find(e.a);
        auto ib = s.index_.find(e.b);
        if (ia == s.index_.end() || ib == s.index_.end())
            throw ParseError("edge references unknown node: " + e.a + "," + e.b);
        if (e.length <= 0.0) throw ConfigError("edge length must be positive");
        adj[ia->second].emplace_back(ib->second, e.length);
        adj[ib->second].emplace_back(ia->second, e.length);
    }
    s.edges_ = std::move(edges);

    const double inf = std::numeric_limits<double>::infinity();
    s.table_.assign(n * n, inf);
    // Dijkstra from every source; desk-scale graphs keep this cheap.
    std::atomic<bool> disconnected{false};
    par::parallel_for(n, [&](std::size_t src) {
        std::vector<double> d(n, inf);
        d[src] = 0.0;
        using Item = std::pair<double, std::size_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        heap.emplace(0.0, src);
        while (!heap.empty()) {
            auto [du, u] = heap.top();
            heap.pop();
            if (du > d[u]) continue;
            for (auto [v, w] : adj[u]) {
                if (du + w < d[v]) {
                    d[v] = du + w;
                    heap.emplace(d[v], v);
                }
            }
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(d[j])) disconnected.store(true, std::memory_order_relaxed);
            s.table_[src * n + j] = d[j];
        }
    });
    if (disconnected.load())
        throw DisconnectedGraphError("graph is disconnected; shortest-path metric undefined");
    // Symmetrize: per-source runs agree mathematically, enforce bitwise.
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) s.table_[j * n + i] = s.table_[i * n + j];
    s.finalize_stats();
    return s;
}

// -- generators --------------------------------------------------------------

Space make_interval(std::size_t n) {
    if (n < 2) throw ConfigError("interval: need n >= 2");
    std::vector<std::array<double, 2>> coords(n);
    for (std::size_t i = 0; i < n; ++i)
        coords[i] = {static_cast<double>(i) / static_cast<double>(n - 1), 0.0};
    return Space::from_points(numbered_ids(n), std::vector<double>(n, 1.0 / double(n)),
                              std::move(coords));
}

Space make_grid2d(std::size_t n) {
    if (n < 2) throw ConfigError("grid2d: need n >= 2");
    const std::size_t total = n * n;
    std::vector<std::array<double, 2>> coords(total);
    std::vector<std::string> ids(total);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t k = i * n + j;
            coords[k] = {static_cast<double>(i) / double(n - 1),
                         static_cast<double>(j) / double(n - 1)};
            ids[k] = std::to_string(i) + "_" + std::to_string(j);
        }
    }
    return Space::from_points(std::move(ids), std::vector<double>(total, 1.0 / double(total)),
                              std::move(coords));
}

Space make_circle(std::size_t n) {
    if (n < 2) throw ConfigError("circle: need n >= 2");
    Space s;
    s.ids_ = numbered_ids(n);
    s.mass_.assign(n, 1.0 / double(n));
    s.coords_.resize(n);
    const double radius = 1.0 / (2.0 * M_PI);
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = 2.0 * M_PI * double(i) / double(n);
        s.coords_[i] = {radius * std::cos(theta), radius * std::sin(theta)};
    }
    s.has_coords_ = true;
    s.metric_kind_ = MetricKind::Table;  // arc-length metric serializes as a table
    s.table_.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double frac = double(j - i) / double(n);
            const double d = std::min(frac, 1.0 - frac);
            s.table_[i * n + j] = d;
            s.table_[j * n + i] = d;
        }
    s.finalize_stats();
    return s;
}

Space make_koch(int level) {
    if (level < 0) throw ConfigError("koch: need level >= 0");
    std::vector<std::array<double, 2>> pts = {{0.0, 0.0}, {1.0, 0.0}};
    const double h = std::sqrt(3.0) / 2.0;
    for (int l = 0; l < level; ++l) {
        std::vector<std::array<double, 2>> next;
        next.reserve((pts.size() - 1) * 4 + 1);
        for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
            const auto& a = pts[k];
            const auto& b = pts[k + 1];
            const double dx = (b[0] - a[0]) / 3.0;
            const double dy = (b[1] - a[1]) / 3.0;
            const std::array<double, 2> p1 = {a[0] + dx, a[1] + dy};
            const std::array<double, 2> p3 = {a[0] + 2 * dx, a[1] + 2 * dy};
            // apex of the outward equilateral bump over the middle third
            const std::array<double, 2> p2 = {a[0] + 1.5 * dx - h * dy, a[1] + 1.5 * dy + h * dx};
            next.push_back(a);
            next.push_back(p1);
            next.push_back(p2);
            next.push_back(p3);
        }
        next.push_back(pts.back());
        pts = std::move(next);
    }
    const std::size_t n = pts.size();
    return Space::from_points(numbered_ids(n), std::vector<double>(n, 1.0 / double(n)),
                              std::move(pts));
}

Space make_graph(std::vector<std::string> node_ids, std::vector<GraphEdge> edges) {
    const std::size_t n = node_ids.size();
    if (n < 1) throw ConfigError("graph: need at least one node");
    return Space::from_graph(std::move(node_ids), std::vector<double>(n, 1.0), std::move(edges));
}

Space make_space(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto as_int = [&](const char* what) -> long {
        try {
            std::size_t used = 0;
            const long v = std::stol(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
            return v;
        } catch (...) {
            throw ParseError(std::string("bad ") + what + " parameter: '" + arg + "'");
        }
    };
    if (kind == "interval") return make_interval(static_cast<std::size_t>(as_int("interval")));
    if (kind == "grid2d") return make_grid2d(static_cast<std::size_t>(as_int("grid2d")));
    if (kind == "circle") return make_circle(static_cast<std::size_t>(as_int("circle")));
    if (kind == "koch") return make_koch(static_cast<int>(as_int("koch")));
    if (kind == "graph") return load_space(arg);
    if (std::filesystem::exists(spec)) return load_space(spec);
    throw ParseError("unknown space spec: '" + spec + "'");
}

// -- queries -----------------------------------------------------------------

Ball ball_query(const Space& space, std::size_t center, double radius) {
    if (center >= space.size()) throw std::out_of_range("ball_query: unknown point index");
    if (!(radius > 0.0)) throw ConfigError("ball_query: radius must be positive");
    Ball b;
    b.center = center;
    b.radius = radius;
    for (std::size_t j = 0; j < space.size(); ++j) {
        if (space.dist(center, j) < radius) {
            b.members.push_back(j);
            b.mass += space.mass(j);
        }
    }
    return b;
}

Report validate_metric(const Space& space) {
    Report rep("validate_metric");
    const std::size_t n = space.size();
    std::vector<std::string> violations;

    std::size_t diag_bad = 0, sym_bad = 0, pos_bad = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (space.dist(i, i) != 0.0) {
            ++diag_bad;
            if (violations.size() < 16)
                violations.push_back("dist(" + space.id(i) + "," + space.id(i) + ") != 0");
        }
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dij = space.dist(i, j);
            const double dji = space.dist(j, i);
            if (dij != dji) {
                ++sym_bad;
                if (violations.size() < 16)
                    violations.push_back("asymmetry at (" + space.id(i) + "," + space.id(j) + ")");
            }
            if (!(dij > 0.0) || !std::isfinite(dij)) {
                ++pos_bad;
                if (violations.size() < 16)
                    violations.push_back("nonpositive dist(" + space.id(i) + "," + space.id(j) + ")");
            }
        }
    }

    // Triangle inequality: exhaustive at desk scale, sampled above. Exact
    // equality cases (collinear points, arcs) sit one ulp either way, so the
    // comparison carries a relative slack far below any real violation.
    std::atomic<std::size_t> tri_bad{0};
    std::mutex viol_mu;
    auto triangle_broken = [&space](std::size_t i, std::size_t j, std::size_t k) {
        const double dij = space.dist(i, j);
        const double detour = space.dist(i, k) + space.dist(k, j);
        return dij > detour + 1e-12 * (dij + detour);
    };
    auto record_triple = [&](std::size_t i, std::size_t j, std::size_t k) {
        tri_bad.fetch_add(1, std::memory_order_relaxed);
        std::lock_guard<std::mutex> lock(viol_mu);
        if (violations.size() < 16)
            violations.push_back("triangle violated at (" + space.id(i) + "," + space.id(j) + "," +
                                 space.id(k) + ")");
    };
    const bool exhaustive = n <= 2000;
    if (exhaustive) {
        par::parallel_for(n, [&](std::size_t i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                for (std::size_t k = 0; k < n; ++k) {
                    if (triangle_broken(i, j, k)) {
                        record_triple(i, j, k);
                        break;  // one witness per pair is enough
                    }
                }
            }
        });
    } else {
        const std::size_t samples = 20'000'000;
        par::parallel_for(samples, [&](std::size_t s) {
            // splitmix64 stream; fixed seed keeps reports reproducible
            std::uint64_t z = (0x9E3779B97F4A7C15ull * (s + 1)) ^ 0xBF58476D1CE4E5B9ull;
            auto next = [&z]() {
                z += 0x9E3779B97F4A7C15ull;
                std::uint64_t x = z;
                x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
                x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
                return x ^ (x >> 31);
            };
            const std::size_t i = next() % n, j = next() % n, k = next() % n;
            if (i != j && j != k && i != k && triangle_broken(i, j, k)) record_triple(i, j, k);
        });
    }

    rep.set("n", n);
    rep.set("triangle_exhaustive", exhaustive);
    rep.check("diagonal_zero", diag_bad == 0, diag_bad ? std::to_string(diag_bad) + " bad" : "");
    rep.check("symmetry", sym_bad == 0, sym_bad ? std::to_string(sym_bad) + " bad" : "");
    rep.check("positivity", pos_bad == 0, pos_bad ? std::to_string(pos_bad) + " bad" : "");
    rep.check("triangle_inequality", tri_bad.load() == 0,
              tri_bad.load() ? std::to_string(tri_bad.load()) + " bad" : "");
    std::sort(violations.begin(), violations.end());
    for (std::size_t v = 0; v < violations.size(); ++v)
        rep.set("violation_" + std::to_string(v), violations[v]);
    return rep;
}

// -- persistence ---------------------------------------------------------------

void save_space(const Space& space, const std::filesystem::path& path) {
    nlohmann::json doc;
    auto& pts = doc["points"] = nlohmann::json::array();
    for (std::size_t i = 0; i < space.size(); ++i) {
        nlohmann::json p;
        p["id"] = space.id(i);
        p["mass"] = space.mass(i);
        if (space.has_coords()) p["coords"] = {space.coord(i)[0], space.coord(i)[1]};
        pts.push_back(std::move(p));
    }
    switch (space.metric_kind()) {
        case MetricKind::Euclidean:
            doc["metric"] = "euclidean";
            break;
        case MetricKind::Graph: {
            doc["metric"] = "graph";
            auto& edges = doc["edges"] = nlohmann::json::array();
            for (const auto& e : space.graph_edges())
                edges.push_back({e.a, e.b, e.length});
            break;
        }
        case MetricKind::Table: {
            const std::size_t n = space.size();
            nlohmann::json rows = nlohmann::json::array();
            for (std::size_t i = 0; i < n; ++i) {
                nlohmann::json row = nlohmann::json::array();
                for (std::size_t j = 0; j < n; ++j) row.push_back(space.dist(i, j));
                rows.push_back(std::move(row));
            }
            doc["metric"] = {{"table", std::move(rows)}};
            break;
        }
    }
    write_json_file(doc, path);
}

Space load_space(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open space file: " + path.string());
    nlohmann::json doc;
    try {
        is >> doc;
    } catch (const std::exception& e) {
        throw ParseError("malformed space file " + path.string() + ": " + e.what());
    }
    if (!doc.contains("points") || !doc["points"].is_array() || doc["points"].empty())
        throw ParseError("space file needs a nonempty 'points' array");

    std::vector<std::string> ids;
    std::vector<double> masses;
    std::vector<std::array<double, 2>> coords;
    bool any_coords = false;
    for (const auto& p : doc["points"]) {
        if (!p.contains("id") || !p.contains("mass"))
            throw ParseError("each point needs 'id' and 'mass'");
        ids.push_back(p["id"].get<std::string>());
        masses.push_back(p["mass"].get<double>());
        if (p.contains("coords")) {
            if (!p["coords"].is_array() || p["coords"].size() != 2)
                throw ParseError("coords must be [x,y]");
            coords.push_back({p["coords"][0].get<double>(), p["coords"][1].get<double>()});
            any_coords = true;
        } else {
            coords.push_back({0.0, 0.0});
        }
    }
    const std::size_t n = ids.size();
    if (!doc.contains("metric")) throw ParseError("space file needs 'metric'");

    Space space;
    const auto& metric = doc["metric"];
    if (metric.is_string() && metric.get<std::string>() == "euclidean") {
        if (!any_coords) throw ParseError("euclidean metric requires coords on every point");
        space = Space::from_points(std::move(ids), std::move(masses), std::move(coords));
    } else if (metric.is_string() && metric.get<std::string>() == "graph") {
        if (!doc.contains("edges") || !doc["edges"].is_array())
            throw ParseError("graph metric requires an 'edges' array");
        std::vector<GraphEdge> edges;
        for (const auto& e : doc["edges"]) {
            if (!e.is_array() || e.size() != 3) throw ParseError("edge must be [id,id,len]");
            edges.push_back({e[0].get<std::string>(), e[1].get<std::string>(), e[2].get<double>()});
        }
        space = Space::from_graph(std::move(ids), std::move(masses), std::move(edges));
    } else if (metric.is_object() && metric.contains("table")) {
        const auto& rows = metric["table"];
        if (!rows.is_array() || rows.size() != n)
            throw ParseError("table must have one row per point");
        std::vector<double> table(n * n);
        for (std::size_t i = 0; i < n; ++i) {
            if (!rows[i].is_array() || rows[i].size() != n)
                throw ParseError("table row " + std::to_string(i) + " has wrong length");
            for (std::size_t j = 0; j < n; ++j) table[i * n + j] = rows[i][j].get<double>();
        }
        space = Space::from_table(std::move(ids), std::move(masses), std::move(table));
        if (any_coords) space.attach_coords(std::move(coords));
    } else {
        throw ParseError("metric must be \"euclidean\", \"graph\" or {\"table\":[[...]]}");
    }

    Report rep = validate_metric(space);
    if (!rep.all_passed()) {
        std::string msg = "metric violation in " + path.string();
        for (auto it = rep.data()["values"].begin(); it != rep.data()["values"].end(); ++it) {
            if (it.key().rfind("violation_", 0) == 0)
                msg += "; " + it.value().get<std::string>();
        }
        throw MetricViolationError(msg);
    }
    return space;
}

}  // namespace msob
