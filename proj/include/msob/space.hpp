#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "msob/errors.hpp"

namespace msob {

class Report;

/// One real value per point of a space.
struct ScalarField {
    std::vector<double> values;

    ScalarField() = default;
    explicit ScalarField(std::vector<double> v) : values(std::move(v)) {}
    ScalarField(std::size_t n, double fill) : values(n, fill) {}

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// Open metric ball: members are the points at distance strictly below
/// `radius` from the center (the center itself included, at distance 0).
struct Ball {
    std::size_t center = 0;
    double radius = 0.0;
    std::vector<std::size_t> members;
    double mass = 0.0;
};

struct GraphEdge {
    std::string a;
    std::string b;
    double length = 0.0;
};

/// How the distance table was produced; drives serialization.
enum class MetricKind { Euclidean, Graph, Table };

/// Finite metric measure space: named points, a symmetric distance, and a
/// nonnegative mass per point. Immutable after construction; all accessors
/// are safe for concurrent use.
class Space {
public:
    /// Above this size coordinate-backed spaces skip the dense distance
    /// table and answer dist() through the metric callback instead.
    static constexpr std::size_t kDenseLimit = 4096;

    Space() = default;

    std::size_t size() const { return mass_.size(); }
    const std::string& id(std::size_t i) const { return ids_[i]; }
    std::optional<std::size_t> index_of(const std::string& id) const;

    double mass(std::size_t i) const { return mass_[i]; }
    double total_mass() const { return total_mass_; }
    /// Indices of points with strictly positive mass.
    const std::vector<std::size_t>& support() const { return support_; }

    bool has_coords() const { return has_coords_; }
    const std::array<double, 2>& coord(std::size_t i) const { return coords_[i]; }

    double dist(std::size_t i, std::size_t j) const {
        if (!table_.empty()) return table_[i * n_ + j];
        return oracle_dist(i, j);
    }

    double diameter() const { return diameter_; }
    double min_positive_dist() const { return min_pos_dist_; }

    MetricKind metric_kind() const { return metric_kind_; }
    const std::vector<GraphEdge>& graph_edges() const { return edges_; }

    // -- construction ------------------------------------------------------

    /// Dense symmetric table, row-major n*n. Validates shape only; metric
    /// axioms are checked by validate_metric / load_space.
    static Space from_table(std::vector<std::string> ids, std::vector<double> masses,
                            std::vector<double> table);

    /// Euclidean metric from planar coordinates.
    static Space from_points(std::vector<std::string> ids, std::vector<double> masses,
                             std::vector<std::array<double, 2>> coords);

    /// Shortest-path metric over weighted undirected edges; unit masses are
    /// supplied by the caller. Throws DisconnectedGraphError when some pair
    /// is unreachable.
    static Space from_graph(std::vector<std::string> ids, std::vector<double> masses,
                            std::vector<GraphEdge> edges);

    /// Display coordinates for a table-backed space (the table stays the
    /// authoritative metric).
    void attach_coords(std::vector<std::array<double, 2>> coords);

private:
    void finalize_stats();
    double oracle_dist(std::size_t i, std::size_t j) const;
    const std::vector<double>& oracle_row(std::size_t i) const;

    std::size_t n_ = 0;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<double> mass_;
    std::vector<std::array<double, 2>> coords_;
    bool has_coords_ = false;

    std::vector<double> table_;
    // oracle mode (large coordinate-backed spaces): rows computed on demand
    struct RowCache {
        std::mutex mu;
        std::unordered_map<std::size_t, std::vector<double>> rows;
    };
    mutable std::unique_ptr<RowCache> cache_;

    std::vector<GraphEdge> edges_;
    MetricKind metric_kind_ = MetricKind::Table;

    double total_mass_ = 0.0;
    double diameter_ = 0.0;
    double min_pos_dist_ = 0.0;
    std::vector<std::size_t> support_;

    friend Space make_circle(std::size_t n);
};

// -- generators ------------------------------------------------------------

/// n equispaced points on [0,1], Euclidean distance, mass 1/n each.
Space make_interval(std::size_t n);

/// n x n lattice on [0,1]^2, Euclidean distance, mass 1/n^2 each.
Space make_grid2d(std::size_t n);

/// n points on a circle of unit circumference, arc-length metric.
Space make_circle(std::size_t n);

/// Vertices of the Koch curve prefractal at the given refinement level
/// (4^level segments), Euclidean distance, equal masses.
Space make_koch(int level);

/// Shortest-path space over the given nodes and weighted edges, unit masses.
Space make_graph(std::vector<std::string> node_ids, std::vector<GraphEdge> edges);

/// Parses generator specs of the form "interval:101", "grid2d:15",
/// "circle:64", "koch:5", "graph:<path>"; a bare path loads a space file.
Space make_space(const std::string& spec);

// -- queries ---------------------------------------------------------------

/// Open ball around `center`. Throws std::out_of_range on a bad index and
/// ConfigError when radius <= 0.
Ball ball_query(const Space& space, std::size_t center, double radius);

/// Checks symmetry, positivity and the triangle inequality. Exhaustive over
/// all triples for n <= 2000, deterministically sampled above. Violations are
/// report content, never exceptions.
Report validate_metric(const Space& space);

// -- persistence -----------------------------------------------------------

void save_space(const Space& space, const std::filesystem::path& path);

/// Parses a space file and validates the metric; throws ParseError or
/// MetricViolationError (naming the offending pair/triple).
Space load_space(const std::filesystem::path& path);

}  // namespace msob
