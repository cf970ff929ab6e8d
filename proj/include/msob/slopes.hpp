#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "msob/partition.hpp"
#include "msob/space.hpp"

namespace msob {

struct Rng;

/// Vertex path through the space; segments carry the metric distance between
/// consecutive vertices.
struct DiscreteCurve {
    std::vector<std::size_t> vertices;
    std::vector<double> segment_lengths;
    double total_length = 0.0;
};

/// Builds a curve from a vertex list, rejecting repeated consecutive
/// vertices and unknown indices.
DiscreteCurve make_curve(const Space& space, std::vector<std::size_t> vertices);

struct SlopeField {
    std::vector<double> values;
    double radius = 0.0;
    std::vector<std::uint8_t> no_neighbor;  // 1 where B(x,r) holds no other point
    std::size_t no_neighbor_count = 0;
};

/// Finite-scale slope: max over y != x within distance r of
/// |f(y)-f(x)| / dist(x,y). Points with an empty punctured ball get 0.
SlopeField slope_estimate(const Space& space, const ScalarField& f, double r);

/// Finite-scale local Lipschitz constant: pairwise max of |f(y)-f(z)|/dist
/// over the open ball B(x,r). Dominates slope_estimate at the same radius
/// and never exceeds the global constant.
SlopeField asymptotic_lip_estimate(const Space& space, const ScalarField& f, double r);

/// Trapezoid integral of g along the curve minus |f(end) - f(start)|;
/// nonnegative iff g acts as an upper gradient of f on this curve.
double curve_upper_gradient_check(const Space& space, const ScalarField& f, const ScalarField& g,
                                  const DiscreteCurve& curve);

/// Verifies that 4x the cell gradient field controls increments of the cell
/// projection of u along every vertex sub-path longer than delta/2. Curves
/// no longer than delta/2 are skipped and counted.
Report discrete_wug_check(const Space& space, const Partition& partition,
                          const NeighborGraph& graph, const ScalarField& u,
                          const std::vector<DiscreteCurve>& curves, double q = 2.0);

// -- curve generators --------------------------------------------------------

/// Index-increasing paths between random endpoints of an interval space.
std::vector<DiscreteCurve> monotone_interval_curves(const Space& space, std::size_t count,
                                                    Rng& rng);

/// Coordinate-monotone lattice paths on a grid2d(n) space.
std::vector<DiscreteCurve> monotone_grid_curves(const Space& space, std::size_t grid_n,
                                                std::size_t count, Rng& rng);

/// Random walks over the cell adjacency, visiting cell centers.
std::vector<DiscreteCurve> neighbor_walk_curves(const Space& space, const Partition& partition,
                                                const NeighborGraph& graph, std::size_t count,
                                                std::size_t steps, Rng& rng);

/// Shortest paths between random endpoint pairs of a graph-metric space.
std::vector<DiscreteCurve> geodesic_curves(const Space& space, std::size_t count, Rng& rng);

/// {"curves":[[id,id,...],...]}
std::vector<DiscreteCurve> load_curves(const Space& space, const std::filesystem::path& path);

}  // namespace msob
