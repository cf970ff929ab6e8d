#pragma once

#include <optional>
#include <vector>

#include "msob/partition.hpp"
#include "msob/space.hpp"

namespace msob {

/// One real value per cell of a partition.
struct CellField {
    std::vector<double> values;

    CellField() = default;
    explicit CellField(std::vector<double> v) : values(std::move(v)) {}
    CellField(std::size_t n, double fill) : values(n, fill) {}

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// Mass-weighted cell means of u; an L^q contraction for every q >= 1.
/// Throws ZeroMassCellError when some cell carries no mass.
CellField project_cells(const Space& space, const Partition& partition, const ScalarField& u);

/// Spreads a cell field back to a point field (constant on each cell).
ScalarField unproject(const Partition& partition, const CellField& cf);

/// Per-cell gradient magnitude at scale delta:
/// value(i) = [ delta^-q * sum over neighbor cells j of |u_i - u_j|^q ]^(1/q).
/// Stored as the q-th root so the field feeds both the energy (raise to q)
/// and the curve checker (linear use). Isolated cells get 0.
CellField gradient_cells(const Partition& partition, const NeighborGraph& graph,
                         const CellField& means, double q);
CellField discrete_gradient_field(const Space& space, const Partition& partition,
                                  const NeighborGraph& graph, const ScalarField& u, double q);

/// Energy sum_i m(A_i) * |grad|(i)^q. Constant shifts of u are null
/// directions and the functional is q-homogeneous.
double energy_Fq(const Space& space, const Partition& partition, const NeighborGraph& graph,
                 const ScalarField& u, double q);
double energy_Fq_cells(const Partition& partition, const NeighborGraph& graph,
                       const CellField& means, double q, const std::vector<double>& cmass);

/// Variant with the neighbor sup replacing the inner sum; never exceeds
/// energy_Fq.
double energy_sup(const Space& space, const Partition& partition, const NeighborGraph& graph,
                  const ScalarField& u, double q);

/// ( sum_i m(A_i)|u_i|^q + F_q(u) )^(1/q); positively 1-homogeneous.
double sobolev_norm_N(const Space& space, const Partition& partition, const NeighborGraph& graph,
                      const ScalarField& u, double q);

/// Linear embedding into a flat weighted sequence whose l^q norm equals
/// sobolev_norm_N. Entries: one per cell (m_i^(1/q) u_i), then one per
/// ordered neighbor pair (i,j) in lexicographic order with both orientations,
/// m_i^(1/q) (u_i - u_j) / delta.
std::vector<double> phi_embedding(const Space& space, const Partition& partition,
                                  const NeighborGraph& graph, const ScalarField& u, double q);

struct ClarksonResult {
    double inequality_residual = 0.0;  // RHS - LHS of the applicable inequality
    std::optional<double> identity_residual;  // q = 2 only
    double scale = 0.0;           // magnitude reference for the inequality
    double identity_scale = 0.0;  // magnitude reference for the identity
};

/// For q >= 2 the first Clarkson inequality on the embedded norm, for
/// q in (1,2) the second one with dual exponent p = q/(q-1); at q = 2 the
/// parallelogram identity residual of the energy seminorm is also returned.
ClarksonResult clarkson_residual(const Space& space, const Partition& partition,
                                 const NeighborGraph& graph, const ScalarField& u,
                                 const ScalarField& v, double q);

/// Uniform convexity modulus of the embedded norm.
double convexity_modulus(double r, double q);

struct EnergyLadder {
    std::vector<double> deltas;
    std::vector<double> energies;
    std::vector<double> ratios;             // energy / reference (when known)
    std::vector<double> isolated_fraction;  // cells with no neighbors
    std::optional<double> reference_energy;
    double sandwich_lower = 0.0;  // 0.9 * 4^-q
    double sandwich_upper = 0.0;  // 1.1 * 6^q * c_D^3
    std::size_t c_D_metric = 1;
    bool sandwich_ok = true;
    std::vector<std::string> warnings;
};

/// Rebuilds partition and graph per delta and records the energy of u; with
/// a reference energy the ratio is checked against the sandwich bracket with
/// 10% slack. Deltas at or below the sample resolution downgrade to warnings.
EnergyLadder energy_ladder(const Space& space, const ScalarField& u, double q,
                           const std::vector<double>& deltas, std::optional<double> reference);

void ladder_to_csv(const EnergyLadder& ladder, const std::filesystem::path& path);

}  // namespace msob
