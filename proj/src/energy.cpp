#include "msob/energy.hpp"

#include <algorithm>
#include <cmath>

#include "msob/diagnostics.hpp"
#include "msob/par.hpp"
#include "msob/report.hpp"

namespace msob {

CellField project_cells(const Space& space, const Partition& partition, const ScalarField& u) {
    if (u.size() != space.size()) throw ConfigError("project_cells: field size mismatch");
    const std::size_t cells = partition.cell_count();
    CellField out(cells, 0.0);
    for (std::size_t c = 0; c < cells; ++c) {
        double mass = 0.0, sum = 0.0;
        for (std::size_t x : partition.cells[c]) {
            mass += space.mass(x);
            sum += space.mass(x) * u[x];
        }
        if (!(mass > 0.0))
            throw ZeroMassCellError("cell " + std::to_string(c) + " (center " +
                                    space.id(partition.centers[c]) + ") has zero mass");
        out[c] = sum / mass;
    }
    return out;
}

ScalarField unproject(const Partition& partition, const CellField& cf) {
    ScalarField out(partition.cell_of.size(), 0.0);
    for (std::size_t x = 0; x < partition.cell_of.size(); ++x) out[x] = cf[partition.cell_of[x]];
    return out;
}

CellField gradient_cells(const Partition& partition, const NeighborGraph& graph,
                         const CellField& means, double q) {
    if (!(q > 1.0)) throw ConfigError("gradient_cells: q must exceed 1");
    const std::size_t cells = partition.cell_count();
    CellField out(cells, 0.0);
    par::parallel_for(cells, [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j : graph.adj[i]) acc += std::pow(std::abs(means[i] - means[j]), q);
        out[i] = std::pow(acc, 1.0 / q) / partition.delta;
    });
    return out;
}

CellField discrete_gradient_field(const Space& space, const Partition& partition,
                                  const NeighborGraph& graph, const ScalarField& u, double q) {
    return gradient_cells(partition, graph, project_cells(space, partition, u), q);
}

double energy_Fq_cells(const Partition& partition, const NeighborGraph& graph,
                       const CellField& means, double q, const std::vector<double>& cmass) {
    if (!(q > 1.0)) throw ConfigError("energy_Fq: q must exceed 1");
    const double dq = std::pow(partition.delta, q);
    double total = 0.0;
    for (std::size_t i = 0; i < partition.cell_count(); ++i) {
        double acc = 0.0;
        for (std::size_t j : graph.adj[i]) acc += std::pow(std::abs(means[i] - means[j]), q);
        total += cmass[i] * acc / dq;
    }
    return total;
}

double energy_Fq(const Space& space, const Partition& partition, const NeighborGraph& graph,
                 const ScalarField& u, double q) {
    return energy_Fq_cells(partition, graph, project_cells(space, partition, u), q,
                           cell_masses(space, partition));
}

double energy_sup(const Space& space, const Partition& partition, const NeighborGraph& graph,
                  const ScalarField& u, double q) {
    if (!(q > 1.0)) throw ConfigError("energy_sup: q must exceed 1");
    const CellField means = project_cells(space, partition, u);
    const std::vector<double> cmass = cell_masses(space, partition);
    double total = 0.0;
    for (std::size_t i = 0; i < partition.cell_count(); ++i) {
        double sup = 0.0;
        for (std::size_t j : graph.adj[i]) sup = std::max(sup, std::abs(means[i] - means[j]));
        total += cmass[i] * std::pow(sup / partition.delta, q);
    }
    return total;
}

double sobolev_norm_N(const Space& space, const Partition& partition, const NeighborGraph& graph,
                      const ScalarField& u, double q) {
    const CellField means = project_cells(space, partition, u);
    const std::vector<double> cmass = cell_masses(space, partition);
    double lq = 0.0;
    for (std::size_t i = 0; i < partition.cell_count(); ++i)
        lq += cmass[i] * std::pow(std::abs(means[i]), q);
    return std::pow(lq + energy_Fq_cells(partition, graph, means, q, cmass), 1.0 / q);
}

std::vector<double> phi_embedding(const Space& space, const Partition& partition,
                                  const NeighborGraph& graph, const ScalarField& u, double q) {
    const CellField means = project_cells(space, partition, u);
    const std::vector<double> cmass = cell_masses(space, partition);
    std::vector<double> out;
    out.reserve(partition.cell_count() + 2 * graph.pairs.size());
    for (std::size_t i = 0; i < partition.cell_count(); ++i)
        out.push_back(std::pow(cmass[i], 1.0 / q) * means[i]);
    for (std::size_t i = 0; i < partition.cell_count(); ++i)
        for (std::size_t j : graph.adj[i])
            out.push_back(std::pow(cmass[i], 1.0 / q) * (means[i] - means[j]) / partition.delta);
    return out;
}

namespace {

double norm_from_parts(const Space& space, const Partition& partition, const NeighborGraph& graph,
                       const CellField& means, const std::vector<double>& cmass, double q) {
    double lq = 0.0;
    for (std::size_t i = 0; i < partition.cell_count(); ++i)
        lq += cmass[i] * std::pow(std::abs(means[i]), q);
    return std::pow(lq + energy_Fq_cells(partition, graph, means, q, cmass), 1.0 / q);
}

CellField combine(const CellField& a, const CellField& b, double ca, double cb) {
    CellField out(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = ca * a[i] + cb * b[i];
    return out;
}

}  // namespace

ClarksonResult clarkson_residual(const Space& space, const Partition& partition,
                                 const NeighborGraph& graph, const ScalarField& u,
                                 const ScalarField& v, double q) {
    if (!(q > 1.0)) throw ConfigError("clarkson_residual: q must exceed 1");
    const CellField mu = project_cells(space, partition, u);
    const CellField mv = project_cells(space, partition, v);
    const std::vector<double> cmass = cell_masses(space, partition);

    const CellField mid = combine(mu, mv, 0.5, 0.5);
    const CellField half_diff = combine(mu, mv, 0.5, -0.5);

    const double nu = norm_from_parts(space, partition, graph, mu, cmass, q);
    const double nv = norm_from_parts(space, partition, graph, mv, cmass, q);
    const double nmid = norm_from_parts(space, partition, graph, mid, cmass, q);
    const double nhd = norm_from_parts(space, partition, graph, half_diff, cmass, q);

    ClarksonResult res;
    if (q >= 2.0) {
        const double rhs = 0.5 * (std::pow(nu, q) + std::pow(nv, q));
        const double lhs = std::pow(nmid, q) + std::pow(nhd, q);
        res.inequality_residual = rhs - lhs;
        res.scale = std::pow(nu, q) + std::pow(nv, q);
    } else {
        const double p = q / (q - 1.0);
        const double rhs =
            std::pow(0.5 * std::pow(nu, q) + 0.5 * std::pow(nv, q), 1.0 / (q - 1.0));
        const double lhs = std::pow(nmid, p) + std::pow(nhd, p);
        res.inequality_residual = rhs - lhs;
        res.scale = std::max(std::abs(rhs), std::abs(lhs));
    }
    if (q == 2.0) {
        const CellField sum = combine(mu, mv, 1.0, 1.0);
        const CellField diff = combine(mu, mv, 1.0, -1.0);
        const double f_sum = energy_Fq_cells(partition, graph, sum, 2.0, cmass);
        const double f_diff = energy_Fq_cells(partition, graph, diff, 2.0, cmass);
        const double f_u = energy_Fq_cells(partition, graph, mu, 2.0, cmass);
        const double f_v = energy_Fq_cells(partition, graph, mv, 2.0, cmass);
        res.identity_residual = f_sum + f_diff - 2.0 * (f_u + f_v);
        res.identity_scale = f_sum + f_diff + 2.0 * (f_u + f_v);
    }
    return res;
}

double convexity_modulus(double r, double q) {
    if (q >= 2.0) return 1.0 - std::pow(1.0 - std::pow(r, q) / std::pow(2.0, q), 1.0 / q);
    const double p = q / (q - 1.0);
    return 1.0 - std::pow(1.0 - std::pow(r / 2.0, p), 1.0 / p);
}

EnergyLadder energy_ladder(const Space& space, const ScalarField& u, double q,
                           const std::vector<double>& deltas, std::optional<double> reference) {
    if (deltas.empty()) throw ConfigError("energy_ladder: empty delta list");
    for (std::size_t k = 1; k < deltas.size(); ++k)
        if (!(deltas[k] < deltas[k - 1]))
            throw ConfigError("energy_ladder: deltas must be strictly decreasing");

    EnergyLadder ladder;
    ladder.reference_energy = reference;
    const double resolution = space.min_positive_dist();

    const DoublingReport doubling = doubling_constants(space, ProbeGrid::defaults(space));
    ladder.c_D_metric = doubling.c_D_metric;
    ladder.sandwich_lower = 0.9 * std::pow(4.0, -q);
    ladder.sandwich_upper =
        1.1 * std::pow(6.0, q) * std::pow(static_cast<double>(doubling.c_D_metric), 3.0);

    for (double delta : deltas) {
        if (!(delta > resolution))
            ladder.warnings.push_back("delta " + format_double(delta) +
                                      " at or below sample resolution " +
                                      format_double(resolution));
        const Partition part = build_partition(space, delta);
        const NeighborGraph graph = neighbor_graph(space, part);
        const double energy = energy_Fq(space, part, graph, u, q);
        ladder.deltas.push_back(delta);
        ladder.energies.push_back(energy);
        std::size_t isolated = 0;
        for (std::size_t d : graph.degree)
            if (d == 0) ++isolated;
        ladder.isolated_fraction.push_back(part.cell_count() > 0
                                               ? double(isolated) / double(part.cell_count())
                                               : 0.0);
        if (reference && *reference > 0.0) {
            const double ratio = energy / *reference;
            ladder.ratios.push_back(ratio);
            if (ratio < ladder.sandwich_lower || ratio > ladder.sandwich_upper)
                ladder.sandwich_ok = false;
        }
    }
    return ladder;
}

void ladder_to_csv(const EnergyLadder& ladder, const std::filesystem::path& path) {
    std::string out = "delta,F,ratio,isolated_cell_fraction\n";
    for (std::size_t k = 0; k < ladder.deltas.size(); ++k) {
        out += format_double(ladder.deltas[k]);
        out += ',';
        out += format_double(ladder.energies[k]);
        out += ',';
        out += k < ladder.ratios.size() ? format_double(ladder.ratios[k]) : "";
        out += ',';
        out += format_double(ladder.isolated_fraction[k]);
        out += '\n';
    }
    write_text_file(out, path);
}

}  // namespace msob
