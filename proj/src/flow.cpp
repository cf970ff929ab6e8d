#include "msob/flow.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "msob/report.hpp"

namespace msob {

void FlowConfig::validate() const {
    if (!(tau > 0.0)) throw ConfigError("flow: tau must be positive");
    if (!(q > 1.0)) throw ConfigError("flow: q must exceed 1");
    if (steps < 1) throw ConfigError("flow: steps must be >= 1");
    if (!(solver_tol > 0.0)) throw ConfigError("flow: solver_tol must be positive");
    if (max_inner_iterations < 1) throw ConfigError("flow: max_inner_iterations must be >= 1");
}

namespace {

double objective(const Partition& part, const NeighborGraph& graph, const CellField& g,
                 const CellField& f, const std::vector<double>& cmass, const FlowConfig& cfg) {
    const double energy = energy_Fq_cells(part, graph, g, cfg.q, cmass);
    double fid = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        fid += cmass[i] * (g[i] - f[i]) * (g[i] - f[i]);
    return energy / cfg.q + fid / (2.0 * cfg.tau);
}

std::vector<double> objective_gradient(const Partition& part, const NeighborGraph& graph,
                                       const CellField& g, const CellField& f,
                                       const std::vector<double>& cmass, const FlowConfig& cfg) {
    const std::size_t cells = part.cell_count();
    const double dq = std::pow(part.delta, cfg.q);
    std::vector<double> grad(cells, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
        double acc = 0.0;
        for (std::size_t j : graph.adj[i]) {
            const double diff = g[i] - g[j];
            acc += (cmass[i] + cmass[j]) * std::pow(std::abs(diff), cfg.q - 1.0) *
                   (diff > 0.0 ? 1.0 : diff < 0.0 ? -1.0 : 0.0);
        }
        grad[i] = acc / dq + cmass[i] * (g[i] - f[i]) / cfg.tau;
    }
    return grad;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Solves [ w-weighted Laplacian / delta^q + M / tau ] g = M f / tau.
CellField solve_weighted_quadratic(const Partition& part, const NeighborGraph& graph,
                                   const CellField& f, const std::vector<double>& cmass,
                                   const FlowConfig& cfg,
                                   const std::vector<std::vector<double>>& weights) {
    const std::size_t cells = part.cell_count();
    const double dq = std::pow(part.delta, cfg.q);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(cells, cells);
    Eigen::VectorXd b(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        double diag = cmass[i] / cfg.tau;
        for (std::size_t k = 0; k < graph.adj[i].size(); ++k) {
            const std::size_t j = graph.adj[i][k];
            const double w = (cmass[i] + cmass[j]) * weights[i][k] / dq;
            diag += w;
            A(i, j) -= w;
        }
        A(i, i) += diag;
        b(i) = cmass[i] * f[i] / cfg.tau;
    }
    const Eigen::VectorXd sol = A.ldlt().solve(b);
    CellField g(cells, 0.0);
    for (std::size_t i = 0; i < cells; ++i) g[i] = sol(i);
    return g;
}

}  // namespace

CellField implicit_euler_step(const Space& space, const Partition& partition,
                              const NeighborGraph& graph, const CellField& f,
                              const FlowConfig& config) {
    config.validate();
    if (f.size() != partition.cell_count())
        throw ConfigError("implicit_euler_step: cell field size mismatch");
    const std::vector<double> cmass = cell_masses(space, partition);
    for (std::size_t i = 0; i < cmass.size(); ++i)
        if (!(cmass[i] > 0.0))
            throw ZeroMassCellError("cell " + std::to_string(i) + " has zero mass");
    const std::size_t cells = partition.cell_count();

    if (config.q == 2.0) {
        // quadratic objective: the optimality system is linear, solve once
        std::vector<std::vector<double>> unit(cells);
        for (std::size_t i = 0; i < cells; ++i) unit[i].assign(graph.adj[i].size(), 1.0);
        return solve_weighted_quadratic(partition, graph, f, cmass, config, unit);
    }

    // Damped iteratively reweighted quadratic minimization. Weights
    // (diff^2 + mu^2)^((q-2)/2) reproduce the true curvature away from ties;
    // for q < 2 the smoothing mu starts coarse and is sharpened whenever the
    // model stops making progress, keeping the systems well conditioned.
    double scale = 1.0;
    for (std::size_t i = 0; i < cells; ++i) scale = std::max(scale, std::abs(f[i]));
    const double mu_floor = 1e-14 * scale;
    double mu = config.q < 2.0 ? 1e-2 * scale : 0.0;

    CellField g = f;
    double obj = objective(partition, graph, g, f, cmass, config);
    double gnorm = norm2(objective_gradient(partition, graph, g, f, cmass, config));
    for (std::size_t it = 0; it < config.max_inner_iterations; ++it) {
        if (gnorm <= config.solver_tol) return g;

        std::vector<std::vector<double>> weights(cells);
        for (std::size_t i = 0; i < cells; ++i) {
            weights[i].resize(graph.adj[i].size());
            for (std::size_t k = 0; k < graph.adj[i].size(); ++k) {
                const double diff = g[i] - g[graph.adj[i][k]];
                weights[i][k] = std::pow(diff * diff + mu * mu, (config.q - 2.0) / 2.0);
            }
        }
        const CellField target = solve_weighted_quadratic(partition, graph, f, cmass, config,
                                                          weights);
        // Step halving against the true objective; once decrements fall
        // below floating point resolution, a shrinking gradient norm counts
        // as progress too (the objective is strictly convex, so the model
        // steps cannot escape).
        double lambda = 1.0;
        bool moved = false;
        while (lambda > 1e-14) {
            CellField trial(cells, 0.0);
            for (std::size_t i = 0; i < cells; ++i)
                trial[i] = g[i] + lambda * (target[i] - g[i]);
            const double trial_obj = objective(partition, graph, trial, f, cmass, config);
            const double trial_gnorm =
                norm2(objective_gradient(partition, graph, trial, f, cmass, config));
            if (trial_obj < obj || (trial_obj <= obj && trial_gnorm < gnorm)) {
                g = std::move(trial);
                obj = trial_obj;
                gnorm = trial_gnorm;
                moved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (moved) {
            if (mu > mu_floor) mu = std::max(0.5 * mu, mu_floor);
        } else {
            if (mu > mu_floor) mu = std::max(0.1 * mu, mu_floor);
            else break;  // stalled at the sharpest model; report below
        }
    }
    if (gnorm <= config.solver_tol) return g;
    throw FlowConvergenceError("implicit_euler_step: inner solver stalled at gradient norm " +
                                   format_double(gnorm),
                               g, gnorm);
}

std::vector<FlowState> run_flow(const Space& space, const Partition& partition,
                                const NeighborGraph& graph, const ScalarField& f0,
                                const FlowConfig& config) {
    config.validate();
    const std::vector<double> cmass = cell_masses(space, partition);
    CellField current = project_cells(space, partition, f0);

    auto snapshot = [&](std::size_t step, const CellField& field, double clamp_gap) {
        FlowState st;
        st.step_index = step;
        st.field = field;
        st.energy = energy_Fq_cells(partition, graph, field, config.q, cmass);
        st.mass = 0.0;
        for (std::size_t i = 0; i < field.size(); ++i) st.mass += cmass[i] * field[i];
        st.min_value = *std::min_element(field.values.begin(), field.values.end());
        st.max_value = *std::max_element(field.values.begin(), field.values.end());
        st.clamp_objective_gap = clamp_gap;
        return st;
    };

    std::vector<FlowState> trajectory;
    trajectory.reserve(config.steps + 1);
    trajectory.push_back(snapshot(0, current, 0.0));

    for (std::size_t s = 1; s <= config.steps; ++s) {
        const double lo = *std::min_element(current.values.begin(), current.values.end());
        const double hi = *std::max_element(current.values.begin(), current.values.end());
        CellField next = implicit_euler_step(space, partition, graph, current, config);
        // truncation competitor: clamping to the input range must not
        // improve the objective when `next` is the true minimizer
        CellField clamped = next;
        for (double& v : clamped.values) v = std::clamp(v, lo, hi);
        const double gap = objective(partition, graph, clamped, current, cmass, config) -
                           objective(partition, graph, next, current, cmass, config);
        current = std::move(next);
        trajectory.push_back(snapshot(s, current, gap));
    }
    return trajectory;
}

Report flow_invariant_report(const std::vector<FlowState>& trajectory, const FlowConfig& config) {
    Report rep("flow_invariants");
    if (trajectory.empty()) throw ConfigError("flow_invariant_report: empty trajectory");
    const FlowState& first = trajectory.front();

    double worst_mass_drift = 0.0;
    double worst_min_breach = 0.0;
    double worst_max_breach = 0.0;
    double worst_energy_rise = 0.0;
    double worst_clamp_gap = 0.0;
    for (std::size_t k = 0; k < trajectory.size(); ++k) {
        const FlowState& st = trajectory[k];
        worst_mass_drift = std::max(worst_mass_drift, std::abs(st.mass - first.mass));
        worst_min_breach = std::max(worst_min_breach, first.min_value - st.min_value);
        worst_max_breach = std::max(worst_max_breach, st.max_value - first.max_value);
        if (k > 0)
            worst_energy_rise = std::max(worst_energy_rise, st.energy - trajectory[k - 1].energy);
        worst_clamp_gap = std::max(worst_clamp_gap, -st.clamp_objective_gap);
    }
    const double mass_tol = 1e-8 * (1.0 + std::abs(first.mass));
    const double range_tol = 1e-10;
    const double energy_tol = config.q == 2.0 ? 1e-12 * (1.0 + first.energy)
                                              : config.solver_tol * (1.0 + first.energy);

    rep.set("steps", trajectory.size() - 1);
    rep.set("mass_initial", first.mass);
    rep.set("worst_mass_drift", worst_mass_drift);
    rep.set("worst_min_breach", worst_min_breach);
    rep.set("worst_max_breach", worst_max_breach);
    rep.set("worst_energy_rise", worst_energy_rise);
    rep.set("worst_clamp_gap", worst_clamp_gap);
    rep.check("mass_preserved", worst_mass_drift <= mass_tol);
    rep.check("min_principle", worst_min_breach <= range_tol);
    rep.check("max_principle", worst_max_breach <= range_tol);
    rep.check("energy_nonincreasing", worst_energy_rise <= energy_tol);
    rep.check("truncation_never_improves", worst_clamp_gap <= energy_tol);
    return rep;
}

void trajectory_to_csv(const std::vector<FlowState>& trajectory,
                       const std::filesystem::path& path) {
    std::string out = "step,energy,mass,min,max\n";
    for (const auto& st : trajectory) {
        out += std::to_string(st.step_index);
        out += ',';
        out += format_double(st.energy);
        out += ',';
        out += format_double(st.mass);
        out += ',';
        out += format_double(st.min_value);
        out += ',';
        out += format_double(st.max_value);
        out += '\n';
    }
    write_text_file(out, path);
}

nlohmann::json trajectory_to_json(const std::vector<FlowState>& trajectory) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& st : trajectory) {
        nlohmann::json entry;
        entry["step"] = st.step_index;
        entry["energy"] = st.energy;
        entry["mass"] = st.mass;
        entry["min"] = st.min_value;
        entry["max"] = st.max_value;
        entry["field"] = st.field.values;
        doc.push_back(std::move(entry));
    }
    return doc;
}

}  // namespace msob
