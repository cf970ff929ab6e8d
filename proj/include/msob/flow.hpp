#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "msob/energy.hpp"
#include "msob/partition.hpp"

namespace msob {

struct FlowConfig {
    double tau = 0.1;    // time step
    double q = 2.0;      // energy exponent, > 1
    std::size_t steps = 10;
    double solver_tol = 1e-10;          // gradient norm target for the inner solver
    std::size_t max_inner_iterations = 500;

    void validate() const;
};

struct FlowState {
    std::size_t step_index = 0;
    CellField field;
    double energy = 0.0;  // cell energy of the field
    double mass = 0.0;    // sum of cell mass * value
    double min_value = 0.0;
    double max_value = 0.0;
    double clamp_objective_gap = 0.0;  // J(clamped minimizer) - J(minimizer)
};

/// Raised when the inner solver for q != 2 fails to reach solver_tol; carries
/// the last iterate and its gradient norm.
struct FlowConvergenceError : Error {
    CellField last_iterate;
    double residual;
    FlowConvergenceError(std::string msg, CellField it, double res)
        : Error(std::move(msg)), last_iterate(std::move(it)), residual(res) {}
};

/// One proximal step: the unique minimizer of
///   (1/q) * cell_energy(g) + 1/(2 tau) * sum_i m_i (g_i - f_i)^2.
/// q = 2 solves the linear optimality system exactly; other q run damped
/// iteratively-reweighted quadratic steps until the objective gradient norm
/// drops below solver_tol.
CellField implicit_euler_step(const Space& space, const Partition& partition,
                              const NeighborGraph& graph, const CellField& f,
                              const FlowConfig& config);

/// Projects f0 onto cells once, then iterates implicit_euler_step, recording
/// energy, mass and range per step (index 0 is the initial state).
std::vector<FlowState> run_flow(const Space& space, const Partition& partition,
                                const NeighborGraph& graph, const ScalarField& f0,
                                const FlowConfig& config);

/// Mass preservation, min/max principle and energy dissipation along the
/// recorded trajectory.
Report flow_invariant_report(const std::vector<FlowState>& trajectory, const FlowConfig& config);

void trajectory_to_csv(const std::vector<FlowState>& trajectory,
                       const std::filesystem::path& path);
nlohmann::json trajectory_to_json(const std::vector<FlowState>& trajectory);

}  // namespace msob
