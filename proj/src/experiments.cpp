#include "msob/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "msob/diagnostics.hpp"
#include "msob/energy.hpp"
#include "msob/fields.hpp"
#include "msob/flow.hpp"
#include "msob/hopflax.hpp"
#include "msob/partition.hpp"
#include "msob/slopes.hpp"
#include "msob/space.hpp"

namespace msob {

namespace {

std::vector<double> default_deltas(const Space& space) {
    const double d = space.diameter();
    return {d / 4.0, d / 8.0, d / 16.0};
}

std::string spec_kind(const std::string& spec) { return spec.substr(0, spec.find(':')); }

long spec_param(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) return -1;
    try {
        return std::stol(spec.substr(colon + 1));
    } catch (...) {
        return -1;
    }
}

std::vector<DiscreteCurve> curves_for_space(const Space& space, const std::string& space_spec,
                                            const Partition& part, const NeighborGraph& graph,
                                            std::size_t count, Rng& rng) {
    const std::string kind = spec_kind(space_spec);
    if (kind == "interval") return monotone_interval_curves(space, count, rng);
    if (kind == "grid2d")
        return monotone_grid_curves(space, static_cast<std::size_t>(spec_param(space_spec)),
                                    count, rng);
    if (space.metric_kind() == MetricKind::Graph) return geodesic_curves(space, count, rng);
    return neighbor_walk_curves(space, part, graph, count, 12, rng);
}

int run_partition_audit(const ExperimentConfig& cfg) {
    const Space space = make_space(cfg.space_spec);
    const std::vector<double> deltas = cfg.deltas.empty() ? default_deltas(space) : cfg.deltas;
    Report rep("partition_audit");
    rep.set("space", cfg.space_spec);
    bool ok = true;
    for (double delta : deltas) {
        const Partition part = build_partition(space, delta);
        const NeighborGraph graph = neighbor_graph(space, part);
        Report inv = check_partition_invariants(space, part);
        Report diag = partition_diagnostics(space, part, graph);
        ok = ok && inv.all_passed() && diag.all_passed();
        const std::string tag = "delta_" + format_double(delta);
        rep.check(tag + "_invariants", inv.all_passed());
        rep.check(tag + "_diagnostics", diag.all_passed());
        rep.data()["values"][tag] = {{"invariants", inv.data()}, {"diagnostics", diag.data()}};
    }
    emit_report(rep, cfg.format, cfg.out_dir / "partition_audit");
    return ok ? 0 : 1;
}

int run_energy_ladder(const ExperimentConfig& cfg) {
    const Space space = make_space(cfg.space_spec);
    Rng rng(cfg.seed);
    const ScalarField u = make_field(space, cfg.field_spec, rng);
    std::vector<double> deltas = cfg.deltas;
    if (deltas.empty()) deltas = {0.2, 0.1, 0.05, 0.02};

    std::optional<double> reference;
    const std::string fkind = spec_kind(cfg.field_spec);
    if (spec_kind(cfg.space_spec) == "interval" && (fkind == "linear" || fkind == "sin"))
        reference = analytic_interval_energy(fkind, cfg.q);

    const EnergyLadder ladder = energy_ladder(space, u, cfg.q, deltas, reference);
    ladder_to_csv(ladder, cfg.out_dir / "energy_ladder.csv");

    Report rep("energy_ladder");
    rep.set("space", cfg.space_spec);
    rep.set("field", cfg.field_spec);
    rep.set("q", cfg.q);
    rep.set("deltas", ladder.deltas);
    rep.set("energies", ladder.energies);
    rep.set("isolated_fraction", ladder.isolated_fraction);
    rep.set("c_D_metric", ladder.c_D_metric);
    if (reference) {
        rep.set("reference_energy", *reference);
        rep.set("ratios", ladder.ratios);
        rep.set("sandwich_lower", ladder.sandwich_lower);
        rep.set("sandwich_upper", ladder.sandwich_upper);
        rep.check("sandwich", ladder.sandwich_ok);
    }
    for (std::size_t w = 0; w < ladder.warnings.size(); ++w)
        rep.set("warning_" + std::to_string(w), ladder.warnings[w]);
    emit_report(rep, cfg.format, cfg.out_dir / "energy_ladder");
    return rep.all_passed() ? 0 : 1;
}

int run_clarkson_suite(const ExperimentConfig& cfg) {
    const Space space = make_space(cfg.space_spec);
    const double delta = cfg.deltas.empty() ? space.diameter() / 8.0 : cfg.deltas.front();
    const Partition part = build_partition(space, delta);
    const NeighborGraph graph = neighbor_graph(space, part);
    Rng rng(cfg.seed);

    double worst_ineq = std::numeric_limits<double>::infinity();
    double worst_ineq_scaled = std::numeric_limits<double>::infinity();
    double worst_identity = 0.0;
    double worst_modulus_excess = -std::numeric_limits<double>::infinity();
    bool ok = true;
    for (std::size_t k = 0; k < cfg.count; ++k) {
        const ScalarField u = random_lipschitz_field(space, 1.0 + rng.uniform(), rng);
        const ScalarField v = random_lipschitz_field(space, 1.0 + rng.uniform(), rng);
        const ClarksonResult res = clarkson_residual(space, part, graph, u, v, cfg.q);
        worst_ineq = std::min(worst_ineq, res.inequality_residual);
        const double scaled = res.scale > 0.0 ? res.inequality_residual / res.scale
                                              : res.inequality_residual;
        worst_ineq_scaled = std::min(worst_ineq_scaled, scaled);
        if (scaled < -1e-10) ok = false;
        if (res.identity_residual) {
            const double f_scale = std::max(1e-300, res.identity_scale);
            const double rel = std::abs(*res.identity_residual) / f_scale;
            worst_identity = std::max(worst_identity, rel);
            if (rel > 1e-9) ok = false;
        }
        if (cfg.q >= 2.0) {
            const double nu = sobolev_norm_N(space, part, graph, u, cfg.q);
            const double nv = sobolev_norm_N(space, part, graph, v, cfg.q);
            if (nu > 0.0 && nv > 0.0) {
                ScalarField un = u, vn = v;
                for (auto& x : un.values) x /= nu;
                for (auto& x : vn.values) x /= nv;
                ScalarField mid(space.size(), 0.0), diff(space.size(), 0.0);
                for (std::size_t i = 0; i < space.size(); ++i) {
                    mid[i] = 0.5 * (un[i] + vn[i]);
                    diff[i] = un[i] - vn[i];
                }
                const double lhs = sobolev_norm_N(space, part, graph, mid, cfg.q);
                const double r = sobolev_norm_N(space, part, graph, diff, cfg.q);
                const double excess = lhs - (1.0 - convexity_modulus(r, cfg.q));
                worst_modulus_excess = std::max(worst_modulus_excess, excess);
                if (excess > 1e-9) ok = false;
            }
        }
    }

    Report rep("clarkson_suite");
    rep.set("space", cfg.space_spec);
    rep.set("q", cfg.q);
    rep.set("delta", delta);
    rep.set("pairs", cfg.count);
    rep.set("seed", static_cast<std::int64_t>(cfg.seed));
    rep.set("worst_inequality_residual", worst_ineq);
    rep.set("worst_inequality_residual_scaled", worst_ineq_scaled);
    if (cfg.q == 2.0) rep.set("worst_identity_relative", worst_identity);
    if (cfg.q >= 2.0) rep.set("worst_modulus_excess", worst_modulus_excess);
    rep.check("clarkson_inequality", worst_ineq_scaled >= -1e-10);
    if (cfg.q == 2.0) rep.check("parallelogram_identity", worst_identity <= 1e-9);
    if (cfg.q >= 2.0) rep.check("uniform_convexity_modulus", worst_modulus_excess <= 1e-9);
    emit_report(rep, cfg.format, cfg.out_dir / "clarkson_suite");
    return ok ? 0 : 1;
}

int run_hopflax_suite(const ExperimentConfig& cfg) {
    const Space space = make_space(cfg.space_spec);
    Rng rng(cfg.seed);
    const ScalarField f = make_field(space, cfg.field_spec, rng);
    std::vector<double> times = cfg.times;
    if (times.empty())
        for (int k = 1; k <= 10; ++k) times.push_back(0.1 * k);

    Report mono = check_monotonicity(space, f, cfg.p, times);
    Report lip = lipschitz_bound_check(space, f, cfg.p, times);
    const double t_mid = times[times.size() / 2];
    Report deriv = check_time_derivative(space, f, cfg.p, t_mid, 1e-4);
    Report subsol = check_subsolution(space, f, cfg.p, t_mid, 1e-4,
                                      std::max(space.min_positive_dist() * 2.5,
                                               space.diameter() / 50.0));

    Report rep("hopflax_suite");
    rep.set("space", cfg.space_spec);
    rep.set("field", cfg.field_spec);
    rep.set("p", cfg.p);
    rep.data()["values"]["monotonicity"] = mono.data();
    rep.data()["values"]["lipschitz"] = lip.data();
    rep.data()["values"]["time_derivative"] = deriv.data();
    rep.data()["values"]["subsolution"] = subsol.data();
    rep.check("monotonicity", mono.all_passed());
    rep.check("lipschitz_bounds", lip.all_passed());
    rep.check("time_derivative", deriv.all_passed());
    emit_report(rep, cfg.format, cfg.out_dir / "hopflax_suite");
    return rep.all_passed() ? 0 : 1;
}

int run_wug_audit(const ExperimentConfig& cfg) {
    const Space space = make_space(cfg.space_spec);
    // incommensurate with lattice spacings so set-distance ties at exactly
    // delta cannot occur
    const double delta =
        cfg.deltas.empty() ? space.diameter() * 0.0973 : cfg.deltas.front();
    const Partition part = build_partition(space, delta);
    const NeighborGraph graph = neighbor_graph(space, part);
    Rng rng(cfg.seed);
    const ScalarField u = cfg.field_spec == "linear" && !space.has_coords()
                              ? random_lipschitz_field(space, 1.0, rng)
                              : make_field(space, cfg.field_spec, rng);
    const auto curves = curves_for_space(space, cfg.space_spec, part, graph, cfg.count, rng);
    Report rep = discrete_wug_check(space, part, graph, u, curves, cfg.q);
    rep.set("space", cfg.space_spec);
    rep.set("field", cfg.field_spec);
    rep.set("seed", static_cast<std::int64_t>(cfg.seed));
    emit_report(rep, cfg.format, cfg.out_dir / "wug_audit");
    return rep.all_passed() ? 0 : 1;
}

int run_diagnostics_suite(const ExperimentConfig& cfg) {
    const Space space = make_space(cfg.space_spec);
    Rng rng(cfg.seed);
    const ScalarField u = make_field(space, cfg.field_spec, rng);
    const ScalarField g(space.size(), 1.0);

    Report rep("diagnostics_suite");
    rep.set("space", cfg.space_spec);
    rep.set("field", cfg.field_spec);

    // maximal function: scale monotonicity at two sample scales
    const double d = space.diameter();
    const ScalarField m_small = maximal_function(space, u, cfg.q, d / 8.0);
    const ScalarField m_large = maximal_function(space, u, cfg.q, d / 2.0);
    double worst_mono = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i)
        worst_mono = std::max(worst_mono, m_small[i] - m_large[i]);
    rep.set("maximal_monotonicity_worst", worst_mono);
    rep.check("maximal_monotone_in_eps", worst_mono <= 0.0);

    const DoublingReport doubling = doubling_constants(space, ProbeGrid::defaults(space));
    rep.data()["values"]["doubling"] = doubling.report.data();

    const PoincareReport poincare = poincare_check(space, u, g, cfg.q, cfg.lambda,
                                                   ProbeGrid::defaults(space));
    rep.data()["values"]["poincare"] = poincare.report.data();

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t k = 0; k < cfg.count; ++k) {
        std::size_t a = rng.below(space.size());
        std::size_t b = rng.below(space.size());
        if (space.dist(a, b) > 0.0) pairs.emplace_back(a, b);
    }
    Report tele = telescoping_check(space, u, g, cfg.q, cfg.lambda, pairs, doubling.alpha,
                                    doubling.beta, poincare.tau_global);
    rep.data()["values"]["telescoping"] = tele.data();
    rep.check("telescoping", tele.all_passed());

    // Lebesgue profile at the point closest to the support median
    const std::size_t probe = space.support().empty()
                                  ? 0
                                  : space.support()[space.support().size() / 2];
    const LebesgueProfile prof =
        lebesgue_profile(space, u, cfg.q, probe, {d / 10.0, d / 20.0, d / 100.0});
    rep.set("lebesgue_radii", prof.radii);
    rep.set("lebesgue_values", prof.values);

    emit_report(rep, cfg.format, cfg.out_dir / "diagnostics_suite");
    return rep.all_passed() ? 0 : 1;
}

int run_flow_run(const ExperimentConfig& cfg) {
    const Space space = make_space(cfg.space_spec);
    const double delta = cfg.deltas.empty() ? space.diameter() / 8.0 : cfg.deltas.front();
    const Partition part = build_partition(space, delta);
    const NeighborGraph graph = neighbor_graph(space, part);
    Rng rng(cfg.seed);
    const ScalarField f0 = make_field(space, cfg.field_spec, rng);

    FlowConfig fc;
    fc.tau = cfg.tau;
    fc.q = cfg.q;
    fc.steps = cfg.steps;
    fc.solver_tol = cfg.q == 2.0 ? 1e-10 : 1e-8;

    const auto trajectory = run_flow(space, part, graph, f0, fc);
    trajectory_to_csv(trajectory, cfg.out_dir / "flow_trajectory.csv");
    if (cfg.format == "json")
        write_json_file(trajectory_to_json(trajectory), cfg.out_dir / "flow_trajectory.json");

    Report rep = flow_invariant_report(trajectory, fc);
    rep.set("space", cfg.space_spec);
    rep.set("delta", delta);
    rep.set("q", cfg.q);
    rep.set("tau", cfg.tau);
    emit_report(rep, cfg.format, cfg.out_dir / "flow_run");
    return rep.all_passed() ? 0 : 1;
}

int run_snowflake_demo(const ExperimentConfig& cfg) {
    const std::string spec = spec_kind(cfg.space_spec) == "koch" ? cfg.space_spec : "koch:5";
    const Space space = make_space(spec);
    const DoublingReport doubling = doubling_constants(space, ProbeGrid::defaults(space));

    Report rep("snowflake_demo");
    rep.set("space", spec);
    rep.set("points", space.size());
    rep.data()["values"]["doubling"] = doubling.report.data();
    const double expected = std::log(4.0) / std::log(3.0);
    rep.set("expected_dimension", expected);
    if (doubling.ahlfors_valid) {
        rep.set("fitted_dimension", doubling.ahlfors_dim);
        const double rel = std::abs(doubling.ahlfors_dim - expected) / expected;
        rep.set("relative_error", rel);
        if (spec_param(spec) >= 4) rep.check("dimension_within_5pct", rel <= 0.05);
    }
    emit_report(rep, cfg.format, cfg.out_dir / "snowflake_demo");
    return rep.all_passed() ? 0 : 1;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "partition-audit", "energy-ladder", "clarkson-suite", "hopflax-suite",
        "wug-audit",       "diagnostics-suite", "flow-run",   "snowflake-demo"};
    return names;
}

void emit_report(const Report& report, const std::string& format,
                 const std::filesystem::path& out_base) {
    std::filesystem::create_directories(out_base.parent_path());
    if (format == "csv") {
        write_report_csv(report, out_base.string() + ".csv");
    } else {
        write_json_file(report.data(), out_base.string() + ".json");
    }
}

int run_experiment(const ExperimentConfig& cfg) {
    try {
        std::filesystem::create_directories(cfg.out_dir);
        if (cfg.format != "json" && cfg.format != "csv")
            throw ConfigError("format must be json or csv");
        if (cfg.experiment == "partition-audit") return run_partition_audit(cfg);
        if (cfg.experiment == "energy-ladder") return run_energy_ladder(cfg);
        if (cfg.experiment == "clarkson-suite") return run_clarkson_suite(cfg);
        if (cfg.experiment == "hopflax-suite") return run_hopflax_suite(cfg);
        if (cfg.experiment == "wug-audit") return run_wug_audit(cfg);
        if (cfg.experiment == "diagnostics-suite") return run_diagnostics_suite(cfg);
        if (cfg.experiment == "flow-run") return run_flow_run(cfg);
        if (cfg.experiment == "snowflake-demo") return run_snowflake_demo(cfg);
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace msob
