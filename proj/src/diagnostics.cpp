#include "msob/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msob/par.hpp"

namespace msob {

ProbeGrid ProbeGrid::defaults(const Space& space) {
    std::vector<std::size_t> pts = space.support();
    if (pts.empty())
        for (std::size_t i = 0; i < space.size(); ++i) pts.push_back(i);
    return at_points(space, pts);
}

ProbeGrid ProbeGrid::at_points(const Space& space, const std::vector<std::size_t>& points) {
    ProbeGrid grid;
    const double diam = space.diameter();
    if (diam <= 0.0) {
        // degenerate (single-point) space: one nominal probe
        for (std::size_t x : points) grid.probes.emplace_back(x, 1.0);
        return grid;
    }
    const double resolution = std::max(space.min_positive_dist(), diam * 1e-6);
    std::vector<double> ladder;
    for (double r = diam / 2.0; r >= resolution; r /= std::sqrt(2.0)) ladder.push_back(r);
    if (ladder.empty()) ladder.push_back(diam / 2.0);
    for (std::size_t x : points)
        for (double r : ladder) grid.probes.emplace_back(x, r);
    return grid;
}

std::vector<double> ProbeGrid::distinct_radii() const {
    std::vector<double> radii;
    for (const auto& [x, r] : probes) radii.push_back(r);
    std::sort(radii.begin(), radii.end(), std::greater<>());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    return radii;
}

namespace {

struct Tier {
    double radius;  // distance of this tier
    double mass;    // cumulative ball mass including this tier
    double num;     // cumulative sum of mass * |f|^q (or deviation^q)
};

// Cumulative sums over distance tiers around x; tiers[k] describes the
// closed ball {y : d(x,y) <= tiers[k].radius}.
std::vector<Tier> distance_tiers(const Space& space, std::size_t x,
                                 const std::vector<double>& weight_num) {
    const std::size_t n = space.size();
    std::vector<std::pair<double, std::size_t>> order(n);
    for (std::size_t j = 0; j < n; ++j) order[j] = {space.dist(x, j), j};
    std::sort(order.begin(), order.end());
    std::vector<Tier> tiers;
    double cmass = 0.0, cnum = 0.0;
    for (std::size_t k = 0; k < n;) {
        const double d = order[k].first;
        while (k < n && order[k].first == d) {
            cmass += space.mass(order[k].second);
            cnum += weight_num[order[k].second];
            ++k;
        }
        tiers.push_back({d, cmass, cnum});
    }
    return tiers;
}

double maximal_from_tiers(const std::vector<Tier>& tiers, double q, double eps, bool& flagged) {
    // Balls B(x,r), r in (0, eps], realize exactly the tier prefixes whose
    // radius is strictly below eps.
    double best = -1.0;
    for (const auto& t : tiers) {
        if (!(t.radius < eps)) break;
        if (t.mass > 0.0) best = std::max(best, t.num / t.mass);
    }
    if (best < 0.0) {
        flagged = true;
        return 0.0;
    }
    flagged = false;
    return std::pow(best, 1.0 / q);
}

}  // namespace

double maximal_function_at(const Space& space, const ScalarField& f, double q, double eps,
                           std::size_t x) {
    if (!(eps > 0.0)) throw ConfigError("maximal_function: eps must be positive");
    if (!(q >= 1.0)) throw ConfigError("maximal_function: q must be >= 1");
    std::vector<double> wn(space.size());
    for (std::size_t j = 0; j < space.size(); ++j)
        wn[j] = space.mass(j) * std::pow(std::abs(f[j]), q);
    bool flagged = false;
    return maximal_from_tiers(distance_tiers(space, x, wn), q, eps, flagged);
}

namespace {

ScalarField maximal_impl(const Space& space, const ScalarField& f, double q, double eps,
                         bool parallel) {
    if (!(eps > 0.0)) throw ConfigError("maximal_function: eps must be positive");
    if (!(q >= 1.0)) throw ConfigError("maximal_function: q must be >= 1");
    if (f.size() != space.size()) throw ConfigError("maximal_function: field size mismatch");
    const std::size_t n = space.size();
    std::vector<double> wn(n);
    for (std::size_t j = 0; j < n; ++j) wn[j] = space.mass(j) * std::pow(std::abs(f[j]), q);
    ScalarField out(n, 0.0);
    auto body = [&](std::size_t x) {
        bool flagged = false;
        out[x] = maximal_from_tiers(distance_tiers(space, x, wn), q, eps, flagged);
    };
    if (parallel)
        par::parallel_for(n, body);
    else
        for (std::size_t x = 0; x < n; ++x) body(x);
    return out;
}

}  // namespace

ScalarField maximal_function(const Space& space, const ScalarField& f, double q, double eps) {
    return maximal_impl(space, f, q, eps, true);
}

ScalarField maximal_function_serial(const Space& space, const ScalarField& f, double q,
                                    double eps) {
    return maximal_impl(space, f, q, eps, false);
}

LebesgueProfile lebesgue_profile(const Space& space, const ScalarField& f, double q,
                                 std::size_t x, const std::vector<double>& radii) {
    if (x >= space.size()) throw std::out_of_range("lebesgue_profile: unknown point");
    LebesgueProfile prof;
    prof.radii = radii;
    const std::size_t n = space.size();
    for (double r : radii) {
        double mass = 0.0, num = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (space.dist(x, j) < r) {
                mass += space.mass(j);
                num += space.mass(j) * std::pow(std::abs(f[j] - f[x]), q);
            }
        }
        if (mass > 0.0) {
            prof.values.push_back(num / mass);
            prof.flagged.push_back(0);
        } else {
            prof.values.push_back(0.0);
            prof.flagged.push_back(1);
        }
    }
    return prof;
}

double set_mean_deviation(const Space& space, const ScalarField& f, double q, std::size_t x,
                          const std::vector<std::size_t>& members, bool& flagged) {
    double mass = 0.0, num = 0.0;
    for (std::size_t j : members) {
        mass += space.mass(j);
        num += space.mass(j) * std::pow(std::abs(f[j] - f[x]), q);
    }
    if (mass <= 0.0) {
        flagged = true;
        return 0.0;
    }
    flagged = false;
    return num / mass;
}

std::size_t greedy_cover_count(const Space& space, std::size_t center, double r) {
    if (center >= space.size()) throw std::out_of_range("greedy_cover_count: unknown point");
    if (!(r > 0.0)) throw ConfigError("greedy_cover_count: radius must be positive");
    std::vector<std::size_t> members;
    for (std::size_t j = 0; j < space.size(); ++j)
        if (space.dist(center, j) < r) members.push_back(j);
    std::vector<char> covered(members.size(), 0);
    std::size_t remaining = members.size();
    std::size_t count = 0;
    while (remaining > 0) {
        // farthest-from-center uncovered member, ties to the lowest index
        std::size_t pick = members.size();
        double best = -1.0;
        for (std::size_t k = 0; k < members.size(); ++k) {
            if (covered[k]) continue;
            const double d = space.dist(center, members[k]);
            if (d > best) {
                best = d;
                pick = k;
            }
        }
        ++count;
        const std::size_t z = members[pick];
        for (std::size_t k = 0; k < members.size(); ++k)
            if (!covered[k] && space.dist(z, members[k]) < r / 2.0) {
                covered[k] = 1;
                --remaining;
            }
    }
    return count;
}

std::size_t covering_constant_at_scales(const Space& space, const std::vector<double>& radii) {
    const std::size_t n = space.size();
    std::vector<std::size_t> worst(n, 1);
    par::parallel_for(n, [&](std::size_t x) {
        std::size_t w = 1;
        for (double r : radii) w = std::max(w, greedy_cover_count(space, x, r));
        worst[x] = w;
    });
    std::size_t c = 1;
    for (std::size_t w : worst) c = std::max(c, w);
    return c;
}

DoublingReport doubling_constants(const Space& space, const ProbeGrid& grid) {
    if (grid.probes.empty()) throw ConfigError("doubling_constants: empty probe grid");
    DoublingReport out;
    out.probe_count = grid.probes.size();

    const std::size_t np = grid.probes.size();
    std::vector<std::size_t> cover(np, 1);
    std::vector<double> ratio(np, 0.0);   // mass doubling ratio, -1 when skipped
    std::vector<double> log_r(np), log_m(np);
    std::vector<char> usable(np, 0);

    par::parallel_for(np, [&](std::size_t k) {
        const auto [x, r] = grid.probes[k];
        cover[k] = greedy_cover_count(space, x, r);
        double m1 = 0.0, m2 = 0.0;
        for (std::size_t j = 0; j < space.size(); ++j) {
            const double d = space.dist(x, j);
            if (d < r) m1 += space.mass(j);
            if (d < 2.0 * r) m2 += space.mass(j);
        }
        ratio[k] = m1 > 0.0 ? m2 / m1 : -1.0;
        if (m1 > 0.0) {
            usable[k] = 1;
            log_r[k] = std::log(r);
            log_m[k] = std::log(m1);
        }
    });

    for (std::size_t k = 0; k < np; ++k) {
        out.c_D_metric = std::max(out.c_D_metric, cover[k]);
        if (ratio[k] < 0.0)
            ++out.skipped_probes;
        else
            out.c_D_measure = std::max(out.c_D_measure, ratio[k]);
    }
    out.alpha = std::log2(out.c_D_measure);
    out.beta = out.c_D_measure * out.c_D_measure;

    // Mass-scaling slope over the middle scale band: radii above 4x the
    // sample resolution dodge lattice effects, radii below diameter/8 dodge
    // boundary saturation.
    {
        const double rmin = 4.0 * space.min_positive_dist();
        const double rmax = space.diameter() / 8.0;
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t cnt = 0;
        std::size_t rungs = 0;
        for (double r : grid.distinct_radii())
            if (r >= rmin && r <= rmax) ++rungs;
        for (std::size_t k = 0; k < np; ++k) {
            if (!usable[k]) continue;
            const double r = grid.probes[k].second;
            if (r > rmax || r < rmin) continue;
            sx += log_r[k];
            sy += log_m[k];
            sxx += log_r[k] * log_r[k];
            sxy += log_r[k] * log_m[k];
            ++cnt;
        }
        const double det = cnt * sxx - sx * sx;
        if (rungs >= 2 && cnt >= 2 && std::abs(det) > 1e-12) {
            out.ahlfors_dim = (cnt * sxy - sx * sy) / det;
            out.ahlfors_valid = true;
        }
    }

    out.report.set("c_D_metric", out.c_D_metric);
    out.report.set("c_D_measure", out.c_D_measure);
    out.report.set("alpha", out.alpha);
    out.report.set("beta", out.beta);
    out.report.set("probes", out.probe_count);
    out.report.set("skipped_probes", out.skipped_probes);
    if (out.ahlfors_valid) out.report.set("ahlfors_dim", out.ahlfors_dim);
    return out;
}

PoincareReport poincare_check(const Space& space, const ScalarField& u, const ScalarField& g,
                              double q, double lambda, const ProbeGrid& grid) {
    if (!(lambda >= 1.0)) throw ConfigError("poincare_check: lambda must be >= 1");
    if (!(q >= 1.0)) throw ConfigError("poincare_check: q must be >= 1");
    for (double gv : g.values)
        if (gv < 0.0) throw ConfigError("poincare_check: g must be nonnegative");

    PoincareReport out;
    out.lambda = lambda;
    const std::size_t np = grid.probes.size();
    out.tau_required.assign(np, 0.0);
    std::vector<char> inf_flag(np, 0), skip_flag(np, 0);

    par::parallel_for(np, [&](std::size_t k) {
        const auto [x, r] = grid.probes[k];
        double mass = 0.0, usum = 0.0;
        for (std::size_t j = 0; j < space.size(); ++j)
            if (space.dist(x, j) < r) {
                mass += space.mass(j);
                usum += space.mass(j) * u[j];
            }
        if (mass <= 0.0) {
            skip_flag[k] = 1;
            return;
        }
        const double mean_u = usum / mass;
        double osc = 0.0;
        for (std::size_t j = 0; j < space.size(); ++j)
            if (space.dist(x, j) < r) osc += space.mass(j) * std::abs(u[j] - mean_u);
        osc /= mass;

        double gmass = 0.0, gsum = 0.0;
        for (std::size_t j = 0; j < space.size(); ++j)
            if (space.dist(x, j) < lambda * r) {
                gmass += space.mass(j);
                gsum += space.mass(j) * std::pow(g[j], q);
            }
        const double rhs = gmass > 0.0 ? r * std::pow(gsum / gmass, 1.0 / q) : 0.0;
        if (osc <= 0.0) {
            out.tau_required[k] = 0.0;
        } else if (rhs > 0.0) {
            out.tau_required[k] = osc / rhs;
        } else {
            inf_flag[k] = 1;
        }
    });

    for (std::size_t k = 0; k < np; ++k) {
        if (skip_flag[k]) ++out.skipped;
        if (inf_flag[k]) ++out.infinite_flags;
        out.tau_global = std::max(out.tau_global, out.tau_required[k]);
    }
    out.report.set("tau_global", out.tau_global);
    out.report.set("lambda", lambda);
    out.report.set("probes", np);
    out.report.set("infinite_flags", out.infinite_flags);
    out.report.set("skipped", out.skipped);
    out.report.check("finite_everywhere", out.infinite_flags == 0);
    return out;
}

Report telescoping_check(const Space& space, const ScalarField& u, const ScalarField& g, double q,
                         double lambda,
                         const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                         double alpha, double beta, double tau) {
    Report rep("telescoping_check");
    const double bound = 2.0 * std::pow(2.0, 1.0 + alpha) * beta * tau;
    const std::size_t np = pairs.size();
    for (const auto& [x, y] : pairs)
        if (!(space.dist(x, y) > 0.0))
            throw ConfigError("telescoping_check: pair at zero distance");
    std::vector<double> ratios(np, 0.0);
    std::vector<char> degenerate(np, 0);

    par::parallel_for(np, [&](std::size_t k) {
        const auto [x, y] = pairs[k];
        const double d = space.dist(x, y);
        const double eps = 2.0 * lambda * d;
        const double mx = maximal_function_at(space, g, q, eps, x);
        const double my = maximal_function_at(space, g, q, eps, y);
        const double denom = d * (mx + my);
        const double diff = std::abs(u[x] - u[y]);
        if (denom > 0.0)
            ratios[k] = diff / denom;
        else if (diff > 0.0)
            degenerate[k] = 1;
    });

    double max_ratio = 0.0;
    std::size_t degenerate_count = 0;
    for (std::size_t k = 0; k < np; ++k) {
        max_ratio = std::max(max_ratio, ratios[k]);
        degenerate_count += degenerate[k];
    }
    rep.set("pairs", np);
    rep.set("max_ratio", max_ratio);
    rep.set("bound", bound);
    rep.set("alpha", alpha);
    rep.set("beta", beta);
    rep.set("tau", tau);
    rep.set("degenerate_pairs", degenerate_count);
    rep.check("ratio_within_bound", max_ratio <= bound && degenerate_count == 0);
    return rep;
}

}  // namespace msob
