#include "msob/hopflax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msob/par.hpp"
#include "msob/slopes.hpp"

namespace msob {

namespace {

constexpr double kArgminTol = 1e-12;  // absolute tie tolerance on the objective

void validate_inputs(const Space& space, const ScalarField& f, double p) {
    if (f.size() != space.size()) throw ConfigError("hopf_lax: field size mismatch");
    if (!(p > 1.0)) throw ConfigError("hopf_lax: p must exceed 1");
    for (double v : f.values)
        if (!std::isfinite(v)) throw ConfigError("hopf_lax: field must be finite");
}

}  // namespace

HopfLaxResult hopf_lax_zero(const Space& space, const ScalarField& f, double p) {
    validate_inputs(space, f, p);
    HopfLaxResult res;
    res.t = 0.0;
    res.p = p;
    res.q = p / (p - 1.0);
    res.field = f;
    res.dplus.assign(space.size(), 0.0);
    res.dminus.assign(space.size(), 0.0);
    res.argmin.resize(space.size());
    for (std::size_t x = 0; x < space.size(); ++x) res.argmin[x] = {x};
    return res;
}

HopfLaxResult hopf_lax(const Space& space, const ScalarField& f, double p, double t) {
    validate_inputs(space, f, p);
    if (!(t > 0.0)) throw ConfigError("hopf_lax: t must be positive (use hopf_lax_zero for t=0)");
    const std::size_t n = space.size();
    const double denom = p * std::pow(t, p - 1.0);

    HopfLaxResult res;
    res.t = t;
    res.p = p;
    res.q = p / (p - 1.0);
    res.field = ScalarField(n, 0.0);
    res.dplus.assign(n, 0.0);
    res.dminus.assign(n, 0.0);
    res.argmin.resize(n);

    par::parallel_for(n, [&](std::size_t x) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t y = 0; y < n; ++y)
            best = std::min(best, f[y] + std::pow(space.dist(x, y), p) / denom);
        double dmin = std::numeric_limits<double>::infinity();
        double dmax = 0.0;
        std::vector<std::size_t> mins;
        for (std::size_t y = 0; y < n; ++y) {
            if (f[y] + std::pow(space.dist(x, y), p) / denom <= best + kArgminTol) {
                mins.push_back(y);
                dmin = std::min(dmin, space.dist(x, y));
                dmax = std::max(dmax, space.dist(x, y));
            }
        }
        res.field[x] = best;
        res.dminus[x] = dmin;
        res.dplus[x] = dmax;
        res.argmin[x] = std::move(mins);
    });
    return res;
}

ScalarField hopf_lax_field_serial(const Space& space, const ScalarField& f, double p, double t) {
    validate_inputs(space, f, p);
    if (!(t > 0.0)) throw ConfigError("hopf_lax: t must be positive");
    const std::size_t n = space.size();
    const double denom = p * std::pow(t, p - 1.0);
    ScalarField out(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t y = 0; y < n; ++y)
            best = std::min(best, f[y] + std::pow(space.dist(x, y), p) / denom);
        out[x] = best;
    }
    return out;
}

double global_lipschitz(const Space& space, const ScalarField& f) {
    const std::size_t n = space.size();
    std::vector<double> row_best(n, 0.0);
    par::parallel_for(n, [&](std::size_t i) {
        double best = 0.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = space.dist(i, j);
            if (d > 0.0) best = std::max(best, std::abs(f[i] - f[j]) / d);
        }
        row_best[i] = best;
    });
    double lip = 0.0;
    for (double b : row_best) lip = std::max(lip, b);
    return lip;
}

double global_lipschitz_serial(const Space& space, const ScalarField& f) {
    const std::size_t n = space.size();
    double lip = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double d = space.dist(i, j);
            if (d > 0.0) lip = std::max(lip, std::abs(f[i] - f[j]) / d);
        }
    return lip;
}

Report check_monotonicity(const Space& space, const ScalarField& f, double p,
                          const std::vector<double>& times) {
    Report rep("hopflax_monotonicity");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] > 0.0)) throw ConfigError("check_monotonicity: times must be positive");
        if (k > 0 && !(times[k] > times[k - 1]))
            throw ConfigError("check_monotonicity: times must be strictly increasing");
    }
    std::vector<HopfLaxResult> frames;
    frames.reserve(times.size());
    for (double t : times) frames.push_back(hopf_lax(space, f, p, t));

    double worst = 0.0;
    double worst_value_increase = 0.0;
    for (std::size_t k = 0; k + 1 < frames.size(); ++k) {
        for (std::size_t x = 0; x < space.size(); ++x) {
            worst = std::max(worst, frames[k].dplus[x] - frames[k + 1].dminus[x]);
            // t -> field(x) never increases: the infimand shrinks with t
            worst_value_increase =
                std::max(worst_value_increase, frames[k + 1].field[x] - frames[k].field[x]);
        }
    }
    rep.set("times", times);
    rep.set("worst_violation", worst);
    rep.set("worst_value_increase", worst_value_increase);
    rep.check("dplus_le_next_dminus", worst <= 1e-12);
    rep.check("field_nonincreasing_in_t", worst_value_increase <= 1e-12);
    return rep;
}

Report check_time_derivative(const Space& space, const ScalarField& f, double p, double t,
                             double h) {
    Report rep("hopflax_time_derivative");
    if (!(t > h && h > 0.0)) throw ConfigError("check_time_derivative: need t > h > 0");
    const HopfLaxResult at = hopf_lax(space, f, p, t);
    const HopfLaxResult fwd = hopf_lax(space, f, p, t + h);
    const HopfLaxResult bwd = hopf_lax(space, f, p, t - h);
    const double q = p / (p - 1.0);

    std::vector<double> residuals;
    std::size_t skipped = 0;
    for (std::size_t x = 0; x < space.size(); ++x) {
        if (std::abs(at.dplus[x] - at.dminus[x]) > 1e-9) {
            ++skipped;  // exceptional point: the minimizing set is mid-jump
            continue;
        }
        const double central = (fwd.field[x] - bwd.field[x]) / (2.0 * h);
        const double law = -(1.0 / q) * std::pow(at.dplus[x] / t, p);
        residuals.push_back(std::abs(central - law));
    }
    std::size_t within_1e5 = 0;
    double worst = 0.0;
    for (double r : residuals) {
        if (r <= 1e-5) ++within_1e5;
        worst = std::max(worst, r);
    }
    rep.set("t", t);
    rep.set("h", h);
    rep.set("skipped", skipped);
    rep.set("tested", residuals.size());
    rep.set("worst_residual", worst);
    rep.set("fraction_within_1e-5",
            residuals.empty() ? 1.0 : double(within_1e5) / double(residuals.size()));
    rep.check("derivative_law",
              residuals.empty() || double(within_1e5) / double(residuals.size()) >= 0.95);
    return rep;
}

Report check_subsolution(const Space& space, const ScalarField& f, double p, double t, double h,
                         double r) {
    Report rep("hopflax_subsolution");
    if (!(t > h && h > 0.0)) throw ConfigError("check_subsolution: need t > h > 0");
    if (!(r > 0.0)) throw ConfigError("check_subsolution: radius must be positive");
    const HopfLaxResult at = hopf_lax(space, f, p, t);
    const HopfLaxResult fwd = hopf_lax(space, f, p, t + h);
    const HopfLaxResult bwd = hopf_lax(space, f, p, t - h);
    const double q = p / (p - 1.0);
    const SlopeField lip = asymptotic_lip_estimate(space, at.field, r);

    std::vector<double> residuals(space.size(), 0.0);
    for (std::size_t x = 0; x < space.size(); ++x) {
        const double central = (fwd.field[x] - bwd.field[x]) / (2.0 * h);
        residuals[x] = std::max(0.0, central + std::pow(lip.values[x], q) / q);
    }
    double worst = 0.0;
    for (double v : residuals) worst = std::max(worst, v);
    rep.set("t", t);
    rep.set("h", h);
    rep.set("radius", r);
    rep.set("worst_residual", worst);
    rep.set("residuals", residuals);
    // finite-radius overestimates of the local constant loosen the bound;
    // callers assert against their own tolerance
    rep.check("residuals_recorded", true);
    return rep;
}

Report lipschitz_bound_check(const Space& space, const ScalarField& f, double p,
                             const std::vector<double>& times) {
    Report rep("hopflax_lipschitz_bound");
    const double lip_f = global_lipschitz(space, f);
    rep.set("lip_f", lip_f);

    double worst_ratio = 0.0;
    double worst_dplus_excess = 0.0;
    for (double t : times) {
        if (!(t > 0.0)) throw ConfigError("lipschitz_bound_check: times must be positive");
        const HopfLaxResult res = hopf_lax(space, f, p, t);
        const double lip_t = global_lipschitz(space, res.field);
        if (lip_f > 0.0) worst_ratio = std::max(worst_ratio, lip_t / lip_f);
        else worst_ratio = std::max(worst_ratio, lip_t > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        const double dbound = t * std::pow(p * lip_f, 1.0 / (p - 1.0));
        for (double dp : res.dplus)
            worst_dplus_excess = std::max(worst_dplus_excess, dp - dbound);
    }
    rep.set("worst_ratio", worst_ratio);
    rep.set("worst_dplus_excess", worst_dplus_excess);
    rep.check("lip_ratio_le_p", worst_ratio <= p + 1e-12);
    rep.check("dplus_bound", worst_dplus_excess <= 1e-12 * std::max(1.0, lip_f));
    return rep;
}

}  // namespace msob
