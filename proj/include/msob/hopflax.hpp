#pragma once

#include <vector>

#include "msob/report.hpp"
#include "msob/space.hpp"

namespace msob {

/// Inf-convolution semigroup snapshot at one time, with the extreme
/// distances to the minimizing set per point.
struct HopfLaxResult {
    double t = 0.0;
    double p = 2.0;
    double q = 2.0;     // dual exponent p/(p-1)
    ScalarField field;  // the evolved function
    std::vector<double> dplus;
    std::vector<double> dminus;
    std::vector<std::vector<std::size_t>> argmin;  // sorted minimizer indices per point
};

/// field(x) = min over y of f(y) + dist(x,y)^p / (p t^(p-1)), by exact
/// enumeration. The argmin set collects all minimizers within 1e-12 absolute
/// of the optimum; dminus/dplus are its min/max distance from x.
HopfLaxResult hopf_lax(const Space& space, const ScalarField& f, double p, double t);

/// t = 0 convention: field = f, both distances 0, argmin = {x}.
HopfLaxResult hopf_lax_zero(const Space& space, const ScalarField& f, double p);

/// Reference single-thread evaluation of the field only (tests/benchmarks).
ScalarField hopf_lax_field_serial(const Space& space, const ScalarField& f, double p, double t);

/// Largest |f(x)-f(y)| / dist(x,y) over all pairs; 0 on constant fields.
double global_lipschitz(const Space& space, const ScalarField& f);
double global_lipschitz_serial(const Space& space, const ScalarField& f);

/// Across consecutive times t < s, dplus(x,t) must not exceed dminus(x,s);
/// records the worst violation per time pair (tolerance 1e-12).
Report check_monotonicity(const Space& space, const ScalarField& f, double p,
                          const std::vector<double>& times);

/// Central difference of t -> field(x) against -(1/q) (D(x,t)/t)^p. Points
/// where dplus and dminus disagree beyond 1e-9 are exceptional and skipped
/// (their count is reported).
Report check_time_derivative(const Space& space, const ScalarField& f, double p, double t,
                             double h);

/// Hamilton-Jacobi subsolution residual
/// max(0, d/dt field + (1/q) lip_a^q) with the localized Lipschitz constant
/// estimated at finite radius r (an overestimate that shrinks with r).
Report check_subsolution(const Space& space, const ScalarField& f, double p, double t, double h,
                         double r);

/// Lip(evolved)/Lip(f) <= p at every time, and
/// dplus(x,t) <= t (p Lip(f))^(1/(p-1)).
Report lipschitz_bound_check(const Space& space, const ScalarField& f, double p,
                             const std::vector<double>& times);

}  // namespace msob
