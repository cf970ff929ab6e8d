#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "msob/report.hpp"
#include "msob/space.hpp"

namespace msob {

/// (point, radius) sample set for ball-based estimators.
struct ProbeGrid {
    std::vector<std::pair<std::size_t, double>> probes;

    /// Geometric radius ladder {diam/2, diam/4, ...} truncated at the sample
    /// resolution, crossed with every support point.
    static ProbeGrid defaults(const Space& space);
    /// Same ladder, crossed with the given points.
    static ProbeGrid at_points(const Space& space, const std::vector<std::size_t>& points);

    std::vector<double> distinct_radii() const;
};

/// Local maximal function at scale eps: the largest mass-weighted q-mean of
/// |f| over balls B(x,r) with 0 < r <= eps, taken to the 1/q power. Points
/// whose every candidate ball carries zero mass get value 0 and are counted.
ScalarField maximal_function(const Space& space, const ScalarField& f, double q, double eps);
ScalarField maximal_function_serial(const Space& space, const ScalarField& f, double q,
                                    double eps);
/// Single-point version with the same semantics.
double maximal_function_at(const Space& space, const ScalarField& f, double q, double eps,
                           std::size_t x);

struct LebesgueProfile {
    std::vector<double> radii;
    std::vector<double> values;         // mean of |f - f(x)|^q over B(x,r)
    std::vector<std::uint8_t> flagged;  // 1 when the ball carries no mass
};

LebesgueProfile lebesgue_profile(const Space& space, const ScalarField& f, double q,
                                 std::size_t x, const std::vector<double>& radii);

/// Mean of |f - f(x)|^q over an explicit member set (the sandwiched-set
/// variant of the Lebesgue point property). Returns 0 and sets `flagged`
/// when the set carries no mass.
double set_mean_deviation(const Space& space, const ScalarField& f, double q, std::size_t x,
                          const std::vector<std::size_t>& members, bool& flagged);

/// Number of radius-r/2 balls the greedy cover needs for B(center, r):
/// repeatedly center a ball on the farthest uncovered member. An upper bound
/// on the true covering number of that ball.
std::size_t greedy_cover_count(const Space& space, std::size_t center, double r);

/// Max greedy covering count over every point at each given radius.
std::size_t covering_constant_at_scales(const Space& space, const std::vector<double>& radii);

struct DoublingReport {
    std::size_t c_D_metric = 1;  // covering estimate
    double c_D_measure = 1.0;    // max mass ratio m(B(x,2r)) / m(B(x,r))
    double alpha = 0.0;          // log2(c_D_measure)
    double beta = 1.0;           // c_D_measure^2
    double ahlfors_dim = 0.0;    // log-log mass scaling slope
    bool ahlfors_valid = false;
    std::size_t probe_count = 0;
    std::size_t skipped_probes = 0;  // zero-mass balls
    Report report{"doubling_constants"};
};

DoublingReport doubling_constants(const Space& space, const ProbeGrid& grid);

struct PoincareReport {
    std::vector<double> tau_required;  // one entry per probe; inf flagged separately
    double tau_global = 0.0;
    double lambda = 1.0;
    std::size_t infinite_flags = 0;  // oscillation with vanishing gradient mean
    std::size_t skipped = 0;         // zero-mass balls
    Report report{"poincare_check"};
};

/// Smallest constant making the ball-mean oscillation of u bounded by
/// tau * r * (q-mean of g over the lambda-dilated ball), probe by probe.
PoincareReport poincare_check(const Space& space, const ScalarField& u, const ScalarField& g,
                              double q, double lambda, const ProbeGrid& grid);

/// Two-point oscillation bound through maximal functions of g at scale
/// 2*lambda*d(x,y); the measured ratios are compared against
/// C = 2 * 2^(1+alpha) * beta * tau.
Report telescoping_check(const Space& space, const ScalarField& u, const ScalarField& g, double q,
                         double lambda,
                         const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                         double alpha, double beta, double tau);

}  // namespace msob
