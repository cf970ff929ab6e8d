#include <doctest.h>

#include <cmath>
#include <numeric>

#include "msob/energy.hpp"
#include "msob/fields.hpp"
#include "msob/report.hpp"

using namespace msob;

namespace {

Space three_point_line() {
    std::vector<double> table = {0, 0.5, 1, 0.5, 0, 0.5, 1, 0.5, 0};
    return Space::from_table({"0", "0.5", "1"}, {1, 1, 1}, std::move(table));
}

struct TwoCell {
    Space space = three_point_line();
    Partition part;
    NeighborGraph graph;
    TwoCell() {
        part = build_partition(space, 0.6, 0.075);
        graph = neighbor_graph(space, part);
    }
};

// Three singleton-center cells, each padded with a point pulled toward the
// centroid so every pair of cells is closer than delta = 1 while centers
// stay farther than 1 apart.
struct TriangleCells {
    Space space;
    Partition part;
    NeighborGraph graph;
    TriangleCells() {
        const double cr = 1.2 / std::sqrt(3.0);
        const double er = 0.35;
        std::vector<std::array<double, 2>> coords;
        std::vector<std::string> ids;
        for (int k = 0; k < 3; ++k) {
            const double a = M_PI / 2.0 + 2.0 * M_PI * k / 3.0;
            coords.push_back({cr * std::cos(a), cr * std::sin(a)});
            ids.push_back("c" + std::to_string(k));
        }
        for (int k = 0; k < 3; ++k) {
            const double a = M_PI / 2.0 + 2.0 * M_PI * k / 3.0;
            coords.push_back({er * std::cos(a), er * std::sin(a)});
            ids.push_back("e" + std::to_string(k));
        }
        space = Space::from_points(std::move(ids), std::vector<double>(6, 0.5),
                                   std::move(coords));
        part = build_partition(space, 1.0);
        graph = neighbor_graph(space, part);
    }
};

ScalarField random_field(const Space& s, Rng& rng) {
    ScalarField f(s.size(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) f[i] = rng.uniform(-1.0, 1.0);
    return f;
}

double lq_norm(const Space& s, const ScalarField& f, double q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        acc += s.mass(i) * std::pow(std::abs(f[i]), q);
    return std::pow(acc, 1.0 / q);
}

}  // namespace

TEST_CASE("projection: constants, means, singletons") {
    TwoCell tc;
    SUBCASE("constant field projects to itself") {
        const CellField cf = project_cells(tc.space, tc.part, ScalarField(3, 4.25));
        for (double v : cf.values) CHECK(v == 4.25);
    }
    SUBCASE("mass-weighted means (arithmetic oracle)") {
        const CellField cf = project_cells(tc.space, tc.part, ScalarField({0.0, 0.5, 1.0}));
        REQUIRE(cf.size() == 2);
        CHECK(cf[0] == doctest::Approx(0.25).epsilon(1e-15));
        CHECK(cf[1] == doctest::Approx(1.0).epsilon(1e-15));
    }
    SUBCASE("singleton cells return the point value") {
        const Partition p = build_partition(tc.space, 0.4);
        const CellField cf = project_cells(tc.space, p, ScalarField({0.3, -0.7, 2.0}));
        CHECK(cf.values == std::vector<double>{0.3, -0.7, 2.0});
    }
    SUBCASE("zero-mass cell is an error naming the cell") {
        std::vector<double> table = {0, 0.5, 1, 0.5, 0, 0.5, 1, 0.5, 0};
        const Space s = Space::from_table({"a", "b", "c"}, {1, 1, 0}, std::move(table));
        const Partition p = build_partition(s, 0.6, 0.075);
        CHECK_THROWS_AS(project_cells(s, p, ScalarField(3, 1.0)), ZeroMassCellError);
    }
}

TEST_CASE("projection contraction in L^q") {
    Rng rng(17);
    const Space s = make_interval(60);
    for (double q : {1.5, 2.0, 3.0}) {
        for (int trial = 0; trial < 20; ++trial) {
            const double delta = rng.uniform(0.05, 0.4);
            const Partition p = build_partition(s, delta);
            const ScalarField u = random_field(s, rng);
            const CellField cf = project_cells(s, p, u);
            const auto cm = cell_masses(s, p);
            double proj = 0.0;
            for (std::size_t i = 0; i < cf.size(); ++i)
                proj += cm[i] * std::pow(std::abs(cf[i]), q);
            const double full = std::pow(lq_norm(s, u, q), q);
            CHECK(std::pow(proj, 1.0 / q) <= std::pow(full, 1.0 / q) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("gradient field on the two-cell example") {
    TwoCell tc;
    SUBCASE("constant gives the zero field") {
        const CellField g = discrete_gradient_field(tc.space, tc.part, tc.graph,
                                                    ScalarField(3, 7.0), 2.0);
        for (double v : g.values) CHECK(v == 0.0);
    }
    SUBCASE("two neighboring cells carry |0.25 - 1| / 0.6") {
        const CellField g = discrete_gradient_field(tc.space, tc.part, tc.graph,
                                                    ScalarField({0.0, 0.5, 1.0}), 2.0);
        CHECK(g[0] == doctest::Approx(1.25).epsilon(1e-14));
        CHECK(g[1] == doctest::Approx(1.25).epsilon(1e-14));
    }
    SUBCASE("empty neighbor graph gives the zero field") {
        const Partition p = build_partition(tc.space, 0.4);
        const NeighborGraph g = neighbor_graph(tc.space, p);
        const CellField grad =
            discrete_gradient_field(tc.space, p, g, ScalarField({0.0, 0.5, 1.0}), 2.0);
        for (double v : grad.values) CHECK(v == 0.0);
    }
}

TEST_CASE("energy on the two-cell example (arithmetic oracle)") {
    TwoCell tc;
    const ScalarField u({0.0, 0.5, 1.0});
    const double f = energy_Fq(tc.space, tc.part, tc.graph, u, 2.0);
    // oracle: sum_i m(A_i) (1/delta^2) sum_j |du|^2 = 3 * (0.75/0.6)^2
    CHECK(f == doctest::Approx(4.6875).epsilon(1e-14));

    SUBCASE("q-homogeneity: lambda = 2 quadruples the energy") {
        ScalarField u2 = u;
        for (auto& v : u2.values) v *= 2.0;
        CHECK(energy_Fq(tc.space, tc.part, tc.graph, u2, 2.0) ==
              doctest::Approx(18.75).epsilon(1e-13));
    }
    SUBCASE("constant field has zero energy") {
        CHECK(energy_Fq(tc.space, tc.part, tc.graph, ScalarField(3, -2.5), 2.0) == 0.0);
    }
}

TEST_CASE("sup-variant energy") {
    TwoCell tc;
    const ScalarField u({0.0, 0.5, 1.0});
    SUBCASE("single neighbor difference: sup equals sum") {
        CHECK(energy_sup(tc.space, tc.part, tc.graph, u, 2.0) ==
              doctest::Approx(4.6875).epsilon(1e-14));
    }
    SUBCASE("three mutually neighboring cells, values 0,1,1 (enumeration oracle)") {
        TriangleCells t;
        REQUIRE(t.part.cell_count() == 3);
        REQUIRE(t.graph.pairs.size() == 3);
        ScalarField u3(6, 0.0);
        for (std::size_t i = 0; i < 6; ++i) {
            const std::size_t c = t.part.cell_of[i];
            u3[i] = c == 0 ? 0.0 : 1.0;
        }
        const double fsup = energy_sup(t.space, t.part, t.graph, u3, 2.0);
        const double fsum = energy_Fq(t.space, t.part, t.graph, u3, 2.0);
        CHECK(fsup == doctest::Approx(3.0).epsilon(1e-13));
        CHECK(fsum == doctest::Approx(4.0).epsilon(1e-13));
        CHECK(fsup <= fsum);
    }
    SUBCASE("domination on random fields") {
        Rng rng(23);
        const Space s = make_interval(40);
        const Partition p = build_partition(s, 0.13);
        const NeighborGraph g = neighbor_graph(s, p);
        for (double q : {1.5, 2.0, 3.0})
            for (int trial = 0; trial < 10; ++trial) {
                const ScalarField u = random_field(s, rng);
                CHECK(energy_sup(s, p, g, u, q) <=
                      energy_Fq(s, p, g, u, q) * (1.0 + 1e-12));
            }
    }
}

TEST_CASE("the norm on the two-cell example") {
    TwoCell tc;
    const ScalarField u({0.0, 0.5, 1.0});
    CHECK(sobolev_norm_N(tc.space, tc.part, tc.graph, u, 2.0) ==
          doctest::Approx(std::sqrt(5.8125)).epsilon(1e-14));
    CHECK(sobolev_norm_N(tc.space, tc.part, tc.graph, ScalarField(3, 0.0), 2.0) == 0.0);

    Rng rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        ScalarField v = random_field(tc.space, rng);
        ScalarField v2 = v;
        for (auto& x : v2.values) x *= 2.0;
        const double n1 = sobolev_norm_N(tc.space, tc.part, tc.graph, v, 2.0);
        const double n2 = sobolev_norm_N(tc.space, tc.part, tc.graph, v2, 2.0);
        CHECK(n2 == doctest::Approx(2.0 * n1).epsilon(1e-12));
    }
}

TEST_CASE("embedding: norm identity and linearity") {
    Rng rng(47);
    const Space s = make_interval(35);
    const Partition p = build_partition(s, 0.17);
    const NeighborGraph g = neighbor_graph(s, p);
    for (double q : {1.5, 2.0, 3.0}) {
        for (int trial = 0; trial < 10; ++trial) {
            const ScalarField u = random_field(s, rng);
            const auto seq = phi_embedding(s, p, g, u, q);
            double acc = 0.0;
            for (double v : seq) acc += std::pow(std::abs(v), q);
            const double norm = std::pow(acc, 1.0 / q);
            const double n = sobolev_norm_N(s, p, g, u, q);
            CHECK(std::abs(norm - n) <= 1e-12 * std::max(1.0, n));
        }
        // linearity, entrywise
        const ScalarField u = random_field(s, rng);
        const ScalarField v = random_field(s, rng);
        ScalarField w(s.size(), 0.0);
        for (std::size_t i = 0; i < s.size(); ++i) w[i] = u[i] + v[i];
        const auto eu = phi_embedding(s, p, g, u, q);
        const auto ev = phi_embedding(s, p, g, v, q);
        const auto ew = phi_embedding(s, p, g, w, q);
        REQUIRE(eu.size() == ew.size());
        for (std::size_t k = 0; k < ew.size(); ++k)
            CHECK(std::abs(ew[k] - eu[k] - ev[k]) <= 1e-12);
    }
    SUBCASE("zero field embeds to the zero sequence") {
        const auto seq = phi_embedding(s, p, g, ScalarField(s.size(), 0.0), 2.0);
        for (double v : seq) CHECK(v == 0.0);
    }
}

TEST_CASE("clarkson residuals") {
    const Space s = make_interval(50);
    const Partition p = build_partition(s, 0.11);
    const NeighborGraph g = neighbor_graph(s, p);
    Rng rng(7);

    SUBCASE("v = 0 at q = 2 gives an exactly zero identity residual") {
        const ScalarField u = random_field(s, rng);
        const ClarksonResult res =
            clarkson_residual(s, p, g, u, ScalarField(s.size(), 0.0), 2.0);
        REQUIRE(res.identity_residual.has_value());
        CHECK(*res.identity_residual == 0.0);
    }
    SUBCASE("random pairs at q = 3: first inequality") {
        for (int trial = 0; trial < 25; ++trial) {
            const ScalarField u = random_field(s, rng);
            const ScalarField v = random_field(s, rng);
            const ClarksonResult res = clarkson_residual(s, p, g, u, v, 3.0);
            CHECK(res.inequality_residual >= -1e-10 * res.scale);
        }
    }
    SUBCASE("random pairs at q = 1.5: second inequality") {
        for (int trial = 0; trial < 25; ++trial) {
            const ScalarField u = random_field(s, rng);
            const ScalarField v = random_field(s, rng);
            const ClarksonResult res = clarkson_residual(s, p, g, u, v, 1.5);
            CHECK(res.inequality_residual >= -1e-10 * std::max(1.0, res.scale));
        }
    }
    SUBCASE("random pairs at q = 2: parallelogram identity") {
        for (int trial = 0; trial < 25; ++trial) {
            const ScalarField u = random_field(s, rng);
            const ScalarField v = random_field(s, rng);
            const ClarksonResult res = clarkson_residual(s, p, g, u, v, 2.0);
            REQUIRE(res.identity_residual.has_value());
            CHECK(std::abs(*res.identity_residual) <=
                  1e-9 * std::max(1e-300, res.identity_scale));
        }
    }
}

TEST_CASE("uniform convexity modulus") {
    const Space s = make_interval(50);
    const Partition p = build_partition(s, 0.11);
    const NeighborGraph g = neighbor_graph(s, p);
    Rng rng(13);
    for (double q : {2.0, 3.0}) {
        for (int trial = 0; trial < 20; ++trial) {
            ScalarField u = random_field(s, rng);
            ScalarField v = random_field(s, rng);
            const double nu = sobolev_norm_N(s, p, g, u, q);
            const double nv = sobolev_norm_N(s, p, g, v, q);
            REQUIRE(nu > 0.0);
            REQUIRE(nv > 0.0);
            for (auto& x : u.values) x /= nu;
            for (auto& x : v.values) x /= nv;
            ScalarField mid(s.size(), 0.0), diff(s.size(), 0.0);
            for (std::size_t i = 0; i < s.size(); ++i) {
                mid[i] = 0.5 * (u[i] + v[i]);
                diff[i] = u[i] - v[i];
            }
            const double lhs = sobolev_norm_N(s, p, g, mid, q);
            const double r = sobolev_norm_N(s, p, g, diff, q);
            CHECK(lhs <= 1.0 - convexity_modulus(r, q) + 1e-9);
        }
    }
}

TEST_CASE("energy is insensitive to constant shifts") {
    Rng rng(3);
    const Space s = make_grid2d(8);
    const Partition p = build_partition(s, 0.3);
    const NeighborGraph g = neighbor_graph(s, p);
    for (double q : {1.5, 2.0, 3.0}) {
        const ScalarField u = random_field(s, rng);
        ScalarField shifted = u;
        for (auto& v : shifted.values) v += 17.5;
        const double f0 = energy_Fq(s, p, g, u, q);
        const double f1 = energy_Fq(s, p, g, shifted, q);
        CHECK(std::abs(f0 - f1) <= 1e-10 * std::max(1.0, f0));
    }
}

TEST_CASE("homogeneity to 1e-12 relative") {
    Rng rng(29);
    const Space s = make_interval(45);
    const Partition p = build_partition(s, 0.13);
    const NeighborGraph g = neighbor_graph(s, p);
    for (double q : {1.5, 2.0, 3.0}) {
        const ScalarField u = random_field(s, rng);
        const double lambda = rng.uniform(0.5, 3.0);
        ScalarField su = u;
        for (auto& v : su.values) v *= lambda;
        const double f = energy_Fq(s, p, g, u, q);
        const double fs = energy_Fq(s, p, g, su, q);
        CHECK(std::abs(fs - std::pow(lambda, q) * f) <= 1e-12 * std::max(1.0, fs));
    }
}

TEST_CASE("energy ladder") {
    SUBCASE("constant field: all energies vanish (up to roundoff in the means)") {
        const Space s = make_interval(200);
        const EnergyLadder ladder =
            energy_ladder(s, ScalarField(s.size(), 3.0), 2.0, {0.2, 0.1, 0.05}, std::nullopt);
        for (double e : ladder.energies) CHECK(e <= 1e-24);
        CHECK(ladder.ratios.empty());
    }
    SUBCASE("linear field on interval(500) stays inside the sandwich") {
        const Space s = make_interval(500);
        Rng rng(1);
        const ScalarField u = make_field(s, "linear", rng);
        const EnergyLadder ladder = energy_ladder(s, u, 2.0, {0.2, 0.1, 0.05}, 1.0);
        CHECK(ladder.sandwich_ok);
        for (double r : ladder.ratios) {
            CHECK(r >= ladder.sandwich_lower);
            CHECK(r <= ladder.sandwich_upper);
        }
    }
    SUBCASE("deltas must decrease and be nonempty") {
        const Space s = make_interval(50);
        CHECK_THROWS_AS(energy_ladder(s, ScalarField(50, 1.0), 2.0, {}, std::nullopt),
                        ConfigError);
        CHECK_THROWS_AS(
            energy_ladder(s, ScalarField(50, 1.0), 2.0, {0.1, 0.2}, std::nullopt),
            ConfigError);
    }
    SUBCASE("sub-resolution delta downgrades to a warning") {
        const Space s = make_interval(20);
        const EnergyLadder ladder = energy_ladder(s, ScalarField(20, 1.0), 2.0,
                                                  {0.5, 0.01}, std::nullopt);
        CHECK(ladder.warnings.size() == 1);
    }
}
