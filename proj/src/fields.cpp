#include "msob/fields.hpp"

#include <algorithm>
#include <cmath>

namespace msob {

ScalarField random_lipschitz_field(const Space& space, double bound, Rng& rng) {
    const std::size_t n = space.size();
    std::vector<double> raw(n);
    for (std::size_t i = 0; i < n; ++i) raw[i] = rng.uniform();
    ScalarField out(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        double v = raw[x];
        for (std::size_t y = 0; y < n; ++y)
            v = std::min(v, raw[y] + bound * space.dist(x, y));
        out[x] = v;
    }
    return out;
}

ScalarField make_field(const Space& space, const std::string& spec, Rng& rng) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    auto as_double = [&](double fallback) {
        if (arg.empty()) return fallback;
        try {
            return std::stod(arg);
        } catch (...) {
            throw ParseError("bad field parameter: '" + arg + "'");
        }
    };
    const std::size_t n = space.size();
    auto coord_required = [&]() {
        if (!space.has_coords())
            throw ConfigError("field '" + kind + "' needs coordinates on the space");
    };

    if (kind == "constant") return ScalarField(n, as_double(1.0));
    if (kind == "random") return random_lipschitz_field(space, as_double(1.0), rng);
    if (kind == "linear") {
        coord_required();
        ScalarField f(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) f[i] = space.coord(i)[0];
        return f;
    }
    if (kind == "sin") {
        coord_required();
        ScalarField f(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::sin(2.0 * M_PI * space.coord(i)[0]);
        return f;
    }
    if (kind == "abskink") {
        coord_required();
        ScalarField f(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) f[i] = std::abs(space.coord(i)[0] - 0.5);
        return f;
    }
    if (kind == "indicator") {
        coord_required();
        ScalarField f(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) f[i] = space.coord(i)[0] <= 0.5 ? 1.0 : 0.0;
        return f;
    }
    throw ParseError("unknown field spec: '" + spec + "'");
}

double analytic_interval_energy(const std::string& field_name, double q) {
    if (field_name == "linear") return 1.0;
    if (field_name == "sin") {
        // integral over [0,1] of |2 pi cos(2 pi x)|^q
        return std::pow(2.0 * M_PI, q) * std::tgamma((q + 1.0) / 2.0) /
               (std::sqrt(M_PI) * std::tgamma(q / 2.0 + 1.0));
    }
    if (field_name == "constant") return 0.0;
    throw ConfigError("no closed-form energy for field '" + field_name + "'");
}

}  // namespace msob
