#pragma once

#include "hpvem/geometry.hpp"
#include "hpvem/vem_local.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace hpvem {

/// Star-shaped polygon about `center` with radii in [0.5, 1] * scale at sorted
/// random angles; nonconvex in general.
std::vector<Point> random_star_polygon(std::mt19937_64& rng, int n_vertices, double scale = 1.0,
                                       const Point& center = Point::Zero());

struct ProjectorErrors {
    double nabla = 0.0; ///< Pi_nabla on degree p
    double zero = 0.0;  ///< Pi0_{p-1} on degree p-1
    double grad = 0.0;  ///< Pi0_{p-1} grad on degree p
};

/// Largest relative coefficient errors of the three projectors on random
/// polynomials in the orthonormal basis of the element.
ProjectorErrors projector_reproduction(const LocalSpace& space, std::mt19937_64& rng,
                                       int samples = 3);

struct CheckResult {
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

/// Property suites behind the command-line `check` subcommand. `quick` trims the
/// sample counts.
std::vector<CheckResult> run_property_checks(bool quick, std::uint64_t seed);

} // namespace hpvem
