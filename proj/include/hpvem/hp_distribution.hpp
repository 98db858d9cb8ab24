#pragma once

#include "hpvem/mesh.hpp"

#include <string>
#include <vector>

namespace hpvem {

enum class DegreeRegime { uniform, hp };

struct DegreeMap {
    std::vector<int> cell_degree;
    std::vector<int> edge_degree; ///< indexed like PolyMesh::edges()
    DegreeRegime regime = DegreeRegime::uniform;
    int parameter = 1; ///< p for uniform, mu for hp

    int max_degree() const;
    /// Degrees of the local edges of one cell, in loop order.
    std::vector<int> local_edge_degrees(const PolyMesh& mesh, int cell) const;
};

/// Edge degrees by the maximum rule: interior edges take the larger of their
/// two cell degrees, boundary edges the owning cell's degree.
DegreeMap assign_from_cell_degrees(const PolyMesh& mesh, std::vector<int> cell_degree);

DegreeMap assign_uniform(const PolyMesh& mesh, int p);

/// Cell in layer j gets degree mu * (j + 1), clipped to cap when cap > 0.
DegreeMap assign_hp(const LayeredMesh& layered, int mu, int cap = 0);

/// Throws ConsistencyError if the map does not fit the mesh or breaks the maximum rule.
void validate_degree_map(const PolyMesh& mesh, const DegreeMap& degrees);

std::string to_string(DegreeRegime regime);

} // namespace hpvem
