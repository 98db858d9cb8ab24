#include "hpvem/hp_distribution.hpp"

#include "hpvem/errors.hpp"

#include <algorithm>

namespace hpvem {

int DegreeMap::max_degree() const
{
    int p = 0;
    for (int d : cell_degree) {
        p = std::max(p, d);
    }
    return p;
}

std::vector<int> DegreeMap::local_edge_degrees(const PolyMesh& mesh, int cell) const
{
    std::vector<int> out;
    for (const CellEdge& ce : mesh.cell_edges(cell)) {
        out.push_back(edge_degree.at(ce.edge));
    }
    return out;
}

DegreeMap assign_from_cell_degrees(const PolyMesh& mesh, std::vector<int> cell_degree)
{
    if (static_cast<int>(cell_degree.size()) != mesh.num_cells()) {
        throw ArgumentError("one degree per cell is required");
    }
    for (int p : cell_degree) {
        if (p < 1) {
            throw ArgumentError("cell degrees must be >= 1");
        }
    }
    DegreeMap map;
    map.edge_degree.resize(mesh.num_edges());
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Edge& edge = mesh.edges()[e];
        int p = cell_degree[edge.cells[0]];
        if (!edge.boundary) {
            p = std::max(p, cell_degree[edge.cells[1]]);
        }
        map.edge_degree[e] = p;
    }
    map.cell_degree = std::move(cell_degree);
    return map;
}

DegreeMap assign_uniform(const PolyMesh& mesh, int p)
{
    if (p < 1) {
        throw ArgumentError("uniform degree must be >= 1");
    }
    DegreeMap map = assign_from_cell_degrees(mesh, std::vector<int>(mesh.num_cells(), p));
    map.regime = DegreeRegime::uniform;
    map.parameter = p;
    return map;
}

DegreeMap assign_hp(const LayeredMesh& layered, int mu, int cap)
{
    if (mu < 1) {
        throw ArgumentError("mu must be >= 1");
    }
    if (cap < 0) {
        throw ArgumentError("degree cap must be >= 0");
    }
    const PolyMesh& mesh = layered.mesh;
    if (static_cast<int>(layered.layer_of_cell.size()) != mesh.num_cells()) {
        throw ArgumentError("layer data missing for hp degree assignment");
    }
    std::vector<int> degrees(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const int j = layered.layer_of_cell[c];
        if (j < 0) {
            throw ArgumentError("cell " + std::to_string(c) + " has no layer");
        }
        degrees[c] = cap > 0 ? std::min(cap, mu * (j + 1)) : mu * (j + 1);
    }
    DegreeMap map = assign_from_cell_degrees(mesh, std::move(degrees));
    map.regime = DegreeRegime::hp;
    map.parameter = mu;
    return map;
}

void validate_degree_map(const PolyMesh& mesh, const DegreeMap& degrees)
{
    if (static_cast<int>(degrees.cell_degree.size()) != mesh.num_cells() ||
        static_cast<int>(degrees.edge_degree.size()) != mesh.num_edges()) {
        throw ConsistencyError("degree map does not match the mesh");
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const Edge& edge = mesh.edges()[e];
        int p = degrees.cell_degree[edge.cells[0]];
        if (!edge.boundary) {
            p = std::max(p, degrees.cell_degree[edge.cells[1]]);
        }
        if (degrees.edge_degree[e] != p) {
            throw ConsistencyError("edge " + std::to_string(e) + " has degree " +
                                   std::to_string(degrees.edge_degree[e]) + ", expected " +
                                   std::to_string(p));
        }
    }
}

std::string to_string(DegreeRegime regime)
{
    return regime == DegreeRegime::uniform ? "uniform" : "hp";
}

} // namespace hpvem
