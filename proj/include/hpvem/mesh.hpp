#pragma once

#include "hpvem/geometry.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hpvem {

struct Edge {
    std::array<int, 2> vertices{-1, -1}; ///< sorted, vertices[0] < vertices[1]
    std::array<int, 2> cells{-1, -1};    ///< cells[1] == -1 on the boundary
    bool boundary = true;
};

/// Local edge i of a cell joins loop positions i and i+1.
struct CellEdge {
    int edge = -1;
    bool forward = true; ///< local direction agrees with Edge::vertices[0] -> [1]
};

struct EdgeTable {
    std::vector<Edge> edges;
    std::vector<std::vector<CellEdge>> cell_edges;
};

/// Derives the undirected edge table of a polygonal cell complex.
/// Throws StructuralError for edges shared by more than two cells or
/// ArgumentError for invalid vertex indices.
EdgeTable build_edges(const std::vector<std::vector<int>>& cells, int n_vertices);

/// Conforming polygonal mesh with counterclockwise cells. Immutable once built.
class PolyMesh {
public:
    PolyMesh() = default;

    /// Cells with clockwise loops are reversed. Consecutive duplicate indices are dropped.
    PolyMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells,
             std::string domain_tag = "custom");

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<std::vector<int>>& cells() const { return cells_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::vector<CellEdge>& cell_edges(int cell) const { return cell_edges_[cell]; }
    const std::string& domain_tag() const { return domain_tag_; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    std::vector<Point> cell_points(int cell) const;
    double cell_area(int cell) const;
    Point cell_centroid(int cell) const;
    double cell_diameter(int cell) const;
    double total_area() const;
    double max_diameter() const;

    /// True when the vertex lies on a boundary edge.
    std::vector<bool> boundary_vertex_mask() const;

private:
    std::vector<Point> vertices_;
    std::vector<std::vector<int>> cells_;
    std::vector<Edge> edges_;
    std::vector<std::vector<CellEdge>> cell_edges_;
    std::string domain_tag_ = "custom";
};

/// Mesh with a layer index per cell, measured from a set of marked points.
struct LayeredMesh {
    PolyMesh mesh;
    std::vector<int> layer_of_cell;
    int n_layers = 1; ///< layers are numbered 0 .. n_layers-1
    std::vector<Point> singular_points;
    double sigma = 0.5;
};

struct CellRegularity {
    double d1 = 0.0; ///< min edge length / diameter
    double d2 = 0.0; ///< kernel inscribed radius / diameter
    bool below_threshold = false;
};

struct RegularityReport {
    double gamma_d1 = 1.0;
    double gamma_d2 = 1.0;
    double threshold = 0.0;
    std::vector<CellRegularity> cells;
    std::vector<int> flagged_cells;
};

RegularityReport check_regularity(const PolyMesh& mesh, double gamma_threshold);

// Generators.

PolyMesh generate_cartesian(int nx, int ny, const Rectangle& rect);

/// Uniform Cartesian mesh of (-1,1)^2 minus (-1,0]^2 with n cells per unit length.
PolyMesh generate_cartesian_lshape(int n);

/// Clipped Voronoi diagram of `n_seeds` uniformly drawn seeds after
/// `lloyd_iterations` centroid updates.
PolyMesh generate_voronoi(int n_seeds, const Rectangle& rect, int lloyd_iterations,
                          std::uint64_t rng_seed);

/// Same as generate_voronoi with explicit initial seeds.
PolyMesh generate_voronoi_from_seeds(std::vector<Point> seeds, const Rectangle& rect,
                                     int lloyd_iterations, std::uint64_t rng_seed);

/// Layer 0 holds the cells whose closure touches a marked point; layer j the
/// unassigned cells sharing a vertex with layer j-1. Cells farther than
/// n_layers-1 steps get the last index.
LayeredMesh compute_layers(const PolyMesh& mesh, const std::vector<Point>& singular_points,
                           int n_layers);

enum class GradedDomain { lshape, square_checkerboard };

/// Nested-frame meshes geometrically graded towards the origin with n+1 layers.
LayeredMesh generate_graded(GradedDomain kind, int n, double sigma);

GradedDomain parse_graded_domain(const std::string& name);

// Text format: "polymesh 1", then "v x y", "c i0 i1 ...", optional "layer j"
// and "deg p" lines (one per cell, file order).

struct MeshFile {
    PolyMesh mesh;
    std::optional<std::vector<int>> layers;
    std::optional<std::vector<int>> degrees;
};

void write_mesh(std::ostream& out, const PolyMesh& mesh,
                const std::vector<int>* layers = nullptr,
                const std::vector<int>* degrees = nullptr);
void write_mesh_file(const std::string& path, const PolyMesh& mesh,
                     const std::vector<int>* layers = nullptr,
                     const std::vector<int>* degrees = nullptr);
MeshFile read_mesh(std::istream& in);
MeshFile read_mesh_file(const std::string& path);

} // namespace hpvem
