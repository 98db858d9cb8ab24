#include "hpvem/mesh.hpp"

#include "hpvem/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <utility>

namespace hpvem {

EdgeTable build_edges(const std::vector<std::vector<int>>& cells, int n_vertices)
{
    EdgeTable table;
    table.cell_edges.resize(cells.size());
    std::map<std::pair<int, int>, int> index;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const auto& loop = cells[c];
        if (loop.size() < 3) {
            throw ArgumentError("cell " + std::to_string(c) + " has fewer than 3 vertices");
        }
        for (std::size_t i = 0; i < loop.size(); ++i) {
            const int a = loop[i];
            const int b = loop[(i + 1) % loop.size()];
            if (a < 0 || a >= n_vertices || b < 0 || b >= n_vertices) {
                throw ArgumentError("cell " + std::to_string(c) + " references vertex out of range");
            }
            if (a == b) {
                throw StructuralError("cell " + std::to_string(c) + " has a zero-length edge");
            }
            const auto key = std::minmax(a, b);
            auto [it, inserted] = index.try_emplace({key.first, key.second},
                                                    static_cast<int>(table.edges.size()));
            if (inserted) {
                Edge e;
                e.vertices = {key.first, key.second};
                e.cells = {static_cast<int>(c), -1};
                table.edges.push_back(e);
            } else {
                Edge& e = table.edges[it->second];
                if (e.cells[1] != -1) {
                    throw StructuralError("non-manifold edge (" + std::to_string(key.first) + ", " +
                                          std::to_string(key.second) + ") shared by 3+ cells");
                }
                if (e.cells[0] == static_cast<int>(c)) {
                    throw StructuralError("cell " + std::to_string(c) + " uses an edge twice");
                }
                e.cells[1] = static_cast<int>(c);
            }
            table.cell_edges[c].push_back({it->second, a == key.first});
        }
    }
    for (Edge& e : table.edges) {
        e.boundary = e.cells[1] == -1;
    }
    return table;
}

PolyMesh::PolyMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells,
                   std::string domain_tag)
    : vertices_(std::move(vertices))
    , cells_(std::move(cells))
    , domain_tag_(std::move(domain_tag))
{
    for (auto& loop : cells_) {
        loop.erase(std::unique(loop.begin(), loop.end()), loop.end());
        while (loop.size() > 1 && loop.front() == loop.back()) {
            loop.pop_back();
        }
        for (int v : loop) {
            if (v < 0 || v >= num_vertices()) {
                throw ArgumentError("cell references vertex out of range");
            }
        }
        std::vector<Point> pts;
        for (int v : loop) {
            pts.push_back(vertices_[v]);
        }
        if (loop.size() >= 3 && signed_area(pts) < 0.0) {
            std::reverse(loop.begin(), loop.end());
        }
    }
    EdgeTable table = build_edges(cells_, num_vertices());
    edges_ = std::move(table.edges);
    cell_edges_ = std::move(table.cell_edges);
    for (int c = 0; c < num_cells(); ++c) {
        if (cell_area(c) <= 0.0) {
            throw GeometryError("cell " + std::to_string(c) + " has zero area");
        }
    }
}

std::vector<Point> PolyMesh::cell_points(int cell) const
{
    std::vector<Point> pts;
    pts.reserve(cells_[cell].size());
    for (int v : cells_[cell]) {
        pts.push_back(vertices_[v]);
    }
    return pts;
}

double PolyMesh::cell_area(int cell) const { return signed_area(cell_points(cell)); }

Point PolyMesh::cell_centroid(int cell) const { return polygon_centroid(cell_points(cell)); }

double PolyMesh::cell_diameter(int cell) const { return polygon_diameter(cell_points(cell)); }

double PolyMesh::total_area() const
{
    double a = 0.0;
    for (int c = 0; c < num_cells(); ++c) {
        a += cell_area(c);
    }
    return a;
}

double PolyMesh::max_diameter() const
{
    double h = 0.0;
    for (int c = 0; c < num_cells(); ++c) {
        h = std::max(h, cell_diameter(c));
    }
    return h;
}

std::vector<bool> PolyMesh::boundary_vertex_mask() const
{
    std::vector<bool> mask(vertices_.size(), false);
    for (const Edge& e : edges_) {
        if (e.boundary) {
            mask[e.vertices[0]] = true;
            mask[e.vertices[1]] = true;
        }
    }
    return mask;
}

RegularityReport check_regularity(const PolyMesh& mesh, double gamma_threshold)
{
    RegularityReport report;
    report.threshold = gamma_threshold;
    report.cells.resize(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const std::vector<Point> pts = mesh.cell_points(c);
        const double h = polygon_diameter(pts);
        CellRegularity& r = report.cells[c];
        r.d1 = min_edge_length(pts) / h;
        const std::vector<Point> kernel = polygon_kernel(pts);
        r.d2 = kernel.empty() ? 0.0 : chebyshev_ball(kernel).radius / h;
        r.below_threshold = r.d1 < gamma_threshold || r.d2 < gamma_threshold;
        if (r.below_threshold) {
            report.flagged_cells.push_back(c);
        }
        report.gamma_d1 = std::min(report.gamma_d1, r.d1);
        report.gamma_d2 = std::min(report.gamma_d2, r.d2);
    }
    return report;
}

LayeredMesh compute_layers(const PolyMesh& mesh, const std::vector<Point>& singular_points,
                           int n_layers)
{
    if (n_layers < 1) {
        throw ArgumentError("n_layers must be at least 1");
    }
    const int nc = mesh.num_cells();
    std::vector<int> layer(nc, -1);
    std::deque<int> queue;
    for (int c = 0; c < nc; ++c) {
        const std::vector<Point> pts = mesh.cell_points(c);
        for (const Point& x : singular_points) {
            if (point_in_closure(pts, x, 1e-10)) {
                layer[c] = 0;
                queue.push_back(c);
                break;
            }
        }
    }
    if (queue.empty()) {
        throw ArgumentError("no cell touches a singular point");
    }
    std::vector<std::vector<int>> cells_of_vertex(mesh.num_vertices());
    for (int c = 0; c < nc; ++c) {
        for (int v : mesh.cells()[c]) {
            cells_of_vertex[v].push_back(c);
        }
    }
    // Breadth-first search over the vertex-sharing graph.
    while (!queue.empty()) {
        const int c = queue.front();
        queue.pop_front();
        for (int v : mesh.cells()[c]) {
            for (int nb : cells_of_vertex[v]) {
                if (layer[nb] < 0) {
                    layer[nb] = layer[c] + 1;
                    queue.push_back(nb);
                }
            }
        }
    }
    LayeredMesh out;
    out.mesh = mesh;
    out.n_layers = n_layers;
    out.singular_points = singular_points;
    out.layer_of_cell.resize(nc);
    for (int c = 0; c < nc; ++c) {
        // Disconnected cells (layer < 0) are treated as infinitely far.
        out.layer_of_cell[c] = (layer[c] < 0 || layer[c] > n_layers - 1) ? n_layers - 1 : layer[c];
    }
    return out;
}

} // namespace hpvem
