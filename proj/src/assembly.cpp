#include "hpvem/assembly.hpp"

#include "hpvem/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace hpvem {

std::string to_string(BoundaryKind kind)
{
    return kind == BoundaryKind::dirichlet_zero ? "dirichlet" : "neumann";
}

CoefficientField CoefficientField::constant(const Eigen::Matrix2d& k, double v)
{
    CoefficientField f;
    f.diffusion = [k](const Point&, int) { return k; };
    if (v != 0.0) {
        f.potential = [v](const Point&, int) { return v; };
    }
    return f;
}

std::vector<int> GlobalDofMap::local_to_global(const PolyMesh& mesh,
                                               const DofLayout& layout) const
{
    const int cell = layout.cell;
    const std::vector<int>& loop = mesh.cells()[cell];
    const std::vector<CellEdge>& ces = mesh.cell_edges(cell);
    std::vector<int> out(layout.size);
    for (int i = 0; i < layout.n_vertices; ++i) {
        out[layout.vertex_dof(i)] = loop[i];
        const int pe = layout.edge_degrees[i];
        const int e = ces[i].edge;
        if (edge_count[e] != pe - 1) {
            throw ConsistencyError("cell " + std::to_string(cell) + " edge " + std::to_string(e) +
                                   ": local edge degree " + std::to_string(pe) +
                                   " does not match the global map");
        }
        for (int k = 1; k < pe; ++k) {
            const int slot = ces[i].forward ? k - 1 : pe - 1 - k;
            out[layout.edge_node_dof(i, k)] = edge_offset[e] + slot;
        }
    }
    if (cell_count[cell] != layout.n_moments) {
        throw ConsistencyError("cell " + std::to_string(cell) +
                               ": moment count does not match the global map");
    }
    for (int a = 0; a < layout.n_moments; ++a) {
        out[layout.moment_dof(a)] = cell_offset[cell] + a;
    }
    return out;
}

GlobalDofMap build_dof_map(const PolyMesh& mesh, const DegreeMap& degrees,
                           const BoundaryCondition& bc)
{
    validate_degree_map(mesh, degrees);
    GlobalDofMap map;
    map.bc = bc;
    int next = mesh.num_vertices();
    const std::vector<bool> boundary_vertex = mesh.boundary_vertex_mask();
    map.on_boundary.assign(boundary_vertex.begin(), boundary_vertex.end());
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const int count = degrees.edge_degree[e] - 1;
        map.edge_offset.push_back(next);
        map.edge_count.push_back(count);
        next += count;
        map.on_boundary.insert(map.on_boundary.end(), count, mesh.edges()[e].boundary);
    }
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const int count = poly_dim(degrees.cell_degree[c] - 2);
        map.cell_offset.push_back(next);
        map.cell_count.push_back(count);
        next += count;
        map.on_boundary.insert(map.on_boundary.end(), count, false);
    }
    map.n_total = next;
    map.free_index.assign(next, -1);
    int n_free = 0;
    for (int i = 0; i < next; ++i) {
        if (bc.kind == BoundaryKind::neumann || !map.on_boundary[i]) {
            map.free_index[i] = n_free++;
        }
    }
    map.n_free = n_free;
    return map;
}

namespace {

ElementCoefficients checked_coefficients(const CoefficientField& field, int region, int cell)
{
    if (!field.diffusion) {
        throw CoefficientError("no diffusion tensor given");
    }
    ElementCoefficients out;
    out.diffusion = [&field, region, cell](const Point& x) {
        const Eigen::Matrix2d k = field.diffusion(x, region);
        const double scale = k.cwiseAbs().maxCoeff();
        if (!k.allFinite() || std::abs(k(0, 1) - k(1, 0)) > 1e-12 * scale) {
            throw CoefficientError("diffusion tensor not symmetric on cell " +
                                   std::to_string(cell));
        }
        const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(
                                       k, Eigen::EigenvaluesOnly)
                                       .eigenvalues();
        if (!(ev[0] > 0.0)) {
            throw CoefficientError("diffusion tensor not positive definite on cell " +
                                   std::to_string(cell));
        }
        return k;
    };
    if (field.potential) {
        out.potential = [&field, region, cell](const Point& x) {
            const double v = field.potential(x, region);
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw CoefficientError("negative or invalid potential on cell " +
                                       std::to_string(cell));
            }
            return v;
        };
    }
    return out;
}

} // namespace

LocalMatrices cell_matrices(const PolyMesh& mesh, const DegreeMap& degrees, int cell,
                            const CoefficientField& coeffs, const AssemblyOptions& options)
{
    const std::vector<Point> pts = mesh.cell_points(cell);
    const int p = degrees.cell_degree[cell];
    const LocalSpace space(pts, p, degrees.local_edge_degrees(mesh, cell), cell,
                           2 * p + options.quad_extra);
    const int region = coeffs.region ? coeffs.region(mesh.cell_centroid(cell)) : 0;
    return local_matrices(space, checked_coefficients(coeffs, region, cell), options.stab);
}

SystemMatrices assemble(const PolyMesh& mesh, const DegreeMap& degrees,
                        const CoefficientField& coeffs, const BoundaryCondition& bc,
                        const AssemblyOptions& options)
{
    SystemMatrices sys;
    sys.dofs = build_dof_map(mesh, degrees, bc);
    const GlobalDofMap& map = sys.dofs;

    std::vector<Eigen::Triplet<double>> ta;
    std::vector<Eigen::Triplet<double>> tm;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const LocalMatrices local = cell_matrices(mesh, degrees, c, coeffs, options);
        const DofLayout layout = dof_layout(static_cast<int>(mesh.cells()[c].size()),
                                            degrees.cell_degree[c],
                                            degrees.local_edge_degrees(mesh, c), c);
        const std::vector<int> global = map.local_to_global(mesh, layout);
        const int n = layout.size;
        for (int i = 0; i < n; ++i) {
            const int gi = map.free_index[global[i]];
            if (gi < 0) {
                continue;
            }
            for (int j = 0; j < n; ++j) {
                const int gj = map.free_index[global[j]];
                if (gj < 0) {
                    continue;
                }
                ta.emplace_back(gi, gj, local.stiffness(i, j) + local.potential(i, j));
                tm.emplace_back(gi, gj, local.mass(i, j));
            }
        }
    }
    sys.A.resize(map.n_free, map.n_free);
    sys.M.resize(map.n_free, map.n_free);
    sys.A.setFromTriplets(ta.begin(), ta.end());
    sys.M.setFromTriplets(tm.begin(), tm.end());
    sys.A.makeCompressed();
    sys.M.makeCompressed();
    return sys;
}

Eigen::VectorXd interpolate_global(const PolyMesh& mesh, const DegreeMap& degrees,
                                   const GlobalDofMap& dofs,
                                   const std::function<double(const Point&)>& f)
{
    Eigen::VectorXd total = Eigen::VectorXd::Zero(dofs.n_total);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const std::vector<Point> pts = mesh.cell_points(c);
        const LocalSpace space(pts, degrees.cell_degree[c], degrees.local_edge_degrees(mesh, c),
                               c);
        const Eigen::VectorXd local = space.interpolate(f);
        const std::vector<int> global = dofs.local_to_global(mesh, space.layout());
        for (int i = 0; i < space.size(); ++i) {
            total[global[i]] = local[i];
        }
    }
    Eigen::VectorXd out(dofs.n_free);
    for (int i = 0; i < dofs.n_total; ++i) {
        if (dofs.free_index[i] >= 0) {
            out[dofs.free_index[i]] = total[i];
        }
    }
    return out;
}

void write_matrix(std::ostream& out, const SparseMatrix& m)
{
    char buf[96];
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", static_cast<int>(it.row()),
                          static_cast<int>(it.col()), it.value());
            out << buf;
        }
    }
}

void write_matrix_file(const std::string& path, const SparseMatrix& m)
{
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    write_matrix(out, m);
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

} // namespace hpvem
