#pragma once

#include "hpvem/hp_distribution.hpp"
#include "hpvem/mesh.hpp"
#include "hpvem/vem_local.hpp"

#include <Eigen/Sparse>

#include <functional>
#include <string>
#include <vector>

namespace hpvem {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class BoundaryKind { dirichlet_zero, neumann };

struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::dirichlet_zero;
};

std::string to_string(BoundaryKind kind);

/// Diffusion tensor and potential. Each cell carries a region tag computed from
/// its centroid, so piecewise data never switches branch inside a cell.
struct CoefficientField {
    std::function<Eigen::Matrix2d(const Point&, int region)> diffusion;
    std::function<double(const Point&, int region)> potential; ///< empty means V = 0
    std::function<int(const Point& centroid)> region;            ///< empty means region 0

    static CoefficientField constant(const Eigen::Matrix2d& k, double v = 0.0);
};

/// Global numbering: vertices, then internal edge nodes in edge-table order,
/// then internal moments cell by cell.
struct GlobalDofMap {
    BoundaryCondition bc;
    int n_total = 0;
    int n_free = 0;
    std::vector<int> edge_offset;   ///< first index of the p_E - 1 internal nodes of each edge
    std::vector<int> edge_count;    ///< p_E - 1
    std::vector<int> cell_offset;   ///< first moment index of each cell
    std::vector<int> cell_count;    ///< pi_{p-2}
    std::vector<int> free_index;    ///< total index -> free index, -1 when eliminated
    std::vector<bool> on_boundary;  ///< total index lies on the boundary trace

    /// Total (unreduced) indices of a cell's local DOFs, in DofLayout order.
    std::vector<int> local_to_global(const PolyMesh& mesh, const DofLayout& layout) const;
};

GlobalDofMap build_dof_map(const PolyMesh& mesh, const DegreeMap& degrees,
                           const BoundaryCondition& bc);

struct SystemMatrices {
    SparseMatrix A; ///< stiffness plus potential, free x free
    SparseMatrix M; ///< mass, free x free
    GlobalDofMap dofs;
};

struct AssemblyOptions {
    StabChoice stab;
    int quad_extra = 2; ///< quadrature exactness 2p + quad_extra per element
};

SystemMatrices assemble(const PolyMesh& mesh, const DegreeMap& degrees,
                        const CoefficientField& coeffs, const BoundaryCondition& bc,
                        const AssemblyOptions& options = {});

/// Local matrices of one cell with the coefficients checked at the quadrature points.
LocalMatrices cell_matrices(const PolyMesh& mesh, const DegreeMap& degrees, int cell,
                            const CoefficientField& coeffs, const AssemblyOptions& options = {});

/// Free-DOF vector of a function: vertex and edge node values, moments by quadrature.
Eigen::VectorXd interpolate_global(const PolyMesh& mesh, const DegreeMap& degrees,
                                   const GlobalDofMap& dofs,
                                   const std::function<double(const Point&)>& f);

/// Coordinate-format dump, one "i j value" line per stored entry (0-based).
void write_matrix(std::ostream& out, const SparseMatrix& m);
void write_matrix_file(const std::string& path, const SparseMatrix& m);

} // namespace hpvem
