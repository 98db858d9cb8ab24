#include "hpvem/errors.hpp"
#include "hpvem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <utility>

namespace hpvem {

namespace {

/// Collects points and merges those closer than `tol`.
class VertexPool {
public:
    explicit VertexPool(double tol)
        : tol_(tol)
    {
    }

    int insert(const Point& p)
    {
        const long ix = static_cast<long>(std::floor(p.x() / tol_));
        const long iy = static_cast<long>(std::floor(p.y() / tol_));
        for (long dx = -1; dx <= 1; ++dx) {
            for (long dy = -1; dy <= 1; ++dy) {
                auto it = grid_.find({ix + dx, iy + dy});
                if (it == grid_.end()) {
                    continue;
                }
                for (int idx : it->second) {
                    if ((points_[idx] - p).norm() <= tol_) {
                        return idx;
                    }
                }
            }
        }
        const int idx = static_cast<int>(points_.size());
        points_.push_back(p);
        grid_[{ix, iy}].push_back(idx);
        return idx;
    }

    std::vector<Point> take() { return std::move(points_); }

private:
    double tol_;
    std::vector<Point> points_;
    std::map<std::pair<long, long>, std::vector<int>> grid_;
};

std::vector<Point> rectangle_polygon(const Rectangle& r)
{
    return {{r.xmin, r.ymin}, {r.xmax, r.ymin}, {r.xmax, r.ymax}, {r.xmin, r.ymax}};
}

/// Voronoi cell of seeds[i] clipped to the rectangle.
std::vector<Point> voronoi_cell(const std::vector<Point>& seeds, std::size_t i, const Rectangle& rect)
{
    std::vector<Point> cell = rectangle_polygon(rect);
    for (std::size_t j = 0; j < seeds.size() && !cell.empty(); ++j) {
        if (j == i) {
            continue;
        }
        // |x - s_i|^2 <= |x - s_j|^2  <=>  2 (s_j - s_i).x <= |s_j|^2 - |s_i|^2
        const Point a = 2.0 * (seeds[j] - seeds[i]);
        const double b = seeds[j].squaredNorm() - seeds[i].squaredNorm();
        cell = clip_halfplane(cell, a, b);
    }
    return cell;
}

PolyMesh mesh_from_polygons(const std::vector<std::vector<Point>>& polys, double tol,
                            const std::string& tag)
{
    VertexPool pool(tol);
    std::vector<std::vector<int>> cells;
    cells.reserve(polys.size());
    for (const auto& poly : polys) {
        std::vector<int> loop;
        for (const Point& p : poly) {
            loop.push_back(pool.insert(p));
        }
        cells.push_back(std::move(loop));
    }
    return PolyMesh(pool.take(), std::move(cells), tag);
}

void validate_rectangle(const Rectangle& rect)
{
    if (!(rect.width() > 0.0) || !(rect.height() > 0.0)) {
        throw ArgumentError("degenerate rectangle");
    }
}

Point rotate_quarter(const Point& p, int quarter_turns)
{
    Point q = p;
    for (int k = 0; k < quarter_turns; ++k) {
        q = Point(-q.y(), q.x());
    }
    return q;
}

} // namespace

PolyMesh generate_cartesian(int nx, int ny, const Rectangle& rect)
{
    if (nx < 1 || ny < 1) {
        throw ArgumentError("Cartesian mesh needs nx, ny >= 1");
    }
    validate_rectangle(rect);
    std::vector<Point> vertices;
    vertices.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1));
    for (int j = 0; j <= ny; ++j) {
        for (int i = 0; i <= nx; ++i) {
            vertices.emplace_back(rect.xmin + rect.width() * i / nx,
                                  rect.ymin + rect.height() * j / ny);
        }
    }
    std::vector<std::vector<int>> cells;
    cells.reserve(static_cast<std::size_t>(nx) * ny);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const int v = j * (nx + 1) + i;
            cells.push_back({v, v + 1, v + nx + 2, v + nx + 1});
        }
    }
    return PolyMesh(std::move(vertices), std::move(cells), "cartesian");
}

PolyMesh generate_cartesian_lshape(int n)
{
    if (n < 1) {
        throw ArgumentError("L-shape Cartesian mesh needs n >= 1");
    }
    const int m = 2 * n;
    std::vector<int> index((m + 1) * (m + 1), -1);
    std::vector<Point> vertices;
    std::vector<std::vector<int>> cells;
    auto vertex = [&](int i, int j) {
        int& idx = index[j * (m + 1) + i];
        if (idx < 0) {
            idx = static_cast<int>(vertices.size());
            vertices.emplace_back(-1.0 + 2.0 * i / m, -1.0 + 2.0 * j / m);
        }
        return idx;
    };
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            if (i < n && j < n) {
                continue; // removed quadrant (-1,0]^2
            }
            cells.push_back({vertex(i, j), vertex(i + 1, j), vertex(i + 1, j + 1), vertex(i, j + 1)});
        }
    }
    return PolyMesh(std::move(vertices), std::move(cells), "lshape");
}

PolyMesh generate_voronoi_from_seeds(std::vector<Point> seeds, const Rectangle& rect,
                                     int lloyd_iterations, std::uint64_t rng_seed)
{
    if (seeds.empty()) {
        throw ArgumentError("Voronoi mesh needs at least one seed");
    }
    if (lloyd_iterations < 0) {
        throw ArgumentError("lloyd_iterations must be nonnegative");
    }
    validate_rectangle(rect);
    const double diam = rect.diameter();
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    for (Point& s : seeds) {
        s += 1e-12 * diam * Point(unit(rng), unit(rng));
    }
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        for (std::size_t j = i + 1; j < seeds.size(); ++j) {
            if ((seeds[i] - seeds[j]).norm() < 1e-10 * diam) {
                throw GeometryError("duplicate Voronoi seeds");
            }
        }
    }
    std::vector<std::vector<Point>> polys(seeds.size());
    for (int it = 0;; ++it) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            polys[i] = voronoi_cell(seeds, i, rect);
            if (polys[i].size() < 3 || signed_area(polys[i]) <= 0.0) {
                throw GeometryError("empty Voronoi cell for seed " + std::to_string(i));
            }
        }
        if (it == lloyd_iterations) {
            break;
        }
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            seeds[i] = polygon_centroid(polys[i]);
        }
    }
    return mesh_from_polygons(polys, 1e-9 * diam, "voronoi");
}

PolyMesh generate_voronoi(int n_seeds, const Rectangle& rect, int lloyd_iterations,
                          std::uint64_t rng_seed)
{
    if (n_seeds < 1) {
        throw ArgumentError("Voronoi mesh needs n_seeds >= 1");
    }
    validate_rectangle(rect);
    std::mt19937_64 rng(rng_seed);
    std::uniform_real_distribution<double> ux(rect.xmin, rect.xmax);
    std::uniform_real_distribution<double> uy(rect.ymin, rect.ymax);
    std::vector<Point> seeds;
    seeds.reserve(n_seeds);
    for (int i = 0; i < n_seeds; ++i) {
        const double x = ux(rng);
        const double y = uy(rng);
        seeds.emplace_back(x, y);
    }
    return generate_voronoi_from_seeds(std::move(seeds), rect, lloyd_iterations, rng_seed + 1);
}

LayeredMesh generate_graded(GradedDomain kind, int n, double sigma)
{
    if (n < 0) {
        throw ArgumentError("graded mesh needs n >= 0");
    }
    if (!(sigma > 0.0 && sigma < 1.0)) {
        throw ArgumentError("grading parameter sigma must lie in (0,1)");
    }
    // scale[j] is the outer size of the frame in layer j; layer n reaches the domain boundary.
    std::vector<double> scale(n + 1);
    for (int j = 0; j <= n; ++j) {
        scale[j] = std::pow(sigma, n - j);
    }
    std::vector<std::vector<Point>> polys;
    std::vector<int> layers;
    std::string tag;
    if (kind == GradedDomain::lshape) {
        tag = "lshape";
        // The diagonal from the re-entrant corner to (1,1) splits every frame in two.
        const double s0 = scale[0];
        polys.push_back({{0, 0}, {0, -s0}, {s0, -s0}, {s0, s0}});
        polys.push_back({{0, 0}, {s0, s0}, {-s0, s0}, {-s0, 0}});
        layers.insert(layers.end(), {0, 0});
        for (int j = 1; j <= n; ++j) {
            const double a = scale[j - 1];
            const double b = scale[j];
            polys.push_back({{0, -b}, {b, -b}, {b, b}, {a, a}, {a, -a}, {0, -a}});
            polys.push_back({{a, a}, {b, b}, {-b, b}, {-b, 0}, {-a, 0}, {-a, a}});
            layers.insert(layers.end(), {j, j});
        }
    } else {
        tag = "checkerboard";
        // Concentric square frames about the origin, split along the axes.
        for (int j = 0; j <= n; ++j) {
            const double b = scale[j];
            for (int q = 0; q < 4; ++q) {
                std::vector<Point> poly;
                if (j == 0) {
                    poly = {{0, 0}, {b, 0}, {b, b}, {0, b}};
                } else {
                    const double a = scale[j - 1];
                    poly = {{a, 0}, {b, 0}, {b, b}, {0, b}, {0, a}, {a, a}};
                }
                for (Point& p : poly) {
                    p = rotate_quarter(p, q);
                }
                polys.push_back(std::move(poly));
                layers.push_back(j);
            }
        }
    }
    const double tol = 1e-3 * scale[0];
    LayeredMesh out = compute_layers(mesh_from_polygons(polys, tol, tag), {Point(0, 0)}, n + 1);
    out.sigma = sigma;
    if (out.layer_of_cell != layers) {
        throw GeometryError("graded mesh layers disagree with the frame construction");
    }
    return out;
}

GradedDomain parse_graded_domain(const std::string& name)
{
    if (name == "lshape" || name == "Lshape") {
        return GradedDomain::lshape;
    }
    if (name == "square_checkerboard" || name == "checkerboard") {
        return GradedDomain::square_checkerboard;
    }
    throw ArgumentError("unsupported graded domain kind: " + name);
}

} // namespace hpvem
