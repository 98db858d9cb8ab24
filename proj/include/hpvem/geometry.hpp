#pragma once

#include <Eigen/Core>

#include <array>
#include <span>
#include <vector>

namespace hpvem {

using Point = Eigen::Vector2d;

/// Axis-aligned rectangle [xmin, xmax] x [ymin, ymax].
struct Rectangle {
    double xmin = 0.0;
    double ymin = 0.0;
    double xmax = 1.0;
    double ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double diameter() const;
};

using Triangle = std::array<Point, 3>;

/// Largest ball contained in a convex region.
struct InscribedBall {
    Point center = Point::Zero();
    double radius = 0.0;
};

// Polygon helpers. Polygons are vertex loops without a repeated closing vertex.

double signed_area(std::span<const Point> poly);
Point polygon_centroid(std::span<const Point> poly);
double polygon_diameter(std::span<const Point> poly);
double min_edge_length(std::span<const Point> poly);

/// True when no vertex is reflex (collinear vertices are allowed).
bool is_convex(std::span<const Point> poly, double tol = 1e-12);

/// Keeps the part of a convex polygon with a.x <= b.
std::vector<Point> clip_halfplane(std::span<const Point> poly, const Point& a, double b);

/// Kernel of a counterclockwise polygon: intersection of the inner half-planes of its edges.
/// Empty result means the polygon is not star-shaped.
std::vector<Point> polygon_kernel(std::span<const Point> poly);

/// Chebyshev center and radius of a convex counterclockwise polygon.
InscribedBall chebyshev_ball(std::span<const Point> convex_poly);

/// Point inside or on the boundary of the polygon, within `tol`.
bool point_in_closure(std::span<const Point> poly, const Point& x, double tol = 1e-12);

/// Fan center used for subtriangulation: centroid for convex cells, kernel
/// Chebyshev center otherwise. Throws GeometryError when the kernel is empty.
Point star_center(std::span<const Point> poly);

/// Fan of triangles joining the star center to each edge.
std::vector<Triangle> subtriangulate(std::span<const Point> poly);

} // namespace hpvem
