#include "hpvem/geometry.hpp"

#include "hpvem/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hpvem {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double distance_to_segment(const Point& x, const Point& a, const Point& b)
{
    const Point d = b - a;
    const double len2 = d.squaredNorm();
    if (len2 == 0.0) {
        return (x - a).norm();
    }
    const double t = std::clamp((x - a).dot(d) / len2, 0.0, 1.0);
    return (x - (a + t * d)).norm();
}

std::vector<Point> drop_duplicate_points(std::span<const Point> poly, double tol)
{
    std::vector<Point> out;
    out.reserve(poly.size());
    for (const Point& p : poly) {
        if (out.empty() || (p - out.back()).norm() > tol) {
            out.push_back(p);
        }
    }
    while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) {
        out.pop_back();
    }
    return out;
}

} // namespace

double Rectangle::diameter() const { return std::hypot(width(), height()); }

double signed_area(std::span<const Point> poly)
{
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        a += cross(poly[i], poly[(i + 1) % n]);
    }
    return 0.5 * a;
}

Point polygon_centroid(std::span<const Point> poly)
{
    // Shift to the first vertex to limit cancellation on small cells far from the origin.
    const std::size_t n = poly.size();
    const Point o = poly[0];
    double a = 0.0;
    Point c = Point::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = poly[i] - o;
        const Point q = poly[(i + 1) % n] - o;
        const double w = cross(p, q);
        a += w;
        c += w * (p + q);
    }
    if (a == 0.0) {
        throw GeometryError("centroid of a polygon with zero area");
    }
    return o + c / (3.0 * a);
}

double polygon_diameter(std::span<const Point> poly)
{
    double d = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        for (std::size_t j = i + 1; j < poly.size(); ++j) {
            d = std::max(d, (poly[i] - poly[j]).norm());
        }
    }
    return d;
}

double min_edge_length(std::span<const Point> poly)
{
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
        m = std::min(m, (poly[(i + 1) % poly.size()] - poly[i]).norm());
    }
    return m;
}

bool is_convex(std::span<const Point> poly, double tol)
{
    const std::size_t n = poly.size();
    const double scale = polygon_diameter(poly);
    const double orientation = signed_area(poly) >= 0.0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly[(i + n - 1) % n];
        const Point& b = poly[i];
        const Point& c = poly[(i + 1) % n];
        if (orientation * cross(b - a, c - b) < -tol * scale * scale) {
            return false;
        }
    }
    return true;
}

std::vector<Point> clip_halfplane(std::span<const Point> poly, const Point& a, double b)
{
    std::vector<Point> out;
    const std::size_t n = poly.size();
    if (n == 0) {
        return out;
    }
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        const double fp = a.dot(p) - b;
        const double fq = a.dot(q) - b;
        if (fp <= 0.0) {
            out.push_back(p);
        }
        if ((fp < 0.0 && fq > 0.0) || (fp > 0.0 && fq < 0.0)) {
            const double t = fp / (fp - fq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

std::vector<Point> polygon_kernel(std::span<const Point> poly)
{
    const std::size_t n = poly.size();
    double xmin = poly[0].x(), xmax = poly[0].x(), ymin = poly[0].y(), ymax = poly[0].y();
    for (const Point& p : poly) {
        xmin = std::min(xmin, p.x());
        xmax = std::max(xmax, p.x());
        ymin = std::min(ymin, p.y());
        ymax = std::max(ymax, p.y());
    }
    std::vector<Point> kernel{{xmin, ymin}, {xmax, ymin}, {xmax, ymax}, {xmin, ymax}};
    for (std::size_t i = 0; i < n && !kernel.empty(); ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        const Point d = q - p;
        const double len = d.norm();
        if (len == 0.0) {
            continue;
        }
        const Point normal(d.y() / len, -d.x() / len); // outward for ccw loops
        kernel = clip_halfplane(kernel, normal, normal.dot(p));
    }
    const double tol = 1e-14 * polygon_diameter(poly);
    kernel = drop_duplicate_points(kernel, tol);
    if (kernel.size() < 3) {
        kernel.clear();
    }
    return kernel;
}

InscribedBall chebyshev_ball(std::span<const Point> convex_poly)
{
    const double scale = polygon_diameter(convex_poly);
    std::vector<Point> poly = drop_duplicate_points(convex_poly, 1e-14 * scale);
    const std::size_t n = poly.size();
    if (n < 3) {
        return {};
    }
    std::vector<Point> normals;
    std::vector<double> offsets;
    for (std::size_t i = 0; i < n; ++i) {
        const Point d = poly[(i + 1) % n] - poly[i];
        const double len = d.norm();
        if (len <= 1e-14 * scale) {
            continue;
        }
        normals.emplace_back(d.y() / len, -d.x() / len);
        offsets.push_back(normals.back().dot(poly[i]));
    }
    // The optimum of  max r  s.t.  n_i.c + r <= b_i  sits at a vertex of the
    // constraint polytope: three active constraints.
    InscribedBall best;
    best.center = polygon_centroid(poly);
    best.radius = 0.0;
    const std::size_t m = normals.size();
    const double feas_tol = 1e-12 * scale;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            for (std::size_t k = j + 1; k < m; ++k) {
                Eigen::Matrix3d lhs;
                lhs << normals[i].x(), normals[i].y(), 1.0, normals[j].x(), normals[j].y(), 1.0,
                    normals[k].x(), normals[k].y(), 1.0;
                const Eigen::Vector3d rhs(offsets[i], offsets[j], offsets[k]);
                Eigen::FullPivLU<Eigen::Matrix3d> lu(lhs);
                if (!lu.isInvertible() || std::abs(lhs.determinant()) < 1e-12) {
                    continue;
                }
                const Eigen::Vector3d sol = lu.solve(rhs);
                if (sol.z() <= best.radius) {
                    continue;
                }
                const Point c(sol.x(), sol.y());
                bool feasible = true;
                for (std::size_t l = 0; l < m && feasible; ++l) {
                    feasible = normals[l].dot(c) + sol.z() <= offsets[l] + feas_tol;
                }
                if (feasible) {
                    best.center = c;
                    best.radius = sol.z();
                }
            }
        }
    }
    return best;
}

bool point_in_closure(std::span<const Point> poly, const Point& x, double tol)
{
    const std::size_t n = poly.size();
    const double scale = std::max(polygon_diameter(poly), 1e-300);
    for (std::size_t i = 0; i < n; ++i) {
        if (distance_to_segment(x, poly[i], poly[(i + 1) % n]) <= tol * scale) {
            return true;
        }
    }
    // Crossing-number test for strict interior points.
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = poly[i];
        const Point& b = poly[j];
        if ((a.y() > x.y()) != (b.y() > x.y())) {
            const double xc = a.x() + (x.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y());
            if (x.x() < xc) {
                inside = !inside;
            }
        }
    }
    return inside;
}

Point star_center(std::span<const Point> poly)
{
    Point center;
    if (is_convex(poly)) {
        center = polygon_centroid(poly);
    } else {
        const std::vector<Point> kernel = polygon_kernel(poly);
        if (kernel.empty()) {
            throw GeometryError("polygon is not star-shaped: empty kernel");
        }
        const InscribedBall ball = chebyshev_ball(kernel);
        if (ball.radius <= 1e-8 * polygon_diameter(poly)) {
            throw GeometryError("polygon kernel has no interior ball");
        }
        center = ball.center;
    }
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % n];
        if (cross(a - center, b - center) <= 0.0 && (b - a).norm() > 0.0) {
            throw GeometryError("star center does not see every edge of the polygon");
        }
    }
    return center;
}

std::vector<Triangle> subtriangulate(std::span<const Point> poly)
{
    const Point c = star_center(poly);
    std::vector<Triangle> tris;
    tris.reserve(poly.size());
    for (std::size_t i = 0; i < poly.size(); ++i) {
        tris.push_back({c, poly[i], poly[(i + 1) % poly.size()]});
    }
    return tris;
}

} // namespace hpvem
