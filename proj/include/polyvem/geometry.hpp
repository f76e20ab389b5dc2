#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace polyvem {

using Point = Eigen::Vector2d;
using Polygon = std::vector<Point>;
using Triangle = std::array<Point, 3>;

double signed_area(std::span<const Point> poly);
Point area_centroid(std::span<const Point> poly);
double diameter(std::span<const Point> poly);

/// True when no two non-adjacent edges of the closed polyline touch.
bool is_simple(std::span<const Point> poly);

/// Convexity with collinear vertices allowed (cross products >= -tol * scale^2).
bool is_convex(std::span<const Point> poly, double tol = 1e-12);

bool point_in_polygon(std::span<const Point> poly, const Point& x);

/// Distance from x to the segment [a,b].
double segment_distance(const Point& a, const Point& b, const Point& x);

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d);

/// Keeps the part of a convex polygon where (x - origin) . normal <= 0.
Polygon clip_halfplane(const Polygon& poly, const Point& origin, const Point& normal);

/// Triangulates a simple CCW polygon: centroid fan when every fan triangle is
/// positively oriented, ear clipping otherwise.
std::vector<Triangle> triangulate(std::span<const Point> poly);

/// Intersection of the inner half-planes of all edges (empty if not star-shaped).
Polygon kernel(std::span<const Point> poly);

}  // namespace polyvem
