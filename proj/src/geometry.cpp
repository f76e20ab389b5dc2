#include "polyvem/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polyvem {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient(const Point& a, const Point& b, const Point& c) { return cross(b - a, c - a); }

bool on_segment(const Point& a, const Point& b, const Point& x) {
    return std::min(a.x(), b.x()) <= x.x() && x.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= x.y() && x.y() <= std::max(a.y(), b.y());
}

double bbox_scale(std::span<const Point> poly) {
    double s = 0.0;
    for (const auto& p : poly) s = std::max(s, (p - poly[0]).norm());
    return s;
}

}  // namespace

double signed_area(std::span<const Point> poly) {
    double a = 0.0;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) a += cross(poly[i], poly[(i + 1) % n]);
    return 0.5 * a;
}

Point area_centroid(std::span<const Point> poly) {
    // shifted to the first vertex for accuracy on small cells far from the origin
    const Point o = poly[0];
    double a = 0.0;
    Point c = Point::Zero();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point p = poly[i] - o;
        const Point q = poly[(i + 1) % n] - o;
        const double w = cross(p, q);
        a += w;
        c += w * (p + q);
    }
    return o + c / (3.0 * a);
}

double diameter(std::span<const Point> poly) {
    double d = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t j = i + 1; j < poly.size(); ++j) d = std::max(d, (poly[i] - poly[j]).norm());
    return d;
}

double segment_distance(const Point& a, const Point& b, const Point& x) {
    const Point ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (x - a).norm();
    const double t = std::clamp((x - a).dot(ab) / len2, 0.0, 1.0);
    return (a + t * ab - x).norm();
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
    const double d1 = orient(c, d, a);
    const double d2 = orient(c, d, b);
    const double d3 = orient(a, b, c);
    const double d4 = orient(a, b, d);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
        return true;
    if (d1 == 0 && on_segment(c, d, a)) return true;
    if (d2 == 0 && on_segment(c, d, b)) return true;
    if (d3 == 0 && on_segment(a, b, c)) return true;
    if (d4 == 0 && on_segment(a, b, d)) return true;
    return false;
}

bool is_simple(std::span<const Point> poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (poly[i] == poly[j]) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& a = poly[i];
        const Point& b = poly[(i + 1) % n];
        // adjacent edges must not fold back onto each other
        const Point& c = poly[(i + 2) % n];
        if (orient(a, b, c) == 0.0 && (b - a).dot(c - b) < 0.0) return false;
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;
            if (segments_intersect(a, b, poly[j], poly[(j + 1) % n])) return false;
        }
    }
    return true;
}

bool is_convex(std::span<const Point> poly, double tol) {
    const std::size_t n = poly.size();
    const double s = bbox_scale(poly);
    for (std::size_t i = 0; i < n; ++i)
        if (orient(poly[i], poly[(i + 1) % n], poly[(i + 2) % n]) < -tol * s * s) return false;
    return true;
}

bool point_in_polygon(std::span<const Point> poly, const Point& x) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point& a = poly[i];
        const Point& b = poly[j];
        if ((a.y() > x.y()) != (b.y() > x.y()) &&
            x.x() < (b.x() - a.x()) * (x.y() - a.y()) / (b.y() - a.y()) + a.x())
            inside = !inside;
    }
    return inside;
}

Polygon clip_halfplane(const Polygon& poly, const Point& origin, const Point& normal) {
    Polygon out;
    const std::size_t n = poly.size();
    if (n == 0) return out;
    out.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = poly[i];
        const Point& q = poly[(i + 1) % n];
        const double sp = (p - origin).dot(normal);
        const double sq = (q - origin).dot(normal);
        if (sp <= 0.0) out.push_back(p);
        if ((sp < 0.0 && sq > 0.0) || (sp > 0.0 && sq < 0.0)) {
            const double t = sp / (sp - sq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

std::vector<Triangle> triangulate(std::span<const Point> poly) {
    const std::size_t n = poly.size();
    std::vector<Triangle> tris;
    const double area = signed_area(poly);
    const Point c = area_centroid(poly);
    bool fan_ok = true;
    for (std::size_t i = 0; i < n && fan_ok; ++i)
        if (orient(c, poly[i], poly[(i + 1) % n]) <= 1e-14 * area) fan_ok = false;
    if (fan_ok) {
        tris.reserve(n);
        for (std::size_t i = 0; i < n; ++i) tris.push_back({c, poly[i], poly[(i + 1) % n]});
        return tris;
    }

    std::vector<Point> rest(poly.begin(), poly.end());
    const double tol = 1e-14 * std::abs(area);
    auto contains_other = [&](std::size_t ip, std::size_t ii, std::size_t in) {
        const Point &a = rest[ip], &b = rest[ii], &d = rest[in];
        for (std::size_t j = 0; j < rest.size(); ++j) {
            if (j == ip || j == ii || j == in) continue;
            const Point& x = rest[j];
            if (orient(a, b, x) >= 0 && orient(b, d, x) >= 0 && orient(d, a, x) >= 0) return true;
        }
        return false;
    };
    while (rest.size() > 3) {
        const std::size_t m = rest.size();
        bool clipped = false;
        for (int pass = 0; pass < 2 && !clipped; ++pass) {
            for (std::size_t i = 0; i < m; ++i) {
                const std::size_t ip = (i + m - 1) % m, in = (i + 1) % m;
                const double o = orient(rest[ip], rest[i], rest[in]);
                if (pass == 0 && o <= tol) continue;
                if (pass == 1 && o < -tol) continue;
                if (o > tol && contains_other(ip, i, in)) continue;
                if (o > tol) tris.push_back({rest[ip], rest[i], rest[in]});
                rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
                clipped = true;
                break;
            }
        }
        if (!clipped) break;
    }
    if (rest.size() == 3) tris.push_back({rest[0], rest[1], rest[2]});
    return tris;
}

Polygon kernel(std::span<const Point> poly) {
    Point lo = poly[0], hi = poly[0];
    for (const auto& p : poly) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Point pad = Point::Constant(0.01 * (hi - lo).norm());
    lo -= pad;
    hi += pad;
    Polygon k{lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}};
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n && !k.empty(); ++i) {
        const Point& a = poly[i];
        const Point e = poly[(i + 1) % n] - a;
        k = clip_halfplane(k, a, Point(e.y(), -e.x()));
    }
    if (k.size() < 3 || signed_area(k) <= 0.0) return {};
    return k;
}

}  // namespace polyvem
