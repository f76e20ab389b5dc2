#include "polyvem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>

namespace polyvem {

std::string to_string(DomainTag tag) {
    switch (tag) {
        case DomainTag::square: return "square";
        case DomainTag::disk: return "disk";
        case DomainTag::custom: return "custom";
    }
    return "custom";
}

DomainTag domain_from_string(const std::string& s) {
    if (s == "square") return DomainTag::square;
    if (s == "disk") return DomainTag::disk;
    if (s == "custom") return DomainTag::custom;
    throw MeshError("unknown domain tag '" + s + "'");
}

PolyMesh::PolyMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells, DomainTag domain,
                   std::uint64_t seed)
    : vertices_(std::move(vertices)), cells_(std::move(cells)), domain_(domain), seed_(seed) {
    const int nv = num_vertices();
    std::map<std::pair<int, int>, int> edge_of;
    cell_edges_.resize(cells_.size());
    for (int c = 0; c < num_cells(); ++c) {
        const auto& cell = cells_[c];
        const std::string tag = "cell " + std::to_string(c) + ": ";
        if (cell.size() < 3) throw MeshError(tag + "fewer than 3 vertices");
        for (int v : cell)
            if (v < 0 || v >= nv)
                throw MeshError(tag + "vertex index " + std::to_string(v) + " out of range");
        const Polygon poly = cell_polygon(c);
        if (!is_simple(poly)) throw MeshError(tag + "polygon is not simple");
        if (signed_area(poly) <= 0.0) throw MeshError(tag + "non-positive signed area (not CCW)");

        const int n = static_cast<int>(cell.size());
        cell_edges_[c].resize(n);
        for (int j = 0; j < n; ++j) {
            const int a = cell[j], b = cell[(j + 1) % n];
            const auto key = std::minmax(a, b);
            auto it = edge_of.find(key);
            if (it == edge_of.end()) {
                edge_of.emplace(key, static_cast<int>(edges_.size()));
                cell_edges_[c][j] = static_cast<int>(edges_.size());
                edges_.push_back({key.first, key.second, c, -1});
            } else {
                Edge& e = edges_[it->second];
                if (e.cell1 >= 0) throw MeshError(tag + "edge shared by more than two cells");
                // CCW neighbours traverse a shared edge in opposite directions
                const auto& oc = cells_[e.cell0];
                const auto pos = std::find(oc.begin(), oc.end(), a) - oc.begin();
                if (oc[(pos + oc.size() - 1) % oc.size()] != b)
                    throw MeshError(tag + "inconsistent orientation with cell " + std::to_string(e.cell0));
                e.cell1 = c;
                cell_edges_[c][j] = it->second;
            }
        }
    }
    boundary_vertex_.assign(vertices_.size(), 0);
    for (const Edge& e : edges_)
        if (e.boundary()) boundary_vertex_[e.v0] = boundary_vertex_[e.v1] = 1;
}

Polygon PolyMesh::cell_polygon(int c) const {
    Polygon p;
    p.reserve(cells_[c].size());
    for (int v : cells_[c]) p.push_back(vertices_[v]);
    return p;
}

double PolyMesh::total_area() const {
    double a = 0.0;
    for (int c = 0; c < num_cells(); ++c) a += signed_area(cell_polygon(c));
    return a;
}

CellGeometry cell_geometry(const Polygon& poly) {
    CellGeometry g;
    g.vertices = poly;
    g.area = signed_area(poly);
    g.centroid = area_centroid(poly);
    g.diameter = diameter(poly);
    const std::size_t n = poly.size();
    g.edge_lengths.resize(n);
    g.normals.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Point e = poly[(j + 1) % n] - poly[j];
        g.edge_lengths[j] = e.norm();
        g.normals[j] = Point(e.y(), -e.x()) / g.edge_lengths[j];
    }
    return g;
}

CellGeometry cell_geometry(const PolyMesh& mesh, int c) { return cell_geometry(mesh.cell_polygon(c)); }

namespace {

// min over edges of the signed distance from x to the edge lines (positive inside)
double line_clearance(const Polygon& poly, const Point& x) {
    double r = std::numeric_limits<double>::max();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point e = poly[(i + 1) % n] - poly[i];
        const Point nrm = Point(-e.y(), e.x()).normalized();
        r = std::min(r, (x - poly[i]).dot(nrm));
    }
    return r;
}

}  // namespace

double star_ratio(const Polygon& poly) {
    const double h = diameter(poly);
    if (is_convex(poly)) {
        const Point c = area_centroid(poly);
        return std::clamp(line_clearance(poly, c) / h, 0.0, 1.0);
    }
    // sampled kernel: the best ball centre is searched on a lattice over the kernel
    const Polygon ker = kernel(poly);
    if (ker.empty()) return 0.0;
    double best = line_clearance(poly, area_centroid(ker));
    Point lo = ker[0], hi = ker[0];
    for (const auto& p : ker) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    constexpr int samples = 24;
    for (int i = 0; i <= samples; ++i)
        for (int j = 0; j <= samples; ++j) {
            const Point x(lo.x() + (hi.x() - lo.x()) * i / samples, lo.y() + (hi.y() - lo.y()) * j / samples);
            if (point_in_polygon(ker, x)) best = std::max(best, line_clearance(poly, x));
        }
    return std::clamp(best / h, 0.0, 1.0);
}

double vertex_ratio(const Polygon& poly) {
    double dmin = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i < poly.size(); ++i)
        for (std::size_t j = i + 1; j < poly.size(); ++j) dmin = std::min(dmin, (poly[i] - poly[j]).norm());
    return dmin / diameter(poly);
}

QualityReport mesh_quality(const PolyMesh& mesh) {
    QualityReport q;
    q.star_ratio.resize(mesh.num_cells());
    q.vertex_ratio.resize(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const Polygon poly = mesh.cell_polygon(c);
        q.star_ratio[c] = star_ratio(poly);
        q.vertex_ratio[c] = vertex_ratio(poly);
        q.min_star_ratio = std::min(q.min_star_ratio, q.star_ratio[c]);
        q.min_vertex_ratio = std::min(q.min_vertex_ratio, q.vertex_ratio[c]);
    }
    return q;
}

}  // namespace polyvem
