#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "polyvem/geometry.hpp"

namespace polyvem {

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class DomainTag { square, disk, custom };

std::string to_string(DomainTag tag);
DomainTag domain_from_string(const std::string& s);

struct Edge {
    int v0 = -1;  // v0 < v1
    int v1 = -1;
    int cell0 = -1;
    int cell1 = -1;  // -1 on the boundary
    bool boundary() const { return cell1 < 0; }
};

/// Polygonal mesh with CCW cells. Immutable once built; edges and boundary
/// flags are derived from the cell lists.
class PolyMesh {
public:
    PolyMesh() = default;

    /// Validates and builds connectivity. Throws MeshError naming the cell on
    /// the first violated invariant.
    PolyMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells,
             DomainTag domain = DomainTag::custom, std::uint64_t seed = 0);

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<std::vector<int>>& cells() const { return cells_; }
    const std::vector<Edge>& edges() const { return edges_; }
    /// edge ids of cell c; entry j is the edge from local vertex j to j+1
    const std::vector<int>& cell_edges(int c) const { return cell_edges_[c]; }

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_cells() const { return static_cast<int>(cells_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }

    bool boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
    bool boundary_edge(int e) const { return edges_[e].boundary(); }

    Polygon cell_polygon(int c) const;
    double total_area() const;

    DomainTag domain() const { return domain_; }
    std::uint64_t seed() const { return seed_; }

    friend bool operator==(const PolyMesh& a, const PolyMesh& b) {
        return a.vertices_ == b.vertices_ && a.cells_ == b.cells_;
    }

private:
    std::vector<Point> vertices_;
    std::vector<std::vector<int>> cells_;
    std::vector<Edge> edges_;
    std::vector<std::vector<int>> cell_edges_;
    std::vector<char> boundary_vertex_;
    DomainTag domain_ = DomainTag::custom;
    std::uint64_t seed_ = 0;
};

struct CellGeometry {
    Polygon vertices;
    Point centroid = Point::Zero();
    double diameter = 0.0;
    double area = 0.0;
    std::vector<double> edge_lengths;
    std::vector<Point> normals;  // outward unit normals, edge j: vertex j -> j+1
};

CellGeometry cell_geometry(const Polygon& poly);
CellGeometry cell_geometry(const PolyMesh& mesh, int c);

struct QualityReport {
    std::vector<double> star_ratio;    // inscribed radius proxy / h_E
    std::vector<double> vertex_ratio;  // min vertex distance / h_E
    double min_star_ratio = 1.0;
    double min_vertex_ratio = 1.0;
};

QualityReport mesh_quality(const PolyMesh& mesh);
double star_ratio(const Polygon& poly);
double vertex_ratio(const Polygon& poly);

// --- generators -----------------------------------------------------------

/// n x n quads on [0,1]^2; interior vertices displaced uniformly by at most
/// distortion * (1/n) / 2 per coordinate.
PolyMesh gen_square_quads(int n, double distortion = 0.0, std::uint64_t seed = 0);

/// n x n squares each split along the (i,j)-(i+1,j+1) diagonal.
PolyMesh gen_square_triangles(int n);

/// Hexagons from gen_square_triangles(n): triangle vertices plus edge
/// midpoints, interior midpoints displaced by at most amplitude * edge length.
PolyMesh gen_web_hexagons(int n, std::uint64_t seed = 0, double amplitude = 0.2);

/// Lloyd-relaxed clipped Voronoi tessellation of the unit square or unit disk.
PolyMesh gen_voronoi_cvt(DomainTag domain, int n_seeds, int lloyd_iters, std::uint64_t seed);
PolyMesh gen_voronoi_cvt(DomainTag domain, std::vector<Point> seeds, int lloyd_iters,
                         std::uint64_t seed = 0);

/// Seed count giving cells of diameter ~h on the domain.
int voronoi_seed_count(DomainTag domain, double h);

/// Polar-ring triangulation of the unit disk, ring spacing 1/n. Interior
/// vertices optionally displaced by at most distortion * (1/n) / 2 per coordinate.
PolyMesh gen_disk_triangles(int n, double distortion = 0.0, std::uint64_t seed = 0);

// --- io -------------------------------------------------------------------

void write_mesh(const PolyMesh& mesh, const std::filesystem::path& path);
void write_mesh(const PolyMesh& mesh, std::ostream& os);

/// Clockwise cells are reoriented; each reorientation appends a message to
/// `warnings` when provided.
PolyMesh read_mesh(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr);
PolyMesh read_mesh(std::istream& is, std::vector<std::string>* warnings = nullptr);

}  // namespace polyvem
