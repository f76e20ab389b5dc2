#include <cmath>
#include <numbers>

#include "polyvem/mesh.hpp"
#include "polyvem/rng.hpp"

namespace polyvem {

namespace {

bool valid_cell(const std::vector<Point>& xs, const std::vector<int>& cell) {
    Polygon p;
    p.reserve(cell.size());
    for (int v : cell) p.push_back(xs[v]);
    return is_simple(p) && signed_area(p) > 0.0;
}

// WEB cells must also stay star-shaped with respect to a ball of radius >= floor * h
constexpr double star_floor = 0.06;

bool valid_star_cell(const std::vector<Point>& xs, const std::vector<int>& cell) {
    if (!valid_cell(xs, cell)) return false;
    Polygon p;
    for (int v : cell) p.push_back(xs[v]);
    return star_ratio(p) >= star_floor;
}

}  // namespace

PolyMesh gen_square_quads(int n, double distortion, std::uint64_t seed) {
    if (n < 2) throw MeshError("gen_square_quads: n must be >= 2");
    if (!(distortion >= 0.0 && distortion < 1.0))
        throw MeshError("gen_square_quads: distortion must lie in [0,1)");
    const int m = n + 1;
    auto id = [m](int i, int j) { return j * m + i; };
    std::vector<Point> xs(static_cast<std::size_t>(m * m));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) xs[id(i, j)] = Point(double(i) / n, double(j) / n);
    std::vector<std::vector<int>> cells;
    cells.reserve(static_cast<std::size_t>(n * n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});

    if (distortion > 0.0) {
        Rng rng(seed);
        const double amp = distortion * (1.0 / n) / 2.0;
        for (int j = 1; j < n; ++j)
            for (int i = 1; i < n; ++i) {
                const Point base = xs[id(i, j)];
                // the four cells around (i,j)
                const int around[4] = {(j - 1) * n + (i - 1), (j - 1) * n + i, j * n + (i - 1), j * n + i};
                for (int attempt = 0; attempt < 64; ++attempt) {
                    xs[id(i, j)] = base + Point(rng.uniform(-amp, amp), rng.uniform(-amp, amp));
                    bool ok = true;
                    for (int c : around) ok = ok && valid_cell(xs, cells[c]);
                    if (ok) break;
                    xs[id(i, j)] = base;
                }
            }
    }
    return PolyMesh(std::move(xs), std::move(cells), DomainTag::square, seed);
}

PolyMesh gen_square_triangles(int n) {
    if (n < 1) throw MeshError("gen_square_triangles: n must be >= 1");
    const int m = n + 1;
    auto id = [m](int i, int j) { return j * m + i; };
    std::vector<Point> xs(static_cast<std::size_t>(m * m));
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) xs[id(i, j)] = Point(double(i) / n, double(j) / n);
    std::vector<std::vector<int>> cells;
    cells.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    return PolyMesh(std::move(xs), std::move(cells), DomainTag::square);
}

PolyMesh gen_web_hexagons(int n, std::uint64_t seed, double amplitude) {
    if (n < 2) throw MeshError("gen_web_hexagons: n must be >= 2");
    if (amplitude < 0.0 || amplitude >= 0.5) throw MeshError("gen_web_hexagons: amplitude must lie in [0,0.5)");
    const PolyMesh tri = gen_square_triangles(n);
    std::vector<Point> xs = tri.vertices();
    const int nv = tri.num_vertices();
    for (const Edge& e : tri.edges()) xs.push_back(0.5 * (xs[e.v0] + xs[e.v1]));

    std::vector<std::vector<int>> cells(tri.num_cells());
    for (int c = 0; c < tri.num_cells(); ++c) {
        const auto& t = tri.cells()[c];
        const auto& te = tri.cell_edges(c);
        for (int j = 0; j < 3; ++j) {
            cells[c].push_back(t[j]);
            cells[c].push_back(nv + te[j]);
        }
    }

    if (amplitude > 0.0) {
        Rng rng(seed);
        for (int e = 0; e < tri.num_edges(); ++e) {
            const Edge& ed = tri.edges()[e];
            if (ed.boundary()) continue;
            const double len = (xs[ed.v0] - xs[ed.v1]).norm();
            const Point base = xs[nv + e];
            for (int attempt = 0; attempt < 64; ++attempt) {
                const double r = amplitude * len * std::sqrt(rng.uniform());
                const double th = 2.0 * std::numbers::pi * rng.uniform();
                xs[nv + e] = base + r * Point(std::cos(th), std::sin(th));
                if (valid_star_cell(xs, cells[ed.cell0]) && valid_star_cell(xs, cells[ed.cell1])) break;
                xs[nv + e] = base;
            }
        }
    }
    return PolyMesh(std::move(xs), std::move(cells), DomainTag::square, seed);
}

PolyMesh gen_disk_triangles(int n, double distortion, std::uint64_t seed) {
    if (n < 2) throw MeshError("gen_disk_triangles: n must be >= 2");
    if (!(distortion >= 0.0 && distortion < 1.0))
        throw MeshError("gen_disk_triangles: distortion must lie in [0,1)");
    constexpr int per_ring = 7;
    std::vector<Point> xs{Point::Zero()};
    std::vector<int> ring_start{0};
    for (int i = 1; i <= n; ++i) {
        ring_start.push_back(static_cast<int>(xs.size()));
        const int cnt = per_ring * i;
        const double r = (i == n) ? 1.0 : double(i) / n;
        for (int j = 0; j < cnt; ++j) {
            const double th = 2.0 * std::numbers::pi * j / cnt;
            xs.emplace_back(r * std::cos(th), r * std::sin(th));
        }
    }
    std::vector<std::vector<int>> cells;
    for (int j = 0; j < per_ring; ++j) cells.push_back({0, 1 + j, 1 + (j + 1) % per_ring});
    for (int i = 2; i <= n; ++i) {
        const int na = per_ring * (i - 1), nb = per_ring * i;
        const int a0 = ring_start[i - 1], b0 = ring_start[i];
        int p = 0, q = 0;
        while (p < na || q < nb) {
            const double ang_a = double(p + 1) / na;
            const double ang_b = double(q + 1) / nb;
            if (q < nb && (p == na || ang_b <= ang_a)) {
                cells.push_back({a0 + p % na, b0 + q, b0 + (q + 1) % nb});
                ++q;
            } else {
                cells.push_back({a0 + p, b0 + q % nb, a0 + (p + 1) % na});
                ++p;
            }
        }
    }
    if (distortion > 0.0) {
        std::vector<std::vector<int>> around(xs.size());
        for (int c = 0; c < static_cast<int>(cells.size()); ++c)
            for (int v : cells[c]) around[v].push_back(c);
        Rng rng(seed);
        const double amp = distortion * (1.0 / n) / 2.0;
        for (int v = 0; v < ring_start[n]; ++v) {
            const Point base = xs[v];
            for (int attempt = 0; attempt < 64; ++attempt) {
                xs[v] = base + Point(rng.uniform(-amp, amp), rng.uniform(-amp, amp));
                bool ok = true;
                for (int c : around[v]) ok = ok && valid_star_cell(xs, cells[c]);
                if (ok) break;
                xs[v] = base;
            }
        }
    }
    return PolyMesh(std::move(xs), std::move(cells), DomainTag::disk, seed);
}

}  // namespace polyvem
