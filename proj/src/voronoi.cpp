#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

#include "polyvem/mesh.hpp"
#include "polyvem/rng.hpp"

namespace polyvem {

namespace {

double domain_area(DomainTag d) { return d == DomainTag::disk ? std::numbers::pi : 1.0; }

bool inside_domain(DomainTag d, const Point& x) {
    if (d == DomainTag::disk) return x.norm() < 1.0;
    return x.x() > 0.0 && x.x() < 1.0 && x.y() > 0.0 && x.y() < 1.0;
}

/// Uniform bucket grid over a bounding box.
class PointGrid {
public:
    PointGrid(const std::vector<Point>& pts, Point lo, Point hi, double cell)
        : pts_(pts), lo_(lo), cell_(cell) {
        nx_ = std::max(1, static_cast<int>(std::ceil((hi.x() - lo.x()) / cell)));
        ny_ = std::max(1, static_cast<int>(std::ceil((hi.y() - lo.y()) / cell)));
        buckets_.resize(static_cast<std::size_t>(nx_ * ny_));
        for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
            const auto [bx, by] = bucket(pts[i]);
            buckets_[by * nx_ + bx].push_back(i);
        }
    }
    std::pair<int, int> bucket(const Point& x) const {
        const int bx = std::clamp(static_cast<int>((x.x() - lo_.x()) / cell_), 0, nx_ - 1);
        const int by = std::clamp(static_cast<int>((x.y() - lo_.y()) / cell_), 0, ny_ - 1);
        return {bx, by};
    }
    template <class F>
    void for_ring(int cx, int cy, int r, F&& f) const {
        for (int by = cy - r; by <= cy + r; ++by)
            for (int bx = cx - r; bx <= cx + r; ++bx) {
                if (std::max(std::abs(bx - cx), std::abs(by - cy)) != r) continue;
                if (bx < 0 || by < 0 || bx >= nx_ || by >= ny_) continue;
                for (int j : buckets_[by * nx_ + bx]) f(j);
            }
    }
    int max_ring() const { return std::max(nx_, ny_); }
    double cell() const { return cell_; }

private:
    const std::vector<Point>& pts_;
    Point lo_;
    double cell_;
    int nx_ = 1, ny_ = 1;
    std::vector<std::vector<int>> buckets_;
};

std::vector<Polygon> voronoi_cells(DomainTag domain, const std::vector<Point>& seeds) {
    std::vector<Point> gens = seeds;
    Polygon init;
    Point lo, hi;
    if (domain == DomainTag::disk) {
        // mirror images across the circle make the bisector with a seed's own
        // image the tangent line at its radial projection
        for (const Point& s : seeds) {
            const double r = s.norm();
            if (r > 1e-8) gens.push_back(s * (2.0 - r) / r);
        }
        init = {{-2.0, -2.0}, {2.0, -2.0}, {2.0, 2.0}, {-2.0, 2.0}};
        lo = Point(-2.0, -2.0);
        hi = Point(2.0, 2.0);
    } else {
        init = {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
        lo = Point(0.0, 0.0);
        hi = Point(1.0, 1.0);
    }
    const double spacing = std::sqrt(domain_area(domain) / seeds.size());
    const PointGrid grid(gens, lo, hi, spacing);

    std::vector<Polygon> cells(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        const Point& s = seeds[i];
        Polygon poly = init;
        const auto [cx, cy] = grid.bucket(s);
        for (int r = 0; r <= grid.max_ring(); ++r) {
            grid.for_ring(cx, cy, r, [&](int j) {
                if (static_cast<std::size_t>(j) == i) return;
                const Point& t = gens[j];
                poly = clip_halfplane(poly, 0.5 * (s + t), t - s);
            });
            double reach = 0.0;
            for (const Point& v : poly) reach = std::max(reach, (v - s).norm());
            if (r * grid.cell() >= 2.0 * reach) break;
        }
        cells[i] = std::move(poly);
    }
    return cells;
}

void rejitter_duplicates(DomainTag domain, std::vector<Point>& seeds, Rng& rng) {
    const double eps = 1e-6 * std::sqrt(domain_area(domain) / seeds.size());
    std::map<std::pair<long long, long long>, int> seen;
    for (auto& s : seeds) {
        for (int attempt = 0; attempt < 100; ++attempt) {
            const std::pair<long long, long long> key{std::llround(s.x() / eps), std::llround(s.y() / eps)};
            if (seen.emplace(key, 1).second) break;
            Point trial = s + Point(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)) * (10 * eps);
            if (inside_domain(domain, trial)) s = trial;
        }
    }
}

struct RawMesh {
    std::vector<Point> xs;
    std::vector<std::vector<int>> cells;
};

RawMesh merge_vertices(const std::vector<Polygon>& polys, double tol) {
    RawMesh m;
    std::unordered_map<long long, std::vector<int>> buckets;
    auto key = [tol](long long i, long long j) { return i * 1000003LL + j; };
    for (const Polygon& poly : polys) {
        std::vector<int> cell;
        for (const Point& p : poly) {
            const long long bi = static_cast<long long>(std::floor(p.x() / tol));
            const long long bj = static_cast<long long>(std::floor(p.y() / tol));
            int found = -1;
            for (long long di = -1; di <= 1 && found < 0; ++di)
                for (long long dj = -1; dj <= 1 && found < 0; ++dj) {
                    auto it = buckets.find(key(bi + di, bj + dj));
                    if (it == buckets.end()) continue;
                    for (int v : it->second)
                        if ((m.xs[v] - p).norm() <= tol) {
                            found = v;
                            break;
                        }
                }
            if (found < 0) {
                found = static_cast<int>(m.xs.size());
                m.xs.push_back(p);
                buckets[key(bi, bj)].push_back(found);
            }
            if (cell.empty() || cell.back() != found) cell.push_back(found);
        }
        while (cell.size() > 1 && cell.front() == cell.back()) cell.pop_back();
        if (cell.size() >= 3) m.cells.push_back(std::move(cell));
    }
    return m;
}

std::vector<char> boundary_flags(const RawMesh& m) {
    std::map<std::pair<int, int>, int> count;
    for (const auto& c : m.cells)
        for (std::size_t j = 0; j < c.size(); ++j) ++count[std::minmax(c[j], c[(j + 1) % c.size()])];
    std::vector<char> b(m.xs.size(), 0);
    for (const auto& [e, n] : count)
        if (n == 1) b[e.first] = b[e.second] = 1;
    return b;
}

bool on_square_side(const Point& x, int side) {
    constexpr double tol = 1e-12;
    switch (side) {
        case 0: return std::abs(x.y()) < tol;
        case 1: return std::abs(x.x() - 1.0) < tol;
        case 2: return std::abs(x.y() - 1.0) < tol;
        default: return std::abs(x.x()) < tol;
    }
}

int square_side_mask(const Point& x) {
    int mask = 0;
    for (int s = 0; s < 4; ++s)
        if (on_square_side(x, s)) mask |= 1 << s;
    return mask;
}

/// Collapses edges shorter than `threshold` when both adjacent cells stay valid.
void collapse_short_edges(DomainTag domain, RawMesh& m, double threshold) {
    std::vector<char> bnd = boundary_flags(m);
    std::vector<std::vector<int>> cells_of(m.xs.size());
    for (int c = 0; c < static_cast<int>(m.cells.size()); ++c)
        for (int v : m.cells[c]) cells_of[v].push_back(c);

    for (int c = 0; c < static_cast<int>(m.cells.size()); ++c) {
        for (std::size_t j = 0; j < m.cells[c].size(); ++j) {
            auto& cell = m.cells[c];
            if (cell.size() <= 3) break;
            const int a = cell[j], b = cell[(j + 1) % cell.size()];
            if ((m.xs[a] - m.xs[b]).norm() >= threshold) continue;

            Point merged;
            if (domain == DomainTag::square) {
                const int ma = square_side_mask(m.xs[a]), mb = square_side_mask(m.xs[b]);
                const bool corner_a = __builtin_popcount(ma) == 2, corner_b = __builtin_popcount(mb) == 2;
                if (corner_a && corner_b) continue;
                if (corner_a) merged = m.xs[a];
                else if (corner_b) merged = m.xs[b];
                else if (ma && mb) {
                    if (!(ma & mb)) continue;
                    merged = 0.5 * (m.xs[a] + m.xs[b]);
                } else if (ma) merged = m.xs[a];
                else if (mb) merged = m.xs[b];
                else merged = 0.5 * (m.xs[a] + m.xs[b]);
            } else {
                if (bnd[a] && bnd[b]) merged = (0.5 * (m.xs[a] + m.xs[b])).normalized();
                else if (bnd[a]) merged = m.xs[a];
                else if (bnd[b]) merged = m.xs[b];
                else merged = 0.5 * (m.xs[a] + m.xs[b]);
            }

            // tentative update of every cell touching a or b
            std::vector<int> touched = cells_of[a];
            touched.insert(touched.end(), cells_of[b].begin(), cells_of[b].end());
            std::sort(touched.begin(), touched.end());
            touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
            std::vector<std::vector<int>> updated;
            bool ok = true;
            const Point keep_a = m.xs[a];
            m.xs[a] = merged;
            for (int t : touched) {
                std::vector<int> nc;
                for (int v : m.cells[t]) {
                    const int w = (v == b) ? a : v;
                    if (nc.empty() || nc.back() != w) nc.push_back(w);
                }
                while (nc.size() > 1 && nc.front() == nc.back()) nc.pop_back();
                Polygon p;
                for (int v : nc) p.push_back(m.xs[v]);
                if (nc.size() < 3 || !is_simple(p) || signed_area(p) <= 0.0) {
                    ok = false;
                    break;
                }
                updated.push_back(std::move(nc));
            }
            if (!ok) {
                m.xs[a] = keep_a;
                continue;
            }
            for (std::size_t i = 0; i < touched.size(); ++i) m.cells[touched[i]] = std::move(updated[i]);
            for (int t : cells_of[b])
                if (std::find(cells_of[a].begin(), cells_of[a].end(), t) == cells_of[a].end())
                    cells_of[a].push_back(t);
            cells_of[b].clear();
            bnd[a] = static_cast<char>(bnd[a] || bnd[b]);
            j = static_cast<std::size_t>(-1);  // rescan this cell
        }
    }
}

PolyMesh compact(RawMesh m, DomainTag domain, std::uint64_t seed) {
    std::vector<int> remap(m.xs.size(), -1);
    std::vector<Point> xs;
    for (auto& c : m.cells)
        for (int& v : c) {
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(xs.size());
                xs.push_back(m.xs[v]);
            }
            v = remap[v];
        }
    return PolyMesh(std::move(xs), std::move(m.cells), domain, seed);
}

}  // namespace

int voronoi_seed_count(DomainTag domain, double h) {
    // a regular hexagon of diameter h has area 3*sqrt(3)/8 h^2
    const double cell_area = 3.0 * std::sqrt(3.0) / 8.0 * h * h;
    return std::max(4, static_cast<int>(std::lround(domain_area(domain) / cell_area)));
}

PolyMesh gen_voronoi_cvt(DomainTag domain, int n_seeds, int lloyd_iters, std::uint64_t seed) {
    if (n_seeds < 4) throw MeshError("gen_voronoi_cvt: need at least 4 seeds");
    if (domain != DomainTag::square && domain != DomainTag::disk)
        throw MeshError("gen_voronoi_cvt: domain must be square or disk");
    Rng rng(seed);
    std::vector<Point> seeds;
    seeds.reserve(static_cast<std::size_t>(n_seeds));
    while (static_cast<int>(seeds.size()) < n_seeds) {
        const Point x = domain == DomainTag::disk ? Point(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0))
                                                  : Point(rng.uniform(), rng.uniform());
        if (inside_domain(domain, x)) seeds.push_back(x);
    }
    return gen_voronoi_cvt(domain, std::move(seeds), lloyd_iters, seed);
}

PolyMesh gen_voronoi_cvt(DomainTag domain, std::vector<Point> seeds, int lloyd_iters, std::uint64_t seed) {
    if (seeds.size() < 4) throw MeshError("gen_voronoi_cvt: need at least 4 seeds");
    if (domain != DomainTag::square && domain != DomainTag::disk)
        throw MeshError("gen_voronoi_cvt: domain must be square or disk");
    Rng rng(seed ^ 0x9E3779B97F4A7C15ULL);
    rejitter_duplicates(domain, seeds, rng);
    std::vector<Polygon> polys = voronoi_cells(domain, seeds);
    for (int it = 0; it < lloyd_iters; ++it) {
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            Point c = area_centroid(polys[i]);
            if (domain == DomainTag::disk && c.norm() > 1.0 - 1e-9) c *= (1.0 - 1e-9) / c.norm();
            seeds[i] = c;
        }
        rejitter_duplicates(domain, seeds, rng);
        polys = voronoi_cells(domain, seeds);
    }

    const double spacing = std::sqrt(domain_area(domain) / seeds.size());
    RawMesh raw = merge_vertices(polys, 1e-9 * spacing);
    if (domain == DomainTag::disk) {
        const std::vector<char> bnd = boundary_flags(raw);
        for (std::size_t v = 0; v < raw.xs.size(); ++v)
            if (bnd[v]) raw.xs[v].normalize();
    }
    collapse_short_edges(domain, raw, 0.1 * spacing);
    return compact(std::move(raw), domain, seed);
}

}  // namespace polyvem
