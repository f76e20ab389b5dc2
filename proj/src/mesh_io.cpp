#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "polyvem/mesh.hpp"

namespace polyvem {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class LineReader {
public:
    explicit LineReader(std::istream& is) : is_(is) {}

    /// next non-empty line that is not a comment; comments are collected
    bool next(std::string& line) {
        while (std::getline(is_, line)) {
            ++lineno_;
            const auto first = line.find_first_not_of(" \t\r");
            if (first == std::string::npos) continue;
            if (line[first] == '#') {
                comments_.push_back(line.substr(first + 1));
                continue;
            }
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw MeshError("line " + std::to_string(lineno_) + ": " + what);
    }
    const std::vector<std::string>& comments() const { return comments_; }

private:
    std::istream& is_;
    int lineno_ = 0;
    std::vector<std::string> comments_;
};

}  // namespace

void write_mesh(const PolyMesh& mesh, std::ostream& os) {
    os << "polyvem-mesh v1\n";
    os << "# domain " << to_string(mesh.domain()) << " seed " << mesh.seed() << "\n";
    os << "vertices " << mesh.num_vertices() << "\n";
    for (const Point& p : mesh.vertices()) os << fmt_double(p.x()) << ' ' << fmt_double(p.y()) << '\n';
    os << "cells " << mesh.num_cells() << "\n";
    for (const auto& c : mesh.cells()) {
        os << c.size();
        for (int v : c) os << ' ' << v;
        os << '\n';
    }
}

void write_mesh(const PolyMesh& mesh, const std::filesystem::path& path) {
    std::ofstream os(path);
    if (!os) throw MeshError("cannot open '" + path.string() + "' for writing");
    write_mesh(mesh, os);
    if (!os) throw MeshError("write to '" + path.string() + "' failed");
}

PolyMesh read_mesh(std::istream& is, std::vector<std::string>* warnings) {
    LineReader rd(is);
    std::string line;
    if (!rd.next(line) || line.rfind("polyvem-mesh v1", 0) != 0) rd.fail("expected header 'polyvem-mesh v1'");

    auto read_count = [&](const char* keyword) {
        if (!rd.next(line)) rd.fail(std::string("expected '") + keyword + " <count>'");
        std::istringstream ss(line);
        std::string kw;
        long long n = -1;
        if (!(ss >> kw >> n) || kw != keyword || n < 0) rd.fail(std::string("expected '") + keyword + " <count>'");
        return static_cast<int>(n);
    };

    const int nv = read_count("vertices");
    std::vector<Point> xs(static_cast<std::size_t>(nv));
    for (int i = 0; i < nv; ++i) {
        if (!rd.next(line)) rd.fail("unexpected end of file in vertex block");
        std::istringstream ss(line);
        double x, y;
        std::string extra;
        if (!(ss >> x >> y) || (ss >> extra)) rd.fail("malformed vertex line");
        xs[i] = Point(x, y);
    }
    const int nc = read_count("cells");
    std::vector<std::vector<int>> cells(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) {
        if (!rd.next(line)) rd.fail("unexpected end of file in cell block");
        std::istringstream ss(line);
        int k = 0;
        if (!(ss >> k) || k < 3) rd.fail("cell " + std::to_string(c) + ": bad vertex count");
        cells[c].resize(k);
        for (int& v : cells[c])
            if (!(ss >> v)) rd.fail("cell " + std::to_string(c) + ": expected " + std::to_string(k) + " indices");
        std::string extra;
        if (ss >> extra) rd.fail("cell " + std::to_string(c) + ": trailing data");
        for (int v : cells[c])
            if (v < 0 || v >= nv)
                throw MeshError("cell " + std::to_string(c) + ": vertex index " + std::to_string(v) +
                                " out of range");
        Polygon p;
        for (int v : cells[c]) p.push_back(xs[v]);
        if (signed_area(p) < 0.0) {
            std::reverse(cells[c].begin(), cells[c].end());
            if (warnings) warnings->push_back("cell " + std::to_string(c) + ": clockwise, reoriented");
        }
    }

    DomainTag domain = DomainTag::custom;
    std::uint64_t seed = 0;
    for (const auto& cm : rd.comments()) {
        std::istringstream ss(cm);
        std::string k1, dom, k2;
        std::uint64_t s = 0;
        if (ss >> k1 >> dom >> k2 >> s && k1 == "domain" && k2 == "seed") {
            domain = domain_from_string(dom);
            seed = s;
        }
    }
    return PolyMesh(std::move(xs), std::move(cells), domain, seed);
}

PolyMesh read_mesh(const std::filesystem::path& path, std::vector<std::string>* warnings) {
    std::ifstream is(path);
    if (!is) throw MeshError("cannot open '" + path.string() + "'");
    return read_mesh(is, warnings);
}

}  // namespace polyvem
