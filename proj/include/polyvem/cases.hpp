#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "polyvem/assembly.hpp"
#include "polyvem/jet.hpp"
#include "polyvem/postproc.hpp"

namespace polyvem {

using JetVector = std::array<Jet, 2>;

/// Manufactured benchmark: closed-form exact fields and load on a mesh family.
struct BenchmarkCase {
    std::string name;
    std::string description;
    DomainTag domain = DomainTag::square;
    std::string family;        // mesh family, see make_mesh
    double distortion = 0.0;   // quad and disk triangle families
    std::vector<int> levels;   // 1/h
    std::map<std::string, std::vector<int>> family_levels;  // replaces levels on the named family
    double nu = 1.0;
    std::vector<double> nu_sweep;  // several viscosities at each level when non-empty
    bool stokes = false;           // convection dropped
    ConvectionMode mode = ConvectionMode::plain;

    ExactSolution exact;
    /// load for viscosity nu
    std::function<Point(const Point&, double nu)> f;
    /// the same exact fields in differentiable form, used by verify_case
    std::function<JetVector(const Jet&, const Jet&)> u_jet;
    std::function<Jet(const Jet&, const Jet&)> p_jet;

    const std::vector<int>& levels_for(const std::string& fam) const {
        const auto it = family_levels.find(fam);
        return it == family_levels.end() ? levels : it->second;
    }
};

/// Registered cases in a fixed order. Every case passed verify_case at 1e-8.
const std::vector<BenchmarkCase>& case_registry();
/// Throws std::invalid_argument listing the registered names when unknown.
const BenchmarkCase& find_case(const std::string& name);
/// One line per case: name, family, levels, nu, description.
std::string list_cases();

struct VerifyResult {
    double pde = 0.0;       // max |-nu lap u + (grad u) u - grad p - f|
    double gradient = 0.0;  // max |grad_u - jet gradient|
    double value = 0.0;     // max |u - jet| and |p - jet| (p up to its value at the first point)
    double divergence = 0.0;
    double max() const { return std::max({pde, gradient, value, divergence}); }
};

/// Evaluates the closed forms against the differentiable fields at `samples`
/// random points of the domain, for every viscosity the case uses.
VerifyResult verify_case(const BenchmarkCase& c, int samples = 100, std::uint64_t seed = 1);

/// Mesh of a family at 1/h = n: quad, tri, web, voronoi (domain from `domain`), disk-tri.
PolyMesh make_mesh(const std::string& family, DomainTag domain, int n, double distortion, std::uint64_t seed);

}  // namespace polyvem
