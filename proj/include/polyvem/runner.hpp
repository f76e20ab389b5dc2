#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polyvem/cases.hpp"
#include "polyvem/solver.hpp"

namespace polyvem {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Effective settings of one benchmark run. Unset optionals fall back to the case.
struct RunConfig {
    std::string case_name;
    std::optional<std::vector<int>> levels;
    std::optional<std::vector<double>> nu;
    std::optional<std::string> family;
    std::optional<double> distortion;
    std::optional<ConvectionMode> mode;
    std::uint64_t seed = 1;
    int k = 2;
    int load_degree = -1;
    int error_degree = -1;
    NonlinearOptions solver;
    std::string export_format = "none";  // none | vtk | csv
    std::filesystem::path output;

    /// Sets one `key = value` entry; throws ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);
    /// Flat `key = value` lines; '#' starts a comment.
    static RunConfig parse(std::istream& is);
    static RunConfig load(const std::filesystem::path& path);
    /// Every key with its effective value, parseable by parse().
    std::string echo() const;
};

struct LevelResult {
    int n = 0;
    double nu = 1.0;
    std::uint64_t seed = 0;
    ErrorReport errors;
    SolveReport solve;
    double wall_seconds = 0.0;  // mesh, operators, solve and errors
};

/// Mesh, solve and errors for one level of a case.
LevelResult run_level(const BenchmarkCase& bc, const RunConfig& cfg, int n, double nu);

/// All levels (and viscosities) of the configured case. With a non-empty
/// output directory writes config.txt, seeds.txt, level CSVs, results.csv,
/// rates.txt and gnuplot files; a viscosity sweep gets one subdirectory per nu.
std::vector<LevelResult> run_case(const RunConfig& cfg, std::ostream* log = nullptr);

/// `h,ndof,err_u_h1,err_u_l2,err_u_linf,err_p_l2,div_inf,rate_h1,rate_l2,rate_linf,rate_p`
std::string results_csv(const std::vector<LevelResult>& rows);
std::string rate_table(const std::vector<LevelResult>& rows);

}  // namespace polyvem
