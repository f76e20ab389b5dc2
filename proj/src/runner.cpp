#include "polyvem/runner.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace polyvem {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T x{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a number");
    return x;
}

// shortest form that parses back to x
std::string fmt(double x) {
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10e", x);
    return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        os << content;
        if (!os) throw std::runtime_error("write to '" + tmp.string() + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

std::string mode_name(ConvectionMode m) { return m == ConvectionMode::skew ? "skew" : "plain"; }

const char* csv_header = "h,ndof,err_u_h1,err_u_l2,err_u_linf,err_p_l2,div_inf,rate_h1,rate_l2,rate_linf,rate_p";

std::vector<std::vector<double>> rates(const std::vector<LevelResult>& rows) {
    std::vector<double> h;
    std::vector<std::vector<double>> e(4);
    for (const LevelResult& r : rows) {
        h.push_back(r.errors.h);
        e[0].push_back(r.errors.u_h1);
        e[1].push_back(r.errors.u_l2);
        e[2].push_back(r.errors.u_linf);
        e[3].push_back(r.errors.p_l2);
    }
    std::vector<std::vector<double>> out;
    for (const auto& col : e) out.push_back(rows.size() > 1 ? eoc(h, col) : std::vector<double>{});
    return out;
}

std::string nu_tag(double nu) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "nu_%g", nu);
    return buf;
}

}  // namespace

void RunConfig::set(const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "case") {
        case_name = v;
    } else if (key == "levels") {
        std::vector<int> l;
        for (const std::string& s : split(v, ',')) l.push_back(parse_number<int>(key, s));
        if (l.empty()) throw ConfigError("config key 'levels': empty list");
        for (std::size_t i = 0; i < l.size(); ++i)
            if (l[i] < 1 || (i > 0 && l[i] <= l[i - 1]))
                throw ConfigError("config key 'levels': must be positive and increasing");
        levels = l;
    } else if (key == "nu") {
        std::vector<double> n;
        for (const std::string& s : split(v, ',')) n.push_back(parse_number<double>(key, s));
        for (double x : n)
            if (!(x > 0)) throw ConfigError("config key 'nu': viscosity must be positive");
        if (n.empty()) throw ConfigError("config key 'nu': empty list");
        nu = n;
    } else if (key == "family") {
        family = v;
    } else if (key == "distortion") {
        distortion = parse_number<double>(key, v);
    } else if (key == "mode") {
        if (v != "plain" && v != "skew") throw ConfigError("config key 'mode': expected plain or skew");
        mode = v == "skew" ? ConvectionMode::skew : ConvectionMode::plain;
    } else if (key == "seed") {
        seed = parse_number<std::uint64_t>(key, v);
    } else if (key == "k") {
        k = parse_number<int>(key, v);
        if (k < 2) throw ConfigError("config key 'k': order must be >= 2");
    } else if (key == "load_degree") {
        load_degree = parse_number<int>(key, v);
    } else if (key == "error_degree") {
        error_degree = parse_number<int>(key, v);
    } else if (key == "picard_max") {
        solver.picard_max = parse_number<int>(key, v);
    } else if (key == "newton_max") {
        solver.newton_max = parse_number<int>(key, v);
    } else if (key == "tol_rel") {
        solver.tol_rel = parse_number<double>(key, v);
    } else if (key == "tol_abs") {
        solver.tol_abs = parse_number<double>(key, v);
    } else if (key == "damping") {
        solver.damping = parse_number<double>(key, v);
    } else if (key == "continuation_start") {
        solver.continuation_start = parse_number<double>(key, v);
    } else if (key == "export") {
        if (v != "none" && v != "vtk" && v != "csv") throw ConfigError("config key 'export': expected none, vtk or csv");
        export_format = v;
    } else if (key == "output") {
        output = v;
    } else {
        throw ConfigError("unknown config key '" + key + "'");
    }
}

RunConfig RunConfig::parse(std::istream& is) {
    RunConfig c;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        try {
            c.set(trim(line.substr(0, eq)), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config '" + path.string() + "'");
    try {
        return parse(is);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string RunConfig::echo() const {
    std::ostringstream os;
    const BenchmarkCase* bc = nullptr;
    try {
        bc = &find_case(case_name);
    } catch (const std::invalid_argument&) {
    }
    os << "case = " << case_name << '\n';
    std::vector<int> l = levels ? *levels : (bc ? bc->levels_for(family.value_or(bc->family)) : std::vector<int>{});
    os << "levels = ";
    for (std::size_t i = 0; i < l.size(); ++i) os << (i ? "," : "") << l[i];
    os << '\n';
    std::vector<double> n = nu ? *nu : (bc ? (bc->nu_sweep.empty() ? std::vector<double>{bc->nu} : bc->nu_sweep)
                                           : std::vector<double>{});
    os << "nu = ";
    for (std::size_t i = 0; i < n.size(); ++i) os << (i ? "," : "") << fmt(n[i]);
    os << '\n';
    os << "family = " << (family ? *family : (bc ? bc->family : "")) << '\n';
    os << "distortion = " << fmt(distortion ? *distortion : (bc ? bc->distortion : 0.0)) << '\n';
    os << "mode = " << mode_name(mode ? *mode : (bc ? bc->mode : ConvectionMode::plain)) << '\n';
    os << "seed = " << seed << '\n';
    os << "k = " << k << '\n';
    os << "load_degree = " << load_degree << '\n';
    os << "error_degree = " << error_degree << '\n';
    os << "picard_max = " << solver.picard_max << '\n';
    os << "newton_max = " << solver.newton_max << '\n';
    os << "tol_rel = " << fmt(solver.tol_rel) << '\n';
    os << "tol_abs = " << fmt(solver.tol_abs) << '\n';
    os << "damping = " << fmt(solver.damping) << '\n';
    os << "continuation_start = " << fmt(solver.continuation_start) << '\n';
    os << "export = " << export_format << '\n';
    os << "output = " << output.string() << '\n';
    return os.str();
}

LevelResult run_level(const BenchmarkCase& bc, const RunConfig& cfg, int n, double nu) {
    const auto t0 = std::chrono::steady_clock::now();
    LevelResult r;
    r.n = n;
    r.nu = nu;
    r.seed = cfg.seed;
    const PolyMesh mesh =
        make_mesh(cfg.family.value_or(bc.family), bc.domain, n, cfg.distortion.value_or(bc.distortion), cfg.seed);
    const Discretization disc(mesh, cfg.k);
    Problem prob;
    prob.nu = nu;
    prob.f = [&bc, nu](const Point& x) { return bc.f(x, nu); };
    prob.g = bc.exact.u;
    prob.load_degree = cfg.load_degree;
    prob.mode = cfg.mode.value_or(bc.mode);
    Solution sol = bc.stokes ? solve_stokes(disc, prob) : solve_navier_stokes(disc, prob, cfg.solver);
    r.solve = sol.report;
    r.errors = compute_errors(disc, sol.u, sol.p, bc.exact, 1.0 / n, cfg.error_degree);
    if (cfg.export_format != "none" && !cfg.output.empty()) {
        std::filesystem::create_directories(cfg.output);
        const std::string stem = "field_n" + std::to_string(n) + "_" + nu_tag(nu);
        if (cfg.export_format == "vtk")
            export_vtk(disc, sol.u, sol.p, cfg.output / (stem + ".vtk"));
        else
            export_csv(disc, sol.u, sol.p, cfg.output / (stem + ".csv"));
    }
    r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::string results_csv(const std::vector<LevelResult>& rows) {
    const auto rt = rates(rows);
    std::ostringstream os;
    os << csv_header << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ErrorReport& e = rows[i].errors;
        os << fmt(e.h) << ',' << e.ndof << ',' << sci(e.u_h1) << ',' << sci(e.u_l2) << ',' << sci(e.u_linf) << ','
           << sci(e.p_l2) << ',' << sci(e.div_inf);
        for (int c = 0; c < 4; ++c) os << ',' << (i > 0 ? fmt(rt[c][i - 1]) : "");
        os << '\n';
    }
    return os.str();
}

std::string rate_table(const std::vector<LevelResult>& rows) {
    const auto rt = rates(rows);
    std::ostringstream os;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%8s %9s %12s %5s %12s %5s %12s %5s %12s %5s %10s %s\n", "h", "ndof", "H1(u)", "eoc",
                  "L2(u)", "eoc", "Linf(u)", "eoc", "L2(p)", "eoc", "div_inf", "solve");
    os << buf;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const ErrorReport& e = rows[i].errors;
        auto rate = [&](int c) -> std::string {
            if (i == 0) return "-";
            char b[16];
            std::snprintf(b, sizeof b, "%.2f", rt[c][i - 1]);
            return b;
        };
        const SolveReport& s = rows[i].solve;
        std::string status = s.converged ? "ok" : "NOT CONVERGED";
        if (s.picard_iterations + s.newton_iterations > 0)
            status += " (picard " + std::to_string(s.picard_iterations) + ", newton " +
                      std::to_string(s.newton_iterations) + ")";
        std::snprintf(buf, sizeof buf, "1/%-6d %9d %12.4e %5s %12.4e %5s %12.4e %5s %12.4e %5s %10.2e %s\n", rows[i].n,
                      e.ndof, e.u_h1, rate(0).c_str(), e.u_l2, rate(1).c_str(), e.u_linf, rate(2).c_str(), e.p_l2,
                      rate(3).c_str(), e.div_inf, status.c_str());
        os << buf;
    }
    return os.str();
}

std::vector<LevelResult> run_case(const RunConfig& cfg, std::ostream* log) {
    const BenchmarkCase& bc = find_case(cfg.case_name);
    const std::vector<int> levels = cfg.levels.value_or(bc.levels_for(cfg.family.value_or(bc.family)));
    const std::vector<double> nus =
        cfg.nu ? *cfg.nu : (bc.nu_sweep.empty() ? std::vector<double>{bc.nu} : bc.nu_sweep);
    const bool write = !cfg.output.empty();
    if (write) {
        std::filesystem::create_directories(cfg.output);
        write_atomic(cfg.output / "config.txt", cfg.echo());
    }

    std::vector<LevelResult> all;
    for (double nu : nus) {
        const std::filesystem::path dir = nus.size() > 1 ? cfg.output / nu_tag(nu) : cfg.output;
        RunConfig sub = cfg;
        sub.output = dir;
        if (write) std::filesystem::create_directories(dir);
        std::vector<LevelResult> rows;
        std::string seeds = "# n seed\n";
        for (int n : levels) {
            LevelResult r = run_level(bc, sub, n, nu);
            if (log) {
                char buf[256];
                std::snprintf(buf, sizeof buf, "%s n=%d nu=%g ndof=%d H1=%.3e L2=%.3e p=%.3e div=%.1e %s %.1fs\n",
                              bc.name.c_str(), n, nu, r.errors.ndof, r.errors.u_h1, r.errors.u_l2, r.errors.p_l2,
                              r.errors.div_inf, r.solve.converged ? "converged" : "NOT CONVERGED", r.wall_seconds);
                *log << buf << std::flush;
            }
            rows.push_back(r);
            seeds += std::to_string(n) + ' ' + std::to_string(r.seed) + '\n';
            if (write) write_atomic(dir / ("level_" + std::to_string(n) + ".csv"), results_csv({r}));
        }
        if (write) {
            write_atomic(dir / "seeds.txt", seeds);
            write_atomic(dir / "results.csv", results_csv(rows));
            std::string head = bc.name + ", nu = " + fmt(nu) + ", family = " + cfg.family.value_or(bc.family) +
                               ", mode = " + mode_name(cfg.mode.value_or(bc.mode)) + "\n";
            write_atomic(dir / "rates.txt", head + rate_table(rows));
            std::ostringstream dat;
            dat << "# h ndof err_u_h1 err_u_l2 err_u_linf err_p_l2 div_inf\n";
            for (const LevelResult& r : rows)
                dat << fmt(r.errors.h) << ' ' << r.errors.ndof << ' ' << sci(r.errors.u_h1) << ' '
                    << sci(r.errors.u_l2) << ' ' << sci(r.errors.u_linf) << ' ' << sci(r.errors.p_l2) << ' '
                    << sci(r.errors.div_inf) << '\n';
            write_atomic(dir / "results.dat", dat.str());
            write_atomic(dir / "plot.gp",
                         "set terminal png size 800,600\nset output 'convergence.png'\nset logscale xy\n"
                         "set xlabel 'h'\nset ylabel 'error'\nset key left top\n"
                         "plot 'results.dat' using 1:3 with linespoints title 'H1(u)', \\\n"
                         "     'results.dat' using 1:4 with linespoints title 'L2(u)', \\\n"
                         "     'results.dat' using 1:5 with linespoints title 'Linf(u)', \\\n"
                         "     'results.dat' using 1:6 with linespoints title 'L2(p)'\n");
        }
        all.insert(all.end(), rows.begin(), rows.end());
    }
    return all;
}

}  // namespace polyvem
