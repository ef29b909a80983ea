#include "qhlab/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <thread>

#include "qhlab/csv_io.hpp"
#include "qhlab/errors.hpp"
#include "qhlab/fields.hpp"
#include "qhlab/instability.hpp"
#include "qhlab/madelung.hpp"
#include "qhlab/manifest.hpp"
#include "qhlab/potential.hpp"
#include "qhlab/quantization.hpp"
#include "qhlab/schrodinger.hpp"
#include "qhlab/svg_plot.hpp"

namespace qhlab {

namespace {

constexpr const char* kUsage =
    "usage: qhlab <evolve|instability|quantize|angular|validate> "
    "[--config FILE] [--key value ...] --out DIR";

// ------------------------------------------------------------- schemas

enum class KeyKind { real, integer, count, choice, real_list };

struct KeySchema {
    const char* name;
    KeyKind kind;
    const char* fallback;
    const char* choices = nullptr;  // '|'-separated, choice kind only
};

const std::vector<KeySchema>& schema_for(const std::string& command) {
    static const std::vector<KeySchema> evolve = {
        {"initial", KeyKind::choice, "pair", "pair|gaussian|coherent"},
        {"potential", KeyKind::choice, "free", "free|harmonic"},
        {"kappa", KeyKind::real, "1"},
        {"L", KeyKind::real, "10"},
        {"sigma", KeyKind::real, "1"},
        {"p0", KeyKind::real, "2"},
        {"drift_sign", KeyKind::real, "-1"},
        {"x0", KeyKind::real, "0"},
        {"d", KeyKind::real, "1"},
        {"x_min", KeyKind::real, "-32"},
        {"x_max", KeyKind::real, "32"},
        {"n", KeyKind::count, "4096"},
        {"dt", KeyKind::real, "1e-3"},
        {"steps", KeyKind::count, "0"},
        {"record_every", KeyKind::count, "0"},
    };
    static const std::vector<KeySchema> instability = {
        {"profile", KeyKind::choice, "plateau", "plateau|calibrated_pair"},
        {"eps", KeyKind::real_list,
         "1e-1,3.1622776601683795e-2,1e-2,3.1622776601683795e-3,1e-3,"
         "3.1622776601683795e-4,1e-4,3.1622776601683795e-5,1e-5"},
        {"N", KeyKind::integer, "2"},
        {"ell", KeyKind::real, "1"},
        {"shoulder_width", KeyKind::real, "2"},
        {"sigma", KeyKind::real, "1"},
        {"p0", KeyKind::real, "0"},
        {"x_min", KeyKind::real, "-32"},
        {"x_max", KeyKind::real, "32"},
        {"n", KeyKind::count, "4096"},
    };
    static const std::vector<KeySchema> quantize = {
        {"jmax", KeyKind::integer, "20"},
        {"kappa", KeyKind::real, "1"},
        {"x_min", KeyKind::real, "-12"},
        {"x_max", KeyKind::real, "12"},
        {"n", KeyKind::count, "4096"},
        {"probe_energies", KeyKind::real_list, "1.5,3.3,5.7"},
        {"x_probe", KeyKind::real, "6"},
        {"j_cut", KeyKind::integer, "200"},
    };
    static const std::vector<KeySchema> angular = {
        {"jmax", KeyKind::integer, "10"},
        {"lambda", KeyKind::real, "6"},
        {"c1", KeyKind::real, "1"},
        {"m", KeyKind::real, "0.5"},
        {"j_cut", KeyKind::integer, "200"},
    };
    static const std::vector<KeySchema> validate = {
        {"case", KeyKind::choice, "stationary", "stationary|coherent|pair"},
        {"dt", KeyKind::real, "0"},       // 0 = stability bound dx^2/4
        {"t_final", KeyKind::real, "0"},  // 0 = per-case default
        {"x_min", KeyKind::real, "0"},    // x_min = x_max = n = 0 = per-case grid
        {"x_max", KeyKind::real, "0"},
        {"n", KeyKind::count, "0"},
        {"d", KeyKind::real, "1"},
        {"L", KeyKind::real, "10"},
        {"sigma", KeyKind::real, "1"},
        {"p0", KeyKind::real, "2"},
    };
    if (command == "evolve") return evolve;
    if (command == "instability") return instability;
    if (command == "quantize") return quantize;
    if (command == "angular") return angular;
    if (command == "validate") return validate;
    throw UsageError("unknown command '" + command + "'\n" + kUsage);
}

// -------------------------------------------------------- value parsing

double parse_real(const std::string& key, const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || !std::isfinite(v))
        throw UsageError("key '" + key + "' expects a finite real, got '" + text + "'");
    return v;
}

long parse_integer(const std::string& key, const std::string& text) {
    char* end = nullptr;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
        throw UsageError("key '" + key + "' expects an integer, got '" + text + "'");
    return v;
}

std::size_t parse_count(const std::string& key, const std::string& text) {
    const long v = parse_integer(key, text);
    if (v < 0) throw UsageError("key '" + key + "' expects a non-negative count");
    return static_cast<std::size_t>(v);
}

std::vector<double> parse_real_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string item =
            text.substr(start, comma == std::string::npos ? comma : comma - start);
        out.push_back(parse_real(key, item));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

void check_choice(const std::string& key, const std::string& text, const char* choices) {
    std::string options(choices);
    std::size_t start = 0;
    while (true) {
        const std::size_t bar = options.find('|', start);
        if (options.substr(start, bar == std::string::npos ? bar : bar - start) == text) return;
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    throw UsageError("key '" + key + "' must be one of {" + options + "}, got '" + text + "'");
}

// Resolved, type-checked parameter set for one command.
class ParamSet {
  public:
    ParamSet(const std::string& command, const std::map<std::string, std::string>& raw) {
        const std::vector<KeySchema>& schema = schema_for(command);
        for (const auto& [key, value] : raw) {
            (void)value;
            const bool known = std::any_of(schema.begin(), schema.end(),
                                           [&](const KeySchema& ks) { return key == ks.name; });
            if (!known)
                throw UsageError("unknown key '--" + key + "' for command '" + command + "'");
        }
        for (const KeySchema& ks : schema) {
            const auto it = raw.find(ks.name);
            const std::string text = it == raw.end() ? ks.fallback : it->second;
            switch (ks.kind) {
                case KeyKind::real: parse_real(ks.name, text); break;
                case KeyKind::integer: parse_integer(ks.name, text); break;
                case KeyKind::count: parse_count(ks.name, text); break;
                case KeyKind::choice: check_choice(ks.name, text, ks.choices); break;
                case KeyKind::real_list: parse_real_list(ks.name, text); break;
            }
            values_[ks.name] = text;
        }
    }

    double real(const std::string& key) const { return parse_real(key, values_.at(key)); }
    long integer(const std::string& key) const { return parse_integer(key, values_.at(key)); }
    std::size_t count(const std::string& key) const { return parse_count(key, values_.at(key)); }
    std::string str(const std::string& key) const { return values_.at(key); }
    std::vector<double> real_list(const std::string& key) const {
        return parse_real_list(key, values_.at(key));
    }
    const std::map<std::string, std::string>& resolved() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

// ------------------------------------------------------------ utilities

std::string trimmed(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read config file '" + path + "'");
    std::map<std::string, std::string> params;
    std::string line;
    while (std::getline(in, line)) {
        const std::string text = trimmed(line);
        if (text.empty() || text[0] == '#') continue;
        const std::size_t eq = text.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line is not `key = value`: '" + text + "'");
        const std::string key = trimmed(text.substr(0, eq));
        const std::string value = trimmed(text.substr(eq + 1));
        if (key.empty()) throw UsageError("config line has an empty key: '" + text + "'");
        params[key] = value;
    }
    return params;
}

std::string describe(const Grid1D& g) {
    return "[" + format_value(g.x_min) + ", " + format_value(g.x_max) +
           ") n=" + std::to_string(g.n) + " dx=" + format_value(g.dx);
}

void write_table(const std::filesystem::path& dir, const std::string& rel, const CsvTable& t,
                 RunManifest& man) {
    write_csv(dir / rel, t);
    man.output_files.push_back(rel);
}

unsigned worker_count() {
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (workers > 8) workers = 8;
    if (const char* env = std::getenv("QHLAB_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1)
            throw UsageError("QHLAB_THREADS must be a positive integer");
        if (static_cast<unsigned long>(cap) < workers) workers = static_cast<unsigned>(cap);
    }
    return workers;
}

// ------------------------------------------------------------- commands

void run_evolve(const ParamSet& ps, const std::filesystem::path& dir, RunManifest& man) {
    const Grid1D grid = Grid1D::build(ps.real("x_min"), ps.real("x_max"), ps.count("n"));
    man.grid_description = describe(grid);
    const std::string kind = ps.str("potential");
    const Potential1D v = kind == "free" ? Potential1D::free_space(grid)
                                         : Potential1D::harmonic(grid, ps.real("kappa"));
    EvolutionConfig ecfg;
    ecfg.dt = ps.real("dt");
    if (!(ecfg.dt > 0.0)) throw UsageError("dt must be positive");

    const std::string initial = ps.str("initial");
    GaussianPairParams pair;
    pair.L = ps.real("L");
    pair.sigma = ps.real("sigma");
    pair.p0 = ps.real("p0");

    std::size_t steps = ps.count("steps");
    if (steps == 0)
        steps = (initial == "pair" && pair.p0 > 0.0)
                    ? static_cast<std::size_t>(std::ceil(pair.L / pair.p0 / ecfg.dt))
                    : 1000;
    ecfg.steps = steps;
    const std::size_t rec = ps.count("record_every");
    ecfg.record_every = rec == 0 ? steps : rec;

    std::vector<HydroSnapshot> snaps;
    if (initial == "pair" && kind == "free" && pair.p0 > 0.0) {
        snaps = evolve_pair_to_interference(pair, grid, ecfg, ps.real("drift_sign"));
    } else {
        ComplexField psi;
        if (initial == "pair")
            psi = gaussian_pair(pair, grid, ps.real("drift_sign"));
        else if (initial == "gaussian")
            psi = free_gaussian_oracle(pair.sigma, pair.p0, ps.real("x0"), 0.0, grid);
        else
            psi = coherent_state_oracle(ps.real("d"), 0.0, grid);
        for (const Snapshot& s : split_step_evolve(psi, v, ecfg))
            snaps.push_back({s.time, to_hydro(s.psi)});
    }

    std::filesystem::create_directories(dir / "snapshots");
    std::string index_text = "step,time,filename\n";
    std::vector<std::filesystem::path> files;
    for (const HydroSnapshot& s : snaps) {
        const long long step = std::llround(s.time / ecfg.dt);
        char name[48];
        std::snprintf(name, sizeof name, "snapshots/step_%06lld.csv", step);
        CsvTable t;
        t.columns = {"x", "rho", "J"};
        t.rows.reserve(grid.n);
        for (std::size_t i = 0; i < grid.n; ++i)
            t.rows.push_back({grid.x(i), s.hydro.rho[i], s.hydro.current[i]});
        write_table(dir, name, t, man);
        index_text += std::to_string(step) + "," + format_value(s.time) + "," +
                      std::filesystem::path(name).filename().string() + "\n";
        files.push_back(dir / name);
    }
    {
        std::ofstream out(dir / "snapshots/index.csv", std::ios::binary);
        out << index_text;
        if (!out) throw ConfigError("evolve: cannot write snapshot index");
    }
    man.output_files.push_back("snapshots/index.csv");

    PlotSpec spec;
    PanelSpec before;
    before.title = "t = " + format_value(snaps.front().time);
    before.x_label = "x";
    before.y_label = "rho";
    before.series = {{"rho", "x", "rho"}};
    before.csv_path = files.front();
    PanelSpec after = before;
    after.title = "t = " + format_value(snaps.back().time);
    after.csv_path = files.back();
    spec.panels = {before, after};
    emit_plot(files.front(), spec, dir / "figure.svg");
    man.output_files.push_back("figure.svg");
}

void run_instability(const ParamSet& ps, const std::filesystem::path& dir, RunManifest& man) {
    const long n_exp = ps.integer("N");
    if (n_exp < 2)
        throw UsageError("N must be an integer > 1 (the density plateau is eps^N with N > 1)");
    const Grid1D grid = Grid1D::build(ps.real("x_min"), ps.real("x_max"), ps.count("n"));
    man.grid_description = describe(grid);

    InstabilityConfig icfg;
    icfg.profile = ps.str("profile") == "plateau" ? InstabilityConfig::Profile::plateau
                                                  : InstabilityConfig::Profile::calibrated_pair;
    icfg.epsilons = ps.real_list("eps");
    icfg.n_exponent = static_cast<int>(n_exp);
    icfg.ell = ps.real("ell");
    icfg.shoulder_width = ps.real("shoulder_width");
    icfg.sigma = ps.real("sigma");
    icfg.p0 = ps.real("p0");

    const SweepResult res = epsilon_sweep(icfg, grid, worker_count());

    CsvTable t;
    t.columns = {"epsilon", "s_base", "s_perturbed", "delta_s_exact", "delta_s_predicted",
                 "rel_err"};
    for (const SweepRow& r : res.rows)
        t.rows.push_back(
            {r.epsilon, r.s_base, r.s_perturbed, r.delta_s_exact, r.delta_s_predicted, r.rel_err});
    write_table(dir, "sweep.csv", t, man);

    {
        std::ofstream out(dir / "fit_summary.txt", std::ios::binary);
        out << "slope = " << format_value(res.fit.slope) << '\n';
        out << "intercept = " << format_value(res.fit.intercept) << '\n';
        out << "r_squared = " << format_value(res.fit.r_squared) << '\n';
        out << "n_points = " << res.n_points << '\n';
        out << "fit_skipped = " << (res.fit_skipped ? "true" : "false") << '\n';
        if (!out) throw ConfigError("instability: cannot write fit summary");
    }
    man.output_files.push_back("fit_summary.txt");

    PlotSpec spec;
    PanelSpec p;
    p.title = "phase response vs epsilon";
    p.x_label = "log10(epsilon)";
    p.y_label = "log10(delta S)";
    p.log_x = true;
    p.log_y = true;
    p.series = {{"measured", "epsilon", "delta_s_exact"},
                {"predicted", "epsilon", "delta_s_predicted"}};
    spec.panels = {p};
    emit_plot(dir / "sweep.csv", spec, dir / "sweep_loglog.svg");
    man.output_files.push_back("sweep_loglog.svg");
}

void run_quantize(const ParamSet& ps, const std::filesystem::path& dir, RunManifest& man) {
    const long jmax = ps.integer("jmax");
    if (jmax < 0) throw UsageError("jmax must be >= 0");
    const double kappa = ps.real("kappa");
    if (!(kappa > 0.0)) throw UsageError("kappa must be positive (bound spectrum)");
    const Grid1D grid = Grid1D::build(ps.real("x_min"), ps.real("x_max"), ps.count("n"));
    man.grid_description = describe(grid);

    const Potential1D v = Potential1D::harmonic(grid, kappa);
    const std::vector<double> series = terminating_energies(static_cast<int>(jmax));
    const double scale = std::sqrt(kappa);  // V = kappa x^2 rescales E_j to sqrt(kappa)(2j+1)
    const std::vector<double> eig =
        discretized_spectrum(v, grid, static_cast<std::size_t>(jmax) + 1);

    CsvTable t;
    t.columns = {"j", "E_series", "E_oracle", "abs_diff"};
    for (long j = 0; j <= jmax; ++j) {
        const double e_series = scale * series[static_cast<std::size_t>(j)];
        const double e_oracle = eig[static_cast<std::size_t>(j)];
        t.rows.push_back(
            {static_cast<double>(j), e_series, e_oracle, std::abs(e_series - e_oracle)});
    }
    write_table(dir, "spectrum.csv", t, man);

    const long j_cut = ps.integer("j_cut");
    CsvTable d;
    d.columns = {"parameter", "terminates", "termination_index", "log_partial_sum"};
    for (double e : ps.real_list("probe_energies")) {
        const TailDiagnosis td =
            series_tail_diagnosis(e, ps.real("x_probe"), static_cast<int>(j_cut));
        const bool terminates = td.even.terminates || td.odd.terminates;
        const BranchDiagnosis& pick =
            td.even.terminates ? td.even
                               : (td.odd.terminates
                                      ? td.odd
                                      : (td.even.log10_partial >= td.odd.log10_partial ? td.even
                                                                                       : td.odd));
        d.rows.push_back({e, terminates ? 1.0 : 0.0, static_cast<double>(pick.termination_index),
                          pick.log10_partial});
    }
    write_table(dir, "diagnosis.csv", d, man);
}

void run_angular(const ParamSet& ps, const std::filesystem::path& dir, RunManifest& man) {
    const long jmax = ps.integer("jmax");
    if (jmax < 0) throw UsageError("jmax must be >= 0");
    const int j_cut = static_cast<int>(ps.integer("j_cut"));

    CsvTable spect;
    spect.columns = {"j", "lambda", "termination_ratio", "offset_log_partial_sum"};
    for (long j = 0; j <= jmax; ++j) {
        const double lambda = quantized_lambda(static_cast<int>(j));
        const double ratio = legendre_ratio(static_cast<int>(j), lambda);
        const TailDiagnosis td = legendre_tail_diagnosis(lambda + 0.5, j_cut);
        const double off = std::max(td.even.log10_partial, td.odd.log10_partial);
        spect.rows.push_back({static_cast<double>(j), lambda, ratio, off});
    }
    write_table(dir, "lambda_spectrum.csv", spect, man);

    std::vector<double> radii;
    for (int i = 1; i <= 20; ++i) radii.push_back(0.25 * i);
    CsvTable rt;
    rt.columns = {"r", "amplitude", "scale_residual", "flow_residual"};
    for (const RadialSample& s : radial_solution(ps.real("lambda"), ps.real("c1"), radii))
        rt.rows.push_back({s.r, s.amplitude, s.scale_residual, s.flow_residual});
    write_table(dir, "radial.csv", rt, man);

    std::vector<double> ms = {0.0, 1.0, 2.0};
    const double m_key = ps.real("m");
    if (std::find(ms.begin(), ms.end(), m_key) == ms.end()) ms.push_back(m_key);

    const std::vector<double> thetas = {0.3, 0.7, 1.1, 1.9, 2.8};
    const std::vector<double> phis = {0.0, 1.0, 2.0, 5.0};
    CsvTable a;
    a.columns = {"m", "max_imaginary_residual"};
    for (double m : ms) a.rows.push_back({m, angular_imaginary_residual(m, thetas, phis)});
    write_table(dir, "angular_residual.csv", a, man);

    const auto profile = [](double r) { return std::exp(-(r - 2.0) * (r - 2.0)); };
    const std::vector<double> w_radii = {1.0, 2.0, 3.0};
    const std::vector<double> w_phis = {0.0, 1.0471975511965976, 2.2};
    CsvTable w;
    w.columns = {"m",
                 "rho_gap",
                 "current_gap",
                 "wavefunction_gap",
                 "rho_single_valued",
                 "current_single_valued",
                 "wavefunction_single_valued"};
    for (double m : ms) {
        const WindingReport rep = nonquantized_m_witness(m, profile, w_radii, w_phis);
        w.rows.push_back({m, rep.rho_gap, rep.current_gap, rep.wavefunction_gap,
                          rep.rho_single_valued ? 1.0 : 0.0,
                          rep.current_single_valued ? 1.0 : 0.0,
                          rep.wavefunction_single_valued ? 1.0 : 0.0});
    }
    write_table(dir, "m_witness.csv", w, man);
}

void run_validate(const ParamSet& ps, const std::filesystem::path& dir, RunManifest& man) {
    const std::string which = ps.str("case");
    double x_min = ps.real("x_min"), x_max = ps.real("x_max");
    std::size_t n = ps.count("n");
    if (n == 0) {
        if (which == "pair") {
            x_min = -32.0;
            x_max = 32.0;
            n = 4096;
        } else {
            x_min = -20.48;
            x_max = 20.48;
            n = 2048;
        }
    }
    const Grid1D grid = Grid1D::build(x_min, x_max, n);
    man.grid_description = describe(grid);

    double dt = ps.real("dt");
    if (dt == 0.0) dt = grid.dx * grid.dx / 4.0;
    double t_final = ps.real("t_final");
    if (t_final == 0.0) t_final = which == "pair" ? 2.5 : 0.2;

    ComplexField initial;
    Potential1D v = Potential1D::free_space(grid);
    if (which == "stationary") {
        initial = coherent_state_oracle(0.0, 0.0, grid);
        v = Potential1D::harmonic(grid, 1.0);
    } else if (which == "coherent") {
        initial = coherent_state_oracle(ps.real("d"), 0.0, grid);
        v = Potential1D::harmonic(grid, 1.0);
    } else {
        GaussianPairParams pair;
        pair.L = ps.real("L");
        pair.sigma = ps.real("sigma");
        pair.p0 = ps.real("p0");
        initial = gaussian_pair(pair, grid, -1.0);
    }

    const DiscrepancyReport rep = cross_validate(initial, v, t_final, dt);

    CsvTable t;
    t.columns = {"time", "sup_rho_diff", "sup_J_diff"};
    for (std::size_t i = 0; i < rep.time.size(); ++i)
        t.rows.push_back({rep.time[i], rep.sup_rho_diff[i], rep.sup_current_diff[i]});
    write_table(dir, "discrepancy.csv", t, man);

    if (!rep.completed)
        throw NodeError("hydrodynamic description broke down: " + rep.note);
}

}  // namespace

// --------------------------------------------------------------- driver

RunConfig parse_config(const std::vector<std::string>& args) {
    if (args.empty()) throw UsageError(kUsage);
    RunConfig cfg;
    cfg.command = args[0];
    schema_for(cfg.command);  // rejects unknown commands

    std::map<std::string, std::string> flag_params;
    std::string config_file, out_dir;
    for (std::size_t i = 1; i < args.size(); i += 2) {
        const std::string& flag = args[i];
        if (flag.size() < 3 || flag[0] != '-' || flag[1] != '-')
            throw UsageError("expected a --key, got '" + flag + "'\n" + kUsage);
        if (i + 1 >= args.size()) throw UsageError("flag '" + flag + "' is missing its value");
        const std::string key = flag.substr(2);
        const std::string& value = args[i + 1];
        if (key == "config")
            config_file = value;
        else if (key == "out")
            out_dir = value;
        else
            flag_params[key] = value;
    }

    if (!config_file.empty()) cfg.parameters = read_config_file(config_file);
    for (const auto& [key, value] : flag_params) cfg.parameters[key] = value;
    if (const auto it = cfg.parameters.find("out"); it != cfg.parameters.end()) {
        if (out_dir.empty()) out_dir = it->second;
        cfg.parameters.erase(it);
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    return cfg;
}

int run(const RunConfig& cfg) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) {
        std::cerr << "qhlab: cannot create output directory '" << cfg.output_dir.string()
                  << "': " << ec.message() << '\n';
        return 2;
    }

    RunManifest man;
    man.command = cfg.command;
    man.started_at = utc_timestamp();
    for (const auto& [key, value] : cfg.parameters) man.parameters.emplace_back(key, value);
    write_manifest(cfg.output_dir, man);  // before any compute

    int exit_code = 0;
    try {
        const ParamSet ps(cfg.command, cfg.parameters);
        man.parameters.clear();
        for (const auto& [key, value] : ps.resolved()) man.parameters.emplace_back(key, value);
        write_manifest(cfg.output_dir, man);  // now echoing the resolved map

        if (cfg.command == "evolve")
            run_evolve(ps, cfg.output_dir, man);
        else if (cfg.command == "instability")
            run_instability(ps, cfg.output_dir, man);
        else if (cfg.command == "quantize")
            run_quantize(ps, cfg.output_dir, man);
        else if (cfg.command == "angular")
            run_angular(ps, cfg.output_dir, man);
        else
            run_validate(ps, cfg.output_dir, man);
        man.status = "complete";
    } catch (const UsageError& e) {
        man.status = "usage-error";
        man.detail = e.what();
        exit_code = 2;
    } catch (const ConfigError& e) {
        man.status = "usage-error";
        man.detail = e.what();
        exit_code = 2;
    } catch (const NodeError& e) {
        man.status = "error";
        man.detail = e.what();
        exit_code = 1;
    } catch (const NumericError& e) {
        man.status = "error";
        man.detail = e.what();
        exit_code = 1;
    } catch (const CalibrationError& e) {
        man.status = "error";
        man.detail = e.what();
        exit_code = 1;
    } catch (const std::exception& e) {
        man.status = "error";
        man.detail = std::string("unexpected failure: ") + e.what();
        exit_code = 1;
    }
    man.finished_at = utc_timestamp();
    write_manifest(cfg.output_dir, man);
    if (exit_code != 0) std::cerr << "qhlab: " << man.detail << '\n';
    return exit_code;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args;
    for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
    try {
        return run(parse_config(args));
    } catch (const UsageError& e) {
        std::cerr << "qhlab: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace qhlab
