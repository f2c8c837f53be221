// Command-line front end: model coefficients, initial data, single solves,
// the norm-inflation experiment, the initial-data scaling sweep, and
// standalone diagnostics. Exit codes: 0 success, 1 usage, 2 input/numeric
// setup failure, 3 verdict failure.

#include "rch/fft.hpp"
#include "rch/inflation_lab.hpp"
#include "rch/report_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace rch;

namespace {

json config_to_json(const InflationConfig& c) {
    return json{{"n_list", c.n_list},
                {"omega", c.omega},
                {"samples", c.samples},
                {"dealias_fraction", c.dealias_fraction},
                {"time_horizon_factor", c.time_horizon_factor},
                {"dt_cap", c.dt_cap},
                {"courant", c.courant},
                {"u_ref_floor", c.u_ref_floor},
                {"grid_offset", c.grid_offset},
                {"flow_substeps", c.flow_substeps},
                {"d_check_stride", c.d_check_stride},
                {"blowup_threshold", c.blowup_threshold},
                {"fft_threads", c.fft_threads}};
}

void config_from_json(const json& j, InflationConfig& c) {
    if (j.contains("n_list")) c.n_list = j["n_list"].get<std::vector<int>>();
    if (j.contains("omega")) c.omega = j["omega"].get<real>();
    if (j.contains("samples")) c.samples = j["samples"].get<int>();
    if (j.contains("dealias_fraction")) c.dealias_fraction = j["dealias_fraction"].get<real>();
    if (j.contains("time_horizon_factor")) c.time_horizon_factor = j["time_horizon_factor"].get<real>();
    if (j.contains("dt_cap")) c.dt_cap = j["dt_cap"].get<real>();
    if (j.contains("courant")) c.courant = j["courant"].get<real>();
    if (j.contains("u_ref_floor")) c.u_ref_floor = j["u_ref_floor"].get<real>();
    if (j.contains("grid_offset")) c.grid_offset = j["grid_offset"].get<int>();
    if (j.contains("flow_substeps")) c.flow_substeps = j["flow_substeps"].get<int>();
    if (j.contains("d_check_stride")) c.d_check_stride = j["d_check_stride"].get<int>();
    if (j.contains("blowup_threshold")) c.blowup_threshold = j["blowup_threshold"].get<real>();
    if (j.contains("fft_threads")) c.fft_threads = j["fft_threads"].get<int>();
}

// Flat key=value overrides; values parsed as JSON scalars/arrays.
void apply_overrides(const std::vector<std::string>& sets, json& cfg) {
    for (const auto& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override must be key=value: " + kv);
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        try {
            cfg[key] = json::parse(val);
        } catch (const std::exception&) {
            cfg[key] = val;
        }
    }
}

json load_config_file(const std::string& path, std::string* raw_out) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    std::string raw((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
    if (raw_out) *raw_out = raw;
    try {
        return json::parse(raw);
    } catch (const std::exception& ex) {
        throw IoError(std::string("malformed config JSON: ") + ex.what());
    }
}

void write_manifest(const fs::path& dir, const std::string& command,
                    const json& resolved, const std::string& inputs) {
    json m;
    m["command"] = command;
    m["resolved"] = resolved;
    m["inputs_hash"] = fnv1a_hex(inputs);
    std::ofstream out(dir / "manifest.json");
    out << m.dump(2) << '\n';
}

fs::path ensure_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

std::vector<int> parse_n_list(const std::string& s) {
    std::vector<int> out;
    size_t pos = 0;
    while (pos < s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(std::stoi(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return out;
}

int cmd_coeffs(real omega, const std::string& out_path) {
    const auto m = compute_coefficients(omega);
    const std::string js = coefficients_to_json(m);
    if (out_path.empty()) {
        std::cout << js;
    } else {
        std::ofstream out(out_path);
        out << js;
    }
    return 0;
}

int cmd_initial_data(int N, int grid_offset, const std::string& out_dir) {
    const fs::path dir = ensure_dir(out_dir);
    const TorusGrid grid(1 << (N + grid_offset));
    const auto bank = build_filter_bank(grid);
    const Field u0 = build_initial_data(N, grid);
    write_field_csv(u0, dir / "u0.csv");

    const Field u0x = differentiate(u0);
    const Field u0x2 = multiply_dealias(u0x, u0x);
    const auto blocks = block_sup_norms(u0.spectrum(), bank);
    json j;
    j["N"] = N;
    j["n"] = grid.size();
    j["B1_inf1"] = besov_from_blocks(blocks, 1.0, 1.0);
    j["B1_log"] = besov_log_from_blocks(blocks, 1.0);
    j["ux2_B0_inf1"] =
        besov_from_blocks(block_sup_norms(u0x2.spectrum(), bank), 0.0, 1.0);
    j["C01"] = u0.max_abs() + u0x.max_abs();
    std::ofstream out(dir / "u0_norms.json");
    out << j.dump(2) << '\n';
    write_manifest(dir, "initial-data",
                   json{{"N", N}, {"grid_offset", grid_offset}}, std::to_string(N));
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_solve(real omega, int n, real amp, int mode, const std::string& u0_file,
              real dt, real t_end, int samples, const std::string& out_dir) {
    const fs::path dir = ensure_dir(out_dir);
    Field u0 = [&] {
        if (!u0_file.empty()) return read_field_csv(u0_file);
        TorusGrid grid(n);
        return Field::sample(grid, [&](real x) { return amp * std::cos(mode * x); });
    }();
    const auto coeffs = compute_coefficients(omega);
    SolverConfig scfg;
    scfg.dt = dt;
    scfg.t_end = t_end;
    const long long steps = static_cast<long long>(std::ceil(t_end / dt));
    scfg.snapshot_stride = std::max<long long>(1, steps / std::max(1, samples));
    const Trajectory traj = integrate(u0, coeffs, scfg);

    std::ofstream out(dir / "series.csv");
    out << "t,u_max,ux_max,mean,energy_h1\n";
    char buf[64];
    for (size_t i = 0; i < traj.times.size(); ++i) {
        const Field u = traj.state_field(i);
        const Field ux = differentiate(u);
        real energy = 0;
        for (int k = 0; k < u.size(); ++k)
            energy += u.values()[k] * u.values()[k] + ux.values()[k] * ux.values()[k];
        energy *= TorusGrid::period() / u.size();
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[i]);
        out << buf << ',' << traj.u_max[i] << ',' << traj.ux_max[i] << ','
            << u.mean() << ',' << energy << '\n';
    }
    write_field_csv(traj.state_field(traj.times.size() - 1), dir / "final.csv");
    json resolved{{"omega", omega}, {"n", u0.size()},    {"dt", dt},
                  {"t_end", t_end}, {"samples", samples}, {"u0_file", u0_file},
                  {"amp", amp},     {"mode", mode}};
    write_manifest(dir, "solve", resolved, resolved.dump());
    if (traj.blown_up)
        std::cout << "wave breaking at t = " << traj.blowup_time << '\n';
    return 0;
}

int cmd_inflate(const std::string& config_path, const std::vector<std::string>& sets,
                real omega_flag, const std::string& n_list_flag, int samples_flag,
                const std::string& out_dir) {
    json jcfg = json::object();
    std::string raw;
    if (!config_path.empty()) jcfg = load_config_file(config_path, &raw);
    apply_overrides(sets, jcfg);
    if (omega_flag >= 0.0) jcfg["omega"] = omega_flag;
    if (!n_list_flag.empty()) jcfg["n_list"] = parse_n_list(n_list_flag);
    if (samples_flag > 0) jcfg["samples"] = samples_flag;

    InflationConfig cfg;
    config_from_json(jcfg, cfg);
    cfg.validate();
    fft::set_threads(cfg.fft_threads);

    const fs::path dir = ensure_dir(out_dir);
    const json resolved = config_to_json(cfg);
    write_manifest(dir, "inflate", resolved, resolved.dump());

    const InflationReport rep = run_sweep(cfg);
    write_report_json(rep, dir / "report.json");
    write_report_csv(rep, dir / "report.csv");

    bool any_error = false;
    for (const auto& r : rep.runs)
        if (!r.error.empty()) any_error = true;
    std::cout << "inflate: " << rep.runs.size() << " run(s), trend_confirmed="
              << (rep.trend_confirmed ? "true" : "false")
              << ", all_windows_ok=" << (rep.all_windows_ok ? "true" : "false")
              << '\n';
    if (any_error) return 2;
    if (!rep.trend_confirmed || !rep.all_windows_ok) return 3;
    return 0;
}

int cmd_sweep(real omega, const std::string& n_list_flag, int grid_offset,
              const std::string& out_dir) {
    const std::vector<int> n_list =
        n_list_flag.empty() ? std::vector<int>{6, 7, 8, 9, 10, 11}
                            : parse_n_list(n_list_flag);
    const fs::path dir = ensure_dir(out_dir);

    std::vector<real> lx, l_b1, l_b1log, l_x2;
    json rows = json::array();
    for (int N : n_list) {
        const TorusGrid grid(1 << (N + grid_offset));
        const auto bank = build_filter_bank(grid);
        const Field u0 = build_initial_data(N, grid);
        const Field u0x = differentiate(u0);
        const Field u0x2 = multiply_dealias(u0x, u0x);
        const auto blocks = block_sup_norms(u0.spectrum(), bank);
        const real b1 = besov_from_blocks(blocks, 1.0, 1.0);
        const real b1log = besov_log_from_blocks(blocks, 1.0);
        const real x2 = besov_from_blocks(block_sup_norms(u0x2.spectrum(), bank), 0.0, 1.0);
        rows.push_back({{"N", N},
                        {"B1_inf1", b1},
                        {"B1_log", b1log},
                        {"ux2_B0_inf1", x2},
                        {"C01", u0.max_abs() + u0x.max_abs()}});
        lx.push_back(std::log2(real(N)));
        l_b1.push_back(std::log2(b1));
        l_b1log.push_back(std::log2(b1log));
        l_x2.push_back(std::log2(x2));
    }
    auto fit_json = [](const SlopeFit& f) {
        return json{{"defined", f.defined},
                    {"slope", f.defined ? json(f.slope) : json(nullptr)},
                    {"stderr", f.defined ? json(f.stderr_slope) : json(nullptr)}};
    };
    json j;
    j["rows"] = rows;
    j["fits"] = {{"u0_B1_inf1", fit_json(fit_line(lx, l_b1))},
                 {"u0_B1_log", fit_json(fit_line(lx, l_b1log))},
                 {"u0x2_B0_inf1", fit_json(fit_line(lx, l_x2))}};
    std::ofstream out(dir / "scalings.json");
    out << j.dump(2) << '\n';
    std::cout << j["fits"].dump(2) << '\n';
    json resolved{{"omega", omega}, {"n_list", n_list}, {"grid_offset", grid_offset}};
    write_manifest(dir, "sweep", resolved, resolved.dump());
    return 0;
}

int cmd_diag(const std::string& field_path, const std::string& out_dir) {
    const Field u = read_field_csv(field_path);
    const auto bank = build_filter_bank(u.grid());
    const Field ux = differentiate(u);

    // partition-of-unity residual over the covered band
    real resid = 0;
    for (int k = 0; k <= bank.covered_band(); ++k) {
        real s = bank.chi[k];
        for (int j = 0; j <= bank.j_max; ++j) s += bank.phi[j][k];
        resid = std::max(resid, std::abs(s - 1.0));
    }

    const auto ub = block_sup_norms(u.spectrum(), bank);
    const auto uxb = block_sup_norms(ux.spectrum(), bank);
    const auto cd = commutator_diag(u, bank);

    json j;
    j["grid"] = {{"n", u.size()}, {"j_max", bank.j_max}};
    j["partition_residual"] = resid;
    j["norms"] = {{"B1_inf1", besov_from_blocks(ub, 1.0, 1.0)},
                  {"B0_inf1", besov_from_blocks(ub, 0.0, 1.0)},
                  {"B1_log", besov_log_from_blocks(ub, 1.0)},
                  {"ux_B0_inf1", besov_from_blocks(uxb, 0.0, 1.0)},
                  {"ux_B0_log", besov_log_from_blocks(uxb, 0.0)},
                  {"C01", u.max_abs() + ux.max_abs()}};
    j["commutator"] = {{"rj_sup", cd.rj_sup},
                       {"sum", cd.sum},
                       {"sum_2j", cd.sum_2j},
                       {"sup_j", cd.sup_j},
                       {"ratio_sum_2j", cd.ratio_sum_2j},
                       {"ratio_sum", cd.ratio_sum},
                       {"ratio_sup_j", cd.ratio_sup_j}};
    const std::string out = j.dump(2) + "\n";
    if (!out_dir.empty()) {
        const fs::path dir = ensure_dir(out_dir);
        std::ofstream f(dir / "diagnostics.json");
        f << out;
        write_manifest(dir, "diag", json{{"field", field_path}}, out);
    }
    std::cout << out;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"rotation Camassa-Holm norm-inflation laboratory"};
    app.require_subcommand(1);

    auto* coeffs = app.add_subcommand("coeffs", "model coefficients for a rotation speed");
    real omega = -1.0;
    std::string out_path;
    coeffs->add_option("--omega", omega, "rotation speed (>= 0)")->required();
    coeffs->add_option("--out", out_path, "output JSON path (default stdout)");

    auto* initial = app.add_subcommand("initial-data", "build and export the initial datum");
    int N = 8, grid_offset = 8;
    std::string out_dir = "out";
    initial->add_option("--N", N, "frequency index")->required();
    initial->add_option("--grid-offset", grid_offset, "n = 2^(N+offset)");
    initial->add_option("--out", out_dir, "output directory");

    auto* solve = app.add_subcommand("solve", "integrate one initial condition");
    real s_omega = 0.0, s_amp = 0.1, s_dt = 1e-3, s_tend = 1.0;
    int s_n = 256, s_mode = 1, s_samples = 64;
    std::string s_file, s_out = "out";
    solve->add_option("--omega", s_omega, "rotation speed");
    solve->add_option("--n", s_n, "grid size (power of two)");
    solve->add_option("--amp", s_amp, "cosine amplitude");
    solve->add_option("--mode", s_mode, "cosine mode");
    solve->add_option("--u0-file", s_file, "initial field CSV (overrides cosine)");
    solve->add_option("--dt", s_dt, "time step");
    solve->add_option("--t-end", s_tend, "final time");
    solve->add_option("--samples", s_samples, "snapshot count");
    solve->add_option("--out", s_out, "output directory");

    auto* inflate = app.add_subcommand("inflate", "run the norm-inflation experiment");
    std::string i_config, i_nlist, i_out = "out";
    std::vector<std::string> i_sets;
    real i_omega = -1.0;
    int i_samples = 0;
    inflate->add_option("--config", i_config, "JSON config path");
    inflate->add_option("--set", i_sets, "flat key=value override (repeatable)");
    inflate->add_option("--omega", i_omega, "rotation speed override");
    inflate->add_option("--n-list", i_nlist, "comma-separated N values");
    inflate->add_option("--samples", i_samples, "snapshot count override");
    inflate->add_option("--out", i_out, "output directory");

    auto* sweep = app.add_subcommand("sweep", "initial-data scaling table and slope fits");
    std::string w_nlist, w_out = "out";
    real w_omega = 1.0;
    int w_offset = 8;
    sweep->add_option("--omega", w_omega, "rotation speed (unused by u0, kept in manifest)");
    sweep->add_option("--n-list", w_nlist, "comma-separated N values (default 6..11)");
    sweep->add_option("--grid-offset", w_offset, "n = 2^(N+offset)");
    sweep->add_option("--out", w_out, "output directory");

    auto* diag = app.add_subcommand("diag", "Besov/commutator diagnostics of a field file");
    std::string d_field, d_out;
    diag->add_option("--field", d_field, "field CSV path")->required();
    diag->add_option("--out", d_out, "output directory (default stdout only)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*coeffs) return cmd_coeffs(omega, out_path);
        if (*initial) return cmd_initial_data(N, grid_offset, out_dir);
        if (*solve)
            return cmd_solve(s_omega, s_n, s_amp, s_mode, s_file, s_dt, s_tend,
                             s_samples, s_out);
        if (*inflate)
            return cmd_inflate(i_config, i_sets, i_omega, i_nlist, i_samples, i_out);
        if (*sweep) return cmd_sweep(w_omega, w_nlist, w_offset, w_out);
        if (*diag) return cmd_diag(d_field, d_out);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
    return 1;
}
