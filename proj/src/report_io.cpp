#include "rch/report_io.hpp"

#include "rch/errors.hpp"

#include <json.hpp>

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

namespace rch {

using json = nlohmann::ordered_json;

namespace {
std::string fmt17(real v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json nan_safe(real v) {
    if (std::isnan(v)) return nullptr;
    return v;
}
}  // namespace

void write_field_csv(const Field& u, const std::filesystem::path& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw IoError("cannot open " + csv_path.string());
    out << "x,value\n";
    for (int i = 0; i < u.size(); ++i)
        out << fmt17(u.grid().point(i)) << ',' << fmt17(u.values()[i]) << '\n';
    json side;
    side["n"] = u.size();
    side["period"] = TorusGrid::period();
    std::ofstream hdr(csv_path.string() + ".json");
    hdr << side.dump(2) << '\n';
}

Field read_field_csv(const std::filesystem::path& csv_path) {
    std::ifstream hdr(csv_path.string() + ".json");
    if (!hdr) throw IoError("missing sidecar header " + csv_path.string() + ".json");
    json side;
    try {
        hdr >> side;
    } catch (const std::exception& ex) {
        throw IoError(std::string("malformed sidecar header: ") + ex.what());
    }
    if (!side.contains("n") || !side["n"].is_number_integer())
        throw IoError("sidecar header lacks integer n");
    const int n = side["n"].get<int>();
    const real period = side.value("period", TorusGrid::period());
    if (std::abs(period - TorusGrid::period()) > 1e-12)
        throw IoError("field period must be 2*pi");

    TorusGrid grid(n);
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open " + csv_path.string());
    std::string line;
    std::getline(in, line);  // header
    rvec vals;
    vals.reserve(n);
    int i = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw IoError("malformed field row: " + line);
        real x, v;
        try {
            x = std::stod(line.substr(0, comma));
            v = std::stod(line.substr(comma + 1));
        } catch (const std::exception&) {
            throw IoError("malformed field row: " + line);
        }
        if (i < n && std::abs(x - grid.point(i)) > 1e-9)
            throw IoError("field abscissa mismatch at row " + std::to_string(i));
        vals.push_back(v);
        ++i;
    }
    if (i != n)
        throw IoError("field row count " + std::to_string(i) + " != n = " +
                      std::to_string(n));
    return Field::from_values(grid, std::move(vals));
}

void write_report_csv(const InflationReport& rep, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string());
    out << "N,t,norm_B1_inf1,norm_ux_B0_inf1,norm_ux_log,norm_C01,norm_E_B1,"
           "yxi_min,yxi_max,blowup_flag\n";
    for (const auto& r : rep.runs) {
        if (!r.completed) continue;
        for (const auto& row : r.series) {
            out << r.N << ',' << fmt17(row.t) << ',' << fmt17(row.norm_b1) << ','
                << fmt17(row.norm_ux_b0) << ',' << fmt17(row.norm_ux_log) << ','
                << fmt17(row.norm_c01) << ',' << fmt17(row.norm_e_b1) << ','
                << fmt17(row.yxi_min) << ',' << fmt17(row.yxi_max) << ','
                << (r.blown_up ? 1 : 0) << '\n';
        }
    }
}

namespace {
json fit_to_json(const SlopeFit& f) {
    json j;
    j["defined"] = f.defined;
    j["slope"] = nan_safe(f.slope);
    j["stderr"] = nan_safe(f.stderr_slope);
    j["intercept"] = nan_safe(f.intercept);
    j["residual_rms"] = nan_safe(f.residual_rms);
    return j;
}
}  // namespace

std::string report_to_json(const InflationReport& rep) {
    json j;
    j["config"] = {{"n_list", rep.config.n_list},
                   {"omega", rep.config.omega},
                   {"samples", rep.config.samples},
                   {"dealias_fraction", rep.config.dealias_fraction},
                   {"time_horizon_factor", rep.config.time_horizon_factor},
                   {"dt_cap", rep.config.dt_cap},
                   {"courant", rep.config.courant},
                   {"u_ref_floor", rep.config.u_ref_floor},
                   {"grid_offset", rep.config.grid_offset},
                   {"flow_substeps", rep.config.flow_substeps},
                   {"d_check_stride", rep.config.d_check_stride},
                   {"blowup_threshold", rep.config.blowup_threshold},
                   {"fft_threads", rep.config.fft_threads}};
    j["runs"] = json::array();
    for (const auto& r : rep.runs) {
        json jr;
        jr["N"] = r.N;
        jr["omega"] = r.omega;
        if (!r.error.empty()) {
            jr["error"] = r.error;
            j["runs"].push_back(jr);
            continue;
        }
        jr["n"] = r.n;
        jr["dt"] = r.dt;
        jr["steps"] = r.steps;
        jr["t_end_target"] = r.t_end_target;
        jr["t_end_achieved"] = r.t_end_achieved;
        jr["u0"] = {{"B1_inf1", r.u0_b1},
                    {"B1_log", r.u0_b1log},
                    {"ux2_B0_inf1", r.u0x2_b0},
                    {"C01", r.u0_c01},
                    {"E0_B1_inf1", r.e0_b1},
                    {"E0_equiv_ratio", r.e0_equiv_ratio},
                    {"offband_mass", r.u0_offband_mass}};
        jr["peak_ratio"] = r.peak_ratio;
        jr["pearson_proxy"] = r.pearson_proxy;
        jr["yxi_min"] = r.yxi_min;
        jr["yxi_max"] = r.yxi_max;
        jr["window_exit_time"] = nan_safe(r.window_exit_time);
        jr["c_envelope"] = r.c_envelope;
        jr["ux_log_sup_over_N910"] = r.ux_log_sup_ratio;
        jr["flags"] = {{"completed", r.completed},
                       {"blown_up", r.blown_up},
                       {"window_ok", r.window_ok},
                       {"e0_equiv_ok", r.e0_equiv_ok},
                       {"mechanism_ok", r.mechanism_ok}};
        jr["warnings"] = r.warnings;
        json series = json::array();
        for (const auto& row : r.series) {
            series.push_back({{"t", row.t},
                              {"norm_B1_inf1", row.norm_b1},
                              {"norm_ux_B0_inf1", row.norm_ux_b0},
                              {"norm_ux_log", row.norm_ux_log},
                              {"norm_C01", row.norm_c01},
                              {"norm_E_B1", row.norm_e_b1},
                              {"rj_sum", row.rj_sum},
                              {"rj_sum_2j", row.rj_sum_2j},
                              {"rj_sup_j", row.rj_sup_j},
                              {"yxi_min", row.yxi_min},
                              {"yxi_max", row.yxi_max}});
        }
        jr["series"] = std::move(series);
        json mech = json::array();
        for (const auto& mc : r.mechanism) {
            mech.push_back({{"t", mc.t},
                            {"D", mc.d_value},
                            {"B1_composed", mc.b1_composed},
                            {"u0_B1_sub", mc.u0_b1_sub},
                            {"E0_B1_sub", mc.e0_b1_sub},
                            {"margin", mc.lower_bound_margin},
                            {"forced_ok", mc.forced_inequality_ok},
                            {"spec_form_ok", mc.spec_inequality_ok}});
        }
        jr["mechanism"] = std::move(mech);
        j["runs"].push_back(std::move(jr));
    }
    j["fits"] = {{"u0_B1_inf1", fit_to_json(rep.fit_u0_b1)},
                 {"u0_B1_log", fit_to_json(rep.fit_u0_b1log)},
                 {"u0x2_B0_inf1", fit_to_json(rep.fit_u0x2_b0)},
                 {"peak_ratio", fit_to_json(rep.fit_peak_ratio)}};
    j["verdicts"] = {{"trend_confirmed", rep.trend_confirmed},
                     {"all_windows_ok", rep.all_windows_ok}};
    return j.dump(2) + "\n";
}

void write_report_json(const InflationReport& rep, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string());
    out << report_to_json(rep);
}

std::string coefficients_to_json(const ModelCoefficients& m) {
    json j;
    j["omega"] = m.omega;
    j["c"] = m.c;
    j["alpha"] = m.alpha;
    j["beta0"] = m.beta0;
    j["beta"] = m.beta;
    j["omega1"] = m.omega1;
    j["omega2"] = m.omega2;
    j["gamma"] = m.gamma;
    j["c0"] = m.c0;
    j["c1"] = m.c1;
    j["c2"] = m.c2;
    j["c3"] = m.c3;
    j["gamma_residual"] = m.gamma_residual();
    j["multiple_real_roots"] = m.multiple_real_roots;
    return j.dump(2) + "\n";
}

std::string fnv1a_hex(const std::string& bytes) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

}  // namespace rch
