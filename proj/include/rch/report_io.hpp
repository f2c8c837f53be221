#pragma once

#include "rch/inflation_lab.hpp"

#include <filesystem>
#include <string>

namespace rch {

/// Field interchange format: CSV of "x,value" rows plus a sidecar JSON
/// header {"n": .., "period": ..} at <path>.json. Values are written with
/// 17 significant digits (round-trip exact).
void write_field_csv(const Field& u, const std::filesystem::path& csv_path);
Field read_field_csv(const std::filesystem::path& csv_path);

/// One row per (N, t) sample:
/// N,t,norm_B1_inf1,norm_ux_B0_inf1,norm_ux_log,norm_C01,norm_E_B1,yxi_min,yxi_max,blowup_flag
void write_report_csv(const InflationReport& rep, const std::filesystem::path& path);

std::string report_to_json(const InflationReport& rep);
void write_report_json(const InflationReport& rep, const std::filesystem::path& path);

std::string coefficients_to_json(const ModelCoefficients& m);

/// FNV-1a 64-bit content hash, hex-encoded; used to stamp manifests.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace rch
