#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace afc {

struct SpinCoherence {
  std::string condition;
  double seconds = 0.0;

  bool operator==(const SpinCoherence&) const = default;
};

/// Measured material parameters. Frequencies in Hz. Presets that only carry
/// annotations leave the comb numbers empty and cannot be planned.
struct MaterialSpec {
  std::string key;   // short identifier, e.g. eu_yso
  std::string name;
  std::optional<double> gamma_h_hz;    // homogeneous linewidth
  std::optional<double> gamma_inh_hz;  // inhomogeneous broadening
  std::optional<double> max_band_hz;   // usable comb bandwidth
  std::optional<double> d_available;   // achievable peak optical depth
  std::vector<SpinCoherence> spin_coherence;
  std::string notes;

  /// Throws ConfigError unless gamma_h < max_band <= gamma_inh for the fields present.
  void validate() const;
  bool plannable() const { return gamma_h_hz && max_band_hz && d_available; }
  bool operator==(const MaterialSpec&) const = default;
};

struct PlanOptions {
  std::optional<double> target_eta;
  std::optional<double> gamma_hz;  // forced peak width
  std::optional<double> finesse;   // forced finesse
  std::optional<double> d_available;
  double k_margin = 10.0;
  double gamma_min_hz = 0.0;
  double control_time_s = 0.0;
};

struct CapacityReport {
  std::string material;
  double peak_width_hz = 0.0;  // gamma
  double peak_sep_hz = 0.0;    // Delta = F gamma
  double finesse = 0.0;
  double d_available = 0.0;
  int n_peaks = 0;             // floor(max_band / Delta)
  double tau_s = 0.0;          // 12 pi / Gamma with Gamma = 2 pi max_band
  double total_s = 0.0;        // N tau
  double control_time_s = 0.0;
  int n_modes = 0;
  double eta_pred = 0.0;
  double d_crib_equiv = 0.0;
  bool feasible = true;
  std::string note;
};

/// Comb design for a material. The finesse is the forced one, else the
/// optimum for d_available; a target efficiency picks the smallest F >= 1
/// that reaches it, and marks the plan infeasible when no F does.
CapacityReport plan_memory(const MaterialSpec& mat, const PlanOptions& opts = {});

/// Depth a CRIB memory needs for N modes at 90% average efficiency: 30 N.
double crib_equivalent_depth(int n_modes);

std::vector<MaterialSpec> material_presets();
/// Preset by key (eu_yso, pr_yso, tm_yag); throws ConfigError when unknown.
MaterialSpec material_preset(const std::string& key);

void to_json(nlohmann::json& j, const SpinCoherence& s);
void from_json(const nlohmann::json& j, SpinCoherence& s);
void to_json(nlohmann::json& j, const MaterialSpec& m);
void from_json(const nlohmann::json& j, MaterialSpec& m);
void to_json(nlohmann::json& j, const CapacityReport& r);

}  // namespace afc
