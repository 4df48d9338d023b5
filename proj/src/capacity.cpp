#include "afc/capacity.hpp"

#include "afc/analytic.hpp"
#include "afc/error.hpp"
#include "afc/multimode.hpp"
#include "afc/units.hpp"

#include <cmath>
#include <numbers>

namespace afc {

void MaterialSpec::validate() const {
  auto positive = [&](const std::optional<double>& v, const char* what) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) throw ConfigError(name + ": " + what + " must be > 0");
  };
  positive(gamma_h_hz, "gamma_h");
  positive(gamma_inh_hz, "gamma_inh");
  positive(max_band_hz, "max_band");
  if (d_available && !(*d_available >= 0.0)) throw ConfigError(name + ": d_available must be >= 0");
  if (gamma_h_hz && max_band_hz && !(*gamma_h_hz < *max_band_hz)) {
    throw ConfigError(name + ": gamma_h must be below max_band");
  }
  if (max_band_hz && gamma_inh_hz && !(*max_band_hz <= *gamma_inh_hz)) {
    throw ConfigError(name + ": max_band must not exceed gamma_inh");
  }
}

namespace {

// Smallest F in [1, f_opt] with efficiency >= target, efficiency rising on that interval.
double smallest_finesse_for(double d, double target, double f_opt) {
  if (efficiency_backward(d, 1.0) >= target) return 1.0;
  double lo = 1.0, hi = f_opt;
  while (hi - lo > 1e-9 * hi) {
    double mid = 0.5 * (lo + hi);
    (efficiency_backward(d, mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

CapacityReport plan_memory(const MaterialSpec& mat, const PlanOptions& opts) {
  mat.validate();
  MaterialSpec m = mat;
  if (opts.d_available) m.d_available = *opts.d_available;
  if (!m.plannable()) {
    throw ConfigError(m.name + " carries no comb parameters (needs gamma_h, max_band and d_available)");
  }
  if (!(opts.k_margin >= 1.0)) throw ConfigError("k_margin must be >= 1");
  if (!(opts.control_time_s >= 0.0)) throw ConfigError("control time must be >= 0");
  if (opts.target_eta && !(*opts.target_eta > 0.0 && *opts.target_eta <= 1.0)) {
    throw ConfigError("target efficiency must lie in (0, 1]");
  }
  const double d = *m.d_available;
  if (!(d >= 0.0)) throw ConfigError("d_available must be >= 0");

  CapacityReport r;
  r.material = m.name;
  r.d_available = d;
  r.control_time_s = opts.control_time_s;

  r.peak_width_hz = opts.gamma_hz ? *opts.gamma_hz
                                  : std::max(*m.gamma_h_hz * opts.k_margin, opts.gamma_min_hz);
  if (!(r.peak_width_hz >= *m.gamma_h_hz)) {
    throw ConfigError("peak width " + std::to_string(r.peak_width_hz) +
                      " Hz is narrower than the homogeneous linewidth");
  }

  // With d -> 0 the optimum tends to F = pi / sqrt(2 ln 2).
  const double f_opt = d > 0.0 ? optimal_finesse(d).finesse
                               : std::numbers::pi / std::sqrt(2.0 * std::numbers::ln2);
  if (opts.finesse) {
    if (!(*opts.finesse > 1.0)) throw ConfigError("finesse must exceed 1");
    r.finesse = *opts.finesse;
    if (opts.target_eta && efficiency_backward(d, r.finesse) < *opts.target_eta) {
      r.feasible = false;
      r.note = "target efficiency not reached at the requested finesse";
    }
  } else if (opts.target_eta) {
    if (d > 0.0 && efficiency_backward(d, f_opt) >= *opts.target_eta) {
      r.finesse = smallest_finesse_for(d, *opts.target_eta, f_opt);
    } else {
      r.finesse = f_opt;
      r.feasible = false;
      r.note = "target efficiency exceeds the optimum at d_available";
    }
  } else {
    r.finesse = f_opt;
  }

  r.peak_sep_hz = r.finesse * r.peak_width_hz;
  const double band = *m.max_band_hz;
  r.n_peaks = static_cast<int>(std::floor(band / r.peak_sep_hz * (1.0 + 1e-12)));
  const ModeCapacity cap = mode_capacity(hz_to_rad(band), hz_to_rad(r.peak_sep_hz), opts.control_time_s);
  r.n_modes = cap.n_modes;
  r.tau_s = 6.0 / band;
  r.total_s = r.n_modes * r.tau_s;
  r.eta_pred = efficiency_backward(d, r.finesse);
  r.d_crib_equiv = crib_equivalent_depth(r.n_modes);
  return r;
}

double crib_equivalent_depth(int n_modes) {
  if (n_modes < 0) throw ConfigError("mode count must be >= 0");
  return 30.0 * n_modes;
}

std::vector<MaterialSpec> material_presets() {
  MaterialSpec eu;
  eu.key = "eu_yso";
  eu.name = "Eu:Y2SiO5";
  eu.gamma_h_hz = 122.0;
  eu.max_band_hz = 12e6;
  eu.d_available = 40.0;
  eu.spin_coherence = {{"zero field", 15e-3}, {"observed T2 spin", 36e-3}};
  eu.notes = "absorption coefficient 3-4 /cm; d = 40 assumes a multi-pass arrangement; "
             "band limited by hyperfine spacings; inhomogeneous width not specified";

  MaterialSpec pr;
  pr.key = "pr_yso";
  pr.name = "Pr:Y2SiO5";
  pr.spin_coherence = {{"zero field", 500e-6},
                       {"orientation-specific magnetic field", 82e-3},
                       {"dynamic decoupling", 30.0}};
  pr.notes = "spin coherence annotations only";

  MaterialSpec tm;
  tm.key = "tm_yag";
  tm.name = "Tm:YAG";
  tm.spin_coherence = {{"magnetic field", 300e-6}};
  tm.notes = "spin coherence annotations only";

  return {eu, pr, tm};
}

MaterialSpec material_preset(const std::string& key) {
  std::string known;
  for (const MaterialSpec& m : material_presets()) {
    if (m.key == key) return m;
    known += (known.empty() ? "" : ", ") + m.key;
  }
  throw ConfigError("unknown material '" + key + "' (known: " + known + ")");
}

namespace {

template <class T>
void put_optional(nlohmann::json& j, const char* key, const std::optional<T>& v) {
  j[key] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <class T>
void get_optional(const nlohmann::json& j, const char* key, std::optional<T>& v) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    v.reset();
  } else {
    v = it->get<T>();
  }
}

}  // namespace

void to_json(nlohmann::json& j, const SpinCoherence& s) {
  j = nlohmann::json{{"condition", s.condition}, {"seconds", s.seconds}};
}

void from_json(const nlohmann::json& j, SpinCoherence& s) {
  j.at("condition").get_to(s.condition);
  j.at("seconds").get_to(s.seconds);
}

void to_json(nlohmann::json& j, const MaterialSpec& m) {
  j = nlohmann::json{{"key", m.key}, {"name", m.name}};
  put_optional(j, "gamma_h_hz", m.gamma_h_hz);
  put_optional(j, "gamma_inh_hz", m.gamma_inh_hz);
  put_optional(j, "max_band_hz", m.max_band_hz);
  put_optional(j, "d_available", m.d_available);
  j["spin_coherence"] = m.spin_coherence;
  j["notes"] = m.notes;
}

void from_json(const nlohmann::json& j, MaterialSpec& m) {
  j.at("key").get_to(m.key);
  j.at("name").get_to(m.name);
  get_optional(j, "gamma_h_hz", m.gamma_h_hz);
  get_optional(j, "gamma_inh_hz", m.gamma_inh_hz);
  get_optional(j, "max_band_hz", m.max_band_hz);
  get_optional(j, "d_available", m.d_available);
  m.spin_coherence = j.value("spin_coherence", std::vector<SpinCoherence>{});
  m.notes = j.value("notes", std::string{});
}

void to_json(nlohmann::json& j, const CapacityReport& r) {
  j = nlohmann::json{{"material", r.material},
                     {"peak_width_hz", r.peak_width_hz},
                     {"peak_sep_hz", r.peak_sep_hz},
                     {"finesse", r.finesse},
                     {"d_available", r.d_available},
                     {"n_peaks", r.n_peaks},
                     {"tau_s", r.tau_s},
                     {"total_s", r.total_s},
                     {"control_time_s", r.control_time_s},
                     {"n_modes", r.n_modes},
                     {"eta_pred", r.eta_pred},
                     {"d_crib_equiv", r.d_crib_equiv},
                     {"feasible", r.feasible},
                     {"note", r.note}};
}

}  // namespace afc
