#include "afc/cli.hpp"

#include "afc/analytic.hpp"
#include "afc/capacity.hpp"
#include "afc/comb.hpp"
#include "afc/config.hpp"
#include "afc/error.hpp"
#include "afc/experiments.hpp"
#include "afc/multimode.hpp"
#include "afc/output.hpp"
#include "afc/solver.hpp"
#include "afc/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

namespace afc::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

const std::vector<std::string_view> kCombKeys = {"delta_hz", "finesse", "gamma_hz", "big_gamma_hz",
                                                 "delta0_hz", "depth", "envelope"};

std::vector<std::string_view> with_comb_keys(std::vector<std::string_view> extra) {
  extra.insert(extra.end(), kCombKeys.begin(), kCombKeys.end());
  return extra;
}

CombParams comb_from_config(const KeyValueConfig& c, Envelope default_envelope) {
  CombParams p;
  p.delta = hz_to_rad(c.required_number("delta_hz"));
  const bool has_f = c.has("finesse"), has_g = c.has("gamma_hz");
  if (has_f == has_g) {
    throw ConfigError(c.source() + ": give exactly one of 'finesse' and 'gamma_hz'");
  }
  if (has_f) {
    double f = c.required_number("finesse");
    if (!(f > 1.0)) throw ConfigError(c.where("finesse") + ": must exceed 1");
    p.gamma_tilde = p.delta / (f * kFwhmPerSigma);
  } else {
    double g = c.required_number("gamma_hz");
    if (!(g > 0.0)) throw ConfigError(c.where("gamma_hz") + ": must be > 0");
    p.gamma_tilde = hz_to_rad(g) / kFwhmPerSigma;
  }
  p.big_gamma = hz_to_rad(c.number("big_gamma_hz", std::numeric_limits<double>::infinity()));
  p.delta0 = hz_to_rad(c.number("delta0_hz", 0.0));
  p.peak_depth = c.number("depth", 0.0);
  std::string env = c.choice("envelope", {"gaussian", "square"},
                             default_envelope == Envelope::gaussian ? "gaussian" : "square");
  p.envelope = env == "square" ? Envelope::square : Envelope::gaussian;
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(c.source() + ": " + e.what());
  }
  return p;
}

const std::vector<std::string_view> kGridKeys = {"nz", "samples_per_fwhm", "nodes_per_peak",
                                                 "peak_cutoff", "spin_loss", "storage_time_s"};

SimConfig grid_from_config(const KeyValueConfig& c) {
  SimConfig s;
  s.nz = c.integer("nz", 0);
  s.samples_per_fwhm = c.number("samples_per_fwhm", s.samples_per_fwhm);
  s.nodes_per_peak = c.integer("nodes_per_peak", s.nodes_per_peak);
  s.peak_cutoff = c.number("peak_cutoff", s.peak_cutoff);
  s.spin_loss = c.number("spin_loss", 1.0);
  s.storage_time = c.number("storage_time_s", 0.0);
  if (s.nz != 0 && s.nz < 16) throw ConfigError(c.where("nz") + ": must be 0 (automatic) or >= 16");
  if (!(s.samples_per_fwhm > 0.0)) throw ConfigError(c.where("samples_per_fwhm") + ": must be > 0");
  if (s.nodes_per_peak < 7) throw ConfigError(c.where("nodes_per_peak") + ": must be >= 7");
  if (!(s.peak_cutoff > 0.0 && s.peak_cutoff <= 1.0)) {
    throw ConfigError(c.where("peak_cutoff") + ": must lie in (0, 1]");
  }
  if (!(s.spin_loss >= 0.0 && s.spin_loss <= 1.0)) throw ConfigError(c.where("spin_loss") + ": must lie in [0, 1]");
  if (!(s.storage_time >= 0.0)) throw ConfigError(c.where("storage_time_s") + ": must be >= 0");
  return s;
}

std::string joined(const fs::path& dir, const std::string& name) { return (dir / name).string(); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json flags_json(const std::vector<std::string>& flags) { return json(flags); }

// ---------------------------------------------------------------- comb

CsvTable density_table(const CombParams& p, double lo_hz, double hi_hz, int points) {
  CsvTable t({"delta_hz", "density"});
  for (int k = 0; k < points; ++k) {
    double hz = points == 1 ? lo_hz : lo_hz + (hi_hz - lo_hz) * k / (points - 1);
    CsvTable::Row r;
    r << hz << comb_density(hz_to_rad(hz), p);
    t.add(r);
  }
  return t;
}

CsvTable ft_table(const CombParams& p, double t_max, int points, FtMethod method) {
  CsvTable t({"t_s", "re", "im", "abs"});
  for (int k = 0; k < points; ++k) {
    double ts = points == 1 ? 0.0 : t_max * k / (points - 1);
    cplx v = comb_ft(ts, p, method);
    CsvTable::Row r;
    r << ts << v.real() << v.imag() << std::abs(v);
    t.add(r);
  }
  return t;
}

int cmd_comb(const std::string& params_path, const std::string& emit, bool with_ft,
             const std::string& out_path, std::ostream& out) {
  KeyValueConfig c = KeyValueConfig::load(params_path);
  c.restrict_to(with_comb_keys({"band_min_hz", "band_max_hz", "points", "ft_t_max_s", "ft_points", "ft_method"}));
  CombParams p = comb_from_config(c, Envelope::gaussian);
  if (emit != "csv") throw ConfigError("--emit supports only csv");
  const double delta_hz = rad_to_hz(p.delta);
  double lo = c.number("band_min_hz", rad_to_hz(p.delta0) - 5.0 * delta_hz);
  double hi = c.number("band_max_hz", rad_to_hz(p.delta0) + 5.0 * delta_hz);
  int points = c.integer("points", 2001);
  if (!(hi > lo)) throw ConfigError(c.where("band_max_hz") + ": must exceed band_min_hz");
  if (points < 1) throw ConfigError(c.where("points") + ": must be >= 1");
  std::string density = density_table(p, lo, hi, points).str();

  std::string ft;
  if (with_ft) {
    double t_max = c.number("ft_t_max_s", 3.0 / delta_hz);
    int ft_points = c.integer("ft_points", 1001);
    FtMethod method = c.choice("ft_method", {"analytic", "quadrature"}, "analytic") == "quadrature"
                          ? FtMethod::quadrature
                          : FtMethod::analytic;
    if (!(t_max > 0.0)) throw ConfigError(c.where("ft_t_max_s") + ": must be > 0");
    if (ft_points < 1) throw ConfigError(c.where("ft_points") + ": must be >= 1");
    ft = ft_table(p, t_max, ft_points, method).str();
  }

  if (out_path.empty()) {
    out << density;
    if (with_ft) out << "\n" << ft;
    return kExitOk;
  }
  fs::path target(out_path);
  write_atomic(out_path, density);
  if (with_ft) {
    fs::path ft_path = target.parent_path() / (target.stem().string() + "_ft.csv");
    write_atomic(ft_path.string(), ft);
  }
  return kExitOk;
}

// ---------------------------------------------------------------- analytic

CsvTable figure2_curves() {
  CsvTable t({"d", "eta_F4", "eta_F6", "eta_F10"});
  for (int k = 0; k <= 100; ++k) {
    double d = 0.5 * k;
    CsvTable::Row r;
    r << d << efficiency_backward(d, 4.0) << efficiency_backward(d, 6.0) << efficiency_backward(d, 10.0);
    t.add(r);
  }
  return t;
}

CsvTable figure3_curves() {
  CsvTable t({"F", "eta_d5", "eta_d10", "eta_d20", "eta_d40"});
  for (int k = 0; k <= 290; ++k) {
    double f = 1.0 + 0.1 * k;
    CsvTable::Row r;
    r << f;
    for (double d : {5.0, 10.0, 20.0, 40.0}) r << efficiency_backward(d, f);
    t.add(r);
  }
  return t;
}

CsvTable figure3_optima() {
  CsvTable t({"d", "F_opt", "eta_opt"});
  for (double d : {5.0, 10.0, 20.0, 40.0}) {
    OptimalFinesse o = optimal_finesse(d);
    CsvTable::Row r;
    r << d << o.finesse << o.eta;
    t.add(r);
  }
  return t;
}

struct AnalyticArgs {
  int figure = 0;
  std::string emit = "csv";
  std::string out;
  std::optional<double> d;
  std::optional<double> finesse;
  double delta0_over_delta = 0.0;
  double loss_factor = 1.0;
  bool optimal = false;
};

int cmd_analytic(const AnalyticArgs& a, std::ostream& out) {
  if (a.figure != 0) {
    if (a.emit != "csv") throw ConfigError("--emit supports only csv");
    std::string body;
    if (a.figure == 2) {
      body = figure2_curves().str();
    } else if (a.figure == 3) {
      body = figure3_curves().str();
    } else {
      throw ConfigError("--figure must be 2 or 3");
    }
    if (a.out.empty()) {
      out << body;
    } else {
      write_atomic(a.out, body);
    }
    return kExitOk;
  }
  if (!a.d) throw ConfigError("analytic needs --figure or --d");
  const double d = *a.d;
  if (!(d >= 0.0)) throw ConfigError("--d must be >= 0");
  if (!(a.loss_factor >= 0.0 && a.loss_factor <= 1.0)) throw ConfigError("--loss-factor must lie in [0, 1]");
  if (a.optimal) {
    if (!(d > 0.0)) throw ConfigError("--optimal needs --d > 0");
    OptimalFinesse o = optimal_finesse(d);
    out << "d = " << format_number(d) << "\n";
    out << "F_opt = " << format_number(o.finesse) << "\n";
    out << "eta_opt = " << format_number(o.eta * a.loss_factor) << "\n";
    return kExitOk;
  }
  if (!a.finesse) throw ConfigError("analytic needs --finesse (or --optimal)");
  const double f = *a.finesse;
  if (!(f > 1.0)) throw ConfigError("--finesse must exceed 1");
  CombParams p = CombParams::from_finesse(kTwoPi, f, std::numeric_limits<double>::infinity(), d,
                                          kTwoPi * a.delta0_over_delta);
  const double d_eff = effective_depth(d, f);
  const cplx amp = output_amplitude(p);
  out << "d = " << format_number(d) << "\n";
  out << "F = " << format_number(f) << "\n";
  out << "d_eff = " << format_number(d_eff) << "\n";
  out << "transmission = " << format_number(transmitted_amplitude(d_eff)) << "\n";
  out << "amplitude = " << format_number(std::abs(amp)) << "\n";
  out << "phase_rad = " << format_number(output_phase(p.delta0, p.delta)) << "\n";
  out << "eta = " << format_number(efficiency_backward(d, f) * a.loss_factor) << "\n";
  out << "eta_forward = " << format_number(efficiency_forward(d_eff, f) * a.loss_factor) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- simulate

CsvTable fields_table(const FieldEnvelope& in, const FieldEnvelope& trans, const FieldEnvelope& outp) {
  CsvTable t({"t_s", "abs_e_in", "abs_e_trans", "abs_e_out", "phase_in_rad", "phase_trans_rad",
              "phase_out_rad"});
  double lo = in.t0;
  double hi = std::max({in.t_end(), trans.t_end(), outp.t_end()});
  const std::size_t n = static_cast<std::size_t>(std::floor((hi - lo) / in.dt + 1e-9)) + 1;
  auto phase = [](cplx v) { return std::abs(v) > 0.0 ? std::arg(v) : 0.0; };
  for (std::size_t k = 0; k < n; ++k) {
    double ts = lo + static_cast<double>(k) * in.dt;
    cplx a = in.at(ts), b = trans.at(ts), o = outp.at(ts);
    CsvTable::Row r;
    r << ts << std::abs(a) << std::abs(b) << std::abs(o) << phase(a) << phase(b) << phase(o);
    t.add(r);
  }
  return t;
}

json convergence_json(const ConvergenceReport& c) {
  return json{{"eta", c.eta},
              {"delta_dt", c.delta_dt},
              {"delta_dz", c.delta_dz},
              {"delta_nodes", c.delta_nodes},
              {"passed", c.passed},
              {"failing_axis", c.failing_axis}};
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir, std::ostream& out,
                 std::ostream& err) {
  KeyValueConfig c = KeyValueConfig::load(config_path);
  std::vector<std::string_view> keys = with_comb_keys(kGridKeys);
  for (std::string_view k : {"retrieval", "pulse_bandwidth_hz", "pulse_centre_s", "flip_time_s",
                             "echo_window_s", "t_end_s", "convergence_check", "kernel"}) {
    keys.push_back(k);
  }
  c.restrict_to(keys);
  CombParams p = comb_from_config(c, Envelope::gaussian);
  SimConfig cfg = grid_from_config(c);
  const bool forward = c.choice("retrieval", {"backward", "forward"}, "backward") == "forward";
  cfg.kernel = c.choice("kernel", {"parallel", "reference"}, "parallel") == "reference" ? KernelKind::reference
                                                                                        : KernelKind::parallel;
  cfg.convergence_check = c.flag("convergence_check", false);
  if (auto v = c.number("flip_time_s")) {
    if (forward) throw ConfigError(c.where("flip_time_s") + ": not allowed with retrieval = forward");
    cfg.flip_time = *v;
  }
  cfg.echo_window = c.number("echo_window_s", 0.0);
  cfg.t_end = c.number("t_end_s", 0.0);

  PulseTrain input = default_input(p);
  if (auto bw = c.number("pulse_bandwidth_hz")) {
    if (!(*bw > 0.0)) throw ConfigError(c.where("pulse_bandwidth_hz") + ": must be > 0");
    input.pulses[0] = pulse_from_bandwidth(hz_to_rad(*bw), 0.0);
  }
  input.pulses[0].centre = c.number("pulse_centre_s", 0.0);

  const TimeGrid g = input_grid(p, input, cfg);
  FieldEnvelope sampled = input.sample(g.t0, g.dt, g.n);
  SimConfig run_cfg = cfg;
  run_cfg.dt = g.dt;
  run_cfg.convergence_check = false;
  SimResult r = forward ? forward_echo(p, sampled, run_cfg) : simulate_storage(p, sampled, run_cfg);

  std::optional<ConvergenceReport> conv;
  if (cfg.convergence_check) {
    SimConfig study = cfg;
    study.convergence_check = false;
    conv = convergence_study(p, input, study, forward ? Retrieval::forward : Retrieval::backward);
    if (!conv->passed) r.flags.push_back("not_converged:" + conv->failing_axis);
  }

  const double period = kTwoPi / p.delta;
  json j{{"retrieval", forward ? "forward" : "backward"},
         {"eta", r.eta},
         {"eta_analytic", r.analytic_eta},
         {"output_phase_rad", r.output_phase},
         {"expected_phase_rad", output_phase(p.delta0, p.delta)},
         {"timing",
          {{"period_s", period},
           {"input_centroid_s", sampled.centroid()},
           {"echo_peak_time_s", r.echo_peak_time},
           {"echo_delay_s", r.echo_delay},
           {"flip_time_s", forward ? json(nullptr) : json(cfg.flip_time.value_or(sampled.centroid() + 0.5 * period))},
           {"storage_time_s", cfg.storage_time}}},
         {"energy_balance_residual", r.energy_balance_residual},
         {"stored_fraction", r.stored_fraction},
         {"residual_fraction", r.residual_fraction},
         {"grid", {{"nz", r.nz}, {"bins", r.bins}, {"dt_s", r.dt}}},
         {"flags", flags_json(r.flags)}};
  if (conv) j["convergence"] = convergence_json(*conv);

  const FieldEnvelope& out_field = forward ? FieldEnvelope{} : r.output_field;
  std::string fields = fields_table(sampled, r.transmitted_field, out_field).str();
  fs::path dir(out_dir);
  write_atomic(joined(dir, "result.json"), dump(j));
  write_atomic(joined(dir, "fields.csv"), fields);
  out << "eta = " << format_number(r.eta) << " (analytic " << format_number(r.analytic_eta) << ")\n";
  err << "wall time " << format_number(r.wall_seconds) << " s\n";
  return kExitOk;
}

// ---------------------------------------------------------------- multimode

CsvTable modes_table(const CrosstalkReport& rep) {
  CsvTable t({"k", "eta_k", "centroid_in_s", "centroid_out_s"});
  for (std::size_t k = 0; k < rep.per_mode_eta.size(); ++k) {
    CsvTable::Row r;
    r << k << rep.per_mode_eta[k] << rep.centroid_in[k] << rep.centroid_out[k];
    t.add(r);
  }
  return t;
}

CsvTable crosstalk_table(const CrosstalkReport& rep) {
  const int n = static_cast<int>(rep.per_mode_eta.size());
  CsvTable t({"k", "j", "overlap_sq"});
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      CsvTable::Row r;
      r << k << j << std::norm(rep.overlap(k, j));
      t.add(r);
    }
  }
  return t;
}

json multimode_json(const ModeTrain& train, const SimResult& res, const CrosstalkReport& rep) {
  return json{{"n_modes", train.n_modes},
              {"slot_s", train.slot},
              {"total_duration_s", train.total_duration},
              {"control_time_s", train.control_time},
              {"period_s", train.rephasing_time},
              {"mean_eta", rep.mean_eta},
              {"uniformity_std", rep.uniformity_std},
              {"max_crosstalk", rep.max_crosstalk},
              {"eta_window", res.eta},
              {"grid", {{"nz", res.nz}, {"bins", res.bins}, {"dt_s", res.dt}}},
              {"warnings", rep.warnings},
              {"flags", flags_json(res.flags)}};
}

void write_multimode(const fs::path& dir, const std::string& suffix, const ModeTrain& train,
                     const SimResult& res, const CrosstalkReport& rep) {
  write_atomic(joined(dir, "modes" + suffix + ".csv"), modes_table(rep).str());
  write_atomic(joined(dir, "crosstalk" + suffix + ".csv"), crosstalk_table(rep).str());
  write_atomic(joined(dir, "multimode" + suffix + ".json"), dump(multimode_json(train, res, rep)));
}

int cmd_multimode(const std::string& config_path, const std::string& out_dir, std::ostream& out,
                  std::ostream& err) {
  KeyValueConfig c = KeyValueConfig::load(config_path);
  std::vector<std::string_view> keys = with_comb_keys(kGridKeys);
  keys.push_back("n_modes");
  keys.push_back("t0_control_s");
  c.restrict_to(keys);
  CombParams p = comb_from_config(c, Envelope::square);
  if (std::isinf(p.big_gamma)) throw ConfigError(c.source() + ": multimode needs big_gamma_hz");
  SimConfig cfg = grid_from_config(c);
  const double t0 = c.number("t0_control_s", 0.0);
  const int capacity = mode_capacity(p.big_gamma, p.delta, t0).n_modes;
  const int n = c.integer("n_modes", capacity);
  ModeTrain train = make_mode_train(n, p.big_gamma, p.delta, t0);
  SimResult res = simulate_train(p, train, cfg);
  CrosstalkReport rep = matched_filter_efficiencies(res.output_field, train, cfg.storage_time);
  for (const auto& w : rep.warnings) err << "warning: " << w << "\n";
  write_multimode(fs::path(out_dir), "", train, res, rep);
  out << "modes = " << n << ", mean eta = " << format_number(rep.mean_eta)
      << ", std = " << format_number(rep.uniformity_std) << "\n";
  err << "wall time " << format_number(res.wall_seconds) << " s\n";
  return kExitOk;
}

// ---------------------------------------------------------------- capacity

std::string capacity_table(const CapacityReport& r) {
  std::ostringstream s;
  auto row = [&](const char* label, const std::string& value) {
    s << "  " << label;
    for (std::size_t i = std::string(label).size(); i < 22; ++i) s << ' ';
    s << value << "\n";
  };
  s << r.material << (r.feasible ? "" : "  (infeasible: " + r.note + ")") << "\n";
  row("peak width [Hz]", format_number(r.peak_width_hz));
  row("peak separation [Hz]", format_number(r.peak_sep_hz));
  row("finesse", format_number(r.finesse));
  row("peaks N_p", std::to_string(r.n_peaks));
  row("mode slot tau [s]", format_number(r.tau_s));
  row("train length T [s]", format_number(r.total_s));
  row("modes N", std::to_string(r.n_modes));
  row("depth d", format_number(r.d_available));
  row("predicted eta", format_number(r.eta_pred));
  row("CRIB depth for N", format_number(r.d_crib_equiv));
  return s.str();
}

struct CapacityArgs {
  std::string material = "eu_yso";
  std::optional<double> d, gamma_khz, finesse, target_eta, t0_us, gamma_min_khz;
  double k_margin = 10.0;
  std::string out;
  bool list = false;
};

int cmd_capacity(const CapacityArgs& a, std::ostream& out) {
  if (a.list) {
    out << dump(json(material_presets()));
    return kExitOk;
  }
  MaterialSpec m = material_preset(a.material);
  PlanOptions o;
  o.d_available = a.d;
  if (a.gamma_khz) o.gamma_hz = *a.gamma_khz * 1e3;
  o.finesse = a.finesse;
  o.target_eta = a.target_eta;
  o.k_margin = a.k_margin;
  if (a.gamma_min_khz) o.gamma_min_hz = *a.gamma_min_khz * 1e3;
  if (a.t0_us) o.control_time_s = *a.t0_us * 1e-6;
  CapacityReport r = plan_memory(m, o);
  std::string body = dump(json(r));
  if (!a.out.empty()) write_atomic(a.out, body);
  out << body << "\n" << capacity_table(r);
  return kExitOk;
}

// ---------------------------------------------------------------- reproduce

CsvTable figure2_numeric(const std::vector<GridPoint>& grid) {
  CsvTable t({"F", "d", "eta_numeric", "eta_analytic", "abs_error", "delta_dt", "delta_dz", "delta_nodes",
              "converged"});
  for (const GridPoint& g : grid) {
    CsvTable::Row r;
    r << g.finesse << g.d << g.result.eta << g.result.analytic_eta << std::abs(g.result.eta - g.result.analytic_eta);
    if (g.convergence) {
      r << g.convergence->delta_dt << g.convergence->delta_dz << g.convergence->delta_nodes
        << (g.convergence->passed ? "true" : "false");
    } else {
      r << std::numeric_limits<double>::quiet_NaN() << std::numeric_limits<double>::quiet_NaN()
        << std::numeric_limits<double>::quiet_NaN() << "unchecked";
    }
    t.add(r);
  }
  return t;
}

CsvTable figure2_anchors() {
  CsvTable t({"label", "d", "F", "eta"});
  for (auto [label, d, f] : {std::tuple{"90% at d=40, F=10", 40.0, 10.0}, std::tuple{"80% at d=25, F=6", 25.0, 6.0}}) {
    CsvTable::Row r;
    r << label << d << f << efficiency_backward(d, f);
    t.add(r);
  }
  return t;
}

struct ReproduceArgs {
  std::string target;
  std::string out = "afc_output";
  bool analytic_only = false;
  bool full = false;
  bool no_convergence = false;
};

int cmd_reproduce(const ReproduceArgs& a, std::ostream& out, std::ostream& err) {
  fs::path dir(a.out);
  if (a.target == "figure2") {
    std::string curves = figure2_curves().str();
    std::string anchors = figure2_anchors().str();
    std::string numeric;
    if (!a.analytic_only) {
      auto grid = run_efficiency_grid(figure2_points(), SimConfig{}, !a.no_convergence);
      numeric = figure2_numeric(grid).str();
    }
    write_atomic(joined(dir, "figure2_curves.csv"), curves);
    write_atomic(joined(dir, "figure2_anchors.csv"), anchors);
    if (!a.analytic_only) write_atomic(joined(dir, "figure2_numeric.csv"), numeric);
  } else if (a.target == "figure3") {
    write_atomic(joined(dir, "figure3_curves.csv"), figure3_curves().str());
    write_atomic(joined(dir, "figure3_optima.csv"), figure3_optima().str());
  } else if (a.target == "eu_example") {
    CapacityReport cap = eu_capacity_report();
    if (!a.analytic_only) {
      MultimodeRun scaled = run_eu_train(false, SimConfig{});
      write_multimode(dir, "", scaled.train, scaled.result, scaled.report);
      out << "scaled run: " << scaled.train.n_modes << " modes, mean eta = "
          << format_number(scaled.report.mean_eta) << "\n";
      if (a.full) {
        MultimodeRun full = run_eu_train(true, SimConfig{});
        write_multimode(dir, "_full", full.train, full.result, full.report);
        out << "full run: " << full.train.n_modes << " modes, mean eta = "
            << format_number(full.report.mean_eta) << "\n";
        err << "full run wall time " << format_number(full.result.wall_seconds) << " s\n";
      }
    }
    write_atomic(joined(dir, "capacity.json"), dump(json(cap)));
    out << capacity_table(cap);
  } else {
    throw ConfigError("unknown reproduce target '" + a.target + "' (figure2, figure3, eu_example)");
  }
  out << "wrote " << dir.string() << "\n";
  return kExitOk;
}

void apply_thread_cap() {
  const char* env = std::getenv("AFC_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw ConfigError(std::string("AFC_THREADS must be a positive integer, got '") + env + "'");
  }
  omp_set_num_threads(static_cast<int>(n));
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Atomic frequency comb quantum memory simulator", "afc"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::string params_path, emit = "csv", out_path;
  bool with_ft = false;
  auto* comb = app.add_subcommand("comb", "Comb density and its Fourier transform as CSV");
  comb->add_option("--params", params_path, "Comb config file")->required();
  comb->add_option("--emit", emit, "Output format")->check(CLI::IsMember({"csv"}));
  comb->add_flag("--ft", with_ft, "Also emit the time-domain transform");
  comb->add_option("--out", out_path, "Output CSV path (stdout when absent)");

  AnalyticArgs an;
  auto* analytic = app.add_subcommand("analytic", "Closed-form efficiencies");
  analytic->add_option("--figure", an.figure, "Emit the efficiency curves of figure 2 or 3")
      ->check(CLI::IsMember({2, 3}));
  analytic->add_option("--emit", an.emit, "Output format")->check(CLI::IsMember({"csv"}));
  analytic->add_option("--out", an.out, "Output CSV path (stdout when absent)");
  analytic->add_option("--d", an.d, "Peak optical depth");
  analytic->add_option("--finesse", an.finesse, "Comb finesse");
  analytic->add_option("--delta0-over-delta", an.delta0_over_delta, "Comb offset in units of the peak separation");
  analytic->add_option("--loss-factor", an.loss_factor, "Scalar multiplier for transfer or spin losses");
  analytic->add_flag("--optimal", an.optimal, "Optimal finesse for --d");

  std::string sim_config, sim_out;
  auto* simulate = app.add_subcommand("simulate", "Single-pulse storage run");
  simulate->add_option("--config", sim_config, "Run config file")->required();
  simulate->add_option("--out", sim_out, "Output directory")->required();

  std::string mm_config, mm_out = ".";
  auto* multimode = app.add_subcommand("multimode", "Temporal multimode storage run");
  multimode->add_option("--config", mm_config, "Run config file")->required();
  multimode->add_option("--out", mm_out, "Output directory");

  CapacityArgs ca;
  auto* capacity = app.add_subcommand("capacity", "Mode-capacity plan for a material");
  capacity->add_option("--material", ca.material, "Preset key (eu_yso, pr_yso, tm_yag)");
  capacity->add_option("--d", ca.d, "Override the available peak depth");
  capacity->add_option("--gamma-khz", ca.gamma_khz, "Force the comb peak width");
  capacity->add_option("--finesse", ca.finesse, "Force the finesse");
  capacity->add_option("--target-eta", ca.target_eta, "Required efficiency");
  capacity->add_option("--t0-us", ca.t0_us, "Control-pulse time T0");
  capacity->add_option("--k-margin", ca.k_margin, "Peak width over homogeneous linewidth");
  capacity->add_option("--gamma-min-khz", ca.gamma_min_khz, "Smallest peak width that can be prepared");
  capacity->add_option("--out", ca.out, "Also write the JSON report here");
  capacity->add_flag("--list", ca.list, "Print the material presets as JSON");

  ReproduceArgs re;
  auto* reproduce = app.add_subcommand("reproduce", "Regenerate figure data and the Eu example");
  reproduce->add_option("target", re.target, "figure2, figure3 or eu_example")
      ->required()
      ->check(CLI::IsMember({"figure2", "figure3", "eu_example"}));
  reproduce->add_option("--out", re.out, "Output directory");
  reproduce->add_flag("--analytic-only", re.analytic_only, "Skip numerical runs");
  reproduce->add_flag("--full", re.full, "eu_example: also run the full 100-mode train");
  reproduce->add_flag("--no-convergence", re.no_convergence, "figure2: skip convergence studies");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "afc: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    apply_thread_cap();
    if (comb->parsed()) return cmd_comb(params_path, emit, with_ft, out_path, out);
    if (analytic->parsed()) return cmd_analytic(an, out);
    if (simulate->parsed()) return cmd_simulate(sim_config, sim_out, out, err);
    if (multimode->parsed()) return cmd_multimode(mm_config, mm_out, out, err);
    if (capacity->parsed()) return cmd_capacity(ca, out);
    if (reproduce->parsed()) return cmd_reproduce(re, out, err);
  } catch (const ConfigError& e) {
    err << "afc: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "afc: numerical error in " << e.module() << ": " << e.what() << "\n";
    return kExitNumerical;
  } catch (const fs::filesystem_error& e) {
    err << "afc: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace afc::cli
