// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include "afc/analytic.hpp"
#include "afc/capacity.hpp"
#include "afc/cli.hpp"
#include "afc/comb.hpp"
#include "afc/experiments.hpp"
#include "afc/multimode.hpp"
#include "afc/solver.hpp"
#include "afc/units.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace afc;

namespace {

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Check analytic_anchors() {
  Check c;
  const double a = efficiency_backward(40.0, 10.0);
  const double b = efficiency_backward(25.0, 6.0);
  const double e = efficiency_backward(10.0, 4.0);
  c.require(std::abs(a - 0.905) <= 0.001, "eta(40,10)=" + fmt("%.6f", a));
  c.require(std::abs(b - 0.801) <= 0.001, "eta(25,6)=" + fmt("%.6f", b));
  c.require(e > 0.5, "eta(10,4)=" + fmt("%.6f", e));
  if (c.ok) c.note("eta(40,10)=" + fmt("%.6f", a) + " eta(25,6)=" + fmt("%.6f", b) + " eta(10,4)=" + fmt("%.6f", e));
  return c;
}

Check forward_bound() {
  Check c;
  double best = 0.0, at = 0.0;
  for (int k = 0; k <= 100000; ++k) {
    const double x = 10.0 * k / 100000.0;
    const double v = efficiency_forward(x);
    if (v > best) best = v, at = x;
  }
  c.require(std::abs(best - 0.5413) <= 0.0005, "max=" + fmt("%.6f", best));
  c.require(std::abs(at - 2.0) <= 0.01, "argmax=" + fmt("%.4f", at));
  if (c.ok) c.note("max " + fmt("%.6f", best) + " at d_eff=" + fmt("%.4f", at));
  return c;
}

Check numeric_equivalence() {
  Check c;
  std::vector<GridPoint> grid = run_efficiency_grid(figure2_points(), SimConfig{}, true);
  double worst = 0.0, worst_conv = 0.0;
  for (const GridPoint& g : grid) {
    const double err = std::abs(g.result.eta - efficiency_backward(g.d, g.finesse));
    worst = std::max(worst, err);
    const ConvergenceReport& r = *g.convergence;
    worst_conv = std::max({worst_conv, r.delta_dt, r.delta_dz, r.delta_nodes});
    c.require(err <= 0.02, "d=" + fmt("%g", g.d) + " F=" + fmt("%g", g.finesse) + " |err|=" + fmt("%.4f", err));
    c.require(r.passed, "d=" + fmt("%g", g.d) + " F=" + fmt("%g", g.finesse) + " not converged (" + r.failing_axis + ")");
  }
  c.note(std::to_string(grid.size()) + " points, max |err|=" + fmt("%.4f", worst) + ", max |d eta|=" +
         fmt("%.1e", worst_conv));
  return c;
}

Check echo_timing_and_phase() {
  Check c;
  double worst_phase = 0.0;
  double base_offset = 0.0;
  for (double frac : {0.0, 0.25, 0.5, 1.0}) {
    CombParams p = reference_comb(40.0, 10.0, frac * hz_to_rad(20e3));
    SimResult s = simulate_storage(p, default_input(p), SimConfig{});
    const double offset = (s.echo_delay - kTwoPi / p.delta) / s.dt;
    const double expect = std::numbers::pi - kTwoPi * frac;
    const double err = std::abs(wrap_phase(s.output_phase - expect));
    worst_phase = std::max(worst_phase, err);
    c.require(std::abs(offset) <= 2.0, "echo offset " + fmt("%.2f", offset) + " dt at D0/D=" + fmt("%g", frac));
    c.require(err <= 0.05, "phase error " + fmt("%.3f", err) + " rad at D0/D=" + fmt("%g", frac));
    if (frac == 0.0) base_offset = offset;
  }
  c.note("echo offset " + fmt("%.2f", base_offset) + " dt, max phase error " + fmt("%.1e", worst_phase) + " rad");
  return c;
}

Check energy_bookkeeping() {
  Check c;
  CombParams p = reference_comb(40.0, 10.0);
  SimResult s = simulate_storage(p, default_input(p), SimConfig{});
  c.require(std::abs(s.energy_balance_residual) < 0.01, "balance residual " + fmt("%.2e", s.energy_balance_residual));
  double worst = 0.0;
  for (double loss : {0.9, 0.7, 0.3}) {
    SimConfig cfg;
    cfg.spin_loss = loss;
    const double eta = simulate_storage(p, default_input(p), cfg).eta;
    worst = std::max(worst, std::abs(eta / (s.eta * loss * loss) - 1.0));
  }
  c.require(worst < 1e-3, "s^2 scaling off by " + fmt("%.2e", worst));
  c.note("balance residual " + fmt("%.1e", s.energy_balance_residual) + ", s^2 deviation " + fmt("%.1e", worst));
  return c;
}

Check multimode_eu() {
  Check c;
  MultimodeRun run = run_eu_train(false, SimConfig{});
  const CrosstalkReport& r = run.report;
  const int n = run.train.n_modes;
  c.require(n == 10, "mode count " + std::to_string(n));
  double lo = 1.0, hi = 0.0;
  for (double e : r.per_mode_eta) lo = std::min(lo, e), hi = std::max(hi, e);
  c.require(std::abs(lo - 0.905) <= 0.03 && std::abs(hi - 0.905) <= 0.03,
            "eta_k range [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]");
  c.require(r.uniformity_std < 0.01, "std " + fmt("%.4f", r.uniformity_std));
  // First in, first out: each echo centroid sits in its own slot, in order,
  // all shifted by the same amount.
  const double p = run.train.rephasing_time;
  double off_lo = 1e300, off_hi = -1e300;
  bool ordered = true;
  for (int k = 0; k < n; ++k) {
    const double t = r.centroid_out[k] - p;
    ordered = ordered && t >= run.train.slot_start(k) && t < run.train.slot_start(k + 1);
    if (k > 0) ordered = ordered && r.centroid_out[k] > r.centroid_out[k - 1];
    const double off = t - r.centroid_in[k];
    off_lo = std::min(off_lo, off);
    off_hi = std::max(off_hi, off);
  }
  c.require(ordered, "echo order broken");
  c.require(off_hi - off_lo < run.result.dt, "echo offsets spread " + fmt("%.2f", (off_hi - off_lo) / run.result.dt) + " dt");
  c.note("eta_k in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "], std " + fmt("%.4f", r.uniformity_std) +
         ", max crosstalk " + fmt("%.1e", r.max_crosstalk));
  return c;
}

Check capacity_arithmetic() {
  Check c;
  CapacityReport r = eu_capacity_report();
  c.require(r.n_peaks == 600, "N_p=" + std::to_string(r.n_peaks));
  c.require(r.n_modes == 100, "N=" + std::to_string(r.n_modes));
  c.require(std::abs(r.tau_s - 0.5e-6) < 1e-15, "tau=" + fmt("%.6g", r.tau_s));
  c.require(crib_equivalent_depth(100) == 3000.0, "d_crib(100)=" + fmt("%g", crib_equivalent_depth(100)));
  if (c.ok) c.note("N_p=600, N=100, tau=0.5 us, d_crib=3000");
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), {});
}

Check property_suites() {
  Check c;

  // transform duality over random in-regime combs, t in [0, 4 pi / Delta]
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uf(24.0, 60.0), ug(10.0, 40.0), u0(-0.5, 0.5), ut(0.0, 2.0);
  double worst_ft = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const Envelope env = trial % 2 ? Envelope::square : Envelope::gaussian;
    CombParams p = CombParams::from_finesse(kTwoPi, uf(rng), ug(rng) * kTwoPi, 1.0, u0(rng) * kTwoPi, env);
    const double scale = std::abs(comb_ft(0.0, p, FtMethod::analytic));
    for (int k = 0; k < 12; ++k) {
      const double t = ut(rng);
      worst_ft = std::max(worst_ft, std::abs(comb_ft(t, p, FtMethod::analytic) - comb_ft(t, p, FtMethod::quadrature)) / scale);
    }
  }
  c.require(worst_ft < 1e-6, "FT duality " + fmt("%.1e", worst_ft));

  // superposition of modes
  const double delta = hz_to_rad(20e3);
  CombParams p = CombParams::from_finesse(delta, 10.0, 18.0 * delta, 40.0, 0.0, Envelope::square);
  auto output = [&](const std::vector<cplx>& amp) {
    return simulate_train(p, make_mode_train(3, p.big_gamma, p.delta, 0.0, amp), SimConfig{}).output_field;
  };
  const std::vector<cplx> a{1.0, 0.0, cplx(0.0, 0.7)}, b{0.0, cplx(0.5, -0.5), -0.8};
  std::vector<cplx> ab(3);
  for (int k = 0; k < 3; ++k) ab[k] = a[k] + b[k];
  FieldEnvelope fa = output(a), fb = output(b), fab = output(ab);
  double worst_lin = 0.0;
  for (std::size_t k = 0; k < fab.size(); ++k) {
    worst_lin = std::max(worst_lin, std::abs(fab.samples[k] - fa.samples[k] - fb.samples[k]));
  }
  worst_lin /= fab.max_abs();
  c.require(worst_lin < 1e-3, "superposition " + fmt("%.1e", worst_lin));

  // efficiency against finesse: one maximum per depth
  bool unimodal = true;
  for (double d : {5.0, 10.0, 20.0, 40.0}) {
    int turns = 0;
    double prev = efficiency_backward(d, 1.0);
    bool rising = true;
    for (int k = 1; k <= 2900; ++k) {
      const double v = efficiency_backward(d, 1.0 + 0.01 * k);
      if (rising && v < prev) rising = false, ++turns;
      if (!rising && v > prev) ++turns;
      prev = v;
    }
    unimodal = unimodal && turns == 1;
  }
  c.require(unimodal, "efficiency vs finesse not unimodal");

  // byte-identical reruns
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "afc_acceptance_determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "run.cfg") << "delta_hz = 20e3\nfinesse = 10\nbig_gamma_hz = 800e3\ndepth = 40\n";
  bool same = true;
  for (const char* sub : {"a", "b"}) {
    std::ostringstream out, err;
    const int code = cli::run({"afc", "simulate", "--config", (dir / "run.cfg").string(), "--out", (dir / sub).string()},
                              out, err);
    same = same && code == 0;
  }
  for (const char* f : {"result.json", "fields.csv"}) {
    same = same && slurp(dir / "a" / f) == slurp(dir / "b" / f) && !slurp(dir / "a" / f).empty();
  }
  fs::remove_all(dir);
  c.require(same, "reruns differ");

  c.note("FT " + fmt("%.1e", worst_ft) + ", superposition " + fmt("%.1e", worst_lin) + ", unimodal, byte-identical");
  return c;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "analytic anchors", analytic_anchors},
      {2, "forward retrieval bound", forward_bound},
      {3, "numeric-analytic equivalence", numeric_equivalence},
      {4, "echo timing and phase", echo_timing_and_phase},
      {5, "energy bookkeeping", energy_bookkeeping},
      {6, "multimode Eu analogue", multimode_eu},
      {7, "capacity arithmetic", capacity_arithmetic},
      {8, "property suites", property_suites},
  };
  int failed = 0;
  for (const Criterion& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s (%s) [%.1f s]\n", cr.id, cr.name, c.ok ? "PASS" : "FAIL", c.detail.c_str(), secs);
    std::fflush(stdout);
    failed += c.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
