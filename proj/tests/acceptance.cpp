// One PASS/FAIL line per acceptance criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "table_reference.hpp"
#include "topoplasma/dirac.hpp"
#include "topoplasma/errors.hpp"
#include "topoplasma/interface.hpp"
#include "topoplasma/invariants.hpp"
#include "topoplasma/orchestrator.hpp"

using namespace topoplasma;
using json = nlohmann::json;

namespace {

int g_threads = 1;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [x]");
}

std::string fmt(const char* f, double a) {
  char b[64];
  std::snprintf(b, sizeof b, f, a);
  return b;
}

// Budgets for the interface figures are stated for 8 threads.
double scaled_budget(double seconds_at_8) { return seconds_at_8 * 8.0 / g_threads; }

json run(const std::string& cmd, const std::map<std::string, std::string>& kv) {
  Config over;
  for (const auto& [k, v] : kv) over.set(k, v);
  RunOptions o;
  o.write = false;
  o.threads = g_threads;
  return run_command(cmd, effective_config(cmd, Config{}, over), o).summary["result"];
}

json flow_run(const std::string& preset, const std::string& ells) {
  return run("flow", {{"profile.preset", preset},
                      {"grid.N", "300"},
                      {"grid.L", "30"},
                      {"grid.kx_max", "3"},
                      {"grid.n_kx", "121"},
                      {"flow.ell", ells}});
}

int flow_of(const json& gap) { return gap.contains("flow") ? gap["flow"]["flow"].get<int>() : 9999; }

std::string flow_text(const json& gap) {
  std::string s = "ell=" + std::to_string(gap["ell"].get<int>());
  if (!gap["global"].get<bool>()) return s + " no common gap";
  s += " flow=" + std::to_string(flow_of(gap));
  if (gap.contains("bdi") && gap["bdi"].contains("value")) s += " bdi=" + std::to_string(gap["bdi"]["value"].get<int>());
  return s;
}

Outcome criterion1() {
  Outcome o;
  double worst = 0.0;
  for (const auto& row : table1({0.0, 1.0, 10.0})) {
    auto want = reference_curvatures(row.phase, row.sigma_bar);
    for (int j = 0; j < 4; ++j) worst = std::max(worst, std::abs(row.c[j] - want[j]));
  }
  note(o, worst <= 1e-10, "analytic max dev " + fmt("%.1e", worst));
  json r = run("table1", {{"table1.sigma_bars", "0,1,10"}, {"table1.quadrature", "true"}, {"table1.quad_n", "64"}});
  double q = r["quadrature_max_diff"].get<double>();
  note(o, q <= 5e-3, "quadrature max dev " + fmt("%.1e", q));
  return o;
}

Outcome criterion2() {
  Outcome o;
  struct Want { const char* name; int l1, l2; };
  const Want want[] = {{"I+ -> II+", 1, 0},  {"I- -> II-", -1, 0}, {"II+ -> III+", 0, -1},
                       {"II- -> III-", 0, 1}, {"I- -> I+", -2, 0}, {"II- -> II+", 0, 0},
                       {"IV- -> IV+", 0, -2}};
  auto rows = table2(Regularization::omega_decay(0.01));
  bool ok = rows.size() == 7;
  for (size_t i = 0; ok && i < rows.size(); ++i)
    ok = rows[i].transition == want[i].name && rows[i].ell1.value == want[i].l1 && rows[i].ell2.value == want[i].l2 &&
         rows[i].ell1.is_bdi && rows[i].ell2.is_bdi;
  note(o, ok, "omega-decay table");
  for (const auto& r : table2(Regularization::plasma_decay(0.01))) {
    if (r.transition != "II- -> II+" && r.transition != "IV- -> IV+") continue;
    bool good = std::abs(r.ell1.raw - 2.0) < 1e-3 && !r.ell1.is_bdi;
    note(o, good, "plasma-decay " + r.transition + " raw " + fmt("%.4f", r.ell1.raw) + (r.ell1.is_bdi ? " glued" : " not glued"));
  }
  return o;
}

Outcome figure(const std::string& preset, const std::vector<int>& want, double budget8) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  std::string ells;
  for (size_t i = 0; i < want.size(); ++i) ells += (i ? "," : "") + std::to_string(i + 1);
  json r = flow_run(preset, ells);
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  for (size_t i = 0; i < want.size(); ++i) {
    const json& g = r["gaps"][i];
    note(o, g["global"].get<bool>() && flow_of(g) == want[i], flow_text(g));
  }
  note(o, secs < scaled_budget(budget8), fmt("%.0f s", secs));
  return o;
}

Outcome criterion3() {
  Outcome o = figure("fig3", {1, 0}, 1200);
  double wm = transition_frequencies(1.0, 2.0).first;
  note(o, std::abs(wm - 0.8284) < 1e-4, "omega_minus " + fmt("%.6f", wm));
  return o;
}

Outcome criterion6() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  json r = flow_run("fig6", "1,2");
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const json &g1 = r["gaps"][0], &g2 = r["gaps"][1];
  note(o, g1["global"].get<bool>() && flow_of(g1) == 0, flow_text(g1));
  int bdi2 = g2["bdi"].value("value", 0);
  note(o, g2["global"].get<bool>() && std::abs(flow_of(g2)) == 2 && bdi2 == -2 && flow_of(g2) == bdi2, flow_text(g2));
  note(o, secs < scaled_budget(600), fmt("%.0f s", secs));
  return o;
}

Outcome criterion7() {
  Outcome o;
  double wm = transition_frequencies(1.0, 2.0).first;
  ParameterProfile p;
  p.omega_c = LogisticProfile{-1.0, 1.0};
  p.omega_p = LogisticProfile{-0.5 * wm, 0.5 * wm, 2.0, 0.0, true};
  p.k_z = 2.0;
  p.L = 30.0;
  GapInterval g = common_gap(p, 1, Subsystem::Full);
  note(o, g.global, "gap 1 " + fmt("(%.4f,", g.lo) + fmt(" %.4f)", g.hi));
  std::vector<double> means;
  for (int N : {150, 300, 600}) {
    InterfaceDiscretization d;
    d.N = N;
    d.L = 30.0;
    d.kx_grid = symmetric_grid(3.0, 41);
    SweepOptions so;
    so.threads = g_threads;
    so.window_lo = 1.0;  // empty window: eigenvalues only
    so.window_hi = 0.0;
    DosReport dos = gap_dos_probe(sweep_spectrum(p, d, so), g);
    means.push_back(dos.mean);
  }
  double slope = std::log(means[2] / means[0]) / std::log(4.0);
  bool grow = means[1] >= 2.0 * means[0] * 0.95 && means[2] >= 2.0 * means[1] * 0.95;
  note(o, grow, "in-gap states per kx " + fmt("%.1f", means[0]) + fmt("/%.1f", means[1]) + fmt("/%.1f", means[2]) +
                    " (N=150/300/600, slope " + fmt("%.2f)", slope));
  json r = flow_run("fig7", "2");
  const json& g2 = r["gaps"][0];
  note(o, g2["global"].get<bool>() && flow_of(g2) == 0, flow_text(g2));
  return o;
}

Outcome criterion8() {
  Outcome o;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(-2.0, 2.0), A(0.0, 2 * M_PI), K(0.0, 4.0), P(0.05, 3.0);
  double herm = 0, parity = 0, rot = 0;
  for (int t = 0; t < 300; ++t) {
    PlasmaParams p{U(rng), std::abs(U(rng)), U(rng), {}};
    double k = K(rng), th = A(rng);
    Matrix9c H = build_bulk_hamiltonian(p, {k, th});
    herm = std::max(herm, (H - H.adjoint()).cwiseAbs().maxCoeff() / std::max(1.0, H.cwiseAbs().maxCoeff()));
    BandStructure b = band_structure(p, {k, th}), b0 = band_structure(p, {k, 0.0});
    for (int j = 1; j <= 4; ++j) parity = std::max(parity, std::abs(b.omega(j) + b.omega(-j)));
    rot = std::max(rot, (b.eigenvalues - b0.eigenvalues).cwiseAbs().maxCoeff());
  }
  note(o, herm <= 1e-12, "hermiticity " + fmt("%.1e", herm));
  note(o, parity <= 1e-9, "parity " + fmt("%.1e", parity));
  note(o, rot <= 1e-10, "rotation " + fmt("%.1e", rot));
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    double Om = P(rng) * (t % 2 ? -1 : 1), wp = P(rng), kz = P(rng);
    K0Spectrum s = k0_eigenvalues({Om, wp, kz, {}});
    if (!(s.omega_l_minus < s.omega_r && s.omega_r < s.omega_l_plus)) ++bad;
  }
  note(o, bad == 0, "ordering chain violations " + std::to_string(bad) + "/1000");

  PlasmaParams p = representative_params(Phase::IIPlus, Regularization::omega_decay(0.5));
  QuadratureOptions q;
  q.refine = false;
  q.threads = g_threads;
  double anti = 0;
  for (int j : {1, 2})
    anti = std::max(anti, std::abs(curvature_quadrature(p, std::vector<int>{j}, q).value +
                                   curvature_quadrature(p, std::vector<int>{-j}, q).value));
  note(o, anti <= 1e-2, "C_-j + C_j " + fmt("%.1e", anti));
  q.n_r = q.n_theta = 32;
  double base = curvature_quadrature(p, std::vector<int>{2}, q).value, gauge = 0;
  for (std::uint64_t seed : {3u, 17u, 4242u}) {
    q.gauge_seed = seed;
    gauge = std::max(gauge, std::abs(curvature_quadrature(p, std::vector<int>{2}, q).value - base));
  }
  note(o, gauge <= 1e-10, "gauge " + fmt("%.1e", gauge));
  double resid = 0;
  for (const auto& r : table2(Regularization::omega_decay(0.01)))
    for (const BdiResult* b : {&r.ell1, &r.ell2})
      if (b->is_bdi) resid = std::max(resid, b->rounding_residual);
  note(o, resid < 1e-3, "bdi residual " + fmt("%.1e", resid));
  return o;
}

Outcome criterion9() {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  PlasmaParams pm{1.0, transition_frequencies(1.0, 2.0).first, 2.0, {}};
  std::vector<double> ts{0.04, 0.02, 0.01, 0.005}, le, lt;
  for (double t : ts) {
    le.push_back(std::log(reduction_error(pm, false, t, 0.7, t)));
    lt.push_back(std::log(t));
  }
  double mx = 0, my = 0;
  for (size_t i = 0; i < ts.size(); ++i) mx += lt[i] / ts.size(), my += le[i] / ts.size();
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < ts.size(); ++i) sxy += (lt[i] - mx) * (le[i] - my), sxx += (lt[i] - mx) * (lt[i] - mx);
  double expo = sxy / sxx;
  note(o, expo >= 1.8, "fidelity exponent " + fmt("%.2f", expo));

  PlasmaParams pp{1.0, transition_frequencies(1.0, 1.0).second, 1.0, {}};
  bool split = gap_overlap(reduce_minus(pm)) && !gap_overlap(reduce_plus(pp));
  note(o, split, "gap overlap minus/plus " + std::string(split ? "true/false" : "wrong"));

  json s1 = run("dirac", {{"dirac.model", "singular-1"}});
  int f = s1["flow"]["flow"].get<int>(), b = s1["bdi"].value("value", 0);
  note(o, f == 0 && b == -1, "singular-1 flow " + std::to_string(f) + " bdi " + std::to_string(b));

  std::vector<double> res;
  for (double n : {4.0, 8.0, 16.0, 32.0}) res.push_back(weyl_residual({n, 0.0, 0.0, {}}));
  bool ratio_ok = true;
  std::string ratios;
  for (size_t i = 1; i < res.size(); ++i) {
    double r = res[i] / res[i - 1];
    ratios += fmt(i > 1 ? "/%.3f" : "%.3f", r);
    if (std::abs(r - std::sqrt(0.5)) > 0.2 * std::sqrt(0.5)) ratio_ok = false;
  }
  note(o, ratio_ok, "weyl ratios " + ratios + " vs 0.707");
  double xi_dev = 0;
  for (double xi : {0.5, 2.0, 5.0}) xi_dev = std::max(xi_dev, std::abs(weyl_residual({8.0, 0.0, xi, {}}) / res[1] - 1));
  note(o, xi_dev <= 0.05, "xi spread " + fmt("%.1e", xi_dev));
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  note(o, secs < 300, fmt("%.0f s", secs));
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* s = std::getenv("TOPOPLASMA_THREADS")) g_threads = std::max(1, std::atoi(s));
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const std::vector<std::pair<int, std::function<Outcome()>>> all{
      {1, criterion1},
      {2, criterion2},
      {3, criterion3},
      {4, [] { return figure("fig4", {0}, 1200); }},
      {5, [] { return figure("fig5", {0, 0}, 1200); }},
      {6, criterion6},
      {7, criterion7},
      {8, criterion8},
      {9, criterion9},
  };
  int failed = 0;
  for (const auto& [id, fn] : all) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s (%.0f s)\n", o.pass ? "PASS" : "FAIL", id, o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
