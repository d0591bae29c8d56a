#include "topoplasma/orchestrator.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "topoplasma/bulk.hpp"
#include "topoplasma/dirac.hpp"
#include "topoplasma/errors.hpp"
#include "topoplasma/interface.hpp"
#include "topoplasma/invariants.hpp"

namespace topoplasma {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  std::string t = trim(s);
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(v))
    throw InvalidParameter(what + ": expected a number, got '" + s + "'");
  return v;
}

std::string num(double x) {
  if (std::isnan(x)) return "";
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string timestamp() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

PlasmaParams params_from(const std::string& triple, const std::string& reg, const std::string& what) {
  auto v = split(triple, ',');
  if (v.size() != 3) throw InvalidParameter(what + ": expected omega_c,omega_p,k_z");
  PlasmaParams p{to_double(v[0], what), to_double(v[1], what), to_double(v[2], what), parse_regularization(reg)};
  p.validate();
  return p;
}

ScalarProfile parse_scalar_profile(const std::string& s, const std::string& what) {
  std::string t = trim(s);
  auto colon = t.find(':');
  if (colon == std::string::npos) return to_double(t, what);
  std::string head = t.substr(0, colon);
  auto args = split(t.substr(colon + 1), ',');
  std::vector<double> a;
  for (const auto& x : args) a.push_back(to_double(x, what));
  if (head == "logistic" || head == "abs-logistic") {
    if (a.size() < 2 || a.size() > 4) throw InvalidParameter(what + ": logistic:south,north[,width[,center]]");
    LogisticProfile lp{a[0], a[1]};
    if (a.size() > 2) lp.width = a[2];
    if (a.size() > 3) lp.center = a[3];
    lp.absolute = head == "abs-logistic";
    return lp;
  }
  if (head == "table") return TabulatedProfile{a};
  throw InvalidParameter(what + ": unknown profile kind '" + head + "'");
}

const std::map<std::string, std::map<std::string, std::string>>& presets() {
  static const std::map<std::string, std::map<std::string, std::string>> p = [] {
    double wm = transition_frequencies(1.0, 2.0).first;
    double wp = transition_frequencies(1.0, 1.0).second;
    std::map<std::string, std::map<std::string, std::string>> m;
    m["fig3"] = {{"profile.omega_c", "1"},
                 {"profile.omega_p", "logistic:" + num(0.5 * wm) + "," + num(1.5 * wm)},
                 {"profile.k_z", "2"},
                 {"grid.subsystem", "full"}};
    m["fig4"] = {{"profile.omega_c", "1"},
                 {"profile.omega_p", "logistic:" + num(0.5 * wp) + "," + num(1.5 * wp)},
                 {"profile.k_z", "1"},
                 {"grid.subsystem", "full"},
                 {"flow.ell", "1"}};
    m["fig5"] = {{"profile.omega_c", "logistic:-0.75,0.75"},
                 {"profile.omega_p", "1"},
                 {"profile.k_z", "2"},
                 {"grid.subsystem", "full"}};
    m["fig6"] = {{"profile.omega_c", "logistic:-1,1"},
                 {"profile.omega_p", "1"},
                 {"profile.k_z", "0"},
                 {"grid.subsystem", "tm"}};
    m["fig7"] = {{"profile.omega_c", "logistic:-1,1"},
                 {"profile.omega_p", "abs-logistic:" + num(-0.5 * wm) + "," + num(0.5 * wm)},
                 {"profile.k_z", "2"},
                 {"grid.subsystem", "full"}};
    return m;
  }();
  return p;
}

struct InterfaceSetup {
  ParameterProfile profile;
  InterfaceDiscretization disc;
};

InterfaceSetup interface_setup(const Config& c) {
  InterfaceSetup s;
  s.profile.omega_c = parse_scalar_profile(c.get("profile.omega_c"), "profile.omega_c");
  s.profile.omega_p = parse_scalar_profile(c.get("profile.omega_p"), "profile.omega_p");
  s.profile.k_z = c.get_double("profile.k_z");
  s.profile.L = c.get_double("grid.L");
  s.disc.N = c.get_int("grid.N");
  s.disc.L = s.profile.L;
  s.disc.subsystem = parse_subsystem(c.get("grid.subsystem"));
  int nk = c.get_int("grid.n_kx");
  if (nk < 2) throw InvalidParameter("grid.n_kx must be >= 2");
  s.disc.kx_grid = symmetric_grid(c.get_double("grid.kx_max"), nk);
  s.profile.validate();
  s.disc.validate();
  return s;
}

std::vector<int> ell_list(const Config& c, const std::string& key) {
  std::vector<int> out;
  for (double v : c.get_list(key)) {
    if (v != 1.0 && v != 2.0) throw InvalidParameter(key + ": gaps are 1 and 2");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw InvalidParameter(key + " is empty");
  return out;
}

// Eigenvalues come from one sweep; weights and profiles from whichever sweep resolved them.
void merge_into(std::vector<SweepRecord>& base, const std::vector<SweepRecord>& extra) {
  for (size_t k = 0; k < base.size(); ++k) {
    SweepRecord& b = base[k];
    const SweepRecord& e = extra[k];
    for (const auto& m : e.modes) {
      if (b.mode(m.index)) continue;
      b.weights0[m.index] = e.weights0[m.index];
      b.weightsL[m.index] = e.weightsL[m.index];
      b.modes.push_back(m);
    }
    std::sort(b.modes.begin(), b.modes.end(), [](const ModeProfile& x, const ModeProfile& y) { return x.index < y.index; });
  }
}

void sweep_rows(RunResult& r, const std::vector<SweepRecord>& recs, const std::string& tag = "") {
  r.csv_header = {"kx", "eigenvalue_index", "omega", "weight0", "weightL", "kept"};
  if (!tag.empty()) r.csv_header.push_back("model");
  for (const auto& rec : recs)
    for (int i = 0; i < rec.eigenvalues.size(); ++i) {
      std::vector<std::string> row{num(rec.kx), std::to_string(i), num(rec.eigenvalues(i)), num(rec.weights0[i]),
                                   num(rec.weightsL[i]), rec.kept[i] ? "1" : "0"};
      if (!tag.empty()) row.push_back(tag);
      r.csv_rows.push_back(std::move(row));
    }
}

json gap_json(const GapInterval& g) { return {{"ell", g.ell}, {"lo", g.lo}, {"hi", g.hi}, {"global", g.global}}; }

json flow_json(const EdgeReport& rep) {
  json br = json::array();
  for (const auto& c : rep.branch_list)
    br.push_back({{"kx", c.kx},
                  {"direction", c.direction},
                  {"where", to_string(c.where)},
                  {"weight0", c.weight0},
                  {"weightL", c.weightL}});
  return {{"E_ref", rep.E_ref},         {"flow", rep.flow},
          {"spurious_flow", rep.spurious_flow}, {"unattributed", rep.unattributed},
          {"filtered_count", rep.filtered_count}, {"branches", br}};
}

json bdi_json(const BdiResult& b) {
  return {{"ell", b.ell},
          {"value", b.value},
          {"raw", b.raw},
          {"rounding_residual", b.rounding_residual},
          {"is_bdi", b.is_bdi},
          {"projector_mismatch", b.gluing.projector_mismatch}};
}

std::vector<SweepRecord> gap_sweeps(const InterfaceSetup& s, const std::vector<GapInterval>& gaps,
                                    const Config& c, int threads) {
  SweepOptions o;
  o.threads = threads;
  o.loc_window = c.get_double("solver.loc_window");
  o.w_edge = c.get_double("solver.w_edge");
  const std::string window = c.get("solver.window");
  if (window == "full") return sweep_spectrum(s.profile, s.disc, o);
  if (window != "auto") {
    auto v = c.get_list("solver.window");
    if (v.size() != 2 || !(v[0] < v[1])) throw InvalidParameter("solver.window: auto, full or lo,hi");
    o.window_lo = v[0];
    o.window_hi = v[1];
    return sweep_spectrum(s.profile, s.disc, o);
  }
  std::vector<SweepRecord> out;
  for (const auto& g : gaps) {
    if (!g.global) continue;
    double pad = 0.1 * (g.hi - g.lo);
    o.window_lo = g.lo - pad;
    o.window_hi = g.hi + pad;
    auto recs = sweep_spectrum(s.profile, s.disc, o);
    if (out.empty()) out = std::move(recs);
    else merge_into(out, recs);
  }
  if (out.empty()) {
    // no usable gap: eigenvalues only
    o.window_lo = 1.0;
    o.window_hi = 0.0;
    out = sweep_spectrum(s.profile, s.disc, o);
  }
  return out;
}

RunResult cmd_phase(const Config& c) {
  RunResult r;
  auto plane = split(c.get("phase.plane"), ',');
  if (plane.size() != 2 || plane[0] != "omega_c" || (plane[1] != "k_z" && plane[1] != "omega_p"))
    throw InvalidParameter("phase.plane must be omega_c,k_z or omega_c,omega_p");
  auto xr = c.get_list("phase.x"), yr = c.get_list("phase.y");
  if (xr.size() != 3 || yr.size() != 3) throw InvalidParameter("phase.x and phase.y are lo,hi,count");
  int nx = static_cast<int>(xr[2]), ny = static_cast<int>(yr[2]);
  if (nx < 1 || ny < 1 || xr[2] != nx || yr[2] != ny) throw InvalidParameter("grid counts must be positive integers");
  if ((nx > 1 && !(xr[1] > xr[0])) || (ny > 1 && !(yr[1] > yr[0]))) throw InvalidParameter("degenerate phase grid");
  const double fixed = c.get_double("phase.fixed");
  r.csv_header = {"x", "y", "phase", "omega_minus", "omega_plus"};
  std::map<std::string, int> counts;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      double x = nx == 1 ? xr[0] : xr[0] + (xr[1] - xr[0]) * i / (nx - 1);
      double y = ny == 1 ? yr[0] : yr[0] + (yr[1] - yr[0]) * j / (ny - 1);
      PlasmaParams p = plane[1] == "k_z" ? PlasmaParams{x, fixed, y, {}} : PlasmaParams{x, y, fixed, {}};
      Phase ph = classify_phase(p);
      double wm = std::nan(""), wpl = std::nan("");
      if (p.omega_c != 0.0) std::tie(wm, wpl) = transition_frequencies(p.omega_c, p.k_z);
      r.csv_rows.push_back({num(x), num(y), to_string(ph), num(wm), num(wpl)});
      ++counts[to_string(ph)];
    }
  r.summary["points"] = nx * ny;
  r.summary["phase_counts"] = counts;
  return r;
}

RunResult cmd_table1(const Config& c, int threads) {
  RunResult r;
  auto sig = c.get_list("table1.sigma_bars");
  const bool quad = c.get_bool("table1.quadrature");
  const int n = c.get_int("table1.quad_n");
  auto rows = table1(sig);
  r.csv_header = {"phase", "sigma_bar", "C1", "C2", "C3", "C4", "quad_max_diff"};
  json out = json::array();
  double worst = 0.0;
  for (const auto& row : rows) {
    double diff = std::nan("");
    if (quad && row.sigma_bar == 0.0) {
      PlasmaParams p = representative_params(row.phase, Regularization::omega_decay(0.5));
      diff = 0.0;
      std::vector<std::vector<int>> groups{{2}, {3, 4}};
      // band 1 is the flat zero band when k_z = 0
      if (p.k_z != 0.0) groups.insert(groups.begin(), {1});
      for (const auto& bands : groups) {
        QuadratureOptions o;
        o.n_r = n;
        o.n_theta = n;
        o.threads = threads;
        double a = 0.0;
        for (int b : bands) a += row.c[b - 1];
        diff = std::max(diff, std::abs(curvature_quadrature(p, bands, o).value - a));
      }
      worst = std::max(worst, diff);
    }
    r.csv_rows.push_back({to_string(row.phase), num(row.sigma_bar), num(row.c[0]), num(row.c[1]), num(row.c[2]),
                          num(row.c[3]), num(diff)});
    out.push_back({{"phase", to_string(row.phase)},
                   {"sigma_bar", row.sigma_bar},
                   {"C", {row.c[0], row.c[1], row.c[2], row.c[3]}}});
  }
  r.summary["rows"] = out;
  if (quad) r.summary["quadrature_max_diff"] = worst;
  return r;
}

RunResult cmd_bdi(const Config& c) {
  RunResult r;
  const std::string reg = c.get("bdi.reg");
  PlasmaParams pn = params_from(c.get("bdi.north"), reg, "bdi.north");
  PlasmaParams ps = params_from(c.get("bdi.south"), reg, "bdi.south");
  json res = json::array();
  r.csv_header = {"ell", "value", "raw", "is_bdi", "projector_mismatch"};
  for (int ell : ell_list(c, "bdi.ell")) {
    BdiResult b = bdi(pn, ps, ell);
    res.push_back(bdi_json(b));
    r.csv_rows.push_back({std::to_string(ell), std::to_string(b.value), num(b.raw), b.is_bdi ? "1" : "0",
                          num(b.gluing.projector_mismatch)});
  }
  r.summary["north_phase"] = to_string(classify_phase(pn));
  r.summary["south_phase"] = to_string(classify_phase(ps));
  r.summary["bdi"] = res;
  if (res.size() == 1) {
    r.summary["value"] = res[0]["value"];
    r.summary["is_bdi"] = res[0]["is_bdi"];
  }
  return r;
}

RunResult cmd_table2(const Config& c) {
  RunResult r;
  auto rows = table2(parse_regularization(c.get("table2.reg")));
  r.csv_header = {"transition", "bdi_1", "is_bdi_1", "raw_1", "bdi_2", "is_bdi_2", "raw_2"};
  json out = json::array();
  for (const auto& row : rows) {
    r.csv_rows.push_back({row.transition, std::to_string(row.ell1.value), row.ell1.is_bdi ? "1" : "0",
                          num(row.ell1.raw), std::to_string(row.ell2.value), row.ell2.is_bdi ? "1" : "0",
                          num(row.ell2.raw)});
    out.push_back({{"transition", row.transition}, {"ell1", bdi_json(row.ell1)}, {"ell2", bdi_json(row.ell2)}});
  }
  r.summary["rows"] = out;
  return r;
}

RunResult cmd_bulk(const Config& c) {
  RunResult r;
  PlasmaParams p{c.get_double("bulk.omega_c"), c.get_double("bulk.omega_p"), c.get_double("bulk.k_z"),
                 parse_regularization(c.get("bulk.reg"))};
  p.validate();
  const double kmax = c.get_double("bulk.k_max"), theta = c.get_double("bulk.theta");
  const int nk = c.get_int("bulk.n_k");
  if (nk < 2 || !(kmax > 0)) throw InvalidParameter("bulk.k_max > 0 and bulk.n_k >= 2 required");
  r.csv_header = {"k"};
  for (int j = -4; j <= 4; ++j) r.csv_header.push_back("omega_" + std::to_string(j));
  for (int i = 0; i < nk; ++i) {
    double k = kmax * i / (nk - 1);
    BandStructure bs = band_structure(p, {k, theta});
    std::vector<std::string> row{num(k)};
    for (int j = -4; j <= 4; ++j) row.push_back(num(bs.omega(j)));
    r.csv_rows.push_back(std::move(row));
  }
  r.summary["phase"] = to_string(classify_phase(p));
  auto [wm, wpl] = transition_frequencies(p.omega_c, p.k_z);
  r.summary["omega_minus"] = wm;
  r.summary["omega_plus"] = wpl;
  K0Spectrum k0 = k0_eigenvalues(p);
  r.summary["k0"] = {{"omega_l_minus", k0.omega_l_minus},
                     {"omega_r", k0.omega_r},
                     {"omega_l_plus", k0.omega_l_plus},
                     {"omega_p", k0.omega_p}};
  json gaps = json::array();
  for (int ell : {1, 2}) gaps.push_back(gap_json(band_extrema(p, ell)));
  r.summary["gaps"] = gaps;
  return r;
}

RunResult cmd_interface(const Config& c, int threads, bool with_flow) {
  RunResult r;
  InterfaceSetup s = interface_setup(c);
  auto ells = ell_list(c, "flow.ell");
  std::vector<GapInterval> gaps;
  for (int ell : ells) gaps.push_back(common_gap(s.profile, ell, s.disc.subsystem));
  auto recs = gap_sweeps(s, gaps, c, threads);
  double ph = 0.0;
  for (const auto& rec : recs) ph = std::max(ph, rec.particle_hole_error);
  auto filtered = filter_spurious(recs, c.get_double("solver.w_edge"));
  sweep_rows(r, filtered.records);
  r.summary["kx_points"] = recs.size();
  r.summary["matrix_size"] = s.disc.N * components(s.disc.subsystem);
  r.summary["particle_hole_error"] = ph;
  r.summary["removed_spurious"] = filtered.removed.size();
  r.summary["south_phase"] = to_string(classify_phase(s.profile.south()));
  r.summary["north_phase"] = to_string(classify_phase(s.profile.north()));
  json gout = json::array();
  for (const auto& g : gaps) {
    json e = gap_json(g);
    if (with_flow) {
      PlasmaParams pn = s.profile.north(), ps = s.profile.south();
      Regularization reg = parse_regularization(c.get("flow.reg"));
      pn.reg = reg;
      ps.reg = reg;
      try {
        e["bdi"] = bdi_json(bdi(pn, ps, g.ell));
      } catch (const NotApplicable& ex) {
        e["bdi"] = {{"error", ex.what()}};
      }
      if (g.global) {
        e["flow"] = flow_json(spectral_flow(recs, g, c.get_double("solver.loc_window"), c.get_double("solver.w_edge")));
        DosReport d = gap_dos_probe(recs, g, c.get_double("solver.w_edge"));
        e["dos_mean"] = d.mean;
        e["dos_max"] = d.max;
      }
    }
    gout.push_back(e);
  }
  r.summary["gaps"] = gout;
  return r;
}

DiracProfile dirac_profile(const Config& c, DiracSide* north, DiracSide* south, GapInterval* gap, json& info) {
  const std::string model = c.get("dirac.model");
  const int N = c.get_int("dirac.N");
  const double L = c.get_double("dirac.L"), width = c.get_double("dirac.width"), mass = c.get_double("dirac.mass");
  DiracProfile dp;
  if (model == "domain-wall") dp = dirac_domain_wall(mass, N, L, width);
  else if (model == "singular-1") dp = dirac_singular_one(mass, N, L, width);
  else if (model == "singular-2") dp = dirac_singular_two(N, L);
  else if (model == "reduced") {
    const bool plus = c.get("dirac.crossing") == "plus";
    if (!plus && c.get("dirac.crossing") != "minus") throw InvalidParameter("dirac.crossing must be minus or plus");
    PlasmaParams pn = params_from(c.get("dirac.north"), "none", "dirac.north");
    PlasmaParams ps = params_from(c.get("dirac.south"), "none", "dirac.south");
    DiracModel mn = plus ? reduce_plus(pn) : reduce_minus(pn);
    DiracModel ms = plus ? reduce_plus(ps) : reduce_minus(ps);
    *north = side_of(mn);
    *south = side_of(ms);
    info["gap_overlap"] = gap_overlap(mn) && gap_overlap(ms);
    info["alpha"] = mn.alpha;
    info["beta"] = mn.beta;
    info["omega_star"] = mn.omega_star;
    dp = dirac_interface(*north, *south, N, L, width);
    *gap = dirac_common_gap(*north, *south);
  } else {
    throw InvalidParameter("dirac.model must be domain-wall, singular-1, singular-2 or reduced");
  }
  dp.scheme = parse_dirac_scheme(c.get("dirac.scheme"));
  dp.eta = c.get_double("dirac.eta");
  if (model != "reduced") {
    auto side_at = [&](double y) { return DiracSide{dp.v_x(y), dp.v_y(y), dp.m(y), dp.V(y)}; };
    *north = side_at(0.5 * L);
    *south = side_at(-0.5 * L);
    std::string g = c.get("dirac.gap");
    if (g == "auto") {
      double m = std::min(std::abs(north->m), std::abs(south->m));
      *gap = {1, -0.9 * m, 0.9 * m, m > 0};
    } else {
      auto v = c.get_list("dirac.gap");
      if (v.size() != 2 || !(v[0] < v[1])) throw InvalidParameter("dirac.gap: auto or lo,hi");
      *gap = {1, v[0], v[1], true};
    }
  }
  return dp;
}

RunResult cmd_dirac(const Config& c, int threads) {
  RunResult r;
  DiracSide north, south;
  GapInterval gap;
  json info;
  DiracProfile dp = dirac_profile(c, &north, &south, &gap, info);
  const int n = c.get_int("dirac.n_xi");
  if (n < 2) throw InvalidParameter("dirac.n_xi must be >= 2");
  auto recs = dirac_interface_spectrum(dp, symmetric_grid(c.get_double("dirac.xi_max"), n), threads);
  sweep_rows(r, recs, dp.tag);
  r.summary["model"] = dp.tag;
  r.summary["scheme"] = to_string(dp.scheme);
  if (!info.is_null()) r.summary["reduction"] = info;
  r.summary["gap"] = gap_json(gap);
  try {
    DiracBdi b = dirac_bdi(north, south);
    r.summary["bdi"] = {{"value", b.value}, {"velocity_flip", b.velocity_flip}};
  } catch (const NotApplicable& e) {
    r.summary["bdi"] = {{"error", e.what()}};
  }
  if (gap.global) {
    r.summary["flow"] = flow_json(spectral_flow(recs, gap));
    DosReport d = gap_dos_probe(recs, gap);
    r.summary["dos_mean"] = d.mean;
    r.summary["dos_max"] = d.max;
  }
  return r;
}

RunResult cmd_weyl(const Config& c) {
  RunResult r;
  auto ns = c.get_list("weyl.nscale");
  if (ns.empty()) throw InvalidParameter("weyl.nscale is empty");
  WeylProbe probe;
  probe.E = c.get_double("weyl.E");
  probe.xi = c.get_double("weyl.xi");
  if (c.get("weyl.spacing") != "auto") probe.spacing = c.get_double("weyl.spacing");
  r.csv_header = {"nscale", "residual", "ratio"};
  json rows = json::array();
  double prev = std::nan("");
  bool decreasing = true;
  for (double n : ns) {
    probe.Nscale = n;
    double res = weyl_residual(probe);
    double ratio = res / prev;
    if (!std::isnan(prev) && !(res < prev)) decreasing = false;
    r.csv_rows.push_back({num(n), num(res), num(ratio)});
    rows.push_back({{"nscale", n}, {"residual", res}});
    prev = res;
  }
  r.summary["rows"] = rows;
  r.summary["decreasing"] = decreasing;
  return r;
}

void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw InvalidParameter("cannot write " + p.string());
  f << s;
}

}  // namespace

Config Config::parse(const std::string& text) {
  Config c;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw InvalidParameter("config line " + std::to_string(lineno) + ": bad section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    auto eq = t.find('=');
    if (eq == std::string::npos) throw InvalidParameter("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    if (key.empty()) throw InvalidParameter("config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    c.set(key, trim(t.substr(eq + 1)));
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw InvalidParameter("cannot read config " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

std::string Config::serialize() const {
  std::ostringstream os;
  std::string section;
  bool first = true;
  for (const auto& [key, value] : kv_) {
    auto dot = key.find('.');
    std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
    std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
    if (first || sec != section) {
      if (!first) os << "\n";
      if (!sec.empty()) os << "[" << sec << "]\n";
      section = sec;
      first = false;
    }
    os << name << " = " << value << "\n";
  }
  return os.str();
}

void Config::set(const std::string& key, const std::string& value) {
  if (key.empty() || key.find_first_of(" \t=[]#") != std::string::npos)
    throw InvalidParameter("invalid config key '" + key + "'");
  if (value.find('\n') != std::string::npos) throw InvalidParameter("config values are single-line");
  kv_[key] = trim(value);
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }
void Config::erase(const std::string& key) { kv_.erase(key); }

std::string Config::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw InvalidParameter("missing config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const { return to_double(get(key), key); }

int Config::get_int(const std::string& key) const {
  double v = get_double(key);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw InvalidParameter(key + ": expected an integer");
  return static_cast<int>(v);
}

bool Config::get_bool(const std::string& key) const {
  std::string v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidParameter(key + ": expected true or false");
}

std::vector<double> Config::get_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : split(get(key), ','))
    if (!s.empty()) out.push_back(to_double(s, key));
  return out;
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"phase", "table1", "bdi", "table2", "bulk-spectrum",
                                          "interface", "flow", "dirac", "weyl"};
  return c;
}

Config default_config(const std::string& command) {
  Config c;
  auto put = [&](const char* k, const char* v) { c.set(k, v); };
  if (command == "phase") {
    put("phase.plane", "omega_c,k_z");
    put("phase.fixed", "1");
    put("phase.x", "-2,2,41");
    put("phase.y", "0,3,31");
  } else if (command == "table1") {
    put("table1.sigma_bars", "0,1,10");
    put("table1.quadrature", "true");
    put("table1.quad_n", "64");
  } else if (command == "bdi") {
    put("bdi.north", "1,1.2426406871192852,2");
    put("bdi.south", "1,0.41421356237309515,2");
    put("bdi.ell", "1");
    put("bdi.reg", "omega-decay:0.01");
  } else if (command == "table2") {
    put("table2.reg", "omega-decay:0.01");
  } else if (command == "bulk-spectrum") {
    put("bulk.omega_c", "1");
    put("bulk.omega_p", "1");
    put("bulk.k_z", "1");
    put("bulk.reg", "none");
    put("bulk.k_max", "5");
    put("bulk.n_k", "201");
    put("bulk.theta", "0");
  } else if (command == "interface" || command == "flow") {
    put("profile.preset", "fig3");
    put("grid.N", "300");
    put("grid.L", "30");
    put("grid.kx_max", "3");
    put("grid.n_kx", "121");
    put("solver.window", "auto");
    put("solver.loc_window", "0.2");
    put("solver.w_edge", "0.1");
    put("flow.ell", "1,2");
    put("flow.reg", "omega-decay:0.01");
  } else if (command == "dirac") {
    put("dirac.model", "domain-wall");
    put("dirac.mass", "1");
    put("dirac.N", "200");
    put("dirac.L", "20");
    put("dirac.width", "2");
    put("dirac.scheme", "staggered");
    put("dirac.eta", "0");
    put("dirac.xi_max", "3");
    put("dirac.n_xi", "60");
    put("dirac.gap", "auto");
    put("dirac.crossing", "minus");
    put("dirac.north", "1,1.2426406871192852,2");
    put("dirac.south", "1,0.41421356237309515,2");
  } else if (command == "weyl") {
    put("weyl.nscale", "4,8,16,32");
    put("weyl.E", "0");
    put("weyl.xi", "0");
    put("weyl.spacing", "auto");
  } else {
    throw InvalidParameter("unknown command '" + command + "'");
  }
  return c;
}

Config effective_config(const std::string& command, const Config& file, const Config& overrides) {
  Config c = default_config(command);
  Config given;
  for (const auto* src : {&file, &overrides})
    for (const auto& [k, v] : src->entries()) given.set(k, v);
  for (const auto& [k, v] : given.entries()) c.set(k, v);
  if (c.has("profile.preset")) {
    const std::string name = c.get("profile.preset");
    if (name != "none") {
      auto it = presets().find(name);
      if (it == presets().end()) throw InvalidParameter("unknown profile preset '" + name + "'");
      for (const auto& [k, v] : it->second)
        if (!given.has(k)) c.set(k, v);
    }
  }
  return c;
}

std::string run_id(const std::string& command, const Config& cfg) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a(command + "\n" + cfg.serialize());
  return os.str();
}

RunResult run_command(const std::string& command, const Config& cfg, const RunOptions& opt) {
  if (opt.threads < 1) throw InvalidParameter("threads must be >= 1");
  RunResult r;
  if (command == "phase") r = cmd_phase(cfg);
  else if (command == "table1") r = cmd_table1(cfg, opt.threads);
  else if (command == "bdi") r = cmd_bdi(cfg);
  else if (command == "table2") r = cmd_table2(cfg);
  else if (command == "bulk-spectrum") r = cmd_bulk(cfg);
  else if (command == "interface") r = cmd_interface(cfg, opt.threads, false);
  else if (command == "flow") r = cmd_interface(cfg, opt.threads, true);
  else if (command == "dirac") r = cmd_dirac(cfg, opt.threads);
  else if (command == "weyl") r = cmd_weyl(cfg);
  else throw InvalidParameter("unknown command '" + command + "'");

  r.run_id = run_id(command, cfg);
  json payload = std::move(r.summary);
  r.summary = json::object();
  r.summary["command"] = command;
  r.summary["run_id"] = r.run_id;
  r.summary["timestamp"] = timestamp();
  r.summary["version"] = kVersion;
  json echo = json::object();
  for (const auto& [k, v] : cfg.entries()) echo[k] = v;
  r.summary["config"] = echo;
  r.summary["result"] = payload;
  if (opt.format == OutputFormat::Json && !r.csv_header.empty() && r.csv_rows.size() <= 100000) {
    json rows = json::array();
    for (const auto& row : r.csv_rows) {
      json o = json::object();
      for (size_t i = 0; i < row.size(); ++i) o[r.csv_header[i]] = row[i];
      rows.push_back(o);
    }
    r.summary["table"] = rows;
  }

  if (opt.write) {
    r.dir = opt.out_dir / r.run_id;
    std::filesystem::create_directories(r.dir);
    write_text(r.dir / "summary.json", r.summary.dump(2) + "\n");
    write_text(r.dir / "config.echo", "# " + command + "\n" + cfg.serialize());
    if (!r.csv_header.empty()) {
      std::ofstream f(r.dir / "sweep.csv", std::ios::binary);
      for (size_t i = 0; i < r.csv_header.size(); ++i) f << (i ? "," : "") << r.csv_header[i];
      f << "\n";
      for (const auto& row : r.csv_rows) {
        for (size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
        f << "\n";
      }
    }
  }
  return r;
}

}  // namespace topoplasma
