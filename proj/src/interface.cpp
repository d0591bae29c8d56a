#include "topoplasma/interface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "topoplasma/banded.hpp"
#include "topoplasma/errors.hpp"
#include "topoplasma/parallel.hpp"

namespace topoplasma {

namespace {

const cplx I(0.0, 1.0);
const double kNaN = std::numeric_limits<double>::quiet_NaN();

double unit_step(double t, double width) { return 1.0 / (1.0 + std::exp(-4.0 * t / width)); }

struct Ordering {
  std::vector<int> pos;  // site -> position
  int c;
};

Ordering interleaved(int n, int c) {
  Ordering o;
  o.c = c;
  o.pos.resize(n);
  int lo = 0, hi = n - 1, p = 0;
  while (lo <= hi) {
    o.pos[lo++] = p++;
    if (lo <= hi) o.pos[hi--] = p++;
  }
  return o;
}

std::vector<int> subsystem_map(Subsystem s) {
  std::vector<int> m(9, -1);
  switch (s) {
    case Subsystem::Full:
      std::iota(m.begin(), m.end(), 0);
      break;
    case Subsystem::TM:
      for (int a = 0; a < 5; ++a) m[kTmIndex[a]] = a;
      break;
    case Subsystem::TE:
      for (int a = 0; a < 4; ++a) m[kTeIndex[a]] = a;
      break;
  }
  return m;
}

}  // namespace

double periodic_step(double y, double L, double width, double center) {
  double h = 0.0;
  for (int n = -3; n <= 3; ++n) {
    double t = y - center - 2.0 * n * L;
    h += unit_step(t, width) - unit_step(t - L, width);
  }
  return h;
}

double evaluate(const ScalarProfile& f, double y, double L) {
  if (auto c = std::get_if<double>(&f)) return *c;
  if (auto lg = std::get_if<LogisticProfile>(&f)) {
    double v = lg->south + (lg->north - lg->south) * periodic_step(y, L, lg->width, lg->center);
    return lg->absolute ? std::abs(v) : v;
  }
  const auto& tab = std::get<TabulatedProfile>(f).values;
  const int m = static_cast<int>(tab.size());
  double t = (y + L) / (2.0 * L) * m;
  t -= m * std::floor(t / m);
  int j = static_cast<int>(std::floor(t));
  double frac = t - j;
  j %= m;
  return (1.0 - frac) * tab[j] + frac * tab[(j + 1) % m];
}

double plateau_distance(const ScalarProfile& f) {
  if (auto lg = std::get_if<LogisticProfile>(&f)) {
    double jump = std::abs(lg->north - lg->south);
    if (jump <= 1e-6) return 0.0;
    return 0.25 * lg->width * std::log(jump / 1e-6);
  }
  return 0.0;
}

namespace {

void validate_scalar(const ScalarProfile& f, const char* name, double L) {
  if (auto c = std::get_if<double>(&f)) {
    if (!std::isfinite(*c)) throw InvalidParameter(std::string(name) + " must be finite");
    return;
  }
  if (auto lg = std::get_if<LogisticProfile>(&f)) {
    if (!std::isfinite(lg->south) || !std::isfinite(lg->north) || !std::isfinite(lg->center))
      throw InvalidParameter(std::string(name) + " logistic values must be finite");
    if (!(lg->width > 0) || !std::isfinite(lg->width))
      throw InvalidParameter(std::string(name) + " logistic width must be > 0");
    if (plateau_distance(f) >= 0.5 * L)
      throw InvalidParameter(std::string(name) + " never reaches its plateau; increase L or reduce width");
    return;
  }
  const auto& tab = std::get<TabulatedProfile>(f).values;
  if (tab.size() < 2) throw InvalidParameter(std::string(name) + " table needs at least 2 samples");
  for (double v : tab)
    if (!std::isfinite(v)) throw InvalidParameter(std::string(name) + " table must be finite");
}

}  // namespace

void ParameterProfile::validate() const {
  if (!(L > 0) || !std::isfinite(L)) throw InvalidParameter("L must be > 0");
  if (!std::isfinite(k_z)) throw InvalidParameter("k_z must be finite");
  validate_scalar(omega_c, "omega_c", L);
  validate_scalar(omega_p, "omega_p", L);
  if (auto tab = std::get_if<TabulatedProfile>(&omega_p)) {
    for (double v : tab->values)
      if (v < 0) throw InvalidParameter("omega_p must be >= 0");
  } else {
    for (double y : {-L, -0.5 * L, 0.0, 0.5 * L})
      if (evaluate(omega_p, y, L) < 0) throw InvalidParameter("omega_p must be >= 0");
  }
}

PlasmaParams ParameterProfile::south() const {
  return {evaluate(omega_c, -0.5 * L, L), evaluate(omega_p, -0.5 * L, L), k_z, {}};
}

PlasmaParams ParameterProfile::north() const {
  return {evaluate(omega_c, 0.5 * L, L), evaluate(omega_p, 0.5 * L, L), k_z, {}};
}

void InterfaceDiscretization::validate() const {
  if (N < 50) throw InvalidParameter("N must be >= 50");
  if (!(L > 0) || !std::isfinite(L)) throw InvalidParameter("L must be > 0");
  for (size_t i = 0; i < kx_grid.size(); ++i) {
    if (!std::isfinite(kx_grid[i])) throw InvalidParameter("kx grid must be finite");
    if (i > 0 && !(kx_grid[i] > kx_grid[i - 1])) throw InvalidParameter("kx grid must be increasing");
    double mirror = kx_grid[kx_grid.size() - 1 - i];
    if (std::abs(kx_grid[i] + mirror) > 1e-12 * std::max(1.0, std::abs(mirror)))
      throw InvalidParameter("kx grid must be symmetric about 0");
  }
}

std::vector<double> symmetric_grid(double kmax, int n) {
  if (n < 2) throw InvalidParameter("grid needs at least 2 points");
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = -kmax + 2.0 * kmax * i / (n - 1);
  for (int i = 0; i < n / 2; ++i) g[n - 1 - i] = -g[i];
  if (n % 2) g[n / 2] = 0.0;
  return g;
}

int components(Subsystem s) {
  switch (s) {
    case Subsystem::Full: return 9;
    case Subsystem::TM: return 5;
    case Subsystem::TE: return 4;
  }
  return 9;
}

std::vector<Triplet> interface_triplets(const ParameterProfile& profile,
                                        const InterfaceDiscretization& disc, double kx) {
  profile.validate();
  if (disc.N < 3) throw InvalidParameter("N too small");
  if (std::abs(disc.L - profile.L) > 1e-12 * profile.L)
    throw InvalidParameter("profile and discretization disagree on L");
  if (!std::isfinite(kx)) throw InvalidParameter("kx must be finite");
  if (disc.subsystem != Subsystem::Full && std::abs(profile.k_z) > 1e-12)
    throw NotApplicable("TM/TE interface systems require k_z = 0");
  const int N = disc.N, c = components(disc.subsystem);
  const double dy = disc.dy(), L = disc.L;
  const auto map = subsystem_map(disc.subsystem);

  const Matrix3c D = (I / dy) * cross_matrix(0, 1, 0) + 0.5 * cross_matrix(kx, 0, profile.k_z);
  const Matrix3c Dh = D.adjoint();
  const Matrix3c ez = cross_matrix(0, 0, 1);

  std::vector<Triplet> out;
  out.reserve(static_cast<size_t>(N) * 60);
  auto add = [&](int si, int a, int sj, int b, cplx v) {
    if (v == 0.0) return;
    int ma = map[a], mb = map[b];
    if (ma < 0 || mb < 0) return;
    out.push_back({si * c + ma, sj * c + mb, v});
  };
  auto add_block = [&](int si, int a0, int sj, int b0, const Matrix3c& m) {
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) add(si, a0 + r, sj, b0 + s, m(r, s));
  };
  for (int i = 0; i < N; ++i) {
    const double y = -L + i * dy;
    const double om = evaluate(profile.omega_c, y, L);
    const double wp = evaluate(profile.omega_p, y, L);
    const int im = (i + N - 1) % N, ip = (i + 1) % N;
    add_block(i, 0, i, 0, I * om * ez);
    add_block(i, 0, i, 3, -I * wp * Matrix3c::Identity());
    add_block(i, 3, i, 0, I * wp * Matrix3c::Identity());
    add_block(i, 3, i, 6, Dh);
    add_block(i, 3, im, 6, -D);
    add_block(i, 6, i, 3, D);
    add_block(i, 6, ip, 3, -Dh);
  }
  return out;
}

Eigen::MatrixXcd build_interface_matrix(const ParameterProfile& profile,
                                        const InterfaceDiscretization& disc, double kx) {
  const int n = disc.N * components(disc.subsystem);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& t : interface_triplets(profile, disc, kx)) m(t.row, t.col) += t.value;
  return m;
}

const ModeProfile* SweepRecord::mode(int index) const {
  auto it = std::lower_bound(modes.begin(), modes.end(), index,
                             [](const ModeProfile& m, int i) { return m.index < i; });
  if (it != modes.end() && it->index == index) return &*it;
  return nullptr;
}

double window_weight(const ModeProfile& m, double a, double b) {
  double s = 0.0;
  for (int k = 0; k < kHistBins; ++k) {
    double l = static_cast<double>(k) / kHistBins, r = static_cast<double>(k + 1) / kHistBins;
    double ov = std::min(b, r) - std::max(a, l);
    if (ov > 0) s += m.hist[k] * std::min(1.0, ov * kHistBins);
  }
  return s;
}

SweepRecord solve_interface(const ParameterProfile& profile, const InterfaceDiscretization& disc,
                            double kx, const SweepOptions& opt) {
  const int N = disc.N, c = components(disc.subsystem), n = N * c;
  const double L = disc.L, dy = disc.dy();
  auto trips = interface_triplets(profile, disc, kx);

  SweepRecord rec;
  rec.kx = kx;
  Eigen::MatrixXcd vecs;
  std::vector<int> selected;
  Ordering ord = interleaved(N, c);
  const bool windowed = opt.window_lo.has_value() || opt.window_hi.has_value();
  if (windowed) {
    BandedHermitian band;
    band.n = n;
    auto perm = [&](int g) { return ord.pos[g / c] * c + g % c; };
    int kd = 0;
    for (const auto& t : trips) kd = std::max(kd, std::abs(perm(t.row) - perm(t.col)));
    band.kd = kd;
    band.ab.assign(static_cast<size_t>(kd + 1) * n, 0.0);
    for (const auto& t : trips) {
      int r = perm(t.row), q = perm(t.col);
      if (r <= q) band.at(r, q) += t.value;
    }
    double lo = opt.window_lo.value_or(-std::numeric_limits<double>::infinity());
    double hi = opt.window_hi.value_or(std::numeric_limits<double>::infinity());
    WindowedEigen we = banded_window_eigensolve(band, lo, hi);
    rec.eigenvalues = we.eigenvalues;
    selected = we.selected;
    vecs.resize(n, static_cast<Eigen::Index>(selected.size()));
    for (int s = 0; s < N; ++s)
      for (int a = 0; a < c; ++a) vecs.row(s * c + a) = we.vectors.row(ord.pos[s] * c + a);
  } else {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& t : trips) m(t.row, t.col) += t.value;
    Eigen::VectorXd w;
    dense_eigensolve(m, w);
    rec.eigenvalues = w;
    vecs = std::move(m);
    selected.resize(n);
    std::iota(selected.begin(), selected.end(), 0);
  }

  rec.weights0.assign(n, kNaN);
  rec.weightsL.assign(n, kNaN);
  rec.kept.assign(n, 1);
  std::vector<int> bin(N);
  for (int s = 0; s < N; ++s) {
    double u = std::abs(-L + s * dy) / L;
    bin[s] = std::min(kHistBins - 1, static_cast<int>(u * kHistBins));
  }
  rec.modes.reserve(selected.size());
  for (size_t k = 0; k < selected.size(); ++k) {
    ModeProfile mp{selected[k], {}};
    mp.hist.fill(0.0f);
    double total = 0.0;
    std::array<double, kHistBins> acc{};
    for (int s = 0; s < N; ++s) {
      double d = vecs.col(k).segment(s * c, c).squaredNorm();
      acc[bin[s]] += d;
      total += d;
    }
    for (int b = 0; b < kHistBins; ++b) mp.hist[b] = static_cast<float>(acc[b] / total);
    rec.weights0[selected[k]] = window_weight(mp, 0.0, opt.loc_window);
    rec.weightsL[selected[k]] = window_weight(mp, 1.0 - opt.w_edge, 1.0);
    rec.modes.push_back(mp);
  }
  double ph = 0.0;
  for (int i = 0; i < n; ++i) ph = std::max(ph, std::abs(rec.eigenvalues(i) + rec.eigenvalues(n - 1 - i)));
  rec.particle_hole_error = ph;
  return rec;
}

std::vector<SweepRecord> sweep_spectrum(const ParameterProfile& profile,
                                        const InterfaceDiscretization& disc, const SweepOptions& opt) {
  disc.validate();
  profile.validate();
  if (disc.kx_grid.empty()) throw InvalidParameter("kx grid is empty");
  std::vector<SweepRecord> out(disc.kx_grid.size());
  parallel_for(out.size(), opt.threads, [&](std::size_t i) {
    try {
      out[i] = solve_interface(profile, disc, disc.kx_grid[i], opt);
    } catch (const NumericalFailure& e) {
      throw NumericalFailure(std::string(e.what()) + " at kx=" + std::to_string(disc.kx_grid[i]));
    }
  });
  return out;
}

FilterResult filter_spurious(const std::vector<SweepRecord>& records, double w_edge) {
  FilterResult fr;
  fr.records = records;
  for (auto& r : fr.records) {
    for (const auto& m : r.modes) {
      double wl = window_weight(m, 1.0 - w_edge, 1.0);
      if (wl > 0.5) {
        r.kept[m.index] = 0;
        fr.removed.push_back({r.kx, m.index, r.eigenvalues(m.index), wl});
      }
    }
  }
  return fr;
}

std::string to_string(Localization l) {
  switch (l) {
    case Localization::Interface: return "interface";
    case Localization::Spurious: return "spurious";
    case Localization::Bulk: return "bulk";
  }
  return "?";
}

EdgeReport spectral_flow(const std::vector<SweepRecord>& records, const GapInterval& gap,
                         double loc_window, double w_edge) {
  if (!gap.global) throw NotApplicable("no common spectral gap");
  if (records.size() < 2) throw InvalidParameter("spectral flow needs at least two kx samples");
  EdgeReport rep;
  rep.gap = gap;
  rep.E_ref = 0.5 * (gap.lo + gap.hi);
  const double E = rep.E_ref, win = 0.25 * (gap.hi - gap.lo);

  auto below = [&](const SweepRecord& r) {
    return static_cast<int>(std::lower_bound(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size(), E) -
                            r.eigenvalues.data());
  };
  auto weights = [&](const SweepRecord& r, int idx, double& w0, double& wl) {
    const ModeProfile* m = r.mode(idx);
    if (!m) return false;
    w0 = window_weight(*m, 0.0, loc_window);
    wl = window_weight(*m, 1.0 - w_edge, 1.0);
    return true;
  };

  for (const auto& r : records)
    for (const auto& m : r.modes) {
      double w = r.eigenvalues(m.index);
      if (w > gap.lo && w < gap.hi && window_weight(m, 1.0 - w_edge, 1.0) > 0.5) ++rep.filtered_count;
    }

  for (size_t k = 0; k + 1 < records.size(); ++k) {
    const SweepRecord& a = records[k];
    const SweepRecord& b = records[k + 1];
    const int na = static_cast<int>(a.eigenvalues.size());
    const int nb = static_cast<int>(b.eigenvalues.size());
    std::vector<int> cand;
    for (int i = 0; i < na; ++i)
      if (std::abs(a.eigenvalues(i) - E) < win) cand.push_back(i);
    std::sort(cand.begin(), cand.end(), [&](int x, int y) {
      return std::abs(a.eigenvalues(x) - E) < std::abs(a.eigenvalues(y) - E);
    });
    std::vector<char> used(nb, 0);
    int net = 0;
    for (int i : cand) {
      const double wa = a.eigenvalues(i);
      const ModeProfile* ma = a.mode(i);
      // branches crossing each other at E are told apart by their localization
      auto cost = [&](int t) {
        double c = std::abs(b.eigenvalues(t) - wa);
        const ModeProfile* mb = ma ? b.mode(t) : nullptr;
        if (mb) {
          double d = 0.0;
          for (int h = 0; h < kHistBins; ++h) d += std::abs(ma->hist[h] - mb->hist[h]);
          c += 0.5 * win * d;
        }
        return c;
      };
      int best = -1;
      double bc = std::numeric_limits<double>::infinity();
      for (int t = 0; t < nb; ++t) {
        if (used[t] || std::abs(b.eigenvalues(t) - wa) > win) continue;
        double c = cost(t);
        if (c < bc) bc = c, best = t;
      }
      double bd = best < 0 ? bc : std::abs(b.eigenvalues(best) - wa);
      if (best < 0 || bd > win)
        throw ResolutionError("branch at omega=" + std::to_string(wa) + " between kx=" + std::to_string(a.kx) +
                              " and " + std::to_string(b.kx) + " moves more than a quarter gap");
      used[best] = 1;
      const double wb = b.eigenvalues(best);
      const bool sa = wa >= E, sb = wb >= E;
      if (sa == sb) continue;
      Crossing cr;
      cr.kx = a.kx;
      cr.direction = sb ? 1 : -1;
      net += cr.direction;
      bool nearer_a = std::abs(wa - E) <= std::abs(wb - E);
      double w0 = kNaN, wl = kNaN;
      bool ok = nearer_a ? weights(a, i, w0, wl) : weights(b, best, w0, wl);
      if (!ok) ok = nearer_a ? weights(b, best, w0, wl) : weights(a, i, w0, wl);
      if (!ok) throw ResolutionError("no eigenvector available at a gap crossing; widen the solver window");
      cr.weight0 = w0;
      cr.weightL = wl;
      if (w0 > 0.5) {
        cr.where = Localization::Interface;
        rep.flow += kFlowSign * cr.direction;
      } else if (wl > 0.5) {
        cr.where = Localization::Spurious;
        rep.spurious_flow += kFlowSign * cr.direction;
      } else {
        cr.where = Localization::Bulk;
        ++rep.unattributed;
      }
      rep.branch_list.push_back(cr);
    }
    if (net != below(a) - below(b))
      throw ResolutionError("unmatched gap crossing between kx=" + std::to_string(a.kx) + " and " +
                            std::to_string(b.kx) + "; refine the kx grid");
  }
  return rep;
}

DosReport gap_dos_probe(const std::vector<SweepRecord>& records, const GapInterval& gap, double w_edge) {
  DosReport d;
  d.gap = gap;
  for (const auto& r : records) {
    int cnt = 0;
    for (int i = 0; i < r.eigenvalues.size(); ++i) {
      double w = r.eigenvalues(i);
      if (!(w > gap.lo && w < gap.hi)) continue;
      if (!r.kept.empty() && !r.kept[i]) continue;
      if (const ModeProfile* m = r.mode(i); m && window_weight(*m, 1.0 - w_edge, 1.0) > 0.5) continue;
      ++cnt;
    }
    d.kx.push_back(r.kx);
    d.counts.push_back(cnt);
    d.max = std::max(d.max, cnt);
  }
  if (!d.counts.empty())
    d.mean = std::accumulate(d.counts.begin(), d.counts.end(), 0.0) / d.counts.size();
  return d;
}

GapInterval common_gap(const ParameterProfile& profile, int ell, Subsystem sys) {
  return intersect(band_extrema(profile.south(), ell, sys), band_extrema(profile.north(), ell, sys));
}

}  // namespace topoplasma
