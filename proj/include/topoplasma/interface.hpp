#pragma once

#include <array>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "topoplasma/bulk.hpp"

namespace topoplasma {

// South value for y < center, north value for y > center, periodically mirrored at
// center + L. Width is the inverse of the maximal slope of the unit step.
struct LogisticProfile {
  double south = 0.0;
  double north = 0.0;
  double width = 2.0;
  double center = 0.0;
  bool absolute = false;  // take |value|
};

// Samples on the periodic grid y_j = -L + j * 2L / M, linearly interpolated.
struct TabulatedProfile {
  std::vector<double> values;
};

using ScalarProfile = std::variant<double, LogisticProfile, TabulatedProfile>;

double periodic_step(double y, double L, double width, double center = 0.0);
double evaluate(const ScalarProfile& f, double y, double L);
// Distance from the interface beyond which the profile is within 1e-6 of its plateau.
double plateau_distance(const ScalarProfile& f);

struct ParameterProfile {
  ScalarProfile omega_c = 0.0;
  ScalarProfile omega_p = 0.0;
  double k_z = 0.0;
  double L = 30.0;

  void validate() const;
  PlasmaParams south() const;
  PlasmaParams north() const;
};

struct InterfaceDiscretization {
  int N = 300;
  double L = 30.0;
  std::vector<double> kx_grid;
  Subsystem subsystem = Subsystem::Full;

  double dy() const { return 2.0 * L / N; }
  void validate() const;
};

std::vector<double> symmetric_grid(double kmax, int n);

int components(Subsystem s);

struct Triplet {
  int row;
  int col;
  cplx value;
};

// Entries of the interface matrix in natural site-major ordering.
std::vector<Triplet> interface_triplets(const ParameterProfile& profile,
                                        const InterfaceDiscretization& disc, double kx);
Eigen::MatrixXcd build_interface_matrix(const ParameterProfile& profile,
                                        const InterfaceDiscretization& disc, double kx);

inline constexpr int kHistBins = 40;

struct ModeProfile {
  int index;  // position in SweepRecord::eigenvalues
  std::array<float, kHistBins> hist;  // |psi|^2 binned in |y|/L
};

struct SweepRecord {
  double kx = 0.0;
  Eigen::VectorXd eigenvalues;
  std::vector<double> weights0;  // NaN when the eigenvector was not computed
  std::vector<double> weightsL;
  std::vector<unsigned char> kept;
  std::vector<ModeProfile> modes;
  double particle_hole_error = 0.0;

  const ModeProfile* mode(int index) const;
};

// Fraction of a mode's weight with |y|/L in [a, b].
double window_weight(const ModeProfile& m, double a, double b);

struct SweepOptions {
  int threads = 1;
  // Eigenvectors are computed only for eigenvalues in [window_lo, window_hi] when set.
  std::optional<double> window_lo;
  std::optional<double> window_hi;
  double loc_window = 0.2;
  double w_edge = 0.1;
};

SweepRecord solve_interface(const ParameterProfile& profile, const InterfaceDiscretization& disc,
                            double kx, const SweepOptions& opt = {});
std::vector<SweepRecord> sweep_spectrum(const ParameterProfile& profile,
                                        const InterfaceDiscretization& disc,
                                        const SweepOptions& opt = {});

struct RemovedMode {
  double kx;
  int index;
  double omega;
  double weightL;
};

struct FilterResult {
  std::vector<SweepRecord> records;
  std::vector<RemovedMode> removed;
};

FilterResult filter_spurious(const std::vector<SweepRecord>& records, double w_edge = 0.1);

enum class Localization { Interface, Spurious, Bulk };
std::string to_string(Localization l);

struct Crossing {
  double kx;  // left end of the kx interval containing the crossing
  int direction;
  Localization where;
  double weight0;
  double weightL;
};

// Upward crossings of E_ref with increasing kx count +1.
inline constexpr int kFlowSign = 1;

struct EdgeReport {
  GapInterval gap;
  double E_ref = 0.0;
  int flow = 0;
  int spurious_flow = 0;
  int unattributed = 0;
  std::vector<Crossing> branch_list;
  int filtered_count = 0;
};

EdgeReport spectral_flow(const std::vector<SweepRecord>& records, const GapInterval& gap,
                         double loc_window = 0.2, double w_edge = 0.1);

struct DosReport {
  GapInterval gap;
  std::vector<double> kx;
  std::vector<int> counts;
  double mean = 0.0;
  int max = 0;
};

DosReport gap_dos_probe(const std::vector<SweepRecord>& records, const GapInterval& gap,
                        double w_edge = 0.1);

// Common gap of the two plateau phases of a profile.
GapInterval common_gap(const ParameterProfile& profile, int ell, Subsystem sys);

}  // namespace topoplasma
