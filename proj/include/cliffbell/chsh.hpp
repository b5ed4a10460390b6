#pragma once

// CHSH derivation inside the model: F_cv and its square computed exactly
// and via the commuting-assumption decomposition, the commutator-product
// identities, the variance inequality and the model bound.

#include <array>
#include <string_view>
#include <vector>

#include "cliffbell/epr_model.hpp"
#include "cliffbell/ga.hpp"

namespace cliffbell {

struct ChshConfig {
  Direction a;
  Direction a_prime;
  Direction b;
  Direction b_prime;
};

/// Plane in which coplanar settings are swept. The angle is measured from
/// the first axis toward the second.
enum class Plane { xy, yz, zx };

std::string_view to_string(Plane p);
/// Throws std::invalid_argument for names other than xy, yz, zx.
Plane parse_plane(std::string_view name);

Direction planar_direction(Plane plane, double angle);

/// a at 0, a' at pi/2, b and b' at the given angles.
ChshConfig planar_config(Plane plane, double b_angle, double b_prime_angle);
/// All four angles free.
ChshConfig planar_config(Plane plane, double a_angle, double a_prime_angle, double b_angle,
                         double b_prime_angle);

/// A_a (B_b + B_b') + A_a' (B_b - B_b')
Multivector f_cv(const ChshConfig& cfg, Orientation mu);

/// Grade-0 part of the ensemble average of F_cv.
double chsh_value(const ChshConfig& cfg, const EnsembleMeasure& rho);

/// -a.b - a.b' - a'.b + a'.b'
double chsh_closed_form(const ChshConfig& cfg);

/// F_cv o F_cv with no simplifying assumption.
Multivector f_squared_exact(const ChshConfig& cfg, Orientation mu);

/// 4 + [A_a, A_a'] [B_b', B_b], valid only when every A commutes with
/// every B.
Multivector f_squared_paper_decomposition(const ChshConfig& cfg, Orientation mu);

/// <F^2 exact> - <F^2 decomposed>, averaged over rho.
Multivector decomposition_residual(const ChshConfig& cfg, const EnsembleMeasure& rho);

/// [mu*n, mu*n'] (equals -2 mu*(n x n')).
Multivector cross_commutator(const Direction& n, const Direction& n_prime, Orientation mu);

/// [A_a, A_a'] [B_b', B_b]
Multivector seevinck_product(const ChshConfig& cfg, Orientation mu);

/// 4 (mu*(a x a')) (mu*(b' x b))
Multivector seevinck_closed_form(const ChshConfig& cfg, Orientation mu);

Multivector seevinck_average(const ChshConfig& cfg, const EnsembleMeasure& rho);

/// (a x a') . (b' x b), the ordering used on the model side.
double seevinck_model_dot(const ChshConfig& cfg);
/// (a x a') . (b x b'), the ordering used on the quantum side.
double seevinck_qm_dot(const ChshConfig& cfg);

/// sqrt(4 + 4 |(a x a') . (b' x b)|)
double model_bound(const ChshConfig& cfg);

struct VarianceCheck {
  double mean_squared = 0;       // |<F>_0|^2
  double second_moment = 0;      // <F^2 exact>_0
  double decomposed_second_moment = 0;  // <F^2 decomposed>_0
  bool holds = false;            // mean_squared <= second_moment + tol
};

VarianceCheck variance_inequality_check(const ChshConfig& cfg, const EnsembleMeasure& rho,
                                        Tolerance tol = {});

struct ChshReport {
  double chsh_value = 0;
  double model_bound = 0;
  Multivector f_squared_exact_avg;
  double f_squared_paper_avg = 0;
  Multivector decomposition_residual;
  /// Per-microstate norms of [A_n, B_n'] for (a,b), (a,b'), (a',b), (a',b').
  std::array<double, 4> cross_commutator_norms{};
  bool variance_check = false;

  // Carried alongside the fixed fields.
  Multivector f_avg;  // full average of F_cv; non-scalar grades should vanish
  std::array<double, 4> cross_commutator_avg_norms{};
  double seevinck_model_dot = 0;  // (a x a') . (b' x b)
  double seevinck_qm_dot = 0;     // (a x a') . (b x b')
  double variance_lhs = 0;
  double variance_rhs = 0;
};

ChshReport make_report(const ChshConfig& cfg, const EnsembleMeasure& rho, Tolerance tol = {});

struct SweepRow {
  double a_angle = 0;
  double a_prime_angle = 0;
  double b_angle = 0;
  double b_prime_angle = 0;
  ChshReport report;
};

struct SweepSummary {
  double max_abs_chsh = 0;
  std::size_t argmax_row = 0;
};

/// Number of grid points per axis in [0, 2pi) for the given step.
std::size_t grid_points(double step);

/// Fixes a = 0 and a' = pi/2 in the plane and varies b and b' over the grid
/// k*step, k = 0 .. grid_points(step) - 1; rows are ordered with b as the
/// outer index. Throws std::invalid_argument unless 0 < step <= pi.
/// Rows are computed on up to `threads` workers; output order is fixed.
std::vector<SweepRow> chsh_sweep(Plane plane, double step, const EnsembleMeasure& rho,
                                 Tolerance tol = {}, unsigned threads = 1);

SweepSummary summarize(const std::vector<SweepRow>& rows);

}  // namespace cliffbell
