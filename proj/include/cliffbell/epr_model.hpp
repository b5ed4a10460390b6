#pragma once

// The local model: microstates mu = +/-I, unit bivector observables mu*n,
// the two-point ensemble measure over mu, and the locality verifiers.

#include <array>
#include <stdexcept>
#include <utility>

#include "cliffbell/ga.hpp"

namespace cliffbell {

/// Settings pair whose cross product is too small to define the unit
/// normal z = (a x b) / sin(theta_ab).
class DegenerateSettings : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

inline constexpr double kDegenerateCross = 1e-9;

/// Microstate mu = sign * I.
class Orientation {
 public:
  static constexpr Orientation plus() { return Orientation(1); }
  static constexpr Orientation minus() { return Orientation(-1); }
  static Orientation from_sign(int sign);

  constexpr int sign() const { return sign_; }
  constexpr Multivector trivector() const { return Multivector::pseudoscalar(sign_); }
  constexpr Orientation flipped() const { return Orientation(-sign_); }
  constexpr bool operator==(const Orientation&) const = default;

 private:
  constexpr explicit Orientation(int s) : sign_(s) {}
  int sign_;
};

inline constexpr std::array<Orientation, 2> kOrientations{Orientation::plus(), Orientation::minus()};

/// Probability measure over the two microstates. Uniform by default;
/// non-uniform weights exist for sensitivity experiments.
class EnsembleMeasure {
 public:
  EnsembleMeasure() = default;
  static EnsembleMeasure uniform() { return {}; }
  /// Throws std::invalid_argument unless 0 <= p_plus <= 1.
  static EnsembleMeasure weighted(double p_plus);

  double weight(Orientation mu) const { return mu.sign() > 0 ? plus_ : minus_; }

  /// Two-point weighted sum  sum_mu w(mu) f(mu).
  template <typename F>
  Multivector average(F&& f) const {
    Multivector out;
    for (Orientation mu : kOrientations) {
      const double w = weight(mu);
      if (w != 0.0) out += w * Multivector(f(mu));
    }
    return out;
  }

  template <typename F>
  double average_scalar(F&& f) const {
    double out = 0.0;
    for (Orientation mu : kOrientations) {
      const double w = weight(mu);
      if (w != 0.0) out += w * static_cast<double>(f(mu));
    }
    return out;
  }

 private:
  double plus_ = 0.5;
  double minus_ = 0.5;
};

template <typename F>
Multivector ensemble_average(F&& f, const EnsembleMeasure& rho) {
  return rho.average(std::forward<F>(f));
}

/// A_n(mu) = mu * n = sign(mu) * I n.
constexpr Multivector observable(const Direction& n, Orientation mu) {
  return static_cast<double>(mu.sign()) * dual(n);
}

/// mu * v for a general (non-unit) vector v.
constexpr Multivector orientation_times(Orientation mu, const Vec3& v) {
  return static_cast<double>(mu.sign()) * Multivector::bivector(v);
}

/// How observables compose inside a microstate.
///
/// `oriented`: products are taken in the frame of handedness mu. For
/// mu = +I this is the geometric product; for mu = -I the bivector basis
/// is left-handed and the structure constants flip sign, which is the
/// opposite product x o y = y x.
///
/// `fixed`: the right-handed geometric product for both microstates. Kept
/// for diagnostics; under it the bivector identity fails at mu = -I.
enum class ProductFrame { oriented, fixed };

const char* to_string(ProductFrame f);

Multivector model_product(const Multivector& x, const Multivector& y, Orientation mu,
                          ProductFrame frame = ProductFrame::oriented);

/// model_product(x, y) - model_product(y, x)
Multivector model_commutator(const Multivector& x, const Multivector& y, Orientation mu,
                             ProductFrame frame = ProductFrame::oriented);

/// Ensemble average of (mu*a)(mu*b).
Multivector joint_expectation(const Direction& a, const Direction& b, const EnsembleMeasure& rho,
                              ProductFrame frame = ProductFrame::oriented);

/// (mu*a)(mu*b) - (-a.b - mu*(a x b)); zero when the bivector identity holds.
Multivector bivector_identity_residual(const Direction& a, const Direction& b, Orientation mu,
                                       ProductFrame frame = ProductFrame::oriented);

/// [mu*a, mu*b] + 2 mu*(a x b). Has no degeneracy.
Multivector commutator_relation_residual(const Direction& a, const Direction& b, Orientation mu,
                                         ProductFrame frame = ProductFrame::oriented);

struct NormalizedCommutator {
  Direction z;           // (a x b) / sin(theta_ab)
  double sin_theta = 0;  // |a x b|
  Multivector commutator;
  Multivector residual;  // [mu*a, mu*b] + 2 (mu*z) sin(theta_ab)
};

/// Normalized form of the commutator relation. Throws DegenerateSettings
/// when |a x b| < 1e-9.
NormalizedCommutator normalized_commutator_relation(const Direction& a, const Direction& b,
                                                    Orientation mu);

struct ParameterIndependence {
  bool passed = false;
  Multivector side_b;        // B_b A_a B_b^-1 - 2 {mu*(a x b)} B_b^-1
  Multivector side_b_prime;  // same with b'
  double equality_residual = 0;        // |side_b' - side_b|
  double reconstruction_residual = 0;  // max |side - A_a|
  double reduced_residual_b = 0;       // |b a b - 2 b (a.b) + a|
  double reduced_residual_b_prime = 0;

  double max_residual() const;
};

/// Evaluates both sides of the remote-parameter-independence equality and
/// the reduced vector identity b a b - 2 b (a.b) = -a for b and b'.
ParameterIndependence parameter_independence_check(const Direction& a, const Direction& b,
                                                   const Direction& b_prime, Orientation mu,
                                                   Tolerance tol = {});

/// Senses of rotation of mu*a, mu*b, mu*z; sC = sA * sB.
class SignTriple {
 public:
  /// Throws std::invalid_argument for signs other than +/-1.
  SignTriple(int sa, int sb);
  int a() const { return sa_; }
  int b() const { return sb_; }
  int c() const { return sa_ * sb_; }
  bool operator==(const SignTriple&) const = default;

 private:
  int sa_;
  int sb_;
};

inline const std::array<SignTriple, 4>& all_sign_cases() {
  static const std::array<SignTriple, 4> cases{SignTriple(1, 1), SignTriple(1, -1),
                                               SignTriple(-1, 1), SignTriple(-1, -1)};
  return cases;
}

/// -B A B + 2 C B sin(theta_ab) with A = sA I a, B = sB I b, C = sC I z.
Multivector outcome_side(const Direction& a, const Direction& b, SignTriple signs);

/// C^(sC) sin(theta_ab) evaluated directly from the orientation algebra:
/// -(1/2) [A^(sA), B^(sB)].
Multivector c_from_orientation_algebra(const Direction& a, const Direction& b, SignTriple signs);

struct OutcomeIndependence {
  bool passed = false;
  /// One per case in all_sign_cases(): max of |side(sA,sB) - side(sA,-sB)|
  /// and |side(sA,sB) - A^(sA)|.
  std::array<double, 4> residuals{};

  double max_residual() const;
};

/// Throws DegenerateSettings when |a x b| < 1e-9.
OutcomeIndependence outcome_independence_check(const Direction& a, const Direction& b,
                                               Tolerance tol = {});

/// The joint observable (A_a B_b)(mu), defined as a single value of the
/// pair.
class JointObservable {
 public:
  JointObservable(const Direction& a, const Direction& b) : a_(a), b_(b) {}
  Multivector value_at(Orientation mu) const;

 private:
  Direction a_;
  Direction b_;
};

struct CheckResult {
  bool passed = false;
  double residual = 0;
};

CheckResult factorizability_check(const Direction& a, const Direction& b, Orientation mu,
                                  Tolerance tol = {});

/// +1 when mu*n spins counterclockwise about n, -1 otherwise. Depends on
/// the handedness of mu alone.
int event_readout(const Direction& n, Orientation mu);

/// sum_mu w(mu) readout(a, mu) readout(b, mu), by exact enumeration.
double event_level_correlation(const Direction& a, const Direction& b, const EnsembleMeasure& rho);

}  // namespace cliffbell
