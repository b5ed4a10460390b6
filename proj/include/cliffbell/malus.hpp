#pragma once

// Polarizer-prepared subensembles and sequential spin measurements.

#include <array>
#include <span>
#include <vector>

#include "cliffbell/epr_model.hpp"
#include "cliffbell/ga.hpp"

namespace cliffbell {

/// Polarizer axis p with selected spin value s = +/-1.
class Preparation {
 public:
  /// Throws std::invalid_argument unless s is +1 or -1.
  Preparation(const Direction& p, int s = 1);
  const Direction& p() const { return p_; }
  int s() const { return s_; }

 private:
  Direction p_;
  int s_;
};

/// Weights over the orientation pairs (sign of the I a factor, sign of the
/// I p factor) of the composite variable (mu*a)(mu*p).
class PreselectionWeights {
 public:
  /// The pure preparation: weight one on (-I a)(+I p) for s = +1, on
  /// (+I a)(-I p) for s = -1, zero elsewhere.
  static PreselectionWeights for_spin(int s);

  /// Throws std::invalid_argument for signs other than +/-1.
  double weight(int sign_a, int sign_p) const;
  double total() const;

 private:
  // Index: (sign_a > 0) * 2 + (sign_p > 0)
  std::array<double, 4> w_{};
};

/// A(a, p, mu) = (mu*a)(mu*p), a unit quaternion.
Multivector sequential_observable(const Direction& a, const Direction& p, Orientation mu);

/// The intermediate lines of the expectation, each independently checkable.
struct MalusDerivation {
  Multivector preselected;  // sum over pairs of w * (sa I a)(sp I p)
  Multivector vector_product;  // a p  (after -I^2 = +1)
  Multivector wedge_average;   // <mu*(a x p)>_rho
  Multivector expectation;     // a.p + <mu*(a x p)>_rho
};

MalusDerivation malus_derivation(const Direction& a, const Preparation& prep,
                                 const EnsembleMeasure& rho);

inline Multivector malus_expectation(const Direction& a, const Preparation& prep,
                                     const EnsembleMeasure& rho) {
  return malus_derivation(a, prep, rho).expectation;
}

/// Grade-0 expectation at each analyzer, with the polarizer re-prepared
/// along the previous analyzer after every step. Throws
/// std::invalid_argument for an empty chain.
std::vector<double> sequential_chain(std::span<const Direction> analyzers, const Preparation& prep,
                                     const EnsembleMeasure& rho);

}  // namespace cliffbell
