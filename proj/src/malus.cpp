#include "cliffbell/malus.hpp"

#include <numeric>
#include <stdexcept>

namespace cliffbell {

namespace {

int checked(int s) {
  if (s != 1 && s != -1) throw std::invalid_argument("sign must be +1 or -1");
  return s;
}

std::size_t slot(int sign_a, int sign_p) {
  return static_cast<std::size_t>((checked(sign_a) > 0 ? 2 : 0) + (checked(sign_p) > 0 ? 1 : 0));
}

}  // namespace

Preparation::Preparation(const Direction& p, int s) : p_(p), s_(checked(s)) {}

PreselectionWeights PreselectionWeights::for_spin(int s) {
  PreselectionWeights w;
  if (checked(s) > 0) {
    w.w_[slot(-1, +1)] = 1.0;
  } else {
    w.w_[slot(+1, -1)] = 1.0;
  }
  return w;
}

double PreselectionWeights::weight(int sign_a, int sign_p) const { return w_[slot(sign_a, sign_p)]; }

double PreselectionWeights::total() const { return std::accumulate(w_.begin(), w_.end(), 0.0); }

Multivector sequential_observable(const Direction& a, const Direction& p, Orientation mu) {
  return model_product(observable(a, mu), observable(p, mu), mu);
}

MalusDerivation malus_derivation(const Direction& a, const Preparation& prep,
                                 const EnsembleMeasure& rho) {
  const Direction& p = prep.p();
  const auto weights = PreselectionWeights::for_spin(prep.s());
  const Multivector pseudo = Multivector::pseudoscalar();

  MalusDerivation d;
  for (int sa : {1, -1}) {
    for (int sp : {1, -1}) {
      const double w = weights.weight(sa, sp);
      if (w == 0.0) continue;
      const Multivector ia = sa * (pseudo * Multivector::vector(a));
      const Multivector ip = sp * (pseudo * Multivector::vector(p));
      d.preselected += w * (ia * ip);
    }
  }

  // Both pure preparations carry the factor -I^2 = +1, leaving a p.
  d.vector_product = Multivector::vector(a) * Multivector::vector(p);

  // a p = a.p + I (a x p); the wedge is read as mu*(a x p) and averaged.
  const Vec3 axp = d.preselected.bivector_part();
  d.wedge_average = rho.average([&](Orientation mu) { return orientation_times(mu, axp); });
  d.expectation = Multivector::scalar(d.preselected.scalar_part()) + d.wedge_average;
  return d;
}

std::vector<double> sequential_chain(std::span<const Direction> analyzers, const Preparation& prep,
                                     const EnsembleMeasure& rho) {
  if (analyzers.empty()) throw std::invalid_argument("analyzer chain is empty");
  std::vector<double> out;
  out.reserve(analyzers.size());
  Preparation current = prep;
  for (const Direction& a : analyzers) {
    out.push_back(malus_expectation(a, current, rho).scalar_part());
    // The apparatus passes spin-up along the analyzer: p' = a.
    current = Preparation(a, 1);
  }
  return out;
}

}  // namespace cliffbell
