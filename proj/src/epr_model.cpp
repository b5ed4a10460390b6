#include "cliffbell/epr_model.hpp"

#include <algorithm>
#include <string>

namespace cliffbell {

namespace {

int checked_sign(int s, const char* what) {
  if (s != 1 && s != -1) throw std::invalid_argument(std::string(what) + " must be +1 or -1");
  return s;
}

struct Normal {
  Direction z;
  double sin_theta;
};

Normal unit_normal(const Direction& a, const Direction& b) {
  const Vec3 axb = cross(a, b);
  const double s = length(axb);
  if (s < kDegenerateCross) {
    throw DegenerateSettings("settings are parallel; the normal direction z is undefined");
  }
  return {Direction::normalized(axb), s};
}

}  // namespace

Orientation Orientation::from_sign(int sign) {
  return checked_sign(sign, "orientation sign") > 0 ? plus() : minus();
}

EnsembleMeasure EnsembleMeasure::weighted(double p_plus) {
  if (!(p_plus >= 0.0 && p_plus <= 1.0)) {
    throw std::invalid_argument("ensemble weight must lie in [0, 1]");
  }
  EnsembleMeasure m;
  m.plus_ = p_plus;
  m.minus_ = 1.0 - p_plus;
  return m;
}

const char* to_string(ProductFrame f) { return f == ProductFrame::oriented ? "oriented" : "fixed"; }

Multivector model_product(const Multivector& x, const Multivector& y, Orientation mu,
                          ProductFrame frame) {
  if (frame == ProductFrame::oriented && mu.sign() < 0) return geometric_product(y, x);
  return geometric_product(x, y);
}

Multivector model_commutator(const Multivector& x, const Multivector& y, Orientation mu,
                             ProductFrame frame) {
  return model_product(x, y, mu, frame) - model_product(y, x, mu, frame);
}

Multivector joint_expectation(const Direction& a, const Direction& b, const EnsembleMeasure& rho,
                              ProductFrame frame) {
  return rho.average(
      [&](Orientation mu) { return model_product(observable(a, mu), observable(b, mu), mu, frame); });
}

Multivector bivector_identity_residual(const Direction& a, const Direction& b, Orientation mu,
                                       ProductFrame frame) {
  const Multivector product = model_product(observable(a, mu), observable(b, mu), mu, frame);
  const Multivector rhs = Multivector::scalar(-dot(a, b)) - orientation_times(mu, cross(a, b));
  return product - rhs;
}

Multivector commutator_relation_residual(const Direction& a, const Direction& b, Orientation mu,
                                         ProductFrame frame) {
  return model_commutator(observable(a, mu), observable(b, mu), mu, frame) +
         2.0 * orientation_times(mu, cross(a, b));
}

NormalizedCommutator normalized_commutator_relation(const Direction& a, const Direction& b,
                                                    Orientation mu) {
  const auto [z, s] = unit_normal(a, b);
  const Multivector comm = model_commutator(observable(a, mu), observable(b, mu), mu);
  return {z, s, comm, comm + 2.0 * s * observable(z, mu)};
}

double ParameterIndependence::max_residual() const {
  return std::max({equality_residual, reconstruction_residual, reduced_residual_b,
                   reduced_residual_b_prime});
}

ParameterIndependence parameter_independence_check(const Direction& a, const Direction& b,
                                                   const Direction& b_prime, Orientation mu,
                                                   Tolerance tol) {
  const Multivector obs_a = observable(a, mu);

  // B A B^-1 - 2 {mu*(a x b)} B^-1, with B^-1 taken from the algebra.
  const auto side = [&](const Direction& remote) {
    const Multivector obs_b = observable(remote, mu);
    const Multivector inv_b = versor_inverse(obs_b);
    const auto prod = [&](const Multivector& x, const Multivector& y) {
      return model_product(x, y, mu);
    };
    return prod(prod(obs_b, obs_a), inv_b) -
           2.0 * prod(orientation_times(mu, cross(a, remote)), inv_b);
  };

  // b a b - 2 b (a.b) as a product of plain vectors; should equal -a.
  const auto reduced = [&](const Direction& remote) {
    const Multivector vb = Multivector::vector(remote);
    const Multivector va = Multivector::vector(a);
    const Multivector lhs = vb * va * vb - 2.0 * dot(a, remote) * vb;
    return max_abs_diff(lhs, -va);
  };

  ParameterIndependence out;
  out.side_b = side(b);
  out.side_b_prime = side(b_prime);
  out.equality_residual = max_abs_diff(out.side_b_prime, out.side_b);
  out.reconstruction_residual =
      std::max(max_abs_diff(out.side_b, obs_a), max_abs_diff(out.side_b_prime, obs_a));
  out.reduced_residual_b = reduced(b);
  out.reduced_residual_b_prime = reduced(b_prime);
  out.passed = out.max_residual() <= tol.eps;
  return out;
}

SignTriple::SignTriple(int sa, int sb)
    : sa_(checked_sign(sa, "sense of A")), sb_(checked_sign(sb, "sense of B")) {}

Multivector outcome_side(const Direction& a, const Direction& b, SignTriple signs) {
  const auto [z, s] = unit_normal(a, b);
  const Multivector obs_a = signs.a() * dual(a);
  const Multivector obs_b = signs.b() * dual(b);
  const Multivector obs_c = signs.c() * dual(z);
  return -(obs_b * obs_a * obs_b) + 2.0 * s * (obs_c * obs_b);
}

Multivector c_from_orientation_algebra(const Direction& a, const Direction& b, SignTriple signs) {
  return -0.5 * commutator(signs.a() * dual(a), signs.b() * dual(b));
}

double OutcomeIndependence::max_residual() const {
  return *std::max_element(residuals.begin(), residuals.end());
}

OutcomeIndependence outcome_independence_check(const Direction& a, const Direction& b,
                                               Tolerance tol) {
  OutcomeIndependence out;
  const auto& cases = all_sign_cases();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const SignTriple& sc = cases[i];
    const Multivector here = outcome_side(a, b, sc);
    const Multivector flipped = outcome_side(a, b, SignTriple(sc.a(), -sc.b()));
    const Multivector local = sc.a() * dual(a);
    out.residuals[i] = std::max(max_abs_diff(here, flipped), max_abs_diff(here, local));
  }
  out.passed = out.max_residual() <= tol.eps;
  return out;
}

Multivector JointObservable::value_at(Orientation mu) const {
  return model_product(observable(a_, mu), observable(b_, mu), mu);
}

CheckResult factorizability_check(const Direction& a, const Direction& b, Orientation mu,
                                  Tolerance tol) {
  const Multivector joint = JointObservable(a, b).value_at(mu);
  const Multivector separate_a = observable(a, mu);
  const Multivector separate_b = observable(b, mu);
  const double r = max_abs_diff(joint, model_product(separate_a, separate_b, mu));
  return {r <= tol.eps, r};
}

int event_readout(const Direction& n, Orientation mu) {
  // Sense of rotation of the bivector mu*n about n.
  return dot(observable(n, mu).bivector_part(), n) > 0.0 ? 1 : -1;
}

double event_level_correlation(const Direction& a, const Direction& b, const EnsembleMeasure& rho) {
  return rho.average_scalar(
      [&](Orientation mu) { return event_readout(a, mu) * event_readout(b, mu); });
}

}  // namespace cliffbell
