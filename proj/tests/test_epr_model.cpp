#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "cliffbell/epr_model.hpp"
#include "cliffbell/sampling.hpp"
#include "oracle/naive_cl3.hpp"

using namespace cliffbell;

namespace {

const Direction kX(1, 0, 0);
const Direction kY(0, 1, 0);
const Direction kZ(0, 0, 1);
const Multivector kE12 = Multivector::blade(Blade::e12);

oracle::V3 v3(const Direction& d) { return {d.x(), d.y(), d.z()}; }

Multivector from_oracle(const oracle::MV& m) {
  Multivector out;
  for (std::size_t i = 0; i < kBladeCount; ++i) out[i] = m[i];
  return out;
}

}  // namespace

TEST(Orientation, Basics) {
  EXPECT_EQ(Orientation::plus().sign(), 1);
  EXPECT_EQ(Orientation::minus().sign(), -1);
  EXPECT_EQ(Orientation::plus().trivector(), Multivector::pseudoscalar());
  EXPECT_EQ(Orientation::from_sign(-1), Orientation::minus());
  EXPECT_THROW(Orientation::from_sign(0), std::invalid_argument);
}

TEST(EnsembleMeasure, WeightsValidated) {
  EXPECT_EQ(EnsembleMeasure().weight(Orientation::plus()), 0.5);
  const auto m = EnsembleMeasure::weighted(0.25);
  EXPECT_EQ(m.weight(Orientation::plus()) + m.weight(Orientation::minus()), 1.0);
  EXPECT_THROW(EnsembleMeasure::weighted(1.5), std::invalid_argument);
  EXPECT_THROW(EnsembleMeasure::weighted(-0.1), std::invalid_argument);
}

TEST(Observable, Examples) {
  EXPECT_EQ(observable(kZ, Orientation::plus()),
            from_oracle(oracle::observable(+1, v3(kZ))));
  EXPECT_EQ(observable(kZ, Orientation::plus()), kE12);
  EXPECT_EQ(observable(kZ, Orientation::minus()), -kE12);
  DirectionSampler rng(5);
  for (int i = 0; i < 500; ++i) {
    const Direction n = rng.next();
    for (Orientation mu : kOrientations) {
      const Multivector o = observable(n, mu);
      EXPECT_NEAR(norm(o), 1.0, 1e-15);
      EXPECT_LE(max_abs_diff(o * o, Multivector::scalar(-1.0)), 1e-15);
      EXPECT_EQ(o, o.grade(2));
    }
  }
}

TEST(EnsembleAverage, Examples) {
  const EnsembleMeasure rho;
  const Direction n = Direction::normalized({0.2, -0.7, 0.4});
  EXPECT_EQ(ensemble_average([&](Orientation mu) { return observable(n, mu); }, rho), Multivector{});
  const Multivector c = Multivector::scalar(0.3) + Multivector::blade(Blade::e2, -1.25);
  EXPECT_EQ(ensemble_average([&](Orientation) { return c; }, rho), c);
  EXPECT_EQ(ensemble_average([](Orientation mu) { return mu.trivector(); }, rho), Multivector{});
}

TEST(EnsembleAverage, OddFunctionsVanishExactly) {
  DirectionSampler rng(6);
  const EnsembleMeasure rho;
  for (int i = 0; i < 1000; ++i) {
    const Multivector m = rng.multivector();
    const auto odd = [&](Orientation mu) { return static_cast<double>(mu.sign()) * m; };
    EXPECT_EQ(rho.average(odd), Multivector{});
  }
}

TEST(JointExpectation, Examples) {
  const EnsembleMeasure rho;
  EXPECT_EQ(joint_expectation(kX, kX, rho), Multivector::scalar(-1.0));
  EXPECT_EQ(joint_expectation(kX, kY, rho), Multivector{});
  const Direction b(0.5, std::sqrt(3.0) / 2, 0.0);
  EXPECT_NEAR(joint_expectation(kX, b, rho).scalar_part(), -0.5, 1e-15);
}

TEST(JointExpectation, ScalarEqualsMinusDotAndOtherGradesCancel) {
  DirectionSampler rng(7);
  const EnsembleMeasure rho;
  for (int i = 0; i < 10'000; ++i) {
    const Direction a = rng.next();
    const Direction b = rng.next();
    const Multivector e = joint_expectation(a, b, rho);
    EXPECT_NEAR(e.scalar_part(), -dot(a, b), 1e-13);
    for (int k = 1; k <= 3; ++k) EXPECT_LE(max_abs(e.grade(k)), 1e-15);
  }
}

TEST(BivectorIdentity, Examples) {
  const Multivector r = bivector_identity_residual(kX, kY, Orientation::plus());
  EXPECT_EQ(r, Multivector{});
  // (mu a)(mu b) itself, from the oracle: e23 e31 = -e12.
  EXPECT_EQ(from_oracle(oracle::mul(oracle::observable(+1, v3(kX)), oracle::observable(+1, v3(kY)))),
            -kE12);
  const Direction a = Direction::normalized({1, 2, -1});
  EXPECT_LE(max_abs(bivector_identity_residual(a, a, Orientation::minus())), 1e-15);
}

TEST(BivectorIdentity, HoldsForRandomPairsBothOrientations) {
  DirectionSampler rng(8);
  double worst = 0.0;
  for (int i = 0; i < 100'000; ++i) {
    const Direction a = rng.next();
    const Direction b = rng.next();
    for (Orientation mu : kOrientations) {
      worst = std::max(worst, max_abs(bivector_identity_residual(a, b, mu)));
    }
  }
  EXPECT_LE(worst, 1e-12);
}

TEST(BivectorIdentity, FixedFrameFailsAtMinusI) {
  // With the right-handed product for both microstates, (-Ia)(-Ib) = (Ia)(Ib)
  // and the identity is off by 2 I (a x b).
  const Multivector r = bivector_identity_residual(kX, kY, Orientation::minus(), ProductFrame::fixed);
  EXPECT_EQ(r, -2.0 * kE12);
  EXPECT_EQ(bivector_identity_residual(kX, kY, Orientation::plus(), ProductFrame::fixed),
            Multivector{});
  EXPECT_EQ(joint_expectation(kX, kY, EnsembleMeasure(), ProductFrame::fixed), -kE12);
}

TEST(ModelProduct, OrientedMatchesOracle) {
  DirectionSampler rng(9);
  for (int i = 0; i < 500; ++i) {
    const Multivector x = rng.multivector();
    const Multivector y = rng.multivector();
    oracle::MV ox{}, oy{};
    for (std::size_t k = 0; k < 8; ++k) {
      ox[k] = x[k];
      oy[k] = y[k];
    }
    for (Orientation mu : kOrientations) {
      EXPECT_LE(max_abs_diff(model_product(x, y, mu), from_oracle(oracle::model_mul(mu.sign(), ox, oy))),
                1e-15);
    }
  }
}

TEST(CommutatorRelation, Examples) {
  const auto n = normalized_commutator_relation(kX, kY, Orientation::plus());
  EXPECT_EQ(n.commutator, -2.0 * kE12);
  EXPECT_EQ(n.residual, Multivector{});
  EXPECT_EQ(n.z, kZ);
  EXPECT_EQ(n.sin_theta, 1.0);
  EXPECT_EQ(commutator_relation_residual(kX, kY, Orientation::plus()), Multivector{});

  // Parallel settings: unnormalized form holds, normalized form rejects.
  EXPECT_EQ(commutator_relation_residual(kX, kX, Orientation::minus()), Multivector{});
  EXPECT_THROW(normalized_commutator_relation(kX, kX, Orientation::plus()), DegenerateSettings);
  EXPECT_THROW(normalized_commutator_relation(kX, -kX, Orientation::plus()), DegenerateSettings);
}

TEST(CommutatorRelation, RandomPairs) {
  DirectionSampler rng(10);
  for (int i = 0; i < 10'000; ++i) {
    const Direction a = rng.next();
    const Direction b = rng.next();
    for (Orientation mu : kOrientations) {
      EXPECT_LE(max_abs(commutator_relation_residual(a, b, mu)), 1e-12);
      EXPECT_LE(max_abs(normalized_commutator_relation(a, b, mu).residual), 1e-12);
    }
  }
}

TEST(ParameterIndependence, Examples) {
  // e2 e1 e2 - 0 = -e1
  const auto orth = parameter_independence_check(kX, kY, kZ, Orientation::plus());
  EXPECT_TRUE(orth.passed);
  EXPECT_EQ(orth.reduced_residual_b, 0.0);
  EXPECT_LE(orth.equality_residual, 1e-15);

  // a = b: b a b - 2 b (a.b) = a - 2a = -a
  const auto par = parameter_independence_check(kX, kX, kY, Orientation::minus());
  EXPECT_TRUE(par.passed);
  EXPECT_EQ(par.reduced_residual_b, 0.0);
}

TEST(ParameterIndependence, RandomConfigurations) {
  DirectionSampler rng(12);
  for (int i = 0; i < 10'000; ++i) {
    const Direction a = rng.next(), b = rng.next(), bp = rng.next();
    const Orientation mu = rng.coin() ? Orientation::plus() : Orientation::minus();
    const auto r = parameter_independence_check(a, b, bp, mu);
    EXPECT_TRUE(r.passed) << r.max_residual();
    EXPECT_LE(max_abs_diff(r.side_b, observable(a, mu)), 1e-12);
  }
}

TEST(SignTriple, Rule) {
  EXPECT_EQ(SignTriple(1, -1).c(), -1);
  EXPECT_EQ(SignTriple(1, 1).c(), 1);
  EXPECT_EQ(SignTriple(-1, -1).c(), 1);
  EXPECT_EQ(SignTriple(-1, 1).c(), -1);
  EXPECT_THROW(SignTriple(0, 1), std::invalid_argument);
}

TEST(SignTriple, MatchesOrientationAlgebra) {
  // (+I)(+a), (-I)(+b) = (+I)(-b)  =>  C = (+I)(-z) = (-I)(+z).
  DirectionSampler rng(13);
  for (int i = 0; i < 1000; ++i) {
    const Direction a = rng.next(), b = rng.next();
    const Vec3 axb = cross(a, b);
    if (length(axb) < 1e-6) continue;
    for (const SignTriple& s : all_sign_cases()) {
      const Multivector c_direct = c_from_orientation_algebra(a, b, s);
      const Multivector c_rule = s.c() * Multivector::bivector(axb);
      EXPECT_LE(max_abs_diff(c_direct, c_rule), 1e-15);
    }
  }
}

TEST(OutcomeIndependence, Examples) {
  const auto r = outcome_independence_check(kX, kY);
  EXPECT_TRUE(r.passed);
  for (double v : r.residuals) EXPECT_EQ(v, 0.0);

  const Direction b30(std::cos(std::numbers::pi / 6), std::sin(std::numbers::pi / 6), 0.0);
  EXPECT_TRUE(outcome_independence_check(kX, b30).passed);
  EXPECT_THROW(outcome_independence_check(kX, kX), DegenerateSettings);
}

TEST(OutcomeIndependence, RandomPairs) {
  DirectionSampler rng(14);
  for (int i = 0; i < 10'000; ++i) {
    const Direction a = rng.next(), b = rng.next();
    if (length(cross(a, b)) < kDegenerateCross) continue;
    const auto r = outcome_independence_check(a, b);
    EXPECT_TRUE(r.passed) << r.max_residual();
  }
}

TEST(Factorizability, Examples) {
  const auto r = factorizability_check(kX, kY, Orientation::plus());
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.residual, 0.0);
  EXPECT_EQ(JointObservable(kX, kY).value_at(Orientation::plus()), -kE12);
  EXPECT_EQ(JointObservable(kZ, kZ).value_at(Orientation::minus()), Multivector::scalar(-1.0));
}

TEST(EventReadout, DependsOnlyOnHandedness) {
  DirectionSampler rng(15);
  for (int i = 0; i < 1000; ++i) {
    const Direction n = rng.next();
    EXPECT_EQ(event_readout(n, Orientation::plus()), 1);
    EXPECT_EQ(event_readout(n, Orientation::minus()), -1);
    EXPECT_EQ(event_readout(n, Orientation::minus()), oracle::readout(-1, v3(n)));
  }
}

TEST(EventCorrelation, Enumeration) {
  const EnsembleMeasure rho;
  DirectionSampler rng(16);
  for (int i = 0; i < 100; ++i) {
    const Direction a = rng.next(), b = rng.next();
    EXPECT_EQ(event_level_correlation(a, b, rho), oracle::event_correlation(v3(a), v3(b)));
  }
  EXPECT_EQ(event_level_correlation(kX, kX, rho), 1.0);
  EXPECT_EQ(joint_expectation(kX, kX, rho).scalar_part(), -1.0);
}
