// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <json.hpp>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cliffbell/app.hpp"
#include "cliffbell/chsh.hpp"
#include "cliffbell/epr_model.hpp"
#include "cliffbell/malus.hpp"
#include "cliffbell/quantum.hpp"
#include "cliffbell/sampling.hpp"
#include "oracle/naive_cl3.hpp"

using namespace cliffbell;
using json = nlohmann::json;
using std::numbers::pi;
using std::numbers::sqrt2;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

DirectionSampler sampler(int criterion) { return DirectionSampler(derive_seed(kDefaultSeed, 100 + criterion)); }

double higher_grades(const Multivector& m) {
  return std::max({max_abs(m.grade(1)), max_abs(m.grade(2)), max_abs(m.grade(3))});
}

std::string cli(std::vector<std::string> args, int* code = nullptr) {
  std::ostringstream out, err;
  const int c = app::run(args, out, err);
  if (code) *code = c;
  if (c != 0 && !code) throw std::runtime_error("cliffbell " + args[0] + " exited " + std::to_string(c));
  return out.str();
}

const EnsembleMeasure kRho;
const unsigned kThreads = std::max(2u, std::thread::hardware_concurrency());

Outcome bivector_identity() {
  auto rng = sampler(1);
  double worst = 0;
  for (int i = 0; i < 100'000; ++i) {
    const Direction a = rng.next(), b = rng.next();
    for (Orientation mu : kOrientations) worst = std::max(worst, max_abs(bivector_identity_residual(a, b, mu)));
  }
  return {worst <= 1e-12, "max residual " + fmt(worst) + " over 1e5 pairs x 2 mu (limit 1e-12)"};
}

Outcome single_expectation() {
  auto rng = sampler(2);
  int nonzero = 0;
  for (int i = 0; i < 10'000; ++i) {
    const Direction n = rng.next();
    if (!(kRho.average([&](Orientation mu) { return observable(n, mu); }) == Multivector{})) ++nonzero;
  }
  return {nonzero == 0, std::to_string(nonzero) + " of 1e4 averages differ from the exact zero multivector"};
}

Outcome joint_expectation_check() {
  auto rng = sampler(3);
  double g0 = 0, hi = 0;
  int inexact_self = 0;
  for (int i = 0; i < 10'000; ++i) {
    const Direction a = rng.next(), b = rng.next();
    const Multivector e = joint_expectation(a, b, kRho);
    g0 = std::max(g0, std::abs(e.scalar_part() + dot(a, b)));
    hi = std::max(hi, higher_grades(e));
    // At a = b the value is -(a.a) with no rounding beyond that of a.a itself.
    if (!(joint_expectation(a, a, kRho) == Multivector::scalar(-dot(a, a)))) ++inexact_self;
  }
  int not_minus_one = 0;
  for (const Direction& n : {Direction(1, 0, 0), Direction(0, 1, 0), Direction(0, 0, 1), Direction(0.6, 0.8, 0),
                             Direction(0, -0.8, 0.6), Direction(-1, 0, 0)}) {
    if (!(joint_expectation(n, n, kRho) == Multivector::scalar(-1.0))) ++not_minus_one;
  }
  const bool ok = g0 <= 1e-12 && hi <= 1e-15 && inexact_self == 0 && not_minus_one == 0;
  return {ok, "grade-0 residual " + fmt(g0) + ", grades 1-3 " + fmt(hi) + ", E(n,n) != -1 at " +
                  std::to_string(not_minus_one) + " exact unit vectors, E(a,a) != -(a.a) for " +
                  std::to_string(inexact_self) + " of 1e4"};
}

Outcome commutator_relation() {
  auto rng = sampler(4);
  double worst = 0;
  for (int i = 0; i < 10'000; ++i) {
    const Direction a = rng.next(), b = rng.next();
    for (Orientation mu : kOrientations) worst = std::max(worst, max_abs(commutator_relation_residual(a, b, mu)));
  }
  return {worst <= 1e-12, "max residual " + fmt(worst) + " over 1e4 pairs x 2 mu (limit 1e-12)"};
}

Outcome parameter_independence() {
  auto rng = sampler(5);
  double full = 0, reduced = 0;
  int failed = 0;
  for (int i = 0; i < 10'000; ++i) {
    const Direction a = rng.next(), b = rng.next(), bp = rng.next();
    const Orientation mu = rng.coin() ? Orientation::plus() : Orientation::minus();
    const auto r = parameter_independence_check(a, b, bp, mu);
    if (!r.passed) ++failed;
    full = std::max({full, r.equality_residual, r.reconstruction_residual});
    reduced = std::max({reduced, r.reduced_residual_b, r.reduced_residual_b_prime});
  }
  return {failed == 0 && full <= 1e-12 && reduced <= 1e-12,
          "equality residual " + fmt(full) + ", reduced identity " + fmt(reduced) + " over 1e4 draws"};
}

Outcome outcome_independence() {
  auto rng = sampler(6);
  double worst = 0;
  int drawn = 0;
  while (drawn < 10'000) {
    const Direction a = rng.next(), b = rng.next();
    if (length(cross(a, b)) < 1e-6) continue;
    ++drawn;
    worst = std::max(worst, outcome_independence_check(a, b).max_residual());
  }
  return {worst <= 1e-12, "max residual over 4 sign cases " + fmt(worst) + ", 1e4 pairs"};
}

Outcome seevinck() {
  auto rng = sampler(7);
  double per = 0, avg = 0;
  for (int i = 0; i < 10'000; ++i) {
    const ChshConfig cfg{rng.next(), rng.next(), rng.next(), rng.next()};
    for (Orientation mu : kOrientations) {
      per = std::max(per, max_abs_diff(seevinck_product(cfg, mu), seevinck_closed_form(cfg, mu)));
    }
    avg = std::max(avg, std::abs(seevinck_average(cfg, kRho).scalar_part() + 4.0 * seevinck_model_dot(cfg)));
  }
  return {per <= 1e-12 && avg <= 1e-12,
          "per-microstate residual " + fmt(per) + ", averaged grade-0 residual " + fmt(avg) + ", 1e4 configs"};
}

std::vector<SweepRow> one_degree_sweep() {
  static const auto rows = chsh_sweep(Plane::xy, pi / 180, kRho, {}, kThreads);
  return rows;
}

Outcome chsh_extremum() {
  const auto rows = one_degree_sweep();
  const auto s = summarize(rows);
  const SweepRow& best = rows[s.argmax_row];
  const long b = std::lround(best.b_angle * 180 / pi), bp = std::lround(best.b_prime_angle * 180 / pi);
  const bool canonical_site = (b == 45 && bp == 315) || (b == 225 && bp == 135);
  const ChshConfig cfg = planar_config(Plane::xy, 0.0, pi / 2, pi / 4, 7 * pi / 4);
  const double mb = model_bound(cfg), qb = qm_chsh_bound(cfg).bound;
  const double at_site = std::abs(chsh_value(cfg, kRho));
  const bool ok = std::abs(s.max_abs_chsh - 2 * sqrt2) <= 1e-9 && canonical_site &&
                  std::abs(at_site - s.max_abs_chsh) <= 1e-12 && std::abs(mb - 2 * sqrt2) <= 1e-12 &&
                  std::abs(qb - 2 * sqrt2) <= 1e-12;
  char buf[200];
  std::snprintf(buf, sizeof buf, "max |CHSH| %.10f at (0, 90, %ld, %ld) deg; model bound %.10f, quantum bound %.10f",
                s.max_abs_chsh, b, bp, mb, qb);
  return {ok, buf};
}

Outcome quantum_oracle() {
  auto rng = sampler(9);
  double joint = 0, square = 0, b2 = 0, grid = 0;
  for (int i = 0; i < 10'000; ++i) {
    const Direction a = rng.next(), b = rng.next();
    joint = std::max(joint, std::abs(singlet_expectation(tensor(pauli_projection(a), pauli_projection(b))) + dot(a, b)));
  }
  for (int i = 0; i < 1000; ++i) {
    const ChshConfig cfg{rng.next(), rng.next(), rng.next(), rng.next()};
    square = std::max(square, bell_operator_squared_check(cfg).residual);
    const QmBound q = qm_chsh_bound(cfg);
    b2 = std::max(b2, std::abs(q.b_squared - (4.0 - 4.0 * seevinck_qm_dot(cfg))));
  }
  for (const auto& row : one_degree_sweep()) {
    const ChshConfig cfg = planar_config(Plane::xy, row.a_angle, row.a_prime_angle, row.b_angle, row.b_prime_angle);
    grid = std::max(grid, std::abs(row.report.chsh_value - singlet_expectation(bell_operator(cfg))));
  }
  const bool ok = joint <= 1e-12 && square <= 1e-12 && b2 <= 1e-10 && grid <= 1e-12;
  return {ok, "singlet " + fmt(joint) + ", B^2 identity " + fmt(square) + ", <B^2> " + fmt(b2) +
                  ", model vs quantum CHSH on 129600 grid rows " + fmt(grid)};
}

Outcome malus() {
  auto rng = sampler(10);
  double worst = 0;
  for (int i = 0; i < 10'000; ++i) {
    const Direction a = rng.next(), p = rng.next();
    for (int s : {1, -1}) {
      worst = std::max(worst, std::abs(malus_expectation(a, Preparation(p, s), kRho).scalar_part() - dot(a, p)));
    }
  }
  const Direction p(1, 0, 0);
  const std::vector<Direction> chain{planar_direction(Plane::xy, pi / 4), planar_direction(Plane::xy, pi / 2)};
  const auto steps = sequential_chain(chain, Preparation(p), kRho);
  const double chain_err = std::max(std::abs(steps[0] - sqrt2 / 2), std::abs(steps[1] - sqrt2 / 2));
  return {worst <= 1e-12 && chain_err <= 1e-12,
          "grade-0 residual " + fmt(worst) + " over 1e4 pairs x 2 spins; 45/45 chain error " + fmt(chain_err)};
}

oracle::V3 planar(double t) { return {std::cos(t), std::sin(t), 0.0}; }

Outcome discrepancy_report() {
  const std::vector<std::string> sweep{"chsh-sweep", "--step", "15deg"};
  const std::vector<std::string> events{"event-diag", "--step", "5deg"};
  const std::string s1 = cli(sweep), s2 = cli(sweep), e1 = cli(events), e2 = cli(events);
  const bool identical = s1 == s2 && e1 == e2;

  double residual_gap = 0;
  for (const auto& row : json::parse(s1)["rows"]) {
    const auto& ang = row["angles"];
    const oracle::Settings st{planar(ang["a"]), planar(ang["a_prime"]), planar(ang["b"]), planar(ang["b_prime"])};
    const oracle::MV expect = oracle::decomposition_residual(st);
    for (int k = 0; k < 8; ++k) residual_gap = std::max(residual_gap, std::abs(row["residual"][k].get<double>() - expect[k]));
  }
  double event_gap = 0, algebra_gap = 0;
  const oracle::V3 a = planar(0.0);
  for (const auto& row : json::parse(e1)["rows"]) {
    const oracle::V3 b = planar(row["theta"]);
    event_gap = std::max(event_gap, std::abs(row["event"].get<double>() - oracle::event_correlation(a, b)));
    const oracle::MV joint = oracle::average(
        [&](int mu) { return oracle::model_mul(mu, oracle::observable(mu, a), oracle::observable(mu, b)); });
    algebra_gap = std::max(algebra_gap, std::abs(row["algebra"].get<double>() - joint[0]));
  }
  const bool ok = identical && residual_gap <= 1e-12 && event_gap == 0.0 && algebra_gap <= 1e-12;
  return {ok, std::string(identical ? "reruns bit-identical" : "reruns DIFFER") + "; oracle gap: residual " +
                  fmt(residual_gap) + ", event " + fmt(event_gap) + ", algebra " + fmt(algebra_gap)};
}

Outcome determinism() {
  const std::vector<std::vector<std::string>> commands{
      {"verify"},
      {"chsh-sweep", "--step", "5deg"},
      {"quantum-compare", "--step", "10deg"},
      {"malus", "--chain", "10deg,35deg,80deg,45deg"},
      {"event-diag", "--step", "1deg"},
  };
  int differing = 0, runs = 0;
  for (const auto& base : commands) {
    for (const char* format : {"json", "csv"}) {
      std::string first;
      for (const char* threads : {"1", "1", "4", "7"}) {
        auto args = base;
        args.insert(args.end(), {"--format", format, "--threads", threads});
        const std::string out = cli(args);
        ++runs;
        if (first.empty()) first = out;
        else if (out != first) ++differing;
      }
    }
  }
  return {differing == 0, std::to_string(runs) + " runs across 5 commands, 2 formats, 1/4/7 threads; " +
                              std::to_string(differing) + " differed"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"bivector identity", bivector_identity},
      {"single-observable expectation", single_expectation},
      {"joint expectation", joint_expectation_check},
      {"commutator relation", commutator_relation},
      {"parameter independence", parameter_independence},
      {"outcome independence", outcome_independence},
      {"commutator-product identities", seevinck},
      {"CHSH extremum", chsh_extremum},
      {"quantum oracle", quantum_oracle},
      {"Malus law", malus},
      {"discrepancy report vs oracle", discrepancy_report},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  criterion %2zu  %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
