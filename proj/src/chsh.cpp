#include "cliffbell/chsh.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "cliffbell/parallel.hpp"

namespace cliffbell {

namespace {

struct Observables {
  Multivector a, a_prime, b, b_prime;
};

Observables observables(const ChshConfig& cfg, Orientation mu) {
  return {observable(cfg.a, mu), observable(cfg.a_prime, mu), observable(cfg.b, mu),
          observable(cfg.b_prime, mu)};
}

}  // namespace

std::string_view to_string(Plane p) {
  switch (p) {
    case Plane::xy: return "xy";
    case Plane::yz: return "yz";
    case Plane::zx: return "zx";
  }
  return "?";
}

Plane parse_plane(std::string_view name) {
  if (name == "xy") return Plane::xy;
  if (name == "yz") return Plane::yz;
  if (name == "zx") return Plane::zx;
  throw std::invalid_argument("unknown plane '" + std::string(name) + "' (expected xy, yz, zx)");
}

Direction planar_direction(Plane plane, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  switch (plane) {
    case Plane::xy: return Direction::normalized({c, s, 0.0});
    case Plane::yz: return Direction::normalized({0.0, c, s});
    case Plane::zx: return Direction::normalized({s, 0.0, c});
  }
  throw std::invalid_argument("unknown plane");
}

ChshConfig planar_config(Plane plane, double b_angle, double b_prime_angle) {
  return planar_config(plane, 0.0, std::numbers::pi / 2, b_angle, b_prime_angle);
}

ChshConfig planar_config(Plane plane, double a_angle, double a_prime_angle, double b_angle,
                         double b_prime_angle) {
  return {planar_direction(plane, a_angle), planar_direction(plane, a_prime_angle),
          planar_direction(plane, b_angle), planar_direction(plane, b_prime_angle)};
}

Multivector f_cv(const ChshConfig& cfg, Orientation mu) {
  const auto o = observables(cfg, mu);
  return model_product(o.a, o.b + o.b_prime, mu) + model_product(o.a_prime, o.b - o.b_prime, mu);
}

double chsh_value(const ChshConfig& cfg, const EnsembleMeasure& rho) {
  return rho.average([&](Orientation mu) { return f_cv(cfg, mu); }).scalar_part();
}

double chsh_closed_form(const ChshConfig& cfg) {
  return -dot(cfg.a, cfg.b) - dot(cfg.a, cfg.b_prime) - dot(cfg.a_prime, cfg.b) +
         dot(cfg.a_prime, cfg.b_prime);
}

Multivector f_squared_exact(const ChshConfig& cfg, Orientation mu) {
  const Multivector f = f_cv(cfg, mu);
  return model_product(f, f, mu);
}

Multivector f_squared_paper_decomposition(const ChshConfig& cfg, Orientation mu) {
  return Multivector::scalar(4.0) + seevinck_product(cfg, mu);
}

Multivector decomposition_residual(const ChshConfig& cfg, const EnsembleMeasure& rho) {
  const Multivector exact = rho.average([&](Orientation mu) { return f_squared_exact(cfg, mu); });
  const Multivector decomposed =
      rho.average([&](Orientation mu) { return f_squared_paper_decomposition(cfg, mu); });
  return exact - decomposed;
}

Multivector cross_commutator(const Direction& n, const Direction& n_prime, Orientation mu) {
  return model_commutator(observable(n, mu), observable(n_prime, mu), mu);
}

Multivector seevinck_product(const ChshConfig& cfg, Orientation mu) {
  const auto o = observables(cfg, mu);
  return model_product(model_commutator(o.a, o.a_prime, mu), model_commutator(o.b_prime, o.b, mu),
                       mu);
}

Multivector seevinck_closed_form(const ChshConfig& cfg, Orientation mu) {
  return 4.0 * model_product(orientation_times(mu, cross(cfg.a, cfg.a_prime)),
                             orientation_times(mu, cross(cfg.b_prime, cfg.b)), mu);
}

Multivector seevinck_average(const ChshConfig& cfg, const EnsembleMeasure& rho) {
  return rho.average([&](Orientation mu) { return seevinck_product(cfg, mu); });
}

double seevinck_model_dot(const ChshConfig& cfg) {
  return dot(cross(cfg.a, cfg.a_prime), cross(cfg.b_prime, cfg.b));
}

double seevinck_qm_dot(const ChshConfig& cfg) {
  return dot(cross(cfg.a, cfg.a_prime), cross(cfg.b, cfg.b_prime));
}

double model_bound(const ChshConfig& cfg) {
  return std::sqrt(4.0 + 4.0 * std::abs(seevinck_model_dot(cfg)));
}

VarianceCheck variance_inequality_check(const ChshConfig& cfg, const EnsembleMeasure& rho,
                                        Tolerance tol) {
  VarianceCheck out;
  const double mean = chsh_value(cfg, rho);
  out.mean_squared = mean * mean;
  out.second_moment =
      rho.average([&](Orientation mu) { return f_squared_exact(cfg, mu); }).scalar_part();
  out.decomposed_second_moment =
      rho.average([&](Orientation mu) { return f_squared_paper_decomposition(cfg, mu); })
          .scalar_part();
  out.holds = out.mean_squared <= out.second_moment + tol.eps;
  return out;
}

ChshReport make_report(const ChshConfig& cfg, const EnsembleMeasure& rho, Tolerance tol) {
  ChshReport r;
  r.f_avg = rho.average([&](Orientation mu) { return f_cv(cfg, mu); });
  r.chsh_value = r.f_avg.scalar_part();
  r.model_bound = model_bound(cfg);
  r.f_squared_exact_avg = rho.average([&](Orientation mu) { return f_squared_exact(cfg, mu); });
  const Multivector decomposed_avg =
      rho.average([&](Orientation mu) { return f_squared_paper_decomposition(cfg, mu); });
  r.f_squared_paper_avg = decomposed_avg.scalar_part();
  r.decomposition_residual = r.f_squared_exact_avg - decomposed_avg;

  const std::array<std::pair<const Direction*, const Direction*>, 4> pairs{{
      {&cfg.a, &cfg.b},
      {&cfg.a, &cfg.b_prime},
      {&cfg.a_prime, &cfg.b},
      {&cfg.a_prime, &cfg.b_prime},
  }};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [n, n_prime] = pairs[i];
    r.cross_commutator_norms[i] = norm(cross_commutator(*n, *n_prime, Orientation::plus()));
    r.cross_commutator_avg_norms[i] =
        norm(rho.average([&](Orientation mu) { return cross_commutator(*n, *n_prime, mu); }));
  }

  r.variance_lhs = r.chsh_value * r.chsh_value;
  r.variance_rhs = r.f_squared_exact_avg.scalar_part();
  r.variance_check = r.variance_lhs <= r.variance_rhs + tol.eps;
  r.seevinck_model_dot = seevinck_model_dot(cfg);
  r.seevinck_qm_dot = seevinck_qm_dot(cfg);
  return r;
}

std::size_t grid_points(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("sweep step must be positive");
  }
  if (step > std::numbers::pi + 1e-12) {
    throw std::invalid_argument("sweep step must not exceed pi");
  }
  return static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / step - 1e-9));
}

std::vector<SweepRow> chsh_sweep(Plane plane, double step, const EnsembleMeasure& rho,
                                 Tolerance tol, unsigned threads) {
  const std::size_t n = grid_points(step);
  std::vector<SweepRow> rows(n * n);
  detail::parallel_for(rows.size(), threads, [&](std::size_t idx) {
    SweepRow& row = rows[idx];
    row.a_angle = 0.0;
    row.a_prime_angle = std::numbers::pi / 2;
    row.b_angle = static_cast<double>(idx / n) * step;
    row.b_prime_angle = static_cast<double>(idx % n) * step;
    row.report = make_report(planar_config(plane, row.b_angle, row.b_prime_angle), rho, tol);
  });
  return rows;
}

SweepSummary summarize(const std::vector<SweepRow>& rows) {
  SweepSummary s;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double v = std::abs(rows[i].report.chsh_value);
    if (v > s.max_abs_chsh) {
      s.max_abs_chsh = v;
      s.argmax_row = i;
    }
  }
  return s;
}

}  // namespace cliffbell
