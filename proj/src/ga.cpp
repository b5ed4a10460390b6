#include "cliffbell/ga.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <string>

namespace cliffbell {

namespace {

// Each basis blade written as sign * (canonical ascending product of
// generators), the generators encoded as bits {e1 = 1, e2 = 2, e3 = 4}.
struct CanonicalBlade {
  unsigned mask;
  int sign;
};

constexpr std::array<CanonicalBlade, kBladeCount> kCanonical{{
    {0b000, +1},  // 1
    {0b001, +1},  // e1
    {0b010, +1},  // e2
    {0b100, +1},  // e3
    {0b110, +1},  // e23 = e2 e3
    {0b101, -1},  // e31 = e3 e1 = -e1 e3
    {0b011, +1},  // e12 = e1 e2
    {0b111, +1},  // e123
}};

// Sign from reordering the generator product a*b into ascending order. All
// generators square to +1.
constexpr int reorder_sign(unsigned a, unsigned b) {
  int swaps = 0;
  for (unsigned t = a >> 1; t != 0; t >>= 1) swaps += std::popcount(t & b);
  return (swaps % 2 == 0) ? 1 : -1;
}

constexpr detail::ProductTable build_table() {
  detail::ProductTable table{};
  for (std::size_t i = 0; i < kBladeCount; ++i) {
    for (std::size_t j = 0; j < kBladeCount; ++j) {
      const unsigned mask = kCanonical[i].mask ^ kCanonical[j].mask;
      std::size_t k = 0;
      while (kCanonical[k].mask != mask) ++k;
      const int sign = kCanonical[i].sign * kCanonical[j].sign *
                       reorder_sign(kCanonical[i].mask, kCanonical[j].mask) * kCanonical[k].sign;
      table[i][j] = {static_cast<std::int8_t>(sign), static_cast<std::uint8_t>(k)};
    }
  }
  return table;
}

constexpr detail::ProductTable kTable = build_table();

static_assert(kTable[1][2].index == index_of(Blade::e12) && kTable[1][2].sign == 1);
static_assert(kTable[7][7].index == 0 && kTable[7][7].sign == -1);
static_assert(kTable[4][5].index == index_of(Blade::e12) && kTable[4][5].sign == -1);

}  // namespace

const detail::ProductTable& detail::product_table() { return kTable; }

const char* blade_name(Blade b) {
  static constexpr std::array<const char*, kBladeCount> names{"1",   "e1",  "e2",  "e3",
                                                              "e23", "e31", "e12", "e123"};
  return names[index_of(b)];
}

Direction::Direction(double x, double y, double z) {
  const Vec3 v{x, y, z};
  const double len = length(v);
  if (!std::isfinite(len) || std::abs(len - 1.0) > kUnitSlack) {
    throw InvalidDirection("direction is not unit length (|n| = " + std::to_string(len) + ")");
  }
  v_ = v * (1.0 / len);
}

Direction Direction::normalized(const Vec3& v) {
  const double len = length(v);
  if (!std::isfinite(len) || len == 0.0) throw InvalidDirection("cannot normalize a zero vector");
  return Direction(Raw{}, v * (1.0 / len));
}

Multivector Multivector::grade(int k) const {
  if (k < 0 || k > 3) throw std::out_of_range("grade index must be in 0..3");
  Multivector out;
  for (std::size_t i = 0; i < kBladeCount; ++i) {
    if (blade_grade(static_cast<Blade>(i)) == k) out.c_[i] = c_[i];
  }
  return out;
}

Multivector& Multivector::operator*=(const Multivector& o) { return *this = geometric_product(*this, o); }

Multivector geometric_product(const Multivector& x, const Multivector& y) {
  Multivector out;
  for (std::size_t i = 0; i < kBladeCount; ++i) {
    const double xi = x[i];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < kBladeCount; ++j) {
      const auto e = kTable[i][j];
      out[e.index] += e.sign * xi * y[j];
    }
  }
  return out;
}

Multivector commutator(const Multivector& x, const Multivector& y) {
  return geometric_product(x, y) - geometric_product(y, x);
}

Multivector versor_inverse(const Multivector& x, Tolerance tol) {
  const double n = norm(x);
  if (!(n > tol.eps)) throw NotInvertible("multivector norm is below tolerance");
  const Multivector rev = x.reverse();
  const Multivector xx = geometric_product(x, rev);
  const double s = xx.scalar_part();
  // Non-scalar remainder in x * reverse(x) means x is not a versor.
  if (max_abs(xx - Multivector::scalar(s)) > std::max(tol.eps, 1e-12) * std::abs(s) || s == 0.0) {
    throw NotInvertible("multivector is not a versor");
  }
  return rev * (1.0 / s);
}

double norm(const Multivector& x) {
  double sum = 0.0;
  for (double v : x.coeffs()) sum += v * v;
  return std::sqrt(sum);
}

double max_abs_diff(const Multivector& x, const Multivector& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < kBladeCount; ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

bool approx_eq(const Multivector& x, const Multivector& y, Tolerance tol) {
  for (std::size_t i = 0; i < kBladeCount; ++i) {
    if (!(std::abs(x[i] - y[i]) <= tol.eps)) return false;
  }
  return true;
}

std::ostream& operator<<(std::ostream& os, const Multivector& m) {
  bool first = true;
  for (std::size_t i = 0; i < kBladeCount; ++i) {
    if (m[i] == 0.0) continue;
    if (!first) os << " + ";
    os << m[i];
    if (i != 0) os << "*" << blade_name(static_cast<Blade>(i));
    first = false;
  }
  if (first) os << "0";
  return os;
}

std::ostream& operator<<(std::ostream& os, const Vec3& v) {
  return os << "(" << v.x << ", " << v.y << ", " << v.z << ")";
}

}  // namespace cliffbell
