#pragma once

// Dense arithmetic for the real Clifford algebra Cl(3,0).
//
// A multivector stores eight coefficients over the blade basis
//
//     [1, e1, e2, e3, e23, e31, e12, e123]
//
// The bivectors use the cyclic order {e23, e31, e12}, so the dual I*n of a
// vector n has bivector coefficients equal to (n.x, n.y, n.z).

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>

namespace cliffbell {

inline constexpr std::size_t kBladeCount = 8;
inline constexpr double kDefaultTolerance = 1e-12;

enum class Blade : std::uint8_t { scalar, e1, e2, e3, e23, e31, e12, e123 };

constexpr std::size_t index_of(Blade b) { return static_cast<std::size_t>(b); }

constexpr int blade_grade(Blade b) {
  switch (b) {
    case Blade::scalar: return 0;
    case Blade::e1:
    case Blade::e2:
    case Blade::e3: return 1;
    case Blade::e23:
    case Blade::e31:
    case Blade::e12: return 2;
    case Blade::e123: return 3;
  }
  return -1;
}

const char* blade_name(Blade b);

/// Thrown when an inverse is requested for an element that has none.
class NotInvertible : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown for direction inputs that are too far from unit length.
class InvalidDirection : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Plain Euclidean 3-vector. Used for cross products and for the
/// generally non-unit vectors that appear in the identities.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

/// Right-handed cross product.
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double length(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Unit 3-vector. Construction renormalizes inputs within 1e-9 of unit
/// length and rejects anything further off.
class Direction {
 public:
  static constexpr double kUnitSlack = 1e-9;

  Direction(double x, double y, double z);
  explicit Direction(const Vec3& v) : Direction(v.x, v.y, v.z) {}

  /// Normalizes an arbitrary nonzero vector.
  static Direction normalized(const Vec3& v);

  constexpr double x() const { return v_.x; }
  constexpr double y() const { return v_.y; }
  constexpr double z() const { return v_.z; }
  constexpr const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }  // NOLINT(google-explicit-constructor)

  Direction operator-() const { return Direction(Raw{}, -v_); }
  bool operator==(const Direction&) const = default;

 private:
  struct Raw {};
  Direction(Raw, const Vec3& v) : v_(v) {}
  Vec3 v_;
};

struct Tolerance {
  double eps = kDefaultTolerance;

  constexpr Tolerance() = default;
  constexpr explicit Tolerance(double e) : eps(e) {
    if (!(e >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
  }
};

class Multivector {
 public:
  using Coeffs = std::array<double, kBladeCount>;

  constexpr Multivector() : c_{} {}
  constexpr explicit Multivector(const Coeffs& c) : c_(c) {}

  static constexpr Multivector scalar(double s) {
    Multivector m;
    m.c_[0] = s;
    return m;
  }
  static constexpr Multivector blade(Blade b, double value = 1.0) {
    Multivector m;
    m.c_[index_of(b)] = value;
    return m;
  }
  static constexpr Multivector vector(const Vec3& v) {
    return Multivector(Coeffs{0.0, v.x, v.y, v.z, 0.0, 0.0, 0.0, 0.0});
  }
  /// Bivector with coefficients (e23, e31, e12) = (v.x, v.y, v.z), i.e. I*v.
  static constexpr Multivector bivector(const Vec3& v) {
    return Multivector(Coeffs{0.0, 0.0, 0.0, 0.0, v.x, v.y, v.z, 0.0});
  }
  static constexpr Multivector pseudoscalar(double s = 1.0) { return blade(Blade::e123, s); }

  constexpr double operator[](Blade b) const { return c_[index_of(b)]; }
  constexpr double& operator[](Blade b) { return c_[index_of(b)]; }
  constexpr double operator[](std::size_t i) const { return c_[i]; }
  constexpr double& operator[](std::size_t i) { return c_[i]; }

  constexpr const Coeffs& coeffs() const { return c_; }
  std::span<const double, kBladeCount> span() const { return c_; }

  constexpr double scalar_part() const { return c_[0]; }
  constexpr Vec3 vector_part() const { return {c_[1], c_[2], c_[3]}; }
  /// Bivector coefficients read back as the vector v with part == I*v.
  constexpr Vec3 bivector_part() const { return {c_[4], c_[5], c_[6]}; }
  constexpr double pseudoscalar_part() const { return c_[7]; }

  /// Keeps only the grade-k coefficients. Throws std::out_of_range for k
  /// outside 0..3.
  Multivector grade(int k) const;

  /// Reversion: flips the sign of grades 2 and 3.
  constexpr Multivector reverse() const {
    Multivector r = *this;
    for (std::size_t i = 4; i < kBladeCount; ++i) r.c_[i] = -r.c_[i];
    return r;
  }

  constexpr Multivector& operator+=(const Multivector& o) {
    for (std::size_t i = 0; i < kBladeCount; ++i) c_[i] += o.c_[i];
    return *this;
  }
  constexpr Multivector& operator-=(const Multivector& o) {
    for (std::size_t i = 0; i < kBladeCount; ++i) c_[i] -= o.c_[i];
    return *this;
  }
  constexpr Multivector& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Multivector& operator*=(const Multivector& o);

  constexpr bool operator==(const Multivector&) const = default;

 private:
  Coeffs c_;
};

constexpr Multivector operator+(Multivector a, const Multivector& b) { return a += b; }
constexpr Multivector operator-(Multivector a, const Multivector& b) { return a -= b; }
constexpr Multivector operator-(Multivector a) { return a *= -1.0; }
constexpr Multivector operator*(Multivector a, double s) { return a *= s; }
constexpr Multivector operator*(double s, Multivector a) { return a *= s; }

/// The geometric product, via the precomputed structure-constant table.
Multivector geometric_product(const Multivector& x, const Multivector& y);
inline Multivector operator*(const Multivector& x, const Multivector& y) {
  return geometric_product(x, y);
}

/// x*y - y*x
Multivector commutator(const Multivector& x, const Multivector& y);

/// The unit bivector I*n.
constexpr Multivector dual(const Direction& n) { return Multivector::bivector(n.vec()); }

/// Inverse of a versor (or unit bivector): reverse(x) / (x * reverse(x)).
/// Throws NotInvertible when the norm is at or below tol, or when
/// x * reverse(x) is not a scalar (x is not a versor).
Multivector versor_inverse(const Multivector& x, Tolerance tol = {});

/// Euclidean norm of the coefficient vector.
double norm(const Multivector& x);

/// Largest coefficient magnitude of x - y.
double max_abs_diff(const Multivector& x, const Multivector& y);
inline double max_abs(const Multivector& x) { return max_abs_diff(x, Multivector{}); }

bool approx_eq(const Multivector& x, const Multivector& y, Tolerance tol = {});

std::ostream& operator<<(std::ostream& os, const Multivector& m);
std::ostream& operator<<(std::ostream& os, const Vec3& v);

namespace detail {

struct TableEntry {
  std::int8_t sign;
  std::uint8_t index;
};

using ProductTable = std::array<std::array<TableEntry, kBladeCount>, kBladeCount>;

/// blade_i * blade_j = sign * blade_index, for the basis order above.
const ProductTable& product_table();

}  // namespace detail

}  // namespace cliffbell
