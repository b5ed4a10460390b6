#pragma once

// Two-qubit reference: Pauli projections, Kronecker products, the singlet
// state and the Bell operator.
//
// Conventions: qubit 1 is the left tensor factor, |0> is the +1
// eigenvector of sigma_z, and amplitudes are ordered |00>, |01>, |10>, |11>.

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "cliffbell/chsh.hpp"
#include "cliffbell/ga.hpp"

namespace cliffbell {

using Complex = std::complex<double>;

class NotHermitian : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Dense row-major complex matrix.
class ComplexMatrix {
 public:
  ComplexMatrix() = default;
  ComplexMatrix(std::size_t rows, std::size_t cols);
  /// Throws std::invalid_argument when entries.size() != rows * cols.
  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries);

  static ComplexMatrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const std::vector<Complex>& entries() const { return data_; }

  Complex& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const Complex& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  ComplexMatrix adjoint() const;
  Complex trace() const;

  ComplexMatrix& operator+=(const ComplexMatrix& o);
  ComplexMatrix& operator-=(const ComplexMatrix& o);
  ComplexMatrix& operator*=(Complex s);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Complex> data_;
};

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b);
ComplexMatrix operator*(ComplexMatrix a, Complex s);
ComplexMatrix operator*(Complex s, ComplexMatrix a);
/// Throws std::invalid_argument on mismatched inner dimensions.
ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b);

/// Largest entry magnitude of a - b. Throws on shape mismatch.
double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b);

bool is_hermitian(const ComplexMatrix& m, double tol);

/// Kronecker product; block (i, j) of the result is x(i, j) * y.
ComplexMatrix tensor(const ComplexMatrix& x, const ComplexMatrix& y);

const ComplexMatrix& pauli_x();
const ComplexMatrix& pauli_y();
const ComplexMatrix& pauli_z();

/// v.x sigma_x + v.y sigma_y + v.z sigma_z; extends linearly to non-unit v.
ComplexMatrix pauli_linear(const Vec3& v);
inline ComplexMatrix pauli_projection(const Direction& n) { return pauli_linear(n.vec()); }

class StateVector {
 public:
  static constexpr double kUnitSlack = 1e-12;

  /// Throws std::invalid_argument unless the norm is 1 within 1e-12.
  explicit StateVector(const std::array<Complex, 4>& amplitudes);

  const std::array<Complex, 4>& amplitudes() const { return amp_; }
  const Complex& operator[](std::size_t i) const { return amp_[i]; }

 private:
  std::array<Complex, 4> amp_;
};

/// (|01> - |10>) / sqrt(2)
const StateVector& singlet();

/// op |psi> for a 4x4 operator.
std::array<Complex, 4> apply(const ComplexMatrix& op, const StateVector& psi);

/// <singlet| op |singlet>. Throws NotHermitian when op is not Hermitian
/// within 1e-10, and std::logic_error if the imaginary part exceeds 1e-12.
double singlet_expectation(const ComplexMatrix& op);

/// sigma.a (x) sigma.b + sigma.a (x) sigma.b' + sigma.a' (x) sigma.b - sigma.a' (x) sigma.b'
ComplexMatrix bell_operator(const ChshConfig& cfg);

/// 4 1 + 4 sigma.(a x a') (x) sigma.(b x b')
ComplexMatrix bell_square_closed_form(const ChshConfig& cfg);

struct MatrixCheck {
  bool passed = false;
  double residual = 0;
};

/// max |B^2 - closed form| <= tol
MatrixCheck bell_operator_squared_check(const ChshConfig& cfg, Tolerance tol = {});

struct QmBound {
  double bound = 0;             // sqrt(4 + 4 |(a x a') . (b x b')|)
  double bell_expectation = 0;  // <B>
  double b_squared = 0;         // <B^2> by matrix arithmetic
  double b_squared_closed_form = 0;  // 4 - 4 (a x a') . (b x b')
  bool consistent = false;      // |b_squared - closed form| <= 1e-10
};

QmBound qm_chsh_bound(const ChshConfig& cfg);

/// Single-qubit state with spin s = +/-1 along p (eigenvector of sigma.p).
std::array<Complex, 2> spin_state(const Direction& p, int s);

/// <psi| op |psi> for a 2x2 Hermitian op.
double expectation(const ComplexMatrix& op, const std::array<Complex, 2>& psi);

std::ostream& operator<<(std::ostream& os, const ComplexMatrix& m);

}  // namespace cliffbell
