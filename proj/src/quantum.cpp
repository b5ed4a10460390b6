#include "cliffbell/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

namespace cliffbell {

namespace {

void require_same_shape(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("matrix shapes differ");
  }
}

const Complex kI{0.0, 1.0};

}  // namespace

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Complex> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) throw std::invalid_argument("entry count does not match shape");
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  }
  return out;
}

Complex ComplexMatrix::trace() const {
  Complex t = 0.0;
  for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
  return t;
}

ComplexMatrix& ComplexMatrix::operator+=(const ComplexMatrix& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator-=(const ComplexMatrix& o) {
  require_same_shape(*this, o);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

ComplexMatrix& ComplexMatrix::operator*=(Complex s) {
  for (auto& v : data_) v *= s;
  return *this;
}

ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
ComplexMatrix operator*(ComplexMatrix a, Complex s) { return a *= s; }
ComplexMatrix operator*(Complex s, ComplexMatrix a) { return a *= s; }

ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("inner dimensions differ");
  ComplexMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Complex aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
  require_same_shape(a, b);
  double m = 0.0;
  for (std::size_t i = 0; i < a.entries().size(); ++i) {
    m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
  }
  return m;
}

bool is_hermitian(const ComplexMatrix& m, double tol) {
  return m.rows() == m.cols() && max_abs_diff(m, m.adjoint()) <= tol;
}

ComplexMatrix tensor(const ComplexMatrix& x, const ComplexMatrix& y) {
  const std::size_t rows = x.rows() * y.rows();
  const std::size_t cols = x.cols() * y.cols();
  if ((x.rows() != 0 && rows / x.rows() != y.rows()) ||
      (x.cols() != 0 && cols / x.cols() != y.cols())) {
    throw std::overflow_error("tensor product dimensions overflow");
  }
  ComplexMatrix out(rows, cols);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      for (std::size_t k = 0; k < y.rows(); ++k) {
        for (std::size_t l = 0; l < y.cols(); ++l) {
          out(i * y.rows() + k, j * y.cols() + l) = x(i, j) * y(k, l);
        }
      }
    }
  }
  return out;
}

const ComplexMatrix& pauli_x() {
  static const ComplexMatrix m(2, 2, {0.0, 1.0, 1.0, 0.0});
  return m;
}

const ComplexMatrix& pauli_y() {
  static const ComplexMatrix m(2, 2, {0.0, -kI, kI, 0.0});
  return m;
}

const ComplexMatrix& pauli_z() {
  static const ComplexMatrix m(2, 2, {1.0, 0.0, 0.0, -1.0});
  return m;
}

ComplexMatrix pauli_linear(const Vec3& v) {
  return ComplexMatrix(2, 2, {v.z, Complex(v.x, -v.y), Complex(v.x, v.y), -v.z});
}

StateVector::StateVector(const std::array<Complex, 4>& amplitudes) : amp_(amplitudes) {
  double n2 = 0.0;
  for (const auto& a : amp_) n2 += std::norm(a);
  if (std::abs(std::sqrt(n2) - 1.0) > kUnitSlack) {
    throw std::invalid_argument("state vector is not normalized");
  }
}

const StateVector& singlet() {
  static const StateVector psi({0.0, std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2, 0.0});
  return psi;
}

std::array<Complex, 4> apply(const ComplexMatrix& op, const StateVector& psi) {
  if (op.rows() != 4 || op.cols() != 4) throw std::invalid_argument("operator must be 4x4");
  std::array<Complex, 4> out{};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) out[r] += op(r, c) * psi[c];
  }
  return out;
}

double singlet_expectation(const ComplexMatrix& op) {
  if (!is_hermitian(op, 1e-10)) throw NotHermitian("operator is not Hermitian");
  const auto& psi = singlet();
  const auto phi = apply(op, psi);
  Complex e = 0.0;
  for (std::size_t i = 0; i < 4; ++i) e += std::conj(psi[i]) * phi[i];
  if (std::abs(e.imag()) > 1e-12) throw std::logic_error("expectation has an imaginary part");
  return e.real();
}

ComplexMatrix bell_operator(const ChshConfig& cfg) {
  const auto sa = pauli_projection(cfg.a);
  const auto sa_p = pauli_projection(cfg.a_prime);
  const auto sb = pauli_projection(cfg.b);
  const auto sb_p = pauli_projection(cfg.b_prime);
  return tensor(sa, sb) + tensor(sa, sb_p) + tensor(sa_p, sb) - tensor(sa_p, sb_p);
}

ComplexMatrix bell_square_closed_form(const ChshConfig& cfg) {
  return 4.0 * ComplexMatrix::identity(4) +
         4.0 * tensor(pauli_linear(cross(cfg.a, cfg.a_prime)),
                      pauli_linear(cross(cfg.b, cfg.b_prime)));
}

MatrixCheck bell_operator_squared_check(const ChshConfig& cfg, Tolerance tol) {
  const auto b = bell_operator(cfg);
  const double r = max_abs_diff(b * b, bell_square_closed_form(cfg));
  return {r <= tol.eps, r};
}

QmBound qm_chsh_bound(const ChshConfig& cfg) {
  QmBound out;
  const double d = seevinck_qm_dot(cfg);
  const auto b = bell_operator(cfg);
  out.bound = std::sqrt(4.0 + 4.0 * std::abs(d));
  out.bell_expectation = singlet_expectation(b);
  out.b_squared = singlet_expectation(b * b);
  out.b_squared_closed_form = 4.0 - 4.0 * d;
  out.consistent = std::abs(out.b_squared - out.b_squared_closed_form) <= 1e-10;
  return out;
}

std::array<Complex, 2> spin_state(const Direction& p, int s) {
  if (s != 1 && s != -1) throw std::invalid_argument("spin value must be +1 or -1");
  // Projector (1 + s sigma.p) / 2 applied to whichever basis state keeps
  // the larger component.
  const auto proj = 0.5 * (ComplexMatrix::identity(2) + static_cast<double>(s) * pauli_projection(p));
  const std::size_t col = std::norm(proj(0, 0)) >= std::norm(proj(1, 1)) ? 0 : 1;
  std::array<Complex, 2> v{proj(0, col), proj(1, col)};
  const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  v[0] /= n;
  v[1] /= n;
  return v;
}

double expectation(const ComplexMatrix& op, const std::array<Complex, 2>& psi) {
  if (op.rows() != 2 || op.cols() != 2) throw std::invalid_argument("operator must be 2x2");
  if (!is_hermitian(op, 1e-10)) throw NotHermitian("operator is not Hermitian");
  Complex e = 0.0;
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) e += std::conj(psi[r]) * op(r, c) * psi[c];
  }
  return e.real();
}

std::ostream& operator<<(std::ostream& os, const ComplexMatrix& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    os << "[";
    for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? ", " : "") << m(r, c);
    os << "]\n";
  }
  return os;
}

}  // namespace cliffbell
