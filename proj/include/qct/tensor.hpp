#pragma once

// Dense complex linear algebra over the (N+1)-qubit Hilbert space.
//
// Operators, states and density matrices are plain Eigen dense types templated on
// the real scalar. Site 0 is the most-significant bit of the basis index, so
// pauli_on_site(P, k, n) == I ⊗ … ⊗ P ⊗ … ⊗ I with P in the k-th Kronecker slot.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "qct/errors.hpp"

namespace qct {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using Operator = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Real>
using StateVector = Eigen::Matrix<Complex<Real>, Eigen::Dynamic, 1>;

/// Same storage as Operator; the name marks the Hermitian / unit-trace / PSD contract
/// enforced by check_density_matrix.
template <typename Real>
using DensityMatrix = Operator<Real>;

template <typename Real>
using RealVector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

inline constexpr int kMaxQubits = 12;
inline constexpr Eigen::Index kMaxEigenDim = 4096;

enum class Pauli { I, X, Y, Z };

/// Full spectrum of a Hermitian operator, eigenvalues ascending, eigenvectors as columns.
template <typename Real>
struct Spectrum {
  RealVector<Real> eigenvalues;
  Operator<Real> eigenvectors;
  Real gap01 = 0;
  /// Spectral norm max|λ|; the scale for every relative tolerance downstream.
  Real norm = 0;

  [[nodiscard]] Eigen::Index size() const { return eigenvalues.size(); }
  [[nodiscard]] StateVector<Real> vector(Eigen::Index k) const { return eigenvectors.col(k); }
};

namespace detail {

inline bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const auto z = m(i, j);
      if (!std::isfinite(std::real(z)) || !std::isfinite(std::imag(z))) return false;
    }
  return true;
}

}  // namespace detail

template <typename Real = double>
Operator<Real> identity(Eigen::Index dim) {
  return Operator<Real>::Identity(dim, dim);
}

template <typename Real = double>
Operator<Real> pauli(Pauli letter) {
  using C = Complex<Real>;
  Operator<Real> m = Operator<Real>::Zero(2, 2);
  switch (letter) {
    case Pauli::I: m(0, 0) = 1; m(1, 1) = 1; break;
    case Pauli::X: m(0, 1) = 1; m(1, 0) = 1; break;
    case Pauli::Y: m(0, 1) = C(0, -1); m(1, 0) = C(0, 1); break;
    case Pauli::Z: m(0, 0) = 1; m(1, 1) = -1; break;
  }
  return m;
}

template <typename Real>
Operator<Real> kron(const Operator<Real>& a, const Operator<Real>& b) {
  const Eigen::Index dim = a.rows() * b.rows();
  if (dim > kMaxEigenDim || a.cols() * b.cols() > kMaxEigenDim)
    throw ValidationError("kron: result dimension " + std::to_string(dim) + " exceeds cap " +
                          std::to_string(kMaxEigenDim));
  Operator<Real> out = Eigen::kroneckerProduct(a, b).eval();
  return out;
}

template <typename Real = double>
Operator<Real> pauli_on_site(Pauli letter, int site, int n_qubits) {
  if (n_qubits < 1 || n_qubits > kMaxQubits)
    throw ValidationError("pauli_on_site: n_qubits must be in [1, " + std::to_string(kMaxQubits) +
                          "], got " + std::to_string(n_qubits));
  if (site < 0 || site >= n_qubits)
    throw ValidationError("pauli_on_site: site " + std::to_string(site) + " out of range for " +
                          std::to_string(n_qubits) + " qubits");
  // The operator is a signed/phased permutation, so build it column by column
  // instead of materializing the Kronecker chain.
  const Eigen::Index dim = Eigen::Index{1} << n_qubits;
  const Eigen::Index bit = Eigen::Index{1} << (n_qubits - 1 - site);
  const Operator<Real> p = pauli<Real>(letter);
  Operator<Real> out = Operator<Real>::Zero(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    const int in = (col & bit) ? 1 : 0;
    for (int o = 0; o < 2; ++o) {
      const auto amp = p(o, in);
      if (amp == Complex<Real>(0)) continue;
      const Eigen::Index row = o ? (col | bit) : (col & ~bit);
      out(row, col) = amp;
    }
  }
  return out;
}

template <typename Real>
Operator<Real> commutator(const Operator<Real>& a, const Operator<Real>& b) {
  return a * b - b * a;
}

/// Largest entry magnitude; the matrix max-norm used for all "within tol" checks.
template <typename Derived>
auto max_abs(const Eigen::MatrixBase<Derived>& m) {
  return m.cwiseAbs().maxCoeff();
}

template <typename Real>
bool is_hermitian(const Operator<Real>& a, Real tol = Real(1e-12)) {
  if (a.rows() != a.cols()) return false;
  if (a.size() == 0) return true;
  return max_abs(Operator<Real>(a - a.adjoint())) < tol * std::max(Real(1), max_abs(a));
}

template <typename Real>
bool is_involution(const Operator<Real>& a, Real tol = Real(1e-10)) {
  if (a.rows() != a.cols()) return false;
  return max_abs(Operator<Real>(a * a - identity<Real>(a.rows()))) < tol;
}

/// Full spectrum by cyclic Jacobi with complex rotations.
///
/// Each rotation first rephases column q so the pivot A(p,q) becomes real, then applies
/// the classical real Jacobi rotation. Eigenvectors are phase-fixed (largest-magnitude
/// amplitude real and positive, lowest index on ties) so results are reproducible.
template <typename Real>
Spectrum<Real> eigendecompose(const Operator<Real>& h, int max_sweeps = 100) {
  using C = Complex<Real>;
  const Eigen::Index n = h.rows();
  if (n != h.cols()) throw ValidationError("eigendecompose: operator is not square");
  if (n == 0) throw ValidationError("eigendecompose: empty operator");
  if (n > kMaxEigenDim)
    throw ValidationError("eigendecompose: dimension " + std::to_string(n) + " exceeds cap " +
                          std::to_string(kMaxEigenDim));
  if (!detail::all_finite(h)) throw ValidationError("eigendecompose: non-finite entries");
  if (!is_hermitian(h)) throw ValidationError("eigendecompose: operator is not Hermitian");

  Operator<Real> a = (h + h.adjoint()) / Real(2);
  Operator<Real> v = identity<Real>(n);
  const Real scale = a.norm();
  const Real eps = std::numeric_limits<Real>::epsilon();

  auto off_norm = [&] {
    Real s = 0;
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        if (i != j) s += std::norm(a(i, j));
    return std::sqrt(s);
  };

  bool converged = false;
  for (int sweep = 0; sweep <= max_sweeps; ++sweep) {
    if (off_norm() <= eps * scale) {
      converged = true;
      break;
    }
    if (sweep == max_sweeps) break;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const C apq = a(p, q);
        const Real mag = std::abs(apq);
        if (mag == Real(0)) continue;
        // Skip pivots already negligible against both diagonal entries.
        const Real app = std::real(a(p, p));
        const Real aqq = std::real(a(q, q));
        if (sweep > 3 && mag <= eps * Real(0.01) * (std::abs(app) + std::abs(aqq))) {
          a(p, q) = a(q, p) = C(0);
          continue;
        }
        const C phase = apq / mag;
        const Real theta = (aqq - app) / (Real(2) * mag);
        Real t;
        if (std::abs(theta) > Real(1e150)) {
          t = Real(0.5) / theta;
        } else {
          t = (theta >= 0 ? Real(1) : Real(-1)) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        }
        const Real c = Real(1) / std::sqrt(t * t + 1);
        const Real s = t * c;
        const C gpp = c;
        const C gpq = s;
        const C gqp = -s * std::conj(phase);
        const C gqq = c * std::conj(phase);

        for (Eigen::Index k = 0; k < n; ++k) {
          const C akp = a(k, p);
          const C akq = a(k, q);
          a(k, p) = akp * gpp + akq * gqp;
          a(k, q) = akp * gpq + akq * gqq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const C apk = a(p, k);
          const C aqk = a(q, k);
          a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
          a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
        }
        a(p, q) = a(q, p) = C(0);
        a(p, p) = std::real(a(p, p));
        a(q, q) = std::real(a(q, q));

        for (Eigen::Index k = 0; k < n; ++k) {
          const C vkp = v(k, p);
          const C vkq = v(k, q);
          v(k, p) = vkp * gpp + vkq * gqp;
          v(k, q) = vkp * gpq + vkq * gqq;
        }
      }
    }
  }
  if (!converged)
    throw NumericalError("eigendecompose: Jacobi did not converge in " + std::to_string(max_sweeps) +
                         " sweeps");

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    return std::real(a(i, i)) < std::real(a(j, j));
  });

  Spectrum<Real> out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = std::real(a(src, src));
    StateVector<Real> col = v.col(src);
    col.normalize();
    const Real peak = col.cwiseAbs().maxCoeff();
    Eigen::Index pivot = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) >= peak * (Real(1) - Real(1e-10))) {
        pivot = i;
        break;
      }
    }
    col *= std::conj(col(pivot)) / std::abs(col(pivot));
    col(pivot) = std::abs(col(pivot));
    out.eigenvectors.col(k) = col;
  }
  out.gap01 = n > 1 ? out.eigenvalues(1) - out.eigenvalues(0) : Real(0);
  out.norm = std::max(std::abs(out.eigenvalues(0)), std::abs(out.eigenvalues(n - 1)));
  return out;
}

/// Ground state of a spectrum; a degenerate ground level is a hard error.
template <typename Real>
StateVector<Real> ground_state(const Spectrum<Real>& spectrum) {
  if (spectrum.size() > 1 && spectrum.gap01 < Real(1e-9) * std::max(Real(1), spectrum.norm))
    throw NumericalError("degenerate ground state (gap01 = " + std::to_string(spectrum.gap01) +
                         "); shift J or h");
  return spectrum.vector(0);
}

template <typename Real>
DensityMatrix<Real> density_from_state(const StateVector<Real>& psi) {
  return psi * psi.adjoint();
}

namespace detail {

template <typename Real>
Real checked_real(Complex<Real> value, Real scale, const char* what) {
  if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
    throw NumericalError(std::string(what) + ": non-finite expectation value");
  if (std::abs(value.imag()) > Real(1e-10) * std::max(Real(1), scale))
    throw NumericalError(std::string(what) + ": imaginary residue " + std::to_string(value.imag()) +
                         " (operator not Hermitian?)");
  return value.real();
}

}  // namespace detail

/// ⟨ψ|O|ψ⟩ for a Hermitian O; the imaginary residue is checked and discarded.
template <typename Real>
Real expectation(const StateVector<Real>& psi, const Operator<Real>& o) {
  if (o.rows() != o.cols() || o.rows() != psi.size())
    throw ValidationError("expectation: dimension mismatch");
  const Complex<Real> value = psi.dot(o * psi);
  return detail::checked_real(value, max_abs(o), "expectation");
}

/// Tr[ρO] for a Hermitian O; the imaginary residue is checked and discarded.
template <typename Real>
Real expectation(const DensityMatrix<Real>& rho, const Operator<Real>& o) {
  if (o.rows() != o.cols() || rho.rows() != rho.cols() || o.rows() != rho.rows())
    throw ValidationError("expectation: dimension mismatch");
  const Complex<Real> value = rho.cwiseProduct(o.transpose()).sum();
  return detail::checked_real(value, max_abs(o), "expectation");
}

/// exp(−iθσ) = cos θ·I − i sin θ·σ for an involutory σ.
template <typename Real>
Operator<Real> pauli_rotation(const Operator<Real>& sigma, Real theta) {
  if (!is_involution(sigma)) throw ValidationError("pauli_rotation: sigma is not an involution");
  if (!std::isfinite(theta)) throw ValidationError("pauli_rotation: non-finite angle");
  return std::cos(theta) * identity<Real>(sigma.rows()) -
         Complex<Real>(0, 1) * std::sin(theta) * sigma;
}

template <typename Real>
void check_state_vector(const StateVector<Real>& psi) {
  if (!detail::is_power_of_two(psi.size()))
    throw ValidationError("state vector dimension is not a power of two");
  if (!detail::all_finite(psi)) throw ValidationError("state vector has non-finite amplitudes");
  if (std::abs(psi.norm() - Real(1)) > Real(1e-12))
    throw ValidationError("state vector is not normalized");
}

template <typename Real>
void check_density_matrix(const DensityMatrix<Real>& rho) {
  if (rho.rows() != rho.cols() || !detail::is_power_of_two(rho.rows()))
    throw ValidationError("density matrix dimension is not a power of two");
  if (!detail::all_finite(rho)) throw ValidationError("density matrix has non-finite entries");
  if (max_abs(Operator<Real>(rho - rho.adjoint())) >= Real(1e-12))
    throw ValidationError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex<Real>(1)) > Real(1e-10))
    throw ValidationError("density matrix trace is not 1");
  const Spectrum<Real> spectrum = eigendecompose(rho);
  if (spectrum.eigenvalues(0) < Real(-1e-10))
    throw ValidationError("density matrix has a negative eigenvalue " +
                          std::to_string(spectrum.eigenvalues(0)));
}

}  // namespace qct
