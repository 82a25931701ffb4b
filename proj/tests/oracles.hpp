#pragma once

// Test-only reference implementations, written independently of the library paths
// they check.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "qct/models.hpp"

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
using V = Eigen::VectorXcd;

inline M pauli(char letter) {
  M m = M::Zero(2, 2);
  switch (letter) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Y': m << 0, C(0, -1), C(0, 1), 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
  }
  return m;
}

/// Explicit Kronecker chain; site 0 is the leftmost factor.
inline M on_site(char letter, int site, int n_qubits) {
  M out = M::Identity(1, 1);
  for (int k = 0; k < n_qubits; ++k) {
    const M f = k == site ? pauli(letter) : pauli('I');
    M next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * f;
    out = next;
  }
  return out;
}

inline M hamiltonian(const qct::ModelSpec& s) {
  const int q = s.n + 1;
  M h = M::Zero(Eigen::Index{1} << q, Eigen::Index{1} << q);
  for (int k = 1; k <= s.n; ++k) {
    const int left = s.kind == qct::ModelKind::Star ? 0 : k - 1;
    h += s.j * on_site('X', left, q) * on_site('X', k, q);
  }
  for (int k = 0; k <= s.n; ++k) h += s.h * on_site('Z', k, q);
  return h;
}

struct Ground {
  double energy = 0.0;
  V vector;
};

/// Shifted inverse power iteration: Gershgorin shift first, then a Rayleigh-quotient shift.
inline Ground inverse_power(const M& h) {
  const Eigen::Index n = h.rows();
  double lower = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double radius = 0.0;
    for (Eigen::Index j = 0; j < n; ++j)
      if (j != i) radius += std::abs(h(i, j));
    lower = i == 0 ? h(i, i).real() - radius : std::min(lower, h(i, i).real() - radius);
  }
  V v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = C(1.0 + 0.01 * i, 0.003 * i);
  v.normalize();
  auto iterate = [&](double shift, int count) {
    const Eigen::PartialPivLU<M> lu(h - shift * M::Identity(n, n));
    for (int it = 0; it < count; ++it) v = lu.solve(v).normalized();
  };
  iterate(lower - 1e-3, 400);
  const double rq = v.dot(h * v).real();
  iterate(rq - 1e-6, 60);
  return {v.dot(h * v).real(), v};
}

/// Literal protocol with matrix exponentials: U_B(c) = exp(+iθ(−1)^c σ_B).
inline double pipeline_delta(const M& rho, const M& o, const M& sa, const M& sb, double theta, int a) {
  const Eigen::Index n = rho.rows();
  M out = M::Zero(n, n);
  for (int b = 0; b < 2; ++b) {
    const M p = 0.5 * (M::Identity(n, n) - (b == 0 ? 1.0 : -1.0) * sa);
    const double sign = ((b ^ a) == 0) ? 1.0 : -1.0;
    const M gen = C(0, theta * sign) * sb;
    const M u = gen.exp();
    out += u * p * rho * p * u.adjoint();
  }
  return (out * o).trace().real() - (rho * o).trace().real();
}

}  // namespace oracle
