#pragma once

// Independent reference computations for the tests. Everything here uses
// dense linear algebra or plain unscaled arithmetic, never the library's
// scaled or recursive code paths.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

namespace oracle {

using Dense = Eigen::MatrixXd;
using DenseC = Eigen::MatrixXcd;

/// H_[a,b] - E as a dense matrix (diagonal = potential - E, off-diagonal 1).
inline Dense box_matrix(const std::vector<double>& v, double energy = 0.0) {
  const auto n = static_cast<Eigen::Index>(v.size());
  Dense h = Dense::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = v[static_cast<std::size_t>(i)] - energy;
    if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = 1.0;
  }
  return h;
}

inline DenseC box_matrix_c(const std::vector<double>& v, std::complex<double> energy) {
  const auto n = static_cast<Eigen::Index>(v.size());
  DenseC h = DenseC::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = v[static_cast<std::size_t>(i)] - energy;
    if (i + 1 < n) h(i, i + 1) = h(i + 1, i) = 1.0;
  }
  return h;
}

/// Determinant by Laplace expansion along the first row (exponential cost,
/// only for tiny matrices).
inline double cofactor_det(const Dense& m) {
  const auto n = m.rows();
  if (n == 0) return 1.0;
  if (n == 1) return m(0, 0);
  double s = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (m(0, j) == 0.0) continue;
    Dense minor(n - 1, n - 1);
    for (Eigen::Index r = 1; r < n; ++r) {
      Eigen::Index c2 = 0;
      for (Eigen::Index c = 0; c < n; ++c) {
        if (c == j) continue;
        minor(r - 1, c2++) = m(r, c);
      }
    }
    s += ((j % 2 == 0) ? 1.0 : -1.0) * m(0, j) * cofactor_det(minor);
  }
  return s;
}

/// det(H - E) via LU.
inline double lu_det(const std::vector<double>& v, double energy) {
  if (v.empty()) return 1.0;
  return box_matrix(v, energy).partialPivLu().determinant();
}

/// Unscaled product T_b ... T_a in plain doubles.
inline Eigen::Matrix2cd naive_product(const std::vector<double>& v, std::complex<double> energy) {
  Eigen::Matrix2cd s = Eigen::Matrix2cd::Identity();
  for (double x : v) {
    Eigen::Matrix2cd t;
    t << energy - x, -1.0, 1.0, 0.0;
    s = t * s;
  }
  return s;
}

/// (H - E)^{-1} by dense LU.
inline Dense resolvent(const std::vector<double>& v, double energy) {
  return box_matrix(v, energy).partialPivLu().inverse();
}

struct DenseEigen {
  Eigen::VectorXd values;
  Dense vectors;  // columns
};

inline DenseEigen dense_eigen(const std::vector<double>& v) {
  Eigen::SelfAdjointEigenSolver<Dense> es(box_matrix(v, 0.0));
  return {es.eigenvalues(), es.eigenvectors()};
}

/// <delta_x, e^{-itH} delta_y> for the box.
inline std::complex<double> propagator(const std::vector<double>& v, double t, int x, int y) {
  DenseC h = box_matrix(v, 0.0).cast<std::complex<double>>();
  DenseC u = (std::complex<double>(0.0, -t) * h).exp();
  return u(x, y);
}

/// Largest eigenvalue modulus of [[z - c, -1], [1, 0]].
inline double constant_lyapunov(double c, std::complex<double> z) {
  Eigen::Matrix2cd t;
  t << z - c, -1.0, 1.0, 0.0;
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(t);
  return std::log(std::max(std::abs(es.eigenvalues()(0)), std::abs(es.eigenvalues()(1))));
}

/// psi(n+1) = (E - V_n) psi(n) - psi(n-1) on sites lo-1 .. hi+1, from psi(lo-1), psi(lo).
inline std::vector<double> transfer_solution(const std::vector<double>& v, double energy, double psi_before,
                                             double psi_first) {
  std::vector<double> psi(v.size() + 2);
  psi[0] = psi_before;
  psi[1] = psi_first;
  for (std::size_t k = 1; k + 1 < psi.size(); ++k) psi[k + 1] = (energy - v[k - 1]) * psi[k] - psi[k - 1];
  return psi;
}

}  // namespace oracle
