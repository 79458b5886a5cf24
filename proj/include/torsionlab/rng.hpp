#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "form.hpp"
#include "space.hpp"

namespace torsionlab {

/// Seeded random source with portable output. mt19937_64 has a fully specified
/// stream; the distributions below avoid the implementation-defined ones from
/// <random> so that identical seeds give identical bytes on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {  // in [0, 1)
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int n) { return static_cast<int>(gen_() % static_cast<std::uint64_t>(n)); }

  double normal() {  // Box-Muller, one value per draw pair
    double u1 = 0.0;
    while (u1 == 0.0) u1 = uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  Eigen::VectorXd normal_vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  Eigen::MatrixXd normal_matrix(int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = normal();
    return m;
  }

  /// Haar-ish random orthogonal matrix (QR of a Gaussian matrix).
  Eigen::MatrixXd orthogonal(int n) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(normal_matrix(n, n));
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i)
      if (r(i, i) < 0) q.col(i) *= -1.0;
    return q;
  }

  /// Random orthogonal matrix commuting with standard_J (a realified unitary).
  Eigen::MatrixXd orthogonal_J_commuting(int dim) {
    int m = dim / 2;
    Eigen::MatrixXcd a(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a(i, j) = std::complex<double>(normal(), normal());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
    Eigen::MatrixXcd u = qr.householderQ();
    Eigen::MatrixXd q(dim, dim);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        // complex entry u_ij acts on the pair (e_{2j}, e_{2j+1})
        q(2 * i, 2 * j) = u(i, j).real();
        q(2 * i + 1, 2 * j) = u(i, j).imag();
        q(2 * i, 2 * j + 1) = -u(i, j).imag();
        q(2 * i + 1, 2 * j + 1) = u(i, j).real();
      }
    return q;
  }

  /// Random form with standard normal coefficients on every increasing tuple.
  Form form(int dim, int degree) {
    Form f(dim, degree);
    for (index_mask s : degree_masks(dim, degree)) f.set(s, normal());
    return f;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace torsionlab
