#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "homogeneous.hpp"

namespace torsionlab {
namespace detail {

using Cx = std::complex<double>;
using MatC = Eigen::MatrixXcd;

inline double re_trace_ip(const MatC& a, const MatC& b) { return -(a * b).trace().real(); }

/// Gram-Schmidt under the negative real trace form.
inline std::vector<MatC> orthonormalize(std::vector<MatC> basis) {
  std::vector<MatC> out;
  for (auto m : basis) {
    for (auto& b : out) m -= re_trace_ip(b, m) * b;
    double len = std::sqrt(re_trace_ip(m, m));
    if (len > 1e-9) out.push_back(m / len);
  }
  return out;
}

/// su(2) = span{ i/2 sigma_k }.
inline std::vector<MatC> su2_basis() {
  Cx i(0.0, 1.0);
  MatC s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, i, i, 0;
  s2 << 0, 1, -1, 0;
  s3 << i, 0, 0, -i;
  return {0.5 * s1, 0.5 * s2, 0.5 * s3};
}

/// su(3) = span{ i * (Gell-Mann matrices) }.
inline std::vector<MatC> su3_basis() {
  Cx i(0.0, 1.0);
  std::vector<MatC> out;
  auto add = [&](std::initializer_list<Cx> v) {
    MatC m(3, 3);
    int k = 0;
    for (Cx c : v) m(k / 3, k % 3) = c, ++k;
    out.push_back(i * m);
  };
  double r3 = 1.0 / std::sqrt(3.0);
  add({0, 1, 0, 1, 0, 0, 0, 0, 0});
  add({0, -i, 0, i, 0, 0, 0, 0, 0});
  add({1, 0, 0, 0, -1, 0, 0, 0, 0});
  add({0, 0, 1, 0, 0, 0, 1, 0, 0});
  add({0, 0, -i, 0, 0, 0, i, 0, 0});
  add({0, 0, 0, 0, 0, 1, 0, 1, 0});
  add({0, 0, 0, 0, 0, -i, 0, i, 0});
  add({r3, 0, 0, 0, r3, 0, 0, 0, -2 * r3});
  return out;
}

/// Complex 2x2 picture of a quaternion a + bi + cj + dk.
inline MatC quat(double a, double b, double c, double d) {
  MatC m(2, 2);
  Cx z(a, b), w(c, d);
  m << z, w, -std::conj(w), std::conj(z);
  return m;
}

/// sp(2) as quaternionic anti-Hermitian 2x2 matrices inside u(4).
inline std::vector<MatC> sp2_basis() {
  std::vector<MatC> out;
  auto place = [&](int r, int c, const MatC& q) {
    MatC m = MatC::Zero(4, 4);
    m.block(2 * r, 2 * c, 2, 2) = q;
    return m;
  };
  for (int pos = 0; pos < 2; ++pos) {
    out.push_back(place(pos, pos, quat(0, 1, 0, 0)));
    out.push_back(place(pos, pos, quat(0, 0, 1, 0)));
    out.push_back(place(pos, pos, quat(0, 0, 0, 1)));
  }
  for (auto q : {quat(1, 0, 0, 0), quat(0, 1, 0, 0), quat(0, 0, 1, 0), quat(0, 0, 0, 1)}) {
    MatC m = MatC::Zero(4, 4);
    m.block(0, 2, 2, 2) = q;
    m.block(2, 0, 2, 2) = -q.adjoint();
    out.push_back(m);
  }
  return out;
}

inline std::vector<MatC> direct_sum3(const std::vector<MatC>& f) {
  std::vector<MatC> out;
  int n = static_cast<int>(f[0].rows());
  for (int slot = 0; slot < 3; ++slot)
    for (auto& m : f) {
      MatC big = MatC::Zero(3 * n, 3 * n);
      big.block(slot * n, slot * n, n, n) = m;
      out.push_back(big);
    }
  return out;
}

/// Build a 3-symmetric model from a matrix Lie algebra and an order-3 group
/// element g0: h = Fix(Ad g0), m its orthogonal complement, J = (2 theta + 1)/sqrt(3).
inline HomogeneousModel three_symmetric(const std::string& name, std::vector<MatC> raw_basis,
                                        const MatC& g0) {
  auto basis = orthonormalize(std::move(raw_basis));
  int n = static_cast<int>(basis.size());
  MatC g0inv = g0.inverse();
  // theta in the orthonormal basis
  Eigen::MatrixXd theta(n, n);
  for (int j = 0; j < n; ++j) {
    MatC im = g0 * basis[j] * g0inv;
    for (int i = 0; i < n; ++i) theta(i, j) = re_trace_ip(basis[i], im);
  }
  if ((theta * theta * theta - Eigen::MatrixXd::Identity(n, n)).norm() > 1e-9)
    throw std::runtime_error(name + ": automorphism is not of order 3");
  // h = fixed space of theta; m = orthogonal complement
  Eigen::FullPivLU<Eigen::MatrixXd> lu(theta - Eigen::MatrixXd::Identity(n, n));
  lu.setThreshold(1e-8);
  Eigen::MatrixXd h_cols = lu.kernel();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(h_cols);
  Eigen::MatrixXd h_on = qr.householderQ();
  int dim_h = static_cast<int>(h_cols.cols());
  Eigen::MatrixXd proj_h = h_on.leftCols(dim_h) * h_on.leftCols(dim_h).transpose();
  Eigen::MatrixXd proj_m = Eigen::MatrixXd::Identity(n, n) - proj_h;
  // orthonormal basis of m (coordinates in the orthonormalized algebra basis)
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(proj_m, Eigen::ComputeFullU);
  int dim_m = 0;
  for (int i = 0; i < n; ++i) dim_m += svd.singularValues()[i] > 0.5;
  Eigen::MatrixXd m_on = svd.matrixU().leftCols(dim_m);
  // J on m
  Eigen::MatrixXd theta_m = m_on.transpose() * theta * m_on;
  Eigen::MatrixXd J = (2.0 * theta_m + Eigen::MatrixXd::Identity(dim_m, dim_m)) / std::sqrt(3.0);
  if ((J * J + Eigen::MatrixXd::Identity(dim_m, dim_m)).norm() > 1e-9)
    throw std::runtime_error(name + ": J^2 != -1 on m");
  // Hermitian frame inside m: greedy (v, Jv) pairs
  Eigen::MatrixXd frame(dim_m, dim_m);
  int built = 0;
  for (int cand = 0; cand < dim_m && built < dim_m; ++cand) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(dim_m, cand);
    for (int k = 0; k < built; ++k) v -= frame.col(k).dot(v) * frame.col(k);
    if (v.norm() < 1e-6) continue;
    v.normalize();
    frame.col(built) = v;
    frame.col(built + 1) = J * v;
    built += 2;
  }
  if (built != dim_m) throw std::runtime_error(name + ": Hermitian frame construction failed");
  // final basis as matrices: m-frame first, then h
  std::vector<MatC> final_basis;
  auto from_coords = [&](const Eigen::VectorXd& coords) {
    MatC m = MatC::Zero(basis[0].rows(), basis[0].cols());
    for (int i = 0; i < n; ++i) m += coords[i] * basis[i];
    return m;
  };
  for (int k = 0; k < dim_m; ++k) final_basis.push_back(from_coords(m_on * frame.col(k)));
  for (int a = 0; a < dim_h; ++a) final_basis.push_back(from_coords(h_on.col(a)));

  HomogeneousModel model(name, dim_m, dim_h);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      MatC br = final_basis[i] * final_basis[j] - final_basis[j] * final_basis[i];
      for (int k = 0; k < n; ++k) {
        double c = re_trace_ip(final_basis[k], br);
        if (std::abs(c) > 1e-13) model.set_c3(i, j, k, c);
      }
    }
  model.validate(1e-9);
  return model;
}

/// su(2) structure constants on an orthonormal triple scaled so that
/// [x1, x2] = 2 x3 cyclically (unit 3-sphere inside the quaternions).
inline void put_su2(HomogeneousModel& model, int i1, int i2, int i3) {
  model.set_c3(i1, i2, i3, 2.0);
  model.set_c3(i2, i3, i1, 2.0);
  model.set_c3(i3, i1, i2, 2.0);
}

}  // namespace detail

/// Named example models. The frame order encodes J: (0,1), (2,3), ... are the
/// Hermitian pairs.
inline HomogeneousModel builtin(const std::string& name) {
  using namespace detail;
  if (name == "torus6") {
    HomogeneousModel m("torus6", 6, 0);
    m.validate();
    return m;
  }
  if (name == "hopf4") {
    // S^3 x S^1 group model; frame (x1, x2, x3, x4) with the su(2) factor on
    // (x1, x2, x3), the circle on x4, J x1 = x2, J x3 = x4.
    HomogeneousModel m("hopf4", 4, 0);
    put_su2(m, 0, 1, 2);
    m.validate();
    return m;
  }
  if (name == "calabi_eckmann6") {
    // S^3 x S^3 with the Calabi-Eckmann pairing: contact planes (a1,a2) and
    // (b1,b2) at frame slots (0,1), (2,3); the two Reeb directions pair up as
    // (a3, b3) in slots (4,5).
    HomogeneousModel m("calabi_eckmann6", 6, 0);
    put_su2(m, 0, 1, 4);
    put_su2(m, 2, 3, 5);
    m.validate();
    return m;
  }
  if (name == "ledger_obata6")
    return three_symmetric("ledger_obata6", direct_sum3(su2_basis()), [] {
      MatC p = MatC::Zero(6, 6);
      p.block(0, 4, 2, 2).setIdentity();  // cyclic shift of the three factors
      p.block(2, 0, 2, 2).setIdentity();
      p.block(4, 2, 2, 2).setIdentity();
      return p;
    }());
  if (name == "flag6")
    return three_symmetric("flag6", su3_basis(), [] {
      Cx z = std::polar(1.0, 2.0 * M_PI / 3.0);
      MatC g0 = MatC::Zero(3, 3);
      g0(0, 0) = 1.0;
      g0(1, 1) = z;
      g0(2, 2) = std::conj(z);
      return g0;
    }());
  if (name == "twistor6")
    return three_symmetric("twistor6", sp2_basis(), [] {
      MatC g0 = MatC::Zero(4, 4);
      g0.block(0, 0, 2, 2) = quat(std::cos(2.0 * M_PI / 3.0), std::sin(2.0 * M_PI / 3.0), 0, 0);
      g0.block(2, 2, 2, 2).setIdentity();
      return g0;
    }());
  throw std::invalid_argument("builtin: unknown model '" + name + "'");
}

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"torus6", "hopf4",         "calabi_eckmann6",
                                                 "ledger_obata6", "flag6", "twistor6"};
  return names;
}

}  // namespace torsionlab
