#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "form.hpp"
#include "homogeneous.hpp"
#include "operators.hpp"
#include "space.hpp"

namespace torsionlab {

/// Pointwise 1-jet of an almost Hermitian structure: the covariant derivative
/// of the Kaehler form in the Hermitian frame. Everything in this module (the
/// Nijenhuis tensor, torsion forms, Gray-Hervella position, the canonical and
/// characteristic connections) is computed from this single tensor.
struct AHPoint {
  int dim = 0;
  VectorValuedForms nabla_omega;  // slot x -> (Nabla_{e_x} omega) in lambda^2

  /// Each slot must be a J-anti-invariant 2-form.
  double lambda2_residual() const {
    double out = 0.0;
    for (auto& f : nabla_omega) out = std::max(out, (pullJ(f) + f).norm());
    return out;
  }

  /// Nabla J as endomorphisms: <(Nabla_x J) y, z> = (Nabla_x omega)(y, z).
  Eigen::MatrixXd nabla_J(int x) const { return two_form_matrix(nabla_omega[x]); }
};

/// The 1-jet of a homogeneous model at the base point.
inline AHPoint ah_point(const HomogeneousModel& model) {
  AHPoint p;
  p.dim = model.dim_m();
  ConnectionPotential lc = levi_civita(model);
  Form w = kaehler_form(p.dim);
  for (int i = 0; i < p.dim; ++i) p.nabla_omega.push_back(act(lc[i], w));
  if (p.lambda2_residual() > 1e-9)
    throw std::runtime_error("ah_point: Nabla omega is not of type lambda^2");
  return p;
}

/// Nijenhuis tensor from the Levi-Civita derivative of J:
/// N(X,Y) = -[(N_{JX}J)Y - (N_{JY}J)X] + J[(N_X J)Y - (N_Y J)X],
/// returned in slot form N^J_x = <N(.,.), e_x>, an element of
/// lambda^1 (x)_2 lambda^2.
inline VectorValuedForms nijenhuis(const AHPoint& p) {
  int n = p.dim;
  Eigen::MatrixXd J = standard_J(n);
  std::vector<Eigen::MatrixXd> A;
  for (int i = 0; i < n; ++i) A.push_back(p.nabla_J(i));
  auto AJ = [&](int i) { return static_cast<double>(j0_sign(i)) * A[j0_partner(i)]; };
  VectorValuedForms out(n, Form(n, 2));
  for (int y = 0; y < n; ++y)
    for (int z = y + 1; z < n; ++z) {
      Eigen::VectorXd ey = Eigen::VectorXd::Unit(n, y), ez = Eigen::VectorXd::Unit(n, z);
      Eigen::VectorXd v = -(AJ(y) * ez - AJ(z) * ey) + J * (A[y] * ez - A[z] * ey);
      for (int x = 0; x < n; ++x)
        if (v[x] != 0.0) out[x].add((index_mask{1} << y) | (index_mask{1} << z), v[x]);
    }
  return out;
}

/// First-order torsion data of an almost Hermitian structure.
struct TorsionData {
  Form domega, dw12, dw3;          // d omega and its lambda^{1,2} / lambda^3 parts
  Form t, psi_plus, psi_minus;     // t = 1/2 d^{1,2} omega, psi+ = 1/3 d^3 omega
  Form TD;                         // characteristic torsion 2Jt + psi^-
  VectorValuedForms NJ, NJ_hat;    // Nijenhuis slices and the W2-part
  double residual_jet1 = 0.0;      // 2 Nabla_X omega = -N^J_{JX} + X.dw + JX.Jdw
  double residual_g1_eq = 0.0;     // Nabla_X omega = X.t + JX.Jt + X.psi+ (exact iff G1)
  double residual_nj_split = 0.0;  // N^J = NJ_hat - 4 . psi^-
  double w2_mass = 0.0;            // |NJ_hat|, the obstruction to class G1
  bool g1 = false;
};

inline TorsionData torsion_data(const AHPoint& p, double tol = 1e-9) {
  TorsionData td;
  int n = p.dim;
  td.domega = alternation(p.nabla_omega);
  td.dw12 = bidegree_project(td.domega, {2, 1});
  td.dw3 = bidegree_project(td.domega, {3, 0});
  td.t = 0.5 * td.dw12;
  td.psi_plus = (1.0 / 3.0) * td.dw3;
  td.psi_minus = lambda_p_J(td.psi_plus);
  td.TD = 2.0 * pullJ(td.t) + td.psi_minus;
  td.NJ = nijenhuis(p);
  Form jdw3 = pullJ(td.dw3);  // equals -3 psi^-
  double hat_mass2 = 0.0, split_res = 0.0;
  for (int x = 0; x < n; ++x) {
    Form hat = td.NJ[x] - (4.0 / 3.0) * jdw3.contract(x);
    td.NJ_hat.push_back(hat);
    hat_mass2 += inner(hat, hat);
    split_res = std::max(split_res, (td.NJ[x] - hat + 4.0 * td.psi_minus.contract(x)).norm());
  }
  td.w2_mass = std::sqrt(hat_mass2);
  td.residual_nj_split = split_res;
  td.g1 = td.w2_mass <= tol;
  Form jdw = pullJ(td.domega);
  for (int x = 0; x < n; ++x) {
    double sx = j0_sign(x);
    Form jet1 = 2.0 * p.nabla_omega[x] + sx * td.NJ[j0_partner(x)] - td.domega.contract(x) -
                sx * jdw.contract(j0_partner(x));
    td.residual_jet1 = std::max(td.residual_jet1, jet1.norm());
    Form g1eq = p.nabla_omega[x] - td.t.contract(x) -
                sx * pullJ(td.t).contract(j0_partner(x)) - td.psi_plus.contract(x);
    td.residual_g1_eq = std::max(td.residual_g1_eq, g1eq.norm());
  }
  return td;
}

/// Lee form of t: the contraction constant is fixed by L* (theta ^ omega)
/// = (m-1) theta, so the round trip theta ^ omega -> theta is exact.
inline Form lee_form(const Form& t) {
  int m = t.dim() / 2;
  return (1.0 / (m - 1)) * lefschetz_adjoint(t);
}

/// Gray-Hervella position measured by component masses.
struct GHClass {
  double w1 = 0.0, w2 = 0.0, w3 = 0.0, w4 = 0.0;
  Form theta;  // Lee form
  std::string label;
  bool g1 = false;
};

inline GHClass gh_classify(const TorsionData& td, double tol = 1e-9) {
  GHClass out;
  out.w1 = td.psi_plus.norm();
  out.w2 = td.w2_mass;
  out.theta = lee_form(td.t);
  out.w4 = out.theta.norm();
  out.w3 = (td.t - wedge(out.theta, kaehler_form(td.t.dim()))).norm();
  out.g1 = out.w2 <= tol;
  std::string label;
  auto tag = [&](double mass, const char* name) {
    if (mass > tol) label += std::string(label.empty() ? "" : "+") + name;
  };
  tag(out.w1, "W1");
  tag(out.w2, "W2");
  tag(out.w3, "W3");
  tag(out.w4, "W4");
  out.label = label.empty() ? "Kaehler" : label;
  return out;
}

/// Hermitian connection potentials relative to the Levi-Civita one.
struct HermitianConnections {
  VectorValuedForms eta;   // intrinsic torsion eta_X = 1/2 (Nabla_X J) J
  VectorValuedForms zeta;  // characteristic potential
  double residual_canonical = 0.0;    // (Nabla + eta) omega = 0
  double residual_characteristic = 0.0;  // (Nabla + zeta) omega = 0
  double residual_torsion_pairing = 0.0;  // 2 zeta_X = X . T^D in class G1
};

inline HermitianConnections connections(const AHPoint& p, const TorsionData& td) {
  HermitianConnections out;
  int n = p.dim;
  Eigen::MatrixXd J = standard_J(n);
  Form w = kaehler_form(n);
  Form jdw12 = pullJ(td.dw12), jdw3 = pullJ(td.dw3);
  for (int x = 0; x < n; ++x) {
    Form eta = matrix_two_form(0.5 * p.nabla_J(x) * J);
    out.eta.push_back(eta);
    Form zeta = 0.5 * jdw12.contract(x) - (1.0 / 6.0) * jdw3.contract(x) + 0.25 * td.NJ_hat[x];
    out.zeta.push_back(zeta);
    out.residual_canonical = std::max(
        out.residual_canonical, (p.nabla_omega[x] + act(two_form_matrix(eta), w)).norm());
    out.residual_characteristic = std::max(
        out.residual_characteristic, (p.nabla_omega[x] + act(two_form_matrix(zeta), w)).norm());
    if (td.g1)
      out.residual_torsion_pairing =
          std::max(out.residual_torsion_pairing, (2.0 * zeta - td.TD.contract(x)).norm());
  }
  return out;
}

/// Nomizu potential of the characteristic connection D = Nabla + zeta on a
/// homogeneous model.
inline ConnectionPotential characteristic_potential(const HomogeneousModel& model) {
  AHPoint p = ah_point(model);
  TorsionData td = torsion_data(p);
  if (!td.g1)
    throw std::runtime_error(
        "characteristic_potential: model is not of class G1 (skew torsion does not exist)");
  HermitianConnections hc = connections(p, td);
  ConnectionPotential pot = levi_civita(model);
  for (int i = 0; i < model.dim_m(); ++i) pot[i] += two_form_matrix(hc.zeta[i]);
  return pot;
}

/// Nomizu potential of the first canonical Hermitian connection.
inline ConnectionPotential canonical_potential(const HomogeneousModel& model) {
  AHPoint p = ah_point(model);
  TorsionData td = torsion_data(p);
  HermitianConnections hc = connections(p, td);
  ConnectionPotential pot = levi_civita(model);
  for (int i = 0; i < model.dim_m(); ++i) pot[i] += two_form_matrix(hc.eta[i]);
  return pot;
}

}  // namespace torsionlab
