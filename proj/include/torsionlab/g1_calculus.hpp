#pragma once

#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "almost_hermitian.hpp"
#include "curvature.hpp"
#include "form.hpp"
#include "homogeneous.hpp"
#include "operators.hpp"

namespace torsionlab {

/// One verified identity: a residual together with the formula it measures.
struct ReportItem {
  std::string name;
  std::string anchor;  // the formula whose defect is measured
  double residual = 0.0;
  bool pass = false;
  bool gated = true;  // diagnostics can be reported without affecting all_pass
};

struct ResidualReport {
  std::string suite;
  double tol = 1e-9;
  std::vector<ReportItem> items;

  void add(std::string name, std::string anchor, double residual, bool gated = true) {
    items.push_back({std::move(name), std::move(anchor), residual, residual <= tol, gated});
  }
  bool all_pass() const {
    for (auto& it : items)
      if (it.gated && !it.pass) return false;
    return true;
  }
  double max_gated_residual() const {
    double out = 0.0;
    for (auto& it : items)
      if (it.gated) out = std::max(out, it.residual);
    return out;
  }
};

namespace detail {

/// Orthonormal basis of the bidegree component of Lambda^deg.
inline std::vector<Form> bidegree_basis(int dim, int deg, const BidegreeLabel& label) {
  std::vector<Form> basis;
  for (index_mask s : degree_masks(dim, deg)) {
    Form f = bidegree_project(Form::basis(dim, s), label);
    for (auto& b : basis) f -= inner(f, b) * b;  // Gram-Schmidt
    for (auto& b : basis) f -= inner(f, b) * b;  // second pass for stability
    double n = f.norm();
    if (n > 1e-8) basis.push_back((1.0 / n) * f);
  }
  return basis;
}

inline Eigen::VectorXd form_coords(const Form& f, const std::vector<index_mask>& masks) {
  Eigen::VectorXd v(masks.size());
  for (size_t k = 0; k < masks.size(); ++k) v[k] = f.coeff(masks[k]);
  return v;
}

}  // namespace detail

/// Least-squares certificate that a form phi in lambda^p is a Hermitian
/// Killing form for the connection D: the full derivative is fitted against
/// D_X phi = (X . (B + C))_{lambda^p} with B in lambda^{p,1}, C in lambda^{p+1}.
struct KillingCertificate {
  Form a_fit;               // best B + C
  double fit_residual = 0.0;       // l2 defect of the Killing equation
  double formula_residual = 0.0;   // | A_fit - (del phi + 1/(p+1) delbar phi) |
  double min_singular = 0.0;       // conditioning of the fit (uniqueness check)
  bool killing = false;
};

inline KillingCertificate killing_check(const HomogeneousModel& model,
                                        const ConnectionPotential& pot, const Form& phi,
                                        double tol = 1e-8) {
  int dim = phi.dim(), p = phi.degree();
  if ((phi - bidegree_project(phi, {p, 0})).norm() > 1e-10)
    throw std::invalid_argument("killing_check: phi must be of pure type lambda^p");
  ConnectionOps ops(model, pot);

  std::vector<Form> basis = detail::bidegree_basis(dim, p + 1, {p, 1});
  std::vector<Form> top = detail::bidegree_basis(dim, p + 1, {p + 1, 0});
  basis.insert(basis.end(), top.begin(), top.end());
  if (basis.empty()) {  // target modules are zero (e.g. p + 1 > m): A must vanish
    KillingCertificate out;
    out.a_fit = Form(dim, p + 1);
    double res = 0.0;
    for (int x = 0; x < dim; ++x) res += std::pow(ops.derivative(x, phi).norm(), 2);
    out.fit_residual = std::sqrt(res);
    out.killing = out.fit_residual <= tol;
    return out;
  }

  std::vector<index_mask> masks = degree_masks(dim, p);
  long rows = static_cast<long>(dim) * static_cast<long>(masks.size());
  Eigen::MatrixXd M(rows, static_cast<long>(basis.size()));
  Eigen::VectorXd rhs(rows);
  for (int x = 0; x < dim; ++x) {
    Eigen::VectorXd dphi = detail::form_coords(ops.derivative(x, phi), masks);
    rhs.segment(x * masks.size(), masks.size()) = dphi;
    for (size_t c = 0; c < basis.size(); ++c) {
      Form col = bidegree_project(basis[c].contract(x), {p, 0});
      M.block(x * masks.size(), c, masks.size(), 1) = detail::form_coords(col, masks);
    }
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::VectorXd sol = svd.solve(rhs);

  KillingCertificate out;
  out.min_singular = svd.singularValues().minCoeff();
  out.fit_residual = (M * sol - rhs).norm();
  out.a_fit = Form(dim, p + 1);
  for (size_t c = 0; c < basis.size(); ++c) out.a_fit += sol[c] * basis[c];
  out.a_fit.prune(1e-14);
  Form a_formula = ops.del(phi, {p, 0}) + (1.0 / (p + 1)) * ops.delbar(phi, {p, 0});
  out.formula_residual = (out.a_fit - a_formula).norm();
  out.killing = out.fit_residual <= tol;
  return out;
}

/// A homogeneous model of class G1 together with its torsion data and the
/// characteristic connection.
struct G1Context {
  HomogeneousModel model;
  AHPoint jet;
  TorsionData td;
  GHClass gh;
  ConnectionPotential pot;  // characteristic connection D
  Form t, jt, psip, psim, TD;

  ConnectionOps ops() const { return ConnectionOps(model, pot); }
  ConnectionOps lc_ops() const { return ConnectionOps(model, levi_civita(model)); }
};

inline G1Context make_g1(HomogeneousModel model) {
  G1Context cx{std::move(model), {}, {}, {}, {}, {}, {}, {}, {}, {}};
  cx.jet = ah_point(cx.model);
  cx.td = torsion_data(cx.jet);
  cx.gh = gh_classify(cx.td);
  cx.pot = characteristic_potential(cx.model);
  cx.t = cx.td.t;
  cx.jt = pullJ(cx.t);
  cx.psip = cx.td.psi_plus;
  cx.psim = cx.td.psi_minus;
  cx.TD = cx.td.TD;
  return cx;
}

/// First-order identities binding the type components of the torsion form.
inline ResidualReport g1_identity_suite(const G1Context& cx, double tol = 1e-8) {
  ResidualReport rep;
  rep.suite = "g1_identities";
  rep.tol = tol;
  int dim = cx.model.dim_m();
  ConnectionOps D = cx.ops();
  auto p13 = [](const Form& f) { return bidegree_project(f, {3, 1}); };
  auto p4 = [](const Form& f) { return bidegree_project(f, {4, 0}); };
  auto jj = [](int i) { return j0_partner(i); };
  auto js = [](int i) { return static_cast<double>(j0_sign(i)); };

  rep.add("diff_t", "del_D t = 0", bidegree_project(D.d(cx.t), {2, 2}).norm());
  Form dpsi = D.d(cx.psip), dt = D.d(cx.t);
  rep.add("diff_mixed",
          "3 del_D psi+ + 2 delbar_D t = -4(t . Jt) - 4(Jt . psi+) on lambda^{1,3}",
          (3.0 * p13(dpsi) + 2.0 * p13(dt) + 4.0 * p13(bullet(cx.t, cx.jt)) +
           4.0 * p13(bullet(cx.jt, cx.psip)))
              .norm());
  rep.add("diff_top", "delbar_D psi+ = -8/3 (Jt . psi+) on lambda^4",
          (p4(dpsi) + (8.0 / 3.0) * p4(bullet(cx.jt, cx.psip))).norm());

  // exterior derivative of the torsion form (connection-independent d)
  Form dTD = cx.lc_ops().d(cx.TD);
  rep.add("comp", "d_D T = d T - T . T", (D.d(cx.TD) - dTD + bullet(cx.TD, cx.TD)).norm());

  double res_killing = 0.0, res_formula = 0.0, res_id0 = 0.0, res_middle = 0.0;
  Form A = D.del(cx.psim, {3, 0}) + 0.25 * D.delbar(cx.psim, {3, 0});
  Form dbar_jpsim = D.delbar(-1.0 * cx.psip, {3, 0});  // J psi- = -psi+
  Form del_psim = D.del(cx.psim, {3, 0});              // del_D of J psi+
  for (int x = 0; x < dim; ++x) {
    Form Dx = D.derivative(x, cx.psim);
    res_killing = std::max(res_killing, (Dx + 0.5 * bidegree_project(dTD.contract(x), {3, 0})).norm());
    res_formula = std::max(res_formula, (Dx - bidegree_project(A.contract(x), {3, 0})).norm());
    // D_{JX} psi+ - D_X (J psi+) = -2 (X . del_D J psi+)_{lambda^3}
    Form id0 = js(x) * D.derivative(jj(x), cx.psip) - Dx +
               2.0 * bidegree_project(del_psim.contract(x), {3, 0});
    res_id0 = std::max(res_id0, id0.norm());
    // D_{JX} psi- + D_X (J psi-) = 1/2 X . delbar_D (J psi-)
    Form mid = js(x) * D.derivative(jj(x), cx.psim) - D.derivative(x, cx.psip) -
               0.5 * dbar_jpsim.contract(x);
    res_middle = std::max(res_middle, mid.norm());
  }
  rep.add("bianchi_psi", "D_X psi- = -1/2 (X . dT)_{lambda^3}", res_killing);
  rep.add("killing_psi", "D_X psi- = (X . (del psi- + 1/4 delbar psi-))_{lambda^3}", res_formula);
  rep.add("slot_sym1", "D_{JX} phi - D_X J phi = -2 (X . del_D J phi)_{lambda^p}, phi = psi+",
          res_id0);
  rep.add("slot_sym2", "D_{JX} phi + D_X J phi = 2/(p+1) X . delbar_D J phi, phi = psi-",
          res_middle);

  // commutation of d_D with the form-degree operators
  for (auto [f, tag] : {std::pair<const Form*, const char*>{&cx.t, "_t"}, {&cx.psip, "_psi"}}) {
    Form lhs = calJ(D.d(*f)) - D.d(calJ(*f));
    Form rhs = -1.0 * pullJ(D.d(pullJ(*f)));  // (-1)^p with p = 3
    rep.add(std::string("commute_J") + tag, "[calJ, d_D] = (-1)^p J d_D J on 3-forms",
            (lhs - rhs).norm());
    Form k1 = D.d(lefschetz_adjoint(*f)) - lefschetz_adjoint(D.d(*f)) +
              pullJ(D.dstar(pullJ(*f)));
    rep.add(std::string("kaehler_id1") + tag, "[d_D, L*] = (-1)^p J d_D* J on 3-forms",
            k1.norm());
    Form k2 = D.dstar(lefschetz(*f)) - lefschetz(D.dstar(*f)) - pullJ(D.d(pullJ(*f)));
    rep.add(std::string("kaehler_id2") + tag, "[d_D*, L] = (-1)^{p+1} J d_D J on 3-forms",
            k2.norm());
  }
  return rep;
}

/// Product rules characterising Hermitian Killing forms, applied to psi-.
inline ResidualReport product_rule_suite(const G1Context& cx, double tol = 1e-8) {
  ResidualReport rep;
  rep.suite = "product_rules";
  rep.tol = tol;
  ConnectionOps D = cx.ops();
  int dim = cx.model.dim_m();
  const Form& phi = cx.psim;
  Form jphi = -1.0 * cx.psip;  // J psi- in lambda^3
  Form pairing = wedge(phi, jphi);

  rep.add("contraction", "L*(phi ^ J phi) = -phi . phi",
          (lefschetz_adjoint(pairing) + bullet(phi, phi)).norm());

  Form dbar_jphi = D.delbar(jphi, {3, 0});
  Form lhs1 = D.dstar(pairing);
  Form rhs1 = wedge(D.dstar(phi), jphi) - wedge(phi, D.dstar(jphi)) -
              0.5 * bullet(phi, dbar_jphi);
  rep.add("codifferential", "d_D*(phi ^ J phi) product rule for Killing phi",
          (lhs1 - rhs1).norm());

  // the underlying pointwise identity, valid without the Killing hypothesis
  Form sum(dim, 4);
  for (int i = 0; i < dim; ++i) {
    Form slot = static_cast<double>(j0_sign(i)) * D.derivative(j0_partner(i), phi) +
                D.derivative(i, jphi);
    Form c = phi.contract(i);
    if (!c.empty() && !slot.empty()) sum += wedge(c, slot);
  }
  rep.add("expansion", "-d_D*(phi ^ J phi) = -(d_D* phi) ^ J phi + phi ^ d_D* J phi + "
                       "sum_i (e_i . phi) ^ (D_{Je_i} phi + D_{e_i} J phi)",
          (-1.0 * lhs1 + wedge(D.dstar(phi), jphi) - wedge(phi, D.dstar(jphi)) - sum).norm());

  Form lhs2 = -1.0 * D.d(bullet(phi, phi));
  Form rhs2 = bullet(D.d(phi), phi) + bullet(D.d(jphi), jphi) -
              0.5 * pullJ(bullet(phi, dbar_jphi));
  rep.add("schouten", "-d_D(phi . phi) product rule for Killing phi", (lhs2 - rhs2).norm());
  return rep;
}

/// Decomposition of the curvature of the characteristic connection and the
/// closed-form expression of its components through the torsion.
inline ResidualReport curvature_suite(const G1Context& cx, double tol = 1e-8) {
  ResidualReport rep;
  rep.suite = "curvature";
  rep.tol = tol;
  int dim = cx.model.dim_m();
  ConnectionOps D = cx.ops();
  CurvatureLike RD = D.curvature();
  rep.add("hermitian_pairs", "R_D(.,.) takes values in lambda^{1,1}",
          RD.second_pair_lambda11_residual());

  VectorValuedForms gamma;
  for (int x = 0; x < dim; ++x) gamma.push_back(-0.5 * D.derivative(x, cx.TD));
  CurvDecomposition dec = decompose_hermitian_curvature(RD, gamma);
  rep.add("constraint", "R_D(X,Y,Z,U) - R_D(Z,U,X,Y) matches the torsion defect gamma",
          dec.residual_constraint);
  rep.add("reconstruction", "R_D = K + hat(Omega) + 1/2 Ra + Rm", dec.residual_recon);
  rep.add("kernel", "K satisfies the algebraic Bianchi identity", dec.residual_b1_kernel);
  rep.add("rm_odd", "Rm is the J-odd part of R_D", dec.residual_rm_formula);
  rep.add("bianchi_ra", "b1(Ra) against the gamma expansion", dec.residual_bianchi_a);
  rep.add("bianchi_rm", "b1(Rm) against the gamma expansion", dec.residual_bianchi_m);

  Form dTD = cx.lc_ops().d(cx.TD);
  double res_b1d = 0.0;
  VectorValuedForms b1 = bianchi_b1(RD);
  for (int x = 0; x < dim; ++x)
    res_b1d = std::max(res_b1d,
                       (b1[x] - D.derivative(x, cx.TD) - 0.5 * dTD.contract(x)).norm());
  rep.add("bianchi_d", "b1(R_D)_X = D_X T + 1/2 X . dT", res_b1d);

  Form del_jt = D.del(cx.jt, {2, 1});  // lambda^{2,2} component
  rep.add("omega_form", "Omega = 3/2 del_D(Jt) + 2 (Jt . Jt)_{2,2} + 1/2 psi- . psi-",
          (dec.omega22 - 1.5 * del_jt - 2.0 * bidegree_project(bullet(cx.jt, cx.jt), {2, 2}) -
           0.5 * bullet(cx.psim, cx.psim))
              .norm());
  rep.add("dtorsion22", "(dT)_{2,2} = 2 Omega - del_D(Jt)",
          (bidegree_project(dTD, {2, 2}) - 2.0 * dec.omega22 + del_jt).norm());

  Form del_psim = D.del(cx.psim, {3, 0});  // lambda^{3,1} component
  double res_ra = 0.0, res_rm = 0.0;
  VectorValuedForms b1a = bianchi_b1(dec.ra), b1m = bianchi_b1(dec.rm);
  for (int x = 0; x < dim; ++x) {
    double sx = j0_sign(x);
    int px = j0_partner(x);
    Form ra_rhs = D.derivative(x, cx.jt) - sx * D.derivative(px, cx.t) -
                  0.5 * del_jt.contract(x);
    res_ra = std::max(res_ra, (0.5 * b1a[x] - ra_rhs).norm());
    Form rm_rhs = D.derivative(x, cx.jt) + sx * D.derivative(px, cx.t) +
                  0.25 * (sx * calJ(del_psim).contract(px) - 2.0 * del_psim.contract(x));
    res_rm = std::max(res_rm, (b1m[x] - rm_rhs).norm());
  }
  rep.add("torsion_ra", "1/2 b1(Ra)_X = D_X(Jt) - D_{JX} t - 1/2 X . del_D(Jt)", res_ra);
  rep.add("torsion_rm",
          "b1(Rm)_X = D_X(Jt) + D_{JX} t + 1/4 (JX . calJ del_D psi- - 2 X . del_D psi-)",
          res_rm);
  return rep;
}

/// The subclass where t = theta ^ omega: closed forms for the curvature
/// components of the characteristic connection through the Lee form.
inline ResidualReport w1w4_suite(const G1Context& cx, double tol = 1e-8) {
  ResidualReport rep;
  rep.suite = "w1w4";
  rep.tol = tol;
  if (cx.gh.w2 > tol || cx.gh.w3 > tol)
    throw std::invalid_argument("w1w4_suite: model is not of class W1+W4");
  int dim = cx.model.dim_m();
  ConnectionOps D = cx.ops();
  Form theta = cx.gh.theta;
  Form jtheta = pullJ(theta);
  Form w = kaehler_form(dim);

  rep.add("lee_product", "t = theta ^ omega", (cx.t - wedge(theta, w)).norm());
  rep.add("lee_del", "del_D theta = 0", D.del(theta, {1, 0}).norm());
  rep.add("psi_delbar", "1/4 delbar_D psi+ = theta ^ psi+ - J theta ^ psi-",
          (0.25 * D.delbar(cx.psip, {3, 0}) - wedge(theta, cx.psip) + wedge(jtheta, cx.psim))
              .norm());
  // middle component of d_D psi+: reported as a diagnostic only, since the
  // formula couples terms that cannot be separated when theta or psi vanishes
  {
    Eigen::VectorXd theta_vec(dim);
    for (int k = 0; k < dim; ++k) theta_vec[k] = theta.coeff(index_mask{1} << k);
    Form mixed = -1.0 * D.del(cx.psip, {3, 0}) -
                 2.0 * (wedge(jtheta, cx.psim) + wedge(theta, cx.psip)) -
                 (2.0 / 3.0) *
                     wedge(D.delbar(theta, {1, 0}) - 2.0 * cx.psim.contract(theta_vec), w);
    rep.add("psi_del", "-del_D psi+ = 2(J theta ^ psi- + theta ^ psi+)"
                       " + 2/3 (delbar_D theta - 2 theta* . psi-) ^ omega",
            mixed.norm(), /*gated=*/false);
  }

  VectorValuedForms gamma;
  for (int x = 0; x < dim; ++x) gamma.push_back(-0.5 * D.derivative(x, cx.TD));
  CurvDecomposition dec = decompose_hermitian_curvature(D.curvature(), gamma);

  Form del_jtheta = D.del(jtheta, {1, 0});  // lambda^{1,1}
  double th2 = inner(theta, theta);
  // the simplified expansions of (Jt . Jt)_{2,2} need m >= 3; in dimension 4
  // they are reported but not gated
  bool deep = dim >= 6;
  rep.add("omega_w1w4",
          "Omega = [3/2 del_D(J theta) + 2 |theta|^2 omega + 4 theta ^ J theta] ^ omega"
          " + 1/2 psi- . psi-",
          (dec.omega22 -
           wedge(1.5 * del_jtheta + 2.0 * th2 * w + 4.0 * wedge(theta, jtheta), w) -
           0.5 * bullet(cx.psim, cx.psim))
              .norm(),
          deep);
  rep.add("jtjt", "(Jt . Jt)_{2,2} = |theta|^2 omega ^ omega + 2 omega ^ theta ^ J theta",
          (bidegree_project(bullet(cx.jt, cx.jt), {2, 2}) - th2 * wedge(w, w) -
           2.0 * wedge(w, wedge(theta, jtheta)))
              .norm(),
          deep);

  CurvatureLike ra_form = CurvatureLike::from_pair_forms(dim, [&](int x, int y) {
    index_mask pair = (index_mask{1} << x) | (index_mask{1} << y);
    return del_jtheta.coeff(pair) * w - w.coeff(pair) * del_jtheta;
  });
  rep.add("ra_w1w4", "Ra = del_D(J theta) (x) omega - omega (x) del_D(J theta)",
          (dec.ra - ra_form).max_abs());

  // Rm = -delbar_D(J theta) (x) omega + ring(S_theta) - tilde(del_D psi-)
  Eigen::MatrixXd J = standard_J(dim);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(dim, dim);
  std::vector<Form> djt;
  for (int x = 0; x < dim; ++x) djt.push_back(D.derivative(x, jtheta));
  for (int x = 0; x < dim; ++x)
    for (int y = 0; y < dim; ++y)
      M(x, y) = 0.5 * (djt[x].coeff(index_mask{1} << y) + djt[y].coeff(index_mask{1} << x));
  Eigen::MatrixXd S = M + J * M * J;  // anti-commuting part, normalized below
  Form delbar_jtheta = D.delbar(jtheta, {1, 0});
  Form del_psim = D.del(cx.psim, {3, 0});
  CurvatureLike rm_form = CurvatureLike::from_pair_forms(dim, [&](int x, int y) {
    index_mask pair = (index_mask{1} << x) | (index_mask{1} << y);
    return (-delbar_jtheta.coeff(pair)) * w;
  });
  rm_form += ring_embed(S) - tilde_embed(del_psim);
  rep.add("rm_w1w4",
          "Rm = -delbar_D(J theta) (x) omega + ring((1 - J)D'(J theta)) - tilde(del_D psi-)",
          (dec.rm - rm_form).max_abs());
  return rep;
}

}  // namespace torsionlab
