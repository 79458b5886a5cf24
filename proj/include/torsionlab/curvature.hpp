#pragma once

#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "form.hpp"
#include "operators.hpp"
#include "space.hpp"

namespace torsionlab {

/// Dense rank-4 tensor R(x,y,z,u), antisymmetric in (x,y) and in (z,u), over
/// the Hermitian frame. This is the ambient type for curvature-like objects;
/// structural properties (pair symmetry, type conditions on either pair) are
/// measured as residuals rather than assumed.
class CurvatureLike {
 public:
  CurvatureLike() = default;
  explicit CurvatureLike(int dim) : dim_(dim), v_(static_cast<size_t>(dim) * dim * dim * dim, 0.0) {}

  int dim() const { return dim_; }

  double operator()(int i, int j, int k, int l) const { return v_[idx(i, j, k, l)]; }

  /// Set the full antisymmetrized orbit of one entry.
  void set(int i, int j, int k, int l, double c) {
    v_[idx(i, j, k, l)] = c;
    v_[idx(j, i, k, l)] = -c;
    v_[idx(i, j, l, k)] = -c;
    v_[idx(j, i, l, k)] = c;
  }

  /// The 2-form R(e_i, e_j) in the second pair of slots.
  Form pair_form(int i, int j) const {
    Form f(dim_, 2);
    for (int k = 0; k < dim_; ++k)
      for (int l = k + 1; l < dim_; ++l) f.set((index_mask{1} << k) | (index_mask{1} << l), (*this)(i, j, k, l));
    return f;
  }

  void set_pair_form(int i, int j, const Form& f) {
    if (f.degree() != 2 && !f.empty()) throw std::invalid_argument("set_pair_form: need a 2-form");
    for (int k = 0; k < dim_; ++k)
      for (int l = k + 1; l < dim_; ++l)
        set(i, j, k, l, f.coeff((index_mask{1} << k) | (index_mask{1} << l)));
  }

  /// Build from a pair-form generator f(i, j) for i < j.
  template <class F>
  static CurvatureLike from_pair_forms(int dim, F&& gen) {
    CurvatureLike R(dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) R.set_pair_form(i, j, gen(i, j));
    return R;
  }

  CurvatureLike& operator+=(const CurvatureLike& o) {
    check(o);
    for (size_t k = 0; k < v_.size(); ++k) v_[k] += o.v_[k];
    return *this;
  }
  CurvatureLike& operator-=(const CurvatureLike& o) {
    check(o);
    for (size_t k = 0; k < v_.size(); ++k) v_[k] -= o.v_[k];
    return *this;
  }
  CurvatureLike& operator*=(double a) {
    for (double& x : v_) x *= a;
    return *this;
  }
  friend CurvatureLike operator+(CurvatureLike a, const CurvatureLike& b) { return a += b; }
  friend CurvatureLike operator-(CurvatureLike a, const CurvatureLike& b) { return a -= b; }
  friend CurvatureLike operator*(double a, CurvatureLike r) { return r *= a; }

  double max_abs() const {
    double out = 0.0;
    for (double x : v_) out = std::max(out, std::abs(x));
    return out;
  }

  double norm() const {
    double out = 0.0;
    for (double x : v_) out += x * x;
    return std::sqrt(out);
  }

  /// max |R(x,y,z,u) - R(z,u,x,y)|.
  double pair_symmetry_residual() const {
    double out = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          for (int l = 0; l < dim_; ++l)
            out = std::max(out, std::abs((*this)(i, j, k, l) - (*this)(k, l, i, j)));
    return out;
  }

  /// max |R(Jx,Jy,.,.) - R(x,y,.,.)|: J-invariance of the first pair.
  double first_pair_j_residual() const {
    double out = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j) {
        double s = static_cast<double>(j0_sign(i) * j0_sign(j));
        for (int k = 0; k < dim_; ++k)
          for (int l = 0; l < dim_; ++l)
            out = std::max(out, std::abs(s * (*this)(j0_partner(i), j0_partner(j), k, l) - (*this)(i, j, k, l)));
      }
    return out;
  }

  /// max deviation of the second-pair 2-forms from type (1,1).
  double second_pair_lambda11_residual() const {
    double out = 0.0;
    for (int i = 0; i < dim_; ++i)
      for (int j = i + 1; j < dim_; ++j) {
        Form f = pair_form(i, j);
        out = std::max(out, (f - bidegree_project(f, {1, 1})).max_abs_coeff());
      }
    return out;
  }

 private:
  size_t idx(int i, int j, int k, int l) const {
    return ((static_cast<size_t>(i) * dim_ + j) * dim_ + k) * dim_ + l;
  }
  void check(const CurvatureLike& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("CurvatureLike: dimension mismatch");
  }

  int dim_ = 0;
  std::vector<double> v_;
};

/// The 2-form F(x, y, ., .) of a 4-form, first two slots frozen.
inline Form four_form_pair(const Form& F, int i, int j) { return F.contract(i).contract(j); }

/// Bianchi map, (b_1 R)_x = sum_i e^i ^ R(e_i, x).
inline VectorValuedForms bianchi_b1(const CurvatureLike& R) {
  int dim = R.dim();
  VectorValuedForms out;
  out.reserve(dim);
  for (int x = 0; x < dim; ++x) {
    Form g(dim, 3);
    for (int i = 0; i < dim; ++i)
      g += wedge(Form::basis(dim, index_mask{1} << i), R.pair_form(i, x));
    out.push_back(g);
  }
  return out;
}

inline double max_norm(const VectorValuedForms& gamma) {
  double out = 0.0;
  for (auto& g : gamma) out = std::max(out, g.norm());
  return out;
}

/// Embedding of a (2,2)-form: hat(O)(x,y) = -1/4 (O(x,y) + O(Jx,Jy)), a
/// one-sided inverse of b_1 on lambda^{2,2}.
inline CurvatureLike hat_embed(const Form& Omega) {
  int dim = Omega.dim();
  return CurvatureLike::from_pair_forms(dim, [&](int i, int j) {
    Form a = four_form_pair(Omega, i, j);
    Form b = static_cast<double>(j0_sign(i) * j0_sign(j)) *
             four_form_pair(Omega, j0_partner(i), j0_partner(j));
    return -0.25 * (a + b);
  });
}

/// Embedding of a (1,3)-form into lambda^2 (x) lambda^{1,1}:
/// check(O)(x,y) = O(x,y) - O(Jx,Jy).
inline CurvatureLike check_embed(const Form& Omega) {
  int dim = Omega.dim();
  return CurvatureLike::from_pair_forms(dim, [&](int i, int j) {
    Form a = four_form_pair(Omega, i, j);
    Form b = static_cast<double>(j0_sign(i) * j0_sign(j)) *
             four_form_pair(Omega, j0_partner(i), j0_partner(j));
    return a - b;
  });
}

/// Embedding of an anti-J-commuting symmetric endomorphism S:
/// ring(S)(x,y) = 1/2 (SJx ^ y + x ^ SJy + Sx ^ Jy + Jx ^ Sy).
inline CurvatureLike ring_embed(const Eigen::MatrixXd& S) {
  int dim = static_cast<int>(S.rows());
  Eigen::MatrixXd J = standard_J(dim);
  return CurvatureLike::from_pair_forms(dim, [&](int i, int j) {
    Eigen::VectorXd x = Eigen::VectorXd::Unit(dim, i), y = Eigen::VectorXd::Unit(dim, j);
    Form f = vector_wedge(S * (J * x), y) + vector_wedge(x, S * (J * y)) +
             vector_wedge(S * x, J * y) + vector_wedge(J * x, S * y);
    return 0.5 * f;
  });
}

/// Second embedding of a (1,3)-form: tilde(O)(x,y) = 1/4 (O(Jx,Jy) - O(x,y)).
inline CurvatureLike tilde_embed(const Form& Omega) {
  int dim = Omega.dim();
  return CurvatureLike::from_pair_forms(dim, [&](int i, int j) {
    Form a = four_form_pair(Omega, i, j);
    Form b = static_cast<double>(j0_sign(i) * j0_sign(j)) *
             four_form_pair(Omega, j0_partner(i), j0_partner(j));
    return 0.25 * (b - a);
  });
}

/// Outcome of splitting an element of S^2(lambda^{1,1}) into a Kaehler-type
/// kernel part and an embedded (2,2)-form.
struct S2Split {
  CurvatureLike kernel_part;  // in Ker b_1, i.e. a Kaehler curvature tensor
  Form omega22;               // the lambda^{2,2} component
  double residual_b1 = 0.0;       // Bianchi residual of kernel_part
  double residual_type22 = 0.0;   // distance of omega22 from lambda^{2,2}
};

/// Unique decomposition Q = K + hat(Omega) with K Kaehler and Omega in
/// lambda^{2,2}: Omega is recovered as 1/4 of the total alternation of b_1 Q.
inline S2Split split_S2_lambda11(const CurvatureLike& Q) {
  S2Split out;
  Form Omega = 0.25 * alternation(bianchi_b1(Q));
  out.residual_type22 = (Omega - bidegree_project(Omega, {2, 2})).norm();
  out.omega22 = Omega;
  out.kernel_part = Q - hat_embed(Omega);
  out.residual_b1 = max_norm(bianchi_b1(out.kernel_part));
  return out;
}

/// Full decomposition of a curvature-like tensor R in Lambda^2 (x) lambda^{1,1}
/// whose pair-symmetry defect is controlled by a tensor gamma in
/// Lambda^1 (x) Lambda^3:
///   R = K + hat(Omega) + 1/2 Ra + Rm.
struct CurvDecomposition {
  CurvatureLike kernel_part;  // Kaehler component K
  Form omega22;               // lambda^{2,2} component Omega
  CurvatureLike ra;           // lambda^{1,1} (x) lambda^{1,1} correction
  CurvatureLike rm;           // lambda^2 (x) lambda^{1,1} component
  Form torsion_four;          // T = a(gamma) and its components
  Form t22, t13, t4;
  VectorValuedForms gamma12;  // slot-wise lambda^{1,2} part of gamma

  double residual_constraint = 0.0;   // defect of the pair-symmetry hypothesis
  double residual_recon = 0.0;        // | R - (K + hat(Omega) + 1/2 Ra + Rm) |
  double residual_rm_formula = 0.0;   // explicit Rm formula vs J-odd part of R
  double residual_bianchi_a = 0.0;    // Bianchi identity for Ra
  double residual_bianchi_m = 0.0;    // Bianchi identity for Rm
  double residual_b1_kernel = 0.0;    // Bianchi residual of the Kaehler part
  double residual_type22 = 0.0;
};

inline double constraint_residual(const CurvatureLike& R, const VectorValuedForms& gamma) {
  int dim = R.dim();
  double out = 0.0;
  auto val = [&](const Form& g, int a, int b, int c) {
    return g.contract(a).contract(b).coeff(index_mask{1} << c);
  };
  for (int x = 0; x < dim; ++x)
    for (int y = x + 1; y < dim; ++y)
      for (int z = 0; z < dim; ++z)
        for (int u = z + 1; u < dim; ++u) {
          double lhs = R(x, y, z, u) - R(z, u, x, y);
          double rhs = val(gamma[x], y, z, u) - val(gamma[y], x, z, u) - val(gamma[z], u, x, y) +
                       val(gamma[u], z, x, y);
          out = std::max(out, std::abs(lhs - rhs));
        }
  return out;
}

inline CurvDecomposition decompose_hermitian_curvature(const CurvatureLike& R,
                                                       const VectorValuedForms& gamma) {
  int dim = R.dim();
  CurvDecomposition out;
  out.residual_constraint = constraint_residual(R, gamma);

  out.torsion_four = alternation(gamma);
  out.t22 = bidegree_project(out.torsion_four, {2, 2});
  out.t13 = bidegree_project(out.torsion_four, {3, 1});
  out.t4 = bidegree_project(out.torsion_four, {4, 0});
  out.gamma12.reserve(dim);
  for (auto& g : gamma) out.gamma12.push_back(bidegree_project(g, {2, 1}));

  auto l11 = [](const Form& a) { return 0.5 * (a + pullJ(a)); };
  auto gpart = [&](int x, int y) {  // (gamma_x y - gamma_y x)_{lambda^{1,1}}
    return l11(gamma[x].contract(y) - gamma[y].contract(x));
  };
  auto jj = [&](int i) { return j0_partner(i); };
  auto js = [&](int i) { return static_cast<double>(j0_sign(i)); };

  // Ra(x,y) = (g_x y - g_y x)_11 + (g_Jx Jy - g_Jy Jx)_11 - 1/2 (T22(x,y) + T22(Jx,Jy))
  out.ra = CurvatureLike::from_pair_forms(dim, [&](int x, int y) {
    Form f = gpart(x, y) + js(x) * js(y) * gpart(jj(x), jj(y));
    f -= 0.5 * (four_form_pair(out.t22, x, y) +
                js(x) * js(y) * four_form_pair(out.t22, jj(x), jj(y)));
    return f;
  });

  // Rm(x,y) = (g_x y - g_y x)_11 - (g_Jx Jy - g_Jy Jx)_11 - 1/2 (T13(x,y) - T13(Jx,Jy))
  out.rm = CurvatureLike::from_pair_forms(dim, [&](int x, int y) {
    Form f = gpart(x, y) - js(x) * js(y) * gpart(jj(x), jj(y));
    f -= 0.5 * (four_form_pair(out.t13, x, y) -
                js(x) * js(y) * four_form_pair(out.t13, jj(x), jj(y)));
    return f;
  });

  // J-odd part of R in the first pair must reproduce Rm
  CurvatureLike modd = CurvatureLike::from_pair_forms(dim, [&](int x, int y) {
    return 0.5 * (R.pair_form(x, y) - js(x) * js(y) * R.pair_form(jj(x), jj(y)));
  });
  out.residual_rm_formula = (modd - out.rm).max_abs();

  // J-even part minus 1/2 Ra sits in S^2(lambda^{1,1}); split it
  CurvatureLike even = CurvatureLike::from_pair_forms(dim, [&](int x, int y) {
    return 0.5 * (R.pair_form(x, y) + js(x) * js(y) * R.pair_form(jj(x), jj(y)));
  });
  S2Split split = split_S2_lambda11(even - 0.5 * out.ra);
  out.kernel_part = split.kernel_part;
  out.omega22 = split.omega22;
  out.residual_b1_kernel = split.residual_b1;
  out.residual_type22 = split.residual_type22;

  CurvatureLike recon = out.kernel_part + hat_embed(out.omega22) + 0.5 * out.ra + out.rm;
  out.residual_recon = (recon - R).max_abs();

  // Bianchi identities with the explicit correction forms A_1 ... A_4
  VectorValuedForms jg12 = pullJ_slots(out.gamma12);
  Form A1 = alternation(out.gamma12) + alternation_c(jg12) - 4.0 * out.t22;
  Form A2 = alternation_c(out.gamma12) - alternation(jg12);
  Form A3 = alternation(out.gamma12) - alternation_c(jg12) - 2.0 * out.t13;
  Form A4 = alternation(jg12) + alternation_c(out.gamma12) - calJ(out.t13);

  VectorValuedForms b1a = bianchi_b1(out.ra), b1m = bianchi_b1(out.rm);
  for (int x = 0; x < dim; ++x) {
    Form ra_rhs = -2.0 * (out.gamma12[x] + js(x) * pullJ(out.gamma12[jj(x)])) -
                  0.5 * A1.contract(x) - 0.5 * js(x) * A2.contract(jj(x));
    out.residual_bianchi_a = std::max(out.residual_bianchi_a, (b1a[x] - ra_rhs).norm());
    Form rm_rhs = -(out.gamma12[x] - js(x) * pullJ(out.gamma12[jj(x)])) -
                  0.5 * A3.contract(x) + 0.5 * js(x) * A4.contract(jj(x));
    out.residual_bianchi_m = std::max(out.residual_bianchi_m, (b1m[x] - rm_rhs).norm());
  }
  return out;
}

}  // namespace torsionlab
