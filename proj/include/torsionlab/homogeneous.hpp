#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curvature.hpp"
#include "form.hpp"
#include "operators.hpp"
#include "space.hpp"

namespace torsionlab {

/// Reductive homogeneous model g = h (+) m in a basis adapted to the split:
/// indices 0 .. dim_m-1 span m and form an orthonormal Hermitian frame
/// (metric = id, J = standard_J there); the remaining dim_h indices span h.
/// Lie groups are the dim_h = 0 case. Invariant tensor fields are identified
/// with their constant coefficients in this frame.
class HomogeneousModel {
 public:
  HomogeneousModel(std::string name, int dim_m, int dim_h)
      : name_(std::move(name)),
        dim_m_(dim_m),
        dim_h_(dim_h),
        c_(static_cast<size_t>(dim_g()) * dim_g() * dim_g(), 0.0) {
    if (dim_m < 4 || dim_m > 16 || dim_m % 2 != 0)
      throw std::invalid_argument("HomogeneousModel: dim_m must be even, between 4 and 16");
    if (dim_h < 0) throw std::invalid_argument("HomogeneousModel: negative dim_h");
    basis_labels_.resize(dim_g());
    for (int i = 0; i < dim_g(); ++i)
      basis_labels_[i] = (i < dim_m_ ? "m" + std::to_string(i) : "h" + std::to_string(i - dim_m_));
  }

  const std::string& name() const { return name_; }
  int dim_m() const { return dim_m_; }
  int dim_h() const { return dim_h_; }
  int dim_g() const { return dim_m_ + dim_h_; }
  std::vector<std::string>& basis_labels() { return basis_labels_; }
  const std::vector<std::string>& basis_labels() const { return basis_labels_; }

  double c3(int i, int j, int k) const { return c_[idx(i, j, k)]; }
  void set_c3(int i, int j, int k, double v) {
    c_[idx(i, j, k)] = v;
    c_[idx(j, i, k)] = -v;
  }

  /// [e_i, e_j] as a vector in g.
  Eigen::VectorXd bracket(int i, int j) const {
    Eigen::VectorXd out(dim_g());
    for (int k = 0; k < dim_g(); ++k) out[k] = c3(i, j, k);
    return out;
  }

  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_g());
    for (int i = 0; i < dim_g(); ++i) {
      if (x[i] == 0.0) continue;
      for (int j = 0; j < dim_g(); ++j)
        if (y[j] != 0.0) out += (x[i] * y[j]) * bracket(i, j);
    }
    return out;
  }

  Eigen::VectorXd bracket_m(int i, int j) const { return bracket(i, j).head(dim_m_); }
  Eigen::VectorXd bracket_h(int i, int j) const { return bracket(i, j).tail(dim_h_); }

  /// ad(e_a) restricted and projected to m, as a dim_m x dim_m matrix.
  Eigen::MatrixXd ad_m(int a) const {
    Eigen::MatrixXd out(dim_m_, dim_m_);
    for (int j = 0; j < dim_m_; ++j) out.col(j) = bracket_m(a, j);
    return out;
  }

  double jacobi_residual() const {
    double out = 0.0;
    int n = dim_g();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
          Eigen::VectorXd cyc = bracket(Eigen::VectorXd(bracket(i, j)), unit(k)) +
                                bracket(Eigen::VectorXd(bracket(j, k)), unit(i)) +
                                bracket(Eigen::VectorXd(bracket(k, i)), unit(j));
          out = std::max(out, cyc.cwiseAbs().maxCoeff());
        }
    return out;
  }

  /// [h,h] subset h and [h,m] subset m.
  double reductivity_residual() const {
    double out = 0.0;
    for (int a = dim_m_; a < dim_g(); ++a) {
      for (int b = dim_m_; b < dim_g(); ++b)
        out = std::max(out, bracket_m(a, b).cwiseAbs().maxCoeff());
      for (int j = 0; j < dim_m_; ++j) {
        Eigen::VectorXd h_part = bracket_h(a, j);
        if (dim_h_ > 0) out = std::max(out, h_part.cwiseAbs().maxCoeff());
      }
    }
    return out;
  }

  /// The isotropy action of h on m must be skew and commute with J.
  double isotropy_residual() const {
    double out = 0.0;
    Eigen::MatrixXd J = standard_J(dim_m_);
    for (int a = dim_m_; a < dim_g(); ++a) {
      Eigen::MatrixXd A = ad_m(a);
      out = std::max(out, (A + A.transpose()).cwiseAbs().maxCoeff());
      out = std::max(out, (A * J - J * A).cwiseAbs().maxCoeff());
    }
    return out;
  }

  void validate(double tol = 1e-10) const {
    if (jacobi_residual() > tol) throw std::invalid_argument("model: Jacobi identity fails");
    if (reductivity_residual() > tol) throw std::invalid_argument("model: reductive split fails");
    if (isotropy_residual() > tol)
      throw std::invalid_argument("model: isotropy is not unitary on (m, g, J)");
  }

  /// Change of m-basis by an orthogonal J-commuting matrix (columns = new
  /// frame vectors); h-basis optionally rotated too.
  HomogeneousModel transformed(const Eigen::MatrixXd& qm,
                               const Eigen::MatrixXd* qh = nullptr) const {
    int n = dim_g();
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(n, n);
    T.topLeftCorner(dim_m_, dim_m_) = qm;
    if (qh && dim_h_ > 0) T.bottomRightCorner(dim_h_, dim_h_) = *qh;
    HomogeneousModel out(name_, dim_m_, dim_h_);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Eigen::VectorXd br = T.transpose() * bracket(Eigen::VectorXd(T.col(i)), Eigen::VectorXd(T.col(j)));
        for (int k = 0; k < n; ++k) out.set_c3(i, j, k, br[k]);
      }
    return out;
  }

 private:
  size_t idx(int i, int j, int k) const {
    return (static_cast<size_t>(i) * dim_g() + j) * dim_g() + k;
  }
  Eigen::VectorXd unit(int i) const { return Eigen::VectorXd::Unit(dim_g(), i); }

  std::string name_;
  int dim_m_, dim_h_;
  std::vector<std::string> basis_labels_;
  std::vector<double> c_;
};

/// A metric connection on a model, given by its Nomizu potential: the skew
/// matrix of D_{e_i} acting on invariant objects. Using it, every derivative
/// of an invariant tensor is exact linear algebra.
using ConnectionPotential = std::vector<Eigen::MatrixXd>;

/// Koszul formula on invariant fields:
/// <Nabla_X Y, Z> = 1/2 (<[X,Y]_m,Z> - <[Y,Z]_m,X> + <[Z,X]_m,Y>).
inline ConnectionPotential levi_civita(const HomogeneousModel& model) {
  int n = model.dim_m();
  ConnectionPotential out(n, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out[i](k, j) = 0.5 * (model.c3(i, j, k) - model.c3(j, k, i) + model.c3(k, i, j));
  return out;
}

/// Torsion of a potential as vector values: T(e_i, e_j) = D_i e_j - D_j e_i - [e_i, e_j]_m.
inline Eigen::VectorXd potential_torsion(const HomogeneousModel& model,
                                         const ConnectionPotential& pot, int i, int j) {
  return pot[i].col(j) - pot[j].col(i) - model.bracket_m(i, j);
}

inline double torsion_free_residual(const HomogeneousModel& model, const ConnectionPotential& pot) {
  double out = 0.0;
  for (int i = 0; i < model.dim_m(); ++i)
    for (int j = i + 1; j < model.dim_m(); ++j)
      out = std::max(out, potential_torsion(model, pot, i, j).cwiseAbs().maxCoeff());
  return out;
}

inline double metric_residual(const ConnectionPotential& pot) {
  double out = 0.0;
  for (auto& a : pot) out = std::max(out, (a + a.transpose()).cwiseAbs().maxCoeff());
  return out;
}

/// Derivative of an invariant form along e_i.
inline Form covariant_derivative(const ConnectionPotential& pot, int i, const Form& f) {
  return act(pot[i], f);
}

/// Invariant-form exterior differential d phi = sum_k e^k ^ Nabla_{e_k} phi,
/// for a torsion-free potential. (For a potential with torsion this is d_D.)
inline Form potential_d(const ConnectionPotential& pot, const Form& f) {
  int dim = f.dim();
  Form out(dim, f.degree() + 1);
  for (int k = 0; k < dim; ++k)
    out += wedge(Form::basis(dim, index_mask{1} << k), act(pot[k], f));
  return out;
}

/// Codifferential d* phi = - sum_k e_k . Nabla_{e_k} phi.
inline Form potential_dstar(const ConnectionPotential& pot, const Form& f) {
  int dim = f.dim();
  Form out(dim, f.degree() > 0 ? f.degree() - 1 : 0);
  for (int k = 0; k < dim; ++k) out -= act(pot[k], f).contract(k);
  return out;
}

/// Exterior differential for the Levi-Civita connection of the model.
inline Form ext_d(const HomogeneousModel& model, const Form& f) {
  return potential_d(levi_civita(model), f);
}

/// Defect of h-invariance of a constant-coefficient form. Only h-invariant
/// coefficients define tensor fields on G/H, so differential operators are
/// meaningful exactly when this vanishes.
inline double h_invariance_residual(const HomogeneousModel& model, const Form& f) {
  double out = 0.0;
  for (int a = model.dim_m(); a < model.dim_g(); ++a)
    out = std::max(out, act(model.ad_m(a), f).norm());
  return out;
}

/// Orthogonal projection onto the h-invariant forms of the given degree.
inline Form h_invariant_project(const HomogeneousModel& model, const Form& f) {
  if (model.dim_h() == 0) return f;
  int n = model.dim_m();
  auto masks = degree_masks(n, f.degree());
  int nc = static_cast<int>(masks.size());
  Eigen::MatrixXd A(model.dim_h() * nc, nc);
  for (int col = 0; col < nc; ++col)
    for (int a = 0; a < model.dim_h(); ++a) {
      Form im = act(model.ad_m(model.dim_m() + a), Form::basis(n, masks[col]));
      for (int row = 0; row < nc; ++row) A(a * nc + row, col) = im.coeff(masks[row]);
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  Eigen::VectorXd x(nc);
  for (int i = 0; i < nc; ++i) x[i] = f.coeff(masks[i]);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(nc);
  double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  for (int i = 0; i < nc; ++i)
    if (i >= svd.singularValues().size() || svd.singularValues()(i) <= 1e-9 * std::max(1.0, smax)) {
      Eigen::VectorXd v = svd.matrixV().col(i);
      y += v.dot(x) * v;
    }
  Form out(n, f.degree());
  for (int i = 0; i < nc; ++i) out.set(masks[i], y[i]);
  return out;
}

/// Curvature of an invariant connection, in the sign convention
/// R(X,Y) = -Nabla^2_{X,Y} + Nabla^2_{Y,X}; values R(x,y,z,u) = <R(x,y)z, u>.
inline CurvatureLike potential_curvature(const HomogeneousModel& model,
                                         const ConnectionPotential& pot) {
  int n = model.dim_m();
  CurvatureLike R(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Eigen::VectorXd br = model.bracket(i, j);
      Eigen::MatrixXd pot_br = Eigen::MatrixXd::Zero(n, n);
      for (int k = 0; k < n; ++k) pot_br += br[k] * pot[k];
      for (int a = n; a < model.dim_g(); ++a) pot_br += br[a] * model.ad_m(a);
      Eigen::MatrixXd op = -(pot[i] * pot[j] - pot[j] * pot[i] - pot_br);
      // R(i,j,k,l) = <op e_k, e_l> = op(l,k)
      Form f(n, 2);
      for (int k = 0; k < n; ++k)
        for (int l = k + 1; l < n; ++l)
          f.set((index_mask{1} << k) | (index_mask{1} << l), op(l, k));
      R.set_pair_form(i, j, f);
    }
  return R;
}

/// Ricci contraction <Ric x, y> = sum_i R(x, e_i, y, e_i).
inline Eigen::MatrixXd ricci(const CurvatureLike& R) {
  int n = R.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y)
      for (int i = 0; i < n; ++i) out(x, y) += R(x, i, y, i);
  return out;
}

/// Bundle of derivative operators for one metric connection on a model,
/// including holomorphic type splitting of d_D and the curvature tensor.
class ConnectionOps {
 public:
  ConnectionOps(const HomogeneousModel& model, ConnectionPotential pot)
      : model_(&model), pot_(std::move(pot)) {
    if (metric_residual(pot_) > 1e-10)
      throw std::invalid_argument("ConnectionOps: potential is not metric (values not in Lambda^2)");
  }

  const ConnectionPotential& potential() const { return pot_; }

  Form derivative(int i, const Form& f) const { return act(pot_[i], f); }
  Form d(const Form& f) const { return potential_d(pot_, f); }
  Form dstar(const Form& f) const { return potential_dstar(pot_, f); }

  /// Slot-wise derivative as a Lambda^1 (x) Lambda^p tensor.
  VectorValuedForms full_derivative(const Form& f) const {
    VectorValuedForms out;
    for (int i = 0; i < model_->dim_m(); ++i) out.push_back(derivative(i, f));
    return out;
  }

  /// Type components of d for input of (real, unordered) bidegree (p,q), p>=q:
  /// del raises the smaller index (balances the pair), delbar raises the
  /// larger one. In particular, for f of pure type (p,0) one has
  /// del f in lambda^{p,1} and delbar f in lambda^{p+1}.
  Form del(const Form& f, const BidegreeLabel& in) const {
    return bidegree_project(d(f), {in.p, in.q + 1});
  }
  Form delbar(const Form& f, const BidegreeLabel& in) const {
    return bidegree_project(d(f), {in.p + 1, in.q});
  }

  /// Torsion 3-form T(x,y,z) = <T(x,y), z> (zero unless the potential has torsion).
  Form torsion_form() const {
    int n = model_->dim_m();
    Form T(n, 3);
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Eigen::VectorXd t = potential_torsion(*model_, pot_, i, j);
        for (int k = j + 1; k < n; ++k)
          if (t[k] != 0.0)
            T.add((index_mask{1} << i) | (index_mask{1} << j) | (index_mask{1} << k), t[k]);
      }
    return T;
  }

  /// How far the torsion is from being totally skew-symmetric.
  double torsion_skewness_residual() const {
    int n = model_->dim_m();
    Form T = torsion_form();
    double out = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        Eigen::VectorXd t = potential_torsion(*model_, pot_, i, j);
        Form row = T.contract(i).contract(j);
        for (int k = 0; k < n; ++k)
          out = std::max(out, std::abs(t[k] - row.coeff(index_mask{1} << k)));
      }
    return out;
  }

  CurvatureLike curvature() const { return potential_curvature(*model_, pot_); }

 private:
  const HomogeneousModel* model_;
  ConnectionPotential pot_;
};

/// Direct product of two models: m-frames and h-bases are concatenated
/// (m-block of the second model shifted past the first).
inline HomogeneousModel product(const HomogeneousModel& a, const HomogeneousModel& b) {
  HomogeneousModel out(a.name() + "x" + b.name(), a.dim_m() + b.dim_m(), a.dim_h() + b.dim_h());
  auto map_a = [&](int i) { return i < a.dim_m() ? i : out.dim_m() + (i - a.dim_m()); };
  auto map_b = [&](int i) {
    return i < b.dim_m() ? a.dim_m() + i : out.dim_m() + a.dim_h() + (i - b.dim_m());
  };
  for (int i = 0; i < a.dim_g(); ++i)
    for (int j = i + 1; j < a.dim_g(); ++j)
      for (int k = 0; k < a.dim_g(); ++k)
        if (a.c3(i, j, k) != 0.0) out.set_c3(map_a(i), map_a(j), map_a(k), a.c3(i, j, k));
  for (int i = 0; i < b.dim_g(); ++i)
    for (int j = i + 1; j < b.dim_g(); ++j)
      for (int k = 0; k < b.dim_g(); ++k)
        if (b.c3(i, j, k) != 0.0) out.set_c3(map_b(i), map_b(j), map_b(k), b.c3(i, j, k));
  return out;
}

}  // namespace torsionlab
