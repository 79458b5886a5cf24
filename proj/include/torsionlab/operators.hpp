#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "form.hpp"

namespace torsionlab {

/// Real bidegree label for the type decomposition of p-forms. Unordered: (p,q)
/// and (q,p) label the same real subspace, so p >= q is enforced.
struct BidegreeLabel {
  int p = 0;
  int q = 0;
  BidegreeLabel() = default;
  BidegreeLabel(int p_, int q_) : p(p_), q(q_) {
    if (p < q) std::swap(p, q);
    if (q < 0) throw std::invalid_argument("BidegreeLabel: negative part");
  }
  int degree() const { return p + q; }
  /// Eigenvalue of calJ^2 on this component.
  double eigenvalue() const { return -static_cast<double>((p - q) * (p - q)); }
  bool operator==(const BidegreeLabel& o) const { return p == o.p && q == o.q; }
};

/// All bidegree labels occurring in degree s over a space of complex dimension m.
inline std::vector<BidegreeLabel> bidegree_labels(int s, int m) {
  std::vector<BidegreeLabel> out;
  for (int q = s / 2; q >= 0; --q) {
    int p = s - q;
    if (p <= m && q <= m) out.emplace_back(p, q);
  }
  return out;
}

/// The Kaehler form of the standard frame: sum_k e^{2k} ^ e^{2k+1}.
inline Form kaehler_form(int dim) {
  Form w(dim, 2);
  for (int k = 0; k + 1 < dim; k += 2) w.set((index_mask{1} << k) | (index_mask{1} << (k + 1)), 1.0);
  return w;
}

/// Derivation extension of J: calJ f = sum_i e^i ^ (J e_i . f), equivalently
/// (calJ f)(X_1,...,X_p) = sum_k f(X_1,...,J X_k,...,X_p).
inline Form calJ(const Form& f) {
  Form out(f.dim(), f.degree());
  for (int i = 0; i < f.dim(); ++i) {
    Form c = f.contract(j0_partner(i));
    if (c.empty()) continue;
    out += static_cast<double>(j0_sign(i)) * wedge(Form::basis(f.dim(), index_mask{1} << i), c);
  }
  return out;
}

/// Multiplicative pullback by J: (Jf)(X_1,...,X_p) = f(J X_1,...,J X_p).
/// On the mask basis this is the pair swap 2k <-> 2k+1 with a sign
/// (-1)^{# even indices whose partner is absent}; complete pairs are fixed.
inline Form pullJ(const Form& f) {
  Form out(f.dim(), f.degree());
  for (auto& [s, c] : f.terms()) {
    index_mask t = 0;
    int sign = 1;
    for (index_mask rest = s; rest != 0; rest &= rest - 1) {
      int i = std::countr_zero(rest);
      t |= index_mask{1} << j0_partner(i);
      if (!(i & 1) && !(s & (index_mask{1} << (i + 1)))) sign = -sign;
    }
    out.add(t, sign * c);
  }
  return out;
}

/// Projection of f onto the calJ^2-eigenspace labelled (p,q), computed by
/// Lagrange interpolation across the eigenvalues present in this degree.
inline Form bidegree_project(const Form& f, const BidegreeLabel& label) {
  int m = f.dim() / 2;
  if (label.degree() != f.degree())
    throw std::invalid_argument("bidegree_project: degree mismatch");
  auto labels = bidegree_labels(f.degree(), m);
  bool found = false;
  for (auto& l : labels) found = found || l == label;
  if (!found) return Form(f.dim(), f.degree());
  Form out = f;
  double mu = label.eigenvalue();
  for (auto& l : labels) {
    if (l == label) continue;
    double nu = l.eigenvalue();
    out = (1.0 / (mu - nu)) * (calJ(calJ(out)) - nu * out);
  }
  return out;
}

/// Projection onto lambda^p = lambda^{p,0}.
inline Form lambda_p_project(const Form& f) { return bidegree_project(f, {f.degree(), 0}); }

/// Involution J on lambda^p: f(J.,...,J.) restricted there equals calJ/p.
inline Form lambda_p_J(const Form& f) {
  if (f.degree() == 0) return f;
  return (1.0 / f.degree()) * calJ(f);
}

/// Lefschetz operator L = omega ^ .
inline Form lefschetz(const Form& f) { return wedge(kaehler_form(f.dim()), f); }

/// Metric adjoint of L: contraction with omega.
inline Form lefschetz_adjoint(const Form& f) {
  Form out(f.dim(), f.degree() >= 2 ? f.degree() - 2 : 0);
  if (f.degree() < 2) return out;
  for (int k = 0; k + 1 < f.dim(); k += 2) out += f.contract(k).contract(k + 1);
  return out;
}

/// Commutator-type pairing [a, f] = sum_i (e_i . a) ^ (e_i . f) for a 2-form a.
/// Coincides with the natural so-action of the skew endomorphism of a; in
/// particular [omega, f] = -calJ f.
inline Form commutator2(const Form& a, const Form& f) {
  if (a.degree() != 2) throw std::invalid_argument("commutator2: first argument must be a 2-form");
  Form out(f.dim(), f.degree());
  for (int i = 0; i < f.dim(); ++i) {
    Form ca = a.contract(i), cf = f.contract(i);
    if (!ca.empty() && !cf.empty()) out += wedge(ca, cf);
  }
  return out;
}

/// Bullet product f1 . f2 = sum_k (e_k . f1) ^ (e_k . f2).
inline Form bullet(const Form& f1, const Form& f2) {
  if (f1.degree() == 0 || f2.degree() == 0) return Form(f1.dim(), 0);
  Form out(f1.dim(), f1.degree() + f2.degree() - 2);
  for (int k = 0; k < f1.dim(); ++k) {
    Form c1 = f1.contract(k), c2 = f2.contract(k);
    if (!c1.empty() && !c2.empty()) out += wedge(c1, c2);
  }
  return out;
}

/// Natural so-action of a skew endomorphism A on forms:
/// (act(A,f))(X_1,...,X_p) = -sum_k f(X_1,...,A X_k,...,X_p).
inline Form act(const Eigen::MatrixXd& A, const Form& f) {
  Form out(f.dim(), f.degree());
  for (int k = 0; k < f.dim(); ++k) {
    Form c = f.contract(Eigen::VectorXd(A.col(k)));
    if (!c.empty()) out -= wedge(Form::basis(f.dim(), index_mask{1} << k), c);
  }
  return out;
}

/// Skew endomorphism of a 2-form: <A x, y> = a(x, y).
inline Eigen::MatrixXd two_form_matrix(const Form& a) {
  if (a.degree() != 2) throw std::invalid_argument("two_form_matrix: need a 2-form");
  int n = a.dim();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  for (auto& [s, c] : a.terms()) {
    auto ij = mask_indices(s);
    A(ij[1], ij[0]) = c;   // <A e_i, e_j> = a(e_i, e_j) = c
    A(ij[0], ij[1]) = -c;
  }
  return A;
}

inline Form matrix_two_form(const Eigen::MatrixXd& A) {
  int n = static_cast<int>(A.rows());
  Form a(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double c = 0.5 * (A(j, i) - A(i, j));
      if (c != 0.0) a.set((index_mask{1} << i) | (index_mask{1} << j), c);
    }
  return a;
}

/// A tensor in Lambda^1 (x) Lambda^p, stored as the list X -> gamma_X over the frame.
using VectorValuedForms = std::vector<Form>;

/// Total alternation a(gamma) = sum_k e^k ^ gamma_{e_k}.
inline Form alternation(const VectorValuedForms& gamma) {
  if (gamma.empty()) throw std::invalid_argument("alternation: empty tensor");
  int dim = gamma[0].dim();
  Form out(dim, gamma[0].degree() + 1);
  for (int k = 0; k < dim; ++k)
    out += wedge(Form::basis(dim, index_mask{1} << k), gamma[k]);
  return out;
}

/// Twisted alternation a^c(gamma) = sum_k e^k ^ gamma_{J e_k}.
inline Form alternation_c(const VectorValuedForms& gamma) {
  int dim = gamma[0].dim();
  Form out(dim, gamma[0].degree() + 1);
  for (int k = 0; k < dim; ++k)
    out += static_cast<double>(j0_sign(k)) *
           wedge(Form::basis(dim, index_mask{1} << k), gamma[j0_partner(k)]);
  return out;
}

/// Slot-wise pullback by J: (J gamma)_X = J(gamma_X).
inline VectorValuedForms pullJ_slots(const VectorValuedForms& gamma) {
  VectorValuedForms out;
  out.reserve(gamma.size());
  for (auto& g : gamma) out.push_back(pullJ(g));
  return out;
}

}  // namespace torsionlab
