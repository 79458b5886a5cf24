#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "almost_hermitian.hpp"
#include "curvature.hpp"
#include "form.hpp"
#include "homogeneous.hpp"
#include "operators.hpp"
#include "rng.hpp"
#include "space.hpp"

namespace torsionlab {

struct ValidationFailed : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CannotCertify : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Skew endomorphism psi_v of the 3-form psi: <psi_v x, y> = psi(v, x, y).
inline Eigen::MatrixXd psi_endo(const Form& psi, const Eigen::VectorXd& v) {
  return two_form_matrix(psi.contract(v));
}

/// The vector psi(x, y) with <psi(x,y), z> = psi(x, y, z).
inline Eigen::VectorXd psi_vector(const Form& psi, const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y) {
  Form f = psi.contract(x).contract(y);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(psi.dim());
  for (auto& [s, c] : f.terms()) out[mask_indices(s)[0]] = c;
  return out;
}

/// The matrix M(z, u) = R(x, y, z, u) for arbitrary vectors in the first pair.
inline Eigen::MatrixXd curvature_pair_matrix(const CurvatureLike& R, const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& y) {
  int n = R.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double c = x[i] * y[j];
      if (c == 0.0) continue;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) out(k, l) += c * R(i, j, k, l);
    }
  return out;
}

/// Pointwise nearly-Kaehler structure data: a Hermitian frame carrying a
/// nonzero 3-form of pure type (3,0)+(0,3) and a pair-symmetric curvature-like
/// tensor with J-invariant 2-form values whose (2,2) part is half the bullet
/// square of the 3-form, commuting with it as a family of skew endomorphisms.
struct HolonomySystem {
  int dim = 0;
  Form psi_plus;
  CurvatureLike R;

  double residual_pair_symmetry = 0.0;  // |R(x,y,z,u) - R(z,u,x,y)|
  double residual_first_pair = 0.0;     // J-invariance of R in the first pair
  double residual_second_pair = 0.0;    // (1,1)-type of R in the second pair
  double residual_type3 = 0.0;          // distance of psi from type (3,0)+(0,3)
  double residual_structure = 0.0;      // |(2,2) part of R - 1/2 psi . psi|
  double residual_commute = 0.0;        // max |[R(x,y), psi]|
  double strict_gap = 0.0;              // smallest singular value of v -> v . psi

  bool strict(double tol = 1e-8) const { return strict_gap > tol; }
};

inline HolonomySystem build_system(const Form& psi_plus, const CurvatureLike& R,
                                   double tol = 1e-8) {
  HolonomySystem sys;
  sys.dim = R.dim();
  sys.psi_plus = psi_plus;
  sys.R = R;
  if (psi_plus.dim() != sys.dim)
    throw ValidationFailed("build_system: dimension mismatch between the 3-form and the curvature");
  if (psi_plus.empty() || psi_plus.norm() == 0.0)
    throw ValidationFailed("build_system: a non-zero 3-form is required");
  if (psi_plus.degree() != 3) throw ValidationFailed("build_system: the form must have degree 3");

  sys.residual_type3 = (psi_plus - lambda_p_project(psi_plus)).norm();
  if (sys.residual_type3 > tol)
    throw ValidationFailed("build_system: the 3-form must have pure type (3,0)+(0,3)");

  sys.residual_pair_symmetry = R.pair_symmetry_residual();
  if (sys.residual_pair_symmetry > tol)
    throw ValidationFailed("build_system: the curvature must be symmetric in its two pairs");
  sys.residual_first_pair = R.first_pair_j_residual();
  sys.residual_second_pair = R.second_pair_lambda11_residual();
  if (std::max(sys.residual_first_pair, sys.residual_second_pair) > tol)
    throw ValidationFailed("build_system: the curvature values must be J-invariant 2-forms");

  S2Split split = split_S2_lambda11(R);
  sys.residual_structure = (split.omega22 - 0.5 * bullet(psi_plus, psi_plus)).norm();
  if (sys.residual_structure > tol)
    throw ValidationFailed(
        "build_system: the (2,2) component of the curvature must be half the bullet square of "
        "the 3-form");

  for (int i = 0; i < sys.dim; ++i)
    for (int j = i + 1; j < sys.dim; ++j) {
      double res = act(two_form_matrix(R.pair_form(i, j)), psi_plus).norm();
      sys.residual_commute = std::max(sys.residual_commute, res);
    }
  if (sys.residual_commute > tol)
    throw ValidationFailed("build_system: the curvature values must commute with the 3-form");

  // Smallest singular value of v -> v . psi certifies non-degeneracy.
  Eigen::MatrixXd M(sys.dim * sys.dim, sys.dim);
  for (int v = 0; v < sys.dim; ++v) {
    Eigen::MatrixXd P = psi_endo(psi_plus, Eigen::VectorXd::Unit(sys.dim, v));
    M.col(v) = Eigen::Map<Eigen::VectorXd>(P.data(), sys.dim * sys.dim);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  sys.strict_gap = svd.singularValues().tail(1)[0];
  return sys;
}

/// System of a nearly-Kaehler homogeneous model: the 3-form is the (3,0) part
/// of d omega and the curvature is that of the torsion-parallel Hermitian
/// connection at the base point.
inline HolonomySystem build_system(const HomogeneousModel& model, double tol = 1e-8) {
  AHPoint p = ah_point(model);
  TorsionData td = torsion_data(p);
  if (td.t.norm() > tol)
    throw ValidationFailed(
        "build_system: the model is not nearly-Kaehler (the (1,2) part of d omega does not "
        "vanish)");
  ConnectionOps ops(model, characteristic_potential(model));
  return build_system(td.psi_plus, ops.curvature(), tol);
}

namespace detail {

inline Eigen::VectorXd vec_of(const Eigen::MatrixXd& A) {
  return Eigen::Map<const Eigen::VectorXd>(A.data(), A.size());
}

inline Eigen::MatrixXd mat_of(const Eigen::VectorXd& v, int n) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), n, n);
}

}  // namespace detail

/// Linear span of matrices with an orthonormal (Frobenius) basis, optionally
/// certified closed under the commutator bracket.
struct LieAlgebraSpan {
  std::vector<Eigen::MatrixXd> basis;
  bool closed = false;
  double closure_residual = 0.0;  // largest bracket component outside the span

  int dim() const { return static_cast<int>(basis.size()); }

  /// Frobenius norm of the component of A outside the span.
  double contains(const Eigen::MatrixXd& A) const {
    Eigen::VectorXd v = detail::vec_of(A);
    for (auto& b : basis) v -= detail::vec_of(b).dot(v) * detail::vec_of(b);
    return v.norm();
  }
};

/// Orthonormal basis of the span of the given matrices (SVD rank truncation).
inline LieAlgebraSpan span_of(const std::vector<Eigen::MatrixXd>& gens, int dim,
                              double rel_tol = 1e-9) {
  LieAlgebraSpan out;
  if (gens.empty()) return out;
  Eigen::MatrixXd M(dim * dim, static_cast<int>(gens.size()));
  for (int k = 0; k < static_cast<int>(gens.size()); ++k) M.col(k) = detail::vec_of(gens[k]);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  double cut = rel_tol * std::max(1.0, svd.singularValues()[0]);
  for (int k = 0; k < svd.singularValues().size(); ++k)
    if (svd.singularValues()[k] > cut)
      out.basis.push_back(detail::mat_of(svd.matrixU().col(k), dim));
  return out;
}

/// Smallest Lie algebra containing the generators: the span is enlarged by
/// commutators until stable.
inline LieAlgebraSpan lie_closure(std::vector<Eigen::MatrixXd> gens, int dim,
                                 double tol = 1e-10) {
  LieAlgebraSpan span = span_of(gens, dim);
  int cap = dim * dim;
  for (int iter = 0; iter < cap; ++iter) {
    std::vector<Eigen::MatrixXd> fresh;
    double worst = 0.0;
    for (size_t a = 0; a < span.basis.size(); ++a)
      for (size_t b = a + 1; b < span.basis.size(); ++b) {
        Eigen::MatrixXd br = span.basis[a] * span.basis[b] - span.basis[b] * span.basis[a];
        double res = span.contains(br);
        worst = std::max(worst, res);
        if (res > tol) fresh.push_back(br);
      }
    if (fresh.empty()) {
      span.closed = true;
      span.closure_residual = worst;
      return span;
    }
    std::vector<Eigen::MatrixXd> all = span.basis;
    all.insert(all.end(), fresh.begin(), fresh.end());
    span = span_of(all, dim);
  }
  throw CannotCertify("lie_closure: bracket closure did not stabilise");
}

/// Lie algebra generated by the curvature values R(x, y) over the frame.
inline LieAlgebraSpan holonomy_algebra(const HolonomySystem& sys) {
  std::vector<Eigen::MatrixXd> gens;
  for (int i = 0; i < sys.dim; ++i)
    for (int j = i + 1; j < sys.dim; ++j)
      gens.push_back(two_form_matrix(sys.R.pair_form(i, j)));
  return lie_closure(std::move(gens), sys.dim);
}

/// Stabiliser algebra of the 3-form: all skew endomorphisms A with
/// act(A, psi) = 0, computed as an SVD kernel over a basis of 2-forms.
inline LieAlgebraSpan isotropy_algebra(const HolonomySystem& sys) {
  int n = sys.dim;
  std::vector<index_mask> masks = degree_masks(n, 2);
  std::vector<index_mask> rows = degree_masks(n, 3);
  Eigen::MatrixXd A(static_cast<int>(rows.size()), static_cast<int>(masks.size()));
  for (int c = 0; c < static_cast<int>(masks.size()); ++c) {
    Form im = act(two_form_matrix(Form::basis(n, masks[c])), sys.psi_plus);
    for (int r = 0; r < static_cast<int>(rows.size()); ++r) A(r, c) = im.coeff(rows[r]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  double cut = 1e-9 * std::max(1.0, svd.singularValues()[0]);
  std::vector<Eigen::MatrixXd> kernel;
  for (int k = 0; k < static_cast<int>(masks.size()); ++k) {
    double sv = k < svd.singularValues().size() ? svd.singularValues()[k] : 0.0;
    if (sv > cut) continue;
    Form f(n, 2);
    for (int c = 0; c < static_cast<int>(masks.size()); ++c) f.set(masks[c], svd.matrixV()(c, k));
    kernel.push_back(two_form_matrix(f));
  }
  return lie_closure(std::move(kernel), n);
}

/// Symmetric matrices commuting with every generator (and with J): the
/// commutant that detects invariant subspaces of the holonomy representation.
inline std::vector<Eigen::MatrixXd> symmetric_commutant(const std::vector<Eigen::MatrixXd>& gens,
                                                        int n) {
  std::vector<std::pair<int, int>> sym_idx;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) sym_idx.emplace_back(a, b);
  int nc = static_cast<int>(sym_idx.size());

  std::vector<Eigen::MatrixXd> ops = gens;
  ops.push_back(standard_J(n));
  Eigen::MatrixXd C(static_cast<int>(ops.size()) * n * n, nc);
  for (int c = 0; c < nc; ++c) {
    auto [a, b] = sym_idx[c];
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(n, n);
    E(a, b) = E(b, a) = (a == b) ? 1.0 : std::sqrt(0.5);
    for (int k = 0; k < static_cast<int>(ops.size()); ++k) {
      Eigen::MatrixXd br = E * ops[k] - ops[k] * E;
      C.block(k * n * n, c, n * n, 1) = detail::vec_of(br);
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeFullV);
  double cut = 1e-9 * std::max(1.0, svd.singularValues()[0]);
  std::vector<Eigen::MatrixXd> out;
  for (int k = 0; k < nc; ++k) {
    double sv = k < svd.singularValues().size() ? svd.singularValues()[k] : 0.0;
    if (sv > cut) continue;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (int c = 0; c < nc; ++c) {
      auto [a, b] = sym_idx[c];
      double w = (a == b) ? 1.0 : std::sqrt(0.5);
      S(a, b) += w * svd.matrixV()(c, k);
      if (a != b) S(b, a) += w * svd.matrixV()(c, k);
    }
    out.push_back(S);
  }
  return out;
}

/// Orthonormal J-adapted basis (u, Ju, ...) of the J-invariant subspace
/// spanned by the columns of B.
inline Eigen::MatrixXd j_adapt(const Eigen::MatrixXd& B) {
  int n = static_cast<int>(B.rows());
  int k = static_cast<int>(B.cols());
  if (k % 2 != 0) throw std::invalid_argument("j_adapt: odd-dimensional subspace");
  Eigen::MatrixXd J = standard_J(n);
  Eigen::MatrixXd P = B * B.transpose();
  Eigen::MatrixXd out(n, k);
  int have = 0;
  while (have < k) {
    Eigen::MatrixXd Q = P - out.leftCols(have) * out.leftCols(have).transpose();
    int best = 0;
    for (int i = 1; i < n; ++i)
      if (Q.col(i).norm() > Q.col(best).norm()) best = i;
    Eigen::VectorXd u = Q.col(best);
    if (u.norm() < 1e-10) throw std::invalid_argument("j_adapt: subspace is not J-invariant");
    u.normalize();
    out.col(have) = u;
    Eigen::VectorXd v =
        J * u - out.leftCols(have + 1) * (out.leftCols(have + 1).transpose() * (J * u));
    if (v.norm() < 1e-10) throw std::invalid_argument("j_adapt: subspace is not J-invariant");
    out.col(have + 1) = v.normalized();
    have += 2;
  }
  return out;
}

enum class SubspaceKind { generic, isotropic, null_space, special };

inline const char* to_string(SubspaceKind k) {
  switch (k) {
    case SubspaceKind::generic: return "generic";
    case SubspaceKind::isotropic: return "isotropic";
    case SubspaceKind::null_space: return "null";
    case SubspaceKind::special: return "special";
  }
  return "?";
}

/// A J-invariant subspace with the residuals certifying its type relative to
/// the 3-form: isotropic (psi(V,V) inside V), null (psi(V,V) = 0), special
/// (null, and psi(H,H) fills V for the orthogonal complement H).
struct SubspaceRecord {
  Eigen::MatrixXd basis;  // J-adapted orthonormal columns
  SubspaceKind kind = SubspaceKind::generic;
  double residual_J = 0.0;          // J-invariance defect
  double residual_h = 0.0;          // holonomy invariance defect (when available)
  double residual_null = 0.0;       // max |psi(v, w)|
  double residual_isotropic = 0.0;  // max |psi(v, w) outside V|
  double residual_contain = 0.0;    // max |psi(h, h') outside V|
  double onto_gap = 0.0;            // k-th singular value of {psi(h, h')} inside V
  double residual_vh = 0.0;         // max |psi(v, h) outside H|
  double vh_onto_gap = 0.0;         // smallest singular value of {psi(v, h)} inside H
};

inline SubspaceRecord classify_subspace(const HolonomySystem& sys, const Eigen::MatrixXd& basis,
                                        double tol = 1e-8) {
  int n = sys.dim;
  int k = static_cast<int>(basis.cols());
  if (k <= 0 || k >= n) throw std::invalid_argument("classify_subspace: subspace must be proper");
  SubspaceRecord rec;
  rec.basis = basis;
  Eigen::MatrixXd P = basis * basis.transpose();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n) - P;
  rec.residual_J = (Q * standard_J(n) * basis).norm();
  if (rec.residual_J > tol) throw std::invalid_argument("classify_subspace: not J-invariant");

  for (int a = 0; a < k; ++a)
    for (int b = a + 1; b < k; ++b) {
      Eigen::VectorXd w = psi_vector(sys.psi_plus, basis.col(a), basis.col(b));
      rec.residual_null = std::max(rec.residual_null, w.norm());
      rec.residual_isotropic = std::max(rec.residual_isotropic, (Q * w).norm());
    }

  Eigen::MatrixXd H;
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q, Eigen::ComputeThinU);
    int rank = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 0.5) ++rank;
    H = j_adapt(svd.matrixU().leftCols(rank));
  }
  int hk = static_cast<int>(H.cols());
  Eigen::MatrixXd hh(n, hk * (hk - 1) / 2);
  int col = 0;
  for (int a = 0; a < hk; ++a)
    for (int b = a + 1; b < hk; ++b) {
      Eigen::VectorXd w = psi_vector(sys.psi_plus, H.col(a), H.col(b));
      rec.residual_contain = std::max(rec.residual_contain, (Q * w).norm());
      hh.col(col++) = P * w;
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_hh(basis.transpose() * hh);
  rec.onto_gap = svd_hh.singularValues().size() >= k ? svd_hh.singularValues()[k - 1] : 0.0;

  Eigen::MatrixXd vh(n, k * hk);
  col = 0;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < hk; ++b) {
      Eigen::VectorXd w = psi_vector(sys.psi_plus, basis.col(a), H.col(b));
      rec.residual_vh = std::max(rec.residual_vh, (P * w).norm());
      vh.col(col++) = Q * w;
    }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd_vh(H.transpose() * vh);
  rec.vh_onto_gap = svd_vh.singularValues().size() >= hk ? svd_vh.singularValues()[hk - 1] : 0.0;

  if (rec.residual_null <= tol && rec.residual_contain <= tol && rec.onto_gap > 1e-6)
    rec.kind = SubspaceKind::special;
  else if (rec.residual_null <= tol)
    rec.kind = SubspaceKind::null_space;
  else if (rec.residual_isotropic <= tol)
    rec.kind = SubspaceKind::isotropic;
  else
    rec.kind = SubspaceKind::generic;
  return rec;
}

/// Decomposition of V into holonomy-invariant J-invariant subspaces: the
/// eigenspaces of a seeded random element of the symmetric commutant of the
/// holonomy algebra. An irreducible representation yields a single record.
inline std::vector<SubspaceRecord> invariant_splitting(const HolonomySystem& sys,
                                                       std::uint64_t seed = 0,
                                                       double tol = 1e-8) {
  int n = sys.dim;
  LieAlgebraSpan h = holonomy_algebra(sys);
  std::vector<Eigen::MatrixXd> comm = symmetric_commutant(h.basis, n);
  Rng rng(seed);
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  for (auto& K : comm) S += rng.normal() * K;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);

  std::vector<SubspaceRecord> out;
  int from = 0;
  for (int i = 1; i <= n; ++i) {
    if (i < n && eig.eigenvalues()[i] - eig.eigenvalues()[i - 1] < 1e-7) continue;
    Eigen::MatrixXd block = eig.eigenvectors().middleCols(from, i - from);
    from = i;
    SubspaceRecord rec;
    if (static_cast<int>(block.cols()) == n) {
      rec.basis = j_adapt(block);
      rec.kind = SubspaceKind::generic;  // the whole space: no proper classification
    } else {
      rec = classify_subspace(sys, j_adapt(block), tol);
    }
    for (auto& hb : h.basis)
      rec.residual_h = std::max(
          rec.residual_h,
          ((Eigen::MatrixXd::Identity(n, n) - rec.basis * rec.basis.transpose()) * hb * rec.basis)
              .norm());
    out.push_back(std::move(rec));
  }
  return out;
}

/// Union of the records into clusters coupled through the 3-form: records land
/// in the same cluster whenever psi does not vanish on a pair of vectors taken
/// from the two of them. The clusters realise a product splitting with psi
/// supported block-diagonally.
inline std::vector<Eigen::MatrixXd> psi_clusters(const HolonomySystem& sys,
                                                 const std::vector<SubspaceRecord>& records,
                                                 double tol = 1e-8) {
  int m = static_cast<int>(records.size());
  std::vector<int> parent(m);
  for (int i = 0; i < m; ++i) parent[i] = i;
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      bool coupled = false;
      for (int a = 0; a < records[i].basis.cols() && !coupled; ++a)
        for (int b = 0; b < records[j].basis.cols() && !coupled; ++b)
          if (psi_vector(sys.psi_plus, records[i].basis.col(a), records[j].basis.col(b)).norm() >
              tol)
            coupled = true;
      if (coupled) parent[find(i)] = find(j);
    }
  std::vector<Eigen::MatrixXd> out;
  std::vector<int> roots;
  for (int i = 0; i < m; ++i)
    if (find(i) == i) roots.push_back(i);
  for (int r : roots) {
    int cols = 0;
    for (int i = 0; i < m; ++i)
      if (find(i) == r) cols += static_cast<int>(records[i].basis.cols());
    Eigen::MatrixXd B(sys.dim, cols);
    int at = 0;
    for (int i = 0; i < m; ++i)
      if (find(i) == r) {
        B.middleCols(at, records[i].basis.cols()) = records[i].basis;
        at += static_cast<int>(records[i].basis.cols());
      }
    out.push_back(B);
  }
  return out;
}

/// Restriction of the system to the J-invariant subspace with J-adapted
/// orthonormal basis B; revalidates all structural invariants.
inline HolonomySystem restrict_system(const HolonomySystem& sys, const Eigen::MatrixXd& B,
                                      double tol = 1e-8) {
  int k = static_cast<int>(B.cols());
  Form psi(k, 3);
  for (index_mask s : degree_masks(k, 3)) {
    std::vector<int> idx = mask_indices(s);
    Eigen::VectorXd w = psi_vector(sys.psi_plus, B.col(idx[0]), B.col(idx[1]));
    psi.set(s, w.dot(B.col(idx[2])));
  }
  CurvatureLike R = CurvatureLike::from_pair_forms(k, [&](int a, int b) {
    Eigen::MatrixXd W = curvature_pair_matrix(sys.R, B.col(a), B.col(b));
    Form f(k, 2);
    for (int c = 0; c < k; ++c)
      for (int d = c + 1; d < k; ++d)
        f.set((index_mask{1} << c) | (index_mask{1} << d), B.col(c).dot(W * B.col(d)));
    return f;
  });
  return build_system(psi, R, tol);
}

/// Pullback of the system under an orthogonal J-commuting map Q.
inline HolonomySystem transform_system(const HolonomySystem& sys, const Eigen::MatrixXd& Q,
                                       double tol = 1e-8) {
  if ((Q.transpose() * Q - Eigen::MatrixXd::Identity(sys.dim, sys.dim)).norm() > 1e-10 ||
      (Q * standard_J(sys.dim) - standard_J(sys.dim) * Q).norm() > 1e-10)
    throw std::invalid_argument("transform_system: need an orthogonal J-commuting map");
  return restrict_system(sys, Q, tol);
}

/// Orthogonal direct sum of two systems (frames concatenated).
inline HolonomySystem direct_sum_system(const HolonomySystem& a, const HolonomySystem& b,
                                        double tol = 1e-8) {
  int n = a.dim + b.dim;
  Form psi(n, 3);
  for (auto& [s, c] : a.psi_plus.terms()) psi.set(s, c);
  for (auto& [s, c] : b.psi_plus.terms()) psi.set(s << a.dim, c);
  CurvatureLike R(n);
  for (int i = 0; i < a.dim; ++i)
    for (int j = i + 1; j < a.dim; ++j)
      for (int k = 0; k < a.dim; ++k)
        for (int l = k + 1; l < a.dim; ++l) R.set(i, j, k, l, a.R(i, j, k, l));
  for (int i = 0; i < b.dim; ++i)
    for (int j = i + 1; j < b.dim; ++j)
      for (int k = 0; k < b.dim; ++k)
        for (int l = k + 1; l < b.dim; ++l)
          R.set(i + a.dim, j + a.dim, k + a.dim, l + a.dim, b.R(i, j, k, l));
  return build_system(psi, R, tol);
}

/// Residuals of the structural identities available on any holonomy-invariant
/// J-invariant subspace V with complement H.
struct InvariantSubspaceChecks {
  double residual_rvh = 0.0;       // |R(v, h, ., .)|
  double residual_hvv = 0.0;       // |psi_x psi_v w| for x in H, v, w in V
  double residual_hhh = 0.0;       // component of psi_x psi_y z in V, x, y, z in H
  double residual_vvh = 0.0;       // component of psi_v psi_w x in V, x in H
  double residual_hhv = 0.0;       // component of psi_x psi_y v in H
  double residual_curv_vh = 0.0;   // mixed curvature formula on (H, V)-pairs
};

inline InvariantSubspaceChecks subspace_identity_checks(const HolonomySystem& sys,
                                                        const Eigen::MatrixXd& V) {
  int n = sys.dim;
  Eigen::MatrixXd P = V * V.transpose();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n) - P;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q, Eigen::ComputeThinU);
  int hk = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 0.5) ++hk;
  Eigen::MatrixXd H = svd.matrixU().leftCols(hk);
  int k = static_cast<int>(V.cols());

  InvariantSubspaceChecks out;
  std::vector<Eigen::MatrixXd> pv, ph;
  for (int a = 0; a < k; ++a) pv.push_back(psi_endo(sys.psi_plus, V.col(a)));
  for (int a = 0; a < hk; ++a) ph.push_back(psi_endo(sys.psi_plus, H.col(a)));

  for (int a = 0; a < k; ++a)
    for (int b = 0; b < hk; ++b)
      out.residual_rvh = std::max(
          out.residual_rvh, curvature_pair_matrix(sys.R, V.col(a), H.col(b)).norm());

  for (int x = 0; x < hk; ++x)
    for (int v = 0; v < k; ++v)
      for (int w = 0; w < k; ++w)
        out.residual_hvv = std::max(out.residual_hvv, (ph[x] * pv[v] * V.col(w)).norm());
  for (int x = 0; x < hk; ++x)
    for (int y = 0; y < hk; ++y)
      for (int z = 0; z < hk; ++z)
        out.residual_hhh =
            std::max(out.residual_hhh, (P * (ph[x] * ph[y] * H.col(z))).norm());
  for (int v = 0; v < k; ++v)
    for (int w = 0; w < k; ++w)
      for (int x = 0; x < hk; ++x)
        out.residual_vvh =
            std::max(out.residual_vvh, (P * (pv[v] * pv[w] * H.col(x))).norm());
  for (int x = 0; x < hk; ++x)
    for (int y = 0; y < hk; ++y)
      for (int v = 0; v < k; ++v)
        out.residual_hhv =
            std::max(out.residual_hhv, (Q * (ph[x] * ph[y] * V.col(v))).norm());

  // When R(V, H) = 0: R(x, y, v, w) = <[psi_v, psi_w] x, y> - <psi_v w, psi_x y>
  // for x in H and y arbitrary.
  for (int x = 0; x < hk; ++x)
    for (int y = 0; y < n; ++y) {
      Eigen::VectorXd ey = Eigen::VectorXd::Unit(n, y);
      Eigen::MatrixXd W = curvature_pair_matrix(sys.R, H.col(x), ey);
      for (int v = 0; v < k; ++v)
        for (int w = 0; w < k; ++w) {
          double lhs = V.col(v).dot(W * V.col(w));
          double rhs = ((pv[v] * pv[w] - pv[w] * pv[v]) * H.col(x)).dot(ey) -
                       (pv[v] * V.col(w)).dot(psi_endo(sys.psi_plus, H.col(x)) * ey);
          out.residual_curv_vh = std::max(out.residual_curv_vh, std::abs(lhs - rhs));
        }
    }
  return out;
}

/// The curvature of the base induced through a special subspace, together with
/// the Lie algebras attached to it and the residuals of their structure
/// relations.
struct RiemannianReduction {
  Eigen::MatrixXd h_basis;  // J-adapted orthonormal basis of H in ambient frame
  CurvatureLike RH;         // curvature on H in that basis
  LieAlgebraSpan hH;        // algebra generated by the RH values
  LieAlgebraSpan p_alg;     // {psi_v restricted to H}
  LieAlgebraSpan q_alg;     // [p, p]
  LieAlgebraSpan r_alg;     // p + q, bracket-closed

  double residual_b1 = 0.0;      // first Bianchi identity for RH
  double residual_eigen = 0.0;   // RH(psi_v) = 1/2 psi_{r v}
  double residual_ideal = 0.0;   // [hH, r] inside r
  double residual_triple = 0.0;  // [p, [p, p]] inside p
  double pq_gap = 0.0;           // dim(p) + dim(q) - dim(p + q), as a rank gap
  double residual_special_curv = 0.0;  // curvature along V via triple brackets
};

/// The symmetric tensor r: <r x, y> = sum_{k,l} psi(x,e_k,e_l) psi(y,e_k,e_l),
/// the full tensor contraction of the slotted 3-form (equivalently
/// r = -sum_k psi_{e_k}^2 as endomorphisms).
inline Eigen::MatrixXd r_tensor(const Form& psi) {
  int n = psi.dim();
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = 2.0 * inner(psi.contract(i), psi.contract(j));
  return out;
}

inline RiemannianReduction riemannian_reduction(const HolonomySystem& sys,
                                                const SubspaceRecord& special,
                                                double tol = 1e-8) {
  if (special.kind != SubspaceKind::special)
    throw std::invalid_argument("riemannian_reduction: the subspace is not special");
  int n = sys.dim;
  const Eigen::MatrixXd& V = special.basis;
  int k = static_cast<int>(V.cols());
  Eigen::MatrixXd P = V * V.transpose();
  Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n) - P;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q, Eigen::ComputeThinU);
  int hk = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 0.5) ++hk;
  RiemannianReduction out;
  out.h_basis = j_adapt(svd.matrixU().leftCols(hk));
  const Eigen::MatrixXd& H = out.h_basis;

  // RH(x, y) = R(x, y) + psi_{psi(x, y)} on H; in the stored sign convention
  // of the curvature tensor the correction enters with a minus sign, which is
  // what makes the result first-Bianchi flat.
  out.RH = CurvatureLike::from_pair_forms(hk, [&](int a, int b) {
    Eigen::MatrixXd W = curvature_pair_matrix(sys.R, H.col(a), H.col(b)) -
                        psi_endo(sys.psi_plus, psi_vector(sys.psi_plus, H.col(a), H.col(b)));
    Form f(hk, 2);
    for (int c = 0; c < hk; ++c)
      for (int d = c + 1; d < hk; ++d)
        f.set((index_mask{1} << c) | (index_mask{1} << d), H.col(c).dot(W * H.col(d)));
    return f;
  });
  out.residual_b1 = max_norm(bianchi_b1(out.RH));

  std::vector<Eigen::MatrixXd> rh_gens;
  for (int a = 0; a < hk; ++a)
    for (int b = a + 1; b < hk; ++b)
      rh_gens.push_back(two_form_matrix(out.RH.pair_form(a, b)));
  out.hH = lie_closure(rh_gens, hk);

  // psi_v as skew endomorphisms of H, in the H-basis.
  std::vector<Eigen::MatrixXd> pgens;
  for (int v = 0; v < k; ++v)
    pgens.push_back(H.transpose() * psi_endo(sys.psi_plus, V.col(v)) * H);
  out.p_alg = span_of(pgens, hk);
  std::vector<Eigen::MatrixXd> qgens;
  for (size_t a = 0; a < pgens.size(); ++a)
    for (size_t b = a + 1; b < pgens.size(); ++b)
      qgens.push_back(pgens[a] * pgens[b] - pgens[b] * pgens[a]);
  out.q_alg = span_of(qgens, hk);
  std::vector<Eigen::MatrixXd> rgens = out.p_alg.basis;
  rgens.insert(rgens.end(), out.q_alg.basis.begin(), out.q_alg.basis.end());
  out.r_alg = lie_closure(rgens, hk);
  out.pq_gap = static_cast<double>(out.p_alg.dim() + out.q_alg.dim() - out.r_alg.dim());

  for (auto& pa : out.p_alg.basis)
    for (auto& qb : out.q_alg.basis)
      out.residual_triple =
          std::max(out.residual_triple, out.p_alg.contains(pa * qb - qb * pa));
  for (auto& hb : out.hH.basis)
    for (auto& rb : out.r_alg.basis)
      out.residual_ideal = std::max(out.residual_ideal, out.r_alg.contains(hb * rb - rb * hb));

  // RH applied to the 2-form of psi_v equals half the 2-form of psi_{r v}.
  // The 2-form coefficient at (a, b) is <psi_v e_b, e_a> = -pgens(a, b).
  Eigen::MatrixXd r_full = r_tensor(sys.psi_plus);
  for (int v = 0; v < k; ++v) {
    Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(hk, hk);
    for (int a = 0; a < hk; ++a)
      for (int b = a + 1; b < hk; ++b) {
        double c = -pgens[v](a, b);
        if (c == 0.0) continue;
        lhs += c * two_form_matrix(out.RH.pair_form(a, b));
      }
    Eigen::MatrixXd rhs =
        0.5 * (H.transpose() * psi_endo(sys.psi_plus, r_full * V.col(v)) * H);
    out.residual_eigen = std::max(out.residual_eigen, (lhs - rhs).norm());
  }

  // Curvature along the special subspace through triple brackets; in the
  // stored conventions the exact reading is
  //   R(psi(x, y), v1, v2, v3) = -<[psi_{J v1}, [psi_v2, psi_v3]] x, J y>.
  Eigen::MatrixXd J = standard_J(n);
  std::vector<Eigen::MatrixXd> pv_full;
  for (int v = 0; v < k; ++v) pv_full.push_back(psi_endo(sys.psi_plus, V.col(v)));
  for (int a = 0; a < hk; ++a)
    for (int b = 0; b < hk; ++b)
      for (int v1 = 0; v1 < k; ++v1) {
        Eigen::MatrixXd W = curvature_pair_matrix(
            sys.R, psi_vector(sys.psi_plus, H.col(a), H.col(b)), V.col(v1));
        Eigen::MatrixXd pjv1 = psi_endo(sys.psi_plus, J * V.col(v1));
        for (int v2 = 0; v2 < k; ++v2)
          for (int v3 = 0; v3 < k; ++v3) {
            double lhs = V.col(v2).dot(W * V.col(v3));
            Eigen::MatrixXd inner_br = pv_full[v2] * pv_full[v3] - pv_full[v3] * pv_full[v2];
            Eigen::MatrixXd br = pjv1 * inner_br - inner_br * pjv1;
            double rhs = -(br * H.col(a)).dot(J * H.col(b));
            out.residual_special_curv =
                std::max(out.residual_special_curv, std::abs(lhs - rhs));
          }
      }
  (void)tol;
  return out;
}

/// Leaf certificate of the reduction: either the holonomy representation is
/// irreducible (trivial symmetric commutant) or the system carries a special
/// invariant subspace whose induced base representation is irreducible.
struct ReductionNode {
  HolonomySystem sys;
  Eigen::MatrixXd embedding;  // columns: the frame of this node inside the root space
  bool leaf = false;
  std::string leaf_kind;      // "irreducible" or "special"
  SubspaceRecord special;     // when leaf_kind == "special"
  double split_residual = 0.0;  // psi coupling across the split into children
  std::vector<ReductionNode> children;

  int count_leaves() const {
    if (leaf) return 1;
    int c = 0;
    for (auto& ch : children) c += ch.count_leaves();
    return c;
  }
};

namespace detail {

inline ReductionNode reduce_node(const HolonomySystem& sys, const Eigen::MatrixXd& embedding,
                                 std::uint64_t seed, double tol, int& budget) {
  if (budget-- <= 0)
    throw CannotCertify("reduce_system: iteration budget exhausted at dimension " +
                        std::to_string(sys.dim));
  if (sys.dim <= 4)
    throw CannotCertify("reduce_system: a factor of dimension <= 4 cannot carry a valid system");

  ReductionNode node;
  node.sys = sys;
  node.embedding = embedding;

  std::vector<SubspaceRecord> records = invariant_splitting(sys, seed, tol);
  if (records.size() == 1) {
    node.leaf = true;
    node.leaf_kind = "irreducible";
    return node;
  }

  std::vector<Eigen::MatrixXd> clusters = psi_clusters(sys, records, tol);
  if (clusters.size() >= 2) {
    for (auto& ca : clusters)
      for (auto& cb : clusters) {
        if (&ca == &cb) continue;
        for (int a = 0; a < ca.cols(); ++a)
          for (int b = 0; b < cb.cols(); ++b)
            node.split_residual =
                std::max(node.split_residual,
                         psi_vector(sys.psi_plus, ca.col(a), cb.col(b)).norm());
      }
    for (auto& c : clusters) {
      HolonomySystem sub = restrict_system(sys, c, tol);
      node.children.push_back(reduce_node(sub, embedding * c, seed, tol, budget));
    }
    return node;
  }

  // One psi-coupled cluster but a reducible representation: look for a special
  // invariant subspace among the commutant eigenspaces.
  for (auto& rec : records) {
    if (rec.kind != SubspaceKind::special) continue;
    RiemannianReduction red = riemannian_reduction(sys, rec, tol);
    std::vector<Eigen::MatrixXd> comm = symmetric_commutant(red.hH.basis, red.RH.dim());
    if (comm.size() == 1) {
      node.leaf = true;
      node.leaf_kind = "special";
      node.special = rec;
      return node;
    }
    // Reducible base: split H by a commutant eigenspace, carry each V-block
    // psi(H_k, H_k) along, and recurse on the resulting product factors.
    Rng rng(seed + 1);
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(red.RH.dim(), red.RH.dim());
    for (auto& K : comm) S += rng.normal() * K;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
    std::vector<Eigen::MatrixXd> hblocks;
    int from = 0;
    for (int i = 1; i <= red.RH.dim(); ++i) {
      if (i < red.RH.dim() && eig.eigenvalues()[i] - eig.eigenvalues()[i - 1] < 1e-7) continue;
      hblocks.push_back(red.h_basis * eig.eigenvectors().middleCols(from, i - from));
      from = i;
    }
    if (hblocks.size() < 2) continue;
    for (auto& Hk : hblocks) {
      std::vector<Eigen::MatrixXd> vcols;
      for (int a = 0; a < Hk.cols(); ++a)
        for (int b = a + 1; b < Hk.cols(); ++b) {
          Eigen::VectorXd w = psi_vector(sys.psi_plus, Hk.col(a), Hk.col(b));
          if (w.norm() > tol) vcols.push_back(w.normalized());
        }
      Eigen::MatrixXd Vk_raw(sys.dim, static_cast<int>(vcols.size()));
      for (int c = 0; c < Vk_raw.cols(); ++c) Vk_raw.col(c) = vcols[static_cast<size_t>(c)];
      Eigen::JacobiSVD<Eigen::MatrixXd> vsvd(Vk_raw, Eigen::ComputeThinU);
      int vk = 0;
      for (int i = 0; i < vsvd.singularValues().size(); ++i)
        if (vsvd.singularValues()[i] > 1e-7) ++vk;
      Eigen::MatrixXd factor(sys.dim, vk + static_cast<int>(Hk.cols()));
      factor.leftCols(vk) = vsvd.matrixU().leftCols(vk);
      factor.rightCols(Hk.cols()) = Hk;
      factor = j_adapt(factor);
      HolonomySystem sub = restrict_system(sys, factor, tol);
      node.children.push_back(reduce_node(sub, embedding * factor, seed, tol, budget));
    }
    return node;
  }
  throw CannotCertify(
      "reduce_system: reducible representation with a single psi-coupled cluster and no "
      "certified special subspace (dimension " +
      std::to_string(sys.dim) + ", " + std::to_string(records.size()) + " commutant blocks)");
}

}  // namespace detail

inline ReductionNode reduce_system(const HolonomySystem& sys, std::uint64_t seed = 0,
                                   double tol = 1e-8) {
  if (!sys.strict())
    throw ValidationFailed("reduce_system: the system must be strict (non-degenerate 3-form)");
  int budget = sys.dim;
  return detail::reduce_node(sys, Eigen::MatrixXd::Identity(sys.dim, sys.dim), seed, tol, budget);
}

/// Eigenvalues clustered up to a gap threshold, with multiplicities.
struct EigenClusters {
  std::vector<double> values;
  std::vector<int> multiplicities;
};

inline EigenClusters cluster_eigenvalues(const Eigen::MatrixXd& S, double gap = 1e-6) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(S);
  EigenClusters out;
  int n = static_cast<int>(S.rows());
  int from = 0;
  for (int i = 1; i <= n; ++i) {
    if (i < n && eig.eigenvalues()[i] - eig.eigenvalues()[i - 1] < gap) continue;
    out.values.push_back(eig.eigenvalues().segment(from, i - from).mean());
    out.multiplicities.push_back(i - from);
    from = i;
  }
  return out;
}

/// Ricci-type symmetric tensors of a holonomy system, the identities binding
/// them, and the eigenvalue report for the Chern tensor C.
struct SymmetricPanel {
  Eigen::MatrixXd r;        // <r x, y> = <x . psi, y . psi>
  Eigen::MatrixXd ric_bar;  // contraction of R
  Eigen::MatrixXd ric;      // ric_bar + 3/4 r
  Eigen::MatrixXd C;        // ric_bar - r

  double residual_j_commute = 0.0;  // J-invariance of all four tensors
  double residual_ricf = 0.0;       // (ric_bar X) . psi = -1/2 sum psi_X e_k ^ r e_k
  double residual_chern = 0.0;      // C(psi_X Y) + psi_X C Y + psi_{C X} Y = 0
  EigenClusters C_clusters;

  // Filled when a special subspace is supplied.
  bool has_special = false;
  Eigen::MatrixXd r1;  // on V: <r1 v, w> = Tr_V(psi_v psi_w)
  Eigen::MatrixXd rV;  // on H: -sum_k psi_{v_k}^2
  double residual_r_h = 0.0;  // r restricted to H = 2 rV

  // Best-fitting two-eigenvalue table interpretation (diagnostic, not gated).
  struct TableFit {
    int n = 0, d = 0;
    double k = 0.0;
    double mismatch = 0.0;
  } table;
};

inline SymmetricPanel ricci_panel(const HolonomySystem& sys,
                                  const SubspaceRecord* special = nullptr) {
  int n = sys.dim;
  SymmetricPanel out;
  out.r = r_tensor(sys.psi_plus);
  out.ric_bar = ricci(sys.R);
  out.ric = out.ric_bar + 0.75 * out.r;
  out.C = out.ric_bar - out.r;

  Eigen::MatrixXd J = standard_J(n);
  for (const Eigen::MatrixXd* M : {&out.r, &out.ric_bar, &out.ric, &out.C})
    out.residual_j_commute = std::max(out.residual_j_commute, (*M * J - J * *M).norm());

  std::vector<Eigen::MatrixXd> pe;
  for (int i = 0; i < n; ++i) pe.push_back(psi_endo(sys.psi_plus, Eigen::VectorXd::Unit(n, i)));
  for (int x = 0; x < n; ++x) {
    Form lhs = sys.psi_plus.contract(Eigen::VectorXd(out.ric_bar.col(x)));
    Form rhs(n, 2);
    for (int k = 0; k < n; ++k)
      rhs += vector_wedge(pe[x] * Eigen::VectorXd::Unit(n, k), out.r.col(k));
    out.residual_ricf = std::max(out.residual_ricf, (lhs + 0.5 * rhs).norm());
  }
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      Eigen::VectorXd defect = out.C * (pe[x] * Eigen::VectorXd::Unit(n, y)) +
                               pe[x] * (out.C * Eigen::VectorXd::Unit(n, y)) +
                               psi_endo(sys.psi_plus, out.C.col(x)) * Eigen::VectorXd::Unit(n, y);
      out.residual_chern = std::max(out.residual_chern, defect.norm());
    }
  out.C_clusters = cluster_eigenvalues(out.C);

  if (special != nullptr) {
    out.has_special = true;
    const Eigen::MatrixXd& V = special->basis;
    int k = static_cast<int>(V.cols());
    Eigen::MatrixXd P = V * V.transpose();
    Eigen::MatrixXd Q = Eigen::MatrixXd::Identity(n, n) - P;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Q, Eigen::ComputeThinU);
    int hk = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 0.5) ++hk;
    Eigen::MatrixXd H = svd.matrixU().leftCols(hk);

    out.r1 = Eigen::MatrixXd(k, k);
    std::vector<Eigen::MatrixXd> pv;
    for (int v = 0; v < k; ++v) pv.push_back(psi_endo(sys.psi_plus, V.col(v)));
    for (int v = 0; v < k; ++v)
      for (int w = 0; w < k; ++w) {
        double tr = 0.0;
        for (int a = 0; a < k; ++a) tr += V.col(a).dot(pv[v] * (pv[w] * V.col(a)));
        out.r1(v, w) = tr;
      }
    Eigen::MatrixXd rv_full = Eigen::MatrixXd::Zero(n, n);
    for (int v = 0; v < k; ++v) rv_full -= pv[v] * pv[v];
    out.rV = H.transpose() * rv_full * H;
    out.residual_r_h = (H.transpose() * out.r * H - 2.0 * out.rV).norm();

    // Two-eigenvalue table: lambda(r) = ((n-d)/d) k on V and 2k on H,
    // lambda(Ric) = ((n+7d)/(4d)) k and ((n+2d)/(2d)) k,
    // lambda(C) = (4(n-3d)/d) k and (-2(n-3d)/d) k. The integers n and d are
    // unspecified at source; report the best fit over natural candidates.
    double kk = out.rV.trace() / hk;
    double rv_avg = (V.transpose() * out.r * V).trace() / k;
    double rh_avg = (H.transpose() * out.r * H).trace() / hk;
    double ricv = (V.transpose() * out.ric * V).trace() / k;
    double rich = (H.transpose() * out.ric * H).trace() / hk;
    double cv = (V.transpose() * out.C * V).trace() / k;
    double ch = (H.transpose() * out.C * H).trace() / hk;
    out.table.mismatch = -1.0;
    for (int nn : {n, n / 2, hk, hk / 2})
      for (int dd : {k, k / 2}) {
        if (dd <= 0 || nn <= 0) continue;
        double mis = 0.0;
        mis = std::max(mis, std::abs(rv_avg - (double)(nn - dd) / dd * kk));
        mis = std::max(mis, std::abs(rh_avg - 2.0 * kk));
        mis = std::max(mis, std::abs(ricv - (double)(nn + 7 * dd) / (4.0 * dd) * kk));
        mis = std::max(mis, std::abs(rich - (double)(nn + 2 * dd) / (2.0 * dd) * kk));
        mis = std::max(mis, std::abs(cv - 4.0 * (double)(nn - 3 * dd) / dd * kk));
        mis = std::max(mis, std::abs(ch + 2.0 * (double)(nn - 3 * dd) / dd * kk));
        if (out.table.mismatch < 0.0 || mis < out.table.mismatch) {
          out.table = {nn, dd, kk, mis};
        }
      }
  }
  return out;
}

/// Defect of the cyclic first Bianchi sum of R against the torsion square
/// terms: R(x,y)z + R(y,z)x + R(z,x)y - ([psi_x, psi_y] z - psi_{psi_x y} z)
/// with psi the supplied 3-form.
inline double cyclic_bianchi_defect(const CurvatureLike& R, const Form& psi) {
  int n = R.dim();
  std::vector<Eigen::MatrixXd> pe;
  for (int i = 0; i < n; ++i) pe.push_back(psi_endo(psi, Eigen::VectorXd::Unit(n, i)));
  double out = 0.0;
  for (int x = 0; x < n; ++x)
    for (int y = x + 1; y < n; ++y)
      for (int z = 0; z < n; ++z)
        for (int u = 0; u < n; ++u) {
          double lhs = R(x, y, z, u) + R(y, z, x, u) + R(z, x, y, u);
          double rhs = ((pe[x] * pe[y] - pe[y] * pe[x]) * Eigen::VectorXd::Unit(n, z))(u) -
                       (psi_endo(psi, pe[x] * Eigen::VectorXd::Unit(n, y)) *
                        Eigen::VectorXd::Unit(n, z))(u);
          out = std::max(out, std::abs(lhs - rhs));
        }
  return out;
}

}  // namespace torsionlab
