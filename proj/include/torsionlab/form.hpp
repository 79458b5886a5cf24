#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace torsionlab {

/// A basis p-vector e_{i1} ^ ... ^ e_{ip} with i1 < ... < ip is encoded as the
/// bit set {i1,...,ip} of a 32-bit mask. Dimensions up to 16 are supported.
using index_mask = std::uint32_t;

inline int mask_degree(index_mask s) { return std::popcount(s); }

/// Indices of a mask in increasing order.
inline std::vector<int> mask_indices(index_mask s) {
  std::vector<int> out;
  for (int i = 0; s != 0; ++i, s >>= 1)
    if (s & 1u) out.push_back(i);
  return out;
}

inline index_mask indices_mask(const std::vector<int>& idx) {
  index_mask s = 0;
  for (int i : idx) s |= (index_mask{1} << i);
  return s;
}

/// Sign of merging two disjoint sorted index sets: (-1)^{#{(a,b): a in s1, b in s2, a > b}}.
inline int merge_sign(index_mask s1, index_mask s2) {
  int swaps = 0;
  for (index_mask t = s1; t != 0; t &= t - 1) {
    int i = std::countr_zero(t);
    swaps += std::popcount(s2 & ((index_mask{1} << i) - 1));
  }
  return (swaps & 1) ? -1 : 1;
}

/// Standard complex structure on the frame: J e_{2k} = e_{2k+1}, J e_{2k+1} = -e_{2k}.
inline int j0_partner(int i) { return i ^ 1; }
inline int j0_sign(int i) { return (i & 1) ? -1 : 1; }

/// Alternating multilinear form with real coefficients over the orthonormal
/// Hermitian frame of a 2m-dimensional space. Sparse: only strictly increasing
/// index tuples are stored, as bit masks.
class Form {
 public:
  Form() = default;
  Form(int dim, int degree) : dim_(dim), degree_(degree) {
    if (dim < 0 || dim > 16) throw std::invalid_argument("Form: dimension out of range");
    if (degree < 0) throw std::invalid_argument("Form: negative degree");
  }

  static Form basis(int dim, index_mask s, double c = 1.0) {
    Form f(dim, mask_degree(s));
    if (c != 0.0) f.terms_[s] = c;
    return f;
  }

  static Form scalar(int dim, double c) {
    Form f(dim, 0);
    if (c != 0.0) f.terms_[0] = c;
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const std::map<index_mask, double>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  double coeff(index_mask s) const {
    auto it = terms_.find(s);
    return it == terms_.end() ? 0.0 : it->second;
  }

  void set(index_mask s, double c) {
    if (mask_degree(s) != degree_) throw std::invalid_argument("Form::set: degree mismatch");
    if (c == 0.0)
      terms_.erase(s);
    else
      terms_[s] = c;
  }

  void add(index_mask s, double c) {
    if (c == 0.0) return;
    auto [it, fresh] = terms_.try_emplace(s, c);
    if (!fresh) {
      it->second += c;
      if (it->second == 0.0) terms_.erase(it);
    }
  }

  Form& operator+=(const Form& o) {
    check_same(o);
    if (terms_.empty()) degree_ = o.degree_;  // empty forms are degree-agnostic zeros
    for (auto& [s, c] : o.terms_) add(s, c);
    return *this;
  }
  Form& operator-=(const Form& o) {
    check_same(o);
    if (terms_.empty()) degree_ = o.degree_;
    for (auto& [s, c] : o.terms_) add(s, -c);
    return *this;
  }
  Form& operator*=(double a) {
    if (a == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [s, c] : terms_) c *= a;
    return *this;
  }

  friend Form operator+(Form a, const Form& b) { return a += b; }
  friend Form operator-(Form a, const Form& b) { return a -= b; }
  friend Form operator*(double a, Form f) { return f *= a; }
  friend Form operator*(Form f, double a) { return f *= a; }
  friend Form operator-(Form f) { return f *= -1.0; }

  /// Exterior product.
  friend Form wedge(const Form& a, const Form& b) {
    a.check_same_space(b);
    Form out(a.dim_, a.degree_ + b.degree_);
    for (auto& [s, c] : a.terms_)
      for (auto& [t, d] : b.terms_) {
        if (s & t) continue;
        out.add(s | t, c * d * merge_sign(s, t));
      }
    return out;
  }

  /// Interior product with the frame vector e_i.
  Form contract(int i) const {
    Form out(dim_, degree_ == 0 ? 0 : degree_ - 1);
    if (degree_ == 0) return out;  // scalar-zero convention
    index_mask bit = index_mask{1} << i;
    for (auto& [s, c] : terms_) {
      if (!(s & bit)) continue;
      int sign = (std::popcount(s & (bit - 1)) & 1) ? -1 : 1;
      out.add(s & ~bit, sign * c);
    }
    return out;
  }

  /// Interior product with an arbitrary vector (frame coordinates).
  Form contract(const Eigen::VectorXd& x) const {
    Form out(dim_, degree_ == 0 ? 0 : degree_ - 1);
    for (int i = 0; i < dim_; ++i)
      if (x[i] != 0.0) out += x[i] * contract(i);
    return out;
  }

  /// L2 pairing on the orthonormal increasing-tuple basis.
  friend double inner(const Form& a, const Form& b) {
    a.check_same(b);
    double out = 0.0;
    const auto& small = a.terms_.size() <= b.terms_.size() ? a.terms_ : b.terms_;
    const Form& other = a.terms_.size() <= b.terms_.size() ? b : a;
    for (auto& [s, c] : small) out += c * other.coeff(s);
    return out;
  }

  double norm() const { return std::sqrt(inner(*this, *this)); }

  double max_abs_coeff() const {
    double out = 0.0;
    for (auto& [s, c] : terms_) out = std::max(out, std::abs(c));
    return out;
  }

  /// Drop coefficients below an absolute threshold.
  Form& prune(double tol) {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = std::abs(it->second) <= tol ? terms_.erase(it) : std::next(it);
    return *this;
  }

  /// Full antisymmetric evaluation on arbitrary vectors.
  double eval(const std::vector<Eigen::VectorXd>& x) const {
    if (static_cast<int>(x.size()) != degree_) throw std::invalid_argument("Form::eval: arity");
    if (degree_ == 0) return coeff(0);
    double out = 0.0;
    Eigen::MatrixXd minor(degree_, degree_);
    for (auto& [s, c] : terms_) {
      auto rows = mask_indices(s);
      for (int i = 0; i < degree_; ++i)
        for (int j = 0; j < degree_; ++j) minor(i, j) = x[j][rows[i]];
      out += c * minor.determinant();
    }
    return out;
  }

  /// Pullback along a linear map: (M*f)(x_1,...,x_p) = f(M x_1,...,M x_p).
  Form pullback(const Eigen::MatrixXd& map) const {
    Form out(dim_, degree_);
    if (degree_ == 0) return *this;
    std::vector<int> tuple(degree_);
    Eigen::MatrixXd minor(degree_, degree_);
    // iterate over all increasing output tuples
    for (int i = 0; i < degree_; ++i) tuple[i] = i;
    while (true) {
      double val = 0.0;
      for (auto& [s, c] : terms_) {
        auto rows = mask_indices(s);
        for (int i = 0; i < degree_; ++i)
          for (int j = 0; j < degree_; ++j) minor(i, j) = map(rows[i], tuple[j]);
        val += c * minor.determinant();
      }
      out.add(indices_mask(tuple), val);
      int k = degree_ - 1;
      while (k >= 0 && tuple[k] == dim_ - degree_ + k) --k;
      if (k < 0) break;
      ++tuple[k];
      for (int i = k + 1; i < degree_; ++i) tuple[i] = tuple[i - 1] + 1;
    }
    return out;
  }

 private:
  void check_same_space(const Form& o) const {
    if (dim_ != o.dim_) throw std::invalid_argument("Form: space mismatch");
  }
  void check_same(const Form& o) const {
    check_same_space(o);
    if (degree_ != o.degree_ && !terms_.empty() && !o.terms_.empty())
      throw std::invalid_argument("Form: degree mismatch");
  }

  int dim_ = 0;
  int degree_ = 0;
  std::map<index_mask, double> terms_;
};

/// e_i ^ e_j as a 2-form (frame indices).
inline Form basis_two_form(int dim, int i, int j) {
  Form f(dim, 2);
  if (i == j) return f;
  if (i < j)
    f.set((index_mask{1} << i) | (index_mask{1} << j), 1.0);
  else
    f.set((index_mask{1} << j) | (index_mask{1} << i), -1.0);
  return f;
}

/// u ^ v for arbitrary vectors, as a 2-form.
inline Form vector_wedge(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  int dim = static_cast<int>(u.size());
  Form f(dim, 2);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      double c = u[i] * v[j] - u[j] * v[i];
      if (c != 0.0) f.add((index_mask{1} << i) | (index_mask{1} << j), c);
    }
  return f;
}

/// All increasing index tuples of the given degree, as masks in increasing order.
inline std::vector<index_mask> degree_masks(int dim, int degree) {
  std::vector<index_mask> out;
  for (index_mask s = 0; s < (index_mask{1} << dim); ++s)
    if (mask_degree(s) == degree) out.push_back(s);
  return out;
}

}  // namespace torsionlab
