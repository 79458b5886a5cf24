#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "form.hpp"

namespace torsionlab {

/// Standard complex structure matrix in the Hermitian frame:
/// J e_{2k} = e_{2k+1}, J e_{2k+1} = -e_{2k}.
inline Eigen::MatrixXd standard_J(int dim) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k + 1 < dim; k += 2) {
    J(k + 1, k) = 1.0;
    J(k, k + 1) = -1.0;
  }
  return J;
}

/// An even-dimensional real vector space with a positive metric g and an
/// orthogonal almost complex structure J. On construction an orthonormal
/// Hermitian frame is computed; all form computations take place in frame
/// coordinates, where g is the identity and J is standard_J.
class HermitianSpace {
 public:
  HermitianSpace(int dim, Eigen::MatrixXd J, Eigen::MatrixXd metric)
      : dim_(dim), J_(std::move(J)), metric_(std::move(metric)) {
    validate();
    build_frame();
  }

  /// Standard model space: g = id, J = standard_J.
  explicit HermitianSpace(int dim)
      : HermitianSpace(dim, standard_J(dim), Eigen::MatrixXd::Identity(dim, dim)) {}

  int dim() const { return dim_; }
  int half_dim() const { return dim_ / 2; }
  const Eigen::MatrixXd& J() const { return J_; }
  const Eigen::MatrixXd& metric() const { return metric_; }

  /// Columns are the Hermitian frame vectors in input coordinates.
  const Eigen::MatrixXd& frame() const { return frame_; }

  Eigen::VectorXd to_frame(const Eigen::VectorXd& x) const { return frame_inv_ * x; }
  Eigen::VectorXd from_frame(const Eigen::VectorXd& x) const { return frame_ * x; }

  /// Re-express a form given on the input basis in frame coordinates.
  Form form_to_frame(const Form& f) const { return f.pullback(frame_); }

 private:
  void validate() const {
    if (dim_ < 4 || dim_ > 16 || dim_ % 2 != 0)
      throw std::invalid_argument("HermitianSpace: dimension must be even, between 4 and 16");
    if (J_.rows() != dim_ || J_.cols() != dim_ || metric_.rows() != dim_ || metric_.cols() != dim_)
      throw std::invalid_argument("HermitianSpace: matrix size mismatch");
    double tol = 1e-9;
    if ((metric_ - metric_.transpose()).norm() > tol)
      throw std::invalid_argument("HermitianSpace: metric is not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(metric_);
    if (llt.info() != Eigen::Success)
      throw std::invalid_argument("HermitianSpace: metric is not positive definite");
    if ((J_ * J_ + Eigen::MatrixXd::Identity(dim_, dim_)).norm() > tol)
      throw std::invalid_argument("HermitianSpace: J^2 != -id");
    if ((J_.transpose() * metric_ * J_ - metric_).norm() > tol)
      throw std::invalid_argument("HermitianSpace: J is not metric-compatible");
  }

  // Greedy g-orthonormal frame (v, Jv, ...) so that J becomes standard_J.
  void build_frame() {
    frame_.resize(dim_, dim_);
    int built = 0;
    for (int cand = 0; cand < dim_ && built < dim_; ++cand) {
      Eigen::VectorXd v = Eigen::VectorXd::Unit(dim_, cand);
      for (int k = 0; k < built; ++k) {
        Eigen::VectorXd w = frame_.col(k);
        v -= (w.dot(metric_ * v)) * w;
      }
      double len = std::sqrt(v.dot(metric_ * v));
      if (len < 1e-8) continue;
      v /= len;
      frame_.col(built) = v;
      frame_.col(built + 1) = J_ * v;  // unit and g-orthogonal to v automatically
      built += 2;
    }
    if (built != dim_) throw std::runtime_error("HermitianSpace: frame construction failed");
    frame_inv_ = frame_.inverse();
  }

  int dim_;
  Eigen::MatrixXd J_, metric_, frame_, frame_inv_;
};

}  // namespace torsionlab
