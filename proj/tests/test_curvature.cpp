#include <catch2/catch_amalgamated.hpp>

#include <torsionlab/curvature.hpp>
#include <torsionlab/rng.hpp>

using namespace torsionlab;

namespace {

Form random_bidegree(Rng& rng, int dim, const BidegreeLabel& l) {
  return bidegree_project(rng.form(dim, l.degree()), l);
}

// Random pair-symmetric element of S^2(lambda^{1,1}) built from symmetrized
// outer products of (1,1)-forms.
CurvatureLike random_S2_lambda11(Rng& rng, int dim, int rank = 6) {
  std::vector<Form> alphas;
  for (int a = 0; a < rank; ++a) alphas.push_back(random_bidegree(rng, dim, {1, 1}));
  std::vector<double> w;
  for (int a = 0; a < rank; ++a) w.push_back(rng.normal());
  return CurvatureLike::from_pair_forms(dim, [&](int i, int j) {
    Form f(dim, 2);
    for (int a = 0; a < rank; ++a) {
      index_mask s = (index_mask{1} << i) | (index_mask{1} << j);
      f += (w[a] * alphas[a].coeff(s)) * alphas[a];
    }
    return f;
  });
}

// Total alternation of a two-pair tensor into Lambda^4.
Form total_alternation2(const CurvatureLike& R) {
  int dim = R.dim();
  Form out(dim, 4);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j)
      out += wedge(Form::basis(dim, (index_mask{1} << i) | (index_mask{1} << j)), R.pair_form(i, j));
  return out;
}

}  // namespace

TEST_CASE("hat embedding: membership and Bianchi round trip") {
  Rng rng(101);
  int dim = 6;
  for (int trial = 0; trial < 10; ++trial) {
    Form Om = random_bidegree(rng, dim, {2, 2});
    CurvatureLike H = hat_embed(Om);
    CHECK(H.pair_symmetry_residual() < 1e-12);
    CHECK(H.first_pair_j_residual() < 1e-11);
    CHECK(H.second_pair_lambda11_residual() < 1e-11);
    auto b1 = bianchi_b1(H);
    double res = 0.0;
    for (int x = 0; x < dim; ++x) res = std::max(res, (b1[x] - Om.contract(x)).norm());
    CHECK(res < 1e-10);
  }
  // omega ^ omega is a (2,2)-form; round trip through the embedding
  Form w2 = wedge(kaehler_form(dim), kaehler_form(dim));
  auto b1 = bianchi_b1(hat_embed(w2));
  for (int x = 0; x < dim; ++x) CHECK((b1[x] - w2.contract(x)).norm() < 1e-12);
}

TEST_CASE("check embedding Bianchi formula") {
  Rng rng(103);
  int dim = 6;
  for (int trial = 0; trial < 10; ++trial) {
    Form Om = random_bidegree(rng, dim, {3, 1});
    CurvatureLike C = check_embed(Om);
    CHECK(C.second_pair_lambda11_residual() < 1e-11);
    auto b1 = bianchi_b1(C);
    Form JOm = calJ(Om);
    double res = 0.0;
    for (int x = 0; x < dim; ++x) {
      Form rhs = static_cast<double>(j0_sign(x)) * JOm.contract(j0_partner(x)) - 2.0 * Om.contract(x);
      res = std::max(res, (b1[x] - rhs).norm());
    }
    CHECK(res < 1e-10);
  }
}

TEST_CASE("ring embedding Bianchi formula") {
  Rng rng(107);
  int dim = 6;
  Eigen::MatrixXd J = standard_J(dim);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd B = rng.normal_matrix(dim, dim);
    B = 0.5 * (B + B.transpose()).eval();
    Eigen::MatrixXd S = B + J * B * J;  // symmetric, SJ + JS = 0
    REQUIRE((S * J + J * S).norm() < 1e-12);
    auto b1 = bianchi_b1(ring_embed(S));
    double res = 0.0;
    for (int x = 0; x < dim; ++x) {
      Form rhs = wedge(Form(dim, 1), Form(dim, 1));
      Eigen::VectorXd Sx = S * Eigen::VectorXd::Unit(dim, x);
      Form sx(dim, 1);
      for (int k = 0; k < dim; ++k) sx.set(index_mask{1} << k, Sx[k]);
      rhs = wedge(sx, kaehler_form(dim));
      res = std::max(res, (b1[x] - rhs).norm());
    }
    CHECK(res < 1e-10);
  }
}

TEST_CASE("tilde embedding Bianchi formula") {
  Rng rng(109);
  int dim = 6;
  for (int trial = 0; trial < 10; ++trial) {
    Form Om = random_bidegree(rng, dim, {3, 1});
    auto b1 = bianchi_b1(tilde_embed(Om));
    Form JOm = calJ(Om);
    double res = 0.0;
    for (int x = 0; x < dim; ++x) {
      Form rhs = bidegree_project(Om.contract(x), {2, 1});
      Form rhs2 = 0.25 * (2.0 * Om.contract(x) -
                          static_cast<double>(j0_sign(x)) * JOm.contract(j0_partner(x)));
      CHECK((rhs - rhs2).norm() < 1e-10);  // two closed forms of the same projection
      res = std::max(res, (b1[x] - rhs).norm());
    }
    CHECK(res < 1e-10);
  }
}

TEST_CASE("split of S^2(lambda^{1,1}): round trip, uniqueness, orthogonality") {
  Rng rng(113);
  int dim = 6;
  for (int trial = 0; trial < 100; ++trial) {
    CurvatureLike Q = random_S2_lambda11(rng, dim);
    double scale = std::max(1.0, Q.max_abs());
    S2Split s = split_S2_lambda11(Q);
    // reconstruction
    CurvatureLike recon = s.kernel_part + hat_embed(s.omega22);
    CHECK((recon - Q).max_abs() < 1e-10 * scale);
    // kernel part is a curvature tensor, omega is of type (2,2)
    CHECK(s.residual_b1 < 1e-9 * scale);
    CHECK(s.residual_type22 < 1e-9 * scale);
    // uniqueness: re-splitting each part is the identity
    S2Split sk = split_S2_lambda11(s.kernel_part);
    CHECK(sk.omega22.norm() < 1e-9 * scale);
    S2Split sh = split_S2_lambda11(hat_embed(s.omega22));
    CHECK((sh.omega22 - s.omega22).norm() < 1e-9 * scale);
    CHECK(sh.kernel_part.max_abs() < 1e-9 * scale);
  }
}

TEST_CASE("kernel characterization of algebraic curvature tensors") {
  // In dimension 6: Ker b_1 inside Lambda^2 (x) Lambda^2 has dimension
  // 6^2(6^2-1)/12 = 105 and every kernel element is pair-symmetric with
  // vanishing total alternation (the S^2(Lambda^2) \cap Ker a description).
  int dim = 6;
  auto masks2 = degree_masks(dim, 2);
  int n2 = static_cast<int>(masks2.size());  // 15
  int dom = n2 * n2;
  auto masks3 = degree_masks(dim, 3);
  Eigen::MatrixXd M(dim * static_cast<int>(masks3.size()), dom);
  M.setZero();
  for (int a = 0; a < n2; ++a)
    for (int b = 0; b < n2; ++b) {
      CurvatureLike R(dim);
      auto ij = mask_indices(masks2[a]);
      Form f = Form::basis(dim, masks2[b]);
      R.set_pair_form(ij[0], ij[1], f);
      auto b1 = bianchi_b1(R);
      for (int x = 0; x < dim; ++x)
        for (size_t k = 0; k < masks3.size(); ++k)
          M(x * static_cast<int>(masks3.size()) + static_cast<int>(k), a * n2 + b) =
              b1[x].coeff(masks3[k]);
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
  lu.setThreshold(1e-9);
  Eigen::MatrixXd null = lu.kernel();
  CHECK(null.cols() == 105);
  for (int col = 0; col < std::min<int>(10, null.cols()); ++col) {
    CurvatureLike R(dim);
    for (int a = 0; a < n2; ++a) {
      auto ij = mask_indices(masks2[a]);
      Form f(dim, 2);
      for (int b = 0; b < n2; ++b) f.add(masks2[b], null(a * n2 + b, col));
      R.set_pair_form(ij[0], ij[1], f);
    }
    CHECK(R.pair_symmetry_residual() < 1e-8);
    CHECK(total_alternation2(R).norm() < 1e-8);
  }
}

TEST_CASE("alternations of a one-three tensor") {
  Rng rng(127);
  int dim = 6;
  // gamma_x = x . Psi gives a(gamma) = 4 Psi
  Form Psi = rng.form(dim, 4);
  VectorValuedForms gamma;
  for (int x = 0; x < dim; ++x) gamma.push_back(Psi.contract(x));
  CHECK((alternation(gamma) - 4.0 * Psi).norm() < 1e-11);
  // a^c on the twisted tensor: gamma'_x = gamma_{Jx} pulls a into a^c
  VectorValuedForms zero(dim, Form(dim, 3));
  CHECK(alternation(zero).norm() == 0.0);
}

TEST_CASE("Bianchi image of the symmetrized eta-tensor") {
  // For eta in lambda^1 (x) lambda^{1,2} and
  // H1(x,y) = (x . eta_y - y . eta_x)_{lambda^{1,1}}:
  //   2 (b1 H1)_x = 3 eta_x + J eta_{Jx} + x . a(eta) - Jx . a(J eta).
  Rng rng(131);
  int dim = 6;
  for (int trial = 0; trial < 8; ++trial) {
    VectorValuedForms eta;
    for (int x = 0; x < dim; ++x) eta.push_back(random_bidegree(rng, dim, {2, 1}));
    CurvatureLike H1 = CurvatureLike::from_pair_forms(dim, [&](int x, int y) {
      Form f = eta[y].contract(x) - eta[x].contract(y);
      return 0.5 * (f + pullJ(f));
    });
    Form a_eta = alternation(eta);
    Form a_jeta = alternation(pullJ_slots(eta));
    auto b1 = bianchi_b1(H1);
    double res = 0.0;
    for (int x = 0; x < dim; ++x) {
      double sx = j0_sign(x);
      Form rhs = 3.0 * eta[x] + sx * pullJ(eta[j0_partner(x)]) + a_eta.contract(x) -
                 sx * a_jeta.contract(j0_partner(x));
      res = std::max(res, (2.0 * b1[x] - rhs).norm());
    }
    CHECK(res < 1e-9);
  }
}

TEST_CASE("degenerate hermitian decomposition (gamma = 0) reduces to the split") {
  Rng rng(137);
  int dim = 6;
  CurvatureLike Q = random_S2_lambda11(rng, dim);
  VectorValuedForms gamma(dim, Form(dim, 3));
  CurvDecomposition d = decompose_hermitian_curvature(Q, gamma);
  double scale = std::max(1.0, Q.max_abs());
  CHECK(d.residual_constraint < 1e-10 * scale);
  CHECK(d.ra.max_abs() < 1e-12);
  CHECK(d.rm.max_abs() < 1e-12);
  CHECK(d.residual_recon < 1e-10 * scale);
  CHECK(d.residual_bianchi_a < 1e-9 * scale);
  CHECK(d.residual_bianchi_m < 1e-9 * scale);
  S2Split s = split_S2_lambda11(Q);
  CHECK((d.omega22 - s.omega22).norm() < 1e-10 * scale);
}

TEST_CASE("constraint residual detects hypothesis violations") {
  Rng rng(139);
  int dim = 6;
  // a generic pair-nonsymmetric tensor with gamma = 0 must be rejected
  CurvatureLike R = CurvatureLike::from_pair_forms(dim, [&](int i, int j) {
    return random_bidegree(rng, dim, {1, 1});
  });
  VectorValuedForms gamma(dim, Form(dim, 3));
  CHECK(constraint_residual(R, gamma) > 1e-3);
}
