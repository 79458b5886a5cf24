#include <catch2/catch_amalgamated.hpp>

#include <torsionlab/builtin_models.hpp>
#include <torsionlab/homogeneous.hpp>
#include <torsionlab/rng.hpp>

using namespace torsionlab;

TEST_CASE("builtin models validate") {
  for (auto& name : builtin_names()) {
    HomogeneousModel m = builtin(name);
    CHECK(m.name() == name);
    CHECK(m.jacobi_residual() < 1e-10);
    CHECK(m.reductivity_residual() < 1e-10);
    CHECK(m.isotropy_residual() < 1e-9);
  }
  CHECK_THROWS(builtin("nope"));
  CHECK(builtin("ledger_obata6").dim_h() == 3);
  CHECK(builtin("flag6").dim_h() == 2);
  CHECK(builtin("twistor6").dim_h() == 4);
  CHECK(builtin("twistor6").dim_m() == 6);
}

TEST_CASE("Levi-Civita potential: metric, torsion-free, classical special cases") {
  for (auto& name : builtin_names()) {
    HomogeneousModel m = builtin(name);
    ConnectionPotential lc = levi_civita(m);
    CHECK(metric_residual(lc) < 1e-12);
    CHECK(torsion_free_residual(m, lc) < 1e-12);
  }
  // abelian: potential vanishes
  ConnectionPotential flat = levi_civita(builtin("torus6"));
  for (auto& a : flat) CHECK(a.norm() == 0.0);
  // bi-invariant factor metric: Nabla_X Y = 1/2 [X, Y]
  HomogeneousModel hopf = builtin("hopf4");
  ConnectionPotential lc = levi_civita(hopf);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      CHECK((lc[i].col(j) - 0.5 * hopf.bracket_m(i, j)).norm() < 1e-12);
}

TEST_CASE("exterior differential: d^2 = 0 and d phi = alternation of the derivative") {
  Rng rng(211);
  for (auto& name : {"hopf4", "calabi_eckmann6", "ledger_obata6", "flag6", "twistor6"}) {
    HomogeneousModel m = builtin(name);
    ConnectionPotential lc = levi_civita(m);
    for (int p = 0; p <= 3; ++p) {
      // only h-invariant coefficients define tensor fields on G/H
      Form f = h_invariant_project(m, rng.form(m.dim_m(), p));
      CHECK(h_invariance_residual(m, f) < 1e-9);
      CHECK(ext_d(m, ext_d(m, f)).norm() < 1e-10 * (1.0 + f.norm()));
      // d as total alternation of the covariant derivative
      VectorValuedForms df;
      for (int i = 0; i < m.dim_m(); ++i) df.push_back(covariant_derivative(lc, i, f));
      if (p > 0) CHECK((ext_d(m, f) - alternation(df)).norm() < 1e-11);
    }
  }
  // abelian model: every invariant form is closed
  HomogeneousModel t6 = builtin("torus6");
  CHECK(ext_d(t6, rng.form(6, 2)).norm() == 0.0);
}

TEST_CASE("codifferential is adjoint to d on invariant forms") {
  Rng rng(223);
  for (auto& name : {"hopf4", "ledger_obata6", "twistor6"}) {
    HomogeneousModel m = builtin(name);
    ConnectionOps lc(m, levi_civita(m));
    for (int p = 1; p <= 3; ++p) {
      Form f = h_invariant_project(m, rng.form(m.dim_m(), p - 1));
      Form g = h_invariant_project(m, rng.form(m.dim_m(), p));
      CHECK(std::abs(inner(lc.d(f), g) - inner(f, lc.dstar(g))) < 1e-10);
    }
  }
}

TEST_CASE("curvature convention: round factors have positive Ricci") {
  // Unit-type spheres in hopf4: sectional curvature of the su(2) block is
  // positive in the R(X,Y,X,Y)-trace convention used throughout.
  HomogeneousModel m = builtin("hopf4");
  CurvatureLike R = potential_curvature(m, levi_civita(m));
  Eigen::MatrixXd ric = ricci(R);
  CHECK((ric - ric.transpose()).norm() < 1e-12);
  // su(2) directions (0,1,2) carry Ric = 2 * (scale); flat direction 3 zero
  CHECK(ric(0, 0) > 1.0);
  CHECK(std::abs(ric(0, 0) - ric(1, 1)) < 1e-12);
  CHECK(std::abs(ric(0, 0) - ric(2, 2)) < 1e-12);
  CHECK(std::abs(ric(3, 3)) < 1e-12);
  // algebraic curvature tensor: pair-symmetric, Bianchi kernel
  CHECK(R.pair_symmetry_residual() < 1e-11);
  CHECK(max_norm(bianchi_b1(R)) < 1e-11);
}

TEST_CASE("torus is flat and Kaehler") {
  HomogeneousModel m = builtin("torus6");
  CHECK(potential_curvature(m, levi_civita(m)).max_abs() == 0.0);
  CHECK(ext_d(m, kaehler_form(6)).norm() == 0.0);
}

TEST_CASE("three-symmetric builtins are strict nearly-Kaehler and Einstein") {
  for (auto& name : {"ledger_obata6", "flag6", "twistor6"}) {
    HomogeneousModel m = builtin(name);
    int n = m.dim_m();
    ConnectionPotential lc = levi_civita(m);
    Form w = kaehler_form(n);
    VectorValuedForms nw;
    for (int i = 0; i < n; ++i) nw.push_back(covariant_derivative(lc, i, w));
    // strict: the intrinsic torsion does not vanish
    double mass = 0.0;
    for (auto& f : nw) mass += inner(f, f);
    CHECK(mass > 1e-2);
    // nearly-Kaehler: (Nabla_X omega)(X, .) = 0 for random X
    Rng rng(301);
    for (int trial = 0; trial < 12; ++trial) {
      Eigen::VectorXd x = rng.normal_vector(n);
      Form nxw(n, 2);
      for (int i = 0; i < n; ++i) nxw += x[i] * nw[i];
      CHECK(nxw.contract(x).norm() < 1e-10 * x.squaredNorm());
    }
    // Einstein with positive constant
    Eigen::MatrixXd ric = ricci(potential_curvature(m, lc));
    double lambda = ric.trace() / n;
    CHECK(lambda > 0.1);
    CHECK((ric - lambda * Eigen::MatrixXd::Identity(n, n)).norm() < 1e-10);
  }
}

TEST_CASE("hermitian builtins have J-closed structure") {
  // For hopf4 and calabi_eckmann6 the (3,0)-part of d omega vanishes
  // (integrable J; the full Nijenhuis test lives with the pointwise analysis).
  for (auto& name : {"hopf4", "calabi_eckmann6"}) {
    HomogeneousModel m = builtin(name);
    Form dw = ext_d(m, kaehler_form(m.dim_m()));
    CHECK(bidegree_project(dw, {3, 0}).norm() < 1e-11);
    CHECK(dw.norm() > 0.1);  // but not Kaehler
  }
}

TEST_CASE("frame covariance under J-commuting orthogonal changes") {
  Rng rng(307);
  for (auto& name : {"ledger_obata6", "hopf4"}) {
    HomogeneousModel m = builtin(name);
    int n = m.dim_m();
    HomogeneousModel m2 = m.transformed(rng.orthogonal_J_commuting(n));
    m2.validate(1e-9);
    auto invariants = [&](const HomogeneousModel& mm) {
      ConnectionPotential lc = levi_civita(mm);
      Form w = kaehler_form(mm.dim_m());
      double dn = ext_d(mm, w).norm();
      double mass = 0.0;
      for (int i = 0; i < mm.dim_m(); ++i) mass += inner(act(lc[i], w), act(lc[i], w));
      Eigen::VectorXd ev =
          Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ricci(potential_curvature(mm, lc)))
              .eigenvalues();
      return std::make_tuple(dn, mass, ev);
    };
    auto [d1, mass1, ev1] = invariants(m);
    auto [d2, mass2, ev2] = invariants(m2);
    CHECK(std::abs(d1 - d2) < 1e-9);
    CHECK(std::abs(mass1 - mass2) < 1e-9);
    CHECK((ev1 - ev2).norm() < 1e-9);
  }
}

TEST_CASE("product models") {
  HomogeneousModel p = product(builtin("hopf4"), builtin("ledger_obata6"));
  CHECK(p.dim_m() == 10);
  CHECK(p.dim_h() == 3);
  p.validate(1e-9);
  // block structure: no cross brackets
  for (int i = 0; i < 4; ++i)
    for (int j = 4; j < 10; ++j) CHECK(p.bracket(i, j).norm() == 0.0);
  // factor curvature survives intact
  CurvatureLike R = potential_curvature(p, levi_civita(p));
  CurvatureLike Rh = potential_curvature(builtin("hopf4"), levi_civita(builtin("hopf4")));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) CHECK(std::abs(R(i, j, k, l) - Rh(i, j, k, l)) < 1e-12);
}
