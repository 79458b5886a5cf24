#include <catch2/catch_amalgamated.hpp>

#include <torsionlab/almost_hermitian.hpp>
#include <torsionlab/builtin_models.hpp>
#include <torsionlab/rng.hpp>

using namespace torsionlab;

namespace {

// A random 1-jet: arbitrary lambda^2-valued slots, no integrability assumed.
AHPoint random_jet(int dim, Rng& rng) {
  AHPoint p;
  p.dim = dim;
  for (int i = 0; i < dim; ++i) {
    Form f = rng.form(dim, 2);
    p.nabla_omega.push_back(0.5 * (f - pullJ(f)));
  }
  return p;
}

}  // namespace

TEST_CASE("first-order identities hold for arbitrary jets") {
  Rng rng(1201);
  for (int dim : {4, 6, 8}) {
    for (int trial = 0; trial < 20; ++trial) {
      AHPoint p = random_jet(dim, rng);
      REQUIRE(p.lambda2_residual() < 1e-12);
      TorsionData td = torsion_data(p);
      // 2 Nabla_X omega = -N^J_{JX} + X . d omega + JX . J d omega
      REQUIRE(td.residual_jet1 < 1e-10);
      // N^J splits as NJ_hat - 4 psi^- slot-wise
      REQUIRE(td.residual_nj_split < 1e-10);
      // total alternation of N^J recovers the lambda^3 part of d omega
      Form aN = alternation(td.NJ);
      REQUIRE((aN - 4.0 * pullJ(td.dw3)).norm() < 1e-10);
      REQUIRE((aN + 12.0 * td.psi_minus).norm() < 1e-10);
      // the W2-part is alternation-free
      REQUIRE(alternation(td.NJ_hat).norm() < 1e-10);
      // d omega = 2t + 3 psi+ with nothing left over
      REQUIRE((td.domega - 2.0 * td.t - 3.0 * td.psi_plus).norm() < 1e-12);
      // both connection potentials restore Nabla omega = 0
      HermitianConnections hc = connections(p, td);
      REQUIRE(hc.residual_canonical < 1e-10);
      REQUIRE(hc.residual_characteristic < 1e-10);
      // N(JY, JZ) = -N(Y, Z): each Nijenhuis slice is J-anti-invariant
      for (int x = 0; x < dim; ++x)
        REQUIRE((pullJ(td.NJ[x]) + td.NJ[x]).norm() < 1e-10);
    }
  }
}

TEST_CASE("class G1 jets pair the characteristic torsion") {
  Rng rng(1202);
  for (int trial = 0; trial < 20; ++trial) {
    // force NJ_hat = 0 by building Nabla omega from the G1 normal form
    int dim = 6;
    Form t = bidegree_project(rng.form(dim, 3), {2, 1});
    Form psi = bidegree_project(rng.form(dim, 3), {3, 0});
    AHPoint p;
    p.dim = dim;
    Form jt = pullJ(t);
    for (int x = 0; x < dim; ++x) {
      double sx = j0_sign(x);
      p.nabla_omega.push_back(t.contract(x) + sx * jt.contract(j0_partner(x)) + psi.contract(x));
    }
    TorsionData td = torsion_data(p);
    REQUIRE(td.g1);
    REQUIRE(td.residual_g1_eq < 1e-10);
    REQUIRE((td.t - t).norm() < 1e-10);
    REQUIRE((td.psi_plus - psi).norm() < 1e-10);
    HermitianConnections hc = connections(p, td);
    REQUIRE(hc.residual_torsion_pairing < 1e-10);
  }
}

TEST_CASE("Lee form round trip") {
  Rng rng(1203);
  for (int dim : {6, 8}) {
    for (int trial = 0; trial < 10; ++trial) {
      Form theta = rng.form(dim, 1);
      Form t = wedge(theta, kaehler_form(dim));
      REQUIRE((lee_form(t) - theta).norm() < 1e-12);
    }
  }
}

TEST_CASE("flat torus is Kaehler") {
  auto model = builtin("torus6");
  AHPoint p = ah_point(model);
  TorsionData td = torsion_data(p);
  REQUIRE(td.domega.norm() < 1e-14);
  GHClass gh = gh_classify(td);
  REQUIRE(gh.label == "Kaehler");
  REQUIRE(gh.w1 + gh.w2 + gh.w3 + gh.w4 < 1e-14);
}

TEST_CASE("Hopf surface is locally conformally Kaehler") {
  auto model = builtin("hopf4");
  AHPoint p = ah_point(model);
  TorsionData td = torsion_data(p);
  // integrable: the Nijenhuis tensor vanishes identically
  for (auto& slice : td.NJ) REQUIRE(slice.norm() < 1e-12);
  GHClass gh = gh_classify(td);
  REQUIRE(gh.label == "W4");
  REQUIRE(gh.w4 > 0.1);
  REQUIRE(gh.w3 < 1e-12);
  // codifferential pins the Lee form normalization: with t = theta ^ omega one
  // has delta omega = -sum_k e_k . (Nabla_k omega) = 2 L*(J t) = 2(m-1) J theta
  int m = model.dim_m() / 2;
  ConnectionOps lc(model, levi_civita(model));
  Form delta_omega = lc.dstar(kaehler_form(model.dim_m()));
  REQUIRE((2.0 * static_cast<double>(m - 1) * pullJ(gh.theta) - delta_omega).norm() < 1e-12);
}

TEST_CASE("Calabi-Eckmann model is Hermitian with torsion") {
  auto model = builtin("calabi_eckmann6");
  TorsionData td = torsion_data(ah_point(model));
  REQUIRE(td.g1);
  REQUIRE(td.psi_plus.norm() < 1e-12);  // integrable
  REQUIRE(td.t.norm() > 0.1);
  HermitianConnections hc = connections(ah_point(model), td);
  REQUIRE(hc.residual_characteristic < 1e-12);
  REQUIRE(hc.residual_torsion_pairing < 1e-12);
}

TEST_CASE("3-symmetric models are strictly nearly Kaehler") {
  for (std::string name : {"ledger_obata6", "flag6", "twistor6"}) {
    auto model = builtin(name);
    AHPoint p = ah_point(model);
    TorsionData td = torsion_data(p);
    INFO(name);
    REQUIRE(td.g1);
    REQUIRE(td.t.norm() < 1e-10);       // type W1 only
    REQUIRE(td.psi_plus.norm() > 0.1);  // strict
    GHClass gh = gh_classify(td);
    REQUIRE(gh.label == "W1");
    // N^J = -4 psi^- slot-wise
    for (int x = 0; x < p.dim; ++x)
      REQUIRE((td.NJ[x] + 4.0 * td.psi_minus.contract(x)).norm() < 1e-10);
    // characteristic torsion reduces to psi^-
    REQUIRE((td.TD - td.psi_minus).norm() < 1e-10);
  }
}

TEST_CASE("characteristic connection on homogeneous G1 models") {
  std::vector<HomogeneousModel> models;
  for (std::string name : {"hopf4", "calabi_eckmann6", "ledger_obata6", "flag6", "twistor6"})
    models.push_back(builtin(name));
  models.push_back(product(builtin("hopf4"), builtin("ledger_obata6")));
  for (auto& model : models) {
    INFO(model.name());
    TorsionData td = torsion_data(ah_point(model));
    ConnectionPotential pot = characteristic_potential(model);
    REQUIRE(metric_residual(pot) < 1e-12);
    ConnectionOps ops(model, pot);
    // D is Hermitian: it kills omega slot by slot
    Form w = kaehler_form(model.dim_m());
    for (int i = 0; i < model.dim_m(); ++i) REQUIRE(ops.derivative(i, w).norm() < 1e-10);
    // its torsion is totally skew and equals the characteristic torsion form
    REQUIRE(ops.torsion_skewness_residual() < 1e-10);
    REQUIRE((ops.torsion_form() - td.TD).norm() < 1e-10);
  }
}

TEST_CASE("canonical connection is Hermitian on every model") {
  for (std::string name : {"hopf4", "calabi_eckmann6", "ledger_obata6", "twistor6"}) {
    auto model = builtin(name);
    ConnectionPotential pot = canonical_potential(model);
    REQUIRE(metric_residual(pot) < 1e-12);
    ConnectionOps ops(model, pot);
    Form w = kaehler_form(model.dim_m());
    for (int i = 0; i < model.dim_m(); ++i) REQUIRE(ops.derivative(i, w).norm() < 1e-10);
  }
}

TEST_CASE("product model mixes torsion classes") {
  auto model = product(builtin("hopf4"), builtin("ledger_obata6"));
  TorsionData td = torsion_data(ah_point(model));
  REQUIRE(td.g1);
  GHClass gh = gh_classify(td);
  REQUIRE(gh.w1 > 0.1);  // nearly Kaehler factor contributes psi+
  REQUIRE(gh.w4 > 0.1);  // conformal factor contributes a Lee form
  REQUIRE(gh.w2 < 1e-10);
}
