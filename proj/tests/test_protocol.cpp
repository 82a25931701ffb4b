#include <doctest.h>

#include "oracles.hpp"
#include "qct/protocol.hpp"

using namespace qct;
using C = std::complex<double>;

namespace {

ProtocolConfig make(ModelKind kind, int n, double j, double h, Basis basis, ObservableKind o, int a) {
  ProtocolConfig c;
  c.spec = {kind, n, j, h};
  c.basis = basis;
  c.observable = o;
  c.a = a;
  return c;
}

}  // namespace

TEST_CASE("alice projector") {
  const Op x = pauli(Pauli::X);
  Op expected(2, 2);
  expected << 0.5, -0.5, -0.5, 0.5;
  CHECK(max_abs(Op(alice_projector(x, 0) - expected)) < 1e-15);
  CHECK(max_abs(Op(alice_projector(x, 0) + alice_projector(x, 1) - identity(2))) < 1e-15);
  CHECK(max_abs(Op(alice_projector(x, 0) * alice_projector(x, 1))) < 1e-15);
  CHECK_THROWS_AS(alice_projector(Op(2.0 * x), 0), ValidationError);
  CHECK_THROWS_AS(alice_projector(x, 2), ValidationError);
}

TEST_CASE("charge star N=1 h=J=1 against the brute-force pipeline") {
  for (int a : {0, 1}) {
    const auto c = make(ModelKind::Star, 1, 1.0, 1.0, Basis::X0, ObservableKind::Charge, a);
    const TeleportResult r = run_exact(c);
    CHECK(r.xi == doctest::Approx(0.894427).epsilon(1e-6));
    CHECK(r.eta == doctest::Approx(-0.447214).epsilon(1e-6));
    CHECK(r.theta == doctest::Approx(-0.231824).epsilon(1e-6));
    CHECK(r.delta == doctest::Approx(a == 0 ? -0.052786 : 0.147214).epsilon(1e-6));
    const ModelSpec s = c.spec;
    const oracle::M rho = oracle::inverse_power(oracle::hamiltonian(s)).vector *
                          oracle::inverse_power(oracle::hamiltonian(s)).vector.adjoint();
    const double brute = oracle::pipeline_delta(rho, oracle::M(charge_observable(s)), oracle::on_site('X', 0, 2),
                                                oracle::on_site('Y', 1, 2), r.theta, a);
    CHECK(std::abs(brute - r.delta) < 1e-9);
    CHECK(r.branch_b_probabilities[0] == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(r.branch_b_probabilities[1] == doctest::Approx(0.5).epsilon(1e-10));
  }
}

TEST_CASE("J = 0 gives no shift") {
  for (auto o : {ObservableKind::Charge, ObservableKind::Energy})
    for (auto kind : {ModelKind::Star, ModelKind::NearestNeighbor}) {
      const TeleportResult r = run_exact(make(kind, 2, 0.0, 1.0, Basis::X0, o, 0));
      CHECK(r.eta == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(std::abs(r.delta) < 1e-12);
    }
}

TEST_CASE("optimal_theta examples") {
  CHECK(optimal_theta(-1.0, 0.0) == doctest::Approx(M_PI / 2));
  CHECK(delta_optimal(-1.0, 0.0, 0) == doctest::Approx(-1.0));
  CHECK(delta_closed_form(-1.0, 0.0, M_PI / 2, 0) == doctest::Approx(-1.0));
  CHECK(optimal_theta(0.0, 1.0) == doctest::Approx(M_PI / 4));
  CHECK(delta_optimal(0.0, 1.0, 0) == doctest::Approx(-0.5));
  CHECK_THROWS_AS(optimal_theta(0.0, 0.0), ValidationError);

  const double xi = 0.894427191;
  const double eta = -0.4472135955;
  const double t = optimal_theta(xi, eta);
  CHECK(t == doctest::Approx(-0.231824).epsilon(1e-6));
  // θ-grid scan oracle over one period.
  const int grid = 10000;
  double best = 1e300;
  double best_t = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double th = -M_PI / 2 + M_PI * i / grid;
    const double d = 0.5 * xi * (1 - std::cos(2 * th)) - 0.5 * eta * std::sin(2 * th);
    if (d < best) best = d, best_t = th;
  }
  CHECK(std::abs(best_t - t) <= M_PI / grid);
  CHECK(delta_closed_form(xi, eta, t, 0) <= best + 1e-12);
}

TEST_CASE("pipeline matches closed form for fixed and optimal angles") {
  for (auto kind : {ModelKind::Star, ModelKind::NearestNeighbor})
    for (int n = 1; n <= 3; ++n)
      for (auto basis : {Basis::X0, Basis::Y0}) {
        if (basis == Basis::Y0 && (kind == ModelKind::Star || n < 2)) continue;
        for (auto o : {ObservableKind::Charge, ObservableKind::Energy, ObservableKind::EnergyComponentZ,
                       ObservableKind::EnergyComponentXX})
          for (int a : {0, 1}) {
            auto c = make(kind, n, 1.7, 0.6, basis, o, a);
            const TeleportResult r = run_exact(c);
            CHECK(std::abs(r.delta - delta_optimal(r.xi, r.eta, a)) < 1e-10);
            c.theta = ThetaPolicy::fixed(0.37);
            const TeleportResult f = run_exact(c);
            CHECK(std::abs(f.delta - delta_closed_form(f.xi, f.eta, 0.37, a)) < 1e-10);
          }
      }
}

TEST_CASE("star energy matches the explicit formula") {
  for (double j : {0.5, 1.0, 2.0, 4.0})
    for (double h : {0.25, 1.0, 2.0}) {
      const auto c = make(ModelKind::Star, 3, j, h, Basis::X0, ObservableKind::Energy, 0);
      const State gs = model_ground_state(c.spec);
      const double z = expectation(gs, pauli_on_site(Pauli::Z, 3, 4));
      const double xx = expectation(gs, Op(pauli_on_site(Pauli::X, 0, 4) * pauli_on_site(Pauli::X, 3, 4)));
      const double hb = h * z + j * xx;
      const TeleportResult r = run_exact(c);
      CHECK(r.xi == doctest::Approx(-2 * hb).epsilon(1e-10));
      CHECK(r.eta == doctest::Approx(2 * h * xx - 2 * j * z).epsilon(1e-10));
      CHECK(std::abs(r.delta - (-hb - std::sqrt((h * h + j * j) * (z * z + xx * xx)))) < 1e-9);
    }
}

TEST_CASE("energy components sum to the aggregate") {
  for (auto [kind, n, basis] : {std::tuple{ModelKind::Star, 1, Basis::X0}, {ModelKind::Star, 3, Basis::X0},
                                {ModelKind::NearestNeighbor, 2, Basis::X0}, {ModelKind::NearestNeighbor, 2, Basis::Y0},
                                {ModelKind::NearestNeighbor, 4, Basis::Y0}})
    for (int a : {0, 1}) {
      const TeleportResult r = teleport_components(make(kind, n, 2.0, 1.0, basis, ObservableKind::Energy, a));
      REQUIRE(r.components.size() == 2);
      double sum = 0.0;
      for (const auto& comp : r.components) {
        sum += comp.delta;
        CHECK(std::abs(comp.delta - delta_component_optimal(comp.xi, comp.eta, r.xi, r.eta, a)) < 1e-10);
      }
      CHECK(std::abs(sum - r.delta) < 1e-10);
      CHECK(std::abs(r.components[0].xi + r.components[1].xi - r.xi) < 1e-10);
      CHECK(std::abs(r.components[0].eta + r.components[1].eta - r.eta) < 1e-10);
    }
  CHECK_THROWS_AS(teleport_components(make(ModelKind::Star, 1, 1, 1, Basis::X0, ObservableKind::Charge, 0)),
                  ValidationError);
}

TEST_CASE("nn N=2 energy correlators in the two bases") {
  const ModelSpec s{ModelKind::NearestNeighbor, 2, 2.0, 1.0};
  const State gs = model_ground_state(s);
  const double z2 = expectation(gs, pauli_on_site(Pauli::Z, 2, 3));
  const double y0y2 = expectation(gs, Op(pauli_on_site(Pauli::Y, 0, 3) * pauli_on_site(Pauli::Y, 2, 3)));

  const TeleportResult y = teleport_components(make(ModelKind::NearestNeighbor, 2, 2.0, 1.0, Basis::Y0,
                                                    ObservableKind::Energy, 0));
  CHECK(y.xi == doctest::Approx(-2 * 1.0 * z2).epsilon(1e-10));
  CHECK(std::abs(y.components[1].xi) < 1e-10);  // XX term commutes with σ_B = X_N
  CHECK(y.eta == doctest::Approx(-2 * 1.0 * y0y2).epsilon(1e-10));

  // Brute-force pipeline for both bases.
  const oracle::M rho = density_from_state(gs);
  const oracle::M hb = local_hamiltonian_bob(s).total;
  for (auto basis : {Basis::X0, Basis::Y0}) {
    const TeleportResult r = run_exact(make(ModelKind::NearestNeighbor, 2, 2.0, 1.0, basis, ObservableKind::Energy, 0));
    const ProtocolPair pr = protocol_pair(s, basis);
    CHECK(std::abs(oracle::pipeline_delta(rho, hb, pr.sigma_a, pr.sigma_b, r.theta, 0) - r.delta) < 1e-9);
  }
}

TEST_CASE("charge sign law and optimality") {
  for (double j : {0.5, 1.0, 2.0, 4.0})
    for (double h : {0.25, 1.0, 4.0}) {
      auto c = make(ModelKind::NearestNeighbor, 3, j, h, Basis::X0, ObservableKind::Charge, 0);
      const TeleportResult r0 = run_exact(c);
      c.a = 1;
      const TeleportResult r1 = run_exact(c);
      CHECK(r0.delta < 0.0);
      CHECK(r1.delta > 0.0);
      for (int i = 0; i < 400; ++i) {
        const double th = -M_PI / 2 + M_PI * i / 400;
        CHECK(r0.delta <= delta_closed_form(r0.xi, r0.eta, th, 0) + 1e-12);
      }
    }
}

TEST_CASE("resource validation") {
  const auto c = make(ModelKind::Star, 1, 1, 1, Basis::X0, ObservableKind::Charge, 0);
  CHECK_THROWS_AS(run_exact(c, Density(identity(8) / 8.0)), ValidationError);
  Density bad = Density::Zero(4, 4);
  bad(0, 0) = 2.0;
  CHECK_THROWS_AS(run_exact(c, bad), ValidationError);
  auto wrong = c;
  wrong.a = 3;
  CHECK_THROWS_AS(run_exact(wrong), ValidationError);
}
