#include <doctest.h>

#include "oracles.hpp"
#include "qct/models.hpp"
#include "qct/protocol.hpp"

using namespace qct;
using C = std::complex<double>;

TEST_CASE("field-only star Hamiltonian") {
  const Op h = build_hamiltonian({ModelKind::Star, 1, 0.0, 1.0});
  Op expected = Op::Zero(4, 4);
  expected.diagonal() << 2, 0, 0, -2;
  CHECK(max_abs(Op(h - expected)) == 0.0);
}

TEST_CASE("star and nn coincide at N=1") {
  for (double j : {-1.5, 0.3, 2.0})
    CHECK(max_abs(Op(build_hamiltonian({ModelKind::Star, 1, j, 0.7}) -
                     build_hamiltonian({ModelKind::NearestNeighbor, 1, j, 0.7}))) == 0.0);
}

TEST_CASE("Hamiltonians match independent Kronecker reassembly") {
  for (auto kind : {ModelKind::Star, ModelKind::NearestNeighbor})
    for (int n = 1; n <= 4; ++n) {
      const ModelSpec s{kind, n, 1.0, 1.0};
      const Op h = build_hamiltonian(s);
      CHECK(max_abs(Op(h - oracle::hamiltonian(s))) < 1e-14);
      CHECK(is_hermitian(h));
    }
}

TEST_CASE("Hamiltonian linear in coefficients") {
  const ModelSpec s{ModelKind::NearestNeighbor, 3, 0.8, -0.6};
  const ModelSpec t{ModelKind::NearestNeighbor, 3, 0.8 * 2.5, -0.6 * 2.5};
  CHECK(max_abs(Op(build_hamiltonian(t) - 2.5 * build_hamiltonian(s))) < 1e-14);
}

TEST_CASE("Bob's local Hamiltonian") {
  const LocalHamiltonian hb = local_hamiltonian_bob({ModelKind::Star, 1, 2.0, 1.0});
  const Op expected = oracle::on_site('Z', 1, 2) + 2.0 * oracle::on_site('X', 0, 2) * oracle::on_site('X', 1, 2);
  CHECK(max_abs(Op(hb.total - expected)) < 1e-15);
  CHECK(max_abs(Op(hb.z_term + hb.xx_term - hb.total)) == 0.0);

  const LocalHamiltonian nn = local_hamiltonian_bob({ModelKind::NearestNeighbor, 3, 1.5, 0.5});
  CHECK(nn.total.rows() == 16);
  const Op e3 = 0.5 * oracle::on_site('Z', 3, 4) + 1.5 * oracle::on_site('X', 2, 4) * oracle::on_site('X', 3, 4);
  CHECK(max_abs(Op(nn.total - e3)) < 1e-15);

  const ModelSpec s{ModelKind::Star, 1, 2.0, 1.0};
  const double e0 = std::sqrt(2.0);
  CHECK(expectation(model_ground_state(s), hb.total) ==
        doctest::Approx(1.0 * (-1.0 / e0) + 2.0 * (-1.0 / e0)).epsilon(1e-10));
  CHECK(expectation(model_ground_state(s), hb.total) == doctest::Approx(-2.1213203436).epsilon(1e-9));
}

TEST_CASE("ground-state correlators at N=1 h=1 J=2") {
  const State gs = model_ground_state({ModelKind::Star, 1, 2.0, 1.0});
  CHECK(expectation(gs, Op(oracle::on_site('X', 0, 2) * oracle::on_site('X', 1, 2))) ==
        doctest::Approx(-0.70711).epsilon(1e-5));
  CHECK(expectation(gs, Op(oracle::on_site('Z', 1, 2))) == doctest::Approx(-0.70711).epsilon(1e-5));
}

TEST_CASE("charge observable") {
  const ModelSpec s{ModelKind::Star, 1, 2.0, 1.0};
  const Op q = charge_observable(s);
  Op expected = Op::Zero(4, 4);
  expected.diagonal() << 1, 0, 1, 0;
  CHECK(max_abs(Op(q - expected)) == 0.0);
  CHECK(max_abs(Op(q * q - q)) < 1e-12);
  const double z1 = expectation(model_ground_state(s), Op(oracle::on_site('Z', 1, 2)));
  CHECK(expectation(model_ground_state(s), q) == doctest::Approx(0.5 * (1 + z1)).epsilon(1e-12));
  CHECK(expectation(model_ground_state(s), q) == doctest::Approx(0.146447).epsilon(1e-5));
}

TEST_CASE("protocol pairs and basis legality") {
  const ModelSpec star{ModelKind::Star, 3, 1.0, 1.0};
  const ProtocolPair px = protocol_pair(star, Basis::X0);
  CHECK(max_abs(Op(px.sigma_a - oracle::on_site('X', 0, 4))) == 0.0);
  CHECK(max_abs(Op(px.sigma_b - oracle::on_site('Y', 3, 4))) == 0.0);
  const ProtocolPair py = protocol_pair({ModelKind::NearestNeighbor, 2, 1.0, 1.0}, Basis::Y0);
  CHECK(max_abs(Op(py.sigma_a - oracle::on_site('Y', 0, 3))) == 0.0);
  CHECK(max_abs(Op(py.sigma_b - oracle::on_site('X', 2, 3))) == 0.0);
  CHECK_THROWS_AS(protocol_pair(star, Basis::Y0), ValidationError);
  CHECK_THROWS_AS(protocol_pair({ModelKind::NearestNeighbor, 1, 1.0, 1.0}, Basis::Y0), ValidationError);
}

TEST_CASE("projector commutation with Bob's Hamiltonian") {
  for (int n = 1; n <= 4; ++n) {
    const ModelSpec star{ModelKind::Star, n, 1.3, 1.0};
    const Op hb = local_hamiltonian_bob(star).total;
    const Op x0 = pauli_on_site(Pauli::X, 0, n + 1);
    const Op y0 = pauli_on_site(Pauli::Y, 0, n + 1);
    for (int b = 0; b < 2; ++b) {
      CHECK(max_abs(commutator(hb, alice_projector(x0, b))) < 1e-12);
      CHECK(commutator(hb, alice_projector(y0, b)).norm() > 0.1 * star.j);
    }
  }
  for (int n = 2; n <= 4; ++n) {
    const ModelSpec nn{ModelKind::NearestNeighbor, n, 1.3, 1.0};
    const Op hb = local_hamiltonian_bob(nn).total;
    for (auto p : {Pauli::X, Pauli::Y})
      for (int b = 0; b < 2; ++b)
        CHECK(max_abs(commutator(hb, alice_projector(pauli_on_site(p, 0, n + 1), b))) < 1e-12);
  }
}

TEST_CASE("global parity commutes with both Hamiltonians") {
  for (auto kind : {ModelKind::Star, ModelKind::NearestNeighbor})
    for (int n = 1; n <= 4; ++n) {
      const ModelSpec s{kind, n, 0.9, 1.1};
      CHECK(max_abs(commutator(parity_operator(s), build_hamiltonian(s))) < 1e-12);
      // The charge itself is not conserved.
      CHECK(max_abs(commutator(charge_observable(s), build_hamiltonian(s))) > 0.1);
    }
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(build_hamiltonian({ModelKind::Star, 0, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(build_hamiltonian({ModelKind::Star, 12, 1.0, 1.0}), ValidationError);
  CHECK_THROWS_AS(build_hamiltonian({ModelKind::Star, 1, NAN, 1.0}), ValidationError);
  CHECK_THROWS_AS(parse_model_kind("chain"), ValidationError);
  CHECK(parse_observable("energy-xx") == ObservableKind::EnergyComponentXX);
}
