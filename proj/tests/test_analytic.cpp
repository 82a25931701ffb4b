#include <doctest.h>

#include <cstdio>

#include "qct/analytic.hpp"
#include "qct/protocol.hpp"

using namespace qct;

TEST_CASE("closed-form ground state") {
  const auto f = TwoQubitClosedForm::make(1.0, 2.0);
  const State gs = ground_state_2q(f);
  CHECK(gs(0).real() == doctest::Approx(-0.382683).epsilon(1e-6));
  CHECK(gs(3).real() == doctest::Approx(0.923880).epsilon(1e-6));
  CHECK(std::abs(gs(1)) == 0.0);
  CHECK(std::abs(gs(2)) == 0.0);

  const State field = ground_state_2q(TwoQubitClosedForm::make(1.0, 0.0));
  CHECK(std::abs(field(3) - 1.0) < 1e-15);

  const auto g = TwoQubitClosedForm::make(1.0, 1.0);
  const Op h = build_hamiltonian({ModelKind::Star, 1, 1.0, 1.0});
  const State v = ground_state_2q(g);
  CHECK((h * v + 2.0 * g.e0 * v).norm() < 1e-10);
  CHECK(ground_energy_2q(g) == doctest::Approx(-2.0 * std::sqrt(1.25)));
  CHECK_THROWS_AS(ground_state_2q(TwoQubitClosedForm::make(-1.0, 1.0)), ValidationError);
  CHECK_THROWS_AS(TwoQubitClosedForm::make(0.0, 0.0), ValidationError);
}

TEST_CASE("closed form agrees with diagonalization over a grid") {
  for (int i = 0; i < 10; ++i)
    for (int k = 0; k < 10; ++k) {
      const double h = 0.1 + 0.4 * i;
      const double j = -3.0 + 0.7 * k;
      const auto f = TwoQubitClosedForm::make(h, j);
      const Spectrum<double> s = model_spectrum({ModelKind::Star, 1, j, h});
      CHECK(std::abs(ground_state_2q(f).dot(s.vector(0))) > 1.0 - 1e-10);
      CHECK(std::abs(s.eigenvalues(0) - ground_energy_2q(f)) < 1e-10);
      const State gs = s.vector(0);
      CHECK(std::abs(expectation(gs, pauli_on_site(Pauli::Z, 1, 2)) - z1_2q(f)) < 1e-10);
      CHECK(std::abs(expectation(gs, Op(pauli_on_site(Pauli::X, 0, 2) * pauli_on_site(Pauli::X, 1, 2))) - xx_2q(f)) <
            1e-10);
    }
}

TEST_CASE("charge closed forms") {
  const auto zero = TwoQubitClosedForm::make(1.0, 0.0);
  for (int a : {0, 1}) {
    CHECK(delta_charge_2q_reference(zero, a) == doctest::Approx(0.0));
    CHECK(delta_charge_2q_framework(zero, a) == doctest::Approx(0.0));
  }
  const auto strong = TwoQubitClosedForm::make(1.0, 1e6);
  CHECK(delta_charge_2q_reference(strong, 1) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(delta_charge_2q_framework(strong, 1) == doctest::Approx(0.5).epsilon(1e-6));

  const ChargeComparison c = delta_charge_2q(TwoQubitClosedForm::make(1.0, 1.0), 0);
  CHECK(c.reference == doctest::Approx(-0.047723).epsilon(1e-6));
  CHECK(c.framework == doctest::Approx(-0.052786).epsilon(1e-6));
  CHECK(std::abs(c.framework - c.pipeline) < 1e-10);
  std::printf("charge h=J=1 a=0: reference %.6f framework %.6f pipeline %.6f\n", c.reference, c.framework,
              c.pipeline);

  const auto s50 = TwoQubitClosedForm::make(1.0, 50.0);
  CHECK(std::abs(delta_charge_2q_framework(s50, 1) - 0.518386) < 1e-6);
  CHECK(std::abs(delta_charge_2q_framework(s50, 0) + 0.480016) < 1e-6);
}

TEST_CASE("energy closed forms") {
  const auto zero = TwoQubitClosedForm::make(1.0, 0.0);
  CHECK(delta_energy_2q_reference(zero, 0) == doctest::Approx(0.0));
  CHECK(delta_energy_2q_framework(zero, 0) == doctest::Approx(0.0));
  ProtocolConfig c;
  c.spec = {ModelKind::Star, 1, 1.0, 1.0};
  c.observable = ObservableKind::Energy;
  for (double j : {1.0, 2.0, 0.4})
    for (int a : {0, 1}) {
      c.spec.j = j;
      c.a = a;
      const auto f = TwoQubitClosedForm::make(1.0, j);
      const double pipeline = run_exact(c).delta;
      CHECK(std::abs(delta_energy_2q_framework(f, a) - pipeline) < 1e-9);
      std::printf("energy h=1 J=%.1f a=%d: reference %.6f framework %.6f pipeline %.6f\n", j, a,
                  delta_energy_2q_reference(f, a), delta_energy_2q_framework(f, a), pipeline);
    }
  CHECK(delta_energy_2q_framework(TwoQubitClosedForm::make(1.0, 1.0), 0) == doctest::Approx(-0.0725728).epsilon(1e-7));
  CHECK(delta_energy_2q_framework(TwoQubitClosedForm::make(1.0, 2.0), 0) == doctest::Approx(-0.114748).epsilon(1e-6));
}

TEST_CASE("weak coupling limit") {
  const auto f = TwoQubitClosedForm::make(1.0, 1e-8);
  for (int a : {0, 1}) {
    CHECK(std::abs(delta_charge_2q_framework(f, a)) < 1e-6);
    CHECK(std::abs(delta_charge_2q_reference(f, a)) < 1e-6);
    CHECK(std::abs(delta_energy_2q_framework(f, a)) < 1e-6);
    CHECK(std::abs(delta_energy_2q_reference(f, a)) < 1e-6);
  }
}
