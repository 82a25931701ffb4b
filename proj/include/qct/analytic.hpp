#pragma once

// Closed-form N = 1 solution: H = J X₀X₁ + h(Z₀ + Z₁), k = J/2, E₀ = √(h² + k²), r = k/E₀.
//
// Two families of closed forms live here. The "reference" forms are the textbook
// r-parameterized expressions, kept verbatim. The "framework" forms substitute the exact
// correlators ⟨Z₁⟩ = −h/E₀ and ⟨X₀X₁⟩ = −k/E₀ into the general ξ/η expressions and are
// the ones that agree with the density-matrix pipeline.

#include "qct/models.hpp"

namespace qct {

struct TwoQubitClosedForm {
  double h = 1.0;
  double j = 1.0;
  double k = 0.5;
  double e0 = 0.0;
  double r = 0.0;

  static TwoQubitClosedForm make(double h, double j);
};

/// (−sgn(k)√(E₀−h)|00⟩ + √(E₀+h)|11⟩)/√(2E₀); energy −2E₀. Needs h ≥ 0.
State ground_state_2q(const TwoQubitClosedForm& form);

double ground_energy_2q(const TwoQubitClosedForm& form);

/// Exact ⟨Z₁⟩ and ⟨X₀X₁⟩ in the ground state.
double z1_2q(const TwoQubitClosedForm& form);
double xx_2q(const TwoQubitClosedForm& form);

/// Reference form ½(1 − (1 + (−1)^a r²)/√(1 + r²)).
double delta_charge_2q_reference(const TwoQubitClosedForm& form, int a);

/// ξ = −⟨Z₁⟩, η = ⟨X₀X₁⟩ in the optimal-angle shift.
double delta_charge_2q_framework(const TwoQubitClosedForm& form, int a);

struct ChargeComparison {
  double reference = 0.0;
  double framework = 0.0;
  double pipeline = 0.0;
};

/// All three values side by side; only framework vs pipeline is expected to agree.
ChargeComparison delta_charge_2q(const TwoQubitClosedForm& form, int a);

/// Reference form h + Jr − (h² + (−1)^a J²)(1 + (−1)^a r²)/√((h² + J²)(1 + r²)).
double delta_energy_2q_reference(const TwoQubitClosedForm& form, int a);

/// ξ = −2⟨H_B⟩, η = 2h⟨X₀X₁⟩ − 2J⟨Z₁⟩ in the optimal-angle shift.
double delta_energy_2q_framework(const TwoQubitClosedForm& form, int a);

}  // namespace qct
