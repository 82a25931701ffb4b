#pragma once

// Five-step teleportation protocol evaluated on density matrices, plus the
// closed forms it must agree with.
//
// Conventions:
//   P_A(b)  = ½(I − (−1)^b σ_A)
//   U_B(c)  = exp(+iθ(−1)^c σ_B), applied with c = b ⊕ a
//   ξ       = Tr[ρ σ_B O σ_B] − Tr[ρ O]
//   η       = i·Tr[ρ σ_A [O, σ_B]]
//   δ(θ, a) = ½ξ(1 − cos 2θ) − ½(−1)^a η sin 2θ
//   θ*      = ½·atan2(η, ξ)

#include <array>
#include <vector>

#include "qct/models.hpp"

namespace qct {

struct ThetaPolicy {
  enum class Kind { OptimalA0, Fixed };
  Kind kind = Kind::OptimalA0;
  double value = 0.0;  // radians, Fixed only

  static ThetaPolicy optimal() { return {}; }
  static ThetaPolicy fixed(double theta) { return {Kind::Fixed, theta}; }
};

struct ProtocolConfig {
  ModelSpec spec;
  Basis basis = Basis::X0;
  ObservableKind observable = ObservableKind::Charge;
  int a = 0;
  ThetaPolicy theta;
};

void validate(const ProtocolConfig& config);

struct ComponentResult {
  ObservableKind kind = ObservableKind::EnergyComponentZ;
  double xi = 0.0;
  double eta = 0.0;
  double delta = 0.0;
};

struct TeleportResult {
  double xi = 0.0;
  double eta = 0.0;
  double theta = 0.0;
  double delta = 0.0;     // density-matrix pipeline
  double baseline = 0.0;  // Tr[ρO] of the resource
  /// ξ = η = 0 under OptimalA0: θ is undefined, reported as θ = δ = 0.
  bool degenerate = false;
  std::array<double, 2> branch_b_probabilities{};
  /// Energy only: hZ_N and J·XX evaluated at the θ of the sum.
  std::vector<ComponentResult> components;
};

struct Correlators {
  double xi = 0.0;
  double eta = 0.0;
};

Op alice_projector(const Op& sigma_a, int b);

/// exp(+iθ(−1)^c σ_B).
Op bob_rotation(const Op& sigma_b, double theta, int c);

/// ρ_B = Σ_b U_B(b⊕a) P_A(b) ρ P_A(b) U_B(b⊕a)†. Branch weights go to `branch_probs` when given.
Density evolve(const Density& rho, const ProtocolPair& pair, double theta, int a,
               std::array<double, 2>* branch_probs = nullptr);

Correlators correlators(const Density& rho, const Op& o, const ProtocolPair& pair);

/// ½·atan2(η, ξ); throws on (0, 0).
double optimal_theta(double xi, double eta);

/// ½ξ(1 − cos 2θ) − ½(−1)^a η sin 2θ.
double delta_closed_form(double xi, double eta, double theta, int a);

/// Closed form at θ*: ½ξ − ½(ξ² + (−1)^a η²)/√(ξ² + η²).
double delta_optimal(double xi, double eta, int a);

/// Component shift at the θ* of the sum: ½ξ_i − ½(ξ_iξ + (−1)^a η_iη)/√(ξ² + η²).
double delta_component_optimal(double xi_i, double eta_i, double xi, double eta, int a);

TeleportResult run_exact(const ProtocolConfig& config, const Density& resource);

/// run_exact on the model's ground state.
TeleportResult run_exact(const ProtocolConfig& config);

/// Energy observable only; components populated.
TeleportResult teleport_components(const ProtocolConfig& config);

}  // namespace qct
