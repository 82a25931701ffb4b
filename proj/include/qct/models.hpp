#pragma once

// Star and nearest-neighbour transverse-field Ising models, Bob's local operators
// and the (σ_A, σ_B) pairs used by the protocol.

#include <string>
#include <string_view>

#include "qct/tensor.hpp"

namespace qct {

using Op = Operator<double>;
using State = StateVector<double>;
using Density = DensityMatrix<double>;

inline constexpr int kMaxSites = 11;  // N ≤ 11, so N+1 ≤ 12 qubits

enum class ModelKind { Star, NearestNeighbor };
enum class Basis { X0, Y0 };
enum class ObservableKind { Charge, Energy, EnergyComponentZ, EnergyComponentXX };

struct ModelSpec {
  ModelKind kind = ModelKind::Star;
  int n = 1;  // Bob's site; N+1 qubits in total
  double j = 1.0;
  double h = 1.0;

  [[nodiscard]] int n_qubits() const { return n + 1; }
  [[nodiscard]] Eigen::Index dim() const { return Eigen::Index{1} << (n + 1); }
  /// Site coupled to Bob by the XX term of H_B.
  [[nodiscard]] int partner() const { return kind == ModelKind::Star ? 0 : n - 1; }
};

void validate(const ModelSpec& spec);
void validate(const ModelSpec& spec, Basis basis);

/// J·Σ X₀X_k + h·Σ Z_k (Star) or J·Σ X_{k−1}X_k + h·Σ Z_k (NearestNeighbor).
Op build_hamiltonian(const ModelSpec& spec);

struct LocalHamiltonian {
  Op z_term;   // h·Z_N
  Op xx_term;  // J·X_partner X_N
  Op total;
};

LocalHamiltonian local_hamiltonian_bob(const ModelSpec& spec);

/// Q_B = ½(I + Z_N).
Op charge_observable(const ModelSpec& spec);

/// Z₀Z₁…Z_N.
Op parity_operator(const ModelSpec& spec);

struct ProtocolPair {
  Op sigma_a;
  Op sigma_b;
};

/// X0 → (X₀, Y_N); Y0 → (Y₀, X_N).
ProtocolPair protocol_pair(const ModelSpec& spec, Basis basis);

Op observable_operator(const ModelSpec& spec, ObservableKind kind);

/// Full spectrum of build_hamiltonian(spec).
Spectrum<double> model_spectrum(const ModelSpec& spec);

/// Non-degenerate ground state; throws NumericalError otherwise.
State model_ground_state(const ModelSpec& spec);

std::string to_string(ModelKind kind);
std::string to_string(Basis basis);
std::string to_string(ObservableKind kind);

ModelKind parse_model_kind(std::string_view text);
Basis parse_basis(std::string_view text);
ObservableKind parse_observable(std::string_view text);

}  // namespace qct
