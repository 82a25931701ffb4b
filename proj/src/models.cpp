#include "qct/models.hpp"

#include <cmath>

namespace qct {

void validate(const ModelSpec& spec) {
  if (spec.n < 1 || spec.n > kMaxSites)
    throw ValidationError("n must be in [1, " + std::to_string(kMaxSites) + "], got " +
                          std::to_string(spec.n));
  if (!std::isfinite(spec.j)) throw ValidationError("j must be finite");
  if (!std::isfinite(spec.h)) throw ValidationError("h must be finite");
}

void validate(const ModelSpec& spec, Basis basis) {
  validate(spec);
  if (basis == Basis::Y0 && spec.kind == ModelKind::Star)
    throw ValidationError(
        "basis y is illegal for the star model: Y0 does not commute with Bob's local Hamiltonian");
  if (basis == Basis::Y0 && spec.n < 2)
    throw ValidationError(
        "basis y needs n >= 2 for the nn model (at n = 1 it coincides with the star model)");
}

Op build_hamiltonian(const ModelSpec& spec) {
  validate(spec);
  const int q = spec.n_qubits();
  Op h = Op::Zero(spec.dim(), spec.dim());
  for (int k = 1; k <= spec.n; ++k) {
    const int left = spec.kind == ModelKind::Star ? 0 : k - 1;
    h += spec.j * (pauli_on_site(Pauli::X, left, q) * pauli_on_site(Pauli::X, k, q));
  }
  for (int k = 0; k <= spec.n; ++k) h += spec.h * pauli_on_site(Pauli::Z, k, q);
  return h;
}

LocalHamiltonian local_hamiltonian_bob(const ModelSpec& spec) {
  validate(spec);
  const int q = spec.n_qubits();
  LocalHamiltonian out;
  out.z_term = spec.h * pauli_on_site(Pauli::Z, spec.n, q);
  out.xx_term =
      spec.j * (pauli_on_site(Pauli::X, spec.partner(), q) * pauli_on_site(Pauli::X, spec.n, q));
  out.total = out.z_term + out.xx_term;
  return out;
}

Op charge_observable(const ModelSpec& spec) {
  validate(spec);
  return 0.5 * (identity(spec.dim()) + pauli_on_site(Pauli::Z, spec.n, spec.n_qubits()));
}

Op parity_operator(const ModelSpec& spec) {
  validate(spec);
  Op p = identity(spec.dim());
  for (int k = 0; k <= spec.n; ++k) p = p * pauli_on_site(Pauli::Z, k, spec.n_qubits());
  return p;
}

ProtocolPair protocol_pair(const ModelSpec& spec, Basis basis) {
  validate(spec, basis);
  const int q = spec.n_qubits();
  if (basis == Basis::X0)
    return {pauli_on_site(Pauli::X, 0, q), pauli_on_site(Pauli::Y, spec.n, q)};
  return {pauli_on_site(Pauli::Y, 0, q), pauli_on_site(Pauli::X, spec.n, q)};
}

Op observable_operator(const ModelSpec& spec, ObservableKind kind) {
  switch (kind) {
    case ObservableKind::Charge: return charge_observable(spec);
    case ObservableKind::Energy: return local_hamiltonian_bob(spec).total;
    case ObservableKind::EnergyComponentZ: return local_hamiltonian_bob(spec).z_term;
    case ObservableKind::EnergyComponentXX: return local_hamiltonian_bob(spec).xx_term;
  }
  throw ValidationError("unknown observable kind");
}

Spectrum<double> model_spectrum(const ModelSpec& spec) {
  return eigendecompose(build_hamiltonian(spec));
}

State model_ground_state(const ModelSpec& spec) { return ground_state(model_spectrum(spec)); }

std::string to_string(ModelKind kind) { return kind == ModelKind::Star ? "star" : "nn"; }

std::string to_string(Basis basis) { return basis == Basis::X0 ? "x" : "y"; }

std::string to_string(ObservableKind kind) {
  switch (kind) {
    case ObservableKind::Charge: return "charge";
    case ObservableKind::Energy: return "energy";
    case ObservableKind::EnergyComponentZ: return "energy-z";
    case ObservableKind::EnergyComponentXX: return "energy-xx";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "star") return ModelKind::Star;
  if (text == "nn") return ModelKind::NearestNeighbor;
  throw ValidationError("unknown model '" + std::string(text) + "' (expected star|nn)");
}

Basis parse_basis(std::string_view text) {
  if (text == "x") return Basis::X0;
  if (text == "y") return Basis::Y0;
  throw ValidationError("unknown basis '" + std::string(text) + "' (expected x|y)");
}

ObservableKind parse_observable(std::string_view text) {
  if (text == "charge") return ObservableKind::Charge;
  if (text == "energy") return ObservableKind::Energy;
  if (text == "energy-z") return ObservableKind::EnergyComponentZ;
  if (text == "energy-xx") return ObservableKind::EnergyComponentXX;
  throw ValidationError("unknown observable '" + std::string(text) +
                        "' (expected charge|energy|energy-z|energy-xx)");
}

}  // namespace qct
