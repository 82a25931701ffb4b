#pragma once

// Error models acting on the resource state or on Alice's classical bit.
//
// θ is always calibrated on the noiseless ground state, and shifts are reported
// against the noiseless baseline Tr[ρ_gs O].

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qct/protocol.hpp"

namespace qct {

enum class NoiseKind { ClassicalFlip, ExcitedMixture, ExcitedSuperposition, BitFlip, PhaseFlip };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::ClassicalFlip;
  double p = 0.0;
  std::optional<int> site;  // BitFlip / PhaseFlip only
  double alpha = 0.0;       // ExcitedSuperposition phase, radians
};

void validate(const NoiseSpec& noise, int n_qubits);

using Resource = std::variant<State, Density>;

Density to_density(const Resource& resource);

/// Noisy resource built from the model spectrum. Pure kinds return a State.
Resource apply_resource_noise(const NoiseSpec& noise, const Spectrum<double>& spectrum);

struct NoisyResult {
  double delta = 0.0;     // relative to the noiseless baseline
  double theta = 0.0;     // noiseless calibration
  double xi = 0.0;        // on the noisy resource (noiseless for ClassicalFlip)
  double eta = 0.0;
  double baseline = 0.0;  // noiseless Tr[ρ_gs O]
  bool degenerate = false;
};

NoisyResult noisy_evaluate(const ProtocolConfig& config, const NoiseSpec& noise);

double noisy_delta(const ProtocolConfig& config, const NoiseSpec& noise);

/// Smallest p in [grid.front(), grid.back()] where δ changes sign, bisected to 1e−9.
/// `noise.p` is ignored. Empty when there is no crossing on the grid.
std::optional<double> find_sign_threshold(const ProtocolConfig& config, const NoiseSpec& noise,
                                          const std::vector<double>& p_grid);

std::vector<double> linspace(double start, double stop, int steps);

std::string to_string(NoiseKind kind);

}  // namespace qct
