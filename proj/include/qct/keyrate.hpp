#pragma once

// Per-round key trits, error rates and the asymptotic Devetak-Winter rate.
//
// A round yields a trit ΔQ ∈ {−1, 0, +1}; zeros are sifted out. With a = 0 the correct
// sign is −1, so e = P₊/(P₊ + P₋). Key basis is X0, test basis Y0, e_ph = e_test.
//
// Trit models:
//   ReferenceDifferencing  one ground-state reference shot q_r and one protocol shot q_f
//                          per round, ΔQ = q_f − q_r.
//   BlockAverage(m)        mean of m protocol shots compared with the calibrated ⟨Q⟩_gs;
//                          ties give 0.

#include <vector>

#include "qct/noise.hpp"

namespace qct {

enum class TritModel { ReferenceDifferencing, BlockAverage };

struct TritOptions {
  TritModel model = TritModel::ReferenceDifferencing;
  int block_m = 1;
};

struct RoundProbabilities {
  double p_plus = 0.0;
  double p_minus = 0.0;
  double p_zero = 0.0;
};

struct KeyRatePoint {
  double p = 0.0;
  double p_plus = 0.0;  // key basis
  double p_minus = 0.0;
  double p_zero = 0.0;
  double e_bit = 0.0;
  double e_ph = 0.0;
  double k_asym = 0.0;
  double sift_fraction = 0.0;
};

/// −x log₂ x − (1 − x) log₂(1 − x), with 0·log 0 = 0.
double binary_entropy(double x);

/// max(0, 1 − h(e_bit) − h(e_ph)).
double devetak_winter(double e_bit, double e_ph);

/// Trit probabilities from the final and reference single-shot marginals P(Q = 1).
RoundProbabilities trit_probabilities(double q_final, double q_reference, const TritOptions& options);

/// Exact P(Q = 1) after the protocol on the noisy resource.
double final_charge_probability(const ProtocolConfig& config, const NoiseSpec& noise);

/// Charge observable, a = 0.
RoundProbabilities round_probabilities(const ProtocolConfig& config, const NoiseSpec& noise,
                                       const TritOptions& options = {});

/// Error rate P₊/(P₊ + P₋); ½ when nothing survives sifting.
double sifted_error(const RoundProbabilities& probs);

/// NearestNeighbor, N ≥ 2. `noise.p` is replaced by each grid value.
std::vector<KeyRatePoint> key_rate_sweep(const ModelSpec& spec, const NoiseSpec& noise,
                                         const std::vector<double>& p_grid,
                                         const TritOptions& options = {});

/// First p where K reaches 0 along a sweep (linear interpolation); empty if K > 0 throughout
/// or K(0) = 0.
std::optional<double> key_rate_threshold(const std::vector<KeyRatePoint>& sweep);

std::string to_string(TritModel model);

}  // namespace qct
