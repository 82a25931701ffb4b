#pragma once

// Shot-level Monte Carlo of the protocol, SEM statistics and counts-file I/O.
//
// Bitstrings are n_sites = N+1 characters wide, site 0 leftmost. Character 0 carries
// Alice's outcome b; characters 1..N are Bob-side readouts in the batch's basis
// (computational basis for Z, X basis for XX). Bob's outcome bit is character N for Z
// and the parity of characters partner and N for XX. When partner is 0 the X₀ eigenbit
// is b⊕1, since P_A(b) projects onto σ_A = −(−1)^b.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qct/noise.hpp"

namespace qct {

enum class MeasuredBasis { Z, XX };

struct ShotBatch {
  MeasuredBasis basis = MeasuredBasis::Z;
  int n_sites = 2;
  int partner = 0;  // XX bond partner of site N
  std::optional<std::uint64_t> seed;
  long long n_shots = 0;
  /// Indexed by the bitstring read as a binary number, site 0 most significant.
  std::vector<long long> histogram;
  /// counts[b][o]: Alice outcome b, Bob outcome bit o (o = 0 is eigenvalue +1).
  std::array<std::array<long long, 2>, 2> counts{};
  /// A mixed resource had eigenvalues below −1e−9 that were clamped to zero.
  bool clamped = false;

  /// Empirical mean of Bob's ±1 observable.
  [[nodiscard]] double bob_mean() const;
};

struct ShotStats {
  double mean = 0.0;
  double variance_single = 0.0;
  double sem = 0.0;
  long long n_shots = 0;
};

/// Deterministic in (seed, shot index); θ is calibrated on the noiseless ground state.
/// `flip_probability` flips Alice's communicated bit per shot (classical channel noise).
ShotBatch sample_protocol(const ProtocolConfig& config, const Resource& resource, long long n_shots,
                          std::uint64_t seed, MeasuredBasis basis, double flip_probability = 0.0);

ShotBatch sample_protocol(const ProtocolConfig& config, long long n_shots, std::uint64_t seed,
                          MeasuredBasis basis);

/// mean = ½(1 + ⟨Z_N⟩), sem = ½√((1 − ⟨Z_N⟩²)/n).
ShotStats charge_stats(const ShotBatch& batch);

/// mean = h⟨Z⟩ + J⟨XX⟩, sem = √(h²(1 − ⟨Z⟩²)/n_Z + J²(1 − ⟨XX⟩²)/n_X).
/// n_shots = n_Z + n_X and variance_single = sem²·n_shots.
ShotStats energy_stats(const ShotBatch& batch_z, const ShotBatch& batch_xx, double h, double j);

/// Rebuilds counts[b][o] from the histogram; validates widths and totals.
ShotBatch batch_from_histogram(MeasuredBasis basis, int n_sites, int partner,
                               std::vector<long long> histogram, std::optional<std::uint64_t> seed);

ShotBatch parse_counts(const std::string& json_text);
ShotBatch ingest_counts(const std::string& path);
std::string write_counts(const ShotBatch& batch);

std::string to_string(MeasuredBasis basis);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Uniform in [0, 1) keyed by (seed, shot, draw).
double counter_uniform(std::uint64_t seed, std::uint64_t shot, std::uint64_t draw);

}  // namespace qct
