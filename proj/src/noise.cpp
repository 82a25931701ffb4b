#include "qct/noise.hpp"

#include <cmath>

namespace qct {

namespace {

bool needs_site(NoiseKind kind) { return kind == NoiseKind::BitFlip || kind == NoiseKind::PhaseFlip; }

// First excited level must be unique, or ρ₁ / |ψ₁⟩ would depend on the solver's basis choice.
State first_excited(const Spectrum<double>& spectrum) {
  if (spectrum.size() < 3) throw ValidationError("noise: spectrum needs at least three levels");
  const double tol = 1e-9 * std::max(1.0, spectrum.norm);
  if (spectrum.eigenvalues(2) - spectrum.eigenvalues(1) < tol)
    throw NumericalError("noise: first excited level is degenerate (E1 = " +
                         std::to_string(spectrum.eigenvalues(1)) + ", E2 - E1 = " +
                         std::to_string(spectrum.eigenvalues(2) - spectrum.eigenvalues(1)) +
                         "); shift J or h");
  return spectrum.vector(1);
}

int n_qubits_of(const Spectrum<double>& spectrum) {
  int q = 0;
  while ((Eigen::Index{1} << q) < spectrum.size()) ++q;
  return q;
}

}  // namespace

void validate(const NoiseSpec& noise, int n_qubits) {
  if (!std::isfinite(noise.p) || noise.p < 0.0 || noise.p > 1.0)
    throw ValidationError("noise probability p must be in [0, 1]");
  if (!std::isfinite(noise.alpha)) throw ValidationError("noise phase alpha must be finite");
  if (needs_site(noise.kind)) {
    if (!noise.site) throw ValidationError("bit/phase-flip noise needs a site");
    if (*noise.site < 0 || *noise.site >= n_qubits)
      throw ValidationError("noise site " + std::to_string(*noise.site) + " out of range");
  } else if (noise.site) {
    throw ValidationError("noise site is only meaningful for bit/phase-flip noise");
  }
}

Density to_density(const Resource& resource) {
  if (const auto* psi = std::get_if<State>(&resource)) return density_from_state(*psi);
  return std::get<Density>(resource);
}

Resource apply_resource_noise(const NoiseSpec& noise, const Spectrum<double>& spectrum) {
  const int q = n_qubits_of(spectrum);
  validate(noise, q);
  const double p = noise.p;
  const State gs = ground_state(spectrum);
  switch (noise.kind) {
    case NoiseKind::ClassicalFlip:
      throw ValidationError("classical flip acts on Alice's bit, not on the resource state");
    case NoiseKind::ExcitedMixture: {
      if (p == 0.0) return gs;
      const State e1 = first_excited(spectrum);
      return Density((1.0 - p) * density_from_state(gs) + p * density_from_state(e1));
    }
    case NoiseKind::ExcitedSuperposition: {
      if (p == 0.0) return gs;
      const State e1 = first_excited(spectrum);
      State psi = std::sqrt(1.0 - p) * gs + std::polar(std::sqrt(p), noise.alpha) * e1;
      psi.normalize();
      return psi;
    }
    case NoiseKind::BitFlip:
    case NoiseKind::PhaseFlip: {
      const Pauli letter = noise.kind == NoiseKind::BitFlip ? Pauli::X : Pauli::Z;
      const Op k = pauli_on_site(letter, *noise.site, q);
      const Density rho = density_from_state(gs);
      return Density((1.0 - p) * rho + p * (k * rho * k));
    }
  }
  throw ValidationError("unknown noise kind");
}

NoisyResult noisy_evaluate(const ProtocolConfig& config, const NoiseSpec& noise) {
  validate(config);
  validate(noise, config.spec.n_qubits());
  const Spectrum<double> spectrum = model_spectrum(config.spec);
  const Density rho_gs = density_from_state(ground_state(spectrum));

  ProtocolConfig calibrated = config;
  calibrated.a = 0;
  const TeleportResult ideal = run_exact(calibrated, rho_gs);
  NoisyResult out;
  out.baseline = ideal.baseline;
  out.degenerate = ideal.degenerate && config.theta.kind == ThetaPolicy::Kind::OptimalA0;
  out.theta = ideal.theta;

  ProtocolConfig fixed = config;
  fixed.theta = ThetaPolicy::fixed(out.theta);

  if (noise.kind == NoiseKind::ClassicalFlip) {
    ProtocolConfig flipped = fixed;
    flipped.a = config.a ^ 1;
    const TeleportResult keep = run_exact(fixed, rho_gs);
    const TeleportResult flip = run_exact(flipped, rho_gs);
    out.xi = keep.xi;
    out.eta = keep.eta;
    out.delta = out.degenerate ? 0.0 : (1.0 - noise.p) * keep.delta + noise.p * flip.delta;
    return out;
  }

  const Density noisy = to_density(apply_resource_noise(noise, spectrum));
  const TeleportResult r = run_exact(fixed, noisy);
  out.xi = r.xi;
  out.eta = r.eta;
  // r.delta is relative to the noisy baseline; re-reference to the noiseless one.
  out.delta = out.degenerate ? 0.0 : r.delta + r.baseline - out.baseline;
  return out;
}

double noisy_delta(const ProtocolConfig& config, const NoiseSpec& noise) {
  return noisy_evaluate(config, noise).delta;
}

std::optional<double> find_sign_threshold(const ProtocolConfig& config, const NoiseSpec& noise,
                                          const std::vector<double>& p_grid) {
  if (p_grid.size() < 2) throw ValidationError("threshold search needs at least two grid points");
  for (std::size_t i = 1; i < p_grid.size(); ++i)
    if (!(p_grid[i] > p_grid[i - 1])) throw ValidationError("threshold grid must be increasing");

  auto delta_at = [&](double p) {
    NoiseSpec at = noise;
    at.p = p;
    return noisy_delta(config, at);
  };

  NoiseSpec zero = noise;
  zero.p = 0.0;
  const double d0 = noisy_delta(config, zero);
  if (std::abs(d0) < 1e-14) throw ValidationError("threshold search: delta(p = 0) is zero");
  const bool negative = d0 < 0.0;
  auto flipped = [&](double d) { return negative ? d >= 0.0 : d <= 0.0; };

  double lo = p_grid.front();
  if (flipped(delta_at(lo))) return lo;
  for (std::size_t i = 1; i < p_grid.size(); ++i) {
    const double hi = p_grid[i];
    if (!flipped(delta_at(hi))) {
      lo = hi;
      continue;
    }
    double a = lo;
    double b = hi;
    while (b - a > 1e-9) {
      const double mid = 0.5 * (a + b);
      if (flipped(delta_at(mid)))
        b = mid;
      else
        a = mid;
    }
    return 0.5 * (a + b);
  }
  return std::nullopt;
}

std::vector<double> linspace(double start, double stop, int steps) {
  if (steps < 2) throw ValidationError("grid needs steps >= 2");
  if (!std::isfinite(start) || !std::isfinite(stop) || !(start < stop))
    throw ValidationError("grid needs finite start < stop");
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i)
    out[static_cast<std::size_t>(i)] =
        i == steps - 1 ? stop : start + (stop - start) * static_cast<double>(i) / (steps - 1);
  return out;
}

std::string to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::ClassicalFlip: return "classical";
    case NoiseKind::ExcitedMixture: return "mixture";
    case NoiseKind::ExcitedSuperposition: return "superposition";
    case NoiseKind::BitFlip: return "bitflip";
    case NoiseKind::PhaseFlip: return "phaseflip";
  }
  return "?";
}

}  // namespace qct
