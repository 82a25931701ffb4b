#include "qct/keyrate.hpp"

#include <algorithm>
#include <cmath>

namespace qct {

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw ValidationError("binary_entropy: x must be in [0, 1]");
  auto term = [](double v) { return v > 0.0 ? -v * std::log2(v) : 0.0; };
  return term(x) + term(1.0 - x);
}

double devetak_winter(double e_bit, double e_ph) {
  return std::clamp(1.0 - binary_entropy(e_bit) - binary_entropy(e_ph), 0.0, 1.0);
}

namespace {

// log C(m, k) p^k (1 − p)^(m − k), exact at the endpoints.
double binomial_pmf(int m, int k, double p) {
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == m ? 1.0 : 0.0;
  const double log_c = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
  return std::exp(log_c + k * std::log(p) + (m - k) * std::log1p(-p));
}

}  // namespace

RoundProbabilities trit_probabilities(double q_final, double q_reference, const TritOptions& options) {
  for (double q : {q_final, q_reference})
    if (!(q >= -1e-12 && q <= 1.0 + 1e-12)) throw NumericalError("trit probabilities: marginal outside [0, 1]");
  const double qf = std::clamp(q_final, 0.0, 1.0);
  const double qr = std::clamp(q_reference, 0.0, 1.0);
  RoundProbabilities out;
  if (options.model == TritModel::ReferenceDifferencing) {
    out.p_plus = qf * (1.0 - qr);
    out.p_minus = (1.0 - qf) * qr;
  } else {
    const int m = options.block_m;
    if (m < 1) throw ValidationError("block size m must be >= 1");
    for (int k = 0; k <= m; ++k) {
      const double w = binomial_pmf(m, k, qf);
      const double diff = static_cast<double>(k) / m - qr;
      if (diff > 1e-12)
        out.p_plus += w;
      else if (diff < -1e-12)
        out.p_minus += w;
    }
  }
  out.p_zero = std::max(0.0, 1.0 - out.p_plus - out.p_minus);
  return out;
}

double final_charge_probability(const ProtocolConfig& config, const NoiseSpec& noise) {
  const NoisyResult r = noisy_evaluate(config, noise);
  return r.baseline + r.delta;
}

RoundProbabilities round_probabilities(const ProtocolConfig& config, const NoiseSpec& noise,
                                       const TritOptions& options) {
  if (config.observable != ObservableKind::Charge)
    throw ValidationError("round_probabilities needs the charge observable");
  if (config.a != 0) throw ValidationError("round_probabilities conditions on a = 0");
  const NoisyResult r = noisy_evaluate(config, noise);
  return trit_probabilities(r.baseline + r.delta, r.baseline, options);
}

double sifted_error(const RoundProbabilities& probs) {
  const double sifted = probs.p_plus + probs.p_minus;
  return sifted > 0.0 ? probs.p_plus / sifted : 0.5;
}

std::vector<KeyRatePoint> key_rate_sweep(const ModelSpec& spec, const NoiseSpec& noise,
                                         const std::vector<double>& p_grid, const TritOptions& options) {
  if (spec.kind != ModelKind::NearestNeighbor || spec.n < 2)
    throw ValidationError("key rate needs the nn model with n >= 2 (both bases must be legal)");
  if (p_grid.empty()) throw ValidationError("key rate: empty p grid");
  ProtocolConfig key;
  key.spec = spec;
  key.basis = Basis::X0;
  key.observable = ObservableKind::Charge;
  key.a = 0;
  ProtocolConfig test = key;
  test.basis = Basis::Y0;

  std::vector<KeyRatePoint> out;
  out.reserve(p_grid.size());
  for (double p : p_grid) {
    NoiseSpec at = noise;
    at.p = p;
    const RoundProbabilities kb = round_probabilities(key, at, options);
    const RoundProbabilities tb = round_probabilities(test, at, options);
    KeyRatePoint pt;
    pt.p = p;
    pt.p_plus = kb.p_plus;
    pt.p_minus = kb.p_minus;
    pt.p_zero = kb.p_zero;
    pt.sift_fraction = kb.p_plus + kb.p_minus;
    pt.e_bit = sifted_error(kb);
    pt.e_ph = sifted_error(tb);
    pt.k_asym = devetak_winter(pt.e_bit, pt.e_ph);
    out.push_back(pt);
  }
  return out;
}

std::optional<double> key_rate_threshold(const std::vector<KeyRatePoint>& sweep) {
  if (sweep.empty() || sweep.front().k_asym <= 0.0) return std::nullopt;
  for (std::size_t i = 1; i < sweep.size(); ++i) {
    if (sweep[i].k_asym > 0.0) continue;
    const KeyRatePoint& a = sweep[i - 1];
    const KeyRatePoint& b = sweep[i];
    // K is clamped, so interpolate the unclamped rate instead.
    const double ka = 1.0 - binary_entropy(a.e_bit) - binary_entropy(a.e_ph);
    const double kb = 1.0 - binary_entropy(b.e_bit) - binary_entropy(b.e_ph);
    if (ka == kb) return b.p;
    return a.p + (b.p - a.p) * ka / (ka - kb);
  }
  return std::nullopt;
}

std::string to_string(TritModel model) {
  return model == TritModel::ReferenceDifferencing ? "reference" : "block";
}

}  // namespace qct
