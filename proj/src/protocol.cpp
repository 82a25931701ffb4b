#include "qct/protocol.hpp"

#include <cmath>

namespace qct {

namespace {

void check_bit(int bit, const char* name) {
  if (bit != 0 && bit != 1)
    throw ValidationError(std::string(name) + " must be 0 or 1, got " + std::to_string(bit));
}

bool is_zero_pair(double xi, double eta, double scale) {
  return std::hypot(xi, eta) <= 1e-14 * std::max(1.0, scale);
}

}  // namespace

void validate(const ProtocolConfig& config) {
  validate(config.spec, config.basis);
  check_bit(config.a, "a");
  if (config.theta.kind == ThetaPolicy::Kind::Fixed && !std::isfinite(config.theta.value))
    throw ValidationError("fixed theta must be finite");
}

Op alice_projector(const Op& sigma_a, int b) {
  check_bit(b, "b");
  if (!is_involution(sigma_a)) throw ValidationError("alice_projector: sigma_a is not an involution");
  const double sign = b == 0 ? 1.0 : -1.0;
  return 0.5 * (identity(sigma_a.rows()) - sign * sigma_a);
}

Op bob_rotation(const Op& sigma_b, double theta, int c) {
  check_bit(c, "c");
  return pauli_rotation(sigma_b, c == 0 ? -theta : theta);
}

Density evolve(const Density& rho, const ProtocolPair& pair, double theta, int a,
               std::array<double, 2>* branch_probs) {
  check_bit(a, "a");
  if (rho.rows() != pair.sigma_a.rows() || rho.cols() != pair.sigma_a.cols())
    throw ValidationError("evolve: resource dimension does not match the model");
  Density out = Density::Zero(rho.rows(), rho.cols());
  for (int b = 0; b < 2; ++b) {
    const Op p = alice_projector(pair.sigma_a, b);
    const Op u = bob_rotation(pair.sigma_b, theta, b ^ a);
    const Density branch = p * rho * p;
    if (branch_probs) (*branch_probs)[static_cast<std::size_t>(b)] = branch.trace().real();
    out += u * branch * u.adjoint();
  }
  return out;
}

Correlators correlators(const Density& rho, const Op& o, const ProtocolPair& pair) {
  const Op& sa = pair.sigma_a;
  const Op& sb = pair.sigma_b;
  Correlators c;
  c.xi = expectation(rho, Op(sb * o * sb)) - expectation(rho, o);
  // i·σ_A[O,σ_B] is Hermitian whenever σ_A commutes with O and σ_B.
  const Op w = std::complex<double>(0, 1) * (sa * commutator(o, sb));
  c.eta = expectation(rho, Op((w + w.adjoint()) / 2.0));
  return c;
}

double optimal_theta(double xi, double eta) {
  if (!std::isfinite(xi) || !std::isfinite(eta)) throw ValidationError("optimal_theta: non-finite input");
  if (xi == 0.0 && eta == 0.0) throw ValidationError("optimal_theta: degenerate input xi = eta = 0");
  return 0.5 * std::atan2(eta, xi);
}

double delta_closed_form(double xi, double eta, double theta, int a) {
  check_bit(a, "a");
  const double sign = a == 0 ? 1.0 : -1.0;
  return 0.5 * xi * (1.0 - std::cos(2.0 * theta)) - 0.5 * sign * eta * std::sin(2.0 * theta);
}

double delta_optimal(double xi, double eta, int a) {
  check_bit(a, "a");
  const double r = std::hypot(xi, eta);
  if (r == 0.0) return 0.0;
  const double sign = a == 0 ? 1.0 : -1.0;
  return 0.5 * xi - 0.5 * (xi * xi + sign * eta * eta) / r;
}

double delta_component_optimal(double xi_i, double eta_i, double xi, double eta, int a) {
  check_bit(a, "a");
  const double r = std::hypot(xi, eta);
  if (r == 0.0) return 0.0;
  const double sign = a == 0 ? 1.0 : -1.0;
  return 0.5 * xi_i - 0.5 * (xi_i * xi + sign * eta_i * eta) / r;
}

namespace {

// Resource already known to be a valid state of matching dimension.
TeleportResult run_trusted(const ProtocolConfig& config, const Density& resource) {
  const ModelSpec& spec = config.spec;
  const ProtocolPair pair = protocol_pair(spec, config.basis);
  const Op o = observable_operator(spec, config.observable);

  TeleportResult out;
  const Correlators c = correlators(resource, o, pair);
  out.xi = c.xi;
  out.eta = c.eta;
  out.baseline = expectation(resource, o);

  if (config.theta.kind == ThetaPolicy::Kind::Fixed) {
    out.theta = config.theta.value;
  } else if (is_zero_pair(c.xi, c.eta, max_abs(o))) {
    out.degenerate = true;
    out.theta = 0.0;
  } else {
    out.theta = optimal_theta(c.xi, c.eta);
  }

  const Density rho_b = evolve(resource, pair, out.theta, config.a, &out.branch_b_probabilities);
  out.delta = out.degenerate ? 0.0 : expectation(rho_b, o) - out.baseline;

  if (config.observable == ObservableKind::Energy) {
    const LocalHamiltonian hb = local_hamiltonian_bob(spec);
    for (auto [kind, term] : {std::pair{ObservableKind::EnergyComponentZ, &hb.z_term},
                              std::pair{ObservableKind::EnergyComponentXX, &hb.xx_term}}) {
      const Correlators ci = correlators(resource, *term, pair);
      ComponentResult r;
      r.kind = kind;
      r.xi = ci.xi;
      r.eta = ci.eta;
      r.delta = out.degenerate ? 0.0 : expectation(rho_b, *term) - expectation(resource, *term);
      out.components.push_back(r);
    }
  }
  return out;
}

}  // namespace

TeleportResult run_exact(const ProtocolConfig& config, const Density& resource) {
  validate(config);
  if (resource.rows() != config.spec.dim() || resource.cols() != config.spec.dim())
    throw ValidationError("run_exact: resource dimension " + std::to_string(resource.rows()) +
                          " does not match model dimension " + std::to_string(config.spec.dim()));
  check_density_matrix(resource);
  return run_trusted(config, resource);
}

TeleportResult run_exact(const ProtocolConfig& config) {
  validate(config);
  return run_trusted(config, density_from_state(model_ground_state(config.spec)));
}

TeleportResult teleport_components(const ProtocolConfig& config) {
  if (config.observable != ObservableKind::Energy)
    throw ValidationError("teleport_components needs the energy observable");
  return run_exact(config);
}

}  // namespace qct
