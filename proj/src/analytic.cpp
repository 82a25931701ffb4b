#include "qct/analytic.hpp"

#include <cmath>

#include "qct/protocol.hpp"

namespace qct {

TwoQubitClosedForm TwoQubitClosedForm::make(double h, double j) {
  if (!std::isfinite(h) || !std::isfinite(j)) throw ValidationError("closed form: h and j must be finite");
  TwoQubitClosedForm f;
  f.h = h;
  f.j = j;
  f.k = j / 2.0;
  f.e0 = std::hypot(h, f.k);
  if (!(f.e0 > 0.0)) throw ValidationError("closed form: h = j = 0 has no unique ground state");
  f.r = f.k / f.e0;
  return f;
}

State ground_state_2q(const TwoQubitClosedForm& f) {
  if (f.h < 0.0) throw ValidationError("ground_state_2q: needs h >= 0; use the numeric path");
  if (!(f.e0 > 0.0)) throw ValidationError("ground_state_2q: needs e0 > 0");
  const double sgn = f.k < 0.0 ? -1.0 : 1.0;
  const double norm = std::sqrt(2.0 * f.e0);
  State psi = State::Zero(4);
  psi(0) = -sgn * std::sqrt(std::max(0.0, f.e0 - f.h)) / norm;
  psi(3) = std::sqrt(f.e0 + f.h) / norm;
  return psi;
}

double ground_energy_2q(const TwoQubitClosedForm& f) { return -2.0 * f.e0; }

double z1_2q(const TwoQubitClosedForm& f) { return -f.h / f.e0; }

double xx_2q(const TwoQubitClosedForm& f) { return -f.k / f.e0; }

double delta_charge_2q_reference(const TwoQubitClosedForm& f, int a) {
  const double s = a == 0 ? 1.0 : -1.0;
  const double r2 = f.r * f.r;
  return 0.5 * (1.0 - (1.0 + s * r2) / std::sqrt(1.0 + r2));
}

double delta_charge_2q_framework(const TwoQubitClosedForm& f, int a) {
  return delta_optimal(-z1_2q(f), xx_2q(f), a);
}

ChargeComparison delta_charge_2q(const TwoQubitClosedForm& f, int a) {
  ChargeComparison c;
  c.reference = delta_charge_2q_reference(f, a);
  c.framework = delta_charge_2q_framework(f, a);
  ProtocolConfig config;
  config.spec = {ModelKind::Star, 1, f.j, f.h};
  config.observable = ObservableKind::Charge;
  config.a = a;
  c.pipeline = run_exact(config).delta;
  return c;
}

double delta_energy_2q_reference(const TwoQubitClosedForm& f, int a) {
  const double s = a == 0 ? 1.0 : -1.0;
  const double h = f.h;
  const double j = f.j;
  const double r2 = f.r * f.r;
  return h + j * f.r - (h * h + s * j * j) * (1.0 + s * r2) / std::sqrt((h * h + j * j) * (1.0 + r2));
}

double delta_energy_2q_framework(const TwoQubitClosedForm& f, int a) {
  const double z = z1_2q(f);
  const double xx = xx_2q(f);
  const double xi = -2.0 * (f.h * z + f.j * xx);
  const double eta = 2.0 * f.h * xx - 2.0 * f.j * z;
  return delta_optimal(xi, eta, a);
}

}  // namespace qct
