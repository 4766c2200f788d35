#include "hdg/oracles.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace hdg {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEuler = std::numbers::egamma;

bool is_integer(double v) { return v == std::round(v); }

// Power series of J_nu for any real nu that is not a negative integer.
double j_series(double nu, double x) {
  const double h = 0.5 * x;
  const double h2 = h * h;
  double term = std::pow(h, nu) / std::tgamma(nu + 1.0);
  double sum = term;
  for (int k = 0; k < 500; ++k) {
    term *= -h2 / ((k + 1.0) * (k + 1.0 + nu));
    sum += term;
    if (k > h && std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double j_any(double nu, double x) {
  if (nu < 0.0 && is_integer(nu)) {
    const double n = -nu;
    return (static_cast<long>(n) % 2 == 0 ? 1.0 : -1.0) * j_series(n, x);
  }
  return j_series(nu, x);
}

// Y_n for integer n >= 0 from its ascending series.
double y_integer(int n, double x) {
  const double h = 0.5 * x;
  double finite = 0.0;
  for (int k = 0; k < n; ++k) {
    finite += std::tgamma(static_cast<double>(n - k)) / std::tgamma(k + 1.0) * std::pow(h, 2.0 * k - n);
  }
  // psi(k+1) + psi(n+k+1), with psi(j+1) = -gamma + H_j
  double hk = 0.0;
  double hnk = 0.0;
  for (int j = 1; j <= n; ++j) hnk += 1.0 / j;
  double term = std::pow(h, n) / std::tgamma(n + 1.0);
  double series = (-2.0 * kEuler + hk + hnk) * term;
  for (int k = 0; k < 500; ++k) {
    term *= -h * h / ((k + 1.0) * (n + k + 1.0));
    hk += 1.0 / (k + 1.0);
    hnk += 1.0 / (n + k + 1.0);
    const double add = (-2.0 * kEuler + hk + hnk) * term;
    series += add;
    if (k > h && std::abs(add) <= 1e-18 * std::abs(series)) break;
  }
  return -finite / kPi + 2.0 / kPi * std::log(h) * j_series(n, x) - series / kPi;
}

double y_any(double nu, double x) {
  if (is_integer(nu)) {
    const int n = static_cast<int>(std::abs(nu));
    const double y = y_integer(n, x);
    return nu < 0.0 && n % 2 == 1 ? -y : y;
  }
  return (j_series(nu, x) * std::cos(nu * kPi) - j_series(-nu, x)) / std::sin(nu * kPi);
}

double evaluate(BesselKind kind, double order, double x) {
  return kind == BesselKind::First ? j_any(order, x) : y_any(order, x);
}

void check_args(BesselKind kind, double order, double x) {
  if (!std::isfinite(order) || order < 0.0) throw OracleError("Bessel order must be a finite non-negative number");
  if (!std::isfinite(x)) throw OracleError("Bessel argument must be finite");
  if (kind == BesselKind::Second && !(x > 0.0)) throw OracleError("Bessel functions of the second kind need x > 0");
  if (kind == BesselKind::First && x < 0.0) throw OracleError("Bessel argument must be non-negative");
}

}  // namespace

double bessel(BesselKind kind, double order, double x) {
  check_args(kind, order, x);
  return evaluate(kind, order, x);
}

double bessel_derivative(BesselKind kind, double order, double x) {
  check_args(kind, order, x);
  if (order == 0.0) return -evaluate(kind, 1.0, x);
  if (x == 0.0) {
    // only the first kind reaches here; J_nu'(0) is 1/2 for nu = 1 and 0 for nu > 1
    if (order == 1.0) return 0.5;
    if (order > 1.0) return 0.0;
    throw OracleError("J_nu'(0) is unbounded for 0 < nu < 1");
  }
  return evaluate(kind, order - 1.0, x) - order / x * evaluate(kind, order, x);
}

// ---------------------------------------------------------------------------

void ChannelParams::validate() const {
  if (!(L1 > 0.0 && L > L1)) throw OracleError("channel needs L > L1 > 0");
  if (!(H_L > 0.0)) throw OracleError("channel depth H(L) must be positive");
  if (!(sigma > 0.0 && g > 0.0)) throw OracleError("channel sigma and g must be positive");
}

double ChannelParams::k() const { return sigma * std::sqrt(L) / std::sqrt(g * H_L); }

ChannelSolution::ChannelSolution(const ChannelParams& params) : p_(params) {
  p_.validate();
  k_ = p_.k();
  const double s1 = 2.0 * k_ * std::sqrt(p_.L1);
  const double sL = 2.0 * k_ * std::sqrt(p_.L);
  yp_ = bessel_derivative(BesselKind::Second, 0.0, s1);
  jp_ = bessel_derivative(BesselKind::First, 0.0, s1);
  denom_ = yp_ * bessel(BesselKind::First, 0.0, sL) - jp_ * bessel(BesselKind::Second, 0.0, sL);
  if (!(std::abs(denom_) >= 1e-14)) {
    std::ostringstream msg;
    msg << "channel forcing is resonant: denominator " << denom_;
    throw ResonanceError(msg.str(), denom_);
  }
}

double ChannelSolution::operator()(double x) const {
  const double s = 2.0 * k_ * std::sqrt(x);
  return p_.A * (yp_ * bessel(BesselKind::First, 0.0, s) - jp_ * bessel(BesselKind::Second, 0.0, s)) / denom_;
}

double ChannelSolution::derivative(double x) const {
  const double s = 2.0 * k_ * std::sqrt(x);
  const double ds = k_ / std::sqrt(x);
  return p_.A * ds *
         (yp_ * bessel_derivative(BesselKind::First, 0.0, s) - jp_ * bessel_derivative(BesselKind::Second, 0.0, s)) /
         denom_;
}

// ---------------------------------------------------------------------------

void SectorParams::validate() const {
  if (!(L1 > 0.0 && L > L1)) throw OracleError("sector needs L > L1 > 0");
  if (!(alpha > 0.0 && alpha < 2.0 * kPi)) throw OracleError("sector angle must lie in (0, 2 pi)");
  if (!(H0 > 0.0 && omega > 0.0 && g > 0.0 && m >= 0.0)) throw OracleError("sector parameters must be positive");
}

double SectorParams::kappa() const { return omega / std::sqrt(g * H0); }

SectorSolution::SectorSolution(const SectorParams& params) : p_(params) {
  p_.validate();
  nu_ = p_.nu();
  kappa_ = p_.kappa();
  yp_ = bessel_derivative(BesselKind::Second, nu_, p_.L1 * kappa_);
  jp_ = bessel_derivative(BesselKind::First, nu_, p_.L1 * kappa_);
  denom_ = yp_ * bessel(BesselKind::First, nu_, p_.L * kappa_) - jp_ * bessel(BesselKind::Second, nu_, p_.L * kappa_);
  if (!(std::abs(denom_) >= 1e-14)) {
    std::ostringstream msg;
    msg << "sector forcing is resonant: denominator " << denom_;
    throw ResonanceError(msg.str(), denom_);
  }
}

double SectorSolution::radial(double r) const {
  const double s = r * kappa_;
  return p_.A * (yp_ * bessel(BesselKind::First, nu_, s) - jp_ * bessel(BesselKind::Second, nu_, s)) / denom_;
}

double SectorSolution::radial_derivative(double r) const {
  const double s = r * kappa_;
  return p_.A * kappa_ *
         (yp_ * bessel_derivative(BesselKind::First, nu_, s) - jp_ * bessel_derivative(BesselKind::Second, nu_, s)) /
         denom_;
}

double SectorSolution::angular(double theta) const {
  return std::cos(p_.m * kPi * (theta + 0.5 * p_.alpha) / p_.alpha);
}

double SectorSolution::operator()(double r, double theta) const { return radial(r) * angular(theta); }

// ---------------------------------------------------------------------------

void StandingWaveParams::validate() const {
  if (!(L > 0.0 && H > 0.0 && kappa > 0.0 && rho0 > 0.0 && g > 0.0)) {
    throw OracleError("standing wave parameters must be positive");
  }
}

double StandingWaveParams::omega() const { return std::sqrt(g * kappa * std::tanh(kappa * H)); }

double StandingWaveFields::eta(double t, double x) const {
  const auto& p = params;
  return p.eta0 * std::cos(p.kappa * x) * std::cos(p.omega() * t);
}

double StandingWaveFields::q(double t, double x, double z) const {
  const auto& p = params;
  return p.rho0 * p.g * p.eta0 * std::cosh(p.kappa * (z + p.H)) / std::cosh(p.kappa * p.H) * std::cos(p.kappa * x) *
         std::cos(p.omega() * t);
}

double StandingWaveFields::dq_dx(double t, double x, double z) const {
  const auto& p = params;
  return -p.kappa * p.rho0 * p.g * p.eta0 * std::cosh(p.kappa * (z + p.H)) / std::cosh(p.kappa * p.H) *
         std::sin(p.kappa * x) * std::cos(p.omega() * t);
}

double StandingWaveFields::dq_dz(double t, double x, double z) const {
  const auto& p = params;
  return p.kappa * p.rho0 * p.g * p.eta0 * std::sinh(p.kappa * (z + p.H)) / std::cosh(p.kappa * p.H) *
         std::cos(p.kappa * x) * std::cos(p.omega() * t);
}

StandingWaveFields standing_wave_fields(const StandingWaveParams& params) {
  params.validate();
  return StandingWaveFields{params};
}

double e2_error(std::span<const double> numeric, std::span<const double> reference) {
  if (numeric.size() != reference.size() || numeric.empty()) {
    throw OracleError("e2_error needs two nonempty sample vectors of equal length");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    const double d = numeric[i] - reference[i];
    num += d * d;
    den += reference[i] * reference[i];
  }
  if (!(den > 0.0)) throw OracleError("reference samples have zero norm");
  return std::sqrt(num / den);
}

}  // namespace hdg
