#pragma once

#include <functional>
#include <span>
#include <stdexcept>

namespace hdg {

class OracleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The forcing frequency sits on a basin eigenfrequency: the analytic
// denominator vanishes.
class ResonanceError : public OracleError {
 public:
  ResonanceError(const std::string& what, double denominator) : OracleError(what), denominator_(denominator) {}
  [[nodiscard]] double denominator() const { return denominator_; }

 private:
  double denominator_;
};

enum class BesselKind { First, Second };

// J_nu (first kind) or Y_nu (second kind) for real order nu >= 0.
// Accurate to about 1e-13 of the function envelope for x up to about 12.
double bessel(BesselKind kind, double order, double x);
// Derivative with respect to x.
double bessel_derivative(BesselKind kind, double order, double x);

inline constexpr double kTidalPeriod = 12.42 * 3600.0;

struct ChannelParams {
  double L = 300e3;
  double L1 = 10e3;
  double H_L = 20.1;
  double sigma = 2.0 * 3.14159265358979323846 / kTidalPeriod;
  double A = 0.01;
  double g = 9.81;

  void validate() const;
  [[nodiscard]] double depth(double x) const { return x * H_L / L; }
  // k = sigma sqrt(L) / sqrt(g H(L))
  [[nodiscard]] double k() const;
};

// Analytic surface amplitude zeta_0(x) of the linear tidal channel with depth
// H(x) = x H(L) / L, a wall at L1 and forcing A at L.
class ChannelSolution {
 public:
  explicit ChannelSolution(const ChannelParams& params);
  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] double derivative(double x) const;
  [[nodiscard]] double denominator() const { return denom_; }
  [[nodiscard]] const ChannelParams& params() const { return p_; }

 private:
  ChannelParams p_;
  double k_;
  double yp_;
  double jp_;
  double denom_;
};

struct SectorParams {
  double H0 = 1.0;
  double alpha = 3.14159265358979323846 / 4.0;
  double L1 = 90e3;
  double L = 158e3;
  double m = 1.0;
  double omega = 2.0 * 3.14159265358979323846 / kTidalPeriod;
  double A = 0.01;
  double g = 9.81;

  void validate() const;
  [[nodiscard]] double nu() const { return m * 3.14159265358979323846 / alpha; }
  [[nodiscard]] double kappa() const;
};

// Analytic amplitude eta_0(r, theta) in the annular sector (L1, L) x (-alpha/2, alpha/2).
class SectorSolution {
 public:
  explicit SectorSolution(const SectorParams& params);
  [[nodiscard]] double operator()(double r, double theta) const;
  [[nodiscard]] double radial(double r) const;  // amplitude without the angular factor
  [[nodiscard]] double radial_derivative(double r) const;
  [[nodiscard]] double angular(double theta) const;
  [[nodiscard]] double denominator() const { return denom_; }
  [[nodiscard]] const SectorParams& params() const { return p_; }

 private:
  SectorParams p_;
  double nu_;
  double kappa_;
  double yp_;
  double jp_;
  double denom_;
};

struct StandingWaveParams {
  double L = 10.0;
  double H = 10.0;
  double kappa = 3.14159265358979323846 / 10.0;
  double eta0 = 0.1;
  double rho0 = 1000.0;
  double g = 9.81;

  void validate() const;
  // omega = sqrt(g kappa tanh(kappa H))
  [[nodiscard]] double omega() const;
};

// Linear deep-water standing wave: eta = eta0 cos(kappa x) cos(omega t) and
// q = rho0 g eta0 cosh(kappa (z + H)) / cosh(kappa H) cos(kappa x) cos(omega t).
struct StandingWaveFields {
  StandingWaveParams params;

  [[nodiscard]] double eta(double t, double x) const;
  [[nodiscard]] double q(double t, double x, double z) const;
  [[nodiscard]] double dq_dx(double t, double x, double z) const;
  [[nodiscard]] double dq_dz(double t, double x, double z) const;
};

StandingWaveFields standing_wave_fields(const StandingWaveParams& params);

// ||numeric - reference||_2 / ||reference||_2
double e2_error(std::span<const double> numeric, std::span<const double> reference);

}  // namespace hdg
