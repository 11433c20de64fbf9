#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tpump/drive.hpp"
#include "tpump/hamiltonian.hpp"
#include "tpump/lattice.hpp"

namespace tpump {

/// Complex amplitudes over flat sites.
using StateVector = Eigen::VectorXcd;

enum class Integrator {
  Midpoint,  // exp(-i H(t + dt/2) dt), second order
  Magnus4,   // two-exponential commutator-free Magnus, fourth order; the reference scheme
};

std::string to_string(Integrator m);
Integrator parse_integrator(const std::string& s);

/// How each frozen-Hamiltonian exponential is evaluated.
enum class ExpBackend {
  Chebyshev,  // sparse series, converged to machine precision
  Eigen,      // dense eigendecomposition
};

std::string to_string(ExpBackend b);
ExpBackend parse_backend(const std::string& s);

struct IntegratorConfig {
  double dt = 0.01;
  int stride = 100;
  Integrator method = Integrator::Midpoint;
  ExpBackend backend = ExpBackend::Chebyshev;

  /// Requires dt > 0, dt <= 0.1 / Omega and stride >= 1.
  void validate(const DriveParams& drive) const;
};

/// Reusable workspace for exp(-i H dt) psi via a real symmetric eigendecomposition.
class ExponentialStepper {
 public:
  /// psi <- exp(-i H dt) psi, H real symmetric.
  void apply(const Eigen::MatrixXd& h, double dt, StateVector& psi);

 private:
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver_;
  Eigen::VectorXcd work_;
};

/// exp(-i H dt) psi by Chebyshev expansion for a sparse real symmetric H
/// (diagonal + bond list) whose spectrum lies inside [-radius, radius].
/// The series is cut once the Bessel coefficients fall below 1e-18.
class ChebyshevStepper {
 public:
  ChebyshevStepper(double radius, double dt);

  void apply(const Eigen::VectorXd& diagonal, const std::vector<Link>& bonds, double bond_scale,
             StateVector& psi);
  std::size_t terms() const { return coeffs_.size(); }

 private:
  double radius_;
  std::vector<std::complex<double>> coeffs_;
  StateVector t0_, t1_, t2_;
};

/// Upper bound on the spectral radius of H(t) for every t.
double spectral_bound(const ArrayTopology& topology, const DriveParams& drive,
                      const DisorderRealization& disorder, double hopping = 1.0);

/// One midpoint-exponential step: exp(-i H_mid dt) psi.
StateVector step(const HamiltonianSnapshot& h_mid, const StateVector& psi, double dt);

StateVector localized_state(const ArrayTopology& topology, SiteRef site);

double region_population(const StateVector& psi, const RegionSpec& region);

struct CenterOfMass {
  std::optional<double> position;  // 1-based site units; empty when weight < 1e-12
  double weight = 0.0;
};

CenterOfMass chain_center_of_mass(const StateVector& psi, const ArrayTopology& topology, int chain);

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> site_populations;
  std::vector<std::string> region_names;
  std::vector<std::vector<double>> region_populations;
  std::vector<int> chain_ids;
  std::vector<std::vector<std::optional<double>>> centers_of_mass;  // [sample][chain]
  StateVector final_state;
  long long steps = 0;
};

/// Fixed-step sweep from t0 to t1 (t1 >= t0). The step count is ceil((t1 - t0) / dt)
/// and the step is shrunk so the last one lands exactly on t1. Observables are
/// recorded at t0, every `stride` steps, and at t1.
/// Throws NumericalError("integrator failure ...") if the norm drifts by more than 1e-6.
Trajectory propagate(const ArrayTopology& topology, const DriveParams& drive,
                     const DisorderRealization& disorder, const StateVector& psi0, double t0,
                     double t1, const IntegratorConfig& config,
                     const std::vector<RegionSpec>& regions = {}, double hopping = 1.0);

/// Evolves psi from t_from to t_to in `steps` equal steps. t_to < t_from runs the
/// same grid backwards, which undoes a forward call with matching arguments.
StateVector evolve(const ArrayTopology& topology, const DriveParams& drive,
                   const DisorderRealization& disorder, StateVector psi, double t_from, double t_to,
                   long long steps, Integrator method = Integrator::Midpoint,
                   ExpBackend backend = ExpBackend::Chebyshev, double hopping = 1.0);

/// Number of steps propagate() uses for the interval.
long long step_count(double t0, double t1, double dt);

}  // namespace tpump
