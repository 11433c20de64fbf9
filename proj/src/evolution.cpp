#include "tpump/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace tpump {

std::string to_string(Integrator m) { return m == Integrator::Midpoint ? "midpoint" : "magnus4"; }

std::string to_string(ExpBackend b) { return b == ExpBackend::Chebyshev ? "chebyshev" : "eigen"; }

ExpBackend parse_backend(const std::string& s) {
  if (s == "chebyshev") return ExpBackend::Chebyshev;
  if (s == "eigen") return ExpBackend::Eigen;
  throw ConfigError("unknown exponential backend '" + s + "' (expected chebyshev or eigen)");
}

Integrator parse_integrator(const std::string& s) {
  if (s == "midpoint") return Integrator::Midpoint;
  if (s == "magnus4" || s == "reference") return Integrator::Magnus4;
  throw ConfigError("unknown integrator '" + s + "' (expected midpoint or magnus4)");
}

void IntegratorConfig::validate(const DriveParams& drive) const {
  if (!(dt > 0.0)) throw ConfigError("integrator dt must be > 0");
  if (dt > 0.1 / drive.frequency)
    throw ConfigError("integrator dt " + std::to_string(dt) + " exceeds 0.1 / Omega");
  if (stride < 1) throw ConfigError("recording stride must be >= 1");
}

void ExponentialStepper::apply(const Eigen::MatrixXd& h, double dt, StateVector& psi) {
  solver_.compute(h, Eigen::ComputeEigenvectors);
  if (solver_.info() != Eigen::Success) throw NumericalError("eigensolver failed");
  const auto& vecs = solver_.eigenvectors();
  const auto& vals = solver_.eigenvalues();
  work_.noalias() = vecs.transpose().cast<std::complex<double>>() * psi;
  for (Eigen::Index k = 0; k < work_.size(); ++k)
    work_(k) *= std::polar(1.0, -vals(k) * dt);
  psi.noalias() = vecs.cast<std::complex<double>>() * work_;
}

ChebyshevStepper::ChebyshevStepper(double radius, double dt) : radius_(radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("Chebyshev radius must be positive");
  // exp(-i x z) = J_0(z) + 2 sum_k (-i)^k J_k(z) T_k(x), z = radius * |dt|; dt < 0 conjugates (-i)^k.
  const double z = radius * std::abs(dt);
  const std::complex<double> unit = dt >= 0.0 ? std::complex<double>(0.0, -1.0) : std::complex<double>(0.0, 1.0);
  std::complex<double> phase = 1.0;
  for (int k = 0;; ++k) {
    const double jk = std::cyl_bessel_j(static_cast<double>(k), z);
    coeffs_.push_back((k == 0 ? 1.0 : 2.0) * phase * jk);
    phase *= unit;
    if (k > z && std::abs(jk) < 1e-18) break;
    if (k > 10000) throw NumericalError("Chebyshev series failed to converge");
  }
}

void ChebyshevStepper::apply(const Eigen::VectorXd& diagonal, const std::vector<Link>& bonds,
                             double bond_scale, StateVector& psi) {
  const double inv = 1.0 / radius_;
  const double hop = bond_scale * inv;
  auto scaled_h = [&](const StateVector& in, StateVector& out) {
    out = (diagonal * inv).array() * in.array();
    for (const auto& b : bonds) {
      const auto i = static_cast<Eigen::Index>(b.i);
      const auto j = static_cast<Eigen::Index>(b.j);
      out(i) += hop * b.strength * in(j);
      out(j) += hop * b.strength * in(i);
    }
  };
  t0_ = psi;
  scaled_h(t0_, t1_);
  psi = coeffs_[0] * t0_ + coeffs_[1] * t1_;
  for (std::size_t k = 2; k < coeffs_.size(); ++k) {
    scaled_h(t1_, t2_);
    t2_ = 2.0 * t2_ - t0_;
    psi += coeffs_[k] * t2_;
    std::swap(t0_, t1_);
    std::swap(t1_, t2_);
  }
}

double spectral_bound(const ArrayTopology& topology, const DriveParams& drive,
                      const DisorderRealization& disorder, double hopping) {
  // Gershgorin: |omega_i(t)| <= Delta + |delta_i| plus the absolute row sum of the bonds.
  std::vector<double> row(topology.num_sites(), 0.0);
  for (const auto& b : topology.intra_chain_bonds(hopping)) {
    row[b.i] += std::abs(b.strength);
    row[b.j] += std::abs(b.strength);
  }
  for (const auto& b : topology.coupling_links()) {
    row[b.i] += std::abs(b.strength);
    row[b.j] += std::abs(b.strength);
  }
  double bound = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i)
    bound = std::max(bound, std::abs(drive.amplitude) + std::abs(disorder.offsets.at(i)) + row[i]);
  // Keep the scaled spectrum strictly inside [-1, 1].
  return 1.01 * bound + 1e-12;
}

StateVector step(const HamiltonianSnapshot& h_mid, const StateVector& psi, double dt) {
  if (static_cast<std::size_t>(psi.size()) != h_mid.dimension)
    throw ConfigError("state dimension does not match Hamiltonian");
  ExponentialStepper stepper;
  StateVector out = psi;
  stepper.apply(h_mid.dense(), dt, out);
  if (!out.allFinite()) throw NumericalError("non-finite amplitudes after step");
  return out;
}

StateVector localized_state(const ArrayTopology& topology, SiteRef site) {
  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(topology.num_sites()));
  psi(static_cast<Eigen::Index>(topology.flatten(site))) = 1.0;
  return psi;
}

double region_population(const StateVector& psi, const RegionSpec& region) {
  double p = 0.0;
  for (auto s : region.sites) p += std::norm(psi(static_cast<Eigen::Index>(s)));
  return p;
}

CenterOfMass chain_center_of_mass(const StateVector& psi, const ArrayTopology& topology, int chain) {
  const auto offset = topology.chain_offset(chain);
  const int length = topology.chain(chain).length;
  CenterOfMass com;
  double moment = 0.0;
  for (int l = 1; l <= length; ++l) {
    const double p = std::norm(psi(static_cast<Eigen::Index>(offset + static_cast<std::size_t>(l - 1))));
    com.weight += p;
    moment += l * p;
  }
  if (com.weight >= 1e-12) com.position = moment / com.weight;
  return com;
}

long long step_count(double t0, double t1, double dt) {
  if (t1 <= t0) return 0;
  return std::max(1LL, static_cast<long long>(std::ceil((t1 - t0) / dt - 1e-9)));
}

namespace {

// Walks a fixed time grid with a fixed step h, rebuilding only the diagonal of H.
class Marcher {
 public:
  Marcher(const ArrayTopology& topology, const DriveParams& drive,
          const DisorderRealization& disorder, Integrator method, ExpBackend backend, double h,
          double hopping)
      : topology_(topology), drive_(drive), disorder_(disorder), method_(method), h_(h) {
    if (disorder.offsets.size() != topology.num_sites())
      throw ConfigError("dimension mismatch between disorder and topology");
    auto snapshot = assemble(topology, drive, disorder, 0.0, hopping);
    bonds_ = snapshot.bonds;
    snapshot.diagonal.assign(topology.num_sites(), 0.0);
    snapshot.fill_dense(hop_);
    diag_.resize(static_cast<Eigen::Index>(topology.num_sites()));
    if (backend == ExpBackend::Chebyshev)
      cheb_.emplace(spectral_bound(topology, drive, disorder, hopping), h_);
  }

  // Advances psi from t to t + h.
  void advance(StateVector& psi, double t) {
    if (method_ == Integrator::Midpoint) {
      const auto d = onsite_frequencies(drive_, topology_, t + 0.5 * h_, disorder_);
      for (std::size_t i = 0; i < d.size(); ++i) diag_(static_cast<Eigen::Index>(i)) = d[i];
      exponentiate(1.0, psi);
      return;
    }
    constexpr double r = std::numbers::sqrt3 / 6.0;
    constexpr double c1 = 0.5 - r, c2 = 0.5 + r;
    constexpr double a1 = 0.25 - r, a2 = 0.25 + r;
    const auto d1 = onsite_frequencies(drive_, topology_, t + c1 * h_, disorder_);
    const auto d2 = onsite_frequencies(drive_, topology_, t + c2 * h_, disorder_);
    for (std::size_t i = 0; i < d1.size(); ++i)
      diag_(static_cast<Eigen::Index>(i)) = a2 * d1[i] + a1 * d2[i];
    exponentiate(0.5, psi);
    for (std::size_t i = 0; i < d1.size(); ++i)
      diag_(static_cast<Eigen::Index>(i)) = a1 * d1[i] + a2 * d2[i];
    exponentiate(0.5, psi);
  }

 private:
  // psi <- exp(-i (diag_ + bond_scale * bonds) h) psi
  void exponentiate(double bond_scale, StateVector& psi) {
    if (cheb_) {
      cheb_->apply(diag_, bonds_, bond_scale, psi);
      return;
    }
    mat_ = bond_scale * hop_;
    mat_.diagonal() = diag_;
    dense_.apply(mat_, h_, psi);
  }

  const ArrayTopology& topology_;
  const DriveParams& drive_;
  const DisorderRealization& disorder_;
  Integrator method_;
  double h_;
  std::vector<Link> bonds_;
  Eigen::MatrixXd hop_;
  Eigen::MatrixXd mat_;
  Eigen::VectorXd diag_;
  ExponentialStepper dense_;
  std::optional<ChebyshevStepper> cheb_;
};

void record(Trajectory& tr, const StateVector& psi, double t, const ArrayTopology& topology,
            const std::vector<RegionSpec>& regions) {
  tr.times.push_back(t);
  std::vector<double> pops(static_cast<std::size_t>(psi.size()));
  for (Eigen::Index i = 0; i < psi.size(); ++i) pops[static_cast<std::size_t>(i)] = std::norm(psi(i));
  tr.site_populations.push_back(std::move(pops));
  std::vector<double> rp;
  rp.reserve(regions.size());
  for (const auto& r : regions) rp.push_back(region_population(psi, r));
  tr.region_populations.push_back(std::move(rp));
  std::vector<std::optional<double>> com;
  com.reserve(tr.chain_ids.size());
  for (int id : tr.chain_ids) com.push_back(chain_center_of_mass(psi, topology, id).position);
  tr.centers_of_mass.push_back(std::move(com));
}

}  // namespace

Trajectory propagate(const ArrayTopology& topology, const DriveParams& drive,
                     const DisorderRealization& disorder, const StateVector& psi0, double t0,
                     double t1, const IntegratorConfig& config,
                     const std::vector<RegionSpec>& regions, double hopping) {
  drive.validate();
  config.validate(drive);
  validate_regions(topology, regions);
  if (static_cast<std::size_t>(psi0.size()) != topology.num_sites())
    throw ConfigError("initial state dimension does not match topology");
  if (std::abs(psi0.squaredNorm() - 1.0) > 1e-8) throw ConfigError("initial state is not normalized");
  if (t1 < t0) throw ConfigError("propagation end time precedes start time");

  Trajectory tr;
  for (const auto& r : regions) tr.region_names.push_back(r.name);
  for (const auto& c : topology.chains()) tr.chain_ids.push_back(c.id);

  const long long n = step_count(t0, t1, config.dt);
  const double h = n > 0 ? (t1 - t0) / static_cast<double>(n) : 0.0;
  StateVector psi = psi0;
  record(tr, psi, t0, topology, regions);

  std::optional<Marcher> marcher;
  if (n > 0) marcher.emplace(topology, drive, disorder, config.method, config.backend, h, hopping);
  for (long long k = 0; k < n; ++k) {
    marcher->advance(psi, t0 + static_cast<double>(k) * h);
    const long long done = k + 1;
    const bool last = done == n;
    if (done % config.stride != 0 && !last) {
      if (!std::isfinite(psi.squaredNorm()))
        throw NumericalError("non-finite amplitudes at step " + std::to_string(done));
      continue;
    }
    const double norm2 = psi.squaredNorm();
    if (!std::isfinite(norm2))
      throw NumericalError("non-finite amplitudes at step " + std::to_string(done));
    if (std::abs(norm2 - 1.0) > 1e-6)
      throw NumericalError("integrator failure: norm drift " + std::to_string(norm2 - 1.0) +
                           " at step " + std::to_string(done));
    record(tr, psi, last ? t1 : t0 + static_cast<double>(done) * h, topology, regions);
  }
  tr.final_state = std::move(psi);
  tr.steps = n;
  return tr;
}

StateVector evolve(const ArrayTopology& topology, const DriveParams& drive,
                   const DisorderRealization& disorder, StateVector psi, double t_from, double t_to,
                   long long steps, Integrator method, ExpBackend backend, double hopping) {
  if (steps < 1) throw ConfigError("evolve needs at least one step");
  if (static_cast<std::size_t>(psi.size()) != topology.num_sites())
    throw ConfigError("state dimension does not match topology");
  const double h = (t_to - t_from) / static_cast<double>(steps);
  Marcher marcher(topology, drive, disorder, method, backend, h, hopping);
  if (h >= 0.0) {
    for (long long k = 0; k < steps; ++k) marcher.advance(psi, t_from + static_cast<double>(k) * h);
  } else {
    // Walk the forward grid of [t_to, t_from] in reverse so steps retrace it exactly.
    const double fwd = -h;
    for (long long k = steps - 1; k >= 0; --k) {
      const double start = t_to + static_cast<double>(k + 1) * fwd;
      marcher.advance(psi, start);
    }
  }
  if (!psi.allFinite()) throw NumericalError("non-finite amplitudes after evolve");
  return psi;
}

}  // namespace tpump
