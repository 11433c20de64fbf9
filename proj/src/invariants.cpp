#include "tpump/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "tpump/drive.hpp"

namespace tpump {

using cplx = std::complex<double>;

void BlochModel::validate() const {
  if (q < 2) throw ConfigError("Bloch model needs q >= 2");
  if (p < 0) throw ConfigError("Bloch model needs p >= 0");
  if (!std::isfinite(amplitude) || !std::isfinite(hopping))
    throw ConfigError("Bloch model parameters must be finite");
}

Eigen::MatrixXcd bloch_hamiltonian(const BlochModel& model, double k, double phi) {
  model.validate();
  const int q = model.q;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(q, q);
  for (int m = 0; m < q; ++m)
    h(m, m) = model.amplitude * std::cos(2.0 * std::numbers::pi * m * model.p / q + phi);
  for (int m = 0; m + 1 < q; ++m) {
    h(m, m + 1) += model.hopping;
    h(m + 1, m) += model.hopping;
  }
  // Sublattice q-1 of cell n hops to sublattice 0 of cell n+1.
  const cplx w = model.hopping * std::polar(1.0, k);
  h(0, q - 1) += std::conj(w);
  h(q - 1, 0) += w;
  return h;
}

Eigen::VectorXd bloch_bands(const BlochModel& model, double k, double phi) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(bloch_hamiltonian(model, k, phi),
                                                         Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

namespace {

double smallest_separation(const Eigen::VectorXd& e) {
  double g = std::numeric_limits<double>::infinity();
  for (Eigen::Index n = 0; n + 1 < e.size(); ++n) g = std::min(g, e(n + 1) - e(n));
  return g;
}

void check_grid(int n_k, int n_phi) {
  if (n_k < 6 || n_phi < 6)
    throw ConfigError("Chern grid " + std::to_string(n_k) + "x" + std::to_string(n_phi) +
                      " below the 6x6 minimum");
}

cplx unit_link(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, Eigen::Index band) {
  const cplx z = a.col(band).dot(b.col(band));  // <a|b>
  const double r = std::abs(z);
  if (r < 1e-14) throw NumericalError("vanishing link overlap; grid too coarse");
  return z / r;
}

}  // namespace

ChernResult fhs_chern(const BlochModel& model, int n_k, int n_phi) {
  model.validate();
  check_grid(n_k, n_phi);
  const double tol = 1e-9 * std::max(std::abs(model.amplitude), std::abs(model.hopping));
  const auto idx = [n_k](int i, int j) { return static_cast<std::size_t>(j) * n_k + i; };

  std::vector<Eigen::MatrixXcd> vecs(static_cast<std::size_t>(n_k) * n_phi);
  ChernResult res;
  res.n_k = n_k;
  res.n_phi = n_phi;
  res.min_gap = std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver;
  for (int j = 0; j < n_phi; ++j)
    for (int i = 0; i < n_k; ++i) {
      const double k = 2.0 * std::numbers::pi * i / n_k;
      const double phi = 2.0 * std::numbers::pi * j / n_phi;
      solver.compute(bloch_hamiltonian(model, k, phi));
      const double gap = smallest_separation(solver.eigenvalues());
      if (gap <= tol)
        throw NumericalError("band touching on grid at k=" + std::to_string(k) +
                             ", phi=" + std::to_string(phi));
      res.min_gap = std::min(res.min_gap, gap);
      vecs[idx(i, j)] = solver.eigenvectors();
    }

  const int q = model.q;
  std::vector<double> flux(static_cast<std::size_t>(q), 0.0);
  for (int j = 0; j < n_phi; ++j)
    for (int i = 0; i < n_k; ++i) {
      const auto& u00 = vecs[idx(i, j)];
      const auto& u10 = vecs[idx((i + 1) % n_k, j)];
      const auto& u11 = vecs[idx((i + 1) % n_k, (j + 1) % n_phi)];
      const auto& u01 = vecs[idx(i, (j + 1) % n_phi)];
      for (int n = 0; n < q; ++n) {
        // Counterclockwise plaquette in the (k, phi) plane.
        const cplx loop = unit_link(u00, u10, n) * unit_link(u10, u11, n) *
                          unit_link(u11, u01, n) * unit_link(u01, u00, n);
        flux[static_cast<std::size_t>(n)] += std::arg(loop);
      }
    }

  for (double f : flux) {
    const double turns = f / (2.0 * std::numbers::pi);
    const double c = std::round(turns);
    res.chern.push_back(static_cast<int>(c));
    res.residual = std::max(res.residual, std::abs(turns - c));
  }
  return res;
}

double min_gap(const BlochModel& model, int n_k, int n_phi) {
  model.validate();
  check_grid(n_k, n_phi);
  double g = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n_phi; ++j)
    for (int i = 0; i < n_k; ++i)
      g = std::min(g, smallest_separation(bloch_bands(model, 2.0 * std::numbers::pi * i / n_k,
                                                      2.0 * std::numbers::pi * j / n_phi)));
  return g;
}

}  // namespace tpump
