#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>

#include "tpump/drive.hpp"
#include "tpump/hamiltonian.hpp"
#include "tpump/invariants.hpp"

using namespace tpump;

TEST_CASE("Bloch Hamiltonian is Hermitian with the expected diagonal") {
  const BlochModel m;
  for (double k : {0.0, 1.1, 3.0})
    for (double phi : {0.0, 0.7, 5.0}) {
      const auto h = bloch_hamiltonian(m, k, phi);
      CHECK((h - h.adjoint()).norm() < 1e-15);
      for (int s = 0; s < 3; ++s)
        CHECK(h(s, s).real() == doctest::Approx(45.0 * std::cos(2.0 * std::numbers::pi * s / 3.0 + phi)));
    }
  CHECK_THROWS_AS(bloch_hamiltonian(BlochModel{1, 1, 1.0, 1.0}, 0, 0), std::exception);
}

TEST_CASE("Bloch bands reproduce the spectrum of a finite ring") {
  for (double amplitude : {45.0, 2.0})
    for (double phi : {0.0, 0.4, 2.2}) {
      const int cells = 8;
      const auto ring = ring_topology(3 * cells / 2, phi, 1.0);
      const DriveParams drive{amplitude, 0.015, 1.0 / 3.0};
      const auto h = assemble(ring, drive, DisorderRealization::clean(ring.num_sites()), 0.0);
      const auto ring_spec = instantaneous_spectrum(h);

      std::vector<double> bloch;
      const BlochModel m{1, 3, amplitude, 1.0};
      for (int j = 0; j < cells; ++j) {
        const auto bands = bloch_bands(m, 2.0 * std::numbers::pi * j / cells, phi);
        bloch.insert(bloch.end(), bands.data(), bands.data() + bands.size());
      }
      std::sort(bloch.begin(), bloch.end());
      REQUIRE(bloch.size() == ring_spec.size());
      for (std::size_t i = 0; i < bloch.size(); ++i) CHECK(std::abs(bloch[i] - ring_spec[i]) < 1e-8);
    }
}

TEST_CASE("Chern numbers of the b = 1/3 model are (-1, 2, -1) on every grid") {
  const BlochModel m;
  const auto start = std::chrono::steady_clock::now();
  const auto r60 = fhs_chern(m, 60, 60);
  CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() < 5.0);
  CHECK(r60.chern == std::vector<int>{-1, 2, -1});
  CHECK(r60.residual < 1e-9);
  CHECK(r60.n_k == 60);
  for (int g : {6, 13, 120}) CHECK(fhs_chern(m, g, g).chern == r60.chern);
  CHECK(fhs_chern(m, 20, 40).chern == r60.chern);
}

TEST_CASE("Chern numbers always sum to zero") {
  for (int q : {3, 5, 7})
    for (double amplitude : {0.5, 3.0, 45.0}) {
      const BlochModel m{1, q, amplitude, 1.0};
      const auto r = fhs_chern(m, 48, 48);
      CHECK(r.chern.size() == static_cast<std::size_t>(q));
      CHECK(std::accumulate(r.chern.begin(), r.chern.end(), 0) == 0);
      CHECK(r.residual < 1e-6);
    }
}

TEST_CASE("band touching and bad grids are reported") {
  BlochModel flat{1, 3, 0.0, 1.0};
  // Dense scan: at Delta = 0 the bands cos(k/3 + 2 pi n/3) cross on the grid.
  CHECK(min_gap(flat, 60, 60) < 1e-9);
  try {
    fhs_chern(flat, 60, 60);
    FAIL("no band touching reported");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("band touching") != std::string::npos);
  }
  CHECK_THROWS_AS(fhs_chern(BlochModel{}, 5, 60), ConfigError);
  CHECK_THROWS_AS(fhs_chern(BlochModel{}, 60, 3), ConfigError);
}

TEST_CASE("reported minimum gap agrees with an independent dense scan") {
  const BlochModel m;
  const auto r = fhs_chern(m, 60, 60);
  CHECK(r.min_gap == doctest::Approx(min_gap(m, 60, 60)).epsilon(1e-12));
  CHECK(min_gap(m, 240, 240) <= r.min_gap + 1e-12);
  CHECK(r.min_gap > 1.0);
}
