#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tpump/lattice.hpp"

namespace tpump {

/// Raised on numerical breakdown: gap closing, non-finite amplitudes, norm drift.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adiabatic onsite modulation Delta cos(2 pi (l-1) b + Omega t + theta_mu).
/// Energies in units of J, hbar = 1. The per-chain phase lives on ChainSpec.
struct DriveParams {
  double amplitude = 45.0;    // Delta
  double frequency = 0.015;   // Omega
  double b = 1.0 / 3.0;

  double period() const;
  void validate() const;
};

/// Static uniform onsite offsets, one per flat site.
///
/// Generator: std::mt19937_64 seeded with `seed`; site i (flat order) takes the
/// i-th 64-bit output x and maps it to W * (2 u - 1), u = (x >> 11) / (2^53 - 1),
/// so offsets cover the closed interval [-W, W].
struct DisorderRealization {
  double strength = 0.0;
  std::uint64_t seed = 0;
  std::vector<double> offsets;

  static DisorderRealization clean(std::size_t num_sites);
};

DisorderRealization sample_disorder(const ArrayTopology& topology, double strength, std::uint64_t seed);

double onsite_frequency(const DriveParams& drive, const ArrayTopology& topology, std::size_t site,
                        double t, const DisorderRealization& disorder);

/// All onsite frequencies at time t, in flat order.
std::vector<double> onsite_frequencies(const DriveParams& drive, const ArrayTopology& topology,
                                       double t, const DisorderRealization& disorder);

struct CurvePoint {
  double ab = 0.0;  // omega_A - omega_B
  double ac = 0.0;  // omega_A - omega_C
};

struct TrimerCurve {
  int chain = 1;
  int trimer = 1;  // 1-based
  std::vector<CurvePoint> samples;
};

/// Samples (omega_A - omega_B, omega_A - omega_C) of one trimer at n_samples
/// evenly spaced times over [0, T); the polyline closes back to the first sample.
TrimerCurve trimer_curve(const DriveParams& drive, const ArrayTopology& topology,
                         const DisorderRealization& disorder, int chain, int trimer,
                         int n_samples = 256);

/// Signed winding of the closed polyline around the origin (counterclockwise
/// positive). Throws NumericalError("gap closing ...") if the polyline passes
/// within `tolerance` of the origin.
int winding_number(const TrimerCurve& curve, double tolerance);

/// Same, with tolerance 1e-9 * amplitude.
int winding_number(const TrimerCurve& curve, const DriveParams& drive);

/// True iff the clean ellipse translated by (dAB, dAC) strictly encloses the origin.
bool protection_certificate(double amplitude, CurvePoint offset);

/// Offset (dA - dB, dA - dC) of one trimer under a disorder realization.
CurvePoint trimer_offset(const ArrayTopology& topology, const DisorderRealization& disorder,
                         int chain, int trimer);

/// Largest W / Delta for which every offset draw in [-W, W]^3 is certified.
/// The certificate's quadratic form peaks at 16/9 (W/Delta)^2 on the corners of the box.
constexpr double max_certified_disorder_ratio() { return 0.75; }

}  // namespace tpump
