#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "braggsim/requirements.hpp"
#include "braggsim/species.hpp"

namespace braggsim {

enum class ScanKind { chirp_rate, laser_phase };

struct FringePoint {
    double x = 0.0;   // chirp rate [Hz/s] or laser phase [rad]
    double p1 = 0.0;
    double p2 = 0.0;
};

struct FringeScan {
    ScanKind kind = ScanKind::chirp_rate;
    std::vector<FringePoint> points;
    int order = 1;
    double interrogation_time = 0.0;  // s
    double first_pulse_time = 0.0;    // s
    double contrast = 1.0;
    std::string species_name;
    double g_true = 0.0;  // m/s^2, meaningful when has_g_true
    bool has_g_true = false;
};

// Three-pulse Mach-Zehnder phase for chirp rate alpha [Hz/s]:
// dphi = n (2 k g T^2 - 2 pi alpha T^2) + phi_L.
double interferometer_phase(int n, const AtomSpecies& s, double g, double alpha,
                            double T, double phi_laser);

// P1 = (1 + V cos dphi)/2, P2 = 1 - P1.
std::pair<double, double> output_populations(double phase, double contrast);

// g = pi alpha0 / k for the resonant chirp rate alpha0 [Hz/s].
double gravity_from_chirp(double alpha0, const AtomSpecies& s);

// One fringe per interrogation time, sampled on a uniform chirp grid.
std::vector<FringeScan> chirp_scan(const ApparatusConfig& cfg,
                                   const std::vector<double>& interrogation_times,
                                   double alpha_lo, double alpha_hi, int samples,
                                   double contrast = 1.0);

// Laser-phase fringe at fixed chirp rate (resonant when alpha < 0).
FringeScan phase_scan(const ApparatusConfig& cfg, double phase_lo, double phase_hi,
                      int samples, double contrast = 1.0, double alpha = -1.0);

struct ChirpResult {
    double alpha0 = 0.0;             // Hz/s
    double residual_variance = 0.0;  // across-scan variance of P1 at alpha0
    bool ambiguous = false;          // another candidate was equally good
    std::vector<double> candidates;  // candidate chirp rates, best first
};

// Chirp rate where all fringes share a common extremum, refined between
// grid points by golden-section search on the interpolated across-scan
// variance. Needs >= 2 scans with distinct interrogation times on a
// common grid; throws std::runtime_error when no common extremum lies
// in the scanned range.
ChirpResult find_resonant_chirp(const std::vector<FringeScan>& scans);

struct SinusoidFit {
    double offset = 0.0;     // A
    double amplitude = 0.0;  // B
    double phase = 0.0;      // rad
    double offset_err = 0.0;
    double amplitude_err = 0.0;
    double phase_err = 0.0;
    double rms_residual = 0.0;
};

// Least-squares fit of P1(x) = A + B cos(x + phase) with standard
// errors from the residual covariance. Needs >= 5 points spanning at
// least one period.
SinusoidFit phase_scan_fit(const FringeScan& scan);

struct ContrastEstimate {
    double contrast = 0.0;
    // Ensemble-mean transfer efficiency of each pulse relative to an
    // ideal pulse (1/2 for the splitters, 1 for the mirror).
    std::array<double, 3> pulse_efficiencies{};
    double design_tau = 0.0;  // s, pi-pulse duration used
    std::uint64_t seed = 0;
    int samples = 0;
};

// Monte-Carlo fringe-contrast estimate over the longitudinal velocity
// distribution: per atom the three-pulse efficiency product with
// detuning 2 k v, averaged over the ensemble. Deterministic per seed.
ContrastEstimate thermal_contrast(const ApparatusConfig& cfg, int n_atoms,
                                  std::uint64_t seed);

void write_scan_csv(const FringeScan& scan, std::ostream& out);
FringeScan read_scan_csv(std::istream& in);

}  // namespace braggsim
