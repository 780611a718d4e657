#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "braggsim/species.hpp"

namespace braggsim {

struct CloudSpec {
    double initial_radius = 0.0;            // m, 1/e density radius
    double transverse_temperature = 0.0;    // K
    double longitudinal_temperature = 0.0;  // K
};

void validate(const CloudSpec& c);

// v_perp = sqrt(kB T_perp / M)
double transverse_velocity(const CloudSpec& c, const AtomSpecies& s);
// dp_par = sqrt(M kB T_par)
double longitudinal_momentum_width(const CloudSpec& c, const AtomSpecies& s);

struct ApparatusConfig {
    AtomSpecies species;
    CloudSpec cloud;
    int order = 1;
    double interrogation_time = 0.0;  // s
    double first_pulse_time = 0.0;    // s
    double detuning = 0.0;            // rad/s
    double beam_diameter = 0.0;       // m, 1/e^2 intensity diameter
    double curvature = 0.0;           // m
    double target_accuracy = 0.0;     // m/s^2
    double loss_budget = 0.0;         // spontaneous-loss probability budget
    double gravity = 9.8;             // m/s^2
};

void validate(const ApparatusConfig& c);

// Temperature at which the longitudinal momentum width reaches hbar k.
double longitudinal_temperature_limit(const AtomSpecies& s);

struct PulseWindow {
    double tau_min = 0.0;  // s, bandwidth side
    double tau_max = 0.0;  // s, Doppler side
    bool empty() const { return !(tau_min < tau_max); }
    // Design point used when a single duration is needed: the geometric
    // mean of the window edges (equal margin against both limits).
    double design_tau() const;
};

// Admissible pi-pulse durations: 1/delta_B < tau < M / (2 k dp_par).
PulseWindow pulse_duration_window(const CloudSpec& c, const AtomSpecies& s);

// sqrt(r0^2 + v_perp^2 t^2)
double cloud_radius(const CloudSpec& c, const AtomSpecies& s, double t);

// Twice the cloud radius at the last pulse, t0 + 2T.
double min_beam_diameter(const CloudSpec& c, const AtomSpecies& s, double t0, double T);

struct WavefrontError {
    double phase = 0.0;              // rad
    double acceleration_bias = 0.0;  // m/s^2
};

// Phase error (2nk/R) v_perp^2 T^2 from wavefront curvature and its
// acceleration equivalent v_perp^2 / R.
WavefrontError wavefront_phase_error(int n, const AtomSpecies& s, double R,
                                     const CloudSpec& c, double T);

// R_min = v_perp^2 / target_accuracy
double min_curvature(const CloudSpec& c, const AtomSpecies& s, double target_accuracy);

// Free-fall time after which the Doppler shift 2kgt exceeds the order-n
// resonance offset n delta_B, separating the two lattice directions.
double min_fall_time(int n, const AtomSpecies& s, double g);

// I = 2 I_sat omega0^2 / Gamma^2 with omega0^2 = 2 delta omega2.
double intensity_from_rabi(double omega2, double delta, const AtomSpecies& s);
double rabi_from_intensity(double intensity, double delta, const AtomSpecies& s);

// P = I pi (w/2)^2
double power_from_intensity(double intensity, double diameter);

struct TableRow {
    int order = 0;
    double tau = 0.0;        // s
    double omega2 = 0.0;     // rad/s
    double omega_eff = 0.0;  // rad/s
    double intensity = 0.0;  // W/m^2
    double power_bec = 0.0;  // W
    double power_vel = 0.0;  // W
    double loss = 0.0;       // probability
};

// One row per order: omega2 solving effective_rabi(n, omega2) tau = pi,
// then intensity, powers for the two beam diameters, and the
// spontaneous loss of the pi pulse. tau values are given in units of
// 1/omega_r.
std::vector<TableRow> optimal_parameter_table(const std::vector<int>& orders,
                                              const std::vector<double>& tau_recoil_units,
                                              double delta, double w_bec, double w_vel,
                                              const AtomSpecies& s);

// The published defaults: orders 1..25, optimized pi-pulse durations,
// 1 GHz detuning, 3.46 mm / 6 mm beams.
std::vector<TableRow> default_parameter_table(const AtomSpecies& s);

void write_table_csv(const std::vector<TableRow>& rows, const AtomSpecies& s,
                     std::ostream& out);

struct RequirementEntry {
    std::string name;
    double bound = 0.0;       // required bound
    double configured = 0.0;  // value from the config
    bool pass = false;
    std::string formula;      // formula tag, includes raw equality points
};

struct RequirementReport {
    std::vector<RequirementEntry> entries;
    bool all_pass() const;
    const RequirementEntry& entry(const std::string& name) const;
};

// Evaluates temperature limit (factor-10 margin), pulse-duration
// window, minimum beam diameter, minimum wavefront curvature, minimum
// detuning, and minimum fall time against the configured values.
RequirementReport evaluate_requirements(const ApparatusConfig& cfg);

std::string format_report(const RequirementReport& report);

}  // namespace braggsim
