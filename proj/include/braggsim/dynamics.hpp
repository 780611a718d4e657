#pragma once

#include <utility>

#include "braggsim/species.hpp"

namespace braggsim {

enum class EnvelopeKind { square, gaussian };

struct Envelope {
    EnvelopeKind kind = EnvelopeKind::square;
    double sigma = 0.0;  // s, gaussian only
};

// One Bragg pulse of diffraction order n driven at two-photon Rabi
// frequency omega2 with single-photon detuning delta.
struct BraggPulse {
    int order = 1;
    double two_photon_rabi = 0.0;       // rad/s
    double single_photon_detuning = 0.0;  // rad/s
    double duration = 0.0;              // s
    Envelope envelope;
};

void validate(const BraggPulse& p);

enum class TwoPhotonMode { raman, bragg };

// Detuning of the two-photon resonance for a beam frequency difference
// omega_diff seen by an atom moving at velocity v along the beams.
double two_photon_detuning(TwoPhotonMode mode, double omega_diff,
                           const AtomSpecies& s, double v);

// Detuning of intermediate ladder state m (1..2n) during an order-n pulse.
double intermediate_detuning(int m, const BraggPulse& p, const AtomSpecies& s);

// 2n-photon effective Rabi frequency
//   omega_2n = omega2^n / [(8 omega_r)^(n-1) ((n-1)!)^2],
// evaluated in log space so large n does not overflow.
double effective_rabi(int n, double omega2, const AtomSpecies& s);

// Inverse of effective_rabi at fixed pulse area: the omega2 for which
// effective_rabi(n, omega2) * tau = pi.
double two_photon_rabi_for_pi_pulse(int n, double tau, const AtomSpecies& s);

// Population transferred to |p + 2n hbar k> after resonant drive time t.
double transfer_population(double omega_eff, double t);

struct PulseDurations {
    double pi;       // s
    double half_pi;  // s
};
PulseDurations pulse_durations(double omega_eff);

struct LossResult {
    double probability = 0.0;
    bool detuning_warning = false;  // delta below 100 omega_r
    bool clamped = false;           // raw value exceeded 1
};

// Spontaneous-emission loss N_s = (omega2 / 2 delta) Gamma tau.
LossResult spontaneous_loss(const BraggPulse& p, const AtomSpecies& s);

// Smallest single-photon detuning keeping spontaneous loss below
// ns_max for a pulse of area omega2*tau.
double min_detuning(double pulse_area, double ns_max, const AtomSpecies& s);

// Order-n Bragg resonance offset a time t after release in gravity g:
// delta_n(t) = n delta_B + 2 k g t.
double resonance_frequency(int n, double t, const AtomSpecies& s, double g);

// Off-resonant two-level transfer probability
//   [omega^2 / (omega^2 + delta^2)] sin^2(sqrt(omega^2 + delta^2) t / 2).
double off_resonant_transfer(double omega_eff, double delta, double t);

}  // namespace braggsim
