#include "braggsim/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "braggsim/constants.hpp"

namespace braggsim {

void validate(const BraggPulse& p) {
    if (p.order < 1) throw std::invalid_argument("pulse field 'order' must be >= 1");
    if (!(p.two_photon_rabi > 0.0))
        throw std::invalid_argument("pulse field 'two_photon_rabi' must be positive");
    if (!(p.single_photon_detuning > 0.0))
        throw std::invalid_argument("pulse field 'single_photon_detuning' must be positive");
    if (!(p.duration > 0.0))
        throw std::invalid_argument("pulse field 'duration' must be positive");
    if (p.envelope.kind == EnvelopeKind::gaussian && !(p.envelope.sigma > 0.0))
        throw std::invalid_argument("gaussian envelope needs positive sigma");
}

double two_photon_detuning(TwoPhotonMode mode, double omega_diff,
                           const AtomSpecies& s, double v) {
    double resonance = 4.0 * recoil_frequency(s) + 2.0 * s.wavenumber * v;
    if (mode == TwoPhotonMode::raman) resonance += s.hyperfine_splitting;
    return omega_diff - resonance;
}

double intermediate_detuning(int m, const BraggPulse& p, const AtomSpecies& s) {
    const int n = p.order;
    if (m < 1 || m > 2 * n)
        throw std::domain_error("intermediate_detuning: m = " + std::to_string(m) +
                                " outside 1..2n = 1.." + std::to_string(2 * n));
    const double wr = recoil_frequency(s);
    if (m % 2 == 1)
        return p.single_photon_detuning +
               (static_cast<double>(m) * m - 2.0 * n * (m - 1)) * wr;
    return static_cast<double>(m) * (2.0 * n - m) * wr;
}

double effective_rabi(int n, double omega2, const AtomSpecies& s) {
    if (n < 1) throw std::invalid_argument("effective_rabi: order must be >= 1");
    if (!(omega2 > 0.0)) throw std::invalid_argument("effective_rabi: omega2 must be positive");
    if (n == 1) return omega2;
    const double log8wr = std::log(8.0 * recoil_frequency(s));
    const double log_omega = n * std::log(omega2) - (n - 1) * log8wr - 2.0 * std::lgamma(n);
    return std::exp(log_omega);
}

double two_photon_rabi_for_pi_pulse(int n, double tau, const AtomSpecies& s) {
    if (n < 1) throw std::invalid_argument("two_photon_rabi_for_pi_pulse: order must be >= 1");
    if (!(tau > 0.0)) throw std::invalid_argument("two_photon_rabi_for_pi_pulse: tau must be positive");
    if (n == 1) return consts::pi / tau;
    const double log8wr = std::log(8.0 * recoil_frequency(s));
    return std::exp((std::log(consts::pi / tau) + (n - 1) * log8wr + 2.0 * std::lgamma(n)) / n);
}

double transfer_population(double omega_eff, double t) {
    if (!(omega_eff > 0.0)) throw std::invalid_argument("transfer_population: omega_eff must be positive");
    if (t < 0.0) throw std::invalid_argument("transfer_population: t must be >= 0");
    return 0.5 * (1.0 - std::cos(omega_eff * t));
}

PulseDurations pulse_durations(double omega_eff) {
    if (!(omega_eff > 0.0)) throw std::invalid_argument("pulse_durations: omega_eff must be positive");
    const double tau_pi = consts::pi / omega_eff;
    return {tau_pi, 0.5 * tau_pi};
}

LossResult spontaneous_loss(const BraggPulse& p, const AtomSpecies& s) {
    validate(p);
    LossResult r;
    r.detuning_warning = p.single_photon_detuning < 100.0 * recoil_frequency(s);
    double raw = (p.two_photon_rabi / (2.0 * p.single_photon_detuning)) * s.linewidth * p.duration;
    if (raw > 1.0) {
        r.clamped = true;
        raw = 1.0;
    }
    r.probability = raw;
    return r;
}

double min_detuning(double pulse_area, double ns_max, const AtomSpecies& s) {
    if (!(pulse_area > 0.0)) throw std::invalid_argument("min_detuning: pulse area must be positive");
    if (!(ns_max > 0.0 && ns_max < 1.0))
        throw std::invalid_argument("min_detuning: ns_max must lie in (0,1)");
    return pulse_area * s.linewidth / (2.0 * ns_max);
}

double resonance_frequency(int n, double t, const AtomSpecies& s, double g) {
    if (n < 1) throw std::invalid_argument("resonance_frequency: order must be >= 1");
    if (t < 0.0) throw std::invalid_argument("resonance_frequency: t must be >= 0");
    return n * bragg_bandwidth(s) + 2.0 * s.wavenumber * g * t;
}

double off_resonant_transfer(double omega_eff, double delta, double t) {
    if (!(omega_eff > 0.0)) throw std::invalid_argument("off_resonant_transfer: omega_eff must be positive");
    if (t < 0.0) throw std::invalid_argument("off_resonant_transfer: t must be >= 0");
    const double w2 = omega_eff * omega_eff + delta * delta;
    const double sn = std::sin(0.5 * std::sqrt(w2) * t);
    return (omega_eff * omega_eff / w2) * sn * sn;
}

}  // namespace braggsim
