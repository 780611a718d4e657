#include "braggsim/requirements.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "braggsim/constants.hpp"
#include "braggsim/dynamics.hpp"
#include "braggsim/textio.hpp"

namespace braggsim {

namespace {

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string("config field '") + field +
                                    "' must be a positive finite number");
}

}  // namespace

void validate(const CloudSpec& c) {
    require_positive(c.initial_radius, "initial_radius");
    require_positive(c.transverse_temperature, "transverse_temperature");
    require_positive(c.longitudinal_temperature, "longitudinal_temperature");
}

double transverse_velocity(const CloudSpec& c, const AtomSpecies& s) {
    return std::sqrt(consts::k_boltzmann * c.transverse_temperature / s.mass);
}

double longitudinal_momentum_width(const CloudSpec& c, const AtomSpecies& s) {
    return std::sqrt(s.mass * consts::k_boltzmann * c.longitudinal_temperature);
}

void validate(const ApparatusConfig& c) {
    validate(c.species);
    validate(c.cloud);
    if (c.order < 1) throw std::invalid_argument("config field 'order' must be >= 1");
    require_positive(c.interrogation_time, "interrogation_time");
    if (c.first_pulse_time < 0.0)
        throw std::invalid_argument("config field 'first_pulse_time' must be >= 0");
    require_positive(c.detuning, "detuning");
    require_positive(c.beam_diameter, "beam_diameter");
    require_positive(c.curvature, "curvature");
    require_positive(c.target_accuracy, "target_accuracy");
    if (!(c.loss_budget > 0.0 && c.loss_budget < 1.0))
        throw std::invalid_argument("config field 'loss_budget' must lie in (0,1)");
    require_positive(c.gravity, "gravity");
}

double longitudinal_temperature_limit(const AtomSpecies& s) {
    const double hk = consts::hbar * s.wavenumber;
    return hk * hk / (s.mass * consts::k_boltzmann);
}

double PulseWindow::design_tau() const {
    return std::sqrt(tau_min * tau_max);
}

PulseWindow pulse_duration_window(const CloudSpec& c, const AtomSpecies& s) {
    PulseWindow w;
    w.tau_min = 1.0 / bragg_bandwidth(s);
    w.tau_max = s.mass / (2.0 * s.wavenumber * longitudinal_momentum_width(c, s));
    return w;
}

double cloud_radius(const CloudSpec& c, const AtomSpecies& s, double t) {
    if (t < 0.0) throw std::invalid_argument("cloud_radius: t must be >= 0");
    const double v = transverse_velocity(c, s);
    return std::sqrt(c.initial_radius * c.initial_radius + v * v * t * t);
}

double min_beam_diameter(const CloudSpec& c, const AtomSpecies& s, double t0, double T) {
    if (t0 < 0.0) throw std::invalid_argument("min_beam_diameter: t0 must be >= 0");
    if (!(T > 0.0)) throw std::invalid_argument("min_beam_diameter: T must be positive");
    return 2.0 * cloud_radius(c, s, t0 + 2.0 * T);
}

WavefrontError wavefront_phase_error(int n, const AtomSpecies& s, double R,
                                     const CloudSpec& c, double T) {
    if (!(R > 0.0)) throw std::invalid_argument("wavefront_phase_error: R must be positive");
    const double v = transverse_velocity(c, s);
    WavefrontError e;
    e.acceleration_bias = v * v / R;
    e.phase = 2.0 * n * s.wavenumber * e.acceleration_bias * T * T;
    return e;
}

double min_curvature(const CloudSpec& c, const AtomSpecies& s, double target_accuracy) {
    if (!(target_accuracy > 0.0))
        throw std::invalid_argument("min_curvature: target_accuracy must be positive");
    const double v = transverse_velocity(c, s);
    return v * v / target_accuracy;
}

double min_fall_time(int n, const AtomSpecies& s, double g) {
    if (n < 1) throw std::invalid_argument("min_fall_time: order must be >= 1");
    if (!(g > 0.0)) throw std::invalid_argument("min_fall_time: g must be positive");
    return n * bragg_bandwidth(s) / (2.0 * s.wavenumber * g);
}

double intensity_from_rabi(double omega2, double delta, const AtomSpecies& s) {
    if (!(omega2 > 0.0)) throw std::invalid_argument("intensity_from_rabi: omega2 must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("intensity_from_rabi: delta must be positive");
    const double omega0_sq = 2.0 * delta * omega2;
    return 2.0 * s.saturation_intensity * omega0_sq / (s.linewidth * s.linewidth);
}

double rabi_from_intensity(double intensity, double delta, const AtomSpecies& s) {
    if (!(intensity > 0.0)) throw std::invalid_argument("rabi_from_intensity: intensity must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("rabi_from_intensity: delta must be positive");
    return intensity * s.linewidth * s.linewidth / (4.0 * s.saturation_intensity * delta);
}

double power_from_intensity(double intensity, double diameter) {
    if (!(intensity > 0.0)) throw std::invalid_argument("power_from_intensity: intensity must be positive");
    if (!(diameter > 0.0)) throw std::invalid_argument("power_from_intensity: diameter must be positive");
    const double radius = 0.5 * diameter;
    return intensity * consts::pi * radius * radius;
}

std::vector<TableRow> optimal_parameter_table(const std::vector<int>& orders,
                                              const std::vector<double>& tau_recoil_units,
                                              double delta, double w_bec, double w_vel,
                                              const AtomSpecies& s) {
    if (orders.size() != tau_recoil_units.size())
        throw std::invalid_argument("optimal_parameter_table: orders and tau lists differ in length");
    const double wr = recoil_frequency(s);
    std::vector<TableRow> rows;
    rows.reserve(orders.size());
    for (std::size_t i = 0; i < orders.size(); ++i) {
        if (!(tau_recoil_units[i] > 0.0))
            throw std::invalid_argument("optimal_parameter_table: tau values must be positive");
        TableRow row;
        row.order = orders[i];
        row.tau = tau_recoil_units[i] / wr;
        row.omega2 = two_photon_rabi_for_pi_pulse(row.order, row.tau, s);
        row.omega_eff = effective_rabi(row.order, row.omega2, s);
        row.intensity = intensity_from_rabi(row.omega2, delta, s);
        row.power_bec = power_from_intensity(row.intensity, w_bec);
        row.power_vel = power_from_intensity(row.intensity, w_vel);
        BraggPulse pulse{row.order, row.omega2, delta, row.tau, {}};
        row.loss = spontaneous_loss(pulse, s).probability;
        rows.push_back(row);
    }
    return rows;
}

std::vector<TableRow> default_parameter_table(const AtomSpecies& s) {
    return optimal_parameter_table({1, 5, 10, 15, 20, 25},
                                   {0.192, 0.086, 0.105, 0.086, 0.077, 0.072},
                                   consts::two_pi * 1e9, 3.46e-3, 6.0e-3, s);
}

void write_table_csv(const std::vector<TableRow>& rows, const AtomSpecies& s,
                     std::ostream& out) {
    const double wr = recoil_frequency(s);
    out << "n,tau_recoil_units,omega2_recoil_units,omega_eff_recoil_units,"
           "intensity_mw_cm2,power_bec_mw,power_vel_mw,loss_probability\n";
    for (const auto& r : rows) {
        out << r.order << ',' << textio::format_double(r.tau * wr) << ','
            << textio::format_double(r.omega2 / wr) << ','
            << textio::format_double(r.omega_eff / wr) << ','
            << textio::format_double(r.intensity / 10.0) << ','
            << textio::format_double(r.power_bec * 1e3) << ','
            << textio::format_double(r.power_vel * 1e3) << ','
            << textio::format_double(r.loss) << '\n';
    }
}

bool RequirementReport::all_pass() const {
    for (const auto& e : entries)
        if (!e.pass) return false;
    return true;
}

const RequirementEntry& RequirementReport::entry(const std::string& name) const {
    for (const auto& e : entries)
        if (e.name == name) return e;
    throw std::out_of_range("no requirement entry named '" + name + "'");
}

RequirementReport evaluate_requirements(const ApparatusConfig& cfg) {
    validate(cfg);
    const AtomSpecies& s = cfg.species;
    RequirementReport report;

    {
        RequirementEntry e;
        e.name = "longitudinal_temperature";
        const double t_lim = longitudinal_temperature_limit(s);
        e.bound = t_lim / 10.0;
        e.configured = cfg.cloud.longitudinal_temperature;
        e.pass = e.configured <= e.bound;
        e.formula = "T_par <= T_lim/10 with T_lim = (hbar k)^2/(M kB) = " +
                    textio::format_sig4(t_lim) + " K";
        report.entries.push_back(e);
    }
    {
        RequirementEntry e;
        e.name = "pulse_duration_window";
        const PulseWindow w = pulse_duration_window(cfg.cloud, s);
        e.bound = w.tau_min;
        e.configured = w.tau_max;
        e.pass = !w.empty();
        e.formula = "window 1/delta_B < tau < M/(2 k dp_par) non-empty; design tau = " +
                    textio::format_sig4(w.design_tau()) + " s";
        report.entries.push_back(e);
    }
    {
        RequirementEntry e;
        e.name = "beam_diameter";
        e.bound = min_beam_diameter(cfg.cloud, s, cfg.first_pulse_time, cfg.interrogation_time);
        e.configured = cfg.beam_diameter;
        e.pass = e.configured >= e.bound;
        e.formula = "w >= 2 sqrt(r0^2 + v_perp^2 (t0 + 2T)^2)";
        report.entries.push_back(e);
    }
    {
        RequirementEntry e;
        e.name = "wavefront_curvature";
        e.bound = min_curvature(cfg.cloud, s, cfg.target_accuracy);
        e.configured = cfg.curvature;
        e.pass = e.configured >= e.bound;
        e.formula = "R >= v_perp^2 / target_accuracy";
        report.entries.push_back(e);
    }
    {
        RequirementEntry e;
        e.name = "detuning";
        const PulseWindow w = pulse_duration_window(cfg.cloud, s);
        const double tau = w.design_tau();
        const double omega2 = two_photon_rabi_for_pi_pulse(cfg.order, tau, s);
        e.bound = min_detuning(omega2 * tau, cfg.loss_budget, s);
        e.configured = cfg.detuning;
        e.pass = e.configured >= e.bound;
        e.formula = "delta >= omega2 tau Gamma / (2 N_s); order-" + std::to_string(cfg.order) +
                    " pi pulse at design tau = " + textio::format_sig4(tau) + " s";
        report.entries.push_back(e);
    }
    {
        RequirementEntry e;
        e.name = "fall_time";
        e.bound = min_fall_time(cfg.order, s, cfg.gravity);
        e.configured = cfg.first_pulse_time;
        e.pass = e.configured >= e.bound;
        e.formula = "t0 >= n delta_B / (2 k g)";
        report.entries.push_back(e);
    }
    return report;
}

std::string format_report(const RequirementReport& report) {
    std::ostringstream out;
    for (const auto& e : report.entries) {
        out << (e.pass ? "[PASS] " : "[FAIL] ") << e.name << ": configured "
            << textio::format_sig4(e.configured) << " vs bound "
            << textio::format_sig4(e.bound) << "  (" << e.formula << ")\n";
    }
    out << (report.all_pass() ? "all requirements satisfied\n"
                              : "one or more requirements failed\n");
    return out.str();
}

}  // namespace braggsim
