#include "braggsim/sequencer.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "braggsim/constants.hpp"
#include "braggsim/dynamics.hpp"
#include "braggsim/textio.hpp"

namespace braggsim {

std::string event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::wait: return "wait";
        case EventKind::pulse_half_pi: return "pulse_pi_2";
        case EventKind::pulse_pi: return "pulse_pi";
        case EventKind::ramp_segment: return "ramp_segment";
    }
    throw std::logic_error("unreachable event kind");
}

EventKind event_kind_from_name(const std::string& name) {
    if (name == "wait") return EventKind::wait;
    if (name == "pulse_pi_2") return EventKind::pulse_half_pi;
    if (name == "pulse_pi") return EventKind::pulse_pi;
    if (name == "ramp_segment") return EventKind::ramp_segment;
    throw std::runtime_error("unknown schedule event kind '" + name + "'");
}

TimingSchedule build_schedule(const ApparatusConfig& cfg, double omega2) {
    validate(cfg);
    if (!(omega2 > 0.0)) throw std::invalid_argument("build_schedule: omega2 must be positive");

    const AtomSpecies& s = cfg.species;
    const double t_min = min_fall_time(cfg.order, s, cfg.gravity);
    if (cfg.first_pulse_time < t_min) {
        std::ostringstream msg;
        msg << "build_schedule: first pulse at " << textio::format_sig4(cfg.first_pulse_time)
            << " s is before the fall-time bound " << textio::format_sig4(t_min)
            << " s needed to separate the order-" << cfg.order << " lattice directions";
        throw std::runtime_error(msg.str());
    }

    const double omega_eff = effective_rabi(cfg.order, omega2, s);
    const PulseDurations tau = pulse_durations(omega_eff);
    const double T = cfg.interrogation_time;
    if (tau.pi >= T) {
        std::ostringstream msg;
        msg << "build_schedule: pi-pulse duration " << textio::format_sig4(tau.pi)
            << " s does not fit the interrogation time " << textio::format_sig4(T) << " s";
        throw std::runtime_error(msg.str());
    }

    const double t0 = cfg.first_pulse_time;
    const double slope = 2.0 * s.wavenumber * cfg.gravity;       // rad/s^2
    const double offset0 = cfg.order * bragg_bandwidth(s);       // rad/s at release
    const double intensity = intensity_from_rabi(omega2, cfg.detuning, s);

    TimingSchedule sched;
    sched.order = cfg.order;
    sched.species_name = s.name;
    sched.t_fall = t0;
    const double c1 = t0 + 0.5 * tau.half_pi;
    sched.pulse_centers = {c1, c1 + T, c1 + 2.0 * T};
    sched.detection_time = sched.pulse_centers[2] + 0.5 * tau.half_pi;

    auto offset_at = [&](double t) { return offset0 + slope * t; };
    auto push = [&](double start, double dur, EventKind kind, double inten) {
        sched.events.push_back({start, dur, kind, inten, offset_at(start), slope});
    };

    push(0.0, t0, EventKind::wait, 0.0);
    push(t0, tau.half_pi, EventKind::pulse_half_pi, intensity);
    const double p2_start = sched.pulse_centers[1] - 0.5 * tau.pi;
    push(t0 + tau.half_pi, p2_start - (t0 + tau.half_pi), EventKind::ramp_segment, 0.0);
    push(p2_start, tau.pi, EventKind::pulse_pi, intensity);
    const double p3_start = sched.pulse_centers[2] - 0.5 * tau.half_pi;
    push(p2_start + tau.pi, p3_start - (p2_start + tau.pi), EventKind::ramp_segment, 0.0);
    push(p3_start, tau.half_pi, EventKind::pulse_half_pi, intensity);
    return sched;
}

std::vector<std::string> validate_schedule(const TimingSchedule& s,
                                           const ApparatusConfig& cfg) {
    std::vector<std::string> violations;
    auto complain = [&](const std::string& text) { violations.push_back(text); };

    if (s.events.empty()) {
        complain("schedule has no events");
        return violations;
    }

    const double t_tol = 1e-12;
    for (std::size_t i = 0; i + 1 < s.events.size(); ++i) {
        const auto& a = s.events[i];
        const auto& b = s.events[i + 1];
        if (b.t_start < a.t_start - t_tol)
            complain("events out of time order at index " + std::to_string(i + 1));
        if (b.t_start < a.t_start + a.duration - t_tol)
            complain("event " + std::to_string(i + 1) + " overlaps its predecessor");
    }

    std::vector<const ScheduleEvent*> pulses;
    for (const auto& e : s.events)
        if (e.kind == EventKind::pulse_half_pi || e.kind == EventKind::pulse_pi)
            pulses.push_back(&e);
    if (pulses.size() != 3) {
        complain("expected exactly 3 pulse events, found " + std::to_string(pulses.size()));
        return violations;
    }
    if (pulses[0]->kind != EventKind::pulse_half_pi || pulses[1]->kind != EventKind::pulse_pi ||
        pulses[2]->kind != EventKind::pulse_half_pi)
        complain("pulse order must be pi/2, pi, pi/2");
    const double tau_half = pulses[0]->duration;
    if (std::abs(pulses[2]->duration - tau_half) > t_tol)
        complain("the two pi/2 pulses differ in duration");
    if (std::abs(pulses[1]->duration - 2.0 * tau_half) > 1e-12 * std::max(1.0, 2.0 * tau_half))
        complain("pi pulse duration is not twice the pi/2 duration");

    const double c1 = pulses[0]->t_start + 0.5 * pulses[0]->duration;
    const double c2 = pulses[1]->t_start + 0.5 * pulses[1]->duration;
    const double c3 = pulses[2]->t_start + 0.5 * pulses[2]->duration;
    const double T = cfg.interrogation_time;
    if (std::abs((c2 - c1) - T) > 1e-6 || std::abs((c3 - c2) - T) > 1e-6)
        complain("pulse-center spacing deviates from T by more than 1 us");

    const double slope = 2.0 * cfg.species.wavenumber * cfg.gravity;
    const double delta_b = bragg_bandwidth(cfg.species);
    for (const ScheduleEvent* p : pulses) {
        const double center = p->t_start + 0.5 * p->duration;
        const double want = resonance_frequency(cfg.order, center, cfg.species, cfg.gravity);
        const double got = p->freq_offset_start + p->chirp_slope * 0.5 * p->duration;
        if (std::abs(got - want) > 1e-9 * want)
            complain("frequency offset misses the resonance at pulse center t = " +
                     textio::format_sig4(center) + " s by " +
                     textio::format_sig4(std::abs(got - want)) + " rad/s");
        for (double frac : {0.0, 0.25, 0.75, 1.0}) {
            const double t = p->t_start + frac * p->duration;
            const double track = p->freq_offset_start + p->chirp_slope * (t - p->t_start);
            const double res = cfg.order * delta_b + slope * t;
            if (std::abs(track - res) > 1e-6 * delta_b) {
                complain("frequency tracking error " +
                         textio::format_sig4(std::abs(track - res)) + " rad/s inside pulse at t = " +
                         textio::format_sig4(t) + " s");
                break;
            }
        }
    }

    for (std::size_t i = 0; i + 1 < s.events.size(); ++i) {
        const auto& a = s.events[i];
        const auto& b = s.events[i + 1];
        const double end_offset = a.freq_offset_start + a.chirp_slope * a.duration;
        if (std::abs(end_offset - b.freq_offset_start) >
            1e-9 * std::max(1.0, std::abs(end_offset)))
            complain("frequency offset discontinuity between events " + std::to_string(i) +
                     " and " + std::to_string(i + 1));
    }

    const double expected_end = s.t_fall + 2.0 * cfg.interrogation_time + tau_half;
    const auto& last = s.events.back();
    if (std::abs((last.t_start + last.duration) - expected_end) > 1e-9)
        complain("schedule length differs from t0 + 2T + tau_pi/2");
    return violations;
}

void export_schedule_csv(const TimingSchedule& s, std::ostream& out) {
    out << "t_start,duration,kind,intensity,freq_offset_start_hz,chirp_slope_hz_per_s\n";
    for (const auto& e : s.events) {
        out << textio::format_double(e.t_start) << ',' << textio::format_double(e.duration)
            << ',' << event_kind_name(e.kind) << ',' << textio::format_double(e.intensity)
            << ',' << textio::format_double(e.freq_offset_start / consts::two_pi) << ','
            << textio::format_double(e.chirp_slope / consts::two_pi) << '\n';
    }
}

nlohmann::json schedule_to_record(const TimingSchedule& s) {
    nlohmann::json record;
    record["order"] = s.order;
    record["species"] = s.species_name;
    record["t_fall"] = s.t_fall;
    record["pulse_centers"] = s.pulse_centers;
    record["detection_time"] = s.detection_time;
    auto& events = record["events"] = nlohmann::json::array();
    for (const auto& e : s.events) {
        events.push_back({{"t_start", e.t_start},
                          {"duration", e.duration},
                          {"kind", event_kind_name(e.kind)},
                          {"intensity", e.intensity},
                          {"freq_offset_start", e.freq_offset_start},
                          {"chirp_slope", e.chirp_slope}});
    }
    return record;
}

TimingSchedule schedule_from_record(const nlohmann::json& record) {
    TimingSchedule s;
    s.order = record.at("order").get<int>();
    s.species_name = record.at("species").get<std::string>();
    s.t_fall = record.at("t_fall").get<double>();
    const auto& centers = record.at("pulse_centers");
    if (centers.size() != 3) throw std::runtime_error("schedule record: expected 3 pulse centers");
    for (std::size_t i = 0; i < 3; ++i) s.pulse_centers[i] = centers.at(i).get<double>();
    s.detection_time = record.at("detection_time").get<double>();
    for (const auto& ev : record.at("events")) {
        ScheduleEvent e;
        e.t_start = ev.at("t_start").get<double>();
        e.duration = ev.at("duration").get<double>();
        e.kind = event_kind_from_name(ev.at("kind").get<std::string>());
        e.intensity = ev.at("intensity").get<double>();
        e.freq_offset_start = ev.at("freq_offset_start").get<double>();
        e.chirp_slope = ev.at("chirp_slope").get<double>();
        s.events.push_back(e);
    }
    return s;
}

}  // namespace braggsim
