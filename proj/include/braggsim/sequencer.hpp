#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "braggsim/requirements.hpp"

namespace braggsim {

enum class EventKind { wait, pulse_half_pi, pulse_pi, ramp_segment };

std::string event_kind_name(EventKind k);
EventKind event_kind_from_name(const std::string& name);

struct ScheduleEvent {
    double t_start = 0.0;           // s from release
    double duration = 0.0;          // s
    EventKind kind = EventKind::wait;
    double intensity = 0.0;         // W/m^2
    double freq_offset_start = 0.0; // rad/s at t_start
    double chirp_slope = 0.0;       // rad/s^2
};

struct TimingSchedule {
    std::vector<ScheduleEvent> events;
    double t_fall = 0.0;                    // s
    std::array<double, 3> pulse_centers{};  // s
    double detection_time = 0.0;            // s
    int order = 1;
    std::string species_name;
};

// Free-fall wait of t0, then pi/2 - pi - pi/2 pulses at equal intensity
// with centers spaced exactly T, under a continuous frequency ramp
// starting at n delta_B with slope 2 k g. Throws std::runtime_error
// when t0 is below the fall-time bound or the pulses would overlap.
TimingSchedule build_schedule(const ApparatusConfig& cfg, double omega2);

// Empty list iff the schedule satisfies all structural invariants and
// its frequency offsets track n delta_B + 2 k g t.
std::vector<std::string> validate_schedule(const TimingSchedule& s,
                                           const ApparatusConfig& cfg);

// CSV columns t_start, duration, kind, intensity, freq_offset_start_hz,
// chirp_slope_hz_per_s (ordinary-frequency units).
void export_schedule_csv(const TimingSchedule& s, std::ostream& out);

nlohmann::json schedule_to_record(const TimingSchedule& s);
TimingSchedule schedule_from_record(const nlohmann::json& record);

}  // namespace braggsim
