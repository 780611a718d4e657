#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "braggsim/config.hpp"
#include "braggsim/constants.hpp"
#include "braggsim/dynamics.hpp"
#include "braggsim/sequencer.hpp"
#include "braggsim/species.hpp"

using namespace braggsim;

namespace {
const AtomSpecies rb = rb87();

double design_omega2(const ApparatusConfig& cfg) {
    const auto w = pulse_duration_window(cfg.cloud, cfg.species);
    return two_photon_rabi_for_pi_pulse(cfg.order, w.design_tau(), cfg.species);
}
}  // namespace

TEST_CASE("default schedule is valid") {
    const auto cfg = default_apparatus(rb);
    const auto s = build_schedule(cfg, design_omega2(cfg));
    const auto violations = validate_schedule(s, cfg);
    for (const auto& v : violations) INFO(v);
    CHECK(violations.empty());
    CHECK(s.order == cfg.order);
    CHECK(s.species_name == rb.name);
    CHECK(s.t_fall == cfg.first_pulse_time);
}

TEST_CASE("schedule timing structure") {
    const auto cfg = default_apparatus(rb);
    const double omega2 = design_omega2(cfg);
    const auto s = build_schedule(cfg, omega2);

    SUBCASE("pulse centers are spaced exactly T") {
        CHECK(s.pulse_centers[1] - s.pulse_centers[0] == cfg.interrogation_time);
        CHECK(s.pulse_centers[2] - s.pulse_centers[1] == cfg.interrogation_time);
    }
    SUBCASE("pulse durations follow the pi/2 - pi - pi/2 pattern") {
        std::vector<const ScheduleEvent*> pulses;
        for (const auto& e : s.events)
            if (e.kind == EventKind::pulse_half_pi || e.kind == EventKind::pulse_pi)
                pulses.push_back(&e);
        REQUIRE(pulses.size() == 3);
        CHECK(pulses[0]->kind == EventKind::pulse_half_pi);
        CHECK(pulses[1]->kind == EventKind::pulse_pi);
        CHECK(pulses[2]->kind == EventKind::pulse_half_pi);
        CHECK(pulses[1]->duration == doctest::Approx(2.0 * pulses[0]->duration).epsilon(1e-12));
        CHECK(pulses[2]->duration == pulses[0]->duration);
        const auto durations = pulse_durations(effective_rabi(cfg.order, omega2, rb));
        CHECK(pulses[1]->duration == doctest::Approx(durations.pi).epsilon(1e-12));
        CHECK(pulses[0]->duration == doctest::Approx(durations.half_pi).epsilon(1e-12));
        CHECK(pulses[0]->intensity == pulses[1]->intensity);
        CHECK(pulses[1]->intensity == pulses[2]->intensity);
        CHECK(pulses[0]->intensity ==
              doctest::Approx(intensity_from_rabi(omega2, cfg.detuning, rb)).epsilon(1e-12));
    }
    SUBCASE("first event waits for the free fall") {
        REQUIRE(!s.events.empty());
        CHECK(s.events.front().kind == EventKind::wait);
        CHECK(s.events.front().t_start == 0.0);
        CHECK(s.events.front().duration == doctest::Approx(cfg.first_pulse_time).epsilon(1e-12));
    }
    SUBCASE("total length accounts for fall, interrogation, and edges") {
        const auto& last = s.events.back();
        const auto durations = pulse_durations(effective_rabi(cfg.order, omega2, rb));
        CHECK(last.t_start + last.duration ==
              doctest::Approx(cfg.first_pulse_time + 2.0 * cfg.interrogation_time +
                              durations.half_pi)
                  .epsilon(1e-12));
        CHECK(s.detection_time ==
              doctest::Approx(s.pulse_centers[2] + durations.half_pi / 2.0).epsilon(1e-12));
    }
    SUBCASE("frequency ramp starts at the order-n offset and tracks gravity") {
        CHECK(s.events.front().freq_offset_start ==
              doctest::Approx(cfg.order * bragg_bandwidth(rb)).epsilon(1e-12));
        for (const auto& e : s.events)
            CHECK(e.chirp_slope ==
                  doctest::Approx(2.0 * rb.wavenumber * cfg.gravity).epsilon(1e-12));
        for (int i = 0; i < 3; ++i) {
            double offset = 0.0;
            for (const auto& e : s.events) {
                if (e.t_start <= s.pulse_centers[i] &&
                    s.pulse_centers[i] <= e.t_start + e.duration) {
                    offset = e.freq_offset_start + e.chirp_slope * (s.pulse_centers[i] - e.t_start);
                    break;
                }
            }
            CHECK(offset == doctest::Approx(resonance_frequency(cfg.order, s.pulse_centers[i],
                                                                rb, cfg.gravity))
                                .epsilon(1e-9));
        }
    }
    SUBCASE("events tile the timeline without gaps") {
        for (std::size_t i = 1; i < s.events.size(); ++i)
            CHECK(s.events[i].t_start ==
                  doctest::Approx(s.events[i - 1].t_start + s.events[i - 1].duration)
                      .epsilon(1e-12));
    }
}

TEST_CASE("published configurations are accepted") {
    SUBCASE("second-order sequence") {
        auto cfg = default_apparatus(rb);
        cfg.order = 2;
        cfg.first_pulse_time = 2e-3;
        cfg.interrogation_time = 40e-3;
        const auto s = build_schedule(cfg, design_omega2(cfg));
        CHECK(validate_schedule(s, cfg).empty());
        CHECK(s.events.front().freq_offset_start ==
              doctest::Approx(2.0 * bragg_bandwidth(rb)).epsilon(1e-12));
        CHECK(s.events.front().freq_offset_start / consts::two_pi ==
              doctest::Approx(30.2e3).epsilon(0.005));
    }
    SUBCASE("short first-order sequence") {
        auto cfg = default_apparatus(rb);
        cfg.order = 1;
        cfg.interrogation_time = 3e-3;
        cfg.first_pulse_time = 0.7e-3;
        const auto s = build_schedule(cfg, design_omega2(cfg));
        CHECK(validate_schedule(s, cfg).empty());
        CHECK(s.events.front().freq_offset_start ==
              doctest::Approx(bragg_bandwidth(rb)).epsilon(1e-12));
    }
}

TEST_CASE("schedules that cannot run are rejected") {
    SUBCASE("first pulse before the lattice directions separate") {
        auto cfg = default_apparatus(rb);
        cfg.order = 2;
        cfg.first_pulse_time = 1e-3;  // bound is 1.2 ms for n = 2
        CHECK_THROWS_WITH_AS(build_schedule(cfg, design_omega2(cfg)),
                             doctest::Contains("fall"), std::runtime_error);
    }
    SUBCASE("pulses longer than the pulse spacing") {
        auto cfg = default_apparatus(rb);
        cfg.interrogation_time = 5e-6;
        CHECK_THROWS_AS(build_schedule(cfg, design_omega2(cfg)), std::runtime_error);
    }
}

TEST_CASE("validation catches corrupted schedules") {
    const auto cfg = default_apparatus(rb);
    const auto good = build_schedule(cfg, design_omega2(cfg));
    REQUIRE(validate_schedule(good, cfg).empty());

    SUBCASE("zero chirp slope breaks resonance tracking") {
        auto s = good;
        for (auto& e : s.events) {
            e.chirp_slope = 0.0;
            e.freq_offset_start = cfg.order * bragg_bandwidth(rb);
        }
        const auto violations = validate_schedule(s, cfg);
        CHECK(!violations.empty());
    }
    SUBCASE("swapped pulse kinds are reported") {
        auto s = good;
        for (auto& e : s.events) {
            if (e.kind == EventKind::pulse_half_pi)
                e.kind = EventKind::pulse_pi;
            else if (e.kind == EventKind::pulse_pi)
                e.kind = EventKind::pulse_half_pi;
        }
        CHECK(!validate_schedule(s, cfg).empty());
    }
    SUBCASE("overlapping events are reported") {
        auto s = good;
        REQUIRE(s.events.size() > 2);
        s.events[1].t_start -= 1e-6;
        CHECK(!validate_schedule(s, cfg).empty());
    }
    SUBCASE("a stretched mirror pulse is reported") {
        auto s = good;
        for (auto& e : s.events)
            if (e.kind == EventKind::pulse_pi) e.duration *= 1.5;
        CHECK(!validate_schedule(s, cfg).empty());
    }
}

TEST_CASE("record round trip is bit exact") {
    auto cfg = default_apparatus(rb);
    cfg.order = 3;
    cfg.first_pulse_time = 2.5e-3;
    const auto s = build_schedule(cfg, design_omega2(cfg));
    const auto rec = schedule_to_record(s);
    const auto back = schedule_from_record(rec);
    CHECK(back.t_fall == s.t_fall);
    CHECK(back.detection_time == s.detection_time);
    CHECK(back.order == s.order);
    CHECK(back.species_name == s.species_name);
    for (int i = 0; i < 3; ++i) CHECK(back.pulse_centers[i] == s.pulse_centers[i]);
    REQUIRE(back.events.size() == s.events.size());
    for (std::size_t i = 0; i < s.events.size(); ++i) {
        CHECK(back.events[i].t_start == s.events[i].t_start);
        CHECK(back.events[i].duration == s.events[i].duration);
        CHECK(back.events[i].kind == s.events[i].kind);
        CHECK(back.events[i].intensity == s.events[i].intensity);
        CHECK(back.events[i].freq_offset_start == s.events[i].freq_offset_start);
        CHECK(back.events[i].chirp_slope == s.events[i].chirp_slope);
    }
    CHECK(validate_schedule(back, cfg).empty());

    SUBCASE("serialized text also round trips") {
        const std::string text = rec.dump();
        const auto reparsed = schedule_from_record(nlohmann::json::parse(text));
        CHECK(reparsed.events.back().freq_offset_start ==
              s.events.back().freq_offset_start);
    }
}

TEST_CASE("event kind names") {
    CHECK(event_kind_name(EventKind::wait) == "wait");
    CHECK(event_kind_name(EventKind::pulse_half_pi) == "pulse_pi_2");
    CHECK(event_kind_name(EventKind::pulse_pi) == "pulse_pi");
    CHECK(event_kind_name(EventKind::ramp_segment) == "ramp_segment");
    for (auto k : {EventKind::wait, EventKind::pulse_half_pi, EventKind::pulse_pi,
                   EventKind::ramp_segment})
        CHECK(event_kind_from_name(event_kind_name(k)) == k);
    CHECK_THROWS_AS(event_kind_from_name("bogus"), std::runtime_error);
}

TEST_CASE("schedule CSV export") {
    const auto cfg = default_apparatus(rb);
    const auto s = build_schedule(cfg, design_omega2(cfg));
    std::ostringstream out;
    export_schedule_csv(s, out);
    std::istringstream in(out.str());
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "t_start,duration,kind,intensity,freq_offset_start_hz,chirp_slope_hz_per_s");
    std::string line;
    std::size_t rows = 0;
    bool saw_pi_2 = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        ++rows;
        if (line.find("pulse_pi_2") != std::string::npos) saw_pi_2 = true;
    }
    CHECK(rows == s.events.size());
    CHECK(saw_pi_2);
}
