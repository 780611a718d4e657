#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "braggsim/config.hpp"
#include "braggsim/constants.hpp"
#include "braggsim/dynamics.hpp"
#include "braggsim/requirements.hpp"
#include "braggsim/species.hpp"

using namespace braggsim;

namespace {
const AtomSpecies rb = rb87();
const double wr = recoil_frequency(rb);

CloudSpec cloud_at(double t_perp, double t_par = 30e-9, double r0 = 1.5e-3) {
    return {r0, t_perp, t_par};
}
}  // namespace

TEST_CASE("longitudinal temperature limit") {
    const double t_lim = longitudinal_temperature_limit(rb);
    CHECK(t_lim == doctest::Approx(3.622400386869196e-07).epsilon(1e-12));
    CHECK(t_lim == doctest::Approx(0.36e-6).epsilon(0.02));
    AtomSpecies heavy = rb;
    heavy.mass *= 2.0;
    CHECK(longitudinal_temperature_limit(heavy) == doctest::Approx(t_lim / 2.0).epsilon(1e-12));
}

TEST_CASE("pulse duration window") {
    const double t_lim = longitudinal_temperature_limit(rb);
    SUBCASE("narrow momentum spread gives a wide window") {
        const auto w = pulse_duration_window(cloud_at(5e-6, t_lim / 100.0), rb);
        REQUIRE(!w.empty());
        CHECK(w.tau_min == doctest::Approx(1.0 / bragg_bandwidth(rb)).epsilon(1e-12));
        CHECK(w.tau_max / w.tau_min == doctest::Approx(10.0).epsilon(1e-9));
        CHECK(w.design_tau() == doctest::Approx(std::sqrt(w.tau_min * w.tau_max)).epsilon(1e-12));
    }
    SUBCASE("window closes exactly at the temperature limit") {
        const auto w = pulse_duration_window(cloud_at(5e-6, t_lim), rb);
        CHECK(w.tau_max == doctest::Approx(w.tau_min).epsilon(1e-9));
        CHECK(pulse_duration_window(cloud_at(5e-6, t_lim * 1.01), rb).empty());
    }
    SUBCASE("colder clouds admit longer pulses") {
        double prev = pulse_duration_window(cloud_at(5e-6, t_lim / 2.0), rb).tau_max;
        for (double f : {4.0, 8.0, 16.0}) {
            const double cur = pulse_duration_window(cloud_at(5e-6, t_lim / f), rb).tau_max;
            CHECK(cur > prev);
            prev = cur;
        }
    }
}

TEST_CASE("cloud radius growth") {
    const CloudSpec cloud = cloud_at(5e-6);
    CHECK(cloud_radius(cloud, rb, 0.0) == doctest::Approx(1.5e-3).epsilon(1e-12));
    CHECK(cloud_radius(cloud, rb, 0.12) ==
          doctest::Approx(0.0030230602275332094).epsilon(1e-12));
    CHECK(transverse_velocity(cloud, rb) ==
          doctest::Approx(0.02187225084199971).epsilon(1e-12));
    double prev = 0.0;
    for (double t : {0.01, 0.05, 0.1, 0.2}) {
        const double r = cloud_radius(cloud, rb, t);
        CHECK(r > prev);
        prev = r;
    }
}

TEST_CASE("minimum beam diameter") {
    const double w5 = min_beam_diameter(cloud_at(5e-6), rb, 0.02, 0.05);
    CHECK(w5 == doctest::Approx(0.006046120455066419).epsilon(1e-12));
    CHECK(w5 == doctest::Approx(6.0e-3).epsilon(0.02));

    const double w_cold = min_beam_diameter(cloud_at(0.36e-6), rb, 0.02, 0.05);
    CHECK(w_cold == doctest::Approx(0.003314212006513226).epsilon(1e-12));

    CHECK(min_beam_diameter(cloud_at(1e-30), rb, 0.02, 0.05) ==
          doctest::Approx(2.0 * 1.5e-3).epsilon(1e-9));

    SUBCASE("monotone in every argument") {
        std::mt19937_64 eng(7);
        auto uniform = [&eng](double lo, double hi) {
            return lo + (hi - lo) * static_cast<double>(eng() >> 11) * 0x1.0p-53;
        };
        for (int i = 0; i < 50; ++i) {
            CloudSpec c{uniform(0.2e-3, 3e-3), uniform(0.1e-6, 8e-6), 30e-9};
            const double t0 = uniform(1e-3, 40e-3);
            const double T = uniform(10e-3, 80e-3);
            const double w = min_beam_diameter(c, rb, t0, T);
            CloudSpec bigger = c;
            bigger.initial_radius *= 1.1;
            CHECK(min_beam_diameter(bigger, rb, t0, T) > w);
            CloudSpec hotter = c;
            hotter.transverse_temperature *= 1.3;
            CHECK(min_beam_diameter(hotter, rb, t0, T) > w);
            CHECK(min_beam_diameter(c, rb, t0 * 1.2, T) > w);
            CHECK(min_beam_diameter(c, rb, t0, T * 1.2) > w);
        }
    }
}

TEST_CASE("wavefront curvature error and bound") {
    const CloudSpec warm = cloud_at(5e-6);
    SUBCASE("flat wavefronts are unbiased") {
        const auto e = wavefront_phase_error(1, rb, 1e30, warm, 0.05);
        CHECK(e.phase < 1e-20);
        CHECK(e.acceleration_bias < 1e-20);
    }
    SUBCASE("bias at the five microkelvin bound") {
        const auto e = wavefront_phase_error(1, rb, 48815.0, warm, 0.05);
        CHECK(e.acceleration_bias == doctest::Approx(consts::ugal_g).epsilon(0.01));
        const double expected_phase = 2.0 * rb.wavenumber * e.acceleration_bias * 0.05 * 0.05;
        CHECK(e.phase == doctest::Approx(expected_phase).epsilon(1e-12));
    }
    SUBCASE("phase scales with order and T squared") {
        const auto e1 = wavefront_phase_error(1, rb, 5e4, warm, 0.05);
        const auto e3 = wavefront_phase_error(3, rb, 5e4, warm, 0.05);
        const auto e1_long = wavefront_phase_error(1, rb, 5e4, warm, 0.10);
        CHECK(e3.phase == doctest::Approx(3.0 * e1.phase).epsilon(1e-12));
        CHECK(e1_long.phase == doctest::Approx(4.0 * e1.phase).epsilon(1e-12));
        CHECK(e3.acceleration_bias == doctest::Approx(e1.acceleration_bias).epsilon(1e-12));
    }
    SUBCASE("minimum radius of curvature") {
        const double r5 = min_curvature(warm, rb, consts::ugal_g);
        CHECK(r5 == doctest::Approx(48.8e3).epsilon(0.02));
        CHECK(r5 * consts::ugal_g ==
              doctest::Approx(std::pow(transverse_velocity(warm, rb), 2)).epsilon(1e-12));
        CHECK(min_curvature(cloud_at(0.36e-6), rb, consts::ugal_g) ==
              doctest::Approx(3.5e3).epsilon(0.03));
    }
}

TEST_CASE("minimum fall time before the first pulse") {
    CHECK(min_fall_time(1, rb, 9.8) == doctest::Approx(0.6e-3).epsilon(0.02));
    CHECK(min_fall_time(2, rb, 9.8) == doctest::Approx(1.2e-3).epsilon(0.02));
    CHECK(min_fall_time(5, rb, 9.8) == doctest::Approx(3.0e-3).epsilon(0.02));
    CHECK(min_fall_time(1, rb, 9.8) ==
          doctest::Approx(0.0006007318051917022).epsilon(1e-12));
    CHECK(min_fall_time(3, rb, 9.8) ==
          doctest::Approx(3.0 * min_fall_time(1, rb, 9.8)).epsilon(1e-12));
    CHECK(min_fall_time(1, rb, 4.9) ==
          doctest::Approx(2.0 * min_fall_time(1, rb, 9.8)).epsilon(1e-12));
}

TEST_CASE("intensity and power from the two-photon rabi frequency") {
    const double delta = consts::two_pi * 1e9;
    SUBCASE("first-order value") {
        const double i1 = intensity_from_rabi(16.362462 * wr, delta, rb);
        CHECK(i1 == doctest::Approx(180.0).epsilon(0.10));  // W/m^2 = 18.0 mW/cm^2
    }
    SUBCASE("intensity is linear in rabi frequency and detuning") {
        std::mt19937_64 eng(11);
        auto uniform = [&eng](double lo, double hi) {
            return lo + (hi - lo) * static_cast<double>(eng() >> 11) * 0x1.0p-53;
        };
        for (int i = 0; i < 50; ++i) {
            const double o2 = uniform(5.0, 800.0) * wr;
            const double d = uniform(0.3, 5.0) * consts::two_pi * 1e9;
            const double base = intensity_from_rabi(o2, d, rb);
            CHECK(intensity_from_rabi(2.0 * o2, d, rb) ==
                  doctest::Approx(2.0 * base).epsilon(1e-12));
            CHECK(intensity_from_rabi(o2, 2.0 * d, rb) ==
                  doctest::Approx(2.0 * base).epsilon(1e-12));
            CHECK(rabi_from_intensity(base, d, rb) == doctest::Approx(o2).epsilon(1e-12));
        }
    }
    SUBCASE("power is quadratic in beam diameter") {
        const double intensity = 200.0;
        const double p6 = power_from_intensity(intensity, 6e-3);
        CHECK(p6 == doctest::Approx(intensity * consts::pi * 9e-6).epsilon(1e-12));
        CHECK(power_from_intensity(intensity, 12e-3) ==
              doctest::Approx(4.0 * p6).epsilon(1e-12));
    }
}

TEST_CASE("optimal parameter table") {
    const auto rows = default_parameter_table(rb);
    REQUIRE(rows.size() == 6);
    const int orders[] = {1, 5, 10, 15, 20, 25};
    const double omega2_expected[] = {16.4, 38.7, 118.1, 254.6, 443.6, 685.5};
    const double omega2_frozen[] = {16.362461737446836, 38.64441795811903,
                                    118.12169008720473, 254.55513538334552,
                                    443.5860778273619, 685.4496139631249};
    const double intensity_frozen[] = {180.0, 425.1191137420391,
                                       1299.4318677022318, 2800.3075028826215,
                                       4879.797141171745, 7540.487030200051};
    double ratio_min = 1e300;
    double ratio_max = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        CHECK(r.order == orders[i]);
        CHECK(r.omega2 / wr == doctest::Approx(omega2_expected[i]).epsilon(0.01));
        CHECK(r.omega2 / wr == doctest::Approx(omega2_frozen[i]).epsilon(1e-12));
        CHECK(r.intensity == doctest::Approx(intensity_frozen[i]).epsilon(1e-12));
        CHECK(effective_rabi(r.order, r.omega2, rb) * r.tau ==
              doctest::Approx(consts::pi).epsilon(1e-9));
        const double ratio = r.intensity / r.omega2;
        ratio_min = std::min(ratio_min, ratio);
        ratio_max = std::max(ratio_max, ratio);
    }
    CHECK((ratio_max - ratio_min) / ratio_min < 0.005);
    SUBCASE("power columns") {
        CHECK(rows[0].power_vel * 1e3 == doctest::Approx(5.1).epsilon(0.05));
        CHECK(rows[0].power_bec * 1e3 == doctest::Approx(1.7).epsilon(0.05));
        for (const auto& r : rows) {
            CHECK(r.power_vel == doctest::Approx(power_from_intensity(r.intensity, 6.0e-3))
                                     .epsilon(1e-12));
            CHECK(r.power_bec == doctest::Approx(power_from_intensity(r.intensity, 3.46e-3))
                                     .epsilon(1e-12));
        }
    }
    SUBCASE("loss column matches the scattering estimate") {
        CHECK(rows[0].loss ==
              doctest::Approx(0.009519025740377073).epsilon(1e-9));
        for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].loss > rows[i - 1].loss);
    }
    SUBCASE("csv export") {
        std::ostringstream out;
        write_table_csv(rows, rb, out);
        std::istringstream in(out.str());
        std::string header;
        std::getline(in, header);
        CHECK(header ==
              "n,tau_recoil_units,omega2_recoil_units,omega_eff_recoil_units,"
              "intensity_mw_cm2,power_bec_mw,power_vel_mw,loss_probability");
        std::string line;
        std::size_t n = 0;
        while (std::getline(in, line)) ++n;
        CHECK(n == rows.size());
    }
}

TEST_CASE("requirement report") {
    SUBCASE("defaults pass everything") {
        const auto rep = evaluate_requirements(default_apparatus(rb));
        REQUIRE(rep.entries.size() == 6);
        CHECK(rep.all_pass());
        for (const auto& e : rep.entries) CHECK(e.pass);
    }
    SUBCASE("entries expose the underlying bounds") {
        const auto cfg = default_apparatus(rb);
        const auto rep = evaluate_requirements(cfg);
        CHECK(rep.entry("longitudinal_temperature").bound ==
              doctest::Approx(longitudinal_temperature_limit(rb) / 10.0).epsilon(1e-12));
        CHECK(rep.entry("beam_diameter").bound ==
              doctest::Approx(min_beam_diameter(cfg.cloud, rb, cfg.first_pulse_time,
                                                cfg.interrogation_time))
                  .epsilon(1e-12));
        CHECK(rep.entry("wavefront_curvature").bound ==
              doctest::Approx(min_curvature(cfg.cloud, rb, cfg.target_accuracy)).epsilon(1e-12));
        CHECK(rep.entry("fall_time").bound ==
              doctest::Approx(min_fall_time(cfg.order, rb, cfg.gravity)).epsilon(1e-12));
    }
    SUBCASE("each knob can flip its own entry") {
        auto cfg = default_apparatus(rb);
        cfg.cloud.longitudinal_temperature = longitudinal_temperature_limit(rb);
        CHECK(!evaluate_requirements(cfg).entry("longitudinal_temperature").pass);

        cfg = default_apparatus(rb);
        cfg.beam_diameter = 4e-3;
        CHECK(!evaluate_requirements(cfg).entry("beam_diameter").pass);

        cfg = default_apparatus(rb);
        cfg.curvature = 10e3;
        CHECK(!evaluate_requirements(cfg).entry("wavefront_curvature").pass);

        cfg = default_apparatus(rb);
        cfg.first_pulse_time = 0.1e-3;
        CHECK(!evaluate_requirements(cfg).entry("fall_time").pass);

        cfg = default_apparatus(rb);
        cfg.detuning = consts::two_pi * 0.2e9;
        CHECK(!evaluate_requirements(cfg).entry("detuning").pass);

        cfg = default_apparatus(rb);
        cfg.cloud.longitudinal_temperature = longitudinal_temperature_limit(rb) * 1.5;
        const auto rep = evaluate_requirements(cfg);
        CHECK(!rep.entry("pulse_duration_window").pass);
        CHECK(!rep.all_pass());
    }
    SUBCASE("formatted report carries pass and fail markers") {
        auto cfg = default_apparatus(rb);
        cfg.beam_diameter = 4e-3;
        const std::string text = format_report(evaluate_requirements(cfg));
        CHECK(text.find("[FAIL] beam_diameter") != std::string::npos);
        CHECK(text.find("[PASS] fall_time") != std::string::npos);
    }
}

TEST_CASE("config validation and hashing") {
    auto cfg = default_apparatus(rb);
    CHECK_NOTHROW(validate(cfg));
    CHECK(config_hash(cfg) == 0x7ce3f0346db5a778ULL);
    SUBCASE("hash tracks every field") {
        auto other = default_apparatus(rb);
        other.interrogation_time = 0.051;
        CHECK(config_hash(other) != config_hash(cfg));
        other = default_apparatus(rb);
        other.order = 2;
        CHECK(config_hash(other) != config_hash(cfg));
    }
    SUBCASE("invalid values are rejected by name") {
        auto bad = default_apparatus(rb);
        bad.order = 0;
        CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("order"), std::invalid_argument);
        bad = default_apparatus(rb);
        bad.interrogation_time = -1.0;
        CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("interrogation_time"),
                             std::invalid_argument);
        bad = default_apparatus(rb);
        bad.beam_diameter = 0.0;
        CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("beam_diameter"),
                             std::invalid_argument);
    }
    SUBCASE("key-value parsing round trip") {
        const auto cfg2 = apparatus_from_keyvalues(
            {{"order", "2"},
             {"interrogation_ms", "40"},
             {"first_pulse_ms", "2"},
             {"detuning_ghz", "1.5"},
             {"beam_diameter_mm", "6.5"}},
            rb);
        CHECK(cfg2.order == 2);
        CHECK(cfg2.interrogation_time == doctest::Approx(0.040).epsilon(1e-12));
        CHECK(cfg2.first_pulse_time == doctest::Approx(0.002).epsilon(1e-12));
        CHECK(cfg2.detuning == doctest::Approx(consts::two_pi * 1.5e9).epsilon(1e-12));
        CHECK_THROWS_WITH_AS(apparatus_from_keyvalues({{"bogus", "1"}}, rb),
                             doctest::Contains("bogus"), std::invalid_argument);
    }
    SUBCASE("si target overrides the ugal convenience key") {
        const auto cfg3 = apparatus_from_keyvalues(
            {{"target_ugal", "2"}, {"target_ms2", "5e-8"}}, rb);
        CHECK(cfg3.target_accuracy == doctest::Approx(5e-8).epsilon(1e-12));
        const auto cfg4 = apparatus_from_keyvalues({{"target_ugal", "2"}}, rb);
        CHECK(cfg4.target_accuracy == doctest::Approx(2.0 * consts::ugal_g).epsilon(1e-12));
    }
}
