#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "braggsim/config.hpp"
#include "braggsim/constants.hpp"
#include "braggsim/dynamics.hpp"
#include "braggsim/interferometer.hpp"
#include "braggsim/requirements.hpp"
#include "braggsim/sequencer.hpp"
#include "braggsim/species.hpp"
#include "braggsim/textio.hpp"
#include "braggsim/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string config_path;
    std::string species_spec = "builtin";
    std::string out_dir = ".";
    std::string format = "csv";
    std::uint64_t seed = 1;
    std::vector<std::string> overrides;

    // simulate
    std::string scan = "chirp";
    std::vector<double> t_values_ms{40.0, 50.0, 60.0};
    double alpha_min = 0.0;  // Hz/s, 0 = auto around the resonant rate
    double alpha_max = 0.0;
    int samples = 201;
    int points = 100;
    double phase_min = 0.0;
    double phase_max = 4.0 * braggsim::consts::pi;
    double contrast = 1.0;
    bool thermal = false;
    int mc_atoms = 100000;
    double noise = 0.0;

    // table1
    std::string orders_list;
    std::string taus_list;
    double w_bec_mm = 3.46;
    double w_vel_mm = 6.0;

    // sequence
    double omega2_recoil = 0.0;  // 0 = design default from the pulse window
};

braggsim::ApparatusConfig resolve_config(const RunConfig& rc) {
    braggsim::AtomSpecies species = rc.species_spec == "builtin"
                                        ? braggsim::rb87()
                                        : braggsim::load_species(rc.species_spec);
    std::map<std::string, std::string> kv;
    if (!rc.config_path.empty()) kv = braggsim::textio::parse_keyvalue_file(rc.config_path);
    for (const std::string& item : rc.overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw std::runtime_error("--set expects key=value, got '" + item + "'");
        kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    return braggsim::apparatus_from_keyvalues(kv, std::move(species));
}

std::string meta_header(const braggsim::ApparatusConfig& cfg) {
    std::ostringstream out;
    out << "# braggsim " << braggsim::version << '\n'
        << "# species " << cfg.species.name << '\n'
        << "# config_hash " << braggsim::textio::hex64(braggsim::config_hash(cfg)) << '\n';
    return out.str();
}

json meta_record(const braggsim::ApparatusConfig& cfg) {
    return {{"braggsim", braggsim::version},
            {"species", cfg.species.name},
            {"config_hash", braggsim::textio::hex64(braggsim::config_hash(cfg))}};
}

std::ofstream open_out(const RunConfig& rc, const std::string& name) {
    fs::create_directories(rc.out_dir);
    fs::path path = fs::path(rc.out_dir) / name;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write output file: " + path.string());
    return f;
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ','))
        values.push_back(braggsim::textio::to_double(key, item));
    if (values.empty()) throw std::runtime_error("empty list for " + key);
    return values;
}

int cmd_requirements(const RunConfig& rc) {
    const auto cfg = resolve_config(rc);
    const auto report = braggsim::evaluate_requirements(cfg);
    const std::string text = braggsim::format_report(report);

    auto txt = open_out(rc, "requirements.txt");
    txt << meta_header(cfg) << text;

    json record;
    record["meta"] = meta_record(cfg);
    auto& entries = record["entries"] = json::array();
    for (const auto& e : report.entries)
        entries.push_back({{"name", e.name},
                           {"bound", e.bound},
                           {"configured", e.configured},
                           {"pass", e.pass},
                           {"formula", e.formula}});
    record["all_pass"] = report.all_pass();
    auto rec = open_out(rc, "requirements.json");
    rec << record.dump(2) << '\n';

    std::cout << text;
    return report.all_pass() ? 0 : 1;
}

int cmd_table1(const RunConfig& rc) {
    const auto cfg = resolve_config(rc);
    std::vector<braggsim::TableRow> rows;
    if (rc.orders_list.empty() != rc.taus_list.empty())
        throw std::runtime_error("--orders and --taus must be given together");
    if (rc.orders_list.empty()) {
        rows = braggsim::optimal_parameter_table(
            {1, 5, 10, 15, 20, 25}, {0.192, 0.086, 0.105, 0.086, 0.077, 0.072},
            cfg.detuning, rc.w_bec_mm * 1e-3, rc.w_vel_mm * 1e-3, cfg.species);
    } else {
        std::vector<int> orders;
        for (double v : parse_list("--orders", rc.orders_list))
            orders.push_back(static_cast<int>(v));
        rows = braggsim::optimal_parameter_table(
            orders, parse_list("--taus", rc.taus_list), cfg.detuning, rc.w_bec_mm * 1e-3,
            rc.w_vel_mm * 1e-3, cfg.species);
    }

    if (rc.format == "record") {
        json record;
        record["meta"] = meta_record(cfg);
        auto& out_rows = record["rows"] = json::array();
        for (const auto& r : rows)
            out_rows.push_back({{"order", r.order},
                                {"tau", r.tau},
                                {"omega2", r.omega2},
                                {"omega_eff", r.omega_eff},
                                {"intensity", r.intensity},
                                {"power_bec", r.power_bec},
                                {"power_vel", r.power_vel},
                                {"loss", r.loss}});
        auto rec = open_out(rc, "table1.json");
        rec << record.dump(2) << '\n';
    } else {
        auto csv = open_out(rc, "table1.csv");
        csv << meta_header(cfg);
        braggsim::write_table_csv(rows, cfg.species, csv);
    }

    const double wr = braggsim::recoil_frequency(cfg.species);
    using braggsim::textio::format_sig4;
    std::cout << "n      tau/wr^-1  omega2/wr  omega_eff/wr  I/mW_cm2  P_bec/mW  P_vel/mW  loss\n";
    for (const auto& r : rows) {
        std::cout << r.order << "\t" << format_sig4(r.tau * wr) << "\t"
                  << format_sig4(r.omega2 / wr) << "\t" << format_sig4(r.omega_eff / wr)
                  << "\t" << format_sig4(r.intensity / 10.0) << "\t"
                  << format_sig4(r.power_bec * 1e3) << "\t" << format_sig4(r.power_vel * 1e3)
                  << "\t" << format_sig4(r.loss) << '\n';
    }
    return 0;
}

void add_noise(braggsim::FringeScan& scan, double sigma, std::uint64_t seed) {
    std::mt19937_64 eng(seed);
    auto uniform = [&eng] { return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53; };
    for (auto& p : scan.points) {
        const double u1 = uniform(), u2 = uniform();
        const double z = std::sqrt(-2.0 * std::log(u1)) *
                         std::cos(braggsim::consts::two_pi * u2);
        p.p1 = std::clamp(p.p1 + sigma * z, 0.0, 1.0);
        p.p2 = 1.0 - p.p1;
    }
}

json scan_record(const braggsim::FringeScan& scan) {
    json rec;
    rec["scan_kind"] = scan.kind == braggsim::ScanKind::chirp_rate ? "chirp_rate" : "laser_phase";
    rec["order"] = scan.order;
    rec["interrogation_s"] = scan.interrogation_time;
    rec["first_pulse_s"] = scan.first_pulse_time;
    rec["contrast"] = scan.contrast;
    rec["species"] = scan.species_name;
    if (scan.has_g_true) rec["g_true_ms2"] = scan.g_true;
    auto& pts = rec["points"] = json::array();
    for (const auto& p : scan.points) pts.push_back({p.x, p.p1, p.p2});
    return rec;
}

void emit_scan(const RunConfig& rc, const braggsim::ApparatusConfig& cfg,
               const braggsim::FringeScan& scan, const std::string& stem) {
    if (rc.format == "record") {
        json rec;
        rec["meta"] = meta_record(cfg);
        rec["scan"] = scan_record(scan);
        auto f = open_out(rc, stem + ".json");
        f << rec.dump(2) << '\n';
    } else {
        auto f = open_out(rc, stem + ".csv");
        f << meta_header(cfg);
        braggsim::write_scan_csv(scan, f);
    }
}

int cmd_simulate(const RunConfig& rc) {
    auto cfg = resolve_config(rc);
    double contrast = rc.contrast;
    if (rc.thermal) {
        const auto est = braggsim::thermal_contrast(cfg, rc.mc_atoms, rc.seed);
        contrast = est.contrast;
        std::cout << "thermal contrast V = " << braggsim::textio::format_sig4(contrast)
                  << " (pulse efficiencies " << braggsim::textio::format_sig4(est.pulse_efficiencies[0])
                  << ", " << braggsim::textio::format_sig4(est.pulse_efficiencies[1]) << ", "
                  << braggsim::textio::format_sig4(est.pulse_efficiencies[2]) << ")\n";
    }

    if (rc.scan == "phase") {
        auto scan = braggsim::phase_scan(cfg, rc.phase_min, rc.phase_max, rc.points, contrast);
        if (rc.noise > 0.0) add_noise(scan, rc.noise, rc.seed);
        emit_scan(rc, cfg, scan, "fringe_phase");
        const auto fit = braggsim::phase_scan_fit(scan);
        using braggsim::textio::format_sig4;
        std::cout << "fit: offset = " << format_sig4(fit.offset) << " +- "
                  << format_sig4(fit.offset_err) << ", amplitude = "
                  << format_sig4(fit.amplitude) << " +- " << format_sig4(fit.amplitude_err)
                  << ", phase = " << format_sig4(fit.phase) << " +- "
                  << format_sig4(fit.phase_err) << " rad\n"
                  << "fitted contrast = " << format_sig4(2.0 * fit.amplitude) << '\n';
        json rec;
        rec["meta"] = meta_record(cfg);
        rec["fit"] = {{"offset", fit.offset},         {"offset_err", fit.offset_err},
                      {"amplitude", fit.amplitude},   {"amplitude_err", fit.amplitude_err},
                      {"phase", fit.phase},           {"phase_err", fit.phase_err},
                      {"rms_residual", fit.rms_residual}};
        auto f = open_out(rc, "phase_fit.json");
        f << rec.dump(2) << '\n';
        return 0;
    }
    if (rc.scan != "chirp") throw std::runtime_error("--scan must be 'chirp' or 'phase'");

    std::vector<double> t_values;
    for (double ms : rc.t_values_ms) t_values.push_back(1e-3 * ms);
    double lo = rc.alpha_min, hi = rc.alpha_max;
    if (!(hi > lo)) {
        const double alpha0 = braggsim::resonant_chirp_rate(cfg.species, cfg.gravity);
        lo = alpha0 - 800.0;
        hi = alpha0 + 800.0;
    }
    auto scans = braggsim::chirp_scan(cfg, t_values, lo, hi, rc.samples, contrast);
    for (auto& scan : scans) {
        if (rc.noise > 0.0) add_noise(scan, rc.noise, rc.seed);
        std::ostringstream stem;
        stem << "fringe_chirp_T" << braggsim::textio::format_sig4(scan.interrogation_time * 1e3)
             << "ms";
        emit_scan(rc, cfg, scan, stem.str());
    }

    std::vector<double> distinct = t_values;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() >= 2) {
        const auto found = braggsim::find_resonant_chirp(scans);
        const double g = braggsim::gravity_from_chirp(found.alpha0, cfg.species);
        std::cout << "alpha0 = " << braggsim::textio::format_double(found.alpha0)
                  << " Hz/s (residual variance " << braggsim::textio::format_sig4(found.residual_variance)
                  << (found.ambiguous ? ", ambiguous aliases in range" : "") << ")\n"
                  << "g = " << braggsim::textio::format_double(g) << " m/s2\n";
        json rec;
        rec["meta"] = meta_record(cfg);
        rec["alpha0_hz_per_s"] = found.alpha0;
        rec["residual_variance"] = found.residual_variance;
        rec["ambiguous"] = found.ambiguous;
        rec["g_ms2"] = g;
        auto f = open_out(rc, "gravity.json");
        f << rec.dump(2) << '\n';
    }
    return 0;
}

int cmd_sequence(const RunConfig& rc) {
    const auto cfg = resolve_config(rc);
    double omega2 = 0.0;
    if (rc.omega2_recoil > 0.0) {
        omega2 = rc.omega2_recoil * braggsim::recoil_frequency(cfg.species);
    } else {
        const auto window = braggsim::pulse_duration_window(cfg.cloud, cfg.species);
        omega2 = braggsim::two_photon_rabi_for_pi_pulse(cfg.order, window.design_tau(),
                                                        cfg.species);
    }
    const auto schedule = braggsim::build_schedule(cfg, omega2);

    auto csv = open_out(rc, "schedule.csv");
    csv << meta_header(cfg);
    braggsim::export_schedule_csv(schedule, csv);

    json record;
    record["meta"] = meta_record(cfg);
    record["schedule"] = braggsim::schedule_to_record(schedule);
    auto rec = open_out(rc, "schedule.json");
    rec << record.dump(2) << '\n';

    const auto violations = braggsim::validate_schedule(schedule, cfg);
    using braggsim::textio::format_sig4;
    std::cout << "schedule: 3 pulses at centers " << format_sig4(schedule.pulse_centers[0])
              << ", " << format_sig4(schedule.pulse_centers[1]) << ", "
              << format_sig4(schedule.pulse_centers[2]) << " s; detection at "
              << format_sig4(schedule.detection_time) << " s\n"
              << "initial frequency offset = "
              << format_sig4(schedule.events.front().freq_offset_start /
                             braggsim::consts::two_pi)
              << " Hz, chirp slope = "
              << format_sig4(schedule.events.front().chirp_slope / braggsim::consts::two_pi)
              << " Hz/s\n";
    if (violations.empty()) {
        std::cout << "validation: ok\n";
        return 0;
    }
    for (const auto& v : violations) std::cout << "violation: " << v << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"nth-order Bragg atom-gravimeter design and simulation toolkit"};
    app.require_subcommand(1);

    RunConfig rc;
    app.add_option("--config", rc.config_path, "apparatus config file (key = value lines)");
    app.add_option("--species", rc.species_spec, "species config file or 'builtin'");
    app.add_option("--out", rc.out_dir, "output directory");
    app.add_option("--seed", rc.seed, "random seed for stochastic steps");
    app.add_option("--format", rc.format, "output format: csv or record")
        ->check(CLI::IsMember({"csv", "record"}));
    app.add_option("--set", rc.overrides, "override an apparatus key, e.g. --set order=2");

    auto* req = app.add_subcommand("requirements", "evaluate design requirements");
    auto* tab = app.add_subcommand("table1", "regenerate the optimal-parameter table");
    tab->add_option("--orders", rc.orders_list, "comma-separated diffraction orders");
    tab->add_option("--taus", rc.taus_list, "comma-separated pi-pulse durations [1/omega_r]");
    tab->add_option("--w-bec", rc.w_bec_mm, "BEC beam diameter [mm]");
    tab->add_option("--w-vel", rc.w_vel_mm, "velocity-selected beam diameter [mm]");
    auto* sim = app.add_subcommand("simulate", "generate interference fringes and extract g");
    sim->add_option("--scan", rc.scan, "scan variable: chirp or phase")
        ->check(CLI::IsMember({"chirp", "phase"}));
    sim->add_option("--T-ms", rc.t_values_ms, "interrogation times [ms]")->delimiter(',');
    sim->add_option("--alpha-min", rc.alpha_min, "chirp scan start [Hz/s]");
    sim->add_option("--alpha-max", rc.alpha_max, "chirp scan end [Hz/s]");
    sim->add_option("--samples", rc.samples, "points per chirp scan");
    sim->add_option("--points", rc.points, "points in a phase scan");
    sim->add_option("--phase-min", rc.phase_min, "phase scan start [rad]");
    sim->add_option("--phase-max", rc.phase_max, "phase scan end [rad]");
    sim->add_option("--contrast", rc.contrast, "fringe contrast V");
    sim->add_flag("--thermal-contrast", rc.thermal,
                  "estimate V from the longitudinal temperature instead of --contrast");
    sim->add_option("--mc-atoms", rc.mc_atoms, "Monte-Carlo sample count");
    sim->add_option("--noise", rc.noise, "additive Gaussian noise sigma on P1");
    auto* seq = app.add_subcommand("sequence", "build and export the pulse timing program");
    seq->add_option("--omega2-recoil", rc.omega2_recoil,
                    "two-photon Rabi frequency [omega_r]; default solves the design pi pulse");

    for (auto* sub : {req, tab, sim, seq}) sub->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        if (req->parsed()) return cmd_requirements(rc);
        if (tab->parsed()) return cmd_table1(rc);
        if (sim->parsed()) return cmd_simulate(rc);
        if (seq->parsed()) return cmd_sequence(rc);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
