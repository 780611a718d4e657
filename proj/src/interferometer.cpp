#include "braggsim/interferometer.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "braggsim/constants.hpp"
#include "braggsim/dynamics.hpp"
#include "braggsim/textio.hpp"

namespace braggsim {

namespace {

// mt19937_64 with explicit bit-to-double conversion so streams are
// identical across standard library implementations.
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(std::uint64_t seed) : eng(seed) {}

    double uniform() {  // (0, 1]
        return static_cast<double>((eng() >> 11) + 1) * 0x1.0p-53;
    }

    double normal() {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(consts::two_pi * u2);
    }
};

std::string scan_kind_name(ScanKind k) {
    return k == ScanKind::chirp_rate ? "chirp_rate" : "laser_phase";
}

ScanKind scan_kind_from_name(const std::string& name) {
    if (name == "chirp_rate") return ScanKind::chirp_rate;
    if (name == "laser_phase") return ScanKind::laser_phase;
    throw std::runtime_error("unknown scan kind '" + name + "'");
}

}  // namespace

double interferometer_phase(int n, const AtomSpecies& s, double g, double alpha,
                            double T, double phi_laser) {
    if (n < 1) throw std::invalid_argument("interferometer_phase: order must be >= 1");
    if (!(T > 0.0)) throw std::invalid_argument("interferometer_phase: T must be positive");
    const double t2 = T * T;
    return n * (2.0 * s.wavenumber * g * t2 - consts::two_pi * alpha * t2) + phi_laser;
}

std::pair<double, double> output_populations(double phase, double contrast) {
    if (!(contrast >= 0.0 && contrast <= 1.0))
        throw std::domain_error("output_populations: contrast must lie in [0,1]");
    const double p1 = 0.5 * (1.0 + contrast * std::cos(phase));
    return {p1, 1.0 - p1};
}

double gravity_from_chirp(double alpha0, const AtomSpecies& s) {
    if (!(alpha0 > 0.0)) throw std::invalid_argument("gravity_from_chirp: alpha0 must be positive");
    return consts::pi * alpha0 / s.wavenumber;
}

std::vector<FringeScan> chirp_scan(const ApparatusConfig& cfg,
                                   const std::vector<double>& interrogation_times,
                                   double alpha_lo, double alpha_hi, int samples,
                                   double contrast) {
    if (interrogation_times.empty())
        throw std::invalid_argument("chirp_scan: need at least one interrogation time");
    if (!(alpha_hi > alpha_lo)) throw std::invalid_argument("chirp_scan: empty chirp range");
    if (samples < 2) throw std::invalid_argument("chirp_scan: need at least 2 samples");

    std::vector<FringeScan> scans;
    scans.reserve(interrogation_times.size());
    for (double T : interrogation_times) {
        if (!(T > 0.0)) throw std::invalid_argument("chirp_scan: interrogation times must be positive");
        FringeScan scan;
        scan.kind = ScanKind::chirp_rate;
        scan.order = cfg.order;
        scan.interrogation_time = T;
        scan.first_pulse_time = cfg.first_pulse_time;
        scan.contrast = contrast;
        scan.species_name = cfg.species.name;
        scan.g_true = cfg.gravity;
        scan.has_g_true = true;
        scan.points.reserve(static_cast<std::size_t>(samples));
        const double step = (alpha_hi - alpha_lo) / (samples - 1);
        for (int i = 0; i < samples; ++i) {
            const double alpha = alpha_lo + step * i;
            const double phase =
                interferometer_phase(cfg.order, cfg.species, cfg.gravity, alpha, T, 0.0);
            auto [p1, p2] = output_populations(phase, contrast);
            scan.points.push_back({alpha, p1, p2});
        }
        scans.push_back(std::move(scan));
    }
    return scans;
}

FringeScan phase_scan(const ApparatusConfig& cfg, double phase_lo, double phase_hi,
                      int samples, double contrast, double alpha) {
    if (!(phase_hi > phase_lo)) throw std::invalid_argument("phase_scan: empty phase range");
    if (samples < 2) throw std::invalid_argument("phase_scan: need at least 2 samples");
    if (alpha < 0.0) alpha = resonant_chirp_rate(cfg.species, cfg.gravity);

    FringeScan scan;
    scan.kind = ScanKind::laser_phase;
    scan.order = cfg.order;
    scan.interrogation_time = cfg.interrogation_time;
    scan.first_pulse_time = cfg.first_pulse_time;
    scan.contrast = contrast;
    scan.species_name = cfg.species.name;
    scan.g_true = cfg.gravity;
    scan.has_g_true = true;
    scan.points.reserve(static_cast<std::size_t>(samples));
    const double step = (phase_hi - phase_lo) / (samples - 1);
    for (int i = 0; i < samples; ++i) {
        const double phi = phase_lo + step * i;
        const double phase = interferometer_phase(cfg.order, cfg.species, cfg.gravity, alpha,
                                                  cfg.interrogation_time, phi);
        auto [p1, p2] = output_populations(phase, contrast);
        scan.points.push_back({phi, p1, p2});
    }
    return scan;
}

namespace {

std::vector<bool> near_extremum_mask(const FringeScan& scan) {
    const auto& pts = scan.points;
    const std::size_t n = pts.size();
    std::vector<bool> extremum(n, false);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double dl = pts[i].p1 - pts[i - 1].p1;
        const double dr = pts[i + 1].p1 - pts[i].p1;
        if (dl * dr <= 0.0) extremum[i] = true;
    }
    std::vector<bool> mask(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (!extremum[i]) continue;
        mask[i] = true;
        if (i > 0) mask[i - 1] = true;
        if (i + 1 < n) mask[i + 1] = true;
    }
    return mask;
}

// Quadratic through three consecutive points of a scan, evaluated at x.
double quadratic_p1(const FringeScan& scan, std::size_t center, double x) {
    const auto& p = scan.points;
    const double x0 = p[center - 1].x, x1 = p[center].x, x2 = p[center + 1].x;
    const double y0 = p[center - 1].p1, y1 = p[center].p1, y2 = p[center + 1].p1;
    const double l0 = (x - x1) * (x - x2) / ((x0 - x1) * (x0 - x2));
    const double l1 = (x - x0) * (x - x2) / ((x1 - x0) * (x1 - x2));
    const double l2 = (x - x0) * (x - x1) / ((x2 - x0) * (x2 - x1));
    return y0 * l0 + y1 * l1 + y2 * l2;
}

double variance_at(const std::vector<FringeScan>& scans, std::size_t center, double x) {
    double mean = 0.0;
    for (const auto& s : scans) mean += quadratic_p1(s, center, x);
    mean /= static_cast<double>(scans.size());
    double var = 0.0;
    for (const auto& s : scans) {
        const double d = quadratic_p1(s, center, x) - mean;
        var += d * d;
    }
    return var / static_cast<double>(scans.size());
}

double grid_variance(const std::vector<FringeScan>& scans, std::size_t i) {
    double mean = 0.0;
    for (const auto& s : scans) mean += s.points[i].p1;
    mean /= static_cast<double>(scans.size());
    double var = 0.0;
    for (const auto& s : scans) {
        const double d = s.points[i].p1 - mean;
        var += d * d;
    }
    return var / static_cast<double>(scans.size());
}

}  // namespace

ChirpResult find_resonant_chirp(const std::vector<FringeScan>& scans) {
    if (scans.size() < 2)
        throw std::invalid_argument("find_resonant_chirp: need at least 2 scans");
    std::vector<double> times;
    for (const auto& s : scans) {
        if (s.kind != ScanKind::chirp_rate)
            throw std::invalid_argument("find_resonant_chirp: scans must be chirp-rate scans");
        if (s.points.size() < 3)
            throw std::invalid_argument("find_resonant_chirp: scans need at least 3 points");
        times.push_back(s.interrogation_time);
    }
    std::sort(times.begin(), times.end());
    if (std::adjacent_find(times.begin(), times.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }) !=
        times.end())
        throw std::invalid_argument(
            "find_resonant_chirp: degenerate input, interrogation times must be distinct "
            "(equal T makes the crossing period-ambiguous)");

    const std::size_t npts = scans[0].points.size();
    for (const auto& s : scans) {
        if (s.points.size() != npts)
            throw std::invalid_argument("find_resonant_chirp: scans must share one chirp grid");
        for (std::size_t i = 0; i < npts; ++i) {
            const double a = scans[0].points[i].x, b = s.points[i].x;
            if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a)))
                throw std::invalid_argument("find_resonant_chirp: scans must share one chirp grid");
        }
    }

    std::vector<bool> common(npts, true);
    for (const auto& s : scans) {
        const auto mask = near_extremum_mask(s);
        for (std::size_t i = 0; i < npts; ++i) common[i] = common[i] && mask[i];
    }

    std::vector<std::size_t> candidates;
    for (std::size_t i = 1; i + 1 < npts; ++i)
        if (common[i]) candidates.push_back(i);
    if (candidates.empty()) {
        std::ostringstream msg;
        msg << "find_resonant_chirp: no common extremum in the scanned range;";
        for (const auto& s : scans) {
            msg << " T=" << textio::format_sig4(s.interrogation_time) << " s extrema at";
            const auto mask = near_extremum_mask(s);
            int listed = 0;
            for (std::size_t i = 1; i + 1 < npts && listed < 4; ++i) {
                const double dl = s.points[i].p1 - s.points[i - 1].p1;
                const double dr = s.points[i + 1].p1 - s.points[i].p1;
                if (dl * dr <= 0.0) {
                    msg << ' ' << textio::format_sig4(s.points[i].x);
                    ++listed;
                }
            }
            msg << ';';
        }
        throw std::runtime_error(msg.str());
    }

    // Keep one candidate per contiguous run (the run's lowest-variance index).
    std::vector<std::size_t> pruned;
    for (std::size_t j = 0; j < candidates.size();) {
        std::size_t k = j;
        std::size_t best = candidates[j];
        while (k + 1 < candidates.size() && candidates[k + 1] == candidates[k] + 1) {
            ++k;
            if (grid_variance(scans, candidates[k]) < grid_variance(scans, best))
                best = candidates[k];
        }
        pruned.push_back(best);
        j = k + 1;
    }

    std::sort(pruned.begin(), pruned.end(), [&](std::size_t a, std::size_t b) {
        return grid_variance(scans, a) < grid_variance(scans, b);
    });

    ChirpResult result;
    const std::size_t center = pruned[0];

    double lo = scans[0].points[center - 1].x;
    double hi = scans[0].points[center + 1].x;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = variance_at(scans, center, c);
    double fd = variance_at(scans, center, d);
    for (int it = 0; it < 120 && (hi - lo) > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = variance_at(scans, center, c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = variance_at(scans, center, d);
        }
    }
    result.alpha0 = 0.5 * (lo + hi);
    result.residual_variance = variance_at(scans, center, result.alpha0);

    for (std::size_t idx : pruned) result.candidates.push_back(scans[0].points[idx].x);
    if (pruned.size() > 1) {
        const double best = grid_variance(scans, pruned[0]);
        const double second = grid_variance(scans, pruned[1]);
        result.ambiguous = second <= std::max(10.0 * best, 1e-12);
    }
    return result;
}

SinusoidFit phase_scan_fit(const FringeScan& scan) {
    const auto& pts = scan.points;
    if (pts.size() < 5)
        throw std::invalid_argument("phase_scan_fit: need at least 5 points");
    auto [mn, mx] = std::minmax_element(pts.begin(), pts.end(),
                                        [](const FringePoint& a, const FringePoint& b) {
                                            return a.x < b.x;
                                        });
    if (mx->x - mn->x < consts::two_pi * (1.0 - 1e-9))
        throw std::invalid_argument("phase_scan_fit: points must span at least one period");

    const auto n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd design(n, 3);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& p = pts[static_cast<std::size_t>(i)];
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(p.x);
        design(i, 2) = std::sin(p.x);
        y(i) = p.p1;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    if (qr.rank() < 3) {
        std::ostringstream msg;
        msg << "phase_scan_fit: singular design matrix (rank " << qr.rank() << ")";
        throw std::runtime_error(msg.str());
    }
    const Eigen::Vector3d beta = qr.solve(y);
    const Eigen::VectorXd residuals = y - design * beta;
    const double ssr = residuals.squaredNorm();
    const double sigma2 = ssr / static_cast<double>(n - 3);
    const Eigen::Matrix3d cov =
        sigma2 * (design.transpose() * design).inverse();

    const double a = beta(0), c = beta(1), s = beta(2);
    SinusoidFit fit;
    fit.offset = a;
    fit.amplitude = std::hypot(c, s);
    fit.phase = std::atan2(-s, c);
    fit.rms_residual = std::sqrt(ssr / static_cast<double>(n));
    fit.offset_err = std::sqrt(std::max(0.0, cov(0, 0)));
    const double b2 = fit.amplitude * fit.amplitude;
    if (b2 > 0.0) {
        const double var_b =
            (c * c * cov(1, 1) + s * s * cov(2, 2) + 2.0 * c * s * cov(1, 2)) / b2;
        const double var_phi =
            (s * s * cov(1, 1) + c * c * cov(2, 2) - 2.0 * c * s * cov(1, 2)) / (b2 * b2);
        fit.amplitude_err = std::sqrt(std::max(0.0, var_b));
        fit.phase_err = std::sqrt(std::max(0.0, var_phi));
    }
    return fit;
}

ContrastEstimate thermal_contrast(const ApparatusConfig& cfg, int n_atoms,
                                  std::uint64_t seed) {
    if (n_atoms < 1) throw std::invalid_argument("thermal_contrast: need at least 1 atom");
    validate(cfg.species);
    validate(cfg.cloud);

    const PulseWindow window = pulse_duration_window(cfg.cloud, cfg.species);
    const double tau_pi = window.design_tau();
    const double tau_half = 0.5 * tau_pi;
    const double omega = consts::pi / tau_pi;
    const double sigma_v =
        std::sqrt(consts::k_boltzmann * cfg.cloud.longitudinal_temperature / cfg.species.mass);

    Rng rng(seed);
    double sum_product = 0.0;
    double sum_e1 = 0.0, sum_e2 = 0.0, sum_e3 = 0.0;
    for (int i = 0; i < n_atoms; ++i) {
        const double v = sigma_v * rng.normal();
        const double delta = 2.0 * cfg.species.wavenumber * v;
        const double p_half = off_resonant_transfer(omega, delta, tau_half);
        const double p_pi = off_resonant_transfer(omega, delta, tau_pi);
        const double e1 = p_half / 0.5;
        const double e2 = p_pi;
        const double e3 = e1;
        sum_e1 += e1;
        sum_e2 += e2;
        sum_e3 += e3;
        sum_product += e1 * e2 * e3;
    }

    ContrastEstimate est;
    const double inv = 1.0 / static_cast<double>(n_atoms);
    est.contrast = sum_product * inv;
    est.pulse_efficiencies = {sum_e1 * inv, sum_e2 * inv, sum_e3 * inv};
    est.design_tau = tau_pi;
    est.seed = seed;
    est.samples = n_atoms;
    return est;
}

void write_scan_csv(const FringeScan& scan, std::ostream& out) {
    out << "# scan_kind " << scan_kind_name(scan.kind) << '\n'
        << "# order " << scan.order << '\n'
        << "# interrogation_s " << textio::format_double(scan.interrogation_time) << '\n'
        << "# first_pulse_s " << textio::format_double(scan.first_pulse_time) << '\n'
        << "# contrast " << textio::format_double(scan.contrast) << '\n'
        << "# species " << scan.species_name << '\n';
    if (scan.has_g_true)
        out << "# g_true_ms2 " << textio::format_double(scan.g_true) << '\n';
    out << "x,P1,P2\n";
    for (const auto& p : scan.points)
        out << textio::format_double(p.x) << ',' << textio::format_double(p.p1) << ','
            << textio::format_double(p.p2) << '\n';
}

FringeScan read_scan_csv(std::istream& in) {
    FringeScan scan;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string key, value;
            meta >> key;
            std::getline(meta, value);
            const auto start = value.find_first_not_of(" \t");
            value = start == std::string::npos ? "" : value.substr(start);
            if (key == "scan_kind") scan.kind = scan_kind_from_name(value);
            else if (key == "order") scan.order = static_cast<int>(textio::to_long(key, value));
            else if (key == "interrogation_s") scan.interrogation_time = textio::to_double(key, value);
            else if (key == "first_pulse_s") scan.first_pulse_time = textio::to_double(key, value);
            else if (key == "contrast") scan.contrast = textio::to_double(key, value);
            else if (key == "species") scan.species_name = value;
            else if (key == "g_true_ms2") {
                scan.g_true = textio::to_double(key, value);
                scan.has_g_true = true;
            }
            continue;
        }
        if (!header_seen) {
            if (line != "x,P1,P2")
                throw std::runtime_error("fringe CSV: expected header 'x,P1,P2', got '" + line + "'");
            header_seen = true;
            continue;
        }
        std::istringstream row(line);
        std::string field;
        FringePoint p;
        if (!std::getline(row, field, ',')) throw std::runtime_error("fringe CSV: bad row");
        p.x = textio::to_double("x", field);
        if (!std::getline(row, field, ',')) throw std::runtime_error("fringe CSV: bad row");
        p.p1 = textio::to_double("P1", field);
        if (!std::getline(row, field, ',')) throw std::runtime_error("fringe CSV: bad row");
        p.p2 = textio::to_double("P2", field);
        scan.points.push_back(p);
    }
    if (!header_seen) throw std::runtime_error("fringe CSV: missing header");
    return scan;
}

}  // namespace braggsim
