#include "braggsim/ladder.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "braggsim/constants.hpp"
#include "braggsim/textio.hpp"

namespace braggsim {

namespace {

namespace odeint = boost::numeric::odeint;
using state_type = std::vector<std::complex<double>>;

struct LadderRhs {
    double recoil;  // rad/s
    int m_min;
    double omega2_peak;
    EnvelopeKind envelope;
    double env_center;  // s
    double env_sigma;   // s
    const std::function<double(double)>* omega_eff;

    double omega2_at(double t) const {
        if (envelope == EnvelopeKind::square) return omega2_peak;
        const double u = (t - env_center) / env_sigma;
        return omega2_peak * std::exp(-0.5 * u * u);
    }

    void operator()(const state_type& c, state_type& dcdt, double t) const {
        const std::size_t n = c.size();
        dcdt.resize(n);
        const double weff = (*omega_eff)(t);
        const double half_omega2 = 0.5 * omega2_at(t);
        const std::complex<double> mi(0.0, -1.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double m = static_cast<double>(m_min + static_cast<int>(i));
            std::complex<double> acc = (4.0 * m * m * recoil - m * weff) * c[i];
            std::complex<double> neighbors = 0.0;
            if (i > 0) neighbors += c[i - 1];
            if (i + 1 < n) neighbors += c[i + 1];
            dcdt[i] = mi * (acc + half_omega2 * neighbors);
        }
    }
};

void record_sample(LadderTrajectory& traj, const state_type& c, int m_min, double t,
                   double norm0) {
    LadderState s;
    s.m_min = m_min;
    s.amplitudes = c;
    s.time = t;
    double err = std::abs(ladder_norm(s) - norm0);
    if (err > traj.max_norm_error) traj.max_norm_error = err;
    traj.samples.push_back(std::move(s));
}

}  // namespace

LadderState make_ladder_state(int m_min, int m_max, int m_occupied, double time) {
    if (m_max < m_min) throw std::invalid_argument("make_ladder_state: m_max < m_min");
    if (m_occupied < m_min || m_occupied > m_max)
        throw std::invalid_argument("make_ladder_state: occupied state outside ladder");
    LadderState s;
    s.m_min = m_min;
    s.amplitudes.assign(static_cast<std::size_t>(m_max - m_min + 1), {0.0, 0.0});
    s.amplitudes[static_cast<std::size_t>(m_occupied - m_min)] = {1.0, 0.0};
    s.time = time;
    return s;
}

double ladder_norm(const LadderState& s) {
    double n = 0.0;
    for (const auto& a : s.amplitudes) n += std::norm(a);
    return n;
}

double population(const LadderState& s, int m) {
    if (m < s.m_min || m > s.m_max()) return 0.0;
    return std::norm(s.amplitudes[static_cast<std::size_t>(m - s.m_min)]);
}

LadderTrajectory ladder_evolve(const LadderState& initial, const BraggPulse& pulse,
                               const std::function<double(double)>& omega_eff,
                               const AtomSpecies& species, const StepControl& ctl) {
    if (pulse.order < 1) throw std::invalid_argument("ladder_evolve: order must be >= 1");
    if (!(pulse.duration > 0.0)) throw std::invalid_argument("ladder_evolve: duration must be positive");
    if (pulse.two_photon_rabi < 0.0)
        throw std::invalid_argument("ladder_evolve: two_photon_rabi must be >= 0");
    if (pulse.envelope.kind == EnvelopeKind::gaussian && !(pulse.envelope.sigma > 0.0))
        throw std::invalid_argument("ladder_evolve: gaussian envelope needs positive sigma");
    if (initial.amplitudes.empty()) throw std::invalid_argument("ladder_evolve: empty ladder");

    const double t0 = initial.time;
    const double t_end = t0 + pulse.duration;

    LadderRhs rhs;
    rhs.recoil = recoil_frequency(species);
    rhs.m_min = initial.m_min;
    rhs.omega2_peak = pulse.two_photon_rabi;
    rhs.envelope = pulse.envelope.kind;
    rhs.env_center = t0 + 0.5 * pulse.duration;
    rhs.env_sigma = pulse.envelope.sigma;
    rhs.omega_eff = &omega_eff;

    state_type c = initial.amplitudes;
    const double norm0 = ladder_norm(initial);

    LadderTrajectory traj;
    record_sample(traj, c, rhs.m_min, t0, norm0);

    // Fastest phase scale sets the automatic initial step.
    auto make_stepper = [&] {
        return odeint::make_controlled(ctl.abs_tol, ctl.rel_tol,
                                       odeint::runge_kutta_dopri5<state_type>());
    };
    auto stepper = make_stepper();

    auto edge_scale = [&](const state_type& v, int m_min) {
        const int m_hi = m_min + static_cast<int>(v.size()) - 1;
        double wmax = std::max(std::abs(4.0 * m_min * m_min * rhs.recoil),
                               std::abs(4.0 * m_hi * m_hi * rhs.recoil));
        wmax = std::max({wmax, pulse.two_photon_rabi, std::abs(omega_eff(t0)),
                         std::abs(omega_eff(t_end))});
        return wmax;
    };

    double t = t0;
    double dt = ctl.initial_step > 0.0 ? ctl.initial_step
                                       : 0.1 / std::max(edge_scale(c, rhs.m_min), 1.0);
    if (ctl.max_step > 0.0) dt = std::min(dt, ctl.max_step);

    const double dt_floor = pulse.duration * 1e-15;
    double next_sample = ctl.sample_interval > 0.0 ? t0 + ctl.sample_interval : t0;
    long steps = 0;

    while (t < t_end) {
        if (++steps > ctl.max_steps)
            throw std::runtime_error("ladder_evolve: exceeded max_steps = " +
                                     std::to_string(ctl.max_steps));
        double dt_try = std::min(dt, t_end - t);
        if (ctl.max_step > 0.0) dt_try = std::min(dt_try, ctl.max_step);
        double dt_used = dt_try;
        auto result = stepper.try_step(rhs, c, t, dt_used);
        if (result == odeint::fail) {
            ++traj.rejected_steps;
            if (dt_used < dt_floor)
                throw std::runtime_error(
                    "ladder_evolve: step control failed at t = " + textio::format_double(t) +
                    " s, dt = " + textio::format_double(dt_used) + " s after " +
                    std::to_string(traj.accepted_steps) + " accepted steps");
            dt = dt_used;
            continue;
        }
        ++traj.accepted_steps;
        dt = dt_used;

        const double pop_lo = std::norm(c.front());
        const double pop_hi = std::norm(c.back());
        if (ctl.auto_widen && (pop_lo > ctl.widen_threshold || pop_hi > ctl.widen_threshold)) {
            const int m_hi = rhs.m_min + static_cast<int>(c.size()) - 1;
            const bool at_cap = std::max(std::abs(rhs.m_min), std::abs(m_hi)) +
                                    ctl.widen_pad > ctl.max_half_width;
            if (at_cap) {
                if (std::max(pop_lo, pop_hi) > ctl.edge_limit)
                    throw std::runtime_error(
                        "ladder_evolve: edge population " +
                        textio::format_double(std::max(pop_lo, pop_hi)) +
                        " exceeds limit at the ladder cap |m| <= " +
                        std::to_string(ctl.max_half_width));
            } else {
                state_type widened(c.size() + 2 * static_cast<std::size_t>(ctl.widen_pad),
                                   {0.0, 0.0});
                for (std::size_t i = 0; i < c.size(); ++i)
                    widened[i + static_cast<std::size_t>(ctl.widen_pad)] = c[i];
                c = std::move(widened);
                rhs.m_min -= ctl.widen_pad;
                ++traj.widen_events;
                stepper = make_stepper();
            }
        }

        if (ctl.sample_interval > 0.0) {
            if (t >= next_sample || t >= t_end) {
                record_sample(traj, c, rhs.m_min, t, norm0);
                while (next_sample <= t) next_sample += ctl.sample_interval;
            }
        } else {
            record_sample(traj, c, rhs.m_min, t, norm0);
        }
    }

    if (traj.samples.back().time != t) record_sample(traj, c, rhs.m_min, t, norm0);
    return traj;
}

void write_trajectory_csv(const LadderTrajectory& traj, std::ostream& out) {
    out << "t,m,re,im,population\n";
    for (const auto& s : traj.samples) {
        for (std::size_t i = 0; i < s.amplitudes.size(); ++i) {
            const auto& a = s.amplitudes[i];
            out << textio::format_double(s.time) << ','
                << s.m_min + static_cast<int>(i) << ','
                << textio::format_double(a.real()) << ','
                << textio::format_double(a.imag()) << ','
                << textio::format_double(std::norm(a)) << '\n';
        }
    }
}

std::function<double(double)> constant_profile(double omega) {
    return [omega](double) { return omega; };
}

std::function<double(double)> linear_profile(double omega0, double slope, double t0) {
    return [omega0, slope, t0](double t) { return omega0 + slope * (t - t0); };
}

}  // namespace braggsim
