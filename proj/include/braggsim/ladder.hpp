#pragma once

#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

#include "braggsim/dynamics.hpp"
#include "braggsim/species.hpp"

namespace braggsim {

// Amplitudes over the momentum ladder |g, 2 m hbar k>,
// m = m_min .. m_min + amplitudes.size() - 1.
struct LadderState {
    int m_min = 0;
    std::vector<std::complex<double>> amplitudes;
    double time = 0.0;  // s

    int m_max() const { return m_min + static_cast<int>(amplitudes.size()) - 1; }
};

LadderState make_ladder_state(int m_min, int m_max, int m_occupied = 0, double time = 0.0);
double ladder_norm(const LadderState& s);
double population(const LadderState& s, int m);

struct StepControl {
    double abs_tol = 1e-14;
    double rel_tol = 1e-12;
    double initial_step = 0.0;     // 0 = automatic
    double max_step = 0.0;         // 0 = unlimited
    double sample_interval = 0.0;  // 0 = record every accepted step
    bool auto_widen = true;
    double widen_threshold = 1e-10;  // edge population triggering a widen
    double edge_limit = 1e-6;        // hard edge-population bound
    int widen_pad = 2;               // states added per side
    int max_half_width = 512;        // cap on max(|m_min|, |m_max|)
    long max_steps = 20'000'000;
};

struct LadderTrajectory {
    std::vector<LadderState> samples;  // samples.front() = initial, .back() = final
    long accepted_steps = 0;
    long rejected_steps = 0;
    int widen_events = 0;
    double max_norm_error = 0.0;  // max |norm(t) - norm(0)| over samples

    const LadderState& final_state() const { return samples.back(); }
};

// Integrates i dc_m/dt = [4 m^2 w_r - m w_eff(t)] c_m
//                        + (omega2(t)/2) (c_{m-1} + c_{m+1})
// across the pulse, in the rotating frame of the moving lattice.
// omega_eff is the beam frequency-difference profile as a function of
// absolute time; the pulse envelope modulates omega2(t). Throws
// std::runtime_error on step-control failure or when the ladder hits
// the widening cap with an edge population above ctl.edge_limit.
LadderTrajectory ladder_evolve(const LadderState& initial, const BraggPulse& pulse,
                               const std::function<double(double)>& omega_eff,
                               const AtomSpecies& species, const StepControl& ctl = {});

// CSV with columns t, m, re(c_m), im(c_m), |c_m|^2 for every sample.
void write_trajectory_csv(const LadderTrajectory& traj, std::ostream& out);

std::function<double(double)> constant_profile(double omega);
std::function<double(double)> linear_profile(double omega0, double slope, double t0 = 0.0);

}  // namespace braggsim
