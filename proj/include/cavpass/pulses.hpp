// pulses.hpp — Gaussian pulse envelopes, counterintuitive step structure, and the
// built-in SWAP (8 / 7 pulse) and CNOT (11 pulse) schedules.
#pragma once

#include "cavpass/hilbert.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cavpass {

// Omega(t) = omega_max * exp(-((t - t_center)/t_p)^2)
struct PulseEnvelope {
    double omega_max{0.0};
    double t_center{0.0};
    double t_p{1.0};

    friend bool operator==(const PulseEnvelope&, const PulseEnvelope&) = default;
};

double envelope_value(const PulseEnvelope& env, double t);

// Laser-driven transitions. 0-e and a-e implement the cavity-mediated exchange
// steps; 1-u and a-u appear only in the CNOT shelving steps.
enum class Transition { g0_e, ga_e, g1_u, ga_u };

AtomLevel transition_lower(Transition t);
AtomLevel transition_upper(Transition t);
bool transition_uses_u(Transition t);
std::string transition_name(Transition t);  // "0-e", "a-e", "1-u", "a-u"
Transition transition_from_name(std::string_view name);

// One laser pulse: constant optical phase, one addressed atom and transition.
// A merged pulse (the swap7 / cnot11 single-pulse replacement for two identical
// adjacent pulses) carries two lobes; its value is the pointwise maximum, which
// preserves the counterintuitive ordering at both step boundaries.
struct Pulse {
    std::vector<PulseEnvelope> lobes;
    int atom{1};  // 1 or 2
    Transition transition{Transition::g0_e};
    double phase{0.0};
    std::string label;

    double value(double t) const;
    double peak_omega() const;
    double first_peak() const;
    double last_peak() const;
    double min_t_p() const;

    friend bool operator==(const Pulse&, const Pulse&) = default;
};

// Per-step role assignment: L(i) is the ground state of atom i addressed by a
// laser during the step, N(i) the non-addressed one ({L,N} = {|0>,|a>}).
struct StepRoles {
    AtomLevel laser1{AtomLevel::ga};
    AtomLevel laser2{AtomLevel::g0};

    AtomLevel spectator1() const;
    AtomLevel spectator2() const;

    friend bool operator==(const StepRoles&, const StepRoles&) = default;
};

enum class StepKind { cavity_exchange, shelving };

// Ordered (stokes-like, pump-like) pulse pair.  The stokes pulse couples the
// step's target product state and peaks first.
struct Step {
    StepKind kind{StepKind::cavity_exchange};
    int stokes_pulse{0};
    int pump_pulse{0};
    double stokes_peak{0.0};
    double pump_peak{0.0};
    std::optional<StepRoles> roles;  // cavity_exchange steps only
    std::string label;

    friend bool operator==(const Step&, const Step&) = default;
};

struct Schedule {
    std::vector<Pulse> pulses;
    std::vector<Step> steps;
    double g1{0.0};  // cavity couplings, time independent
    double g2{0.0};
    double t_start{0.0};
    double t_end{0.0};
    std::string protocol{"custom"};

    bool uses_u() const;
    double max_omega() const;
    double min_t_p() const;
    // Total instantaneous drive on (atom, transition): overlapping pulses on the
    // same transition add.
    double drive(int atom, Transition transition, double t) const;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

enum class Protocol { swap8, swap7, cnot11 };

Protocol protocol_from_name(std::string_view name);  // throws on unknown name
std::string protocol_name(Protocol p);

// All times are absolute; with t_p = 1 everything is in pulse-width units.
struct ScheduleParams {
    double omega_max{10.0};
    double t_p{1.0};
    double intra_delay{1.2};      // delay between the two pulses of a step
    double inter_step_gap{6.0};   // spacing between step centers
    double g1{25.0};
    double g2{25.0};
    std::vector<double> phases;   // per pulse, in build order; empty = all zero
    double window_margin{4.5};    // window extends this many t_p beyond outer peaks
};

Schedule build_schedule(Protocol protocol, const ScheduleParams& params = {});

struct StepDiagnostics {
    std::string label;
    bool counterintuitive_ok{true};
    double stokes_area{0.0};      // peak Rabi frequency x pulse width
    double pump_area{0.0};
    double overlap_to_next{0.0};  // normalized Gaussian overlap with next step's first pulse
};

struct ScheduleDiagnostics {
    std::vector<StepDiagnostics> steps;
    double min_pulse_area{0.0};
    double min_g{0.0};
    double max_omega{0.0};
    std::vector<std::string> flags;

    bool ok() const { return flags.empty(); }
};

// Flags raised: pulse area Omega_max*Tp < 5, cavity coupling g <= Omega_max,
// pump peaking at or before its stokes pulse.
ScheduleDiagnostics schedule_diagnostics(const Schedule& schedule);

}  // namespace cavpass
