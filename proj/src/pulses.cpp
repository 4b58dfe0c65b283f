#include "cavpass/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cavpass {

double envelope_value(const PulseEnvelope& env, double t)
{
    double x = (t - env.t_center) / env.t_p;
    return env.omega_max * std::exp(-x * x);
}

AtomLevel transition_lower(Transition t)
{
    switch (t) {
    case Transition::g0_e: return AtomLevel::g0;
    case Transition::ga_e: return AtomLevel::ga;
    case Transition::g1_u: return AtomLevel::g1;
    case Transition::ga_u: return AtomLevel::ga;
    }
    throw std::invalid_argument("transition_lower: invalid Transition");
}

AtomLevel transition_upper(Transition t)
{
    return (t == Transition::g0_e || t == Transition::ga_e) ? AtomLevel::e : AtomLevel::u;
}

bool transition_uses_u(Transition t) { return transition_upper(t) == AtomLevel::u; }

std::string transition_name(Transition t)
{
    switch (t) {
    case Transition::g0_e: return "0-e";
    case Transition::ga_e: return "a-e";
    case Transition::g1_u: return "1-u";
    case Transition::ga_u: return "a-u";
    }
    throw std::invalid_argument("transition_name: invalid Transition");
}

Transition transition_from_name(std::string_view name)
{
    if (name == "0-e") return Transition::g0_e;
    if (name == "a-e") return Transition::ga_e;
    if (name == "1-u") return Transition::g1_u;
    if (name == "a-u") return Transition::ga_u;
    throw std::invalid_argument("transition_from_name: unknown transition \"" +
                                std::string(name) + "\"");
}

double Pulse::value(double t) const
{
    double v = 0.0;
    for (const auto& lobe : lobes) v = std::max(v, envelope_value(lobe, t));
    return v;
}

double Pulse::peak_omega() const
{
    double v = 0.0;
    for (const auto& lobe : lobes) v = std::max(v, lobe.omega_max);
    return v;
}

double Pulse::first_peak() const
{
    double t = lobes.front().t_center;
    for (const auto& lobe : lobes) t = std::min(t, lobe.t_center);
    return t;
}

double Pulse::last_peak() const
{
    double t = lobes.front().t_center;
    for (const auto& lobe : lobes) t = std::max(t, lobe.t_center);
    return t;
}

double Pulse::min_t_p() const
{
    double tp = lobes.front().t_p;
    for (const auto& lobe : lobes) tp = std::min(tp, lobe.t_p);
    return tp;
}

AtomLevel StepRoles::spectator1() const
{
    return laser1 == AtomLevel::g0 ? AtomLevel::ga : AtomLevel::g0;
}

AtomLevel StepRoles::spectator2() const
{
    return laser2 == AtomLevel::g0 ? AtomLevel::ga : AtomLevel::g0;
}

bool Schedule::uses_u() const
{
    return std::any_of(pulses.begin(), pulses.end(),
                       [](const Pulse& p) { return transition_uses_u(p.transition); });
}

double Schedule::max_omega() const
{
    double v = 0.0;
    for (const auto& p : pulses) v = std::max(v, p.peak_omega());
    return v;
}

double Schedule::min_t_p() const
{
    double tp = 0.0;
    for (const auto& p : pulses) tp = (tp == 0.0) ? p.min_t_p() : std::min(tp, p.min_t_p());
    return tp > 0.0 ? tp : 1.0;
}

double Schedule::drive(int atom, Transition transition, double t) const
{
    double v = 0.0;
    for (const auto& p : pulses)
        if (p.atom == atom && p.transition == transition) v += p.value(t);
    return v;
}

Protocol protocol_from_name(std::string_view name)
{
    if (name == "swap8") return Protocol::swap8;
    if (name == "swap7") return Protocol::swap7;
    if (name == "cnot11") return Protocol::cnot11;
    throw std::invalid_argument("unknown protocol \"" + std::string(name) +
                                "\" (expected swap8, swap7 or cnot11)");
}

std::string protocol_name(Protocol p)
{
    switch (p) {
    case Protocol::swap8: return "swap8";
    case Protocol::swap7: return "swap7";
    case Protocol::cnot11: return "cnot11";
    }
    throw std::invalid_argument("protocol_name: invalid Protocol");
}

namespace {

std::string short_name(Transition t, int atom)
{
    std::string base;
    switch (t) {
    case Transition::g0_e: base = "O0"; break;
    case Transition::ga_e: base = "Oa"; break;
    case Transition::g1_u: base = "O1u"; break;
    case Transition::ga_u: base = "Oau"; break;
    }
    return base + "(" + std::to_string(atom) + ")";
}

void validate_params(const ScheduleParams& p)
{
    if (p.omega_max < 0.0)
        throw std::invalid_argument("build_schedule: omega_max must be >= 0");
    if (p.t_p <= 0.0) throw std::invalid_argument("build_schedule: t_p must be > 0");
    if (p.intra_delay <= 0.0)
        throw std::invalid_argument("build_schedule: intra_delay must be > 0");
    if (p.inter_step_gap <= 0.0)
        throw std::invalid_argument("build_schedule: inter_step_gap must be > 0");
    if (p.g1 < 0.0 || p.g2 < 0.0)
        throw std::invalid_argument("build_schedule: cavity couplings must be >= 0");
    if (p.window_margin <= 0.0)
        throw std::invalid_argument("build_schedule: window_margin must be > 0");
}

struct PulseSpec {
    Transition transition;
    int atom;
};

struct StepSpec {
    StepKind kind;
    PulseSpec stokes, pump;
    std::optional<StepRoles> roles;
    std::string label;
};

// Assemble pulses and steps from step specs; merge_pairs lists (step_index,
// step_index+1) junctions whose trailing pump / leading stokes are one pulse.
Schedule realize(const std::vector<StepSpec>& specs, const ScheduleParams& p,
                 const std::vector<int>& merge_at, const std::string& name)
{
    Schedule s;
    s.g1 = p.g1;
    s.g2 = p.g2;
    s.protocol = name;

    auto center = [&](size_t k) { return static_cast<double>(k) * p.inter_step_gap; };
    double half = 0.5 * p.intra_delay;

    std::vector<int> stokes_idx(specs.size(), -1), pump_idx(specs.size(), -1);
    for (size_t k = 0; k < specs.size(); ++k) {
        const auto& spec = specs[k];
        bool merged_prev =
            k > 0 && std::find(merge_at.begin(), merge_at.end(), static_cast<int>(k) - 1) !=
                         merge_at.end();
        if (merged_prev) {
            // leading stokes of this step is the previous step's pump pulse
            int idx = pump_idx[k - 1];
            s.pulses[static_cast<size_t>(idx)].lobes.push_back(
                {p.omega_max, center(k) - half, p.t_p});
            s.pulses[static_cast<size_t>(idx)].label += "+" + spec.label;
            stokes_idx[k] = idx;
        } else {
            Pulse stokes;
            stokes.lobes = {{p.omega_max, center(k) - half, p.t_p}};
            stokes.atom = spec.stokes.atom;
            stokes.transition = spec.stokes.transition;
            stokes.label = short_name(spec.stokes.transition, spec.stokes.atom) + ":" + spec.label;
            stokes_idx[k] = static_cast<int>(s.pulses.size());
            s.pulses.push_back(std::move(stokes));
        }
        Pulse pump;
        pump.lobes = {{p.omega_max, center(k) + half, p.t_p}};
        pump.atom = spec.pump.atom;
        pump.transition = spec.pump.transition;
        pump.label = short_name(spec.pump.transition, spec.pump.atom) + ":" + spec.label;
        pump_idx[k] = static_cast<int>(s.pulses.size());
        s.pulses.push_back(std::move(pump));
    }

    for (size_t k = 0; k < specs.size(); ++k) {
        Step step;
        step.kind = specs[k].kind;
        step.stokes_pulse = stokes_idx[k];
        step.pump_pulse = pump_idx[k];
        step.stokes_peak = center(k) - half;
        step.pump_peak = center(k) + half;
        step.roles = specs[k].roles;
        step.label = specs[k].label;
        s.steps.push_back(step);
    }

    if (!p.phases.empty()) {
        if (p.phases.size() != s.pulses.size())
            throw std::invalid_argument(
                "build_schedule: phases has " + std::to_string(p.phases.size()) +
                " entries but the " + name + " schedule has " +
                std::to_string(s.pulses.size()) + " pulses");
        for (size_t k = 0; k < s.pulses.size(); ++k) s.pulses[k].phase = p.phases[k];
    }

    s.t_start = s.steps.front().stokes_peak - p.window_margin * p.t_p;
    s.t_end = s.steps.back().pump_peak + p.window_margin * p.t_p;
    return s;
}

std::vector<StepSpec> swap_steps()
{
    using T = Transition;
    // Step n transfers its source through the cavity-mediated dark state; the
    // stokes pulse addresses the target's atom, the pump the source's.
    return {
        {StepKind::cavity_exchange, {T::ga_e, 1}, {T::g0_e, 2},
         StepRoles{AtomLevel::ga, AtomLevel::g0}, "1"},  // |10>|0> -> |a1>|0>
        {StepKind::cavity_exchange, {T::g0_e, 2}, {T::g0_e, 1},
         StepRoles{AtomLevel::g0, AtomLevel::g0}, "2"},  // |01>|0> -> |10>|0>
        {StepKind::cavity_exchange, {T::ga_e, 2}, {T::ga_e, 1},
         StepRoles{AtomLevel::ga, AtomLevel::ga}, "3"},  // |a1>|0> -> |1a>|0>
        {StepKind::cavity_exchange, {T::g0_e, 1}, {T::ga_e, 2},
         StepRoles{AtomLevel::g0, AtomLevel::ga}, "4"},  // |1a>|0> -> |01>|0>
    };
}

std::vector<StepSpec> cnot_steps()
{
    using T = Transition;
    return {
        {StepKind::shelving, {T::ga_u, 2}, {T::g1_u, 2}, std::nullopt, "A"},  // |1>_2 -> |a>_2
        {StepKind::cavity_exchange, {T::ga_e, 1}, {T::ga_e, 2},
         StepRoles{AtomLevel::ga, AtomLevel::ga}, "B"},  // |1a>|0> -> |a1>|0>
        {StepKind::cavity_exchange, {T::g0_e, 1}, {T::g0_e, 2},
         StepRoles{AtomLevel::g0, AtomLevel::g0}, "C"},  // |10>|0> -> |01>|0>
        {StepKind::cavity_exchange, {T::g0_e, 2}, {T::ga_e, 1},
         StepRoles{AtomLevel::ga, AtomLevel::g0}, "D"},  // |a1>|0> -> |10>|0>
        {StepKind::cavity_exchange, {T::ga_e, 2}, {T::g0_e, 1},
         StepRoles{AtomLevel::g0, AtomLevel::ga}, "E"},  // |01>|0> -> |1a>|0>
        {StepKind::shelving, {T::g1_u, 2}, {T::ga_u, 2}, std::nullopt, "F"},  // |a>_2 -> |1>_2
    };
}

}  // namespace

Schedule build_schedule(Protocol protocol, const ScheduleParams& params)
{
    validate_params(params);
    switch (protocol) {
    case Protocol::swap8:
        return realize(swap_steps(), params, {}, "swap8");
    case Protocol::swap7:
        // the trailing O0(2) of step 1 and the leading O0(2) of step 2 are one pulse
        return realize(swap_steps(), params, {0}, "swap7");
    case Protocol::cnot11:
        // the C/D junction shares its O0(2) pulse: 12 - 1 = 11 pulses
        return realize(cnot_steps(), params, {2}, "cnot11");
    }
    throw std::invalid_argument("build_schedule: invalid protocol");
}

ScheduleDiagnostics schedule_diagnostics(const Schedule& schedule)
{
    ScheduleDiagnostics d;
    d.max_omega = schedule.max_omega();
    d.min_g = std::min(schedule.g1, schedule.g2);
    d.min_pulse_area = 0.0;

    for (size_t k = 0; k < schedule.steps.size(); ++k) {
        const Step& step = schedule.steps[k];
        const Pulse& stokes = schedule.pulses[static_cast<size_t>(step.stokes_pulse)];
        const Pulse& pump = schedule.pulses[static_cast<size_t>(step.pump_pulse)];
        StepDiagnostics sd;
        sd.label = step.label;
        sd.counterintuitive_ok = step.stokes_peak < step.pump_peak;
        sd.stokes_area = stokes.peak_omega() * stokes.min_t_p();
        sd.pump_area = pump.peak_omega() * pump.min_t_p();
        if (!sd.counterintuitive_ok)
            d.flags.push_back("step " + step.label +
                              ": pump peaks at or before its stokes pulse "
                              "(counterintuitive order violated)");
        double area = std::min(sd.stokes_area, sd.pump_area);
        d.min_pulse_area = (k == 0) ? area : std::min(d.min_pulse_area, area);

        if (k + 1 < schedule.steps.size()) {
            const Step& next = schedule.steps[k + 1];
            const Pulse& nstokes = schedule.pulses[static_cast<size_t>(next.stokes_pulse)];
            double t1 = pump.min_t_p(), t2 = nstokes.min_t_p();
            double delta = next.stokes_peak - step.pump_peak;
            double ssum = t1 * t1 + t2 * t2;
            sd.overlap_to_next =
                std::sqrt(2.0 * t1 * t2 / ssum) * std::exp(-delta * delta / ssum);
        }
        d.steps.push_back(sd);
    }

    if (!schedule.steps.empty() && d.min_pulse_area < 5.0) {
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "adiabaticity: smallest pulse area Omega_max*Tp = %.3g < 5",
                      d.min_pulse_area);
        d.flags.emplace_back(buf);
    }
    if (!schedule.pulses.empty() && d.min_g <= d.max_omega) {
        char buf[96];
        std::snprintf(buf, sizeof(buf),
                      "cavity coupling g = %.3g <= Omega_max = %.3g (photon exposure)",
                      d.min_g, d.max_omega);
        d.flags.emplace_back(buf);
    }
    return d;
}

}  // namespace cavpass
