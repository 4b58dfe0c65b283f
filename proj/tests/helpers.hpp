#pragma once

#include "cavpass/pulses.hpp"

namespace testutil {

struct PulseSpec {
    cavpass::Transition transition;
    int atom;
    double peak;
    double omega_max{10.0};
    double phase{0.0};
};

// Custom schedule from explicit pulses; one cavity-exchange step covering the
// first two pulses when roles are given.
inline cavpass::Schedule custom_schedule(std::initializer_list<PulseSpec> specs, double g1,
                                         double g2,
                                         std::optional<cavpass::StepRoles> roles = {})
{
    cavpass::Schedule s;
    s.g1 = g1;
    s.g2 = g2;
    double first = 0.0, last = 0.0;
    bool any = false;
    for (const auto& spec : specs) {
        cavpass::Pulse p;
        p.lobes = {{spec.omega_max, spec.peak, 1.0}};
        p.atom = spec.atom;
        p.transition = spec.transition;
        p.phase = spec.phase;
        p.label = cavpass::transition_name(spec.transition);
        s.pulses.push_back(std::move(p));
        first = any ? std::min(first, spec.peak) : spec.peak;
        last = any ? std::max(last, spec.peak) : spec.peak;
        any = true;
    }
    s.t_start = first - 4.5;
    s.t_end = last + 4.5;
    if (s.pulses.size() >= 2) {
        cavpass::Step step;
        step.kind = cavpass::StepKind::cavity_exchange;
        step.stokes_pulse = 0;
        step.pump_pulse = 1;
        step.stokes_peak = s.pulses[0].first_peak();
        step.pump_peak = s.pulses[1].first_peak();
        step.roles = roles;
        step.label = "t";
        s.steps.push_back(step);
    }
    return s;
}

}  // namespace testutil
