#include "cavpass/config.hpp"

#include <fstream>
#include <stdexcept>

namespace cavpass {

namespace {

[[noreturn]] void config_error(const std::string& what)
{
    throw std::runtime_error("config: " + what);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback)
{
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        config_error(std::string("field \"") + key + "\": " + e.what());
    }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where)
{
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* k : known)
            if (key == k) ok = true;
        if (!ok) config_error("unknown field \"" + key + "\" in " + where);
    }
}

std::string level_string(AtomLevel level) { return std::string(1, level_letter(level)); }

AtomLevel level_from_string(const std::string& s)
{
    if (s.size() != 1) config_error("bad level \"" + s + "\"");
    return level_from_letter(s[0]);
}

}  // namespace

ScheduleParams RunConfig::schedule_params() const
{
    ScheduleParams p;
    p.omega_max = omega_max_tp;
    p.t_p = 1.0;
    p.intra_delay = intra_delay_tp;
    p.inter_step_gap = inter_step_gap_tp;
    p.g1 = g1_tp;
    p.g2 = g2_tp;
    p.phases = phases;
    return p;
}

Schedule RunConfig::make_schedule() const
{
    if (protocol == "custom") {
        if (!custom_schedule)
            config_error("protocol \"custom\" requires a \"schedule\" section");
        return *custom_schedule;
    }
    return build_schedule(protocol_from_name(protocol), schedule_params());
}

LossParams RunConfig::loss() const { return {gamma_e_tp, gamma_u_tp, kappa_tp}; }

bool RunConfig::effective_include_u(const Schedule& schedule) const
{
    return include_u.value_or(schedule.uses_u());
}

StateVector RunConfig::initial_vector(const Basis& basis) const
{
    StateVector v;
    v.basis = &basis;
    v.amplitudes = Eigen::VectorXcd::Zero(basis.size());
    if (initial_amplitudes.empty()) {
        v.amplitudes[basis.index_of(state_from_label(initial_state))] = 1.0;
        return v;
    }
    for (const auto& [label, amp] : initial_amplitudes)
        v.amplitudes[basis.index_of(state_from_label(label))] += amp;
    double n = v.amplitudes.norm();
    if (n < 1e-300) config_error("initial amplitudes sum to the zero vector");
    v.amplitudes /= n;
    return v;
}

ordered_json schedule_to_json(const Schedule& s)
{
    ordered_json j;
    j["protocol"] = s.protocol;
    j["g1_tp"] = s.g1;
    j["g2_tp"] = s.g2;
    j["t_start_tp"] = s.t_start;
    j["t_end_tp"] = s.t_end;
    j["pulses"] = ordered_json::array();
    for (const auto& p : s.pulses) {
        ordered_json jp;
        jp["atom"] = p.atom;
        jp["transition"] = transition_name(p.transition);
        jp["phase"] = p.phase;
        jp["label"] = p.label;
        jp["lobes"] = ordered_json::array();
        for (const auto& lobe : p.lobes)
            jp["lobes"].push_back({{"omega_max_tp", lobe.omega_max},
                                   {"t_center_tp", lobe.t_center},
                                   {"t_p", lobe.t_p}});
        j["pulses"].push_back(std::move(jp));
    }
    j["steps"] = ordered_json::array();
    for (const auto& st : s.steps) {
        ordered_json js;
        js["kind"] = st.kind == StepKind::cavity_exchange ? "cavity" : "shelving";
        js["stokes"] = st.stokes_pulse;
        js["pump"] = st.pump_pulse;
        js["stokes_peak_tp"] = st.stokes_peak;
        js["pump_peak_tp"] = st.pump_peak;
        if (st.roles) {
            js["L1"] = level_string(st.roles->laser1);
            js["L2"] = level_string(st.roles->laser2);
        }
        js["label"] = st.label;
        j["steps"].push_back(std::move(js));
    }
    return j;
}

Schedule schedule_from_json(const json& j)
{
    Schedule s;
    s.protocol = get_or<std::string>(j, "protocol", "custom");
    s.g1 = get_or<double>(j, "g1_tp", 0.0);
    s.g2 = get_or<double>(j, "g2_tp", 0.0);
    s.t_start = get_or<double>(j, "t_start_tp", 0.0);
    s.t_end = get_or<double>(j, "t_end_tp", 0.0);
    if (!j.contains("pulses") || !j.at("pulses").is_array())
        config_error("schedule: missing \"pulses\" array");
    for (const auto& jp : j.at("pulses")) {
        Pulse p;
        p.atom = get_or<int>(jp, "atom", 1);
        if (p.atom != 1 && p.atom != 2) config_error("schedule: pulse atom must be 1 or 2");
        p.transition = transition_from_name(get_or<std::string>(jp, "transition", "0-e"));
        p.phase = get_or<double>(jp, "phase", 0.0);
        p.label = get_or<std::string>(jp, "label", "");
        if (!jp.contains("lobes") || !jp.at("lobes").is_array() || jp.at("lobes").empty())
            config_error("schedule: pulse needs a non-empty \"lobes\" array");
        for (const auto& jl : jp.at("lobes")) {
            PulseEnvelope lobe;
            lobe.omega_max = get_or<double>(jl, "omega_max_tp", 0.0);
            lobe.t_center = get_or<double>(jl, "t_center_tp", 0.0);
            lobe.t_p = get_or<double>(jl, "t_p", 1.0);
            if (lobe.t_p <= 0.0) config_error("schedule: lobe t_p must be > 0");
            if (lobe.omega_max < 0.0) config_error("schedule: lobe omega_max must be >= 0");
            p.lobes.push_back(lobe);
        }
        s.pulses.push_back(std::move(p));
    }
    if (j.contains("steps")) {
        for (const auto& js : j.at("steps")) {
            Step st;
            std::string kind = get_or<std::string>(js, "kind", "cavity");
            if (kind == "cavity")
                st.kind = StepKind::cavity_exchange;
            else if (kind == "shelving")
                st.kind = StepKind::shelving;
            else
                config_error("schedule: step kind must be \"cavity\" or \"shelving\"");
            st.stokes_pulse = get_or<int>(js, "stokes", 0);
            st.pump_pulse = get_or<int>(js, "pump", 0);
            int n = static_cast<int>(s.pulses.size());
            if (st.stokes_pulse < 0 || st.stokes_pulse >= n || st.pump_pulse < 0 ||
                st.pump_pulse >= n)
                config_error("schedule: step pulse index out of range");
            st.stokes_peak = get_or<double>(js, "stokes_peak_tp", 0.0);
            st.pump_peak = get_or<double>(js, "pump_peak_tp", 0.0);
            if (js.contains("L1") || js.contains("L2")) {
                StepRoles roles;
                roles.laser1 = level_from_string(get_or<std::string>(js, "L1", "a"));
                roles.laser2 = level_from_string(get_or<std::string>(js, "L2", "0"));
                if ((roles.laser1 != AtomLevel::g0 && roles.laser1 != AtomLevel::ga) ||
                    (roles.laser2 != AtomLevel::g0 && roles.laser2 != AtomLevel::ga))
                    config_error("schedule: step roles must be \"0\" or \"a\"");
                st.roles = roles;
            }
            st.label = get_or<std::string>(js, "label", "");
            s.steps.push_back(std::move(st));
        }
    }
    if (s.t_start == 0.0 && s.t_end == 0.0 && !s.pulses.empty()) {
        // derive a window when none was given
        double first = s.pulses.front().first_peak(), last = s.pulses.front().last_peak();
        double tp = s.min_t_p();
        for (const auto& p : s.pulses) {
            first = std::min(first, p.first_peak());
            last = std::max(last, p.last_peak());
        }
        s.t_start = first - 4.5 * tp;
        s.t_end = last + 4.5 * tp;
    }
    if (s.t_end <= s.t_start) config_error("schedule: window is empty");
    return s;
}

ordered_json config_to_json(const RunConfig& c)
{
    ordered_json j;
    j["protocol"] = c.protocol;
    j["physical"] = {{"omega_max_tp", c.omega_max_tp},
                     {"g1_tp", c.g1_tp},
                     {"g2_tp", c.g2_tp},
                     {"intra_delay_tp", c.intra_delay_tp},
                     {"inter_step_gap_tp", c.inter_step_gap_tp},
                     {"phases", c.phases}};
    j["basis"] = {{"n_max", c.n_max},
                  {"include_u", c.include_u ? json(*c.include_u) : json(nullptr)}};
    j["loss"] = {{"gamma_e_tp", c.gamma_e_tp},
                 {"gamma_u_tp", c.gamma_u_tp},
                 {"kappa_tp", c.kappa_tp}};
    j["grid"] = {{"dt_tp", c.dt_tp}, {"sample_stride", c.sample_stride}};
    if (c.initial_amplitudes.empty()) {
        j["initial_state"] = c.initial_state;
    } else {
        ordered_json amps = ordered_json::array();
        for (const auto& [label, amp] : c.initial_amplitudes)
            amps.push_back({{"state", label}, {"re", amp.real()}, {"im", amp.imag()}});
        j["initial_state"] = {{"amplitudes", std::move(amps)}};
    }
    if (!c.scan_axes.empty()) {
        ordered_json axes = ordered_json::array();
        for (const auto& axis : c.scan_axes)
            axes.push_back({{"name", axis.name}, {"values", axis.values}});
        j["scan"] = {{"axes", std::move(axes)}};
    }
    if (c.custom_schedule) j["schedule"] = schedule_to_json(*c.custom_schedule);
    j["output"] = {{"dir", c.out_dir}};
    return j;
}

RunConfig config_from_json(const json& j)
{
    if (!j.is_object()) config_error("top level must be a JSON object");
    reject_unknown(j, {"protocol", "physical", "basis", "loss", "grid", "initial_state",
                       "scan", "schedule", "output"},
                   "top level");
    RunConfig c;
    c.protocol = get_or<std::string>(j, "protocol", c.protocol);
    if (c.protocol != "custom") protocol_from_name(c.protocol);  // validate the name

    if (j.contains("physical")) {
        const json& p = j.at("physical");
        reject_unknown(p, {"omega_max_tp", "g1_tp", "g2_tp", "intra_delay_tp",
                           "inter_step_gap_tp", "phases"},
                       "\"physical\"");
        c.omega_max_tp = get_or<double>(p, "omega_max_tp", c.omega_max_tp);
        c.g1_tp = get_or<double>(p, "g1_tp", c.g1_tp);
        c.g2_tp = get_or<double>(p, "g2_tp", c.g2_tp);
        c.intra_delay_tp = get_or<double>(p, "intra_delay_tp", c.intra_delay_tp);
        c.inter_step_gap_tp = get_or<double>(p, "inter_step_gap_tp", c.inter_step_gap_tp);
        c.phases = get_or<std::vector<double>>(p, "phases", {});
    }
    if (j.contains("basis")) {
        const json& b = j.at("basis");
        reject_unknown(b, {"n_max", "include_u"}, "\"basis\"");
        c.n_max = get_or<int>(b, "n_max", c.n_max);
        if (b.contains("include_u") && !b.at("include_u").is_null())
            c.include_u = b.at("include_u").get<bool>();
    }
    if (j.contains("loss")) {
        const json& l = j.at("loss");
        reject_unknown(l, {"gamma_e_tp", "gamma_u_tp", "kappa_tp"}, "\"loss\"");
        c.gamma_e_tp = get_or<double>(l, "gamma_e_tp", 0.0);
        c.gamma_u_tp = get_or<double>(l, "gamma_u_tp", 0.0);
        c.kappa_tp = get_or<double>(l, "kappa_tp", 0.0);
        if (c.gamma_e_tp < 0.0 || c.gamma_u_tp < 0.0 || c.kappa_tp < 0.0)
            config_error("loss rates must be >= 0");
    }
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        reject_unknown(g, {"dt_tp", "sample_stride"}, "\"grid\"");
        c.dt_tp = get_or<double>(g, "dt_tp", c.dt_tp);
        c.sample_stride = get_or<int>(g, "sample_stride", c.sample_stride);
        if (c.dt_tp <= 0.0) config_error("grid.dt_tp must be > 0");
        if (c.sample_stride < 1) config_error("grid.sample_stride must be >= 1");
    }
    if (j.contains("initial_state")) {
        const json& s = j.at("initial_state");
        if (s.is_string()) {
            c.initial_state = s.get<std::string>();
        } else if (s.is_object() && s.contains("amplitudes")) {
            for (const auto& ja : s.at("amplitudes")) {
                std::string label = get_or<std::string>(ja, "state", "");
                if (label.empty()) config_error("initial_state amplitude without \"state\"");
                c.initial_amplitudes.emplace_back(
                    label, cdouble(get_or<double>(ja, "re", 0.0), get_or<double>(ja, "im", 0.0)));
            }
            if (c.initial_amplitudes.empty())
                config_error("initial_state.amplitudes is empty");
        } else {
            config_error("initial_state must be a label or {\"amplitudes\": [...]}");
        }
    }
    if (j.contains("scan")) {
        const json& s = j.at("scan");
        reject_unknown(s, {"axes"}, "\"scan\"");
        for (const auto& ja : s.at("axes")) {
            ScanAxis axis;
            axis.name = get_or<std::string>(ja, "name", "");
            axis.values = get_or<std::vector<double>>(ja, "values", {});
            c.scan_axes.push_back(std::move(axis));
        }
    }
    if (j.contains("schedule")) c.custom_schedule = schedule_from_json(j.at("schedule"));
    if (j.contains("output")) {
        const json& o = j.at("output");
        reject_unknown(o, {"dir"}, "\"output\"");
        c.out_dir = get_or<std::string>(o, "dir", c.out_dir);
    }
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) config_error("cannot open \"" + path.string() + "\"");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        config_error("parse error in \"" + path.string() + "\": " + e.what());
    }
    return config_from_json(j);
}

}  // namespace cavpass
