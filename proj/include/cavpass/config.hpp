// config.hpp — run configuration with reference-point defaults, JSON (de)serialization for
// configs and schedules.  All times are in units of Tp, all rates in 1/Tp.
#pragma once

#include "cavpass/gateanalysis.hpp"

#include <json.hpp>  // vendored nlohmann single header

#include <filesystem>
#include <optional>
#include <utility>

namespace cavpass {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct RunConfig {
    std::string protocol{"swap8"};  // swap8 | swap7 | cnot11 | custom
    double omega_max_tp{10.0};
    double g1_tp{25.0};
    double g2_tp{25.0};
    double intra_delay_tp{1.2};
    double inter_step_gap_tp{6.0};
    std::vector<double> phases;         // per pulse, radians; empty = all zero
    int n_max{3};
    std::optional<bool> include_u;      // unset: derived from the schedule
    double gamma_e_tp{0.0};
    double gamma_u_tp{0.0};
    double kappa_tp{0.0};
    double dt_tp{5e-4};
    int sample_stride{50};
    std::string initial_state{"01;0"};  // ignored when initial_amplitudes is set
    std::vector<std::pair<std::string, cdouble>> initial_amplitudes;
    std::vector<ScanAxis> scan_axes;
    std::optional<Schedule> custom_schedule;  // used when protocol == "custom"
    std::string out_dir{"."};

    friend bool operator==(const RunConfig&, const RunConfig&) = default;

    ScheduleParams schedule_params() const;
    Schedule make_schedule() const;  // builds named protocol or returns the custom one
    LossParams loss() const;
    bool effective_include_u(const Schedule& schedule) const;
    StateVector initial_vector(const Basis& basis) const;  // normalized
};

ordered_json schedule_to_json(const Schedule& schedule);
Schedule schedule_from_json(const json& j);

ordered_json config_to_json(const RunConfig& config);
RunConfig config_from_json(const json& j);  // throws std::runtime_error naming the field
RunConfig load_config(const std::filesystem::path& path);

}  // namespace cavpass
