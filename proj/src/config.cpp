#include "uavsim/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "uavsim/util.hpp"

namespace uavsim::harness {

Algorithm parse_algorithm(const std::string& name) {
    if (name == "aqmix") return Algorithm::kAqmix;
    if (name == "aiql") return Algorithm::kAiql;
    if (name == "sync_qmix") return Algorithm::kSyncQmix;
    if (name == "hert") return Algorithm::kHert;
    throw ConfigError("unknown algorithm '" + name + "'");
}

std::string algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::kAqmix: return "aqmix";
        case Algorithm::kAiql: return "aiql";
        case Algorithm::kSyncQmix: return "sync_qmix";
        case Algorithm::kHert: return "hert";
    }
    return "?";
}

namespace {

double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }

struct Field {
    std::string key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

double parse_double(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

int64_t parse_int(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        const long long i = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return i;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for '" + key + "': " + v);
    }
}

std::string join_list(const std::vector<double>& v) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += format_double(v[i]);
    }
    return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
    return out;
}

#define F_DOUBLE(name)                                                            \
    Field{#name, [](const ExperimentConfig& c) { return format_double(c.name); }, \
          [](ExperimentConfig& c, const std::string& v) { c.name = parse_double(#name, v); }}
#define F_INT(name)                                                                  \
    Field{#name, [](const ExperimentConfig& c) { return std::to_string(c.name); },  \
          [](ExperimentConfig& c, const std::string& v) {                            \
              c.name = static_cast<decltype(c.name)>(parse_int(#name, v));           \
          }}
#define F_BOOL(name)                                                                       \
    Field{#name, [](const ExperimentConfig& c) { return c.name ? "true" : "false"; },      \
          [](ExperimentConfig& c, const std::string& v) {                                   \
              if (v == "true") c.name = true;                                               \
              else if (v == "false") c.name = false;                                        \
              else throw ConfigError("config: bad boolean for '" #name "': " + v);          \
          }}
#define F_STRING(name)                                                   \
    Field{#name, [](const ExperimentConfig& c) { return c.name; },       \
          [](ExperimentConfig& c, const std::string& v) { c.name = v; }}
#define F_LIST(name)                                                               \
    Field{#name, [](const ExperimentConfig& c) { return join_list(c.name); },      \
          [](ExperimentConfig& c, const std::string& v) { c.name = parse_list(#name, v); }}

const std::vector<Field>& fields() {
    static const std::vector<Field> table = {
        F_INT(grid_h), F_DOUBLE(cell_size_m), F_DOUBLE(altitude_m), F_DOUBLE(dense_ratio),
        F_DOUBLE(lambda_dense), F_DOUBLE(lambda_sparse), F_DOUBLE(data_density),
        F_DOUBLE(data_min_mbit), F_DOUBLE(data_max_mbit),
        F_INT(num_uavs), F_LIST(velocity_mps), F_LIST(e_max_kj), F_DOUBLE(comm_range_m),
        F_DOUBLE(safety_margin_kj),
        F_DOUBLE(tx_power_dbm), F_DOUBLE(noise_psd_dbm), F_DOUBLE(pathloss_exponent),
        F_DOUBLE(nlos_attenuation), F_DOUBLE(los_a), F_DOUBLE(los_b), F_DOUBLE(rician_a1),
        F_DOUBLE(rician_a2), F_DOUBLE(carrier_ghz), F_INT(num_antennas), F_DOUBLE(sigma_e2),
        F_DOUBLE(bandwidth_mhz), F_DOUBLE(p0_w), F_DOUBLE(p1_w), F_DOUBLE(p2_kg_per_m),
        F_DOUBLE(u_tip_mps), F_DOUBLE(v0_mps),
        F_STRING(algorithm), F_STRING(allocation), F_DOUBLE(gamma), F_DOUBLE(learning_rate),
        F_INT(batch_episodes), F_INT(buffer_transitions), F_INT(hidden), F_INT(mix_hidden),
        F_INT(kernel_m), F_DOUBLE(grad_clip_norm), F_DOUBLE(eps_start), F_DOUBLE(eps_final),
        F_DOUBLE(eps_anneal_frac), F_INT(episodes), F_INT(checkpoint_every), F_BOOL(early_stop),
        F_INT(early_stop_window), F_INT(early_stop_patience), F_DOUBLE(early_stop_min_improvement),
        F_INT(seed), F_INT(threads), F_INT(bench_seed), F_INT(bench_scenarios),
        F_INT(validation_scenarios),
    };
    return table;
}

#undef F_DOUBLE
#undef F_INT
#undef F_BOOL
#undef F_STRING
#undef F_LIST

} // namespace

void ExperimentConfig::validate() const {
    grid_spec().validate();
    world_config().validate();
    parse_algorithm(algorithm);
    if (allocation != "equal" && allocation != "optimal")
        throw ConfigError("config: allocation must be 'equal' or 'optimal'");
    if (learning_rate <= 0.0) throw ConfigError("config: learning_rate must be > 0");
    if (batch_episodes < 1) throw ConfigError("config: batch_episodes must be >= 1");
    if (episodes < 1) throw ConfigError("config: episodes must be >= 1");
    if (hidden < 1 || mix_hidden < 1) throw ConfigError("config: hidden sizes must be >= 1");
    if (kernel_m < 1) throw ConfigError("config: kernel_m must be >= 1");
    if (eps_start < 0 || eps_start > 1 || eps_final < 0 || eps_final > 1)
        throw ConfigError("config: epsilon values must be in [0,1]");
    if (eps_anneal_frac < 0 || eps_anneal_frac > 1)
        throw ConfigError("config: eps_anneal_frac must be in [0,1]");
    if (threads < 1) throw ConfigError("config: threads must be >= 1");
}

GridSpec ExperimentConfig::grid_spec() const {
    GridSpec g;
    g.cells_per_side = grid_h;
    g.cell_size_m = cell_size_m;
    g.altitude_m = altitude_m;
    g.dense_ratio = dense_ratio;
    g.lambda_dense = lambda_dense;
    g.lambda_sparse = lambda_sparse;
    g.data_density = data_density;
    g.data_min_bits = data_min_mbit * 1e6;
    g.data_max_bits = data_max_mbit * 1e6;
    return g;
}

world::WorldConfig ExperimentConfig::world_config() const {
    world::WorldConfig w;
    w.grid = grid_spec();
    w.num_uavs = num_uavs;
    w.velocities = velocity_mps;
    if (static_cast<int>(w.velocities.size()) == 1)
        w.velocities.assign(static_cast<size_t>(num_uavs), velocity_mps[0]);
    w.e_max_j.clear();
    if (e_max_kj.size() == 1)
        w.e_max_j.assign(static_cast<size_t>(num_uavs), e_max_kj[0] * 1e3);
    else
        for (double e : e_max_kj) w.e_max_j.push_back(e * 1e3);
    w.comm_range_m = comm_range_m;
    w.safety_margin_j = safety_margin_kj * 1e3;
    w.gamma = gamma;
    w.reward_data_unit_bits = data_max_mbit * 1e6;
    w.bandwidth_hz = bandwidth_mhz * 1e6;
    w.allocation = allocation == "optimal" ? world::AllocationScheme::kOptimal
                                           : world::AllocationScheme::kEqual;
    w.propulsion.blade_profile_power = p0_w;
    w.propulsion.induced_power = p1_w;
    w.propulsion.parasite_coeff = p2_kg_per_m;
    w.propulsion.rotor_tip_speed = u_tip_mps;
    w.propulsion.hover_induced_speed = v0_mps;
    w.channel.los_a = los_a;
    w.channel.los_b = los_b;
    w.channel.rician_a1 = rician_a1;
    w.channel.rician_a2 = rician_a2;
    w.channel.pathloss_exponent = pathloss_exponent;
    w.channel.nlos_attenuation = nlos_attenuation;
    w.channel.carrier_hz = carrier_ghz * 1e9;
    w.channel.num_antennas = num_antennas;
    w.channel.tx_power_w = dbm_to_watt(tx_power_dbm);
    w.channel.noise_psd = dbm_to_watt(noise_psd_dbm);
    w.channel.sigma_e2 = sigma_e2;
    return w;
}

aqmix::LearnerConfig ExperimentConfig::learner_config() const {
    aqmix::LearnerConfig l;
    l.num_agents = num_uavs;
    l.grid_h = grid_h;
    l.pool_kernel = kernel_m;
    l.hidden = hidden;
    l.mix_hidden = mix_hidden;
    l.lr = static_cast<float>(learning_rate);
    l.gamma = static_cast<float>(gamma);
    l.soft_update_rate = 1e-2f;
    l.grad_clip_norm = static_cast<float>(grad_clip_norm);
    l.batch_episodes = batch_episodes;
    l.threads = threads;
    l.mode = algo() == Algorithm::kAiql ? aqmix::LossMode::kActingAgentOnly
                                        : aqmix::LossMode::kMonotonicMix;
    l.agent_init_seed = derive_seed(seed, 5);
    l.mixer_init_seed = derive_seed(seed, 6);
    return l;
}

double ExperimentConfig::epsilon_at(int episode) const {
    const double anneal_end = eps_anneal_frac * episodes;
    if (anneal_end <= 0 || episode >= anneal_end) return eps_final;
    return eps_start - (eps_start - eps_final) * (episode / anneal_end);
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::string out = "# uavsim experiment config v1\n";
    for (const auto& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
    return out;
}

LoadedConfig parse_config(const std::string& text) {
    LoadedConfig out;
    const ExperimentConfig defaults;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos) continue;
        if (line[first] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: missing '=' on line " + std::to_string(lineno));
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool found = false;
        for (const auto& f : fields()) {
            if (f.key != key) continue;
            f.set(out.config, value);
            if (f.get(out.config) != f.get(defaults)) out.overrides[key] = f.get(out.config);
            found = true;
            break;
        }
        if (!found) throw ConfigError("config: unknown key '" + key + "'");
    }
    out.config.validate();
    return out;
}

LoadedConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

} // namespace uavsim::harness
