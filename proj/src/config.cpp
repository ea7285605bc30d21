#include "bna/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace bna::config {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const char* expected) {
    throw engine::ConfigInvalid("bad value for " + key + ": '" + value + "' (expected " +
                                expected + ")");
}

double parse_double(const std::string& key, const std::string& value) {
    double out = 0.0;
    const char* last = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), last, out);
    if (ec != std::errc() || p != last) bad_value(key, value, "a number");
    return out;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    std::int64_t out = 0;
    const char* last = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), last, out);
    if (ec != std::errc() || p != last) bad_value(key, value, "an integer");
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* last = value.data() + value.size();
    auto [p, ec] = std::from_chars(value.data(), last, out);
    if (ec != std::errc() || p != last) bad_value(key, value, "an unsigned integer");
    return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    std::string item;
    std::istringstream ss(value);
    while (std::getline(ss, item, ',')) {
        const std::string t = trim(item);
        if (t.empty()) bad_value(key, value, "a comma-separated list of numbers");
        out.push_back(parse_double(key, t));
    }
    if (out.empty()) bad_value(key, value, "a comma-separated list of numbers");
    return out;
}

struct KeyEntry {
    const char* doc;
    std::function<void(engine::SimConfig&, const std::string&, const std::string&)> set;
};

const std::map<std::string, KeyEntry>& registry() {
    using Cfg = engine::SimConfig;
    auto set_d = [](double Cfg::* field) {
        return [field](Cfg& c, const std::string& k, const std::string& v) {
            c.*field = parse_double(k, v);
        };
    };
    auto set_i = [](int Cfg::* field) {
        return [field](Cfg& c, const std::string& k, const std::string& v) {
            c.*field = static_cast<int>(parse_int(k, v));
        };
    };
    static const std::map<std::string, KeyEntry> map = {
        {"motility.dt",
         {"motility step, seconds",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.motility.dt = parse_double(k, v);
          }}},
        {"motility.v",
         {"swim speed, cm/s",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.motility.v = parse_double(k, v);
          }}},
        {"motility.D",
         {"rotational diffusion, rad^2/s",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.motility.D = parse_double(k, v);
          }}},
        {"motility.psi_A",
         {"steering scan half-width, rad",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.motility.psi_A = parse_double(k, v);
          }}},
        {"motility.n_scan",
         {"steering scan samples (odd)",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.motility.n_scan = static_cast<int>(parse_int(k, v));
          }}},
        {"agent.saturation_hysteresis",
         {"relative drop below target required to leave saturation",
          set_d(&Cfg::saturation_hysteresis)}},
        {"layout.mode",
         {"all-inside | two-outside",
          [](Cfg& c, const std::string& k, const std::string& v) {
              try {
                  c.layout.mode = archive::layout_mode_from_name(v);
              } catch (const std::invalid_argument&) {
                  bad_value(k, v, "all-inside or two-outside");
              }
          }}},
        {"layout.ab_distance",
         {"injection->storage distance, cm",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.layout.ab_distance = parse_double(k, v);
          }}},
        {"layout.cluster_offset",
         {"cluster square half-side, cm",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.layout.cluster_offset = parse_double(k, v);
          }}},
        {"layout.cluster_radius",
         {"cluster disc radius, cm",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.layout.cluster_radius = parse_double(k, v);
          }}},
        {"layout.triad_side",
         {"beacon triangle side, cm",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.layout.triad_side = parse_double(k, v);
          }}},
        {"layout.triad_orientation",
         {"first beacon angle, rad",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.layout.triad_orientation = parse_double(k, v);
          }}},
        {"layout.max_concurrent",
         {"per-cluster simultaneous conjugation cap",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.layout.max_concurrent = static_cast<int>(parse_int(k, v));
          }}},
        {"layout.capacity_mean",
         {"storage capacity normal mean, plasmids",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.layout.capacity_mean = parse_double(k, v);
          }}},
        {"layout.capacity_std",
         {"storage capacity normal std, plasmids",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.layout.capacity_std = parse_double(k, v);
          }}},
        {"layout.namespace_radius",
         {"namespace resolution radius, cm",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.layout.namespace_radius = parse_double(k, v);
          }}},
        {"sim.n_retrievers_per_cluster",
         {"retrievers launched per cluster", set_i(&Cfg::n_retrievers_per_cluster)}},
        {"sim.n_storage_per_cluster",
         {"storage bacteria per cluster (0 = match retrievers)",
          set_i(&Cfg::n_storage_per_cluster)}},
        {"sim.conjugation_time_s", {"conjugation freeze, s", set_d(&Cfg::conjugation_time_s)}},
        {"sim.time_limit_s", {"simulation cut-off, s", set_d(&Cfg::time_limit_s)}},
        {"sim.event_dt_s", {"event sweep period, s", set_d(&Cfg::event_dt_s)}},
        {"sim.conjugation_threshold_cm",
         {"cluster contact distance, cm", set_d(&Cfg::conjugation_threshold_cm)}},
        {"sim.conjugation_success_threshold",
         {"success gate parameter", set_d(&Cfg::conjugation_success_threshold)}},
        {"sim.success_model",
         {"normal-threshold | coin",
          [](Cfg& c, const std::string& k, const std::string& v) {
              try {
                  c.success_model = engine::success_model_from_name(v);
              } catch (const std::invalid_argument&) {
                  bad_value(k, v, "normal-threshold or coin");
              }
          }}},
        {"sim.delivery_radius_cm", {"delivery distance, cm", set_d(&Cfg::delivery_radius_cm)}},
        {"sim.encoding",
         {"basic | goldman",
          [](Cfg& c, const std::string& k, const std::string& v) {
              try {
                  c.encoding = codec::encoding_from_name(v);
              } catch (const std::invalid_argument&) {
                  bad_value(k, v, "basic or goldman");
              }
          }}},
        {"sim.seed",
         {"master seed",
          [](Cfg& c, const std::string& k, const std::string& v) { c.seed = parse_u64(k, v); }}},
        {"sim.replication_k",
         {"copies per plasmid (0 = maximal)", set_i(&Cfg::replication_k)}},
        {"sim.plasmid_len",
         {"bases per plasmid",
          [](Cfg& c, const std::string& k, const std::string& v) {
              const std::int64_t n = parse_int(k, v);
              if (n < 1) bad_value(k, v, "a positive integer");
              c.plasmid_len = static_cast<std::size_t>(n);
          }}},
        {"sim.trajectory_path",
         {"per-step dump CSV path (single runs only)",
          [](Cfg& c, const std::string&, const std::string& v) { c.trajectory_path = v; }}},
        {"payload.bytes",
         {"synthesized file size, bytes",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.payload_bytes = parse_u64(k, v);
          }}},
        {"payload.seed",
         {"payload generator seed",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.payload_seed = parse_u64(k, v);
          }}},
        {"positioning.t_s",
         {"positioning run length, s",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.positioning.t_s = parse_double(k, v);
          }}},
        {"positioning.n_bacteria",
         {"bacteria per positioning run",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.positioning.n_bacteria = static_cast<int>(parse_int(k, v));
          }}},
        {"positioning.dest_points",
         {"destinations per circle",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.positioning.dest_points = static_cast<int>(parse_int(k, v));
          }}},
        {"positioning.start_points",
         {"release points per circle",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.positioning.start_points = static_cast<int>(parse_int(k, v));
          }}},
        {"positioning.dest_radii",
         {"destination circle radii, cm (comma list)",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.positioning.dest_radii = parse_double_list(k, v);
          }}},
        {"positioning.start_radii",
         {"release circle radii, cm (comma list)",
          [](Cfg& c, const std::string& k, const std::string& v) {
              c.positioning.start_radii = parse_double_list(k, v);
          }}},
    };
    return map;
}

}  // namespace

KvMap parse_stream(std::istream& is, std::string_view origin) {
    KvMap kv;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw engine::ConfigInvalid(std::string(origin) + ":" + std::to_string(lineno) +
                                        ": expected 'key = value', got '" + stripped + "'");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) {
            throw engine::ConfigInvalid(std::string(origin) + ":" + std::to_string(lineno) +
                                        ": empty key");
        }
        kv[key] = value;
    }
    return kv;
}

KvMap parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw engine::ConfigInvalid("cannot open config file: " + path);
    return parse_stream(in, path);
}

void apply_override(KvMap& kv, std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos) {
        throw engine::ConfigInvalid("override must look like key=value, got '" +
                                    std::string(assignment) + "'");
    }
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    if (key.empty()) {
        throw engine::ConfigInvalid("override must look like key=value, got '" +
                                    std::string(assignment) + "'");
    }
    kv[key] = value;
}

std::vector<std::pair<std::string, std::string>> known_keys() {
    std::vector<std::pair<std::string, std::string>> out;
    out.reserve(registry().size());
    for (const auto& [key, entry] : registry()) out.emplace_back(key, entry.doc);
    return out;
}

void apply(engine::SimConfig& cfg, const KvMap& kv) {
    const auto& reg = registry();
    for (const auto& [key, value] : kv) {
        const auto it = reg.find(key);
        if (it == reg.end()) throw engine::ConfigInvalid("unknown config key: " + key);
        it->second.set(cfg, key, value);
    }
}

engine::SimConfig build_sim_config(const std::string& file_path,
                                   const std::vector<std::string>& overrides) {
    engine::SimConfig cfg;
    KvMap kv;
    if (!file_path.empty()) kv = parse_file(file_path);
    for (const std::string& ov : overrides) apply_override(kv, ov);
    bna::config::apply(cfg, kv);
    cfg.validate();
    return cfg;
}

}  // namespace bna::config
