#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <sstream>
#include <string>

#include "bna/config.hpp"

using namespace bna;
using bna::engine::ConfigInvalid;
using bna::engine::SimConfig;

namespace {

std::string message_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigInvalid& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("no file and no overrides reproduces the defaults") {
    const SimConfig cfg = config::build_sim_config("", {});
    const SimConfig def;
    CHECK(cfg.motility.dt == def.motility.dt);
    CHECK(cfg.motility.v == def.motility.v);
    CHECK(cfg.motility.D == def.motility.D);
    CHECK(cfg.motility.psi_A == def.motility.psi_A);
    CHECK(cfg.motility.n_scan == def.motility.n_scan);
    CHECK(cfg.saturation_hysteresis == def.saturation_hysteresis);
    CHECK(cfg.n_retrievers_per_cluster == def.n_retrievers_per_cluster);
    CHECK(cfg.conjugation_time_s == def.conjugation_time_s);
    CHECK(cfg.time_limit_s == def.time_limit_s);
    CHECK(cfg.event_dt_s == def.event_dt_s);
    CHECK(cfg.encoding == def.encoding);
    CHECK(cfg.seed == def.seed);
    CHECK(cfg.payload_bytes == def.payload_bytes);
    CHECK(cfg.positioning.dest_radii == def.positioning.dest_radii);
    CHECK(cfg.positioning.start_radii == def.positioning.start_radii);
}

TEST_CASE("stream parsing skips comments and strips inline tails") {
    std::istringstream is(
        "# full-line comment\n"
        "\n"
        "  motility.D = 14   # rotational noise\n"
        "sim.seed=9\n"
        "   \t  \n"
        "sim.encoding = goldman\n");
    const config::KvMap kv = config::parse_stream(is, "unit");
    REQUIRE(kv.size() == 3);
    CHECK(kv.at("motility.D") == "14");
    CHECK(kv.at("sim.seed") == "9");
    CHECK(kv.at("sim.encoding") == "goldman");
}

TEST_CASE("malformed lines name the origin and line number") {
    std::istringstream is("motility.D = 5\nnot an assignment\n");
    const std::string msg =
        message_of([&] { config::parse_stream(is, "myfile.conf"); });
    CHECK(msg.find("myfile.conf") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
}

TEST_CASE("later assignments win: overrides beat file values") {
    std::istringstream is("motility.D = 9\nsim.n_retrievers_per_cluster = 40\n");
    config::KvMap kv = config::parse_stream(is);
    config::apply_override(kv, "motility.D=14");
    SimConfig cfg;
    config::apply(cfg, kv);
    CHECK(cfg.motility.D == 14.0);
    CHECK(cfg.n_retrievers_per_cluster == 40);
}

TEST_CASE("unknown keys and bad values are rejected by name") {
    SimConfig cfg;
    {
        const std::string msg =
            message_of([&] { config::apply(cfg, {{"motility.Q", "1"}}); });
        CHECK(msg.find("unknown config key") != std::string::npos);
        CHECK(msg.find("motility.Q") != std::string::npos);
    }
    {
        const std::string msg =
            message_of([&] { config::apply(cfg, {{"motility.D", "fast"}}); });
        CHECK(msg.find("motility.D") != std::string::npos);
        CHECK(msg.find("fast") != std::string::npos);
    }
    CHECK_THROWS_AS(config::apply(cfg, {{"sim.seed", "-3"}}), ConfigInvalid);
    CHECK_THROWS_AS(config::apply(cfg, {{"sim.encoding", "base64"}}), ConfigInvalid);
    CHECK_THROWS_AS(config::apply(cfg, {{"layout.mode", "sideways"}}), ConfigInvalid);
    CHECK_THROWS_AS(config::apply(cfg, {{"sim.success_model", "dice"}}), ConfigInvalid);
    CHECK_THROWS_AS(config::apply(cfg, {{"positioning.dest_radii", "0.1,,0.2"}}),
                    ConfigInvalid);
}

TEST_CASE("typed keys land in the right fields") {
    SimConfig cfg;
    config::apply(cfg, {
                           {"motility.dt", "0.01"},
                           {"motility.n_scan", "31"},
                           {"agent.saturation_hysteresis", "0.05"},
                           {"layout.mode", "two-outside"},
                           {"layout.capacity_mean", "80"},
                           {"sim.encoding", "goldman"},
                           {"sim.success_model", "coin"},
                           {"sim.conjugation_success_threshold", "0.4"},
                           {"sim.replication_k", "2"},
                           {"sim.trajectory_path", "/tmp/t.csv"},
                           {"payload.bytes", "512"},
                           {"payload.seed", "7"},
                           {"positioning.t_s", "250"},
                           {"positioning.dest_radii", "0.1, 0.2"},
                           {"positioning.start_points", "4"},
                       });
    CHECK(cfg.motility.dt == 0.01);
    CHECK(cfg.motility.n_scan == 31);
    CHECK(cfg.saturation_hysteresis == 0.05);
    CHECK(cfg.layout.mode == archive::LayoutMode::TwoOutside);
    CHECK(cfg.layout.capacity_mean == 80.0);
    CHECK(cfg.encoding == codec::Encoding::Goldman);
    CHECK(cfg.success_model == engine::SuccessModel::Coin);
    CHECK(cfg.conjugation_success_threshold == 0.4);
    CHECK(cfg.replication_k == 2);
    CHECK(cfg.trajectory_path == "/tmp/t.csv");
    CHECK(cfg.payload_bytes == 512);
    CHECK(cfg.payload_seed == 7);
    CHECK(cfg.positioning.t_s == 250.0);
    CHECK(cfg.positioning.dest_radii == std::vector<double>{0.1, 0.2});
    CHECK(cfg.positioning.start_points == 4);
}

TEST_CASE("override parsing requires key=value") {
    config::KvMap kv;
    config::apply_override(kv, "a.b=c=d");  // first '=' splits
    CHECK(kv.at("a.b") == "c=d");
    CHECK_THROWS_AS(config::apply_override(kv, "no-equals-here"), ConfigInvalid);
    CHECK_THROWS_AS(config::apply_override(kv, "=value"), ConfigInvalid);
}

TEST_CASE("build_sim_config validates the assembled config") {
    CHECK_THROWS_AS(config::build_sim_config("", {"motility.dt=0"}), ConfigInvalid);
    CHECK_THROWS_AS(config::build_sim_config("", {"sim.event_dt_s=0.03"}), ConfigInvalid);
    const SimConfig ok = config::build_sim_config("", {"motility.D=14", "sim.seed=8"});
    CHECK(ok.motility.D == 14.0);
    CHECK(ok.seed == 8);
    CHECK_THROWS_AS(config::build_sim_config("/nonexistent/path.conf", {}), ConfigInvalid);
}

TEST_CASE("every advertised key is accepted and documented") {
    const auto keys = config::known_keys();
    CHECK(keys.size() >= 30);
    SimConfig cfg;
    for (const auto& [key, doc] : keys) {
        CHECK_FALSE(doc.empty());
        // The registry must know every key it advertises. Feeding the key
        // with an unparseable value must complain about the value, never
        // about the key being unknown.
        const std::string msg =
            message_of([&] { config::apply(cfg, {{key, "\x01??"}}); });
        CHECK(msg.find("unknown config key") == std::string::npos);
    }
}
