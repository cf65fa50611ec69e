#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <doctest.h>

#include "hsmff/config.hpp"
#include "hsmff/errors.hpp"

using namespace hsmff;

TEST_SUITE("config") {

TEST_CASE("the shipped config file matches the built-in defaults") {
    const std::filesystem::path path =
        std::filesystem::path(HSMFF_SOURCE_DIR) / "configs" / "default.cfg";
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    const std::string text((std::istreambuf_iterator<char>(in)),
                           std::istreambuf_iterator<char>());
    CHECK(text == default_config_text());
}

TEST_CASE("the bundled defaults parse and validate") {
    const ToolConfig cfg = parse_config(default_config_text());
    CHECK(cfg.motor.inertia == 5.7e-5);
    CHECK(cfg.gains.position_kp == 5.0);
    CHECK(cfg.gains.sample_time == 1e-4);
    CHECK(cfg.regressor.n_a == 4);
    CHECK(cfg.regressor.n_b == 0);
    CHECK(cfg.regressor.n_k == 1);
    CHECK(cfg.regressor.sample_time == cfg.gains.sample_time);
    CHECK(cfg.limits.v_max == 15.0);
    CHECK(cfg.limits.a_max == 80.0);
    CHECK(cfg.limits.j_max == 1000.0);
    CHECK(cfg.velocities.size() == 8);
    CHECK(cfg.motor.parasitic.ripple.size() == 2);
    CHECK(cfg.train.seed == cfg.seed);
    CHECK(!cfg.config_hash.empty());
}

TEST_CASE("unknown keys are rejected by name") {
    try {
        parse_config("motor.inertia = 1e-4\nmotor.windings = 3\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("motor.windings") != std::string::npos);
    }
}

TEST_CASE("a non-positive inertia is rejected with its name") {
    try {
        parse_config("motor.inertia = -2e-5\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("inertia") != std::string::npos);
    }
}

TEST_CASE("malformed values name the key") {
    try {
        parse_config("gains.current_kp = banana\n");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("gains.current_kp") != std::string::npos);
    }
}

TEST_CASE("ripple lists parse harmonic, amplitude and phase") {
    const ToolConfig cfg =
        parse_config("parasitic.ripple = 50:0.001:0.5, 100:0.0005:1.0\n");
    REQUIRE(cfg.motor.parasitic.ripple.size() == 2);
    CHECK(cfg.motor.parasitic.ripple[0].harmonic == 50);
    CHECK(cfg.motor.parasitic.ripple[0].amplitude == 0.001);
    CHECK(cfg.motor.parasitic.ripple[1].phase == 1.0);
}

TEST_CASE("ripple harmonics off the tooth grid are rejected") {
    CHECK_THROWS_AS(parse_config("parasitic.ripple = 51:0.001:0.0\n"), ConfigError);
}

TEST_CASE("velocity lists must be strictly increasing and positive") {
    CHECK_THROWS_AS(parse_config("experiment.velocities = 5, 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment.velocities = 0, 5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("experiment.velocities = 5, 5\n"), ConfigError);
}

TEST_CASE("roster entries are validated") {
    CHECK_THROWS_AS(parse_config("experiment.roster = pgnn, magic\n"), ConfigError);
}

TEST_CASE("comments and blank lines are ignored") {
    const ToolConfig cfg = parse_config("# leading comment\n\nseed = 9 # trailing\n");
    CHECK(cfg.seed == 9);
}

TEST_CASE("missing equals sign is a parse error") {
    CHECK_THROWS_AS(parse_config("seed 9\n"), ConfigError);
}

TEST_CASE("the hash depends on the exact bytes") {
    const std::string a = "seed = 1\n";
    const std::string b = "seed = 1 \n";
    CHECK(fnv1a_hex(a) != fnv1a_hex(b));
    CHECK(fnv1a_hex(a) == fnv1a_hex(a));
    CHECK(parse_config(a).config_hash == fnv1a_hex(a));
}

TEST_CASE("the seed flows into the training configuration") {
    const ToolConfig cfg = parse_config("seed = 1234\n");
    CHECK(cfg.train.seed == 1234);
}

TEST_CASE("the output directory falls back to the environment") {
    ToolConfig cfg = parse_config("seed = 1\n");
    setenv("HSMFF_OUT_DIR", "/tmp/hsmff_env_dir", 1);
    CHECK(cfg.resolved_output_dir() == "/tmp/hsmff_env_dir");
    cfg.output_dir = "explicit";
    CHECK(cfg.resolved_output_dir() == "explicit");
    unsetenv("HSMFF_OUT_DIR");
    cfg.output_dir.clear();
    CHECK(cfg.resolved_output_dir() == "out");
}

} // TEST_SUITE
