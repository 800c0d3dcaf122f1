#include "doctest.h"

#include <cstdlib>

#include "satde/cli_config.hpp"

using namespace satde;

TEST_CASE("parse_ensemble regular and JSON") {
    auto reg = parse_ensemble("3,6");
    CHECK(reg.min_var_degree() == 3);
    CHECK(reg.max_chk_degree() == 6);
    CHECK(reg.rho_prime_1() == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(reg.is_regular());

    auto irr = parse_ensemble(R"({"lambda":[0,0.5,0.5],"rho":[0,0,0,0,0,1]})");
    CHECK(irr.lambda2() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(irr.lambda3() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(irr.rho_prime_1() == doctest::Approx(5.0).epsilon(1e-14));
    CHECK_FALSE(irr.is_regular());

    CHECK_THROWS_AS(parse_ensemble("garbage"), ConfigError);
    CHECK_THROWS_AS(parse_ensemble(R"({"lambda":[0.5,0.5],"rho":[0,1]})"), ConfigError);
    // lambda1 must be zero

    try {
        parse_ensemble("nope");
    } catch (const ConfigError& e) {
        CHECK(e.field == "ensemble");
    }
}

TEST_CASE("parse_channel") {
    auto c = parse_channel("BSC:0.07");
    CHECK(c.kind == ChannelKind::BSC);
    CHECK(c.param == doctest::Approx(0.07).epsilon(1e-14));
    CHECK_THROWS_AS(parse_channel("XYZ:0.1"), ConfigError);
    CHECK_THROWS_AS(parse_channel("BSC"), ConfigError);
}

TEST_CASE("validation catches bad fields") {
    RunConfig cfg;
    cfg.command = "de-run";
    cfg.ensemble_str = "3,6";
    cfg.channel_str = "BSC:0.07";
    cfg.mode_str = "symsat";
    cfg.K = 20.0;
    cfg.validate();  // baseline passes

    auto expect_field = [&](RunConfig c, const std::string& f) {
        try {
            c.validate();
            FAIL("expected ConfigError for field " << f);
        } catch (const ConfigError& e) {
            CHECK(e.field == f);
        }
    };

    RunConfig bad = cfg;
    bad.K = 20.013;  // not a multiple of 1/16
    expect_field(bad, "K");

    bad = cfg;
    bad.grid_delta = -1.0;
    expect_field(bad, "grid_delta");

    bad = cfg;
    bad.grid_support = 10.03;
    expect_field(bad, "grid_support");

    bad = cfg;
    bad.format = "xml";
    expect_field(bad, "format");

    bad = cfg;
    bad.K = 0.0;  // saturated mode without K
    expect_field(bad, "K");

    bad = cfg;
    bad.tol = 0.0;
    expect_field(bad, "tol");
}

TEST_CASE("K on grid example") {
    RunConfig cfg;
    cfg.command = "de-run";
    cfg.ensemble_str = "3,6";
    cfg.channel_str = "BSC:0.07";
    cfg.mode_str = "symsat";
    cfg.K = 20.0;
    cfg.grid_delta = 0.0625;
    cfg.validate();
    CHECK(cfg.grid().aligned(cfg.K));
}

TEST_CASE("config JSON round-trip") {
    RunConfig cfg;
    cfg.command = "de-run";
    cfg.ensemble_str = "3,6";
    cfg.channel_str = "BSC:0.07";
    cfg.mode_str = "symsat";
    cfg.K = 20.0;
    cfg.seed = 12345;
    cfg.clip = 12.0;
    auto j = cfg.to_json();
    CHECK(j["schema_version"] == 1);

    RunConfig back;
    back.apply_json(j);
    CHECK(back.command == cfg.command);
    CHECK(back.ensemble_str == cfg.ensemble_str);
    CHECK(back.channel_str == cfg.channel_str);
    CHECK(back.K == cfg.K);
    CHECK(back.mode_str == cfg.mode_str);
    CHECK(back.seed == cfg.seed);
    REQUIRE(back.clip.has_value());
    CHECK(*back.clip == 12.0);
}

TEST_CASE("channel JSON object form with clip") {
    RunConfig cfg;
    cfg.apply_json(nlohmann::json{{"channel", {{"family", "BSC"}, {"param", 0.08}, {"clip", 12.0}}}});
    auto c = cfg.channel();
    CHECK(c.kind == ChannelKind::BSC);
    CHECK(c.param == doctest::Approx(0.08).epsilon(1e-9));
    REQUIRE(c.clip.has_value());
    CHECK(*c.clip == 12.0);
}

TEST_CASE("environment override for grid spacing") {
    setenv("SATDE_GRID_DELTA", "0.125", 1);
    RunConfig cfg;
    cfg.apply_environment();
    CHECK(cfg.grid_delta == doctest::Approx(0.125).epsilon(1e-14));
    unsetenv("SATDE_GRID_DELTA");
}

TEST_CASE("accessor errors name the field") {
    RunConfig cfg;
    cfg.rule_str = "weird";
    try {
        cfg.rule();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field == "rule");
    }
    cfg.mode_str = "other";
    CHECK_THROWS_AS(cfg.mode(), ConfigError);
    CHECK_THROWS_AS(cfg.ensemble(), ConfigError);  // missing
}
