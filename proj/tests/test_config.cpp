#include <doctest.h>

#include <cmath>

#include "weakctl/config.hpp"

using namespace weakctl;
using namespace weakctl::config;

namespace {

const char* kDemoConfig = R"({
  "consumers": [
    {"a": 1.0, "b": 6.0,  "m": 100.0},
    {"a": 1.0, "b": 12.0, "m": 100.0},
    {"a": 1.0, "b": 18.0, "m": 100.0},
    {"a": 1.0, "b": 24.0, "m": 100.0},
    {"a": 1.0, "b": 30.0, "m": 100.0}
  ],
  "plants": "unity",
  "filter_f": {"num": [1.0], "den": [1.5, 1.0]},
  "filter_fd": {"num": [1.0], "den": [10.0, 1.0]},
  "gamma": "zero",
  "reference": [{"start": 0.0, "value": 50.0}],
  "disturbance": {"mode": "filtered_gaussian", "seed": 1, "variance": 10.0},
  "horizon": 60.0,
  "step": 0.01,
  "output_dir": "out"
})";

} // namespace

TEST_CASE("demo config parses and materializes") {
    const auto cfg = parse(kDemoConfig);
    CHECK(cfg.consumers.size() == 5);
    CHECK(cfg.step == 0.01);

    const auto specs = build_specs(cfg);
    CHECK(specs[0].cap == doctest::Approx(20.0)); // 0.2 * m
    CHECK(specs[4].b == doctest::Approx(30.0));

    const auto plants = build_plants(cfg);
    REQUIRE(plants.size() == 5);
    CHECK(lti::dc_gain(plants[0]) == doctest::Approx(1.0));

    const auto ref = build_reference(cfg);
    CHECK(ref.samples.size() == horizon_steps(cfg));
    CHECK(ref.samples.front() == 50.0);
    CHECK(ref.samples.back() == 50.0);
}

TEST_CASE("serialize/parse round-trip is semantically identical") {
    auto cfg = parse(kDemoConfig);
    cfg.gamma.mode = "design";
    cfg.gamma.epsilon = 2.0;
    cfg.gamma.d_l2 = 12.5;
    cfg.plants.preset = "first_order";
    cfg.plants.tau = {0.05, 0.1, 0.2};

    const auto round = parse(serialize(cfg));
    CHECK(round.consumers.size() == cfg.consumers.size());
    for (std::size_t i = 0; i < cfg.consumers.size(); ++i) {
        CHECK(round.consumers[i].a == cfg.consumers[i].a);
        CHECK(round.consumers[i].b == cfg.consumers[i].b);
        CHECK(round.consumers[i].m == cfg.consumers[i].m);
    }
    CHECK(round.plants.preset == cfg.plants.preset);
    CHECK(round.plants.tau == cfg.plants.tau);
    CHECK(round.gamma.mode == cfg.gamma.mode);
    CHECK(round.gamma.epsilon == cfg.gamma.epsilon);
    CHECK(round.gamma.d_l2 == cfg.gamma.d_l2);
    CHECK(round.filter_f.num == cfg.filter_f.num);
    CHECK(round.filter_f.den == cfg.filter_f.den);
    CHECK(round.reference.size() == cfg.reference.size());
    CHECK(round.disturbance.seed == cfg.disturbance.seed);
    CHECK(round.horizon == cfg.horizon);
    CHECK(round.step == cfg.step);
    // and a second pass is byte-stable
    CHECK(serialize(round) == serialize(cfg));
}

TEST_CASE("validation failures carry field-anchored messages") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse(text);
            FAIL_CHECK("expected ConfigError for " << needle);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    expect_error(R"({"consumers": []})", "consumers");
    expect_error(R"({"consumers": [{"a": -1.0}]})", "consumers[0].a");
    expect_error(R"({"consumers": [{"a": 1.0}], "step": 0})", "step");
    expect_error(R"({"consumers": [{"a": 1.0}],
                     "filter_f": {"num": [1.0], "den": [1.0, -1.0]}})",
                 "filter_f");
    expect_error(R"({"consumers": [{"a": 1.0}], "gamma": "bogus"})", "gamma.mode");
    expect_error(R"({"consumers": [{"a": 1.0}],
                     "gamma": {"explicit": [0.1, 0.2]}})",
                 "gamma.values");
    expect_error(R"({"consumers": [{"a": 1.0}], "plants": "thermal"})", "plants.preset");
    expect_error("not json", "invalid JSON");
}

TEST_CASE("gamma materialization modes") {
    auto cfg = parse(kDemoConfig);
    const auto q = imc::build_youla(build_models(cfg), cfg.filter_f);

    cfg.gamma.mode = "zero";
    auto zero = build_gamma(cfg, q);
    for (double g : zero.lower) CHECK(g == 0.0);

    cfg.gamma.mode = "unbounded";
    auto unbounded = build_gamma(cfg, q);
    for (double g : unbounded.upper) CHECK(std::isinf(g));

    cfg.gamma.mode = "design";
    cfg.gamma.epsilon = 2.0;
    cfg.gamma.d_l2 = 10.0;
    auto designed = build_gamma(cfg, q);
    // unity plants, ||Q|| = 1: budget = 2*5/10 = 1, uniform split 0.2 each
    for (double g : designed.lower) CHECK(g == doctest::Approx(0.2).epsilon(1e-9));

    cfg.gamma.mode = "explicit";
    cfg.gamma.values = {0.1, 0.2, 0.3, 0.4, 0.5};
    auto explicit_g = build_gamma(cfg, q);
    CHECK(explicit_g.upper[2] == doctest::Approx(0.3));
}

TEST_CASE("designed gamma grows with epsilon") {
    auto cfg = parse(kDemoConfig);
    cfg.gamma.mode = "design";
    const auto q = imc::build_youla(build_models(cfg), cfg.filter_f);
    double prev = 0.0;
    for (double eps : {0.5, 1.0, 2.0}) {
        cfg.gamma.epsilon = eps;
        const auto gamma = build_gamma(cfg, q);
        CHECK(gamma.lower[0] >= prev);
        prev = gamma.lower[0];
    }
}
