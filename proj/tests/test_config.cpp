#include <doctest.h>

#include <nlohmann/json.hpp>

#include "svp/config.hpp"
#include "svp/errors.hpp"

using namespace svp;
using nlohmann::json;

TEST_SUITE_BEGIN("config");

TEST_CASE("minimal sweep config fills defaults") {
    json doc = {{"cells", json::array({{{"n", 4},
                                        {"ensemble", "gaussian"},
                                        {"spectrum", {{"kind", "isotropic"}, {"d", 8}}}}})}};
    RunConfig cfg = resolve_config("sweep", doc, FlagOverrides{});
    CHECK(cfg.seed == RunConfig::kDefaultSeed);
    CHECK(cfg.workers == 1);
    SweepConfig sweep = sweep_from_config(cfg);
    CHECK(sweep.trials == 100);
    CHECK(sweep.mode == EquivalenceMode::Condition2);
    REQUIRE(sweep.cells.size() == 1);
    CHECK(sweep.cells[0].labels.kind == LabelSpec::Kind::RandomSigns);
    CHECK(cfg.echo.contains("solver"));
}

TEST_CASE("d < n in a cell is rejected naming the cell") {
    json doc = {{"cells", json::array({{{"n", 4},
                                        {"ensemble", "gaussian"},
                                        {"spectrum", {{"kind", "isotropic"}, {"d", 8}}}},
                                       {{"n", 16},
                                        {"ensemble", "gaussian"},
                                        {"spectrum", {{"kind", "isotropic"}, {"d", 8}}}}})}};
    RunConfig cfg = resolve_config("sweep", doc, FlagOverrides{});
    try {
        sweep_from_config(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.pointer == "/cells/1");
        CHECK(std::string(e.what()).find("d = 8 < n = 16") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected with a nearest-key suggestion") {
    json doc = {{"solver", {{"tol_kt", 1e-9}}},
                {"cells", json::array({{{"n", 4},
                                        {"ensemble", "gaussian"},
                                        {"spectrum", {{"kind", "isotropic"}, {"d", 8}}}}})}};
    try {
        resolve_config("sweep", doc, FlagOverrides{});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("tol_kkt") != std::string::npos);
        CHECK(e.pointer == "/solver/tol_kt");
    }

    CHECK(nearest_key("tol_kt", {"tol_kkt", "tol_sv", "max_sweeps"}) == "tol_kkt");
    CHECK(nearest_key("completely_wrong", {"tol_kkt", "tol_sv"}).empty());
}

TEST_CASE("unknown top-level key suggestion") {
    json doc = {{"trails", 50},
                {"cells", json::array({{{"n", 4},
                                        {"ensemble", "gaussian"},
                                        {"spectrum", {{"kind", "isotropic"}, {"d", 8}}}}})}};
    try {
        resolve_config("sweep", doc, FlagOverrides{});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("trials") != std::string::npos);
    }
}

TEST_CASE("flag overrides win over the config file") {
    json doc = {{"seed", 9}, {"workers", 2},
                {"cells", json::array({{{"n", 4},
                                        {"ensemble", "haar"},
                                        {"spectrum", {{"kind", "isotropic"}, {"d", 8}}}}})}};
    FlagOverrides flags;
    flags.seed = 1234;
    flags.workers = 7;
    flags.trials = 13;
    RunConfig cfg = resolve_config("sweep", doc, flags);
    CHECK(cfg.seed == 1234);
    CHECK(cfg.workers == 7);
    CHECK(sweep_from_config(cfg).trials == 13);
}

TEST_CASE("spectrum forms: named constructors and explicit lambda") {
    json cell = {{"n", 3},
                 {"ensemble", "gaussian"},
                 {"spectrum", {{"lambda", {2.0, 1.0, 1.0, 1.0}}}}};
    CellSpec spec = cell_from_json(cell, "/cell");
    CHECK(spec.spectrum.kind == SpectrumSpec::Kind::Explicit);
    CHECK(spec.spectrum.dimension(3) == 4);

    json trig_cell = {{"n", 3},
                      {"ensemble", "trig"},
                      {"spectrum", {{"kind", "trig"}, {"k", 4}, {"decay", 1.0}}}};
    CellSpec trig_spec = cell_from_json(trig_cell, "/cell");
    CHECK(trig_spec.spectrum.dimension(3) == 9);

    json bilevel_cell = {{"n", 10},
                         {"ensemble", "gaussian"},
                         {"spectrum", {{"kind", "bilevel"}, {"p", 2.0}, {"q", 0.5}, {"r", 0.5}}}};
    CellSpec bilevel_spec = cell_from_json(bilevel_cell, "/cell");
    CHECK(bilevel_spec.spectrum.dimension(10) == 100);

    json bad = {{"n", 3}, {"ensemble", "gaussian"}, {"spectrum", {{"kind", "isotropic"}}}};
    CHECK_THROWS_AS(cell_from_json(bad, "/cell"), ConfigError);
}

TEST_CASE("trig ensemble demands a trig spectrum") {
    json cell = {{"n", 3},
                 {"ensemble", "trig"},
                 {"spectrum", {{"kind", "isotropic"}, {"d", 9}}}};
    CHECK_THROWS_AS(cell_from_json(cell, "/cell"), ConfigError);
}

TEST_CASE("label specs validate") {
    json cell = {{"n", 2},
                 {"ensemble", "gaussian"},
                 {"spectrum", {{"kind", "isotropic"}, {"d", 4}}},
                 {"labels", {{"kind", "fixed"}, {"values", {1.0, -1.0}}}}};
    CellSpec spec = cell_from_json(cell, "/cell");
    CHECK(spec.labels.kind == LabelSpec::Kind::FixedValues);

    json bad_len = cell;
    bad_len["labels"]["values"] = {1.0, -1.0, 1.0};
    CHECK_THROWS_AS(cell_from_json(bad_len, "/cell"), ConfigError);

    json bad_value = cell;
    bad_value["labels"]["values"] = {1.0, 0.5};
    CHECK_THROWS_AS(cell_from_json(bad_value, "/cell"), ConfigError);

    json glm = cell;
    glm["labels"] = {{"kind", "one_bit"}};
    CHECK(cell_from_json(glm, "/cell").labels.kind == LabelSpec::Kind::OneBit);
}

TEST_CASE("converse and buhot configs enforce ranges") {
    json doc = {{"n_list", {10}}, {"d_over_n_list", {0.5}}};
    RunConfig cfg = resolve_config("converse", doc, FlagOverrides{});
    CHECK_THROWS_AS(converse_from_config(cfg), ConfigError);

    json buhot_doc = {{"delta_list", {2.0}}};
    RunConfig buhot_cfg = resolve_config("buhot", buhot_doc, FlagOverrides{});
    CHECK_THROWS_AS(buhot_from_config(buhot_cfg), ConfigError);
}

TEST_SUITE_END();
