#include <doctest.h>

#include <cmath>
#include <memory>

#include "spinsi/config.hpp"
#include "spinsi/gibbs.hpp"

using namespace spinsi;

TEST_CASE("config file parsing") {
    std::string text = R"(
# experiment
[model]
kind = ising
beta = 0.3
boundary = [0:1, 2:0]

[graph]
kind = path
n = 4

[run]
seed = 7
trials = 500
)";
    ConfigFile cfg = ConfigFile::parse(text);
    CHECK(cfg.get("model", "kind") == "ising");
    CHECK(cfg.get_double("model", "beta", 0.0) == doctest::Approx(0.3));
    CHECK(cfg.get_long("run", "seed", 0) == 7);
    CHECK(cfg.get_list("model", "boundary").size() == 2);
    CHECK(cfg.get("nope", "missing", "dflt") == "dflt");

    ExperimentConfig ec = ExperimentConfig::from_file(cfg);
    CHECK(ec.model_kind == "ising");
    CHECK(ec.param == doctest::Approx(0.3));
    CHECK(ec.graph_spec == "path:4");
    CHECK(ec.seed == 7);
    CHECK(ec.boundary.size() == 2);

    CHECK_THROWS(ConfigFile::parse("key_without_assignment\n"));
    CHECK_THROWS(ExperimentConfig::from_file(ConfigFile::parse("[model]\nkind = nonsense\n")));
}

TEST_CASE("boundary pinnings fold into the built model") {
    ConfigFile cfg = ConfigFile::parse(R"(
[model]
kind = ising
beta = 1.0986122886681098
boundary = [0:1]
[graph]
kind = edge
)");
    ExperimentConfig ec = ExperimentConfig::from_file(cfg);
    auto g = std::make_shared<Graph>(build_graph_spec(ec.graph_spec));
    SpinSystem sys = build_model(ec, g);
    CHECK(sys.n() == 1);
    GibbsTable tbl = exact_gibbs(sys);
    // beta = ln 3: the remaining vertex prefers the pinned spin 3:1
    CHECK(tbl.prob_of(tbl.space.encode({1})) == doctest::Approx(0.75));
}

TEST_CASE("field overrides") {
    ConfigFile cfg = ConfigFile::parse(R"(
[model]
kind = ising
beta = 0
field = [0:1:0.6931471805599453]
[graph]
kind = edge
)");
    ExperimentConfig ec = ExperimentConfig::from_file(cfg);
    auto g = std::make_shared<Graph>(build_graph_spec(ec.graph_spec));
    SpinSystem sys = build_model(ec, g);
    GibbsTable tbl = exact_gibbs(sys);
    auto m = marginal(tbl, {0});
    CHECK(m[{1}] == doctest::Approx(2.0 / 3));
}
