#include <algorithm>

#include <gtest/gtest.h>

#include "dcn/errors.hpp"
#include "dcn/experiment.hpp"

using namespace dcn;

namespace {

std::size_t error_line(const std::string& text) {
  try {
    parse_experiment(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  ADD_FAILURE() << "no error for:\n" << text;
  return 0;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Parse, FullExample) {
  const auto c = parse_experiment(R"(# sweep
seed = 7
out = curves.csv
cycles = 2000

[run ft]
topology = fat-tree-k4
pattern = uniform, tornado
rates = 0.1, 0.2, 0.4
vcs = 20

[run]
builder = dcell
n = 4
level = 1
routing = ecmp
rates = 0.3
drop = off
)");
  EXPECT_EQ(c.seed, 7u);
  ASSERT_TRUE(c.out.has_value());
  EXPECT_EQ(*c.out, "curves.csv");
  ASSERT_EQ(c.runs.size(), 2u);
  EXPECT_EQ(c.runs[0].label, "ft");
  EXPECT_EQ(c.runs[0].preset, "fat-tree-k4");
  EXPECT_EQ(c.runs[0].patterns.size(), 2u);
  EXPECT_EQ(c.runs[0].rates, (std::vector<double>{0.1, 0.2, 0.4}));
  EXPECT_EQ(c.runs[0].sim.vcs_per_port, 20u);
  EXPECT_EQ(c.runs[0].sim.sim_cycles, 2000u);
  EXPECT_EQ(c.runs[1].label, "dcell-n4-l1");
  EXPECT_EQ(c.runs[1].routing, RoutingMode::Ecmp);
  EXPECT_FALSE(c.runs[1].sim.drop_and_retransmit);
  EXPECT_EQ(c.runs[1].sim.sim_cycles, 2000u);
  ASSERT_TRUE(c.runs[1].params.has_value());
  EXPECT_EQ(std::get<DCellParams>(*c.runs[1].params), (DCellParams{4, 1}));
}

TEST(Parse, SingleImplicitRun) {
  const auto c = parse_experiment("topology = dcell-n6-l1\nrates = 0.1\n");
  ASSERT_EQ(c.runs.size(), 1u);
  EXPECT_EQ(c.runs[0].label, "dcell-n6-l1");
  EXPECT_EQ(c.seed, 1u);
}

TEST(Parse, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("[run a]\ntopology = fat-tree-k4\nrates =\n"), 3u);
  EXPECT_EQ(error_line("[run a]\ntopology = fat-tree-k4\nrates = 0.2, 0.1\n"), 3u);
  EXPECT_EQ(error_line("[run a]\ntopology = fat-tree-k4\nrates = 0, 0.5\n"), 3u);
  EXPECT_EQ(error_line("[run a]\ntopology = fat-tree-k4\nrates = 0.5, 1.5\n"), 3u);
  EXPECT_EQ(error_line("\n\n[run a]\ntopology = moon\nrates = 0.1\n"), 4u);
  EXPECT_EQ(error_line("[run a]\ntopology = fat-tree-k4\nrates = 0.1\ncolour = red\n"), 4u);
  EXPECT_EQ(error_line("[run a]\ntopology = fat-tree-k4\ntopology = dcell-n4-l1\nrates = 0.1\n"), 3u);
  EXPECT_EQ(error_line("[run a]\ntopology = fat-tree-k4\nrates = 0.1\nseed = 3\n"), 4u);
  EXPECT_EQ(error_line("[walk a]\n"), 1u);
  EXPECT_EQ(error_line("[run a]\nrates = 0.1\n"), 1u);
  EXPECT_EQ(error_line("[run a]\ntopology = fat-tree-k4\nlevel = 2\nrates = 0.1\n"), 3u);
  EXPECT_EQ(error_line("[run a]\nbuilder = fat-tree\nk = 4\nlevel = 2\nrates = 0.1\n"), 4u);
  EXPECT_EQ(error_line("[run a]\ntopology = fat-tree-k4\npattern = zigzag\nrates = 0.1\n"), 3u);
  EXPECT_EQ(error_line("[run a]\ntopology = fat-tree-k4\nvcs = many\nrates = 0.1\n"), 3u);
  EXPECT_EQ(error_line("# nothing\n"), 1u);
}

TEST(Parse, MessagesNameTheProblem) {
  try {
    parse_experiment("[run a]\ntopology = fat-tree-k4\nrates =\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("empty rate list"), std::string::npos);
  }
  try {
    parse_experiment("[run a]\ntopology = moon\nrates = 0.1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("fat-tree-k4"), std::string::npos);
  }
}

TEST(Validate, RejectsBadConfigs) {
  ExperimentConfig c;
  EXPECT_THROW(validate(c), std::invalid_argument);
  ExperimentRun r;
  r.preset = "fat-tree-k4";
  r.rates = {0.1};
  c.runs = {r};
  EXPECT_NO_THROW(validate(c));
  c.runs[0].rates = {};
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.runs[0].rates = {0.4, 0.2};
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.runs[0].rates = {0.1};
  c.runs[0].preset = "nowhere";
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.runs[0].preset = "";
  EXPECT_THROW(validate(c), std::invalid_argument);
  c.runs[0].preset = "fat-tree-k4";
  c.runs[0].sim.vcs_per_port = 0;
  EXPECT_THROW(validate(c), std::invalid_argument);
}

TEST(Presets, AllPresetsBuildAndAllFiguresValidate) {
  for (const auto& name : preset_names()) EXPECT_GT(build_preset(name).host_count(), 0u) << name;
  EXPECT_THROW(build_preset("nope"), std::invalid_argument);
  for (const auto& name : experiment_names()) {
    const auto c = experiment_preset(name);
    EXPECT_NO_THROW(validate(c)) << name;
    for (const auto& run : c.runs) EXPECT_NO_THROW(build_run_topology(run));
  }
  EXPECT_THROW(experiment_preset("fig99"), std::invalid_argument);
  EXPECT_EQ(experiment_preset("fig12").runs.size(), 3u);
  EXPECT_EQ(experiment_preset("fig14").runs[1].preset, "dcell-n6-l1");
}

TEST(BuildFromParams, MatchesDirectBuild) {
  const auto a = build_from_params(JellyfishParams{12, 5, 3, 4});
  const auto b = build_jellyfish(JellyfishParams{12, 5, 3, 4});
  EXPECT_TRUE(std::equal(a.links().begin(), a.links().end(), b.links().begin(), b.links().end()));
  EXPECT_THROW(build_from_params(ImportedParams{}), std::invalid_argument);
}

TEST(RunExperiment, RowsInOrderAndDeterministic) {
  const auto c = parse_experiment(R"(cycles = 1500
[run x]
topology = fat-tree-k4
pattern = uniform, complement
rates = 0.1, 0.3
[run]
builder = bcube
n = 4
k = 1
rates = 0.2
)");
  const std::string a = run_experiment(c);
  EXPECT_EQ(a, run_experiment(c));
  EXPECT_EQ(count_lines(a), 1u + 4u + 1u);
  EXPECT_EQ(a.substr(0, a.find('\n')), sim_csv_header());
  const auto first = a.find('\n') + 1;
  EXPECT_EQ(a.substr(first, 18), "x,uniform,0.1,100,");
  EXPECT_LT(a.find("\nx,uniform,0.3,"), a.find("\nx,complement,0.1,"));
  EXPECT_NE(a.find("\nx,complement,0.3,"), std::string::npos);
  EXPECT_NE(a.find("\nbcube-n4-k1,uniform,0.2,"), std::string::npos);

  auto other = c;
  other.seed = 2;
  EXPECT_NE(run_experiment(other), a);
}
