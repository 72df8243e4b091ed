#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "arcvar/ar_model.hpp"
#include "arcvar/error.hpp"
#include "arcvar/risk.hpp"
#include "arcvar/scenario.hpp"
#include "arcvar/sim_harness.hpp"
#include "oracles.hpp"

using namespace arcvar;

namespace {

HarnessOptions quick_options() {
  HarnessOptions o;
  o.target_mc_size = 1'000'000;
  o.threads = 1;
  return o;
}

void check_same(const CellResult& a, const CellResult& b) {
  CHECK(a.model == b.model);
  CHECK(a.scenario == b.scenario);
  CHECK(a.n == b.n);
  CHECK(a.alpha == b.alpha);
  CHECK(a.bias_r == b.bias_r);
  CHECK(a.rmse_r == b.rmse_r);
  CHECK(a.bias_oracle == b.bias_oracle);
  CHECK(a.rmse_oracle == b.rmse_oracle);
  CHECK(a.target == b.target);
  CHECK(a.replications_used == b.replications_used);
  CHECK(a.failures == b.failures);
}

std::string csv_of(const std::vector<CellResult>& cells) {
  std::ostringstream os;
  write_cells_csv(os, cells);
  return os.str();
}

ExperimentGrid small_grid() {
  ExperimentGrid g;
  g.models = {ARModel({0.5}), ARModel({0.5, -0.2})};
  g.sizes = {60, 120};
  g.alphas = {0.9, 0.95};
  g.scenarios = {InnovationScenario::normal(), InnovationScenario::t3(), InnovationScenario::mixture()};
  g.replications = 40;
  g.master_seed = 99;
  g.options = quick_options();
  return g;
}

}  // namespace

TEST_CASE("desk-scale cells land in the published bands") {
  HarnessOptions opts;
  opts.threads = 1;

  SUBCASE("AR(1) 0.5, Normal, n = 500, alpha = 0.95") {
    const CellResult c = run_cell(ARModel({0.5}), InnovationScenario::normal(), 500, 0.95, 500, kDefaultMasterSeed, opts);
    CHECK(std::abs(c.target - 2.0627) < 1e-4);
    CHECK(std::abs(c.bias_r - (-0.007)) <= 0.02);
    CHECK(std::abs(c.rmse_r - 0.121) <= 0.03);
    CHECK(c.replications_used + c.failures == 500);
  }
  SUBCASE("AR(1) 0.8, Normal, n = 500, alpha = 0.99") {
    const CellResult c = run_cell(ARModel({0.8}), InnovationScenario::normal(), 500, 0.99, 500, kDefaultMasterSeed, opts);
    CHECK(std::abs(c.bias_r - (-0.057)) <= 0.03);
    CHECK(std::abs(c.rmse_r - 0.212) <= 0.05);
  }
  SUBCASE("AR(2), t3, n = 500, alpha = 0.99") {
    const CellResult c =
        run_cell(ARModel({0.5, -0.2}), InnovationScenario::t3(), 500, 0.99, 500, kDefaultMasterSeed, opts);
    CHECK(std::abs(c.bias_r - (-0.183)) <= 0.15);
    CHECK(std::abs(c.rmse_r - 1.110) <= 0.25);
  }
}

TEST_CASE("rmse bounds |bias| and replications are accounted for") {
  const std::vector<CellResult> cells = run_grid(small_grid());
  REQUIRE(cells.size() == small_grid().cell_count());
  for (const CellResult& c : cells) {
    CAPTURE(c.model);
    CAPTURE(c.scenario);
    CAPTURE(c.n);
    CHECK_FALSE(c.error.has_value());
    CHECK(c.rmse_r >= std::abs(c.bias_r));
    CHECK(c.rmse_oracle >= std::abs(c.bias_oracle));
    CHECK(c.failures + c.replications_used == 40);
    CHECK(c.se_bias_r > 0.0);
  }
}

TEST_CASE("grid order is model, alpha, scenario, n") {
  const ExperimentGrid g = small_grid();
  const std::vector<CellResult> cells = run_grid(g);
  std::size_t i = 0;
  for (const ARModel& m : g.models) {
    for (double a : g.alphas) {
      for (const InnovationScenario& s : g.scenarios) {
        for (std::size_t n : g.sizes) {
          CHECK(cells[i].model == m.label());
          CHECK(cells[i].alpha == a);
          CHECK(cells[i].scenario == s.name());
          CHECK(cells[i].n == n);
          ++i;
        }
      }
    }
  }
}

TEST_CASE("a one-cell grid reproduces run_cell exactly") {
  ExperimentGrid g;
  g.models = {ARModel({0.8})};
  g.sizes = {150};
  g.alphas = {0.95};
  g.scenarios = {InnovationScenario::mixture()};
  g.replications = 60;
  g.master_seed = 5;
  g.options = quick_options();
  const std::vector<CellResult> grid = run_grid(g);
  REQUIRE(grid.size() == 1);
  check_same(grid[0], run_cell(ARModel({0.8}), InnovationScenario::mixture(), 150, 0.95, 60, 5, g.options));
}

TEST_CASE("multi-level grid cells equal their single-cell runs") {
  const ExperimentGrid g = small_grid();
  const std::vector<CellResult> cells = run_grid(g);
  // spot checks across the layout
  for (std::size_t i : {std::size_t{0}, std::size_t{7}, cells.size() - 1}) {
    const CellResult& c = cells[i];
    const ARModel& model = c.model == g.models[0].label() ? g.models[0] : g.models[1];
    check_same(c, run_cell(model, InnovationScenario::from_name(c.scenario), c.n, c.alpha, g.replications,
                           g.master_seed, g.options));
  }
}

TEST_CASE("same master seed gives identical CSV bytes; thread count does not matter") {
  ExperimentGrid g = small_grid();
  const std::string a = csv_of(run_grid(g));
  CHECK(a == csv_of(run_grid(g)));
  g.options.threads = 3;
  CHECK(a == csv_of(run_grid(g)));
  g.master_seed = 100;
  CHECK(a != csv_of(run_grid(g)));
}

TEST_CASE("seed isolation: permuting the grid never changes a cell") {
  const ExperimentGrid g = small_grid();
  const std::vector<CellResult> base = run_grid(g);
  ExperimentGrid perm = g;
  std::reverse(perm.models.begin(), perm.models.end());
  std::reverse(perm.sizes.begin(), perm.sizes.end());
  std::reverse(perm.alphas.begin(), perm.alphas.end());
  std::rotate(perm.scenarios.begin(), perm.scenarios.begin() + 1, perm.scenarios.end());
  const std::vector<CellResult> other = run_grid(perm);
  REQUIRE(other.size() == base.size());
  for (const CellResult& c : base) {
    const auto it = std::find_if(other.begin(), other.end(), [&](const CellResult& o) {
      return o.model == c.model && o.scenario == c.scenario && o.n == c.n && o.alpha == c.alpha;
    });
    REQUIRE(it != other.end());
    check_same(c, *it);
  }
}

TEST_CASE("targets") {
  const ExperimentGrid g = small_grid();
  for (const CellResult& c : run_grid(g)) {
    if (c.scenario != "Normal") continue;
    CHECK(std::abs(c.target - oracle::normal_es_quadrature(c.alpha)) < 1e-6);
  }
  const InnovationScenario t3 = InnovationScenario::t3();
  const TargetValue a = cvar_target(t3, 0.95, 1'000'000, target_seed(1, t3, 0.95));
  const TargetValue b = cvar_target(t3, 0.95, 1'000'000, target_seed(1, t3, 0.95));
  CHECK(a.value == b.value);
  CHECK(std::abs(a.value - oracle::t3_unit_es(0.95)) < 5 * a.std_error + 1e-6);
}

TEST_CASE("seed derivation ignores model and alpha but separates scenario, n and replication") {
  const InnovationScenario s = InnovationScenario::normal();
  std::set<std::uint64_t> seen;
  for (std::size_t n : {100, 200, 500}) {
    for (std::size_t r = 0; r < 50; ++r) seen.insert(replication_seed(7, s, n, r));
  }
  CHECK(seen.size() == 150);
  CHECK(replication_seed(7, s, 100, 0) != replication_seed(7, InnovationScenario::t3(), 100, 0));
  CHECK(replication_seed(7, s, 100, 0) != replication_seed(8, s, 100, 0));
  CHECK(target_seed(7, s, 0.95) != target_seed(7, s, 0.99));
}

TEST_CASE("errors") {
  const HarnessOptions opts = quick_options();
  CHECK_THROWS_AS(run_cell(ARModel({0.5}), InnovationScenario::normal(), 100, 0.95, 0, 1, opts),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_cell(ARModel({1.2}), InnovationScenario::normal(), 100, 0.95, 10, 1, opts), DataError);

  // A cell that cannot estimate its tail is recorded, and the grid still completes.
  ExperimentGrid g;
  g.models = {ARModel({0.5}), ARModel({1.1})};
  g.sizes = {20, 100};
  g.alphas = {0.99};
  g.scenarios = {InnovationScenario::normal()};
  g.replications = 10;
  g.master_seed = 3;
  g.options = quick_options();
  const std::vector<CellResult> cells = run_grid(g);
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].n == 20);
  CHECK(cells[0].error.has_value());
  CHECK(cells[0].failures == 10);
  CHECK(std::isnan(cells[0].bias_r));
  CHECK_FALSE(cells[1].error.has_value());
  CHECK(cells[2].error.has_value());
  CHECK(cells[3].error.has_value());
}

TEST_CASE("CSV and text layout") {
  ExperimentGrid g = small_grid();
  g.models.erase(g.models.begin() + 1, g.models.end());
  g.scenarios.erase(g.scenarios.begin() + 1, g.scenarios.end());
  g.sizes.erase(g.sizes.begin() + 1, g.sizes.end());
  const std::vector<CellResult> cells = run_grid(g);
  const std::string csv = csv_of(cells);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "model,n,scenario,alpha,bias_r,rmse_r,bias_oracle,rmse_oracle,target,R_used,failures");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 10);
    CHECK(line.rfind("AR(1)", 0) == 0);
  }
  CHECK(rows == cells.size());

  std::ostringstream txt;
  write_cells_text(txt, cells);
  const std::string t = txt.str();
  CHECK(t.find("bias (R)") != std::string::npos);
  CHECK(t.find("RMSE (Oracle)") != std::string::npos);
  CHECK(t.find("Normal") != std::string::npos);
}

TEST_CASE("standard grid has 72 cells") {
  const ExperimentGrid g = ExperimentGrid::standard(200);
  CHECK(g.cell_count() == 72);
  CHECK(g.replications == 200);
  CHECK(g.master_seed == kDefaultMasterSeed);
}
