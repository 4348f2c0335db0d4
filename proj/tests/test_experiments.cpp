#include <doctest.h>

#include <Eigen/Dense>
#include <sstream>

#include "dascof/experiments.hpp"
#include "dascof/integer_search.hpp"
#include "dascof/noise.hpp"

using namespace dascof;

namespace {

const char* kSmallConfig = R"(
# two-scheme soft-handoff sweep
[experiment]
schemes = RCoF, RQCoF
axis = r0
grid = 1, 3, 5
p = 17
trials = 24
seed = 9
[channel]
model = soft_handoff
L = 2
gamma = uniform:0.5,1.0
snr_db = 15
[output]
path = out.csv
)";

std::string csv_of(const CurveSet& curves) {
  std::ostringstream os;
  emit_csv(curves, os);
  return os.str();
}

}  // namespace

TEST_CASE("config parsing round trip") {
  const ExperimentSpec spec = parse_config_text(kSmallConfig);
  CHECK(spec.schemes.size() == 2);
  CHECK(spec.schemes[0] == Scheme::RCoF);
  CHECK(spec.axis == ExperimentSpec::Axis::r0);
  CHECK(spec.grid == std::vector<double>{1.0, 3.0, 5.0});
  CHECK(spec.p == 17);
  CHECK(spec.trials == 24);
  CHECK(spec.seed == 9);
  CHECK(spec.model == ChannelModel::soft_handoff);
  CHECK(spec.num_cells == 2);
  CHECK(spec.gamma.kind == GammaSpec::Kind::uniform);
  CHECK(spec.snr_db == doctest::Approx(15.0));
  CHECK(spec.out_path == "out.csv");

  // the rendered manifest is a valid config that reparses to the same spec
  const ExperimentSpec again = parse_config_text(render_config(spec));
  CHECK(render_config(again) == render_config(spec));
}

TEST_CASE("config errors carry field paths") {
  CHECK_THROWS_WITH_AS(parse_config_text("[experiment]\nschemes = RCoF\n"),
                       doctest::Contains("experiment.grid"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[experiment]\nschemes = RCoF\ngrid = 1\ntrials = soon\n"),
      doctest::Contains("experiment.trials"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[experiment]\nschemes = RCoF\ngrid = 1\np = 15\n"),
      doctest::Contains("experiment.p"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[experiment]\nschemes = RCoF\ngrid = 3,2\n"),
      doctest::Contains("sorted ascending"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[experiment]\nschemes = RCoF\ngrid = 1\nwhat = 3\n"),
      doctest::Contains("experiment.what"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text("[experiment]\nschemes = CoF\ngrid = 1\n"),
      doctest::Contains("experiment.schemes"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("schemes = RCoF\n"), ConfigError);
}

TEST_CASE("csv emission layout") {
  ExperimentSpec spec = parse_config_text(kSmallConfig);
  CurveSet empty;
  empty.spec = spec;
  const std::string header_only = csv_of(empty);
  const auto header_pos = header_only.find("scheme,x,mean_rate,stderr,rank_deficiency_fraction,trials,seed\n");
  REQUIRE(header_pos != std::string::npos);
  CHECK(header_only.substr(header_pos).find('\n') == header_only.substr(header_pos).size() - 1);

  // two schemes x three grid points = six data rows
  CurveSet curves = run_sweep(spec);
  CHECK(curves.points.size() == 6);
  const std::string text = csv_of(curves);
  std::size_t rows = 0;
  std::istringstream is(text);
  for (std::string line; std::getline(is, line);)
    if (!line.empty() && line[0] != '#' && line.rfind("scheme,", 0) != 0) ++rows;
  CHECK(rows == 6);

  // scheme-major ordering, x ascending within a scheme
  CHECK(curves.points[0].scheme == Scheme::RCoF);
  CHECK(curves.points[2].scheme == Scheme::RCoF);
  CHECK(curves.points[3].scheme == Scheme::RQCoF);
  CHECK(curves.points[0].x < curves.points[1].x);
}

TEST_CASE("sweeps are deterministic") {
  const ExperimentSpec spec = parse_config_text(kSmallConfig);
  const std::string first = csv_of(run_sweep(spec));
  const std::string second = csv_of(run_sweep(spec));
  CHECK(first == second);

  ExperimentSpec reseeded = spec;
  reseeded.seed = 10;
  CHECK(csv_of(run_sweep(reseeded)) != first);
}

TEST_CASE("standard error shrinks like one over root trials") {
  ExperimentSpec spec = parse_config_text(kSmallConfig);
  spec.schemes = {Scheme::RCoF};
  spec.grid = {20.0};  // uncapped: rate variance comes from the channel draw
  spec.trials = 100;
  const CurvePoint p100 = run_sweep(spec).points.at(0);
  spec.trials = 400;
  const CurvePoint p400 = run_sweep(spec).points.at(0);
  REQUIRE(p400.std_error > 0.0);
  CHECK(p100.std_error / p400.std_error > 1.8);
  CHECK(p100.std_error / p400.std_error < 2.2);
}

TEST_CASE("rcof saturates the backhaul on the soft-handoff model") {
  // deterministic single trial at gamma = 1: integer channel, so the sweep
  // returns the analytic value exactly (no non-integer penalty)
  ExperimentSpec spec;
  spec.schemes = {Scheme::RCoF};
  spec.model = ChannelModel::soft_handoff;
  spec.num_cells = 2;
  spec.num_users = 2;
  spec.gamma = GammaSpec::fixed(1.0);
  spec.axis = ExperimentSpec::Axis::r0;
  spec.grid = {2.0, 20.0};
  spec.snr_db = 20.0;
  spec.p = 251;
  spec.trials = 1;
  spec.seed = 5;
  const CurveSet curves = run_sweep(spec);
  const CurvePoint capped = curves.points.at(0);
  CHECK(capped.std_error == 0.0);
  CHECK(capped.mean_rate == doctest::Approx(2.0));  // min{R0, rate} = R0 here
  CHECK(capped.rank_deficiency_fraction == 0.0);

  // uncapped point: per-complex rate log2(snr_dim / sigma2) with a = h per
  // row, snr_dim = 2 * 100; worst row is the interfered one
  const CurvePoint open = curves.points.at(1);
  CHECK(open.mean_rate == doctest::Approx(7.6474584264549).epsilon(1e-9));
}

TEST_CASE("random selection hits rank deficiency where greedy does not") {
  ExperimentSpec spec;
  spec.schemes = {Scheme::RCoF};
  spec.model = ChannelModel::rayleigh;
  spec.num_cells = 5;
  spec.num_users = 20;
  spec.axis = ExperimentSpec::Axis::snr;
  spec.grid = {10.0};
  spec.r0 = 3.0;
  spec.p = 17;
  spec.trials = 120;
  spec.seed = 77;

  spec.selection = SelectionMode::random;
  const CurvePoint random_pt = run_sweep(spec).points.at(0);
  spec.selection = SelectionMode::greedy;
  const CurvePoint greedy_pt = run_sweep(spec).points.at(0);
  CHECK(random_pt.rank_deficiency_fraction > 0.0);
  CHECK(greedy_pt.rank_deficiency_fraction < random_pt.rank_deficiency_fraction);

  // the deficiency is a Z_p phenomenon: the real-valued coefficient rows stay
  // independent (rank 5 over R with probability one)
  Rng rng(123);
  const Eigen::MatrixXd h = rayleigh_matrix(20, 5, rng);
  IntMatrix rows(5, 5);
  for (Eigen::Index k = 0; k < 5; ++k)
    rows.row(k) = best_coeff_qcof(h.row(k).transpose(), 10.0, 17).transpose();
  Eigen::FullPivLU<Eigen::MatrixXd> lu(rows.cast<double>());
  CHECK(lu.rank() == 5);
}

TEST_CASE("spec validation rejects inconsistent setups") {
  ExperimentSpec spec = parse_config_text(kSmallConfig);
  spec.selection = SelectionMode::greedy;
  CHECK_THROWS_AS(spec.validate(), ConfigError);  // selection on soft-handoff

  ExperimentSpec ray = spec;
  ray.model = ChannelModel::rayleigh;
  ray.selection = SelectionMode::none;
  ray.num_users = 4;
  ray.num_cells = 2;
  CHECK_THROWS_AS(ray.validate(), ConfigError);  // K > L without selection

  ExperimentSpec cifbf = parse_config_text(kSmallConfig);
  cifbf.schemes = {Scheme::CIFBF_RCoF};
  cifbf.grid = {0.5, 1.0};
  CHECK_NOTHROW(cifbf.validate());
  cifbf.grid = {0.0, 1.0};
  CHECK_THROWS_AS(cifbf.validate(), ConfigError);  // CIFBF needs R0 > 0
}

TEST_CASE("overlay rows surface in the csv") {
  ExperimentSpec spec = parse_config_text(kSmallConfig);
  spec.trials = 2;
  CurveSet curves = run_sweep(spec);
  curves.overlays.push_back(OverlayRow{"upper_bound", 1.0, 1.0});
  curves.overlays.push_back(OverlayRow{"upper_bound", 3.0, 3.0});
  const std::string text = csv_of(curves);
  CHECK(text.find("upper_bound,1,1,0,0,0,9\n") != std::string::npos);
}
