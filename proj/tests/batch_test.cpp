#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "m2m/batch.hpp"
#include "m2m/errors.hpp"

using namespace m2m;
using namespace m2m::io;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("m2m_batch_" + name);
  fs::remove_all(p);
  return p;
}

Json small_manifest(const fs::path& out) {
  return {
      {"base",
       {{"slots_per_period", 10},
        {"periods", 3},
        {"cell", {{"access_rbs", 4}}},
        {"slices", {{{"weight", 2}, {"devices", 3}}, {{"weight", 1}, {"devices", 2}}}}}},
      {"scenarios", {"custom"}},
      {"schemes", {"pomdp_with_loop", "no_observation_no_loop"}},
      {"seeds", {{"start", 4}, {"count", 2}}},
      {"sweep", {{"variable", "rb_per_slice"}, {"values", {1, 2}}}},
      {"out_dir", out.string()},
  };
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> rows;
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
    rows.push_back(f);
  }
  return rows;
}

}  // namespace

TEST_CASE("empty manifest succeeds with no runs") {
  const auto out = scratch("empty");
  Json doc = {{"out_dir", out.string()}};
  const auto m = manifest_from_json(doc);
  CHECK(m.runs.empty());
  const auto res = run_batch(m);
  CHECK(res.exit_code == 0);
  CHECK(res.rows.empty());
  const auto rows = read_csv(out / "aggregate.csv");
  CHECK(rows.size() == 1);
  fs::remove_all(out);
}

TEST_CASE("manifest expansion and sweep application") {
  const auto m = manifest_from_json(small_manifest(scratch("expand")));
  REQUIRE(m.runs.size() == 8);
  CHECK(m.runs[0].config.cell.access_rbs == 2);
  CHECK(m.runs[2].config.cell.access_rbs == 4);
  CHECK(m.runs[0].config.seed == 4);
  CHECK(m.runs[1].config.seed == 5);
  CHECK(m.runs[0].sweep_variable == "rb_per_slice");

  sim::SimConfig c = config_from_json(Json{{"scenario", "paper_homogeneous"}});
  apply_sweep(c, "epsilon", 0.3);
  CHECK(c.epsilon == 0.3);
  CHECK(c.phi == 0.3);
  apply_sweep(c, "collision_prob", 0.2);
  CHECK(c.collision.value == 0.2);
  CHECK_THROWS_AS(apply_sweep(c, "rb_per_slice", 1.5), ValidationError);
  CHECK_THROWS_AS(apply_sweep(c, "radius", 3), ValidationError);
}

TEST_CASE("duplicate (config, seed) pairs are rejected") {
  Json run = {{"scenario", "paper_homogeneous"}, {"seed", 3}};
  CHECK_THROWS_AS(manifest_from_json(Json{{"runs", {run, run}}}), ValidationError);
  Json other = run;
  other["seed"] = 4;
  CHECK(manifest_from_json(Json{{"runs", {run, other}}}).runs.size() == 2);
  CHECK(config_hash(config_from_json(run)) == config_hash(config_from_json(other)));
}

TEST_CASE("aggregate rows are the means of the per-run files") {
  const auto out = scratch("aggregate");
  auto m = manifest_from_json(small_manifest(out));
  const auto res = run_batch(m);
  CHECK(res.exit_code == 0);
  const auto agg = read_csv(out / "aggregate.csv");
  REQUIRE(agg.size() == 9);
  for (std::size_t i = 1; i < agg.size(); ++i) {
    const auto& row = agg[i];
    CHECK(row[5] == "ok");
    CHECK(row[9] == "1");
    const auto recs = read_metrics_csv(out / row[10]);
    double top = 0, all = 0;
    int n_top = 0;
    for (const auto& r : recs) {
      all += r.mean_reward;
      if (r.slice_id == 0) {
        top += r.mean_reward;
        ++n_top;
      }
    }
    CHECK(std::abs(std::stod(row[6]) - top / n_top) < 1e-9);
    CHECK(std::abs(std::stod(row[7]) - all / static_cast<double>(recs.size())) < 1e-9);
  }

  // Thread count does not change any output byte.
  const auto serial = scratch("aggregate_serial");
  auto m1 = manifest_from_json(small_manifest(serial));
  m1.threads = 1;
  run_batch(m1);
  std::ifstream a(out / "aggregate.csv"), b(serial / "aggregate.csv");
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  std::string a_text = sa.str(), b_text = sb.str();
  // File columns differ only by directory, which is relative here.
  CHECK(a_text == b_text);
  fs::remove_all(out);
  fs::remove_all(serial);
}

TEST_CASE("a failing run is recorded and the batch carries on") {
  const auto out = scratch("failure");
  auto m = manifest_from_json(small_manifest(out));
  // Block the first run's output file with a directory.
  fs::create_directories(out / "runs" / "custom__pomdp_with_loop__rb_per_slice-1__seed4.csv");
  const auto res = run_batch(m);
  CHECK(res.exit_code == 3);
  CHECK(res.rows[0].status.rfind("error:", 0) == 0);
  for (std::size_t i = 1; i < res.rows.size(); ++i) CHECK(res.rows[i].status == "ok");
  fs::remove_all(out);
}
