#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#ifndef FCONJ_BINARY
#error "FCONJ_BINARY must point at the fconj executable"
#endif
#ifndef TEST_TMPDIR
#error "TEST_TMPDIR must point at a writable scratch directory"
#endif

namespace {

using nlohmann::json;

const double kGolden = 0.6180339887498949;
const double kSqrt2m1 = 0.41421356237309515;

std::string tmp_path(const std::string& name) {
  return std::string(TEST_TMPDIR) + "/" + name;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  ASSERT_TRUE(out.good()) << path;
  out << text;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_fconj(const std::string& args, const std::string& tag) {
  std::string cmd = std::string(FCONJ_BINARY) + " " + args + " > " +
                    tmp_path(tag + ".stdout") + " 2> " +
                    tmp_path(tag + ".stderr");
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

json map_json(double theta, int d, json f = json::object()) {
  return json{{"theta", theta}, {"d", d}, {"f", f}};
}

TEST(Cli, BuildM2EmitsVerifiedReport) {
  json cfg{{"alpha", map_json(kGolden, 1)},
           {"beta", map_json(kGolden, 1, {{"cos", {0.3}}})},
           {"eps", 1e-1}};
  std::string cfg_path = tmp_path("m2_cfg.json");
  std::string out_path = tmp_path("m2_report.json");
  write_file(cfg_path, cfg.dump());
  int rc = run_fconj("build m2 --config " + cfg_path + " --out " + out_path, "m2");
  ASSERT_EQ(rc, 0) << read_file(tmp_path("m2.stderr"));

  json report = json::parse(read_file(out_path));
  EXPECT_EQ(report.at("mode"), "m2");
  EXPECT_LE(report.at("result").at("sup_defect").get<double>(), 1e-1);
  EXPECT_LE(report.at("verification").at("certified_sup").get<double>(), 1e-1);
  EXPECT_EQ(report.at("config").at("eps").get<double>(), 1e-1);
}

TEST(Cli, EpsFlagOverridesTheConfigValue) {
  json cfg{{"alpha", map_json(kGolden, 1)},
           {"beta", map_json(kGolden, 1, {{"cos", {0.3}}})},
           {"eps", 0.5}};
  std::string cfg_path = tmp_path("override_cfg.json");
  std::string out_path = tmp_path("override_report.json");
  write_file(cfg_path, cfg.dump());
  int rc = run_fconj(
      "build m2 --config " + cfg_path + " --eps 0.05 --out " + out_path,
      "override");
  ASSERT_EQ(rc, 0);
  json report = json::parse(read_file(out_path));
  EXPECT_EQ(report.at("config").at("eps").get<double>(), 0.05);
  EXPECT_LE(report.at("result").at("target_eps").get<double>(), 0.05);
}

TEST(Cli, BuildM1WritesAProfileCsvNextToTheReport) {
  json cfg{{"alpha", map_json(kGolden, 1)},
           {"beta", map_json(kGolden, 1, {{"cos", {0.3}}})},
           {"eps", 5e-2},
           {"samples", 20000}};
  std::string cfg_path = tmp_path("m1_cfg.json");
  std::string out_path = tmp_path("m1_report.json");
  write_file(cfg_path, cfg.dump());
  int rc = run_fconj("build m1 --config " + cfg_path + " --out " + out_path, "m1");
  ASSERT_EQ(rc, 0) << read_file(tmp_path("m1.stderr"));

  json report = json::parse(read_file(out_path));
  EXPECT_EQ(report.at("result").at("discontinuity_count").get<int>(), 0);
  std::string csv = read_file(tmp_path("m1_report.csv"));
  EXPECT_EQ(csv.rfind("threshold,estimate,error_bound\n", 0), 0u);
  EXPECT_EQ(report.at("result").at("profile").size(), 3u);
}

TEST(Cli, BuildOnObstructedPairExitsTwoWithReport) {
  json cfg{{"alpha", map_json(kGolden, 1)},
           {"beta", map_json(kSqrt2m1, 1)},
           {"eps", 1e-1}};
  std::string cfg_path = tmp_path("obs_build_cfg.json");
  std::string out_path = tmp_path("obs_build_report.json");
  write_file(cfg_path, cfg.dump());
  int rc = run_fconj(
      "build m2 --config " + cfg_path + " --out " + out_path, "obs_build");
  EXPECT_EQ(rc, 2);
  json report = json::parse(read_file(out_path));
  EXPECT_EQ(report.at("mode"), "obstruction");
  EXPECT_FALSE(report.at("report").at("rotation_compatible").get<bool>());
}

TEST(Cli, ObstructVerdictDrivesTheExitCode) {
  json bad{{"alpha", map_json(kGolden, 1)},
           {"beta", map_json(kSqrt2m1, 2)},
           {"candidates", 50}};
  std::string bad_path = tmp_path("obstruct_bad.json");
  std::string bad_out = tmp_path("obstruct_bad_report.json");
  write_file(bad_path, bad.dump());
  EXPECT_EQ(run_fconj("obstruct --config " + bad_path + " --out " + bad_out,
                      "obstruct_bad"),
            2);
  json report = json::parse(read_file(bad_out));
  EXPECT_FALSE(report.at("compatible").get<bool>());
  EXPECT_GT(report.at("report").at("rotation_gap_minus").get<double>(), 0.0);
  EXPECT_GE(report.at("report").at("slice_defect_min").get<double>(), 0.0);

  json good{{"alpha", map_json(kGolden, 1)},
            {"beta", map_json(kGolden, -1)},
            {"candidates", 50}};
  std::string good_path = tmp_path("obstruct_good.json");
  write_file(good_path, good.dump());
  EXPECT_EQ(run_fconj("obstruct --config " + good_path, "obstruct_good"), 0);
}

TEST(Cli, KinvComparesInvariantRecords) {
  json iso{{"alpha", map_json(kGolden, 2)},
           {"beta", map_json(1.0 - kGolden, -2)}};
  std::string iso_path = tmp_path("kinv_iso.json");
  std::string iso_out = tmp_path("kinv_iso_report.json");
  write_file(iso_path, iso.dump());
  EXPECT_EQ(run_fconj("kinv --config " + iso_path + " --out " + iso_out,
                      "kinv_iso"),
            0);
  json report = json::parse(read_file(iso_out));
  EXPECT_TRUE(report.at("isomorphic").get<bool>());

  json diff{{"alpha", map_json(kGolden, 1)}, {"beta", map_json(kGolden, 2)}};
  std::string diff_path = tmp_path("kinv_diff.json");
  write_file(diff_path, diff.dump());
  EXPECT_EQ(run_fconj("kinv --config " + diff_path, "kinv_diff"), 2);

  json solo{{"alpha", map_json(kSqrt2m1, 3)}};
  std::string solo_path = tmp_path("kinv_solo.json");
  std::string solo_out = tmp_path("kinv_solo_report.json");
  write_file(solo_path, solo.dump());
  EXPECT_EQ(run_fconj("kinv --config " + solo_path + " --out " + solo_out,
                      "kinv_solo"),
            0);
  json solo_report = json::parse(read_file(solo_out));
  EXPECT_EQ(solo_report.at("alpha_invariant").at("torsion_order").get<int>(), 3);
  EXPECT_FALSE(solo_report.contains("isomorphic"));
}

TEST(Cli, TowerReportCarriesArcsAndHeights) {
  json cfg{{"theta", kSqrt2m1}, {"n", 10}};
  std::string cfg_path = tmp_path("tower_cfg.json");
  std::string out_path = tmp_path("tower_report.json");
  write_file(cfg_path, cfg.dump());
  ASSERT_EQ(run_fconj("tower --config " + cfg_path + " --out " + out_path,
                      "tower"),
            0);
  json report = json::parse(read_file(out_path));
  EXPECT_EQ(report.at("tower").at("arcs").size(), 2u);
  EXPECT_GE(report.at("tower").at("min_height").get<int>(), 10);
  EXPECT_NEAR(report.at("tower").at("total_mass").get<double>(), 1.0, 1e-12);
}

TEST(Cli, SolveCoboundaryExactAndWindingVariants) {
  json exact{{"theta", kGolden},
             {"f", {{"constant", 0.0}, {"sin", {0.0, 0.3}}}}};
  std::string exact_path = tmp_path("cob_exact.json");
  std::string exact_out = tmp_path("cob_exact_report.json");
  write_file(exact_path, exact.dump());
  ASSERT_EQ(run_fconj("solve-coboundary --config " + exact_path + " --out " +
                          exact_out,
                      "cob_exact"),
            0);
  json report = json::parse(read_file(exact_out));
  EXPECT_LT(report.at("residual_sup").get<double>(), 1e-10);

  json winding{{"theta", kSqrt2m1},
               {"d", 2},
               {"eps", 1e-1},
               {"f", {{"constant", 0.5}, {"cos", {0.3}}}}};
  std::string wind_path = tmp_path("cob_wind.json");
  std::string wind_out = tmp_path("cob_wind_report.json");
  write_file(wind_path, winding.dump());
  ASSERT_EQ(run_fconj("solve-coboundary --config " + wind_path + " --out " +
                          wind_out,
                      "cob_wind"),
            0);
  json wreport = json::parse(read_file(wind_out));
  EXPECT_LT(wreport.at("winding_coboundary")
                .at("certificate")
                .at("achieved_sup")
                .get<double>(),
            1e-1);
}

TEST(Cli, MalformedInputsExitSixtyFour) {
  std::string broken_path = tmp_path("broken.json");
  write_file(broken_path, "{ this is not json");
  EXPECT_EQ(run_fconj("tower --config " + broken_path, "broken"), 64);

  json missing{{"alpha", map_json(kGolden, 1)}};  // build needs beta too
  std::string missing_path = tmp_path("missing.json");
  write_file(missing_path, missing.dump());
  EXPECT_EQ(run_fconj("build m2 --config " + missing_path, "missing"), 64);

  json noeps{{"alpha", map_json(kGolden, 1)}, {"beta", map_json(kGolden, 1)}};
  std::string noeps_path = tmp_path("noeps.json");
  write_file(noeps_path, noeps.dump());
  EXPECT_EQ(run_fconj("build m2 --config " + noeps_path, "noeps"), 64);

  EXPECT_EQ(run_fconj("build frobnicate --config " + noeps_path, "badmode"), 64);
  EXPECT_EQ(run_fconj("", "nosub"), 64);

  json badmap{{"alpha", map_json(kGolden, 0)},
              {"beta", map_json(kGolden, 1)},
              {"eps", 1e-1}};  // d = 0 is rejected by the map constructor
  std::string badmap_path = tmp_path("badmap.json");
  write_file(badmap_path, badmap.dump());
  EXPECT_EQ(run_fconj("build m2 --config " + badmap_path, "badmap"), 64);
}

TEST(Cli, ReportsAreByteStableAcrossReruns) {
  // Flag overrides are echoed into the report's config block, so byte
  // stability is only promised for identical invocations: fix the output
  // path inside the config and run the same command twice.
  std::string out = tmp_path("stable_report.json");
  json cfg{{"alpha", map_json(kSqrt2m1, 1)},
           {"beta", map_json(0.7320508075688772, 1)},
           {"candidates", 100},
           {"seed", 12345},
           {"out", out}};
  std::string cfg_path = tmp_path("stable_cfg.json");
  write_file(cfg_path, cfg.dump());
  EXPECT_EQ(run_fconj("obstruct --config " + cfg_path, "stable1"), 2);
  std::string a = read_file(out);
  EXPECT_EQ(run_fconj("obstruct --config " + cfg_path, "stable2"), 2);
  std::string b = read_file(out);
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a, b);
}

}  // namespace
