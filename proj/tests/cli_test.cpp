#include "scriptor/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "gtest/gtest.h"

namespace fs = std::filesystem;

namespace scriptor::cli {
namespace {

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("scriptor_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }

private:
    fs::path path_;
};

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string slurp(const fs::path& p) { return detail::read_file(p); }

struct Run {
    int code;
    std::string out;
};

// Runs the built binary with stdout captured; stderr goes to `<dir>/stderr`.
Run run_cli(const std::string& args, const fs::path& dir, const std::string& env = "") {
    const auto out = dir / "stdout", err = dir / "stderr";
    const std::string cmd = env + " \"" SCRIPTOR_CLI_PATH "\" " + args + " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WEXITSTATUS(status), slurp(out)};
}

TEST(Extract, SingleRecording) {
    TempDir tmp;
    write(tmp.path() / "a.csv", std::string(kRecordingHeader) + "\n0,10,10,1,0,0,300\n8,20,10,1,0,0,310\n16,30,15,1,0,0,320\n");
    write(tmp.path() / "manifest.csv", std::string(kManifestHeader) + "\na.csv,P01,CL,1\n");
    std::ostringstream log;
    const auto out = tmp.path() / "features.csv";
    ASSERT_EQ(cmd_extract(tmp.path() / "manifest.csv", out, RunConfig{}, log), 0) << log.str();
    const auto rows = parse_feature_table(slurp(out));
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].meta.participant_id, "P01");
    EXPECT_EQ(rows[0].features[Feature::Ndown], 1);
    EXPECT_EQ(rows[0].features[Feature::Pmax], 320);
}

TEST(Extract, MissingFileIsNamedAndFails) {
    TempDir tmp;
    write(tmp.path() / "a.csv", std::string(kRecordingHeader) + "\n0,10,10,1,0,0,300\n8,20,10,1,0,0,310\n");
    write(tmp.path() / "manifest.csv", std::string(kManifestHeader) + "\na.csv,P01,CL,1\nnope.csv,P02,NOR,1\n");
    std::ostringstream log;
    const auto out = tmp.path() / "features.csv";
    EXPECT_NE(cmd_extract(tmp.path() / "manifest.csv", out, RunConfig{}, log), 0);
    EXPECT_NE(log.str().find("nope.csv"), std::string::npos) << log.str();
    EXPECT_EQ(parse_feature_table(slurp(out)).size(), 1u);
}

TEST(Extract, InvalidRecordingIsLoggedWithIndex) {
    TempDir tmp;
    write(tmp.path() / "a.csv", std::string(kRecordingHeader) + "\n0,10,10,1,0,0,300\n8,20,10,1,0,0,310\n8,20,10,1,0,0,310\n");
    write(tmp.path() / "manifest.csv", std::string(kManifestHeader) + "\na.csv,P01,CL,1\n");
    std::ostringstream log;
    EXPECT_NE(cmd_extract(tmp.path() / "manifest.csv", tmp.path() / "f.csv", RunConfig{}, log), 0);
    EXPECT_NE(log.str().find("sample 2"), std::string::npos) << log.str();
}

TEST(Extract, DefaultCohortGivesOneRowPerRecording) {
    TempDir tmp;
    std::ostringstream log;
    ASSERT_EQ(cmd_synth(std::nullopt, tmp.path() / "cohort", RunConfig{}, log), 0) << log.str();
    const auto out = tmp.path() / "features.csv";
    ASSERT_EQ(cmd_extract(tmp.path() / "cohort" / "manifest.csv", out, RunConfig{}, log), 0) << log.str();
    EXPECT_EQ(parse_feature_table(slurp(out)).size(), 196u);
}

TEST(Analyze, IdenticalGroupsGiveUnitP) {
    TempDir tmp;
    CohortTable rows;
    for (auto g : kAllGroups)
        for (int i = 0; i < 3; ++i) {
            FeatureRow r;
            r.meta = {std::string(to_string(g)) + std::to_string(i), TaskId::Pentagons, g};
            for (auto& v : r.features.values) v = 5.0;
            rows.push_back(r);
        }
    write(tmp.path() / "f.csv", emit_feature_table(rows));
    RunConfig cfg;
    cfg.format = ReportFormat::Json;
    std::ostringstream log;
    ASSERT_EQ(cmd_analyze(tmp.path() / "f.csv", tmp.path() / "a.json", cfg, log), 0) << log.str();
    const auto doc = parse_analysis(slurp(tmp.path() / "a.json"));
    ASSERT_EQ(doc.reports.size(), 5u + kFeatureCount);
    for (const auto& r : doc.reports) {
        EXPECT_EQ(r.p, 1.0) << r.effect;
        EXPECT_FALSE(r.significant);
        for (const auto& pw : r.pairwise) EXPECT_EQ(pw.p_bonferroni, 1.0);
    }
}

TEST(Report, HandcraftedAnalysis) {
    TempDir tmp;
    write(tmp.path() / "a.json", R"({"alpha":0.05,"reports":[{"effect":"Ductus","task":1,"F":13.2,"df":[2,46],
        "p":0.00003,"significant":true,"descriptives":[{"group":"CL","n":14,"mean":26.2857,"sd":3.48}],
        "pairwise":[],"excluded":[]}]})");
    std::ostringstream log;
    ASSERT_EQ(cmd_report(tmp.path() / "a.json", tmp.path() / "r.txt", log), 0) << log.str();
    EXPECT_NE(slurp(tmp.path() / "r.txt").find("26.286 (3.480)"), std::string::npos);
}

TEST(Report, MalformedAnalysisFails) {
    TempDir tmp;
    write(tmp.path() / "a.json", R"({"reports":[{"effect":"Ductus"}]})");
    std::ostringstream log;
    EXPECT_NE(cmd_report(tmp.path() / "a.json", tmp.path() / "r.txt", log), 0);
    EXPECT_NE(log.str().find("$.reports[0]"), std::string::npos) << log.str();
}

TEST(Binary, EmptyReportIsEmpty) {
    TempDir tmp;
    write(tmp.path() / "a.json", "{}");
    const auto r = run_cli("report -i \"" + (tmp.path() / "a.json").string() + "\"", tmp.path());
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "");
}

TEST(Binary, UsageErrorsExitNonzero) {
    TempDir tmp;
    EXPECT_NE(run_cli("", tmp.path()).code, 0);
    EXPECT_NE(run_cli("analyze", tmp.path()).code, 0);
    EXPECT_NE(run_cli("--format xml report -i x.json", tmp.path()).code, 0);
}

TEST(Binary, EnvironmentOverridesDefaults) {
    TempDir tmp;
    // A 40 ms gap is idle at the default threshold but not at 50 ms.
    write(tmp.path() / "a.csv", std::string(kRecordingHeader) + "\n0,0,0,1,0,0,300\n8,1,0,1,0,0,300\n48,5,0,1,0,0,300\n56,6,0,1,0,0,300\n");
    write(tmp.path() / "m.csv", std::string(kManifestHeader) + "\na.csv,P01,CL,1\n");
    const auto args = "extract -m \"" + (tmp.path() / "m.csv").string() + "\"";
    const auto dflt = parse_feature_table(run_cli(args, tmp.path()).out);
    const auto env = parse_feature_table(run_cli(args, tmp.path(), "SCRIPTOR_IDLE_THRESHOLD_MS=50").out);
    ASSERT_EQ(dflt.size(), 1u);
    ASSERT_EQ(env.size(), 1u);
    EXPECT_EQ(dflt[0].features[Feature::Nidle], 1);
    EXPECT_EQ(env[0].features[Feature::Nidle], 0);
    const auto flag = parse_feature_table(run_cli("--idle-threshold-ms 50 " + args, tmp.path()).out);
    EXPECT_EQ(flag[0].features[Feature::Nidle], 0);
}

TEST(Binary, FullPipeline) {
    TempDir tmp;
    const auto dir = tmp.path();
    const auto q = [](const fs::path& p) { return "\"" + p.string() + "\""; };
    ASSERT_EQ(run_cli("synth --out-dir " + q(dir / "cohort"), dir).code, 0) << slurp(dir / "stderr");
    ASSERT_EQ(run_cli("extract -m " + q(dir / "cohort" / "manifest.csv") + " -o " + q(dir / "f.csv"), dir).code, 0)
        << slurp(dir / "stderr");
    ASSERT_EQ(run_cli("--format json analyze -f " + q(dir / "f.csv") + " -o " + q(dir / "a.json"), dir).code, 0)
        << slurp(dir / "stderr");
    const auto text = run_cli("report -i " + q(dir / "a.json"), dir);
    ASSERT_EQ(text.code, 0);
    const auto direct = run_cli("analyze -f " + q(dir / "f.csv"), dir);
    EXPECT_EQ(direct.out, text.out);

    const auto doc = parse_analysis(slurp(dir / "a.json"));
    int ductus = 0;
    for (const auto& r : doc.reports) {
        EXPECT_EQ(r.df_between, 2);
        if (r.effect != "Ductus") continue;
        ++ductus;
        EXPECT_TRUE(r.significant) << "task " << task_number(*r.task);
        ASSERT_EQ(r.descriptives.size(), 3u);
        EXPECT_GT(r.descriptives[0].mean, r.descriptives[1].mean);
        EXPECT_GT(r.descriptives[1].mean, r.descriptives[2].mean);
        EXPECT_NE(text.out.find(format_mean_sd(r.descriptives[0].mean, r.descriptives[0].sd)), std::string::npos);
    }
    EXPECT_EQ(ductus, 4);
}

TEST(Binary, SynthSeedOverride) {
    TempDir tmp;
    const auto dir = tmp.path();
    ASSERT_EQ(run_cli("--seed 7 synth --out-dir \"" + (dir / "a").string() + "\"", dir).code, 0);
    ASSERT_EQ(run_cli("synth --out-dir \"" + (dir / "b").string() + "\"", dir, "SCRIPTOR_SEED=7").code, 0);
    ASSERT_EQ(run_cli("synth --out-dir \"" + (dir / "c").string() + "\"", dir).code, 0);
    EXPECT_EQ(slurp(dir / "a" / "CL01_task1.csv"), slurp(dir / "b" / "CL01_task1.csv"));
    EXPECT_NE(slurp(dir / "a" / "CL01_task1.csv"), slurp(dir / "c" / "CL01_task1.csv"));
}

TEST(Binary, DefaultSpecFeedsSynth) {
    TempDir tmp;
    const auto dir = tmp.path();
    const auto spec = run_cli("default-spec", dir);
    ASSERT_EQ(spec.code, 0);
    write(dir / "spec.json", spec.out);
    ASSERT_EQ(run_cli("synth --spec \"" + (dir / "spec.json").string() + "\" --out-dir \"" + (dir / "a").string() + "\"", dir).code, 0);
    ASSERT_EQ(run_cli("synth --out-dir \"" + (dir / "b").string() + "\"", dir).code, 0);
    EXPECT_EQ(slurp(dir / "a" / "manifest.csv"), slurp(dir / "b" / "manifest.csv"));
    EXPECT_EQ(slurp(dir / "a" / "NOR20_task4.csv"), slurp(dir / "b" / "NOR20_task4.csv"));
}

}  // namespace
}  // namespace scriptor::cli
