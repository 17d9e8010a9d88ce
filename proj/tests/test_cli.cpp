#include "support/ml1m_fixture.hpp"
#include "support/temp_dir.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

namespace fs = std::filesystem;
using dyta::testing::TempDir;

namespace {

struct Result {
    int exit_code = -1;
    std::string out;
    fs::path run_dir; // first stdout line naming an existing directory
};

Result cli(const std::string& args, bool with_stderr = false)
{
    const std::string cmd = std::string(DYTA_CLI_PATH) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null");
    Result r;
    FILE* pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) {
        return r;
    }
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), pipe)) {
        r.out += buf.data();
    }
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::istringstream lines(r.out);
    for (std::string line; std::getline(lines, line);) {
        if (!line.empty() && fs::is_directory(line)) {
            r.run_dir = line;
            break;
        }
    }
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t csv_rows(const fs::path& p)
{
    const auto text = slurp(p);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

class Cli : public ::testing::Test {
protected:
    static void SetUpTestSuite()
    {
        dir_ = new TempDir;
        dyta::testing::write_ml1m_fixture(*dir_ / "ml-1m", {60, 300, 20, 40, 23});
    }
    static void TearDownTestSuite()
    {
        delete dir_;
        dir_ = nullptr;
    }

    /// Writes a config with `extra` JSON members merged in and returns its path.
    static std::string config(const std::string& name, const nlohmann::json& extra = nlohmann::json::object())
    {
        nlohmann::json j{{"dataset_dir", (*dir_ / "ml-1m").string()},
                         {"user_sample", {{"count", 15}, {"seed", 7}}},
                         {"runs", 2},
                         {"output_dir", (*dir_ / "runs").string()}};
        j.update(extra);
        const auto path = *dir_ / (name + ".json");
        std::ofstream(path) << j.dump();
        return path.string();
    }

    static TempDir* dir_;
};

TempDir* Cli::dir_ = nullptr;

} // namespace

TEST_F(Cli, ValidateEchoesResolvedDefaults)
{
    const auto r = cli("validate --config " + config("minimal"));
    ASSERT_EQ(r.exit_code, 0) << r.out;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["history_len"], 10);
    EXPECT_EQ(j["llm"]["temperature"], 0.1);
    EXPECT_EQ(j["config_digest"].get<std::string>().size(), 16u);
}

TEST_F(Cli, ValidateRejectsBadConfigs)
{
    EXPECT_EQ(cli("validate --config " + config("hot", {{"llm", {{"temperature", 3.0}}}})).exit_code, 1);
    EXPECT_EQ(cli("validate --config " + config("typo", {{"icl", 3}})).exit_code, 1);
    EXPECT_EQ(cli("validate --config " + config("noprompts", {{"prompts_dir", "/nonexistent"}})).exit_code, 1);
    EXPECT_EQ(cli("validate").exit_code, 1);
    EXPECT_EQ(cli("frobnicate").exit_code, 1);
}

TEST_F(Cli, MissingPromptFileIsNamed)
{
    TempDir prompts;
    for (const auto& entry : fs::directory_iterator(fs::path(DYTA_SOURCE_DIR) / "prompts")) {
        if (entry.path().filename() != "tpe_seq.txt") {
            fs::copy_file(entry.path(), prompts / entry.path().filename().string());
        }
    }
    const auto r = cli("validate --config " + config("partial", {{"prompts_dir", prompts.path().string()}}), true);
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.out.find("tpe_seq.txt"), std::string::npos) << r.out;
}

TEST_F(Cli, RunGroundTruthFirstIsPerfect)
{
    const auto r = cli("run --config " + config("gt") + " --preset dyta_rrf --backend mock --mock-policy gt_first");
    ASSERT_EQ(r.exit_code, 0) << r.out;
    ASSERT_FALSE(r.run_dir.empty());
    EXPECT_EQ(r.run_dir.filename().string().rfind("dyta_rrf-", 0), 0u);
    const auto report = nlohmann::json::parse(slurp(r.run_dir / "report.json"));
    EXPECT_EQ(report["report"]["metrics"]["ndcg_at_5"], 1.0);
    EXPECT_EQ(report["report"]["metrics"]["ndcg_at_10"], 1.0);
    EXPECT_EQ(report["report"]["metrics"]["hr_at_3"], 1.0);
    const auto& manifest = report["manifest"];
    EXPECT_EQ(manifest["seeds"], nlohmann::json::array({1, 2}));
    EXPECT_EQ(manifest["user_sample"]["users"].size(), 15u);
    EXPECT_EQ(manifest["ledger"], "ledger.jsonl");
    EXPECT_EQ(manifest["backend"], "mock:gt_first");
    EXPECT_EQ(manifest["config_digest"], report["report"]["config_digest"]);
    EXPECT_TRUE(fs::exists(r.run_dir / "ledger.jsonl"));
    EXPECT_EQ(csv_rows(r.run_dir / "table1.csv"), 2u);
}

TEST_F(Cli, RunGroundTruthAtThree)
{
    const auto r = cli("run --config " + config("gt3") + " --preset dyta_bc --mock-policy gt_at:3");
    ASSERT_EQ(r.exit_code, 0) << r.out;
    const auto report = nlohmann::json::parse(slurp(r.run_dir / "report.json"));
    EXPECT_EQ(report["report"]["metrics"]["ndcg_at_5"], 0.5);
    EXPECT_EQ(report["report"]["metrics"]["hr_at_3"], 1.0);
}

TEST_F(Cli, IdenticalRunsGiveByteIdenticalReports)
{
    const auto cfg = config("det", {{"llm", {{"mock_policy", "utility"}, {"mock_utilities", {{"5", 2.0}, {"17", 1.5}}}}},
                                    {"workers", 3}});
    const auto a = cli("run --config " + cfg + " --preset dyta_rrf");
    const auto b = cli("run --config " + cfg + " --preset dyta_rrf");
    ASSERT_EQ(a.exit_code, 0);
    ASSERT_EQ(b.exit_code, 0);
    ASSERT_NE(a.run_dir, b.run_dir);
    EXPECT_EQ(slurp(a.run_dir / "report.json"), slurp(b.run_dir / "report.json"));
    const auto c = cli("run --config " + cfg + " --preset dyta_rrf --seed-offset 10");
    EXPECT_NE(slurp(a.run_dir / "report.json"), slurp(c.run_dir / "report.json"));
}

TEST_F(Cli, RandomBaselineRunsWithoutModelCalls)
{
    const auto r = cli("run --config " + config("rand") + " --preset random");
    ASSERT_EQ(r.exit_code, 0);
    const auto report = nlohmann::json::parse(slurp(r.run_dir / "report.json"));
    EXPECT_EQ(report["manifest"]["llm_calls"], 0);
    EXPECT_LT(report["report"]["metrics"]["ndcg_at_10"].get<double>(), 1.0);
}

TEST_F(Cli, ExperimentsEmitTheirCsvs)
{
    const auto cfg = config("exp", {{"runs", 1}});
    const auto bias = cli("experiment --config " + cfg + " --experiment position_bias --mock-policy position_picker");
    ASSERT_EQ(bias.exit_code, 0);
    EXPECT_EQ(csv_rows(bias.run_dir / "position_bias.csv"), 1u + 2u * 10u);

    const auto sweep = cli("experiment --config " + cfg + " --experiment sweep");
    ASSERT_EQ(sweep.exit_code, 0);
    EXPECT_EQ(csv_rows(sweep.run_dir / "sweep_icl.csv"), 1u + 4u);
    EXPECT_EQ(slurp(sweep.run_dir / "sweep_icl.csv").substr(0, 6), "icl_k,");
    EXPECT_EQ(csv_rows(sweep.run_dir / "sweep_history.csv"), 1u + 4u);

    const auto ablation = cli("experiment --config " + cfg + " ablation");
    ASSERT_EQ(ablation.exit_code, 0);
    EXPECT_EQ(csv_rows(ablation.run_dir / "table1.csv"), 1u + 9u);

    const auto dist = cli("experiment --config " + cfg + " --experiment rating_dist");
    ASSERT_EQ(dist.exit_code, 0);
    EXPECT_EQ(csv_rows(dist.run_dir / "rating_dist.csv"), 1u + 10u);

    EXPECT_EQ(cli("experiment --config " + cfg + " --experiment everything").exit_code, 1);
}

TEST_F(Cli, DataErrorsExitTwo)
{
    TempDir broken;
    dyta::testing::write_ml1m_fixture(broken.path(), {10, 50, 20, 25, 1});
    std::ofstream(broken / "ratings.dat", std::ios::app) << "1::1::9::978300760\n";
    const auto cfg = config("broken", {{"dataset_dir", broken.path().string()}});
    EXPECT_EQ(cli("run --config " + cfg + " --preset random").exit_code, 2);
}

TEST_F(Cli, UnusableBackendExitsThree)
{
    const auto cfg = config("dead", {{"llm", {{"mock_policy", "scripted"}}}});
    EXPECT_EQ(cli("run --config " + cfg + " --preset dyta_rrf").exit_code, 3);
}

TEST_F(Cli, InvalidRunExitsFour)
{
    // The scripted reply only names low item ids, so users whose page holds
    // none of them get no usable ranking while the rest succeed.
    std::string reply;
    for (int id = 1; id <= 30; ++id) {
        reply += std::to_string(id) + ", ";
    }
    nlohmann::json script{{"profile.init", "x"}, {"act.profile", reply}, {"act.rate", "4"}};
    const auto cfg = config("flaky", {{"llm", {{"mock_policy", "scripted"}, {"mock_script", script}}}});
    const auto r = cli("run --config " + cfg + " --preset long_term");
    ASSERT_EQ(r.exit_code, 4) << r.out;
    const auto report = nlohmann::json::parse(slurp(r.run_dir / "report.json"));
    const auto& run = report["report"]["per_run"][0];
    EXPECT_GT(run["evaluated"].get<int>(), 0);
    EXPECT_GT(run["backend_failures"].get<int>(), 0);
    EXPECT_EQ(report["report"]["valid"], false);
}

TEST_F(Cli, LiveBackendWithoutKeyIsConfigError)
{
    const auto r = cli("run --config " + config("live") + " --backend live");
    if (std::getenv("DYTA_API_KEY") == nullptr) {
        EXPECT_EQ(r.exit_code, 1);
    }
}

TEST_F(Cli, ReplayReproducesARecordedRun)
{
    const auto cfg = config("rec");
    const auto recorded = cli("run --config " + cfg + " --preset dyta_rrf --mock-policy gt_at:2");
    ASSERT_EQ(recorded.exit_code, 0);
    const auto replay_cfg = config("replay", {{"llm", {{"backend", "replay"},
                                                       {"mock_policy", "gt_at"},
                                                       {"mock_gt_position", 2},
                                                       {"replay_ledger", (recorded.run_dir / "ledger.jsonl").string()}}}});
    const auto replayed = cli("run --config " + replay_cfg + " --preset dyta_rrf");
    ASSERT_EQ(replayed.exit_code, 0);
    const auto a = nlohmann::json::parse(slurp(recorded.run_dir / "report.json"));
    const auto b = nlohmann::json::parse(slurp(replayed.run_dir / "report.json"));
    EXPECT_EQ(a["report"]["metrics"], b["report"]["metrics"]);
    EXPECT_EQ(b["manifest"]["backend"], "replay");
}
