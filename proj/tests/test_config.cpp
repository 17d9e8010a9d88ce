#include "dyta/config/run_config.hpp"
#include "support/temp_dir.hpp"

#include <gtest/gtest.h>

using namespace dyta;
using namespace dyta::config;
using dyta::testing::TempDir;

namespace {

RunConfig parse(const std::string& text)
{
    return parse_config(nlohmann::json::parse(text));
}

std::string expect_config_error(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const ConfigError& e) {
        return e.what();
    }
    ADD_FAILURE() << "expected ConfigError";
    return {};
}

} // namespace

TEST(ParseConfig, MinimalConfigResolvesDefaults)
{
    TempDir dir;
    const auto c = parse(R"({"dataset_dir": ")" + dir.path().string() + R"("})");
    EXPECT_NO_THROW(validate(c));
    const auto j = to_json(c);
    EXPECT_EQ(j["history_len"], 10);
    EXPECT_EQ(j["update_cadence"], 5);
    EXPECT_EQ(j["icl_k"], 3);
    EXPECT_EQ(j["candidates"], 10);
    EXPECT_EQ(j["runs"], 3);
    EXPECT_EQ(j["seeds"], nlohmann::json::array({1, 2, 3}));
    EXPECT_EQ(j["llm"]["temperature"], 0.1);
    EXPECT_EQ(j["llm"]["top_p"], 0.9);
    EXPECT_EQ(j["llm"]["model_name"], "gpt-4o-mini");
    EXPECT_EQ(j["llm"]["max_concurrency"], 4);
    EXPECT_EQ(j["fusion"]["method"], "rrf");
    EXPECT_EQ(j["fusion"]["rrf_k"], 60.0);
    EXPECT_EQ(j["fusion"]["adaptive"], true);
    EXPECT_EQ(j["sweep"]["icl_ks"], nlohmann::json::array({0, 3, 6, 9}));
    EXPECT_EQ(j["user_sample"]["count"], 50);
    EXPECT_EQ(j["min_history"], 10);
    EXPECT_EQ(j["direct_prompting"], true);
}

TEST(ParseConfig, NestedOverrides)
{
    const auto c = parse(R"({"dataset_dir": "d", "fusion": {"method": "borda", "static_weights": [1, 0.5, 2]},
                             "llm": {"mock_policy": "gt_at", "mock_gt_position": 4}, "runs": 2})");
    EXPECT_EQ(c.fusion.method, fusion::Method::borda);
    EXPECT_EQ(c.fusion.static_weights, (fusion::Weights{1, 0.5, 2}));
    EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2}));
    const auto mock = mock_config(c);
    EXPECT_EQ(mock.policy, llm::MockPolicy::gt_at);
    EXPECT_EQ(mock.gt_position, 4);
}

TEST(Validate, TemperatureOutOfRange)
{
    const auto msg = expect_config_error([] { validate(parse(R"({"dataset_dir": "d", "llm": {"temperature": 3.0}})"), false); });
    EXPECT_NE(msg.find("temperature"), std::string::npos);
}

TEST(ParseConfig, UnknownKeysAreErrors)
{
    auto msg = expect_config_error([] { parse(R"({"dataset_dir": "d", "histroy_len": 5})"); });
    EXPECT_NE(msg.find("histroy_len"), std::string::npos);
    msg = expect_config_error([] { parse(R"({"dataset_dir": "d", "llm": {"temprature": 0.2}})"); });
    EXPECT_NE(msg.find("llm.temprature"), std::string::npos);
}

TEST(ParseConfig, WrongTypesAreErrors)
{
    expect_config_error([] { parse(R"({"dataset_dir": "d", "history_len": "ten"})"); });
    expect_config_error([] { parse(R"({"dataset_dir": "d", "fusion": {"method": "sum"}})"); });
    expect_config_error([] { parse(R"([1, 2])"); });
}

TEST(Validate, SeedsMustMatchRunsAndBeDistinct)
{
    expect_config_error([] { validate(parse(R"({"dataset_dir": "d", "runs": 3, "seeds": [1, 2]})"), false); });
    expect_config_error([] { validate(parse(R"({"dataset_dir": "d", "runs": 2, "seeds": [4, 4]})"), false); });
    EXPECT_NO_THROW(validate(parse(R"({"dataset_dir": "d", "runs": 2, "seeds": [4, 9]})"), false));
}

TEST(Validate, PathsMustExist)
{
    auto msg = expect_config_error([] { validate(parse(R"({"dataset_dir": "/nonexistent/ml-1m"})")); });
    EXPECT_NE(msg.find("dataset_dir"), std::string::npos);
}

TEST(Validate, MissingPromptFileIsNamed)
{
    TempDir data;
    TempDir prompts;
    for (const auto& [name, text] : PromptSet::defaults()) {
        if (name != "act_rate") {
            prompts.write(name + ".txt", text);
        }
    }
    const auto c = parse(R"({"dataset_dir": ")" + data.path().string() + R"(", "prompts_dir": ")"
                         + prompts.path().string() + R"("})");
    const auto msg = expect_config_error([&] { validate(c); });
    EXPECT_NE(msg.find("act_rate.txt"), std::string::npos) << msg;
}

TEST(ConfigDigest, IgnoresOutputLocationAndParallelism)
{
    auto a = parse(R"({"dataset_dir": "d"})");
    auto b = a;
    b.output_dir = "elsewhere";
    b.workers = 16;
    b.llm.max_concurrency = 1;
    EXPECT_EQ(config_digest(a), config_digest(b));
    b.icl_k = 6;
    EXPECT_NE(config_digest(a), config_digest(b));
    EXPECT_EQ(config_digest(a).size(), 16u);
}

TEST(LoadConfig, ReportsUnreadableAndInvalidJson)
{
    TempDir dir;
    expect_config_error([&] { load_config(dir / "absent.json"); });
    dir.write("bad.json", "{ not json");
    expect_config_error([&] { load_config(dir / "bad.json"); });
    dir.write("ok.json", R"({"dataset_dir": "x", "icl_k": 6})");
    EXPECT_EQ(load_config(dir / "ok.json").icl_k, 6);
}
