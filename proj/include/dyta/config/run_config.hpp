#pragma once

#include "dyta/agent/agent.hpp"
#include "dyta/dataset/stats.hpp"
#include "dyta/error.hpp"
#include "dyta/eval/bm25.hpp"
#include "dyta/llm/mock.hpp"
#include "dyta/prompts.hpp"
#include "dyta/rng.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace dyta::config {

using nlohmann::json;

struct UserSample {
    std::size_t count = 50; // 0 evaluates every eligible user
    std::uint64_t seed = 7;
};

struct LlmSettings {
    std::string backend = "mock"; // mock | live | replay
    std::string base_url = "https://api.openai.com/v1";
    std::string model_name = "gpt-4o-mini";
    double temperature = 0.1;
    double top_p = 0.9;
    int max_tokens = 512;
    int max_concurrency = 4;
    int max_attempts = 3;
    int backoff_ms = 500;
    int timeout_s = 60;
    std::string mock_policy = "gt_first";
    int mock_gt_position = 3;
    std::map<std::string, std::string> mock_script;
    std::map<std::string, double> mock_utilities; // item id (as text) -> utility
    std::string replay_ledger;
};

struct RunConfig {
    std::string dataset_dir;
    UserSample user_sample;
    std::optional<std::size_t> min_history; // minimum prefix length; defaults to history_len
    std::size_t history_len = 10;
    int update_cadence = 5;
    int icl_k = 3;
    bool two_step_clustering = true;
    std::size_t candidates = 10;
    data::PopularityConfig popularity;
    fusion::FusionConfig fusion;
    LlmSettings llm;
    std::string prompts_dir;
    int runs = 3;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    std::string output_dir = "runs";
    bool direct_prompting = true;
    TextBudget budget;
    std::vector<std::size_t> sweep_history_lens{5, 10, 15, 20};
    std::vector<int> sweep_icl_ks{0, 3, 6, 9};
    eval::Bm25Params bm25;
    int workers = 4;
    double max_failure_rate = 0.05;
    std::string preset = "dyta_rrf";

    [[nodiscard]] std::size_t resolved_min_history() const { return min_history.value_or(history_len); }
};

namespace detail {

/// Reads keys from one JSON object and rejects any it did not consume.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) {
            throw ConfigError("config: " + where() + " must be an object");
        }
    }

    template <typename T>
    void get(const char* key, T& out)
    {
        seen_.insert(key);
        if (!j_.contains(key) || j_.at(key).is_null()) {
            return;
        }
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config: " + where(key) + " has the wrong type");
        }
    }

    template <typename T>
    void get(const char* key, std::optional<T>& out)
    {
        if (has(key)) {
            T value{};
            get(key, value);
            out = value;
        }
        seen_.insert(key);
    }

    template <typename Fn>
    void object(const char* key, Fn&& fn)
    {
        seen_.insert(key);
        if (j_.contains(key) && !j_.at(key).is_null()) {
            Reader sub(j_.at(key), where(key));
            fn(sub);
            sub.finish();
        }
    }

    [[nodiscard]] bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    void finish() const
    {
        for (const auto& [key, value] : j_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError("config: unknown key '" + where(key.c_str()) + "'");
            }
        }
    }

    [[nodiscard]] std::string where(const char* key = nullptr) const
    {
        std::string p = path_;
        if (key) {
            p += p.empty() ? key : std::string(".") + key;
        }
        return p.empty() ? "<root>" : p;
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline fusion::Method parse_method(const std::string& s)
{
    if (s == "rrf") return fusion::Method::rrf;
    if (s == "borda" || s == "bc") return fusion::Method::borda;
    throw ConfigError("config: fusion.method must be 'rrf' or 'borda'");
}

} // namespace detail

/// Strict parse: unknown keys and wrong types are errors; absent keys keep defaults.
inline RunConfig parse_config(const json& j)
{
    RunConfig c;
    detail::Reader r(j, "");
    r.get("dataset_dir", c.dataset_dir);
    r.object("user_sample", [&](detail::Reader& s) {
        s.get("count", c.user_sample.count);
        s.get("seed", c.user_sample.seed);
    });
    r.get("min_history", c.min_history);
    r.get("history_len", c.history_len);
    r.get("update_cadence", c.update_cadence);
    r.get("icl_k", c.icl_k);
    r.get("two_step_clustering", c.two_step_clustering);
    r.get("candidates", c.candidates);
    r.object("popularity", [&](detail::Reader& p) {
        p.get("popular_fraction", c.popularity.popular_fraction);
        p.get("high_rating_mean", c.popularity.high_rating_mean);
        p.get("high_rating_min_count", c.popularity.high_rating_min_count);
    });
    r.object("fusion", [&](detail::Reader& f) {
        std::string method = "rrf";
        f.get("method", method);
        c.fusion.method = detail::parse_method(method);
        f.get("rrf_k", c.fusion.rrf_k);
        f.get("adaptive", c.fusion.adaptive);
        std::vector<double> sw{1.0, 1.0, 1.0};
        f.get("static_weights", sw);
        if (sw.size() != 3) {
            throw ConfigError("config: fusion.static_weights needs three values (profile, sequential, clustering)");
        }
        c.fusion.static_weights = {sw[0], sw[1], sw[2]};
        std::vector<double> dw{1.0, 1.0};
        f.get("detected_weights", dw);
        if (dw.size() != 2) {
            throw ConfigError("config: fusion.detected_weights needs two values (sequential, clustering)");
        }
        c.fusion.sequential_on = dw[0];
        c.fusion.clustering_on = dw[1];
    });
    r.object("llm", [&](detail::Reader& l) {
        auto& s = c.llm;
        l.get("backend", s.backend);
        l.get("base_url", s.base_url);
        l.get("model_name", s.model_name);
        l.get("temperature", s.temperature);
        l.get("top_p", s.top_p);
        l.get("max_tokens", s.max_tokens);
        l.get("max_concurrency", s.max_concurrency);
        l.get("max_attempts", s.max_attempts);
        l.get("backoff_ms", s.backoff_ms);
        l.get("timeout_s", s.timeout_s);
        l.get("mock_policy", s.mock_policy);
        l.get("mock_gt_position", s.mock_gt_position);
        l.get("mock_script", s.mock_script);
        l.get("mock_utilities", s.mock_utilities);
        l.get("replay_ledger", s.replay_ledger);
    });
    r.get("prompts_dir", c.prompts_dir);
    r.get("runs", c.runs);
    const bool explicit_seeds = r.has("seeds");
    r.get("seeds", c.seeds);
    if (!explicit_seeds && r.has("runs")) {
        c.seeds.clear();
        for (int i = 1; i <= c.runs; ++i) {
            c.seeds.push_back(static_cast<std::uint64_t>(i));
        }
    }
    r.get("output_dir", c.output_dir);
    r.get("direct_prompting", c.direct_prompting);
    r.object("budget", [&](detail::Reader& b) {
        b.get("history_chars", c.budget.history_chars);
        b.get("memory_chars", c.budget.memory_chars);
    });
    r.object("sweep", [&](detail::Reader& s) {
        s.get("history_lens", c.sweep_history_lens);
        s.get("icl_ks", c.sweep_icl_ks);
    });
    r.object("bm25", [&](detail::Reader& b) {
        b.get("k1", c.bm25.k1);
        b.get("b", c.bm25.b);
    });
    r.get("workers", c.workers);
    r.get("max_failure_rate", c.max_failure_rate);
    r.get("preset", c.preset);
    r.finish();
    return c;
}

inline RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path.string());
    }
    try {
        return parse_config(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
}

/// Range and consistency rules; filesystem checks when `check_paths` is set.
inline void validate(const RunConfig& c, bool check_paths = true)
{
    auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
    if (c.dataset_dir.empty()) fail("dataset_dir is required");
    if (c.history_len < 1) fail("history_len must be at least 1");
    if (c.update_cadence < 1) fail("update_cadence must be at least 1");
    if (c.icl_k < 0) fail("icl_k must be non-negative");
    if (c.candidates < 2) fail("candidates must be at least 2");
    if (c.runs < 1) fail("runs must be at least 1");
    if (c.seeds.size() != static_cast<std::size_t>(c.runs)) fail("seeds must list exactly one seed per run");
    if (std::set<std::uint64_t>(c.seeds.begin(), c.seeds.end()).size() != c.seeds.size()) fail("run seeds must be distinct");
    if (!(c.llm.temperature >= 0.0 && c.llm.temperature <= 2.0)) fail("llm.temperature must lie in [0, 2]");
    if (!(c.llm.top_p > 0.0 && c.llm.top_p <= 1.0)) fail("llm.top_p must lie in (0, 1]");
    if (c.llm.max_tokens < 1) fail("llm.max_tokens must be positive");
    if (c.llm.max_concurrency < 1) fail("llm.max_concurrency must be at least 1");
    if (c.llm.max_attempts < 1) fail("llm.max_attempts must be at least 1");
    if (c.llm.backoff_ms < 0) fail("llm.backoff_ms must be non-negative");
    if (c.llm.backend != "mock" && c.llm.backend != "live" && c.llm.backend != "replay") {
        fail("llm.backend must be mock, live or replay");
    }
    llm::parse_mock_policy(c.llm.mock_policy);
    if (c.llm.mock_gt_position < 1 || static_cast<std::size_t>(c.llm.mock_gt_position) > c.candidates) {
        fail("llm.mock_gt_position must lie in 1..candidates");
    }
    if (c.llm.backend == "replay" && c.llm.replay_ledger.empty()) fail("llm.replay_ledger is required for replay");
    if (!(c.fusion.rrf_k > 0.0)) fail("fusion.rrf_k must be positive");
    for (double w : {c.fusion.static_weights.profile, c.fusion.static_weights.sequential,
                     c.fusion.static_weights.clustering, c.fusion.sequential_on, c.fusion.clustering_on}) {
        if (!(w >= 0.0)) fail("fusion weights must be non-negative");
    }
    if (!(c.popularity.popular_fraction >= 0.0 && c.popularity.popular_fraction <= 1.0)) {
        fail("popularity.popular_fraction must lie in [0, 1]");
    }
    if (c.sweep_history_lens.empty() || c.sweep_icl_ks.empty()) fail("sweep lists must be non-empty");
    for (auto len : c.sweep_history_lens) {
        if (len < 1) fail("sweep.history_lens entries must be at least 1");
    }
    for (auto k : c.sweep_icl_ks) {
        if (k < 0) fail("sweep.icl_ks entries must be non-negative");
    }
    if (!(c.bm25.k1 >= 0.0) || !(c.bm25.b >= 0.0 && c.bm25.b <= 1.0)) fail("bm25 parameters out of range");
    if (c.workers < 1) fail("workers must be at least 1");
    if (!(c.max_failure_rate >= 0.0 && c.max_failure_rate <= 1.0)) fail("max_failure_rate must lie in [0, 1]");
    for (auto& [id, u] : c.llm.mock_utilities) {
        if (id.empty() || id.find_first_not_of("0123456789") != std::string::npos) {
            fail("llm.mock_utilities keys must be item ids");
        }
    }
    if (!check_paths) {
        return;
    }
    if (!std::filesystem::is_directory(c.dataset_dir)) fail("dataset_dir does not exist: " + c.dataset_dir);
    if (!c.prompts_dir.empty()) {
        PromptSet::from_directory(c.prompts_dir); // names the first missing file
    }
    if (c.llm.backend == "replay" && !std::filesystem::is_regular_file(c.llm.replay_ledger)) {
        fail("llm.replay_ledger does not exist: " + c.llm.replay_ledger);
    }
}

/// Fully resolved configuration, every default spelled out.
inline json to_json(const RunConfig& c)
{
    return {
        {"dataset_dir", c.dataset_dir},
        {"user_sample", {{"count", c.user_sample.count}, {"seed", c.user_sample.seed}}},
        {"min_history", c.resolved_min_history()},
        {"history_len", c.history_len},
        {"update_cadence", c.update_cadence},
        {"icl_k", c.icl_k},
        {"two_step_clustering", c.two_step_clustering},
        {"candidates", c.candidates},
        {"popularity",
         {{"popular_fraction", c.popularity.popular_fraction},
          {"high_rating_mean", c.popularity.high_rating_mean},
          {"high_rating_min_count", c.popularity.high_rating_min_count}}},
        {"fusion",
         {{"method", c.fusion.method == fusion::Method::borda ? "borda" : "rrf"},
          {"rrf_k", c.fusion.rrf_k},
          {"adaptive", c.fusion.adaptive},
          {"static_weights",
           {c.fusion.static_weights.profile, c.fusion.static_weights.sequential, c.fusion.static_weights.clustering}},
          {"detected_weights", {c.fusion.sequential_on, c.fusion.clustering_on}}}},
        {"llm",
         {{"backend", c.llm.backend},
          {"base_url", c.llm.base_url},
          {"model_name", c.llm.model_name},
          {"temperature", c.llm.temperature},
          {"top_p", c.llm.top_p},
          {"max_tokens", c.llm.max_tokens},
          {"max_concurrency", c.llm.max_concurrency},
          {"max_attempts", c.llm.max_attempts},
          {"backoff_ms", c.llm.backoff_ms},
          {"timeout_s", c.llm.timeout_s},
          {"mock_policy", c.llm.mock_policy},
          {"mock_gt_position", c.llm.mock_gt_position},
          {"mock_script", c.llm.mock_script},
          {"mock_utilities", c.llm.mock_utilities},
          {"replay_ledger", c.llm.replay_ledger}}},
        {"prompts_dir", c.prompts_dir},
        {"runs", c.runs},
        {"seeds", c.seeds},
        {"output_dir", c.output_dir},
        {"direct_prompting", c.direct_prompting},
        {"budget", {{"history_chars", c.budget.history_chars}, {"memory_chars", c.budget.memory_chars}}},
        {"sweep", {{"history_lens", c.sweep_history_lens}, {"icl_ks", c.sweep_icl_ks}}},
        {"bm25", {{"k1", c.bm25.k1}, {"b", c.bm25.b}}},
        {"workers", c.workers},
        {"max_failure_rate", c.max_failure_rate},
        {"preset", c.preset},
    };
}

/// Digest of everything that affects results (output location and
/// parallelism excluded).
inline std::string config_digest(const RunConfig& c)
{
    auto j = to_json(c);
    j.erase("output_dir");
    j.erase("workers");
    j["llm"].erase("max_concurrency");
    const auto h = fnv1a64(j.dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline agent::AgentConfig agent_config(const RunConfig& c)
{
    agent::AgentConfig a;
    a.history_len = c.history_len;
    a.update_cadence = c.update_cadence;
    a.icl_k = c.icl_k;
    a.two_step_clustering = c.two_step_clustering;
    a.direct_prompting = c.direct_prompting;
    a.fusion = c.fusion;
    return a;
}

inline llm::MockConfig mock_config(const RunConfig& c)
{
    llm::MockConfig m;
    m.policy = llm::parse_mock_policy(c.llm.mock_policy);
    m.gt_position = c.llm.mock_gt_position;
    m.script = c.llm.mock_script;
    for (const auto& [id, u] : c.llm.mock_utilities) {
        m.utilities.emplace(std::stoll(id), u);
    }
    return m;
}

inline RequestDefaults request_defaults(const RunConfig& c)
{
    return {c.llm.temperature, c.llm.top_p, c.llm.model_name, c.llm.max_tokens};
}

} // namespace dyta::config
