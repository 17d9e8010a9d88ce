// dyta: command-line driver for simulation runs and experiments.

#include "dyta.hpp"
#include "dyta/llm/openai.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
    std::string config_path;
    std::string preset;
    std::string experiment;
    std::string backend;
    std::string mock_policy;
    std::optional<std::int64_t> seed_offset;
    std::string out;
};

/// "gt_at:3" selects GT_AT with position 3; other names map one-to-one.
void apply_mock_policy(dyta::config::RunConfig& c, const std::string& spec)
{
    const auto colon = spec.find(':');
    c.llm.mock_policy = spec.substr(0, colon);
    if (colon != std::string::npos) {
        try {
            c.llm.mock_gt_position = std::stoi(spec.substr(colon + 1));
        } catch (const std::exception&) {
            throw dyta::ConfigError("--mock-policy position must be an integer: " + spec);
        }
    }
}

dyta::config::RunConfig resolve_config(const Options& o)
{
    auto c = dyta::config::load_config(o.config_path);
    if (!o.preset.empty()) {
        c.preset = o.preset;
    }
    if (!o.backend.empty()) {
        c.llm.backend = o.backend;
    }
    if (!o.mock_policy.empty()) {
        apply_mock_policy(c, o.mock_policy);
    }
    if (o.seed_offset) {
        for (auto& s : c.seeds) {
            s += static_cast<std::uint64_t>(*o.seed_offset);
        }
    }
    if (!o.out.empty()) {
        c.output_dir = o.out;
    }
    dyta::config::validate(c);
    return c;
}

std::string utc_stamp()
{
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

fs::path make_output_dir(const std::string& root, const std::string& name)
{
    const auto base = fs::path(root) / (name + "-" + utc_stamp());
    auto dir = base;
    for (int i = 2; fs::exists(dir); ++i) {
        dir = base.string() + "-" + std::to_string(i);
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw dyta::ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    return dir;
}

std::shared_ptr<dyta::llm::Backend> make_backend(const dyta::config::RunConfig& c)
{
    if (c.llm.backend == "mock") {
        return std::make_shared<dyta::llm::MockBackend>(dyta::config::mock_config(c));
    }
    if (c.llm.backend == "replay") {
        return std::make_shared<dyta::llm::ReplayBackend>(fs::path(c.llm.replay_ledger));
    }
    return std::make_shared<dyta::llm::OpenAIBackend>(
        dyta::llm::OpenAIConfig{c.llm.base_url, dyta::llm::api_key_from_env(), c.llm.timeout_s});
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw dyta::ConfigError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

/// Everything one invocation shares across commands.
class Session {
public:
    explicit Session(dyta::config::RunConfig config, const std::string& name)
        : config_(std::move(config)), digest_(dyta::config::config_digest(config_))
    {
        prompts_ = config_.prompts_dir.empty() ? dyta::PromptSet() : dyta::PromptSet::from_directory(config_.prompts_dir);
        backend_ = make_backend(config_);

        spdlog::info("loading dataset from {}", config_.dataset_dir);
        data_ = dyta::data::prepare_dataset(dyta::data::load_ml1m(config_.dataset_dir), config_.popularity);
        if (data_.catalog.empty_ratings) {
            throw dyta::DataError("ratings.dat holds no ratings");
        }
        spdlog::info("{} users with a leave-one-out split, {} skipped", data_.splits.size(), data_.skipped_users);

        settings_.seeds = config_.seeds;
        settings_.users = dyta::data::select_users(data_, config_.resolved_min_history(), config_.user_sample.count,
                                                   config_.user_sample.seed);
        if (settings_.users.empty()) {
            throw dyta::DataError("no user has at least " + std::to_string(config_.resolved_min_history())
                                  + " prefix interactions");
        }
        settings_.candidates = config_.candidates;
        settings_.workers = config_.workers;
        settings_.max_failure_rate = config_.max_failure_rate;
        settings_.bm25 = config_.bm25;

        out_dir_ = make_output_dir(config_.output_dir, name);
        ledger_ = std::make_shared<dyta::llm::Ledger>(out_dir_ / "ledger.jsonl");
        gateway_ = std::make_unique<dyta::llm::Gateway>(
            backend_,
            dyta::llm::RetryPolicy{config_.llm.max_attempts, std::chrono::milliseconds(config_.llm.backoff_ms)},
            config_.llm.max_concurrency, ledger_);
        ctx_ = std::make_unique<dyta::SimContext>(dyta::SimContext{
            *gateway_, data_.catalog, prompts_, dyta::config::request_defaults(config_), config_.budget, nullptr});
    }

    [[nodiscard]] dyta::eval::Preset preset() const
    {
        return dyta::eval::make_preset(config_.preset, dyta::config::agent_config(config_));
    }

    /// Reproduction manifest: deterministic for a given config and backend.
    [[nodiscard]] json manifest(std::uint64_t truncations) const
    {
        return {{"config_digest", digest_},
                {"config", dyta::config::to_json(config_)},
                {"seeds", config_.seeds},
                {"user_sample",
                 {{"count", config_.user_sample.count},
                  {"seed", config_.user_sample.seed},
                  {"min_history", config_.resolved_min_history()},
                  {"users", settings_.users}}},
                {"dataset",
                 {{"users", data_.catalog.users.size()},
                  {"items", data_.catalog.items.size()},
                  {"ratings", data_.catalog.ratings.size()},
                  {"evaluable_users", data_.splits.size()},
                  {"skipped_users", data_.skipped_users}}},
                {"backend", gateway_->backend_id()},
                {"ledger", "ledger.jsonl"},
                {"llm_calls", ledger_->size()},
                {"truncated_prompts", truncations},
                {"protocol",
                 "leave-one-out; every method ranks the identical candidate page per user and run seed; metrics are "
                 "means over users, then over runs"}};
    }

    void finish(json body, std::uint64_t truncations) const
    {
        body["manifest"] = manifest(truncations);
        write_json(out_dir_ / "report.json", body);
        std::cout << out_dir_.string() << '\n';
    }

    dyta::config::RunConfig config_;
    std::string digest_;
    dyta::PromptSet prompts_;
    std::shared_ptr<dyta::llm::Backend> backend_;
    dyta::data::PreparedDataset data_;
    dyta::eval::EvalSettings settings_;
    fs::path out_dir_;
    std::shared_ptr<dyta::llm::Ledger> ledger_;
    std::unique_ptr<dyta::llm::Gateway> gateway_;
    std::unique_ptr<dyta::SimContext> ctx_;
};

void print_metrics(const dyta::eval::MetricReport& r)
{
    std::printf("%-26s nDCG@5 %.4f  nDCG@10 %.4f  HR@3 %.4f  failures %zu%s\n",
                std::string(dyta::eval::display_name(r.preset)).c_str(), r.metrics.ndcg_at_5, r.metrics.ndcg_at_10,
                r.metrics.hr_at_3, r.failures(), r.valid ? "" : "  INVALID");
}

/// 3 when the backend failed every user of a run, 4 for any other invalid run.
int exit_status(const std::vector<dyta::eval::MetricReport>& reports)
{
    bool valid = true;
    for (const auto& r : reports) {
        if (r.backend_unusable()) {
            return static_cast<int>(dyta::ExitCode::backend);
        }
        valid = valid && r.valid;
    }
    return valid ? 0 : static_cast<int>(dyta::ExitCode::invalid_run);
}

int cmd_validate(const Options& o)
{
    const auto c = resolve_config(o);
    dyta::eval::make_preset(c.preset, dyta::config::agent_config(c));
    json echo = dyta::config::to_json(c);
    echo["config_digest"] = dyta::config::config_digest(c);
    std::cout << echo.dump(2) << '\n';
    return 0;
}

int cmd_run(const Options& o)
{
    auto config = resolve_config(o);
    const auto preset_name = config.preset;
    Session s(std::move(config), preset_name);
    const auto report = dyta::eval::run_evaluation(s.data_, s.preset(), s.settings_, *s.ctx_, s.digest_);
    dyta::eval::write_table1(s.out_dir_ / "table1.csv", {report});
    s.finish({{"command", "run"}, {"report", dyta::eval::to_json(report)}}, report.truncated_prompts);
    print_metrics(report);
    return exit_status({report});
}

int cmd_experiment(const Options& o)
{
    const auto& name = o.experiment;
    if (name != "position_bias" && name != "rating_dist" && name != "ablation" && name != "sweep") {
        throw dyta::ConfigError("unknown experiment '" + name + "' (position_bias, rating_dist, ablation, sweep)");
    }
    Session s(resolve_config(o), name);
    json body{{"command", "experiment"}, {"experiment", name}};
    std::vector<dyta::eval::MetricReport> all;
    std::uint64_t truncations = 0;
    auto collect = [&](const std::vector<dyta::eval::MetricReport>& reports) {
        json arr = json::array();
        for (const auto& r : reports) {
            arr.push_back(dyta::eval::to_json(r));
            truncations += r.truncated_prompts;
            all.push_back(r);
        }
        return arr;
    };

    if (name == "position_bias") {
        const auto r = dyta::eval::position_bias_experiment(s.data_, s.preset(), s.settings_, *s.ctx_, s.digest_);
        dyta::eval::write_position_bias(s.out_dir_ / "position_bias.csv", r);
        json rows = json::array();
        for (const auto& row : r.rows) {
            rows.push_back({{"direct_prompting", row.direct_prompting},
                            {"position", row.position},
                            {"hit_rate", row.hit_rate},
                            {"metrics", dyta::eval::to_json(row.metrics)}});
            std::printf("direct_prompting %-3s position %2d  hit rate %.4f\n", row.direct_prompting ? "on" : "off",
                        row.position, row.hit_rate);
        }
        body["rows"] = rows;
        body["reports"] = collect(r.reports);
    } else if (name == "rating_dist") {
        const auto r = dyta::eval::rating_distribution_experiment(s.data_, s.preset(), s.settings_, *s.ctx_, s.digest_);
        dyta::eval::write_rating_dist(s.out_dir_ / "rating_dist.csv", r.alignment);
        body["tv_distance"] = r.alignment.tv_distance;
        body["simulated"] = r.alignment.simulated.probability;
        body["ground_truth"] = r.alignment.ground_truth.probability;
        body["reports"] = collect({r.report});
        std::printf("total variation distance %.6f\n", r.alignment.tv_distance);
    } else if (name == "ablation") {
        const auto reports =
            dyta::eval::ablation_matrix(s.data_, dyta::config::agent_config(s.config_), s.settings_, *s.ctx_, s.digest_);
        dyta::eval::write_table1(s.out_dir_ / "table1.csv", reports);
        body["reports"] = collect(reports);
        for (const auto& r : reports) {
            print_metrics(r);
        }
    } else {
        const auto r = dyta::eval::parameter_sweep(s.data_, s.preset(), s.settings_, *s.ctx_,
                                                   s.config_.sweep_history_lens, s.config_.sweep_icl_ks, s.digest_);
        dyta::eval::write_sweep(s.out_dir_ / "sweep_history.csv", r.history, true);
        dyta::eval::write_sweep(s.out_dir_ / "sweep_icl.csv", r.icl, false);
        std::vector<dyta::eval::MetricReport> history;
        std::vector<dyta::eval::MetricReport> icl;
        json hist_cells = json::array();
        json icl_cells = json::array();
        for (const auto& c : r.history) {
            hist_cells.push_back({{"history_len", c.history_len}, {"report", dyta::eval::to_json(c.report)}});
            history.push_back(c.report);
        }
        for (const auto& c : r.icl) {
            icl_cells.push_back({{"icl_k", c.icl_k}, {"report", dyta::eval::to_json(c.report)}});
            icl.push_back(c.report);
        }
        collect(history);
        collect(icl);
        body["history_sweep"] = hist_cells;
        body["icl_sweep"] = icl_cells;
    }
    s.finish(body, truncations);
    return exit_status(all);
}

int run_guarded(const std::function<int()>& fn)
{
    try {
        return fn();
    } catch (const dyta::Error& e) {
        spdlog::error("{}", e.what());
        return static_cast<int>(e.exit_code());
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return static_cast<int>(dyta::ExitCode::usage);
    }
}

} // namespace

int main(int argc, char** argv)
{
    spdlog::set_default_logger(spdlog::stderr_color_mt("dyta"));

    CLI::App app{"Temporal-aware LLM user simulation for recommender evaluation"};
    app.require_subcommand(1);
    Options o;
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--preset", o.preset, "Method preset (overrides config)");
        sub->add_option("--backend", o.backend, "LLM backend")->check(CLI::IsMember({"live", "mock", "replay"}));
        sub->add_option("--mock-policy", o.mock_policy,
                        "Mock policy: gt_first, gt_at:<p>, position_picker, utility, scripted");
        sub->add_option("--seed-offset", o.seed_offset, "Added to every run seed");
        sub->add_option("--out", o.out, "Output root (overrides output_dir)");
    };

    auto* validate = app.add_subcommand("validate", "Check a configuration and print it with defaults resolved");
    common(validate);
    auto* run = app.add_subcommand("run", "Evaluate one preset");
    common(run);
    auto* experiment = app.add_subcommand("experiment", "position_bias, rating_dist, ablation or sweep");
    common(experiment);
    experiment->add_option("--experiment,name", o.experiment, "Experiment name")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(dyta::ExitCode::usage);
    }
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::info);

    if (validate->parsed()) {
        return run_guarded([&] { return cmd_validate(o); });
    }
    if (run->parsed()) {
        return run_guarded([&] { return cmd_run(o); });
    }
    return run_guarded([&] { return cmd_experiment(o); });
}
