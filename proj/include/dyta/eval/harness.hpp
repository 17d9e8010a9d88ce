#pragma once

#include "dyta/agent/agent.hpp"
#include "dyta/dataset/prepared.hpp"
#include "dyta/eval/baselines.hpp"
#include "dyta/eval/metrics.hpp"
#include "dyta/eval/presets.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dyta::eval {

using data::UserId;

/// What every run shares: users, seeds, page construction and parallelism.
struct EvalSettings {
    std::vector<std::uint64_t> seeds{1, 2, 3}; // one per run
    std::vector<UserId> users;
    std::size_t candidates = 10;
    data::Placement placement = data::RandomPlacement{};
    int workers = 1;
    double max_failure_rate = 0.05;
    Bm25Params bm25{};
};

struct UserOutcome {
    UserId user_id = 0;
    int gt_rank = 0; // 0 when failed
    int simulated_rating = 0;
    int ground_truth_rating = 0;
    bool chose_ground_truth = false;
    bool failed = false;
    bool backend_failure = false; // failed because the LLM backend did
    bool fell_back = false;
    std::string error;
};

struct RunResult {
    std::uint64_t seed = 0;
    Metrics metrics;
    RankAccumulator ranks;
    std::size_t evaluated = 0;
    std::size_t failures = 0;
    std::size_t backend_failures = 0;
    std::size_t fallbacks = 0;
    bool valid = true;
    std::vector<UserOutcome> outcomes; // in settings.users order
};

struct MetricReport {
    std::string preset;
    Metrics metrics; // mean over runs
    std::vector<RunResult> runs;
    std::size_t user_count = 0;
    std::string config_digest;
    bool valid = true;
    std::uint64_t truncated_prompts = 0;

    [[nodiscard]] std::size_t failures() const
    {
        std::size_t n = 0;
        for (const auto& r : runs) {
            n += r.failures;
        }
        return n;
    }

    /// Some run lost every user to backend failures.
    [[nodiscard]] bool backend_unusable() const
    {
        for (const auto& r : runs) {
            if (r.evaluated == 0 && r.backend_failures > 0 && r.backend_failures == r.failures) {
                return true;
            }
        }
        return false;
    }
};

/// Candidate page for (run seed, user); identical across presets.
inline const data::LeaveOneOut& split_of(const data::PreparedDataset& data, UserId user)
{
    const auto it = data.splits.find(user);
    if (it == data.splits.end()) {
        throw DataError("user " + std::to_string(user) + " has no evaluable history");
    }
    return it->second;
}

inline data::CandidatePage page_for(const data::PreparedDataset& data, UserId user, std::uint64_t run_seed,
                                    const EvalSettings& settings)
{
    const auto& split = split_of(data, user);
    const auto negatives = data::sample_negatives(data.sequences.at(user), data.catalog, settings.candidates - 1,
                                                  derive_seed(run_seed, SeedPurpose::negatives,
                                                              static_cast<std::uint64_t>(user)));
    return data::build_candidate_page(split.target.item_id, negatives,
                                      derive_seed(run_seed, SeedPurpose::page, static_cast<std::uint64_t>(user)),
                                      settings.placement);
}

inline int rank_of(const std::vector<data::ItemId>& order, data::ItemId item)
{
    const auto it = std::find(order.begin(), order.end(), item);
    return it == order.end() ? 0 : static_cast<int>(it - order.begin()) + 1;
}

template <typename Range>
std::vector<data::Interaction> last_n(const Range& interactions, std::size_t n)
{
    const auto size = interactions.size();
    const auto start = size > n ? size - n : 0;
    return {interactions.begin() + static_cast<std::ptrdiff_t>(start), interactions.end()};
}

/// Runs one user through one method on one page.
inline UserOutcome evaluate_user(const data::PreparedDataset& data, UserId user, std::uint64_t run_seed,
                                 const Preset& preset, const EvalSettings& settings, SimContext& ctx)
{
    UserOutcome out;
    out.user_id = user;
    const auto& split = split_of(data, user);
    out.ground_truth_rating = split.target.rating;
    const auto page = page_for(data, user, run_seed, settings);
    const auto recent = last_n(split.prefix.interactions, preset.agent.history_len);

    std::vector<data::ItemId> ranking;
    switch (preset.kind) {
    case MethodKind::random:
        ranking = random_rank(page, derive_seed(run_seed, SeedPurpose::random_rank, static_cast<std::uint64_t>(user)));
        break;
    case MethodKind::bm25:
        ranking = bm25_rank(history_query(data.catalog, recent), page, data.catalog, settings.bm25).order;
        break;
    case MethodKind::agent: {
        auto profile = agent::init_long_term(data.catalog.users.at(user), split.prefix, data.popularity, ctx);
        auto state = agent::make_agent(std::move(profile), preset.agent.history_len);
        agent::warm_up(state, recent, ctx, preset.agent);
        const auto decision = agent::decide(state, page, ctx, preset.agent, {split.target.rating});
        if (decision.fell_back && !decision.failed_sources.empty()) {
            throw BackendError("every rank signal failed for user " + std::to_string(user));
        }
        ranking = decision.ranking;
        out.simulated_rating = decision.rating;
        out.fell_back = decision.fell_back;
        break;
    }
    }
    out.gt_rank = rank_of(ranking, page.ground_truth);
    out.chose_ground_truth = out.gt_rank == 1;
    return out;
}

/// Applies `fn(index)` to 0..count-1 on `workers` threads; the first
/// exception is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn)
{
    const auto n = static_cast<std::size_t>(std::max(1, workers));
    if (n == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < std::min(n, count); ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        fn(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) {
                            error = std::current_exception();
                        }
                        next = count;
                    }
                }
            });
        }
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

/// Leave-one-out evaluation: every user in every run gets a page, the method
/// ranks it, and the ground-truth rank feeds the metrics. User-level data or
/// backend failures are skipped and counted; a run with more than
/// `max_failure_rate` failures is invalid. Credential errors abort.
inline MetricReport run_evaluation(const data::PreparedDataset& data, const Preset& preset,
                                   const EvalSettings& settings, SimContext& ctx, std::string config_digest = {})
{
    if (settings.seeds.empty()) {
        throw ConfigError("at least one run seed is required");
    }
    MetricReport report;
    report.preset = preset.name;
    report.user_count = settings.users.size();
    report.config_digest = std::move(config_digest);

    std::atomic<std::uint64_t> truncations{0};
    SimContext local = ctx;
    local.truncations = &truncations;

    std::vector<Metrics> per_run;
    for (auto seed : settings.seeds) {
        RunResult run;
        run.seed = seed;
        run.outcomes.resize(settings.users.size());
        parallel_for(settings.users.size(), settings.workers, [&](std::size_t i) {
            const auto user = settings.users[i];
            try {
                run.outcomes[i] = evaluate_user(data, user, seed, preset, settings, local);
            } catch (const ConfigError&) {
                throw;
            } catch (const Error& e) {
                spdlog::warn("user {} failed in run seed {}: {}", user, seed, e.what());
                run.outcomes[i] = UserOutcome{};
                run.outcomes[i].user_id = user;
                run.outcomes[i].failed = true;
                run.outcomes[i].backend_failure = dynamic_cast<const BackendError*>(&e) != nullptr;
                run.outcomes[i].error = e.what();
            }
        });
        for (const auto& o : run.outcomes) {
            if (o.failed) {
                ++run.failures;
                run.backend_failures += o.backend_failure ? 1 : 0;
                continue;
            }
            ++run.evaluated;
            run.fallbacks += o.fell_back ? 1 : 0;
            run.ranks.add(o.gt_rank);
        }
        run.metrics = run.ranks.mean();
        const auto total = settings.users.size();
        run.valid = total == 0 || static_cast<double>(run.failures) <= settings.max_failure_rate * static_cast<double>(total);
        report.valid = report.valid && run.valid;
        per_run.push_back(run.metrics);
        report.runs.push_back(std::move(run));
    }
    report.metrics = mean_over_runs(per_run);
    report.truncated_prompts = truncations.load();
    return report;
}

struct PositionBiasRow {
    bool direct_prompting = false;
    int position = 0;
    double hit_rate = 0.0; // ground truth chosen (ranked first)
    Metrics metrics;
};

struct PositionBiasResult {
    std::vector<PositionBiasRow> rows; // direct on, then off; positions ascending
    std::vector<MetricReport> reports;
};

/// Ground truth pinned at each page position in turn, with and without the
/// positions-carry-no-significance instruction.
inline PositionBiasResult position_bias_experiment(const data::PreparedDataset& data, const Preset& preset,
                                                   const EvalSettings& settings, SimContext& ctx,
                                                   const std::string& config_digest = {})
{
    PositionBiasResult result;
    for (bool direct : {true, false}) {
        Preset p = preset;
        p.agent.direct_prompting = direct;
        for (int pos = 1; pos <= static_cast<int>(settings.candidates); ++pos) {
            EvalSettings s = settings;
            s.placement = data::FixedPlacement{pos};
            auto report = run_evaluation(data, p, s, ctx, config_digest);
            report.preset = preset.name + (direct ? "/direct" : "/plain") + "/p" + std::to_string(pos);
            std::vector<double> hits;
            for (const auto& run : report.runs) {
                const auto& h = run.ranks.histogram();
                const auto it = h.find(1);
                const auto n = run.ranks.count();
                hits.push_back(n == 0 || it == h.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(n));
            }
            std::sort(hits.begin(), hits.end());
            double hit = 0.0;
            for (double v : hits) {
                hit += v;
            }
            hit /= static_cast<double>(hits.size());
            result.rows.push_back({direct, pos, hit, report.metrics});
            result.reports.push_back(std::move(report));
        }
    }
    return result;
}

struct RatingDistributionResult {
    RatingAlignment alignment;
    MetricReport report;
};

/// Simulated ratings of the chosen items vs. the users' real held-out ratings.
inline RatingDistributionResult rating_distribution_experiment(const data::PreparedDataset& data,
                                                               const Preset& preset, const EvalSettings& settings,
                                                               SimContext& ctx, const std::string& config_digest = {})
{
    if (preset.kind != MethodKind::agent) {
        throw ConfigError("rating distribution needs an agent preset");
    }
    RatingDistributionResult out;
    out.report = run_evaluation(data, preset, settings, ctx, config_digest);
    std::vector<int> simulated;
    std::vector<int> truth;
    for (const auto& run : out.report.runs) {
        for (const auto& o : run.outcomes) {
            if (!o.failed) {
                simulated.push_back(o.simulated_rating);
                truth.push_back(o.ground_truth_rating);
            }
        }
    }
    out.alignment = rating_distribution_analysis(simulated, truth);
    return out;
}

/// Every ablation preset on the same users and seeds (hence the same pages).
inline std::vector<MetricReport> ablation_matrix(const data::PreparedDataset& data, const agent::AgentConfig& base,
                                                 const EvalSettings& settings, SimContext& ctx,
                                                 const std::string& config_digest = {})
{
    std::vector<MetricReport> out;
    for (auto name : ablation_presets) {
        out.push_back(run_evaluation(data, make_preset(name, base), settings, ctx, config_digest));
    }
    return out;
}

struct SweepCell {
    std::size_t history_len = 0;
    int icl_k = 0;
    MetricReport report;
};

struct SweepResult {
    std::vector<SweepCell> history; // icl_k held at the base value
    std::vector<SweepCell> icl;     // history_len held at the base value
};

/// One-dimensional sweeps over history length and ICL example count.
inline SweepResult parameter_sweep(const data::PreparedDataset& data, const Preset& preset,
                                   const EvalSettings& settings, SimContext& ctx,
                                   const std::vector<std::size_t>& history_lens, const std::vector<int>& icl_ks,
                                   const std::string& config_digest = {})
{
    if (history_lens.empty() || icl_ks.empty()) {
        throw ConfigError("sweep lists must be non-empty");
    }
    SweepResult out;
    for (auto len : history_lens) {
        Preset p = preset;
        p.agent.history_len = len;
        out.history.push_back({len, p.agent.icl_k, run_evaluation(data, p, settings, ctx, config_digest)});
    }
    for (auto k : icl_ks) {
        Preset p = preset;
        p.agent.icl_k = k;
        out.icl.push_back({p.agent.history_len, k, run_evaluation(data, p, settings, ctx, config_digest)});
    }
    return out;
}

} // namespace dyta::eval
