#pragma once

#include "dyta/agent/memory.hpp"
#include "dyta/context.hpp"
#include "dyta/dataset/stats.hpp"
#include "dyta/fusion/rank_fusion.hpp"
#include "dyta/llm/ranking.hpp"
#include "dyta/temporal/extractor.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <deque>
#include <optional>
#include <regex>
#include <string>
#include <vector>

namespace dyta::agent {

using data::CandidatePage;
using data::Interaction;
using data::ItemId;

/// Which signals an agent uses and how they are combined.
struct AgentConfig {
    std::size_t history_len = 10;
    int update_cadence = 5;
    int icl_k = 3;
    bool two_step_clustering = true;
    bool use_profile = true;     // r_l
    bool use_short_term = true;  // short-term profile refresh and memory consolidation
    bool use_sequential = true;  // r_s
    bool use_clustering = true;  // r_c
    bool direct_prompting = true;
    fusion::FusionConfig fusion{};
};

struct LongTermProfile {
    data::UserRecord demographics;
    std::string personality;
    std::string item_preferences;
    data::StatPatterns stats;
    bool degraded = false;

    friend bool operator==(const LongTermProfile&, const LongTermProfile&) = default;
};

struct ShortTermProfile {
    std::string summary;
    int last_updated_round = 0;

    friend bool operator==(const ShortTermProfile&, const ShortTermProfile&) = default;
};

struct AgentState {
    data::UserId user_id = 0;
    LongTermProfile long_term;
    ShortTermProfile short_term;
    MemoryStore memory;
    int round = 0;
    std::size_t history_len = 10;
    std::deque<Interaction> history_window;
    std::vector<int> short_term_update_rounds;

    [[nodiscard]] std::vector<Interaction> window() const { return {history_window.begin(), history_window.end()}; }
};

namespace detail {

inline const char* age_label(int bracket)
{
    switch (bracket) {
    case 1: return "under 18";
    case 18: return "18-24";
    case 25: return "25-34";
    case 35: return "35-44";
    case 45: return "45-49";
    case 50: return "50-55";
    case 56: return "56+";
    default: return "unknown";
    }
}

inline std::string percent(double fraction)
{
    return std::to_string(static_cast<int>(std::lround(fraction * 100.0))) + "%";
}

inline std::string fixed2(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string line_or_none(const std::string& s)
{
    return s.empty() ? std::string("(none)") : s;
}

} // namespace detail

/// Demographics and statistics as prompt text.
inline std::string describe_basics(const data::UserRecord& user, const data::StatPatterns& stats)
{
    std::string out = "Gender: ";
    out += user.gender == data::Gender::female ? "female" : "male";
    out += "; age: ";
    out += detail::age_label(user.age_bracket);
    out += "; occupation code: " + std::to_string(user.occupation) + "\n";
    if (stats.empty) {
        out += "No rating history.\n";
        return out;
    }
    out += "Average rating " + detail::fixed2(stats.mean_rating) + " (counts 1-5:";
    for (int c : stats.rating_histogram) {
        out += " " + std::to_string(c);
    }
    out += "); " + detail::percent(stats.popular_item_fraction) + " of watched films are popular; "
           + detail::percent(stats.high_rated_item_fraction) + " are highly rated.\n";
    return out;
}

inline std::string describe_long_term(const LongTermProfile& p)
{
    std::string out = describe_basics(p.demographics, p.stats);
    out += "Personality: " + detail::line_or_none(p.personality) + "\n";
    out += "Preferences: " + detail::line_or_none(p.item_preferences) + "\n";
    return out;
}

/// Long-term profile: statistics computed directly, personality and
/// preferences from one LLM call each.
inline LongTermProfile init_long_term(const data::UserRecord& user, const data::InteractionHistory& prefix,
                                      const data::PopularityIndex& popularity, SimContext& ctx)
{
    if (prefix.interactions.empty()) {
        throw Error("long-term profile needs a non-empty history");
    }
    LongTermProfile p;
    p.demographics = user;
    p.stats = data::compute_stat_patterns(prefix, popularity);

    auto rendered = render::history(ctx.catalog, prefix.interactions, ctx.budget.history_chars);
    if (rendered.truncated) {
        ctx.note_truncation();
    }
    const PromptVars vars{{"long_term", describe_basics(user, p.stats)}, {"history", rendered.text}};
    auto ask = [&](std::string_view name) -> std::string {
        try {
            return ctx.gateway.complete(ctx.make_request("profile.init", ctx.prompts.render(name, vars))).content;
        } catch (const BackendError& e) {
            spdlog::warn("profile.init for user {} failed: {}", user.user_id, e.what());
            return {};
        }
    };
    p.personality = ask(PromptName::profile_personality);
    p.item_preferences = ask(PromptName::profile_preferences);
    p.degraded = p.personality.empty() || p.item_preferences.empty();
    return p;
}

inline AgentState make_agent(LongTermProfile profile, std::size_t history_len)
{
    AgentState s;
    s.user_id = profile.demographics.user_id;
    s.long_term = std::move(profile);
    s.history_len = history_len;
    s.memory = MemoryStore(history_len);
    return s;
}

/// Appends to memory and the history window, evicting the oldest beyond
/// capacity, and advances the round.
inline void record_interaction(AgentState& state, Interaction interaction)
{
    if (interaction.rating < 1 || interaction.rating > 5) {
        throw Error("rating must lie in 1..5");
    }
    state.memory.remember(interaction);
    state.history_window.push_back(std::move(interaction));
    while (state.history_window.size() > state.history_len) {
        state.history_window.pop_front();
    }
    ++state.round;
}

inline bool short_term_due(const AgentState& state, int cadence)
{
    return cadence > 0 && state.round > 0 && state.round % cadence == 0;
}

/// Regenerates the short-term summary from the current window.
inline ShortTermProfile update_short_term(AgentState& state, SimContext& ctx)
{
    auto rendered = render::history(ctx.catalog, state.history_window, ctx.budget.history_chars);
    if (rendered.truncated) {
        ctx.note_truncation();
    }
    try {
        const auto reply = ctx.gateway.complete(
            ctx.make_request("profile.short", ctx.prompts.render(PromptName::profile_short, {{"history", rendered.text}})));
        state.short_term = {reply.content, state.round};
        state.short_term_update_rounds.push_back(state.round);
    } catch (const BackendError& e) {
        spdlog::warn("profile.short for user {} failed; keeping previous summary: {}", state.user_id, e.what());
    }
    return state.short_term;
}

inline std::string memory_context(const AgentState& state, const SimContext& ctx)
{
    return state.memory.retrieve(ctx.budget.memory_chars,
                                 [&](const Interaction& i) { return render::interaction_line(ctx.catalog, i); });
}

/// Summarises short-term memory into a new long-term entry. Short-term memory is kept.
inline const MemoryStore& consolidate_memory(AgentState& state, SimContext& ctx)
{
    if (state.memory.short_term().empty()) {
        return state.memory;
    }
    std::string recent;
    for (const auto& m : state.memory.short_term()) {
        recent += "- " + render::interaction_line(ctx.catalog, m.interaction) + "\n";
    }
    try {
        const auto reply = ctx.gateway.complete(ctx.make_request(
            "memory.consolidate", ctx.prompts.render(PromptName::memory_consolidate, {{"memory", recent}})));
        if (!reply.content.empty()) {
            state.memory.append_summary(reply.content, state.round);
        }
    } catch (const BackendError& e) {
        spdlog::warn("memory.consolidate for user {} failed: {}", state.user_id, e.what());
    }
    return state.memory;
}

/// Cadence hook run after every recorded interaction.
inline void after_round(AgentState& state, SimContext& ctx, const AgentConfig& config)
{
    if (config.use_short_term && short_term_due(state, config.update_cadence)) {
        update_short_term(state, ctx);
        consolidate_memory(state, ctx);
    }
}

/// Replays known interactions through the agent so the window, memory and
/// short-term profile reflect them before the first simulated page.
template <typename Range>
void warm_up(AgentState& state, const Range& interactions, SimContext& ctx, const AgentConfig& config)
{
    for (const auto& i : interactions) {
        record_interaction(state, i);
        after_round(state, ctx, config);
    }
}

inline llm::ChatRequest profile_request(const AgentState& state, const CandidatePage& page, SimContext& ctx,
                                        const AgentConfig& config)
{
    const bool dynamic = config.use_short_term;
    const auto prompt = ctx.prompts.render(
        PromptName::act_profile,
        {{"long_term", describe_long_term(state.long_term)},
         {"short_term", dynamic ? detail::line_or_none(state.short_term.summary) + "\n" : std::string("(none)\n")},
         {"memory", dynamic ? memory_context(state, ctx) : std::string("(none)\n")},
         {"candidates", render::candidates(ctx.catalog, page)},
         {"position_note", temporal::detail::position_note(config.direct_prompting)}});
    return temporal::detail::ranking_request(ctx, "act.profile", prompt, page);
}

/// r_l: ranking from the long-/short-term profile and memory.
inline fusion::RankList profile_rank(const AgentState& state, const CandidatePage& page, SimContext& ctx,
                                     const AgentConfig& config)
{
    auto outcome = llm::request_ranking(ctx.gateway, profile_request(state, page, ctx, config));
    return {std::move(outcome.ranking.order), fusion::Source::profile, 1.0, outcome.ranking.repaired};
}

struct RatingReply {
    int rating = 0;
    std::string feeling;
};

/// "Rating: 4 / Feeling: ..." or any reply whose first standalone digit is 1-5.
inline std::optional<RatingReply> parse_rating_reply(const std::string& reply)
{
    static const std::regex labelled(R"(rating\s*[:=]?\s*([1-5])(?![0-9.]))", std::regex::icase);
    static const std::regex bare(R"((?:^|[^0-9.])([1-5])(?![0-9.]))");
    static const std::regex feeling(R"(feeling\s*[:=]\s*([^\n]*))", std::regex::icase);
    std::smatch m;
    RatingReply out;
    if (std::regex_search(reply, m, labelled) || std::regex_search(reply, m, bare)) {
        out.rating = m[1].str()[0] - '0';
    } else {
        return std::nullopt;
    }
    if (std::regex_search(reply, m, feeling)) {
        out.feeling = m[1].str();
    }
    return out;
}

struct Decision {
    std::vector<ItemId> ranking;
    ItemId chosen = 0;
    int rating = 0;
    std::string feeling;
    fusion::PatternFlags flags;
    fusion::Weights weights;
    bool fell_back = false;      // every signal failed; page order used
    bool rating_defaulted = false;
    std::vector<fusion::Source> failed_sources;
};

struct DecideOptions {
    /// Oracle hint for the mock's rating reply; ignored by real models.
    std::optional<int> reference_rating;
};

inline int rounded_mean_rating(const LongTermProfile& p)
{
    if (p.stats.empty) {
        return 3;
    }
    return std::clamp(static_cast<int>(std::lround(p.stats.mean_rating)), 1, 5);
}

inline RatingReply rate_item(const AgentState& state, ItemId item, bool is_ground_truth, SimContext& ctx,
                             const DecideOptions& options, bool& defaulted)
{
    data::CandidatePage single;
    single.entries.push_back({1, item});
    auto rendered = render::history(ctx.catalog, state.history_window, ctx.budget.history_chars);
    if (rendered.truncated) {
        ctx.note_truncation();
    }
    const auto prompt = ctx.prompts.render(
        PromptName::act_rate, {{"long_term", describe_long_term(state.long_term)},
                               {"short_term", detail::line_or_none(state.short_term.summary) + "\n"},
                               {"history", rendered.text},
                               {"candidates", render::candidates(ctx.catalog, single)}});
    auto request = ctx.make_request("act.rate", prompt);
    request.hints.rating_hint =
        is_ground_truth && options.reference_rating ? *options.reference_rating : rounded_mean_rating(state.long_term);

    defaulted = false;
    try {
        const auto first = ctx.gateway.complete(request);
        if (auto parsed = parse_rating_reply(first.content)) {
            return *parsed;
        }
        auto retry = request;
        retry.tag = "act.rate.reformat";
        retry.messages.push_back({llm::Role::assistant, first.content});
        retry.messages.push_back({llm::Role::user, "Reply with the rating as a single integer from 1 to 5."});
        if (auto parsed = parse_rating_reply(ctx.gateway.complete(retry).content)) {
            return *parsed;
        }
    } catch (const BackendError& e) {
        spdlog::warn("act.rate for user {} failed: {}", state.user_id, e.what());
    }
    defaulted = true;
    return {rounded_mean_rating(state.long_term), {}};
}

/// One page: computes the enabled rank signals, fuses them, takes the top
/// item as the interaction and rates it. Records the interaction and runs the
/// cadence hook.
inline Decision decide(AgentState& state, const CandidatePage& page, SimContext& ctx, const AgentConfig& config,
                       const DecideOptions& options = {})
{
    Decision d;
    const auto window = state.window();
    const temporal::History h(window);

    const bool temporal_enabled = config.use_sequential || config.use_clustering;
    if (config.fusion.adaptive && temporal_enabled) {
        d.flags = temporal::detect_patterns(h, ctx);
    } else {
        d.flags = {config.use_sequential, config.use_clustering, {}};
    }
    d.weights = config.fusion.adaptive ? fusion::adaptive_weights(d.flags, config.fusion) : config.fusion.static_weights;

    auto attempt = [&](fusion::Source source, auto&& produce) -> std::optional<fusion::RankList> {
        try {
            return produce();
        } catch (const BackendError& e) {
            spdlog::warn("{} signal failed for user {}: {}", fusion::to_string(source), state.user_id, e.what());
            d.failed_sources.push_back(source);
            return std::nullopt;
        }
    };

    std::optional<fusion::RankList> r_l;
    std::optional<fusion::RankList> r_s;
    std::optional<fusion::RankList> r_c;
    if (config.use_profile && d.weights.profile > 0.0) {
        r_l = attempt(fusion::Source::profile, [&] { return profile_rank(state, page, ctx, config); });
    }
    if (config.use_sequential && d.weights.sequential > 0.0 && !h.empty()) {
        r_s = attempt(fusion::Source::sequential, [&] {
            return temporal::sequential_rank(h, page, ctx, temporal::build_icl_examples(h, config.icl_k),
                                             config.direct_prompting);
        });
    }
    if (config.use_clustering && d.weights.clustering > 0.0 && h.size() >= 2) {
        r_c = attempt(fusion::Source::clustering, [&] {
            return temporal::cluster_rank(h, page, ctx, config.two_step_clustering, config.direct_prompting);
        });
    }

    if (!r_l && !r_s && !r_c) {
        d.ranking = page.item_order();
        d.fell_back = true;
    } else {
        d.ranking = fusion::aggregate(r_l, r_s, r_c, d.flags, config.fusion).order;
    }
    d.chosen = d.ranking.front();

    auto rated = rate_item(state, d.chosen, d.chosen == page.ground_truth, ctx, options, d.rating_defaulted);
    d.rating = rated.rating;
    d.feeling = rated.feeling;

    Interaction interaction;
    interaction.item_id = d.chosen;
    interaction.rating = d.rating;
    interaction.timestamp = state.history_window.empty() ? 1 : state.history_window.back().timestamp;
    interaction.feeling = d.feeling;
    record_interaction(state, std::move(interaction));
    after_round(state, ctx, config);
    return d;
}

} // namespace dyta::agent
