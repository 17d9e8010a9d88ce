#pragma once

#include "dyta/context.hpp"
#include "dyta/fusion/rank_fusion.hpp"
#include "dyta/llm/ranking.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <vector>

namespace dyta::temporal {

using data::Interaction;
using fusion::PatternFlags;
using fusion::RankList;
using History = std::span<const Interaction>;

namespace detail {

inline std::optional<bool> yes_no(const std::string& reply, const char* key)
{
    const std::regex re(std::string(key) + R"(\s*[:=]\s*(yes|no)\b)", std::regex::icase);
    std::smatch m;
    if (!std::regex_search(reply, m, re)) {
        return std::nullopt;
    }
    auto v = m[1].str();
    return std::tolower(static_cast<unsigned char>(v[0])) == 'y';
}

inline std::string cluster_description(const std::string& reply)
{
    const std::regex re(R"(clusters?\s*:\s*([^\n]*))", std::regex::icase);
    std::smatch m;
    for (auto it = std::sregex_iterator(reply.begin(), reply.end(), re); it != std::sregex_iterator(); ++it) {
        auto text = (*it)[1].str();
        while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back())) != 0) {
            text.pop_back();
        }
        const auto lower = [&] {
            std::string l = text;
            std::transform(l.begin(), l.end(), l.begin(), [](unsigned char c) { return std::tolower(c); });
            return l;
        }();
        // "clustering: yes" also matches; skip bare yes/no values.
        if (lower == "yes" || lower == "no" || lower.empty() || lower == "none") {
            continue;
        }
        return text;
    }
    return {};
}

inline std::string rendered_history(const SimContext& ctx, History h)
{
    auto r = render::history(ctx.catalog, h, ctx.budget.history_chars);
    if (r.truncated) {
        ctx.note_truncation();
    }
    return r.text;
}

inline std::string position_note(bool direct_prompting)
{
    return direct_prompting ? std::string(position_note_text) : std::string();
}

inline llm::ChatRequest ranking_request(const SimContext& ctx, std::string tag, std::string prompt,
                                        const data::CandidatePage& page)
{
    prompt += "\n";
    prompt += ranking_format_text;
    auto req = ctx.make_request(std::move(tag), std::move(prompt));
    req.hints.page_order = page.item_order();
    req.hints.ground_truth = page.ground_truth;
    return req;
}

} // namespace detail

/// Parses "sequential: yes|no" / "clustering: yes|no" (+ optional "clusters: ...").
inline PatternFlags parse_pattern_flags(const std::string& reply)
{
    const auto seq = detail::yes_no(reply, "sequential");
    const auto clu = detail::yes_no(reply, "clustering");
    if (!seq || !clu) {
        spdlog::warn("tpe.detect: malformed reply; assuming no temporal patterns");
        return {};
    }
    PatternFlags flags{*seq, *clu, {}};
    if (flags.has_clustering) {
        flags.cluster_note = detail::cluster_description(reply);
    }
    return flags;
}

/// One combined call deciding whether H shows sequential and/or clustering patterns.
inline PatternFlags detect_patterns(History h, SimContext& ctx)
{
    if (h.size() < 2) {
        return {};
    }
    const auto prompt = ctx.prompts.render(PromptName::tpe_detect, {{"history", detail::rendered_history(ctx, h)}});
    try {
        return parse_pattern_flags(ctx.gateway.complete(ctx.make_request("tpe.detect", prompt)).content);
    } catch (const BackendError& e) {
        spdlog::warn("tpe.detect failed: {}", e.what());
        return {};
    }
}

struct ClusterPrompts {
    std::optional<std::string> analysis; // present for two-step prompting
    llm::ChatRequest rank_request;
};

/// Builds the clustering rank request. Two-step prompting first asks for an
/// independent analysis of H, which becomes context for the ranking call.
inline ClusterPrompts cluster_prompts(History h, const data::CandidatePage& page, SimContext& ctx, bool two_step,
                                      bool direct_prompting)
{
    const auto history = detail::rendered_history(ctx, h);
    const auto candidates = render::candidates(ctx.catalog, page);
    const auto note = detail::position_note(direct_prompting);
    ClusterPrompts out;
    if (two_step) {
        const auto analyze = ctx.prompts.render(PromptName::tpe_cluster_analyze, {{"history", history}});
        out.analysis = ctx.gateway.complete(ctx.make_request("tpe.cluster.analyze", analyze)).content;
        const auto rank = ctx.prompts.render(
            PromptName::tpe_cluster_rank,
            {{"history", history}, {"analysis", *out.analysis}, {"candidates", candidates}, {"position_note", note}});
        out.rank_request = detail::ranking_request(ctx, "tpe.cluster.rank", rank, page);
    } else {
        const auto rank = ctx.prompts.render(PromptName::tpe_cluster_onestep,
                                             {{"history", history}, {"candidates", candidates}, {"position_note", note}});
        out.rank_request = detail::ranking_request(ctx, "tpe.cluster", rank, page);
    }
    return out;
}

/// r_c: ranking informed by recurring patterns in H.
inline RankList cluster_rank(History h, const data::CandidatePage& page, SimContext& ctx, bool two_step,
                             bool direct_prompting = true)
{
    auto prompts = cluster_prompts(h, page, ctx, two_step, direct_prompting);
    auto outcome = llm::request_ranking(ctx.gateway, prompts.rank_request);
    return {std::move(outcome.ranking.order), fusion::Source::clustering, 1.0, outcome.ranking.repaired};
}

struct IclExample {
    std::vector<Interaction> context;
    Interaction next;
};

struct IclExampleSet {
    std::vector<IclExample> examples;
    int k = 0;
};

/// Number of preceding interactions shown per demonstration.
inline constexpr std::size_t icl_context_stride = 3;

/// Demonstrations from the most recent targets of H: for each of the last
/// min(k, |H| - 1) positions, the up-to-three interactions before it and the
/// item actually chosen there.
inline IclExampleSet build_icl_examples(History h, int k)
{
    IclExampleSet set;
    set.k = std::max(k, 0);
    if (h.size() < 2 || set.k == 0) {
        return set;
    }
    const auto count = std::min<std::size_t>(static_cast<std::size_t>(set.k), h.size() - 1);
    for (std::size_t t = h.size() - count; t < h.size(); ++t) {
        IclExample ex;
        const auto begin = t >= icl_context_stride ? t - icl_context_stride : 0;
        ex.context.assign(h.begin() + static_cast<std::ptrdiff_t>(begin), h.begin() + static_cast<std::ptrdiff_t>(t));
        ex.next = h[t];
        set.examples.push_back(std::move(ex));
    }
    return set;
}

inline std::string render_icl_examples(const data::Catalog& catalog, const IclExampleSet& set)
{
    std::string out;
    for (std::size_t i = 0; i < set.examples.size(); ++i) {
        const auto& ex = set.examples[i];
        out += "### Example " + std::to_string(i + 1) + "\nSequence (oldest first):\n";
        for (const auto& c : ex.context) {
            out += "- " + render::interaction_line(catalog, c) + "\n";
        }
        out += "Next: " + render::item_text(catalog, ex.next.item_id) + "\n\n";
    }
    return out;
}

inline llm::ChatRequest sequential_request(History h, const data::CandidatePage& page, SimContext& ctx,
                                           const IclExampleSet& examples, bool direct_prompting)
{
    const auto prompt = ctx.prompts.render(PromptName::tpe_seq,
                                           {{"icl_examples", render_icl_examples(ctx.catalog, examples)},
                                            {"history", detail::rendered_history(ctx, h)},
                                            {"candidates", render::candidates(ctx.catalog, page)},
                                            {"position_note", detail::position_note(direct_prompting)}});
    return detail::ranking_request(ctx, "tpe.seq", prompt, page);
}

/// r_s: in-context sequential next-item prediction.
inline RankList sequential_rank(History h, const data::CandidatePage& page, SimContext& ctx,
                                const IclExampleSet& examples, bool direct_prompting = true)
{
    auto outcome = llm::request_ranking(ctx.gateway, sequential_request(h, page, ctx, examples, direct_prompting));
    return {std::move(outcome.ranking.order), fusion::Source::sequential, 1.0, outcome.ranking.repaired};
}

} // namespace dyta::temporal
