#pragma once

#include "dyta/dataset/types.hpp"
#include "dyta/eval/bm25.hpp"
#include "dyta/eval/metrics.hpp"
#include "dyta/fusion/rank_fusion.hpp"
#include "dyta/rng.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <numeric>

namespace dyta::eval {

/// Uniformly random permutation of the page.
inline std::vector<ItemId> random_rank(const data::CandidatePage& page, std::uint64_t seed)
{
    auto order = page.item_order();
    Rng rng(seed);
    shuffle(std::span<ItemId>(order), rng);
    return order;
}

/// Monte Carlo mean of the metrics under uniform random ranking of an
/// m-candidate page, holding the ground truth at a random page slot.
inline Metrics random_baseline(std::size_t candidates, std::size_t trials, std::uint64_t seed)
{
    RankAccumulator acc;
    data::CandidatePage page;
    for (std::size_t i = 0; i < candidates; ++i) {
        page.entries.push_back({static_cast<int>(i) + 1, static_cast<ItemId>(i + 1)});
    }
    for (std::size_t t = 0; t < trials; ++t) {
        page.ground_truth = static_cast<ItemId>(t % candidates) + 1;
        const auto order = random_rank(page, derive_seed(seed, SeedPurpose::random_rank, t));
        const auto it = std::find(order.begin(), order.end(), page.ground_truth);
        acc.add(static_cast<int>(it - order.begin()) + 1);
    }
    return acc.mean();
}

/// Okapi BM25 of each candidate's title+genre document against the user's
/// preference text; corpus statistics come from the page itself. Ties by item id.
inline fusion::RankList bm25_rank(const std::string& query_text, const data::CandidatePage& page,
                                  const data::Catalog& catalog, const Bm25Params& params = {})
{
    const auto ids = page.item_order();
    const auto query = tokenize(query_text);
    if (query.empty()) {
        spdlog::warn("bm25: empty query; keeping page order");
        return {ids, fusion::Source::profile, 1.0, true};
    }
    std::vector<std::vector<std::string>> docs;
    docs.reserve(ids.size());
    for (auto id : ids) {
        docs.push_back(tokenize(item_document(catalog.item(id))));
    }
    const Bm25Scorer scorer(std::move(docs), params);
    const auto scores = scorer.scores(query);
    std::vector<std::size_t> idx(ids.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return scores[a] != scores[b] ? scores[a] > scores[b] : ids[a] < ids[b];
    });
    fusion::RankList out{{}, fusion::Source::profile, 1.0, false};
    for (auto i : idx) {
        out.order.push_back(ids[i]);
    }
    return out;
}

/// Preference text for BM25 without an LLM: titles and genres of the most
/// recent interactions.
template <typename Range>
std::string history_query(const data::Catalog& catalog, const Range& interactions)
{
    std::string q;
    for (const auto& i : interactions) {
        q += item_document(catalog.item(i.item_id));
        q += ' ';
    }
    return q;
}

} // namespace dyta::eval
