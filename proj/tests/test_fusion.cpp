#include "dyta/fusion/rank_fusion.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace dyta;
using namespace dyta::fusion;

namespace {

constexpr ItemId A = 1;
constexpr ItemId B = 2;
constexpr ItemId C = 3;

using Lists = std::vector<std::vector<ItemId>>;

std::vector<ItemId> shuffled(std::vector<ItemId> v, std::mt19937_64& rng)
{
    std::shuffle(v.begin(), v.end(), rng);
    return v;
}

} // namespace

TEST(AdaptiveWeights, GatedByFlags)
{
    const FusionConfig cfg;
    EXPECT_EQ(adaptive_weights({false, false, ""}, cfg), (Weights{1, 0, 0}));
    EXPECT_EQ(adaptive_weights({true, false, ""}, cfg), (Weights{1, 1, 0}));
    EXPECT_EQ(adaptive_weights({true, true, ""}, cfg), (Weights{1, 1, 1}));
    FusionConfig tuned;
    tuned.sequential_on = 0.5;
    tuned.clustering_on = 2.0;
    EXPECT_EQ(adaptive_weights({true, true, ""}, tuned), (Weights{1, 0.5, 2.0}));
}

TEST(BordaFuse, WeightedPointsDecideOrder)
{
    const Lists lists{{A, B, C}, {C, B, A}};
    const std::vector<double> w{1, 2};
    EXPECT_EQ(borda_fuse(lists, w), (std::vector<ItemId>{C, B, A}));
}

TEST(BordaFuse, SingleListIsIdentity)
{
    const Lists lists{{B, C, A}};
    const std::vector<double> w{3.5};
    EXPECT_EQ(borda_fuse(lists, w), lists[0]);
}

TEST(BordaFuse, TieFollowsFirstList)
{
    const Lists lists{{A, B, C}, {B, A, C}};
    const std::vector<double> w{1, 1};
    EXPECT_EQ(borda_fuse(lists, w), (std::vector<ItemId>{A, B, C}));
    const Lists flipped{{B, A, C}, {A, B, C}};
    EXPECT_EQ(borda_fuse(flipped, w), (std::vector<ItemId>{B, A, C}));
}

TEST(BordaFuse, TieOutsideTieOrderFallsBackToItemId)
{
    const Lists lists{{A, B, C}, {B, A, C}};
    const std::vector<double> w{1, 1};
    const std::vector<ItemId> tie{};
    EXPECT_EQ(borda_fuse(lists, w, tie), (std::vector<ItemId>{A, B, C}));
}

TEST(BordaFuse, MismatchedItemSetsAreRejected)
{
    const std::vector<double> w{1, 1};
    EXPECT_THROW(borda_fuse(Lists{{A, B, C}, {A, B, 4}}, w), Error);
    EXPECT_THROW(borda_fuse(Lists{{A, B, C}, {A, B}}, w), Error);
    EXPECT_THROW(borda_fuse(Lists{{A, A, C}, {A, B, C}}, w), Error);
    EXPECT_THROW(borda_fuse(Lists{{A, B, C}}, w), Error);
}

TEST(RrfFuse, ReciprocalRankScores)
{
    const Lists lists{{A, B, C}, {B, C, A}};
    const std::vector<double> w{1, 1};
    // A: 1/61 + 1/63, B: 1/62 + 1/61, C: 1/63 + 1/62.
    EXPECT_NEAR(1.0 / 61 + 1.0 / 63, 0.032266, 1e-6);
    EXPECT_NEAR(1.0 / 62 + 1.0 / 61, 0.032522, 1e-6);
    EXPECT_NEAR(1.0 / 63 + 1.0 / 62, 0.032002, 1e-6);
    EXPECT_EQ(rrf_fuse(lists, w, 60.0), (std::vector<ItemId>{B, A, C}));
}

TEST(RrfFuse, SingleListIsIdentity)
{
    const Lists lists{{C, A, B}};
    const std::vector<double> w{1};
    EXPECT_EQ(rrf_fuse(lists, w), lists[0]);
}

TEST(RrfFuse, ZeroWeightMatchesRemoval)
{
    const Lists three{{A, B, C, 4}, {4, C, B, A}, {B, 4, A, C}};
    const std::vector<double> w3{1, 0, 2};
    const Lists two{three[0], three[2]};
    const std::vector<double> w2{1, 2};
    EXPECT_EQ(rrf_fuse(three, w3), rrf_fuse(two, w2));
    EXPECT_EQ(borda_fuse(three, w3), borda_fuse(two, w2));
}

TEST(RrfFuse, RejectsNonPositiveK)
{
    const Lists lists{{A, B}};
    const std::vector<double> w{1};
    EXPECT_THROW(rrf_fuse(lists, w, 0.0), Error);
    EXPECT_THROW(rrf_fuse(lists, std::vector<double>{-1.0}), Error);
}

TEST(Aggregate, NoPatternsReturnsProfileRanking)
{
    const RankList rl{{C, A, B}, Source::profile};
    const RankList rs{{A, B, C}, Source::sequential};
    const RankList rc{{B, C, A}, Source::clustering};
    const auto out = aggregate(rl, rs, rc, {false, false, ""}, FusionConfig{});
    EXPECT_EQ(out.order, rl.order);
    EXPECT_EQ(out.fused_sources, std::vector<Source>{Source::profile});
}

TEST(Aggregate, StaticBordaEqualsDirectFusion)
{
    const RankList rl{{C, A, B, 4}, Source::profile};
    const RankList rs{{A, B, C, 4}, Source::sequential};
    const RankList rc{{4, B, C, A}, Source::clustering};
    FusionConfig cfg;
    cfg.method = Method::borda;
    cfg.adaptive = false;
    const auto out = aggregate(rl, rs, rc, {}, cfg);
    const Lists lists{rl.order, rs.order, rc.order};
    EXPECT_EQ(out.order, borda_fuse(lists, std::vector<double>{1, 1, 1}));
}

TEST(Aggregate, AdaptiveAllPatternsEqualsStaticOnes)
{
    const RankList rl{{C, A, B, 4}, Source::profile};
    const RankList rs{{A, B, C, 4}, Source::sequential};
    const RankList rc{{4, B, C, A}, Source::clustering};
    for (auto method : {Method::borda, Method::rrf}) {
        FusionConfig adaptive;
        adaptive.method = method;
        FusionConfig fixed = adaptive;
        fixed.adaptive = false;
        EXPECT_EQ(aggregate(rl, rs, rc, {true, true, ""}, adaptive).order,
                  aggregate(rl, rs, rc, {}, fixed).order);
    }
}

TEST(Aggregate, AbsentListsAreDropped)
{
    const RankList rl{{C, A, B}, Source::profile};
    const RankList rc{{B, C, A}, Source::clustering};
    const auto out = aggregate(rl, std::nullopt, rc, {true, true, ""}, FusionConfig{});
    EXPECT_EQ(out.fused_sources, (std::vector<Source>{Source::profile, Source::clustering}));
    EXPECT_EQ(out.order, rrf_fuse(Lists{rl.order, rc.order}, std::vector<double>{1, 1}));
}

TEST(Aggregate, NoPositiveWeightIsError)
{
    FusionConfig cfg;
    cfg.adaptive = false;
    cfg.static_weights = {0, 0, 0};
    const RankList rl{{A, B}, Source::profile};
    EXPECT_THROW(aggregate(rl, std::nullopt, std::nullopt, {}, cfg), Error);
}

TEST(FusionProperties, OutputIsPermutationAndScaleInvariant)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> weight(0.1, 5.0);
    const std::vector<ItemId> base{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    for (int i = 0; i < 300; ++i) {
        const Lists lists{shuffled(base, rng), shuffled(base, rng), shuffled(base, rng)};
        std::vector<double> w{weight(rng), weight(rng), weight(rng)};
        const auto bc = borda_fuse(lists, w);
        auto sorted = bc;
        std::sort(sorted.begin(), sorted.end());
        ASSERT_EQ(sorted, base);
        // Power-of-two scaling is exact in floating point, so ties are preserved.
        std::vector<double> doubled{w[0] * 4, w[1] * 4, w[2] * 4};
        EXPECT_EQ(borda_fuse(lists, doubled), bc);
        EXPECT_EQ(rrf_fuse(lists, doubled), rrf_fuse(lists, w));
    }
}

TEST(FusionProperties, Deterministic)
{
    const Lists lists{{5, 3, 1, 2, 4}, {1, 2, 3, 4, 5}, {4, 5, 1, 3, 2}};
    const std::vector<double> w{1, 0.5, 2};
    EXPECT_EQ(rrf_fuse(lists, w), rrf_fuse(lists, w));
    EXPECT_EQ(borda_fuse(lists, w), borda_fuse(lists, w));
}
