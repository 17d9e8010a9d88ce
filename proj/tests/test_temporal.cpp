#include "dyta/temporal/extractor.hpp"
#include "support/sim_fixture.hpp"

#include <gtest/gtest.h>

using namespace dyta;
using namespace dyta::temporal;
using dyta::testing::SimFixture;

namespace {

std::size_t count_occurrences(const std::string& text, const std::string& needle)
{
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

} // namespace

TEST(ParsePatternFlags, StrictYesNo)
{
    const auto a = parse_pattern_flags("sequential: yes, clustering: no");
    EXPECT_TRUE(a.has_sequential);
    EXPECT_FALSE(a.has_clustering);
    EXPECT_TRUE(a.cluster_note.empty());
    const auto b = parse_pattern_flags("Sequential: NO\nClustering: Yes\nclusters: late-night horror");
    EXPECT_FALSE(b.has_sequential);
    EXPECT_TRUE(b.has_clustering);
    EXPECT_EQ(b.cluster_note, "late-night horror");
}

TEST(ParsePatternFlags, MalformedMeansNoPatterns)
{
    for (const char* reply : {"", "maybe", "sequential: perhaps clustering: yes", "sequential: yes"}) {
        const auto f = parse_pattern_flags(reply);
        EXPECT_FALSE(f.has_sequential) << reply;
        EXPECT_FALSE(f.has_clustering) << reply;
    }
}

TEST(DetectPatterns, OneCallAndNoneForDegenerateWindow)
{
    llm::MockConfig cfg;
    cfg.script["tpe.detect"] = "sequential: yes, clustering: no";
    SimFixture f(cfg);
    const auto h = SimFixture::history(5);
    const auto flags = detect_patterns(h, *f.ctx);
    EXPECT_TRUE(flags.has_sequential);
    EXPECT_FALSE(flags.has_clustering);
    EXPECT_EQ(f.calls("tpe.detect"), 1u);

    const auto one = SimFixture::history(1);
    const auto none = detect_patterns(one, *f.ctx);
    EXPECT_FALSE(none.has_sequential || none.has_clustering);
    EXPECT_EQ(f.calls("tpe.detect"), 1u);
}

TEST(DetectPatterns, BackendFailureMeansNoPatterns)
{
    llm::MockConfig cfg;
    cfg.policy = llm::MockPolicy::scripted;
    SimFixture f(cfg);
    const auto h = SimFixture::history(4);
    const auto flags = detect_patterns(h, *f.ctx);
    EXPECT_FALSE(flags.has_sequential || flags.has_clustering);
}

TEST(ClusterRank, TwoStepIssuesTwoCallsAndThreadsAnalysis)
{
    llm::MockConfig cfg;
    cfg.script["tpe.cluster.analyze"] = "recent horror cluster";
    SimFixture f(cfg);
    const auto h = SimFixture::history(10);
    const auto page = SimFixture::page(20, 10, 6);

    const auto prompts = cluster_prompts(h, page, *f.ctx, true, true);
    ASSERT_TRUE(prompts.analysis);
    EXPECT_EQ(*prompts.analysis, "recent horror cluster");
    EXPECT_NE(prompts.rank_request.messages.back().content.find("recent horror cluster"), std::string::npos);
    EXPECT_EQ(prompts.rank_request.tag, "tpe.cluster.rank");

    f.gateway->ledger().clear();
    const auto r = cluster_rank(h, page, *f.ctx, true);
    EXPECT_EQ(f.gateway->ledger().size(), 2u);
    EXPECT_EQ(f.calls("tpe.cluster.analyze"), 1u);
    EXPECT_EQ(f.calls("tpe.cluster.rank"), 1u);
    EXPECT_EQ(r.order.front(), page.ground_truth);
    EXPECT_EQ(r.source, fusion::Source::clustering);
}

TEST(ClusterRank, OneStepIssuesOneCall)
{
    SimFixture f;
    const auto h = SimFixture::history(10);
    const auto page = SimFixture::page(20, 10, 4);
    const auto r = cluster_rank(h, page, *f.ctx, false);
    EXPECT_EQ(f.gateway->ledger().size(), 1u);
    EXPECT_EQ(f.calls("tpe.cluster"), 1u);
    EXPECT_EQ(r.order.front(), page.ground_truth);
}

TEST(BuildIclExamples, ZeroShot)
{
    const auto h = SimFixture::history(10);
    EXPECT_TRUE(build_icl_examples(h, 0).examples.empty());
}

TEST(BuildIclExamples, TargetsAreTheMostRecentPositions)
{
    const auto h = SimFixture::history(10, 101); // window positions 1..10 hold items 101..110
    const auto set = build_icl_examples(h, 3);
    ASSERT_EQ(set.examples.size(), 3u);
    EXPECT_EQ(set.examples[0].next.item_id, 108);
    EXPECT_EQ(set.examples[1].next.item_id, 109);
    EXPECT_EQ(set.examples[2].next.item_id, 110);
    // Each demonstration shows the three interactions before its target.
    ASSERT_EQ(set.examples[0].context.size(), 3u);
    EXPECT_EQ(set.examples[0].context.front().item_id, 105);
    EXPECT_EQ(set.examples[0].context.back().item_id, 107);
}

TEST(BuildIclExamples, ClampsToWindowMinusOne)
{
    const auto h = SimFixture::history(5);
    const auto set = build_icl_examples(h, 9);
    EXPECT_EQ(set.examples.size(), 4u);
    EXPECT_EQ(set.examples.front().context.size(), 1u);
    EXPECT_EQ(build_icl_examples(SimFixture::history(1), 3).examples.size(), 0u);
}

TEST(SequentialRank, PromptHoldsExactlyKDemonstrations)
{
    SimFixture f;
    const auto h = SimFixture::history(10);
    const auto page = SimFixture::page(20, 10, 2);
    const auto req = sequential_request(h, page, *f.ctx, build_icl_examples(h, 3), true);
    const auto& prompt = req.messages.back().content;
    EXPECT_EQ(count_occurrences(prompt, "### Example "), 3u);
    EXPECT_EQ(req.tag, "tpe.seq");
    const auto zero = sequential_request(h, page, *f.ctx, build_icl_examples(h, 0), true);
    EXPECT_EQ(count_occurrences(zero.messages.back().content, "### Example "), 0u);
}

TEST(SequentialRank, DemonstrationsNeverShowTheLiveTarget)
{
    SimFixture f;
    const auto h = SimFixture::history(10);
    const auto page = SimFixture::page(30, 10, 5);
    const auto examples = build_icl_examples(h, 9);
    const auto text = render_icl_examples(f.catalog, examples);
    EXPECT_EQ(text.find(render::item_text(f.catalog, page.ground_truth)), std::string::npos);
}

TEST(SequentialRank, OneCallFollowingThePolicy)
{
    llm::MockConfig cfg;
    cfg.policy = llm::MockPolicy::utility;
    cfg.utilities = {{21, 3.0}, {22, 2.0}, {23, 1.0}};
    SimFixture f(cfg);
    const auto h = SimFixture::history(6);
    data::CandidatePage page{{{1, 23}, {2, 21}, {3, 22}}, 22, 0};
    const auto r = sequential_rank(h, page, *f.ctx, build_icl_examples(h, 3));
    EXPECT_EQ(r.order, (std::vector<data::ItemId>{21, 22, 23}));
    EXPECT_EQ(f.calls("tpe.seq"), 1u);
    EXPECT_EQ(f.gateway->ledger().size(), 1u);
}

TEST(PositionNote, DirectPromptingOnlyAddsTheNote)
{
    SimFixture f;
    const auto h = SimFixture::history(6);
    const auto page = SimFixture::page(20, 10, 3);
    const auto examples = build_icl_examples(h, 3);
    const auto on = sequential_request(h, page, *f.ctx, examples, true).messages.back().content;
    const auto off = sequential_request(h, page, *f.ctx, examples, false).messages.back().content;
    EXPECT_NE(on.find("candidate positions carry no significance"), std::string::npos);
    EXPECT_EQ(off.find("candidate positions carry no significance"), std::string::npos);
    auto stripped = on;
    stripped.erase(stripped.find(position_note_text), position_note_text.size());
    EXPECT_EQ(stripped, off);
}
