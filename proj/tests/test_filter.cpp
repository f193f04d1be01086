#include <gtest/gtest.h>

#include <limits>

#include "oracles.hpp"
#include "streamlink/filter.hpp"
#include "streamlink/stats.hpp"

using namespace streamlink;

namespace {

std::vector<std::string> ids(const TutorialRefs& refs) {
    std::vector<std::string> out;
    for (const auto* t : refs) out.push_back(t->id);
    return out;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(FilterDk, KeepsTutorialsMentioningTools) {
    const ToolOntology o({"brush", "lasso tool"});
    const TutorialPool pool({oracle::make_tutorial("A", "Painting", "Pick the brush and paint."),
                             oracle::make_tutorial("B", "Masks", "Add a layer mask.")});
    EXPECT_EQ(ids(filter_dk(oracle::make_doc("d", {"now the brush"}), pool, o)), (std::vector<std::string>{"A"}));
}

TEST(FilterDk, TitleCountsToo) {
    const ToolOntology o({"brush"});
    const TutorialPool pool({oracle::make_tutorial("A", "Brush basics", "Paint things."),
                             oracle::make_tutorial("B", "Masks", "Add a layer mask.")});
    EXPECT_EQ(ids(filter_dk(oracle::make_doc("d", {"brush"}), pool, o)), (std::vector<std::string>{"A"}));
}

TEST(FilterDk, NoToolNamesKeepsAll) {
    const ToolOntology o({"brush"});
    const TutorialPool pool({oracle::make_tutorial("A", "x", "y"), oracle::make_tutorial("B", "x", "z")});
    EXPECT_EQ(ids(filter_dk(oracle::make_doc("d", {"just chatting"}), pool, o)),
              (std::vector<std::string>{"A", "B"}));
}

TEST(FilterDk, UnmentionedToolKeepsNothing) {
    const ToolOntology o({"lasso tool"});
    const TutorialPool pool({oracle::make_tutorial("A", "x", "y"), oracle::make_tutorial("B", "x", "z")});
    EXPECT_TRUE(filter_dk(oracle::make_doc("d", {"the lasso tool"}), pool, o).empty());
}

class FilterSimTest : public ::testing::Test {
protected:
    std::vector<Transcript> docs{oracle::make_doc("d1", {"a b"}), oracle::make_doc("d2", {"a b"}),
                                 oracle::make_doc("d3", {"a c"})};
    CooccurrenceStats stats = build_stats(docs);
    TutorialPool pool{{oracle::make_tutorial("TB", "title", "b"), oracle::make_tutorial("TC", "title", "c")}};
};

TEST_F(FilterSimTest, InfiniteThresholds) {
    const auto d = oracle::make_doc("q", {"a"});
    EXPECT_EQ(filter_sim(d, pool, stats, -kInf).size(), 2u);
    EXPECT_EQ(filter_sim(d, pool, stats, std::numeric_limits<double>::lowest()).size(), 2u);
    EXPECT_TRUE(filter_sim(d, pool, stats, kInf).empty());
}

TEST_F(FilterSimTest, StrictThreshold) {
    const oracle::BrutePmi brute(docs);
    // Both bodies score log(1/3) against [a].
    const auto a = oracle::make_doc("q", {"a"});
    EXPECT_NEAR(brute.similarity({"a"}, {"c"}), -1.0986, 1e-4);
    EXPECT_TRUE(filter_sim(a, pool, stats, -0.5).empty());
    // Against [b]: Sim(b,b) = log(1/2), Sim(b,c) = 0.
    const auto b = oracle::make_doc("q", {"b"});
    EXPECT_EQ(ids(filter_sim(b, pool, stats, -0.5)), (std::vector<std::string>{"TC"}));
    EXPECT_TRUE(filter_sim(b, pool, stats, 0.0).empty());
}

TEST(FilterPool, IntersectionWithoutFallback) {
    const std::vector<Transcript> docs{oracle::make_doc("d", {"brush"})};
    const auto stats = build_stats(docs);
    const ToolOntology o({"brush"});
    const TutorialPool pool({oracle::make_tutorial("T1", "x", "brush one"), oracle::make_tutorial("T2", "x", "brush two"),
                             oracle::make_tutorial("T3", "x", "other")});
    FilterConfig cfg;
    cfg.fallback_min_keep = 1;
    EXPECT_EQ(ids(filter_pool(docs[0], pool, o, stats, cfg)), (std::vector<std::string>{"T1", "T2"}));
}

TEST(FilterPool, FallbackTopsUpBySimilarity) {
    const std::vector<Transcript> docs{oracle::make_doc("d1", {"a b"}), oracle::make_doc("d2", {"a b"}),
                                       oracle::make_doc("d3", {"a c"})};
    const auto stats = build_stats(docs);
    const ToolOntology o({"zzz"});
    const TutorialPool pool({oracle::make_tutorial("T1", "x", "b"), oracle::make_tutorial("T2", "x", "c"),
                             oracle::make_tutorial("T3", "x", "b b"), oracle::make_tutorial("T4", "x", "q")});
    FilterConfig cfg;
    cfg.delta = kInf;
    cfg.fallback_min_keep = 3;
    // Sim against [b]: T2 0, T4 0 (unknown word), T1 = T3 = log(1/2); ties by id.
    const auto kept = ids(filter_pool(oracle::make_doc("q", {"b"}), pool, o, stats, cfg));
    EXPECT_EQ(kept.size(), 3u);
    EXPECT_EQ(std::set<std::string>(kept.begin(), kept.end()), (std::set<std::string>{"T1", "T2", "T4"}));
}

TEST(FilterPool, NeverReturnsNoneAndBoundedBySize) {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        const auto docs = oracle::random_transcripts(rng, 5, 10, 6);
        const auto stats = build_stats(docs);
        std::vector<Tutorial> tuts;
        for (int k = 0; k < 5; ++k) {
            tuts.push_back(oracle::make_tutorial("T" + std::to_string(k), "t",
                                                 join_tokens(oracle::random_tokens(rng, 1 + rng() % 5, 6))));
        }
        const TutorialPool pool(tuts);
        const ToolOntology o({"w0", "w1 w2"});
        FilterConfig cfg;
        cfg.delta = -1.0;
        cfg.fallback_min_keep = 1 + rng() % 5;
        const auto kept = filter_pool(docs[0], pool, o, stats, cfg);
        EXPECT_LE(kept.size(), 5u);
        EXPECT_GE(kept.size(), cfg.fallback_min_keep);
        for (const auto* t : kept) EXPECT_FALSE(t->is_none());
        EXPECT_EQ(ids(kept), ids(filter_pool(docs[0], pool, o, stats, cfg)));
    }
}

TEST(FilterSim, KeptOutscoreRemoved) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        const auto docs = oracle::random_transcripts(rng, 5, 10, 6);
        const auto stats = build_stats(docs);
        std::vector<Tutorial> tuts;
        for (int k = 0; k < 6; ++k) {
            tuts.push_back(oracle::make_tutorial("T" + std::to_string(k), "t",
                                                 join_tokens(oracle::random_tokens(rng, 1 + rng() % 5, 6))));
        }
        const TutorialPool pool(tuts);
        const double delta = -std::uniform_real_distribution<double>(0.0, 2.0)(rng);
        const auto kept = filter_sim(docs[0], pool, stats, delta);
        const oracle::BrutePmi brute(docs);
        const auto d = docs[0].tokens();
        double min_kept = kInf, max_removed = -kInf;
        for (const auto& t : tuts) {
            const double s = brute.similarity(d, t.body_tokens);
            const bool in = std::any_of(kept.begin(), kept.end(), [&](const Tutorial* k) { return k->id == t.id; });
            EXPECT_EQ(in, s > delta);
            if (in) {
                min_kept = std::min(min_kept, s);
            } else {
                max_removed = std::max(max_removed, s);
            }
        }
        if (!kept.empty() && kept.size() < tuts.size()) EXPECT_GT(min_kept, max_removed);
    }
}
