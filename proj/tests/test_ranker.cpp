#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "streamlink/error.hpp"
#include "streamlink/ranker.hpp"
#include "streamlink/stats.hpp"

using namespace streamlink;

namespace {

SynthCorpus clean_corpus() {
    SynthConfig c;
    c.noise_rate = 0.0;
    c.num_transcripts = 20;
    return generate_corpus(c);
}

TrainConfig quick_config() {
    TrainConfig c;
    c.epochs = 20;
    c.hidden_dim = 16;
    return c;
}

}  // namespace

TEST(SplitHalves, OddTokenGoesFirst) {
    const Tokens t{"a", "b", "c", "d", "e"};
    const auto [l, r] = split_halves(t);
    EXPECT_EQ(l.size(), 3u);
    EXPECT_EQ(r.size(), 2u);
    EXPECT_EQ(r.front(), "d");
    const Tokens even{"a", "b"};
    EXPECT_EQ(split_halves(even).first.size(), 1u);
}

TEST(ScoreStr, IdentityAndOrthogonality) {
    EmbeddingTable t(2);
    t.set("x", (Vec(2) << 1, 0).finished());
    t.set("y", (Vec(2) << 0, 1).finished());
    const auto tut = oracle::make_tutorial("T", "x", "y x");
    EXPECT_NEAR(score_str(tut, tut.all_tokens(), t), 1.0, 1e-12);
    const auto only_x = oracle::make_tutorial("T", "x", "x");
    EXPECT_NEAR(score_str(only_x, Tokens{"y"}, t), 0.0, 1e-15);
}

TEST(ScoreStr, MatchesHandComputedCosine) {
    std::mt19937_64 rng(12);
    EmbeddingTable t(3);
    const Vec a = oracle::random_vec(rng, 3), b = oracle::random_vec(rng, 3), c = oracle::random_vec(rng, 3);
    t.set("a", a);
    t.set("b", b);
    t.set("c", c);
    const auto tut = oracle::make_tutorial("T", "a", "b");
    const Vec tm = (a + b) / 2.0;
    const Vec sm = (c + a + a) / 3.0;
    EXPECT_NEAR(score_str(tut, Tokens{"c", "a", "a"}, t), tm.dot(sm) / (tm.norm() * sm.norm()), 1e-12);
}

TEST(ScoreDisc, ZeroWeightsGiveHalf) {
    const DiscourseClassifier c{BinaryMlp(8, 4)};
    const EmbeddingTable t(4);
    const auto tut = oracle::make_tutorial("T", "a title", "some body");
    EXPECT_DOUBLE_EQ(score_disc(c, tut, Tokens{"q", "r"}, t), 0.5);
}

TEST(ScoreDisc, BoundedForAnyInput) {
    std::mt19937_64 rng(13);
    const DiscourseClassifier c{BinaryMlp::xavier(8, 4, rng)};
    for (int k = 0; k < 50; ++k) {
        const double p = c.score(oracle::random_vec(rng, 4, 10.0), oracle::random_vec(rng, 4, 10.0));
        EXPECT_GT(p, 0.0);
        EXPECT_LT(p, 1.0);
    }
}

TEST(Discourse, SkipsShortTranscriptsAndNeedsTwo) {
    EmbeddingTable t(4);
    const std::vector<Transcript> docs{oracle::make_doc("a", {"one two three"}), oracle::make_doc("b", {"x"}),
                                       oracle::make_doc("c", {"four five"})};
    EXPECT_NO_THROW(train_discourse_classifier(docs, t, quick_config()));
    const std::vector<Transcript> too_few{oracle::make_doc("a", {"one two"}), oracle::make_doc("b", {"x"})};
    EXPECT_THROW(train_discourse_classifier(too_few, t, quick_config()), Error);
}

TEST(Discourse, DeterministicAndCheckpointable) {
    const auto corpus = clean_corpus();
    const auto table = corpus.embedding_table();
    auto text = [&](const DiscourseClassifier& c) {
        std::ostringstream out;
        write_checkpoint(out, to_checkpoint(c));
        return out.str();
    };
    const auto a = train_discourse_classifier(corpus.bundle.transcripts, table, quick_config());
    const auto b = train_discourse_classifier(corpus.bundle.transcripts, table, quick_config());
    EXPECT_EQ(text(a), text(b));
    EXPECT_EQ(text(discourse_from_checkpoint(to_checkpoint(a))), text(a));
}

TEST(Discourse, GoldTutorialOutscoresRandomOne) {
    const auto corpus = clean_corpus();
    const auto& b = corpus.bundle;
    const auto table = corpus.embedding_table();
    const auto c = train_discourse_classifier(b.transcripts, table, oracle::separability_config());
    std::mt19937_64 rng(14);
    const auto candidates = b.pool.candidates();
    std::size_t wins = 0, trials = 0;
    for (std::size_t i = 0; i < b.transcripts.size(); ++i) {
        const auto tokens = b.transcripts[i].tokens();
        const Tutorial* gold = b.pool.find(corpus.gold[i]);
        for (int k = 0; k < 5; ++k) {
            const Tutorial* other = candidates[rng() % candidates.size()];
            if (other == gold) continue;
            ++trials;
            wins += score_disc(c, *gold, tokens, table) > score_disc(c, *other, tokens, table);
        }
    }
    EXPECT_GE(static_cast<double>(wins), 0.8 * static_cast<double>(trials)) << wins << "/" << trials;
}

class RankTest : public ::testing::Test {
protected:
    std::vector<Transcript> docs{oracle::make_doc("d", {"use the brush here", "then the mask"})};
    CooccurrenceStats stats = build_stats(docs);
    ToolOntology ontology{{"brush", "mask"}};
    EmbeddingTable table{6};
    SummarizerModel summarizer;
    DiscourseClassifier zero{BinaryMlp(12, 4)};
    RankOptions plain{false, false, true, false};
};

TEST_F(RankTest, EqualTotalsOrderById) {
    const TutorialPool pool({oracle::make_tutorial("b", "Brush", "Use the brush."),
                             oracle::make_tutorial("a", "Brush", "Use the brush.")});
    const auto list = rank(docs[0], pool, ontology, stats, summarizer, zero, table, {}, plain);
    EXPECT_EQ(list.ids(), (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(list.entries[0].total, list.entries[1].total);
}

TEST_F(RankTest, SingleCandidate) {
    const TutorialPool pool({oracle::make_tutorial("a", "Brush", "Use the brush.")});
    FilterConfig f;
    f.fallback_min_keep = 1;
    RankOptions o = plain;
    o.use_filter = true;
    EXPECT_EQ(rank(docs[0], pool, ontology, stats, summarizer, zero, table, f, o).entries.size(), 1u);
}

TEST_F(RankTest, TotalsSortedAndSummed) {
    std::mt19937_64 rng(15);
    std::vector<Tutorial> tuts;
    for (int k = 0; k < 8; ++k) {
        tuts.push_back(oracle::make_tutorial("t" + std::to_string(k), "title",
                                             join_tokens(oracle::random_tokens(rng, 4, 10)) + " brush"));
    }
    const TutorialPool pool(tuts);
    const DiscourseClassifier c{BinaryMlp::xavier(12, 4, rng)};
    const auto list = rank(docs[0], pool, ontology, stats, summarizer, c, table, {}, plain);
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        const auto& e = list.entries[i];
        EXPECT_EQ(e.total, e.score_str + e.score_disc);
        if (i > 0) EXPECT_LE(e.total, list.entries[i - 1].total);
    }
    const auto again = rank(docs[0], pool, ontology, stats, summarizer, c, table, {}, plain);
    EXPECT_EQ(again.ids(), list.ids());
}

TEST_F(RankTest, RemovingNonTopTutorialKeepsOrder) {
    std::mt19937_64 rng(16);
    const DiscourseClassifier c{BinaryMlp::xavier(12, 4, rng)};
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Tutorial> tuts;
        for (int k = 0; k < 6; ++k) {
            tuts.push_back(oracle::make_tutorial("t" + std::to_string(k), "title",
                                                 join_tokens(oracle::random_tokens(rng, 3, 12))));
        }
        const auto full = rank(docs[0], TutorialPool(tuts), ontology, stats, summarizer, c, table, {}, plain).ids();
        const std::string drop = full[1 + rng() % (full.size() - 1)];
        std::erase_if(tuts, [&](const Tutorial& t) { return t.id == drop; });
        const auto reduced = rank(docs[0], TutorialPool(tuts), ontology, stats, summarizer, c, table, {}, plain).ids();
        auto expected = full;
        std::erase(expected, drop);
        EXPECT_EQ(reduced, expected);
    }
}

TEST_F(RankTest, NormalizedComponentsInUnitRange) {
    std::mt19937_64 rng(17);
    std::vector<Tutorial> tuts;
    for (int k = 0; k < 5; ++k) {
        tuts.push_back(oracle::make_tutorial("t" + std::to_string(k), "title",
                                             join_tokens(oracle::random_tokens(rng, 3, 12))));
    }
    const DiscourseClassifier c{BinaryMlp::xavier(12, 4, rng)};
    RankOptions o = plain;
    o.normalize = true;
    const auto list = rank(docs[0], TutorialPool(tuts), ontology, stats, summarizer, c, table, {}, o);
    for (const auto& e : list.entries) {
        EXPECT_GE(e.score_str, 0.0);
        EXPECT_LE(e.score_str, 1.0);
        EXPECT_GE(e.score_disc, 0.0);
        EXPECT_LE(e.score_disc, 1.0);
    }
}

TEST(RankedJsonl, OneLinePerEntry) {
    RankedList list;
    list.entries = {{"b", 0.5, 0.25, 0.75}, {"a", 0.1, 0.2, 0.3}};
    std::ostringstream out;
    write_ranked_jsonl(out, "live1", list);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j.at("transcript_id"), "live1");
    EXPECT_EQ(j.at("rank"), 1);
    EXPECT_EQ(j.at("tutorial_id"), "b");
    EXPECT_DOUBLE_EQ(j.at("score").get<double>(), 0.75);
    std::getline(in, line);
    EXPECT_EQ(nlohmann::json::parse(line).at("rank"), 2);
}
