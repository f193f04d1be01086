#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "oracles.hpp"
#include "streamlink/error.hpp"
#include "streamlink/stats.hpp"

using namespace streamlink;

namespace {

std::vector<Transcript> toy_corpus() {
    return {oracle::make_doc("d1", {"a b"}), oracle::make_doc("d2", {"a b"}), oracle::make_doc("d3", {"a c"})};
}

}  // namespace

TEST(Stats, DocumentCounts) {
    const auto stats = build_stats(toy_corpus());
    EXPECT_EQ(stats.num_docs(), 3u);
    EXPECT_EQ(stats.doc_count("a"), 3u);
    EXPECT_EQ(stats.doc_count("b"), 2u);
    EXPECT_EQ(stats.doc_count("c"), 1u);
    EXPECT_EQ(stats.doc_count("zzz"), 0u);
    EXPECT_EQ(stats.pair_doc_count("a", "b"), 2u);
    EXPECT_EQ(stats.pair_doc_count("b", "a"), 2u);
    EXPECT_EQ(stats.pair_doc_count("b", "c"), 0u);
    EXPECT_EQ(stats.pair_doc_count("a", "a"), 3u);
}

TEST(Stats, RepeatedTokensCountOncePerDocument) {
    const std::vector<Transcript> docs{oracle::make_doc("d", {"a a a b", "b a"})};
    const auto stats = build_stats(docs);
    EXPECT_EQ(stats.doc_count("a"), 1u);
    EXPECT_EQ(stats.pair_doc_count("a", "b"), 1u);
}

TEST(Stats, EmptyCorpusRejected) {
    EXPECT_THROW(build_stats(std::vector<Transcript>{}), Error);
}

TEST(Pmi, ToyCorpus) {
    const auto docs = toy_corpus();
    const auto stats = build_stats(docs);
    const oracle::BrutePmi brute(docs);
    EXPECT_NEAR(pmi(stats, "a", "b"), std::log(2.0 / 6.0), 1e-12);
    EXPECT_NEAR(pmi(stats, "a", "b"), -1.0986, 1e-4);
    EXPECT_NEAR(pmi(stats, "a", "b"), brute.pmi("a", "b"), 1e-12);
    EXPECT_EQ(pmi(stats, "b", "c"), 0.0);
    EXPECT_EQ(pmi(stats, "c", "c"), 0.0);
    EXPECT_EQ(pmi(stats, "a", "unknown"), 0.0);
    EXPECT_EQ(pmi(stats, "a", "b"), pmi(stats, "b", "a"));
}

TEST(Pmi, SimilarityToyCorpus) {
    const auto docs = toy_corpus();
    const auto stats = build_stats(docs);
    const oracle::BrutePmi brute(docs);
    EXPECT_NEAR(pmi_similarity(stats, Tokens{"a"}, Tokens{"b"}), -1.0986, 1e-4);
    EXPECT_EQ(pmi_similarity(stats, Tokens{"b"}, Tokens{"c"}), 0.0);
    // pmi(a,a) = log(3/9) and pmi(b,a) = log(2/6) are equal here.
    const double sim = pmi_similarity(stats, Tokens{"a", "b"}, Tokens{"a"});
    EXPECT_NEAR(sim, brute.similarity({"a", "b"}, {"a"}), 1e-12);
    EXPECT_NEAR(sim, std::log(1.0 / 3.0), 1e-12);
}

TEST(Pmi, MatchesBruteForceOnRandomCorpora) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto docs = oracle::random_transcripts(rng, 5, 10, 6);
        const auto stats = build_stats(docs);
        const oracle::BrutePmi brute(docs);
        const auto d = oracle::random_tokens(rng, 1 + rng() % 10, 7);
        const auto t = oracle::random_tokens(rng, 1 + rng() % 10, 7);
        const double fast = pmi_similarity(stats, d, t);
        EXPECT_LE(oracle::rel_diff(fast, brute.similarity(d, t)), 1e-12);
        EXPECT_NEAR(fast, pmi_similarity(stats, t, d), 1e-12);
        EXPECT_LE(fast, 0.0);
    }
}

TEST(Stats, CountsNeverDecrease) {
    std::mt19937_64 rng(5);
    auto docs = oracle::random_transcripts(rng, 5, 10, 6);
    const auto before = build_stats(docs);
    docs.push_back(oracle::random_transcripts(rng, 1, 10, 6).front());
    const auto after = build_stats(docs);
    for (int a = 0; a < 6; ++a) {
        const auto wa = "w" + std::to_string(a);
        EXPECT_GE(after.doc_count(wa), before.doc_count(wa));
        for (int b = 0; b < 6; ++b) {
            const auto wb = "w" + std::to_string(b);
            EXPECT_GE(after.pair_doc_count(wa, wb), before.pair_doc_count(wa, wb));
            EXPECT_LE(after.pair_doc_count(wa, wb), std::min(after.doc_count(wa), after.doc_count(wb)));
        }
    }
}

TEST(Stats, SaveLoadRoundTrip) {
    std::mt19937_64 rng(9);
    const auto docs = oracle::random_transcripts(rng, 5, 10, 8);
    const auto stats = build_stats(docs);
    std::stringstream buf;
    stats.save(buf);
    const auto again = CooccurrenceStats::load(buf, "buf");
    EXPECT_EQ(again.num_docs(), stats.num_docs());
    EXPECT_EQ(again.content_hash(), stats.content_hash());
    EXPECT_EQ(again.content_hash(), corpus_hash(docs));
    for (int a = 0; a < 8; ++a) {
        for (int b = 0; b < 8; ++b) {
            const auto wa = "w" + std::to_string(a), wb = "w" + std::to_string(b);
            EXPECT_EQ(again.pair_doc_count(wa, wb), stats.pair_doc_count(wa, wb));
        }
    }
}

TEST(Stats, LoadRejectsGarbage) {
    std::istringstream in("not a stats file\n");
    EXPECT_THROW(CooccurrenceStats::load(in, "x"), Error);
}
