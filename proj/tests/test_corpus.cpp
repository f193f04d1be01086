#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "streamlink/corpus.hpp"
#include "streamlink/error.hpp"

using namespace streamlink;

TEST(Tokenize, LowercasesAndDropsPunctuation) {
    EXPECT_EQ(tokenize("Change this brush."), (Tokens{"change", "this", "brush"}));
    EXPECT_TRUE(tokenize("").empty());
    EXPECT_TRUE(tokenize("  ...  !? ").empty());
}

TEST(Tokenize, KeepsContractions) {
    EXPECT_EQ(tokenize("I'm gonna work"), (Tokens{"i'm", "gonna", "work"}));
    EXPECT_EQ(tokenize("Don’t stop"), (Tokens{"don't", "stop"}));
    EXPECT_EQ(tokenize("'quoted' word'"), (Tokens{"quoted", "word"}));
}

TEST(Tokenize, InvalidUtf8Separates) {
    EXPECT_EQ(tokenize("ab\xff" "cd"), (Tokens{"ab", "cd"}));
}

TEST(Tokenize, IdempotentOnJoinedOutput) {
    for (const char* text : {"Hello, World!  Layer-mask 3D", "I'm here; you're there", "x"}) {
        const Tokens once = tokenize(text);
        EXPECT_EQ(tokenize(join_tokens(once)), once) << text;
    }
}

TEST(Ontology, MatchesContiguousPhrases) {
    ToolOntology o({"lasso tool", "brush"});
    const auto doc = oracle::make_doc("d", {"grab the lasso tool now"});
    EXPECT_EQ(match_tool_names(doc, o), (std::set<std::string>{"lasso tool"}));

    const auto apart = oracle::make_doc("d", {"lasso the tool"});
    EXPECT_TRUE(match_tool_names(apart, o).empty());
}

TEST(Ontology, SetSemanticsAndOverlaps) {
    ToolOntology o({"brush", "mixer brush"});
    const auto doc = oracle::make_doc("d", {"brush then the mixer brush", "brush again"});
    EXPECT_EQ(match_tool_names(doc, o), (std::set<std::string>{"brush", "mixer brush"}));
}

TEST(Ontology, NoMatchGivesEmptySet) {
    ToolOntology o({"brush"});
    EXPECT_TRUE(match_tool_names(oracle::make_doc("d", {"hello chat"}), o).empty());
}

TEST(Ontology, MonotoneInPhrases) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto docs = oracle::random_transcripts(rng, 1, 20, 8);
        ToolOntology small, big;
        for (int k = 0; k < 4; ++k) {
            const auto p = join_tokens(oracle::random_tokens(rng, 1 + rng() % 2, 8));
            small.add(p);
            big.add(p);
        }
        for (int k = 0; k < 4; ++k) big.add(join_tokens(oracle::random_tokens(rng, 1 + rng() % 2, 8)));
        const auto a = match_tool_names(docs[0], small);
        const auto b = match_tool_names(docs[0], big);
        for (const auto& m : a) EXPECT_TRUE(b.count(m));
        for (const auto& m : b) {
            bool known = false;
            for (const auto& p : big.phrases()) known = known || join_tokens(p) == m;
            EXPECT_TRUE(known);
        }
    }
}

TEST(Ontology, NormalizesAndDeduplicates) {
    ToolOntology o;
    EXPECT_TRUE(o.add("Lasso  Tool"));
    EXPECT_FALSE(o.add("lasso tool"));
    EXPECT_EQ(o.size(), 1u);
    EXPECT_THROW(o.add("..."), Error);
}

TEST(Transcripts, ParsesRecords) {
    std::istringstream in(R"({"id":"a","sentences":["Hello there.","Use the brush"]}
{"id":"b","sentences":["one"]}
)");
    const auto docs = parse_transcripts(in, "t.jsonl");
    ASSERT_EQ(docs.size(), 2u);
    EXPECT_EQ(docs[0].id, "a");
    EXPECT_EQ(docs[0].sentences[1].tokens, (Tokens{"use", "the", "brush"}));
    EXPECT_EQ(docs[0].token_count(), 5u);
}

TEST(Transcripts, MissingIdNamesLine) {
    std::istringstream in("{\"id\":\"a\",\"sentences\":[\"x\"]}\n{\"sentences\":[\"y\"]}\n");
    try {
        parse_transcripts(in, "t.jsonl");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("\"id\""), std::string::npos);
    }
}

TEST(Transcripts, DuplicateIdRejected) {
    std::istringstream in("{\"id\":\"a\",\"sentences\":[\"x\"]}\n{\"id\":\"a\",\"sentences\":[\"y\"]}\n");
    EXPECT_THROW(parse_transcripts(in, "t.jsonl"), ParseError);
}

TEST(Transcripts, BlankSentenceDroppedAndReindexed) {
    std::istringstream in(R"({"id":"a","sentences":["first","   ","?!","third"]})");
    const auto docs = parse_transcripts(in, "t.jsonl");
    ASSERT_EQ(docs[0].sentences.size(), 2u);
    EXPECT_EQ(docs[0].sentences[1].index, 1u);
    EXPECT_EQ(docs[0].sentences[1].text, "third");
}

TEST(Transcripts, RoundTrip) {
    std::istringstream in(R"({"id":"a","sentences":["Hello there.","Use the brush"],"meta":{"channel":7}}
{"id":"b","sentences":["one"]}
)");
    const auto docs = parse_transcripts(in, "t.jsonl");
    std::stringstream buf;
    write_transcripts(buf, docs);
    const auto again = parse_transcripts(buf, "buf");
    ASSERT_EQ(again.size(), docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
        EXPECT_EQ(again[i].id, docs[i].id);
        EXPECT_EQ(again[i].tokens(), docs[i].tokens());
        EXPECT_EQ(again[i].source_meta, docs[i].source_meta);
    }
}

TEST(TutorialPool, NoneAppendedWhenAbsent) {
    std::istringstream in(R"({"id":"t1","kind":"using","title":"Using the Brush","body":"Pick the brush."}
{"id":"t2","kind":"howto","title":"How to mask","body":"Add a mask."}
)");
    const auto pool = parse_tutorial_pool(in, "p.jsonl");
    EXPECT_EQ(pool.size(), 3u);
    EXPECT_TRUE(pool.none().is_none());
    EXPECT_EQ(pool.candidates().size(), 2u);
    EXPECT_EQ(pool.find("t2")->kind, TutorialKind::HowTo);
    EXPECT_EQ(pool.find("missing"), nullptr);

    std::stringstream buf;
    write_tutorial_pool(buf, pool);
    const auto again = parse_tutorial_pool(buf, "buf");
    ASSERT_EQ(again.size(), pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        EXPECT_EQ(again.tutorials()[i].id, pool.tutorials()[i].id);
        EXPECT_EQ(again.tutorials()[i].body, pool.tutorials()[i].body);
    }
}

TEST(TutorialPool, RejectsBadKindAndEmptyBody) {
    std::istringstream kind(R"({"id":"t1","kind":"video","title":"x","body":"y"})");
    EXPECT_THROW(parse_tutorial_pool(kind, "p"), ParseError);
    std::istringstream body(R"({"id":"t1","kind":"using","title":"x","body":"  "})");
    EXPECT_THROW(parse_tutorial_pool(body, "p"), ParseError);
}

class AnnotationTest : public ::testing::Test {
protected:
    void SetUp() override {
        docs = {oracle::make_doc("a", {"one", "two"})};
        pool = TutorialPool({oracle::make_tutorial("t1", "Brush", "Use the brush.")});
    }
    std::vector<AnnotationRecord> parse(const std::string& text) {
        std::istringstream in(text);
        return parse_annotations(in, "ann.jsonl", docs, pool);
    }
    std::vector<Transcript> docs;
    TutorialPool pool;
};

TEST_F(AnnotationTest, ValidRecords) {
    const auto a = parse(R"({"transcript_id":"a","sentence_index":0,"tutorials":["t1"]}
{"transcript_id":"a","sentence_index":1,"tutorials":["none"]}
)");
    ASSERT_EQ(a.size(), 2u);
    EXPECT_EQ(a[1].linked_tutorial_ids, (std::vector<std::string>{"none"}));

    std::stringstream buf;
    write_annotations(buf, a);
    const auto again = parse_annotations(buf, "buf", docs, pool);
    ASSERT_EQ(again.size(), 2u);
    EXPECT_EQ(again[0].linked_tutorial_ids, a[0].linked_tutorial_ids);
}

TEST_F(AnnotationTest, MissingTranscript) {
    EXPECT_THROW(parse(R"({"transcript_id":"zzz","sentence_index":0,"tutorials":["t1"]})"), ParseError);
}

TEST_F(AnnotationTest, UnknownTutorialNamesLine) {
    try {
        parse("\n{\"transcript_id\":\"a\",\"sentence_index\":0,\"tutorials\":[\"t9\"]}\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_NE(std::string(e.what()).find("t9"), std::string::npos);
    }
}

TEST_F(AnnotationTest, SentenceOutOfRange) {
    EXPECT_THROW(parse(R"({"transcript_id":"a","sentence_index":2,"tutorials":["t1"]})"), ParseError);
}

TEST_F(AnnotationTest, NoneMixedWithTutorial) {
    EXPECT_THROW(parse(R"({"transcript_id":"a","sentence_index":0,"tutorials":["t1","none"]})"), ParseError);
}
