#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "streamlink/corpus.hpp"
#include "streamlink/embed.hpp"

namespace streamlink {

struct SynthConfig {
    std::size_t num_tutorials = 20;
    std::size_t num_transcripts = 50;
    std::size_t tools_per_tutorial = 3;
    std::size_t transcript_length = 12;  // sentences per transcript
    std::size_t sentence_length = 8;     // word slots per sentence
    double noise_rate = 0.2;             // probability a slot holds chitchat instead of a tool mention
    std::size_t chitchat_vocab_size = 200;
    std::size_t tool_vocab_size = 60;
    std::size_t embedding_dim = 32;
    double embedding_scale = 6.0;  // vector norm, close to that of common pretrained tables
    std::uint64_t seed = 7;

    /// Throws Error for zero counts, a noise rate outside [0, 1], or fewer
    /// distinct tool subsets than tutorials.
    void validate() const;
};

/// A generated corpus with its planted answers.
///
/// Transcript i is about tutorial i mod num_tutorials. Its tool slots name
/// that tutorial's tools, the first ones running through all of them, so a
/// noiseless transcript mentions every tool of its gold tutorial and no other.
/// A sentence is linked to the gold tutorial when it mentions one of its
/// tools, and to None otherwise.
struct SynthCorpus {
    CorpusBundle bundle;
    std::vector<std::string> gold;      // gold tutorial id per transcript
    std::vector<std::string> vocabulary;  // every token with an embedding, sorted
    std::vector<std::vector<double>> vectors;  // parallel to vocabulary, rounded to 1e-6

    EmbeddingTable embedding_table() const;
};

SynthCorpus generate_corpus(const SynthConfig& config);

/// Writes transcripts.jsonl, tutorials.jsonl, ontology.txt, annotations.jsonl,
/// embeddings.txt and a streamlink.json config pointing at them. Output is a
/// pure function of the config.
void write_corpus(const SynthCorpus& corpus, const std::filesystem::path& dir);

}  // namespace streamlink
