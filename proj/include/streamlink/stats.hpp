#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "streamlink/corpus.hpp"

namespace streamlink {

/// Document-level unigram and pair counts over a set of transcripts.
///
/// A transcript contributes at most one to any count, however often a word
/// occurs in it. Pair counts are stored for unordered pairs of distinct ids;
/// the diagonal is answered from the unigram counts.
class CooccurrenceStats {
public:
    using TokenId = std::uint32_t;

    std::size_t num_docs() const { return num_docs_; }
    std::size_t vocab_size() const { return tokens_.size(); }
    std::size_t num_pairs() const { return pairs_.size(); }

    std::optional<TokenId> id(std::string_view token) const;
    const std::string& token(TokenId id) const { return tokens_[id]; }

    std::uint32_t doc_count(std::string_view token) const;
    std::uint32_t doc_count(TokenId id) const { return doc_counts_[id]; }
    std::uint32_t pair_doc_count(std::string_view a, std::string_view b) const;
    std::uint32_t pair_doc_count(TokenId a, TokenId b) const;

    /// Adds one document. Counts only grow.
    void add_document(std::span<const std::string> tokens);

    /// Hash of the token streams the counts were built from.
    std::uint64_t content_hash() const { return content_hash_; }

    /// Every stored pair as (a, b, count) with a < b, sorted.
    std::vector<std::tuple<TokenId, TokenId, std::uint32_t>> sorted_pairs() const;

    void save(std::ostream& out) const;
    static CooccurrenceStats load(std::istream& in, const std::string& source);

private:
    static std::uint64_t pair_key(TokenId a, TokenId b);
    TokenId intern(const std::string& token);

    std::size_t num_docs_ = 0;
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, TokenId> ids_;
    std::vector<std::uint32_t> doc_counts_;
    std::unordered_map<std::uint64_t, std::uint32_t> pairs_;
    std::uint64_t content_hash_ = 0xcbf29ce484222325ULL;
};

/// Counts over the given transcripts. Throws Error on an empty list.
CooccurrenceStats build_stats(std::span<const Transcript> transcripts);

/// log(COUNT(a,b) / (COUNT(a) * COUNT(b))), or 0 when any count is zero or a
/// word is unknown.
double pmi(const CooccurrenceStats& stats, std::string_view a, std::string_view b);

/// Mean pairwise PMI over token occurrences: sum over every (w in doc, v in
/// tutorial) of pmi(w, v), divided by n * m.
double pmi_similarity(const CooccurrenceStats& stats, std::span<const std::string> doc_tokens,
                      std::span<const std::string> tutorial_tokens);
double pmi_similarity(const CooccurrenceStats& stats, const Transcript& doc, const Tutorial& tutorial);

/// Stats cached at `path` when its hash matches the transcripts, rebuilt and
/// written back otherwise.
CooccurrenceStats load_or_build_stats(const std::filesystem::path& path,
                                      std::span<const Transcript> transcripts);

std::uint64_t corpus_hash(std::span<const Transcript> transcripts);

}  // namespace streamlink
