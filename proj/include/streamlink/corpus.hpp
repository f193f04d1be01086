#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace streamlink {

using Tokens = std::vector<std::string>;

/// Splits text into normalized tokens.
///
/// Tokens are maximal runs of letters and digits, lowercased. An apostrophe
/// (ASCII ' or U+2019, stored as ASCII) between two word characters stays
/// inside the token, so contractions such as "i'm" survive whole; every other
/// punctuation or whitespace character is a separator and is dropped. Input is
/// UTF-8; invalid bytes act as separators.
Tokens tokenize(std::string_view text);

std::string join_tokens(std::span<const std::string> tokens);

/// True if `phrase` occurs as a contiguous subsequence of `tokens`.
bool contains_phrase(std::span<const std::string> tokens, std::span<const std::string> phrase);

struct Sentence {
    std::size_t index = 0;
    std::string text;
    Tokens tokens;
};

struct Transcript {
    std::string id;
    std::vector<Sentence> sentences;
    nlohmann::json source_meta;  // null when the record carried none

    /// All sentence tokens in order.
    Tokens tokens() const;
    std::size_t token_count() const;
};

enum class TutorialKind { Using, HowTo, None };

std::string_view to_string(TutorialKind kind);

inline constexpr std::string_view kNoneTutorialId = "none";

struct Tutorial {
    std::string id;
    TutorialKind kind = TutorialKind::Using;
    std::string title;
    std::string body;
    Tokens title_tokens;
    Tokens body_tokens;

    bool is_none() const { return kind == TutorialKind::None; }
    /// Title tokens followed by body tokens.
    Tokens all_tokens() const;
};

using TutorialRefs = std::vector<const Tutorial*>;

/// The candidate tutorials plus exactly one None pseudo-tutorial.
///
/// The None entry is appended on construction when the input lacks one. It is
/// part of the label space for sentence linking and never a ranking candidate.
class TutorialPool {
public:
    TutorialPool() = default;
    explicit TutorialPool(std::vector<Tutorial> tutorials);

    const std::vector<Tutorial>& tutorials() const { return tutorials_; }
    /// Every tutorial except None, in pool order.
    TutorialRefs candidates() const;
    const Tutorial* find(std::string_view id) const;
    const Tutorial& none() const { return tutorials_[none_index_]; }
    std::size_t size() const { return tutorials_.size(); }

private:
    std::vector<Tutorial> tutorials_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t none_index_ = 0;
};

/// Normalized, deduplicated tool-name phrases.
class ToolOntology {
public:
    ToolOntology() = default;
    explicit ToolOntology(const std::vector<std::string>& phrases);

    /// Normalizes and inserts a phrase. Returns false if it was already present.
    /// Throws Error when the phrase normalizes to nothing.
    bool add(std::string_view phrase);

    const std::vector<Tokens>& phrases() const { return phrases_; }
    std::size_t size() const { return phrases_.size(); }

    /// Every phrase occurring contiguously in `tokens`, as space-joined text.
    std::set<std::string> match(std::span<const std::string> tokens) const;

private:
    std::vector<Tokens> phrases_;
    std::set<std::string> keys_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_first_token_;
};

std::set<std::string> match_tool_names(const Transcript& transcript, const ToolOntology& ontology);

struct AnnotationRecord {
    std::string transcript_id;
    std::size_t sentence_index = 0;
    std::vector<std::string> linked_tutorial_ids;
};

// Parsers take the stream plus a name used in error messages. The load_*
// variants open the file and forward to them.
std::vector<Transcript> parse_transcripts(std::istream& in, const std::string& source);
TutorialPool parse_tutorial_pool(std::istream& in, const std::string& source);
ToolOntology parse_ontology(std::istream& in, const std::string& source);
std::vector<AnnotationRecord> parse_annotations(std::istream& in, const std::string& source,
                                                std::span<const Transcript> transcripts,
                                                const TutorialPool& pool);

std::vector<Transcript> load_transcripts(const std::filesystem::path& path);
TutorialPool load_tutorial_pool(const std::filesystem::path& path);
ToolOntology load_ontology(const std::filesystem::path& path);
std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path,
                                               std::span<const Transcript> transcripts,
                                               const TutorialPool& pool);

void write_transcripts(std::ostream& out, std::span<const Transcript> transcripts);
void write_tutorial_pool(std::ostream& out, const TutorialPool& pool);
void write_ontology(std::ostream& out, const ToolOntology& ontology);
void write_annotations(std::ostream& out, std::span<const AnnotationRecord> annotations);

struct CorpusPaths {
    std::filesystem::path transcripts;
    std::filesystem::path tutorials;
    std::filesystem::path ontology;
    std::filesystem::path annotations;  // optional; empty path skips loading
};

struct CorpusBundle {
    std::vector<Transcript> transcripts;
    TutorialPool pool;
    ToolOntology ontology;
    std::vector<AnnotationRecord> annotations;

    const Transcript* find_transcript(std::string_view id) const;
};

CorpusBundle load_bundle(const CorpusPaths& paths);

}  // namespace streamlink
