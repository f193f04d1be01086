#include "streamlink/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "streamlink/error.hpp"

namespace streamlink {
namespace {

constexpr char32_t kInvalid = 0xFFFD;

char32_t next_code_point(std::string_view s, std::size_t& i) {
    const auto lead = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    char32_t cp = 0;
    if (lead < 0x80) {
        ++i;
        return lead;
    } else if ((lead & 0xE0) == 0xC0) {
        extra = 1;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        extra = 2;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        extra = 3;
        cp = lead & 0x07;
    } else {
        ++i;
        return kInvalid;
    }
    if (i + extra >= s.size()) {
        ++i;
        return kInvalid;
    }
    for (std::size_t k = 1; k <= extra; ++k) {
        const auto byte = static_cast<unsigned char>(s[i + k]);
        if ((byte & 0xC0) != 0x80) {
            ++i;
            return kInvalid;
        }
        cp = (cp << 6) | (byte & 0x3F);
    }
    i += extra + 1;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool in_range(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

// Letters and digits. Outside ASCII, everything is treated as a letter except
// the punctuation and symbol blocks that show up in transcripts.
bool is_word_char(char32_t cp) {
    if (cp < 0x80) {
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
    }
    if (cp < 0xC0 || cp == 0xD7 || cp == 0xF7 || cp == kInvalid) return false;
    if (in_range(cp, 0x2000, 0x2BFF)) return false;  // punctuation, currency, arrows, math, boxes
    if (in_range(cp, 0x2E00, 0x2E7F)) return false;
    if (in_range(cp, 0x3000, 0x303F)) return false;
    if (in_range(cp, 0xFE30, 0xFE4F)) return false;
    if (in_range(cp, 0xFF00, 0xFF0F) || in_range(cp, 0xFF1A, 0xFF20)) return false;
    if (in_range(cp, 0x1F000, 0x1FAFF)) return false;  // emoji and pictographs
    return true;
}

char32_t to_lower(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    if (cp < 0xC0) return cp;
    if (in_range(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 0x20;
    if (in_range(cp, 0x100, 0x137) || in_range(cp, 0x14A, 0x177)) return cp | 1;
    if (in_range(cp, 0x139, 0x148) || in_range(cp, 0x179, 0x17E)) return (cp & 1) ? cp + 1 : cp;
    if (in_range(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 0x20;
    if (in_range(cp, 0x410, 0x42F)) return cp + 0x20;
    if (in_range(cp, 0x400, 0x40F)) return cp + 0x50;
    return cp;
}

bool is_apostrophe(char32_t cp) { return cp == U'\'' || cp == 0x2019; }

nlohmann::json parse_json_line(const std::string& line, const std::string& source,
                               std::size_t line_no) {
    nlohmann::json record;
    try {
        record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(source, line_no, std::string("invalid JSON: ") + e.what());
    }
    if (!record.is_object()) throw ParseError(source, line_no, "record is not a JSON object");
    return record;
}

const nlohmann::json& require_field(const nlohmann::json& record, const char* key,
                                    const std::string& source, std::size_t line_no) {
    auto it = record.find(key);
    if (it == record.end()) {
        throw ParseError(source, line_no, std::string("missing field \"") + key + "\"");
    }
    return *it;
}

std::string require_string(const nlohmann::json& record, const char* key,
                           const std::string& source, std::size_t line_no) {
    const auto& value = require_field(record, key, source, line_no);
    if (!value.is_string()) {
        throw ParseError(source, line_no, std::string("field \"") + key + "\" must be a string");
    }
    return value.get<std::string>();
}

bool is_blank(const std::string& line) {
    return std::all_of(line.begin(), line.end(),
                       [](unsigned char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    return in;
}

}  // namespace

Tokens tokenize(std::string_view text) {
    Tokens tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = next_code_point(text, i);
        if (is_word_char(cp)) {
            append_utf8(current, to_lower(cp));
            continue;
        }
        if (is_apostrophe(cp) && !current.empty() && i < text.size()) {
            std::size_t peek = i;
            if (is_word_char(next_code_point(text, peek))) {
                current.push_back('\'');
                continue;
            }
        }
        if (!current.empty()) tokens.push_back(std::move(current));
        current.clear();
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

std::string join_tokens(std::span<const std::string> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

bool contains_phrase(std::span<const std::string> tokens, std::span<const std::string> phrase) {
    if (phrase.empty()) return false;
    return std::search(tokens.begin(), tokens.end(), phrase.begin(), phrase.end()) != tokens.end();
}

Tokens Transcript::tokens() const {
    Tokens out;
    out.reserve(token_count());
    for (const auto& s : sentences) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
    return out;
}

std::size_t Transcript::token_count() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.tokens.size();
    return n;
}

std::string_view to_string(TutorialKind kind) {
    switch (kind) {
        case TutorialKind::Using: return "using";
        case TutorialKind::HowTo: return "howto";
        case TutorialKind::None: return "none";
    }
    return "none";
}

Tokens Tutorial::all_tokens() const {
    Tokens out = title_tokens;
    out.insert(out.end(), body_tokens.begin(), body_tokens.end());
    return out;
}

TutorialPool::TutorialPool(std::vector<Tutorial> tutorials) : tutorials_(std::move(tutorials)) {
    std::size_t nones = 0;
    for (std::size_t i = 0; i < tutorials_.size(); ++i) {
        const auto& t = tutorials_[i];
        if (t.id.empty()) throw Error("tutorial with empty id");
        if (!index_.emplace(t.id, i).second) throw Error("duplicate tutorial id '" + t.id + "'");
        if (t.is_none()) {
            if (!t.body_tokens.empty()) throw Error("None tutorial '" + t.id + "' must have an empty body");
            none_index_ = i;
            ++nones;
        } else if (t.body_tokens.empty()) {
            throw Error("tutorial '" + t.id + "' has an empty body");
        }
    }
    if (nones > 1) throw Error("tutorial pool has more than one None entry");
    if (tutorials_.size() == nones) throw Error("tutorial pool has no candidate tutorials");
    if (nones == 0) {
        Tutorial none;
        none.id = std::string(kNoneTutorialId);
        none.kind = TutorialKind::None;
        none.title = "None";
        none.title_tokens = tokenize(none.title);
        if (!index_.emplace(none.id, tutorials_.size()).second) {
            throw Error("tutorial id '" + none.id + "' is reserved for the None entry");
        }
        none_index_ = tutorials_.size();
        tutorials_.push_back(std::move(none));
    }
}

TutorialRefs TutorialPool::candidates() const {
    TutorialRefs out;
    out.reserve(tutorials_.size());
    for (const auto& t : tutorials_) {
        if (!t.is_none()) out.push_back(&t);
    }
    return out;
}

const Tutorial* TutorialPool::find(std::string_view id) const {
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &tutorials_[it->second];
}

ToolOntology::ToolOntology(const std::vector<std::string>& phrases) {
    for (const auto& p : phrases) add(p);
}

bool ToolOntology::add(std::string_view phrase) {
    Tokens tokens = tokenize(phrase);
    if (tokens.empty()) throw Error("empty tool phrase '" + std::string(phrase) + "'");
    if (!keys_.insert(join_tokens(tokens)).second) return false;
    by_first_token_[tokens.front()].push_back(phrases_.size());
    phrases_.push_back(std::move(tokens));
    return true;
}

std::set<std::string> ToolOntology::match(std::span<const std::string> tokens) const {
    std::set<std::string> found;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        auto it = by_first_token_.find(tokens[i]);
        if (it == by_first_token_.end()) continue;
        for (std::size_t idx : it->second) {
            const auto& phrase = phrases_[idx];
            if (i + phrase.size() > tokens.size()) continue;
            if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
                found.insert(join_tokens(phrase));
            }
        }
    }
    return found;
}

std::set<std::string> match_tool_names(const Transcript& transcript, const ToolOntology& ontology) {
    return ontology.match(transcript.tokens());
}

std::vector<Transcript> parse_transcripts(std::istream& in, const std::string& source) {
    std::vector<Transcript> out;
    std::unordered_map<std::string, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        const auto record = parse_json_line(line, source, line_no);
        Transcript t;
        t.id = require_string(record, "id", source, line_no);
        if (t.id.empty()) throw ParseError(source, line_no, "empty transcript id");
        const auto& sentences = require_field(record, "sentences", source, line_no);
        if (!sentences.is_array()) throw ParseError(source, line_no, "\"sentences\" must be an array");
        for (const auto& s : sentences) {
            if (!s.is_string()) throw ParseError(source, line_no, "sentence must be a string");
            Sentence sentence;
            sentence.text = s.get<std::string>();
            sentence.tokens = tokenize(sentence.text);
            // Sentences with nothing to tokenize are dropped and indices stay contiguous.
            if (sentence.tokens.empty()) continue;
            sentence.index = t.sentences.size();
            t.sentences.push_back(std::move(sentence));
        }
        if (t.sentences.empty()) {
            throw ParseError(source, line_no, "transcript '" + t.id + "' has no non-empty sentence");
        }
        if (auto it = record.find("meta"); it != record.end()) t.source_meta = *it;
        if (!seen.emplace(t.id, line_no).second) {
            throw ParseError(source, line_no, "duplicate transcript id '" + t.id + "'");
        }
        out.push_back(std::move(t));
    }
    return out;
}

TutorialPool parse_tutorial_pool(std::istream& in, const std::string& source) {
    std::vector<Tutorial> tutorials;
    std::unordered_map<std::string, std::size_t> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        const auto record = parse_json_line(line, source, line_no);
        Tutorial t;
        t.id = require_string(record, "id", source, line_no);
        if (t.id.empty()) throw ParseError(source, line_no, "empty tutorial id");
        const auto kind = require_string(record, "kind", source, line_no);
        if (kind == "using") {
            t.kind = TutorialKind::Using;
        } else if (kind == "howto") {
            t.kind = TutorialKind::HowTo;
        } else if (kind == "none") {
            t.kind = TutorialKind::None;
        } else {
            throw ParseError(source, line_no, "unknown tutorial kind '" + kind + "'");
        }
        t.title = require_string(record, "title", source, line_no);
        t.body = t.is_none() && !record.contains("body") ? std::string()
                                                         : require_string(record, "body", source, line_no);
        t.title_tokens = tokenize(t.title);
        t.body_tokens = tokenize(t.body);
        if (t.is_none() && !t.body_tokens.empty()) {
            throw ParseError(source, line_no, "None tutorial must have an empty body");
        }
        if (!t.is_none() && t.body_tokens.empty()) {
            throw ParseError(source, line_no, "tutorial '" + t.id + "' has an empty body");
        }
        if (!seen.emplace(t.id, line_no).second) {
            throw ParseError(source, line_no, "duplicate tutorial id '" + t.id + "'");
        }
        tutorials.push_back(std::move(t));
    }
    try {
        return TutorialPool(std::move(tutorials));
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(source, line_no, e.what());
    }
}

ToolOntology parse_ontology(std::istream& in, const std::string& source) {
    ToolOntology ontology;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        if (tokenize(line).empty()) throw ParseError(source, line_no, "tool phrase has no tokens");
        ontology.add(line);
    }
    return ontology;
}

std::vector<AnnotationRecord> parse_annotations(std::istream& in, const std::string& source,
                                                std::span<const Transcript> transcripts,
                                                const TutorialPool& pool) {
    std::unordered_map<std::string, const Transcript*> by_id;
    for (const auto& t : transcripts) by_id.emplace(t.id, &t);

    std::vector<AnnotationRecord> out;
    std::set<std::pair<std::string, std::size_t>> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (is_blank(line)) continue;
        const auto record = parse_json_line(line, source, line_no);
        AnnotationRecord a;
        a.transcript_id = require_string(record, "transcript_id", source, line_no);
        auto transcript = by_id.find(a.transcript_id);
        if (transcript == by_id.end()) {
            throw ParseError(source, line_no, "unknown transcript id '" + a.transcript_id + "'");
        }
        const auto& index = require_field(record, "sentence_index", source, line_no);
        if (!index.is_number_integer() || index.get<long long>() < 0) {
            throw ParseError(source, line_no, "\"sentence_index\" must be a non-negative integer");
        }
        a.sentence_index = index.get<std::size_t>();
        if (a.sentence_index >= transcript->second->sentences.size()) {
            throw ParseError(source, line_no,
                             "sentence_index " + std::to_string(a.sentence_index) +
                                 " out of range for transcript '" + a.transcript_id + "'");
        }
        const auto& links = require_field(record, "tutorials", source, line_no);
        if (!links.is_array() || links.empty()) {
            throw ParseError(source, line_no, "\"tutorials\" must be a non-empty array");
        }
        bool has_none = false;
        for (const auto& link : links) {
            if (!link.is_string()) throw ParseError(source, line_no, "tutorial id must be a string");
            const auto id = link.get<std::string>();
            const Tutorial* t = pool.find(id);
            if (!t) throw ParseError(source, line_no, "unknown tutorial id '" + id + "'");
            has_none = has_none || t->is_none();
            if (std::find(a.linked_tutorial_ids.begin(), a.linked_tutorial_ids.end(), id) ==
                a.linked_tutorial_ids.end()) {
                a.linked_tutorial_ids.push_back(id);
            }
        }
        if (has_none && a.linked_tutorial_ids.size() > 1) {
            throw ParseError(source, line_no, "None cannot be combined with other tutorials");
        }
        if (!seen.emplace(a.transcript_id, a.sentence_index).second) {
            throw ParseError(source, line_no, "duplicate annotation for sentence " +
                                                  std::to_string(a.sentence_index) + " of '" +
                                                  a.transcript_id + "'");
        }
        out.push_back(std::move(a));
    }
    return out;
}

std::vector<Transcript> load_transcripts(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_transcripts(in, path.string());
}

TutorialPool load_tutorial_pool(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_tutorial_pool(in, path.string());
}

ToolOntology load_ontology(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_ontology(in, path.string());
}

std::vector<AnnotationRecord> load_annotations(const std::filesystem::path& path,
                                               std::span<const Transcript> transcripts,
                                               const TutorialPool& pool) {
    auto in = open_input(path);
    return parse_annotations(in, path.string(), transcripts, pool);
}

void write_transcripts(std::ostream& out, std::span<const Transcript> transcripts) {
    for (const auto& t : transcripts) {
        nlohmann::ordered_json record;
        record["id"] = t.id;
        auto& sentences = record["sentences"] = nlohmann::ordered_json::array();
        for (const auto& s : t.sentences) sentences.push_back(s.text);
        if (!t.source_meta.is_null()) record["meta"] = nlohmann::ordered_json::parse(t.source_meta.dump());
        out << record.dump() << '\n';
    }
}

void write_tutorial_pool(std::ostream& out, const TutorialPool& pool) {
    for (const auto& t : pool.tutorials()) {
        if (t.is_none()) continue;
        nlohmann::ordered_json record;
        record["id"] = t.id;
        record["kind"] = to_string(t.kind);
        record["title"] = t.title;
        record["body"] = t.body;
        out << record.dump() << '\n';
    }
}

void write_ontology(std::ostream& out, const ToolOntology& ontology) {
    for (const auto& p : ontology.phrases()) out << join_tokens(p) << '\n';
}

void write_annotations(std::ostream& out, std::span<const AnnotationRecord> annotations) {
    for (const auto& a : annotations) {
        nlohmann::ordered_json record;
        record["transcript_id"] = a.transcript_id;
        record["sentence_index"] = a.sentence_index;
        record["tutorials"] = a.linked_tutorial_ids;
        out << record.dump() << '\n';
    }
}

const Transcript* CorpusBundle::find_transcript(std::string_view id) const {
    for (const auto& t : transcripts) {
        if (t.id == id) return &t;
    }
    return nullptr;
}

CorpusBundle load_bundle(const CorpusPaths& paths) {
    CorpusBundle bundle;
    bundle.transcripts = load_transcripts(paths.transcripts);
    bundle.pool = load_tutorial_pool(paths.tutorials);
    bundle.ontology = load_ontology(paths.ontology);
    if (!paths.annotations.empty()) {
        bundle.annotations = load_annotations(paths.annotations, bundle.transcripts, bundle.pool);
    }
    return bundle;
}

}  // namespace streamlink
