#include "streamlink/stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include "streamlink/error.hpp"
#include "streamlink/log.hpp"

namespace streamlink {
namespace {

constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::string_view kStatsMagic = "streamlink-stats";
constexpr int kStatsVersion = 1;

std::uint64_t fnv_mix(std::uint64_t h, std::string_view bytes) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t hash_document(std::uint64_t h, std::span<const std::string> tokens) {
    for (const auto& t : tokens) {
        h = fnv_mix(h, t);
        h = fnv_mix(h, " ");
    }
    return fnv_mix(h, "\n");
}

// Occurrence counts of the tokens the stats know about; unknown tokens have PMI 0.
struct Bag {
    std::vector<std::pair<CooccurrenceStats::TokenId, double>> known;
};

Bag make_bag(const CooccurrenceStats& stats, std::span<const std::string> tokens) {
    std::map<CooccurrenceStats::TokenId, double> counts;
    for (const auto& t : tokens) {
        if (auto id = stats.id(t)) counts[*id] += 1.0;
    }
    return Bag{{counts.begin(), counts.end()}};
}

double pmi_ids(const CooccurrenceStats& stats, CooccurrenceStats::TokenId a,
               CooccurrenceStats::TokenId b) {
    const double joint = stats.pair_doc_count(a, b);
    if (joint == 0.0) return 0.0;
    const double ca = stats.doc_count(a);
    const double cb = stats.doc_count(b);
    return std::log(joint / (ca * cb));
}

}  // namespace

std::optional<CooccurrenceStats::TokenId> CooccurrenceStats::id(std::string_view token) const {
    auto it = ids_.find(std::string(token));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t CooccurrenceStats::doc_count(std::string_view token) const {
    auto i = id(token);
    return i ? doc_counts_[*i] : 0;
}

std::uint32_t CooccurrenceStats::pair_doc_count(std::string_view a, std::string_view b) const {
    auto ia = id(a);
    auto ib = id(b);
    if (!ia || !ib) return 0;
    return pair_doc_count(*ia, *ib);
}

std::uint32_t CooccurrenceStats::pair_doc_count(TokenId a, TokenId b) const {
    if (a == b) return doc_counts_[a];
    auto it = pairs_.find(pair_key(a, b));
    return it == pairs_.end() ? 0 : it->second;
}

std::uint64_t CooccurrenceStats::pair_key(TokenId a, TokenId b) {
    if (a > b) std::swap(a, b);
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

CooccurrenceStats::TokenId CooccurrenceStats::intern(const std::string& token) {
    auto [it, inserted] = ids_.emplace(token, static_cast<TokenId>(tokens_.size()));
    if (inserted) {
        tokens_.push_back(token);
        doc_counts_.push_back(0);
    }
    return it->second;
}

void CooccurrenceStats::add_document(std::span<const std::string> tokens) {
    std::vector<TokenId> unique;
    unique.reserve(tokens.size());
    for (const auto& t : tokens) unique.push_back(intern(t));
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    for (std::size_t i = 0; i < unique.size(); ++i) {
        ++doc_counts_[unique[i]];
        for (std::size_t j = i + 1; j < unique.size(); ++j) ++pairs_[pair_key(unique[i], unique[j])];
    }
    ++num_docs_;
    content_hash_ = hash_document(content_hash_, tokens);
}

std::vector<std::tuple<CooccurrenceStats::TokenId, CooccurrenceStats::TokenId, std::uint32_t>>
CooccurrenceStats::sorted_pairs() const {
    std::vector<std::tuple<TokenId, TokenId, std::uint32_t>> out;
    out.reserve(pairs_.size());
    for (const auto& [key, count] : pairs_) {
        out.emplace_back(static_cast<TokenId>(key >> 32), static_cast<TokenId>(key & 0xffffffffu), count);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void CooccurrenceStats::save(std::ostream& out) const {
    out << kStatsMagic << ' ' << kStatsVersion << '\n';
    out << "hash " << std::hex << std::setw(16) << std::setfill('0') << content_hash_ << std::dec
        << std::setfill(' ') << '\n';
    out << "docs " << num_docs_ << '\n';
    out << "vocab " << tokens_.size() << '\n';
    for (std::size_t i = 0; i < tokens_.size(); ++i) out << tokens_[i] << ' ' << doc_counts_[i] << '\n';
    const auto pairs = sorted_pairs();
    out << "pairs " << pairs.size() << '\n';
    for (const auto& [a, b, c] : pairs) out << a << ' ' << b << ' ' << c << '\n';
}

CooccurrenceStats CooccurrenceStats::load(std::istream& in, const std::string& source) {
    CooccurrenceStats stats;
    std::size_t line_no = 0;
    std::string line;
    auto next = [&]() -> std::istringstream {
        if (!std::getline(in, line)) throw ParseError(source, line_no + 1, "unexpected end of stats file");
        ++line_no;
        return std::istringstream(line);
    };
    auto expect_key = [&](std::istringstream& ls, std::string_view key) {
        std::string k;
        ls >> k;
        if (k != key) throw ParseError(source, line_no, "expected '" + std::string(key) + "'");
    };

    {
        auto ls = next();
        std::string magic;
        int version = 0;
        ls >> magic >> version;
        if (magic != kStatsMagic || version != kStatsVersion) {
            throw ParseError(source, line_no, "not a version " + std::to_string(kStatsVersion) + " stats file");
        }
    }
    {
        auto ls = next();
        expect_key(ls, "hash");
        ls >> std::hex >> stats.content_hash_;
    }
    {
        auto ls = next();
        expect_key(ls, "docs");
        ls >> stats.num_docs_;
    }
    std::size_t vocab = 0;
    {
        auto ls = next();
        expect_key(ls, "vocab");
        ls >> vocab;
    }
    for (std::size_t i = 0; i < vocab; ++i) {
        auto ls = next();
        std::string token;
        std::uint32_t count = 0;
        if (!(ls >> token >> count)) throw ParseError(source, line_no, "bad vocab line");
        if (stats.intern(token) != i) throw ParseError(source, line_no, "duplicate token '" + token + "'");
        stats.doc_counts_[i] = count;
    }
    std::size_t num_pairs = 0;
    {
        auto ls = next();
        expect_key(ls, "pairs");
        ls >> num_pairs;
    }
    for (std::size_t i = 0; i < num_pairs; ++i) {
        auto ls = next();
        TokenId a = 0, b = 0;
        std::uint32_t count = 0;
        if (!(ls >> a >> b >> count) || a >= vocab || b >= vocab || a == b) {
            throw ParseError(source, line_no, "bad pair line");
        }
        stats.pairs_[pair_key(a, b)] = count;
    }
    return stats;
}

CooccurrenceStats build_stats(std::span<const Transcript> transcripts) {
    if (transcripts.empty()) throw Error("cannot build co-occurrence stats from zero transcripts");
    CooccurrenceStats stats;
    for (const auto& t : transcripts) stats.add_document(t.tokens());
    return stats;
}

double pmi(const CooccurrenceStats& stats, std::string_view a, std::string_view b) {
    auto ia = stats.id(a);
    auto ib = stats.id(b);
    if (!ia || !ib) return 0.0;
    return pmi_ids(stats, *ia, *ib);
}

double pmi_similarity(const CooccurrenceStats& stats, std::span<const std::string> doc_tokens,
                      std::span<const std::string> tutorial_tokens) {
    if (doc_tokens.empty() || tutorial_tokens.empty()) return 0.0;
    // Equal to the double loop over occurrences: each (type, type) term is
    // weighted by how often the two types occur.
    const Bag doc = make_bag(stats, doc_tokens);
    const Bag tut = make_bag(stats, tutorial_tokens);
    double total = 0.0;
    for (const auto& [a, ca] : doc.known) {
        double row = 0.0;
        for (const auto& [b, cb] : tut.known) row += cb * pmi_ids(stats, a, b);
        total += ca * row;
    }
    return total / (static_cast<double>(doc_tokens.size()) * static_cast<double>(tutorial_tokens.size()));
}

double pmi_similarity(const CooccurrenceStats& stats, const Transcript& doc, const Tutorial& tutorial) {
    return pmi_similarity(stats, doc.tokens(), tutorial.body_tokens);
}

std::uint64_t corpus_hash(std::span<const Transcript> transcripts) {
    std::uint64_t h = kFnvOffset;
    for (const auto& t : transcripts) h = hash_document(h, t.tokens());
    return h;
}

CooccurrenceStats load_or_build_stats(const std::filesystem::path& path,
                                      std::span<const Transcript> transcripts) {
    const std::uint64_t want = corpus_hash(transcripts);
    if (std::ifstream in(path); in) {
        try {
            auto cached = CooccurrenceStats::load(in, path.string());
            if (cached.content_hash() == want) return cached;
        } catch (const Error& e) {
            warn(std::string("ignoring unreadable stats cache: ") + e.what());
        }
    }
    auto stats = build_stats(transcripts);
    std::ofstream out(path);
    if (!out) throw Error("cannot write stats cache " + path.string());
    stats.save(out);
    return stats;
}

}  // namespace streamlink
