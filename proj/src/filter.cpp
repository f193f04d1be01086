#include "streamlink/filter.hpp"

#include <algorithm>
#include <unordered_set>

namespace streamlink {

TutorialRefs filter_dk(const Transcript& doc, const TutorialPool& pool, const ToolOntology& ontology) {
    const auto names = match_tool_names(doc, ontology);
    TutorialRefs kept = pool.candidates();
    if (names.empty()) return kept;

    std::vector<Tokens> phrases;
    phrases.reserve(names.size());
    for (const auto& n : names) phrases.push_back(tokenize(n));

    std::erase_if(kept, [&](const Tutorial* t) {
        return std::none_of(phrases.begin(), phrases.end(), [&](const Tokens& p) {
            return contains_phrase(t->title_tokens, p) || contains_phrase(t->body_tokens, p);
        });
    });
    return kept;
}

TutorialRefs filter_sim(const Transcript& doc, const TutorialPool& pool, const CooccurrenceStats& stats,
                        double delta) {
    const Tokens doc_tokens = doc.tokens();
    TutorialRefs kept;
    for (const Tutorial* t : pool.candidates()) {
        if (pmi_similarity(stats, doc_tokens, t->body_tokens) > delta) kept.push_back(t);
    }
    return kept;
}

TutorialRefs filter_pool(const Transcript& doc, const TutorialPool& pool, const ToolOntology& ontology,
                         const CooccurrenceStats& stats, const FilterConfig& config) {
    const Tokens doc_tokens = doc.tokens();
    const TutorialRefs by_dk = filter_dk(doc, pool, ontology);
    const std::unordered_set<const Tutorial*> dk_set(by_dk.begin(), by_dk.end());

    struct Scored {
        const Tutorial* tutorial;
        double sim;
    };
    std::vector<Scored> rejected;
    TutorialRefs kept;
    for (const Tutorial* t : pool.candidates()) {
        const double sim = pmi_similarity(stats, doc_tokens, t->body_tokens);
        if (dk_set.contains(t) && sim > config.delta) {
            kept.push_back(t);
        } else {
            rejected.push_back({t, sim});
        }
    }
    if (kept.size() >= config.fallback_min_keep) return kept;

    std::sort(rejected.begin(), rejected.end(), [](const Scored& a, const Scored& b) {
        if (a.sim != b.sim) return a.sim > b.sim;
        return a.tutorial->id < b.tutorial->id;
    });
    for (const auto& r : rejected) {
        if (kept.size() >= config.fallback_min_keep) break;
        kept.push_back(r.tutorial);
    }
    return kept;
}

}  // namespace streamlink
