#pragma once

#include <cstddef>
#include <limits>

#include "streamlink/corpus.hpp"
#include "streamlink/stats.hpp"

namespace streamlink {

struct FilterConfig {
    /// Similarity threshold; a tutorial passes when Sim > delta. PMI as
    /// computed here is never positive, so the default disables the test.
    double delta = -std::numeric_limits<double>::infinity();
    /// Minimum number of candidates handed to ranking.
    std::size_t fallback_min_keep = 3;
};

/// Tutorials whose title or body mentions a tool name found in the
/// transcript. If the transcript mentions no tool name, every candidate passes.
TutorialRefs filter_dk(const Transcript& doc, const TutorialPool& pool, const ToolOntology& ontology);

/// Tutorials with pmi_similarity(doc, tutorial) > delta.
TutorialRefs filter_sim(const Transcript& doc, const TutorialPool& pool, const CooccurrenceStats& stats,
                        double delta);

/// Intersection of filter_dk and filter_sim, in pool order. When fewer than
/// fallback_min_keep survive, the highest-Sim rejected tutorials are added
/// (ties by id) until that many are kept or the pool runs out. Never returns
/// the None tutorial.
TutorialRefs filter_pool(const Transcript& doc, const TutorialPool& pool, const ToolOntology& ontology,
                         const CooccurrenceStats& stats, const FilterConfig& config);

}  // namespace streamlink
