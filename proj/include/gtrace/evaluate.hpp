#pragma once

#include <span>
#include <vector>

#include "gtrace/isomorphism.hpp"
#include "gtrace/reconstruct.hpp"

namespace gtrace {

// Oracle-side evaluation of a reconstruction run. Uses provenance, so it must
// stay out of the reconstruction path itself.
struct EvalResult {
    bool exact = false;
    bool classes_pure = false;   // no class mixes two ground-truth vertices
    bool classes_complete = false;  // class count == n
};

inline EvalResult evaluate_reconstruction(const EndToEndResult& run, const LabeledGraph& truth) {
    EvalResult out;
    const int n = truth.vertex_count();
    const auto& labels = run.labels;
    if (labels.class_of.size() != run.traces.size()) return out;

    out.classes_complete = run.report.class_count == n;

    std::vector<int> class_truth(run.report.class_count, -1);
    bool pure = true;
    for (std::size_t i = 0; i < run.traces.size(); ++i) {
        const auto& prov = run.traces[i].provenance();
        for (std::size_t v = 0; v < prov.size(); ++v) {
            const int c = labels.class_of[i][v];
            if (class_truth[c] == -1) class_truth[c] = prov[v];
            else if (class_truth[c] != prov[v]) pure = false;
        }
    }
    out.classes_pure = pure;

    if (pure && out.classes_complete) {
        // distinct ground-truth ids per class iff no two classes share one
        std::vector<char> seen(n, 0);
        bool distinct = true;
        for (int c = 0; c < n; ++c) {
            if (class_truth[c] < 0 || seen[class_truth[c]]) { distinct = false; break; }
            seen[class_truth[c]] = 1;
        }
        if (distinct) {
            bool equal = true;
            for (int a = 0; a < n && equal; ++a)
                for (int b = a + 1; b < n && equal; ++b)
                    if (run.report.reconstructed.has_edge(a, b) !=
                        truth.has_edge(class_truth[a], class_truth[b]))
                        equal = false;
            out.exact = equal;
            return out;
        }
    }
    // fallback for runs whose class labeling is unusable: exact isomorphism on
    // small instances only
    if (run.report.class_count == n && n <= 12) {
        try {
            out.exact = small_graph_isomorphic(run.report.reconstructed, truth);
        } catch (const std::length_error&) {
            out.exact = false;
        }
    }
    return out;
}

}  // namespace gtrace
