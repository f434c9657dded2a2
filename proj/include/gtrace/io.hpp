#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "gtrace/graph.hpp"
#include "gtrace/noise.hpp"

namespace gtrace {

// Edge-list text format: first line "n <count>", then one "u v" per line,
// 0-indexed with u < v.
inline void write_edge_list(std::ostream& os, const LabeledGraph& g) {
    os << "n " << g.vertex_count() << "\n";
    for (int u = 0; u < g.vertex_count(); ++u)
        for (int v = u + 1; v < g.vertex_count(); ++v)
            if (g.has_edge(u, v)) os << u << " " << v << "\n";
}

inline LabeledGraph read_edge_list(std::istream& is) {
    std::string tag;
    int n;
    if (!(is >> tag >> n) || tag != "n")
        throw std::runtime_error("edge list: expected header 'n <count>'");
    LabeledGraph g(n);
    int u, v;
    while (is >> u >> v) {
        if (u >= v) throw std::runtime_error("edge list: expected u < v");
        g.set_edge(u, v);
    }
    return g;
}

// Trace batch: concatenated edge-list blocks, each preceded by "trace <i>".
inline void write_trace_batch(std::ostream& os, const std::vector<Trace>& traces) {
    for (std::size_t i = 0; i < traces.size(); ++i) {
        os << "trace " << i << "\n";
        write_edge_list(os, traces[i].observed());
    }
}

// Provenance sidecar: "trace <i>" then one "fresh original" line per vertex.
// Kept separate so reconstruction runs can execute with provenance withheld.
inline void write_provenance_sidecar(std::ostream& os, const std::vector<Trace>& traces) {
    for (std::size_t i = 0; i < traces.size(); ++i) {
        os << "trace " << i << "\n";
        const auto& prov = traces[i].provenance();
        for (std::size_t v = 0; v < prov.size(); ++v) os << v << " " << prov[v] << "\n";
    }
}

// Reads a batch; traces come back with provenance withheld.
inline std::vector<Trace> read_trace_batch(std::istream& is) {
    std::vector<Trace> out;
    std::string line;
    std::string block;
    auto flush = [&]() {
        if (block.empty()) return;
        std::istringstream bs(block);
        out.push_back(Trace::without_provenance(read_edge_list(bs)));
        block.clear();
    };
    while (std::getline(is, line)) {
        if (line.rfind("trace ", 0) == 0) {
            flush();
        } else if (!line.empty()) {
            block += line;
            block += "\n";
        }
    }
    flush();
    return out;
}

// Attaches provenance from a sidecar stream to a batch read previously.
inline void attach_provenance(std::istream& is, std::vector<Trace>& traces) {
    std::string line;
    int current = -1;
    std::vector<std::vector<int>> prov(traces.size());
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        if (line.rfind("trace ", 0) == 0) {
            ls >> tag >> current;
            if (current < 0 || current >= static_cast<int>(traces.size()))
                throw std::runtime_error("provenance sidecar: trace index out of range");
            prov[current].assign(traces[current].observed().vertex_count(), -1);
        } else {
            int fresh, orig;
            if (!(ls >> fresh >> orig) || current < 0)
                throw std::runtime_error("provenance sidecar: malformed line");
            prov[current].at(fresh) = orig;
        }
    }
    for (std::size_t i = 0; i < traces.size(); ++i) {
        if (prov[i].empty() && traces[i].observed().vertex_count() > 0)
            throw std::runtime_error("provenance sidecar: missing trace block");
        traces[i] = Trace(traces[i].observed(), prov[i]);
    }
}

}  // namespace gtrace
