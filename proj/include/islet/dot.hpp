// DOT rendering of call trees: one node per tree node, dotted border
// for recursive leaves, octagon for depth-truncated branches.

#pragma once

#include <string>

#include "islet/linker.hpp"

namespace islet {

struct DotDocument {
    std::string text;

    bool operator==(const DotDocument&) const = default;
};

namespace detail {

inline std::string dot_escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out;
}

} // namespace detail

/// "name" when the call has no arguments, else "name(a1, a2, ...)".
inline std::string node_label(const CallTreeNode& node) {
    std::string label = node.qualified.display;
    if (!node.args.empty()) {
        label += '(';
        for (std::size_t i = 0; i < node.args.size(); ++i) {
            if (i) label += ", ";
            label += node.args[i];
        }
        label += ')';
    }
    if (node.truncated) label += "…";
    return label;
}

/// Deterministic DOT text: node statements in preorder, then the edges
/// in the same order. Recursive nodes get style=dotted, truncated nodes
/// shape=octagon.
inline DotDocument emit_dot(const CallTreeNode& tree) {
    std::string nodes;
    std::string edges;
    auto walk = [&](auto&& self, const CallTreeNode& node) -> void {
        nodes += "  n" + std::to_string(node.id) + " [label=\"" +
                 detail::dot_escape(node_label(node)) + "\"";
        if (node.recursive) nodes += ", style=dotted";
        if (node.truncated) nodes += ", shape=octagon";
        nodes += "];\n";
        for (const CallTreeNode& child : node.children) {
            edges += "  n" + std::to_string(node.id) + " -> n" +
                     std::to_string(child.id) + ";\n";
            self(self, child);
        }
    };
    walk(walk, tree);
    return DotDocument{"digraph {\n" + nodes + edges + "}\n"};
}

} // namespace islet
