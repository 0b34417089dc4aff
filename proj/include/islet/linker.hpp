// Cross-file linking: index definitions from many extraction results,
// qualify callees against that index, expand a rooted call tree with
// recursion marking, and reduce trees to comparable metrics.

#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "islet/extractor.hpp"

namespace islet {

struct QualifiedName {
    enum class Kind { MemberDefined, MemberLibrary, FreeDefined, FreeLibrary };
    std::string display;
    Kind kind = Kind::FreeLibrary;

    bool operator==(const QualifiedName&) const = default;
};

inline std::string_view qualified_kind_name(QualifiedName::Kind kind) {
    switch (kind) {
        case QualifiedName::Kind::MemberDefined: return "member_defined";
        case QualifiedName::Kind::MemberLibrary: return "member_library";
        case QualifiedName::Kind::FreeDefined: return "free_defined";
        case QualifiedName::Kind::FreeLibrary: return "free_library";
    }
    return "free_library";
}

inline bool is_library_kind(QualifiedName::Kind kind) {
    return kind == QualifiedName::Kind::MemberLibrary ||
           kind == QualifiedName::Kind::FreeLibrary;
}

// Keys are (class_name, function_name); free functions use an empty
// class. Facts whose caller is file scope live under the "<toplevel>"
// bucket key.
using DefKey = std::pair<std::string, std::string>;

inline DefKey def_key(const FunctionDef& def) {
    return {def.class_name, def.name};
}

inline DefKey toplevel_key() { return {"", "<toplevel>"}; }

inline std::string def_display(const FunctionDef& def) {
    if (def.kind == FunctionDef::Kind::Member)
        return def.class_name + "::" + def.name;
    return def.name;
}

struct FactIndex {
    std::map<DefKey, FunctionDef> defs_by_name;
    std::map<DefKey, std::vector<CallFact>> facts_by_def;
    std::set<std::string> known_classes;
    std::vector<std::string> warnings;
};

/// Folds extraction results into one index. Duplicate (class, name)
/// definitions keep the one from the lexicographically first file and
/// record a warning; call facts attach to the surviving definition's
/// file so each definition expands from a single translation unit.
inline FactIndex merge(const std::vector<ExtractionResult>& results) {
    FactIndex index;

    std::vector<FunctionDef> defs;
    for (const ExtractionResult& r : results)
        defs.insert(defs.end(), r.defs.begin(), r.defs.end());
    std::stable_sort(defs.begin(), defs.end(),
                     [](const FunctionDef& a, const FunctionDef& b) {
                         return a.file < b.file;
                     });
    for (FunctionDef& d : defs) {
        DefKey key = def_key(d);
        auto [it, inserted] = index.defs_by_name.emplace(key, d);
        if (!inserted && it->second.file != d.file) {
            index.warnings.push_back("duplicate definition of " +
                                     def_display(d) + ": keeping " +
                                     it->second.file + ", ignoring " + d.file);
        }
    }

    for (const auto& [key, def] : index.defs_by_name)
        if (def.kind == FunctionDef::Kind::Member)
            index.known_classes.insert(def.class_name);
    for (const ExtractionResult& r : results)
        for (const CallFact& f : r.facts)
            if (!f.caller_class.empty())
                index.known_classes.insert(f.caller_class);

    for (const ExtractionResult& r : results) {
        for (const CallFact& f : r.facts) {
            if (f.caller_scope == "<toplevel>") {
                index.facts_by_def[toplevel_key()].push_back(f);
                continue;
            }
            DefKey key{f.caller_class, f.caller_scope};
            auto it = index.defs_by_name.find(key);
            if (it == index.defs_by_name.end() || it->second.file != f.file)
                continue; // caller's definition lost the duplicate tie-break
            index.facts_by_def[key].push_back(f);
        }
    }
    for (auto& [key, facts] : index.facts_by_def) {
        std::stable_sort(facts.begin(), facts.end(),
                         [](const CallFact& a, const CallFact& b) {
                             return std::tie(a.file, a.seq) <
                                    std::tie(b.file, b.seq);
                         });
    }
    return index;
}

/// Maps a call fact to its displayed name and one of four kinds:
/// member calls split on whether the receiver's class is defined in
/// the corpus, free calls on whether the callee is.
inline QualifiedName qualify_callee(const CallFact& fact,
                                    const FactIndex& index) {
    QualifiedName q;
    if (!fact.receiver_class.empty()) {
        if (index.known_classes.count(fact.receiver_class)) {
            q.kind = QualifiedName::Kind::MemberDefined;
            q.display = fact.receiver_class + "::" + fact.callee;
        } else {
            q.kind = QualifiedName::Kind::MemberLibrary;
            q.display = "OBJ." + fact.callee;
        }
        return q;
    }
    if (index.defs_by_name.count(DefKey{"", fact.callee})) {
        q.kind = QualifiedName::Kind::FreeDefined;
        q.display = fact.callee;
    } else {
        q.kind = QualifiedName::Kind::FreeLibrary;
        q.display = fact.callee;
    }
    return q;
}

struct CallTreeNode {
    int id = 0;
    QualifiedName qualified;
    std::vector<std::string> args; // argument displays, in call order
    std::vector<CallTreeNode> children;
    bool recursive = false;
    bool truncated = false;
};

class UnknownRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::optional<DefKey> def_key_for(const QualifiedName& q) {
    switch (q.kind) {
        case QualifiedName::Kind::MemberDefined: {
            auto sep = q.display.rfind("::");
            if (sep == std::string::npos) return std::nullopt;
            return DefKey{q.display.substr(0, sep), q.display.substr(sep + 2)};
        }
        case QualifiedName::Kind::FreeDefined:
            return DefKey{"", q.display};
        default:
            return std::nullopt;
    }
}

inline std::vector<std::string> root_candidates(const FactIndex& index) {
    std::set<std::string> called;
    for (const auto& [key, facts] : index.facts_by_def)
        for (const CallFact& f : facts)
            called.insert(qualify_callee(f, index).display);
    std::set<std::string> candidates;
    for (const auto& [key, def] : index.defs_by_name) {
        std::string display = def_display(def);
        if (!called.count(display)) candidates.insert(display);
    }
    if (index.defs_by_name.count(DefKey{"", "main"})) candidates.insert("main");
    return {candidates.begin(), candidates.end()};
}

} // namespace detail

/// Picks the default tree root: main when defined, otherwise the
/// lexicographically first function nothing in the corpus calls.
inline QualifiedName default_root(const FactIndex& index) {
    if (index.defs_by_name.empty())
        throw UnknownRootError("corpus defines no functions");
    auto make = [&](const FunctionDef& def) {
        QualifiedName q;
        q.display = def_display(def);
        q.kind = def.kind == FunctionDef::Kind::Member
                     ? QualifiedName::Kind::MemberDefined
                     : QualifiedName::Kind::FreeDefined;
        return q;
    };
    auto main_it = index.defs_by_name.find(DefKey{"", "main"});
    if (main_it != index.defs_by_name.end()) return make(main_it->second);

    std::vector<std::string> candidates = detail::root_candidates(index);
    std::string pick = candidates.empty() ? std::string() : candidates.front();
    for (const auto& [key, def] : index.defs_by_name) {
        std::string display = def_display(def);
        if (pick.empty() || display == pick) return make(def);
    }
    // candidates came from defs_by_name, so one of them matched above
    throw UnknownRootError("corpus defines no functions");
}

/// Resolves a user-supplied root name ("main", "Contact::display", or a
/// bare method name unique in the corpus). Throws UnknownRootError whose
/// message lists candidate roots.
inline QualifiedName resolve_root(const FactIndex& index,
                                  const std::string& name) {
    if (name.empty()) return default_root(index);
    auto found = [&](const FunctionDef& def) {
        QualifiedName q;
        q.display = def_display(def);
        q.kind = def.kind == FunctionDef::Kind::Member
                     ? QualifiedName::Kind::MemberDefined
                     : QualifiedName::Kind::FreeDefined;
        return q;
    };

    auto sep = name.rfind("::");
    if (sep != std::string::npos) {
        DefKey key{name.substr(0, sep), name.substr(sep + 2)};
        auto it = index.defs_by_name.find(key);
        if (it != index.defs_by_name.end()) return found(it->second);
    } else {
        auto it = index.defs_by_name.find(DefKey{"", name});
        if (it != index.defs_by_name.end()) return found(it->second);
        // accept a method name when exactly one class defines it
        std::vector<const FunctionDef*> matches;
        for (const auto& [key, def] : index.defs_by_name)
            if (def.name == name) matches.push_back(&def);
        if (matches.size() == 1) return found(*matches.front());
    }

    std::string msg = "unknown root '" + name + "'; candidates:";
    for (const std::string& c : detail::root_candidates(index))
        msg += " " + c;
    throw UnknownRootError(msg);
}

namespace detail {

struct TreeBuilder {
    const FactIndex& index;
    int max_depth;
    std::vector<std::string>* warnings;
    int next_id = 0;
    std::vector<std::string> path; // qualified displays, root downward

    CallTreeNode build(const QualifiedName& root) {
        CallTreeNode node;
        node.id = next_id++;
        node.qualified = root;
        path.push_back(root.display);
        expand(node, 0);
        path.pop_back();
        return node;
    }

    void expand(CallTreeNode& node, int depth) {
        auto key = def_key_for(node.qualified);
        if (!key) return; // library callee: leaf
        auto it = index.facts_by_def.find(*key);
        if (it == index.facts_by_def.end()) return;
        for (const CallFact& fact : it->second) {
            CallTreeNode child;
            child.id = next_id++;
            child.qualified = qualify_callee(fact, index);
            for (const ArgValue& a : fact.args) child.args.push_back(a.display);
            bool on_path = std::find(path.begin(), path.end(),
                                     child.qualified.display) != path.end();
            if (on_path) {
                child.recursive = true;
            } else if (depth + 1 > max_depth) {
                child.truncated = true;
                if (warnings)
                    warnings->push_back("call tree truncated below '" +
                                        node.qualified.display +
                                        "' at depth " +
                                        std::to_string(depth + 1));
            } else {
                path.push_back(child.qualified.display);
                expand(child, depth + 1);
                path.pop_back();
            }
            node.children.push_back(std::move(child));
        }
    }
};

} // namespace detail

/// Depth-first expansion from root. Children follow their definition's
/// facts in sequence order; a child whose qualified display already
/// appears on its root path becomes a recursive leaf; expansion past
/// max_depth yields truncated marker nodes (and a warning when a sink
/// is provided).
inline CallTreeNode build_tree(const FactIndex& index,
                               const QualifiedName& root, int max_depth = 100,
                               std::vector<std::string>* warnings = nullptr) {
    detail::TreeBuilder builder{index, max_depth, warnings, 0, {}};
    return builder.build(root);
}

struct GraphMetrics {
    int total_calls = 0;
    int member_calls = 0;
    int free_calls = 0;
    int library_calls = 0;
    int argument_count = 0;
    bool recursion_correct = true;

    bool operator==(const GraphMetrics&) const = default;
};

struct MetricsDelta {
    int total_calls = 0;
    int member_calls = 0;
    int free_calls = 0;
    int library_calls = 0;
    int argument_count = 0;
    int recursion_correct = 0;

    bool operator==(const MetricsDelta&) const = default;
};

/// Counts one node per unique callee (the root does not count as a
/// callee); argument_count sums each unique callee's first-seen argument
/// list. recursion_correct compares the recursive-marked name set to
/// expected_recursion.
inline GraphMetrics graph_metrics(const CallTreeNode& tree,
                                  const std::set<std::string>&
                                      expected_recursion = {}) {
    GraphMetrics m;
    std::set<std::string> seen;
    std::set<std::string> recursive_names;

    auto walk = [&](auto&& self, const CallTreeNode& node,
                    bool is_root) -> void {
        if (!is_root) {
            if (node.recursive) recursive_names.insert(node.qualified.display);
            if (seen.insert(node.qualified.display).second) {
                switch (node.qualified.kind) {
                    case QualifiedName::Kind::MemberDefined:
                        ++m.member_calls;
                        break;
                    case QualifiedName::Kind::FreeDefined:
                        ++m.free_calls;
                        break;
                    case QualifiedName::Kind::MemberLibrary:
                    case QualifiedName::Kind::FreeLibrary:
                        ++m.library_calls;
                        break;
                }
                m.argument_count += static_cast<int>(node.args.size());
            }
        }
        for (const CallTreeNode& child : node.children)
            self(self, child, false);
    };
    walk(walk, tree, true);

    m.total_calls = m.member_calls + m.free_calls + m.library_calls;
    m.recursion_correct = recursive_names == expected_recursion;
    return m;
}

/// Names of nodes marked recursive anywhere in the tree.
inline std::set<std::string> recursive_names(const CallTreeNode& tree) {
    std::set<std::string> names;
    auto walk = [&](auto&& self, const CallTreeNode& node) -> void {
        if (node.recursive) names.insert(node.qualified.display);
        for (const CallTreeNode& child : node.children) self(self, child);
    };
    walk(walk, tree);
    return names;
}

inline MetricsDelta compare_metrics(const GraphMetrics& a,
                                    const GraphMetrics& b) {
    MetricsDelta d;
    d.total_calls = a.total_calls - b.total_calls;
    d.member_calls = a.member_calls - b.member_calls;
    d.free_calls = a.free_calls - b.free_calls;
    d.library_calls = a.library_calls - b.library_calls;
    d.argument_count = a.argument_count - b.argument_count;
    d.recursion_correct =
        static_cast<int>(a.recursion_correct) - static_cast<int>(b.recursion_correct);
    return d;
}

/// Rebuilds the index keeping only what a this-blind, library-blind
/// tool would see: drops implied-this member calls and calls whose
/// qualification is a library kind. Definitions are untouched.
inline FactIndex baseline_filter(const FactIndex& index) {
    FactIndex out;
    out.defs_by_name = index.defs_by_name;
    out.known_classes = index.known_classes;
    out.warnings = index.warnings;
    for (const auto& [key, facts] : index.facts_by_def) {
        std::vector<CallFact> kept;
        for (const CallFact& f : facts) {
            if (f.receiver_kind == ReceiverKind::ThisImplied) continue;
            if (is_library_kind(qualify_callee(f, index).kind)) continue;
            kept.push_back(f);
        }
        if (!kept.empty()) out.facts_by_def[key] = std::move(kept);
    }
    return out;
}

/// One CSV row per tree edge:
/// parent_id,child_id,parent_name,child_name,edge_kind,args
/// where edge_kind is defined|library|recursive|truncated and args joins
/// the child's argument displays with '|'.
inline std::string emit_edges_csv(const CallTreeNode& tree) {
    std::string out = "parent_id,child_id,parent_name,child_name,edge_kind,args\n";
    auto quote = [](const std::string& field) {
        if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
        std::string q = "\"";
        for (char c : field) {
            if (c == '"') q += "\"\"";
            else q += c;
        }
        q += '"';
        return q;
    };
    auto walk = [&](auto&& self, const CallTreeNode& node) -> void {
        for (const CallTreeNode& child : node.children) {
            std::string kind = "defined";
            if (child.recursive) kind = "recursive";
            else if (child.truncated) kind = "truncated";
            else if (is_library_kind(child.qualified.kind)) kind = "library";
            std::string args;
            for (std::size_t i = 0; i < child.args.size(); ++i) {
                if (i) args += '|';
                args += child.args[i];
            }
            out += std::to_string(node.id);
            out += ',';
            out += std::to_string(child.id);
            out += ',';
            out += quote(node.qualified.display);
            out += ',';
            out += quote(child.qualified.display);
            out += ',';
            out += kind;
            out += ',';
            out += quote(args);
            out += '\n';
            self(self, child);
        }
    };
    walk(walk, tree);
    return out;
}

} // namespace islet
