// Acceptance gate: ten end-to-end checks over the shipped fixtures and
// generated inputs, one PASS/FAIL line each. Exits nonzero when any
// check fails. Tolerances and time bounds are written into the checks.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "islet/dot.hpp"
#include "islet/driver.hpp"

#include "support/dump_builder.hpp"
#include "support/generators.hpp"
#include "support/paths.hpp"
#include "support/tree_oracle.hpp"

using namespace islet;
namespace fs = std::filesystem;

namespace {

class Criterion {
public:
    void require(bool cond, const std::string& what) {
        if (cond) return;
        ok_ = false;
        if (!detail_.empty()) detail_ += "; ";
        detail_ += what;
    }
    void note(const std::string& text) {
        if (!detail_.empty()) detail_ += "; ";
        detail_ += text;
    }
    bool ok() const { return ok_; }
    const std::string& detail() const { return detail_; }

private:
    bool ok_ = true;
    std::string detail_;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
}

std::string fmt_seconds(double s) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3fs", s);
    return buf;
}

std::vector<fs::path> corpus_files() {
    std::vector<fs::path> files;
    for (const auto& entry :
         fs::directory_iterator(islet::test::fixture_dir() / "corpus"))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

std::vector<ExtractionResult> extract_corpus() {
    Lexicon lex{cpp_lexicon()};
    std::vector<ExtractionResult> results;
    for (const fs::path& path : corpus_files())
        results.push_back(canonical(extract_facts(
            islet::test::read_file(path), detail::dump_label(path), lex)));
    return results;
}

double median_extract_seconds(const std::string& text, const Lexicon& lex,
                              int runs = 5) {
    std::vector<double> times;
    for (int i = 0; i < runs; ++i) {
        auto start = std::chrono::steady_clock::now();
        extract_facts(text, "bench", lex);
        times.push_back(seconds_since(start));
    }
    std::sort(times.begin(), times.end());
    return times[times.size() / 2];
}

// ---- criterion bodies ----

void member_pointer_resolution(Criterion& c) {
    auto start = std::chrono::steady_clock::now();
    Lexicon lex{cpp_lexicon()};
    ExtractionResult r = extract_facts(
        islet::test::read_fixture("member_pointer_call.ast"), "member_pointer_call", lex);
    double elapsed = seconds_since(start);

    c.require(r.facts.size() == 1,
              "expected exactly 1 fact, got " + std::to_string(r.facts.size()));
    if (r.facts.size() == 1) {
        const CallFact& f = r.facts[0];
        c.require(f.callee == "drawCircle", "callee " + f.callee);
        c.require(f.receiver_class == "DrawingAPI",
                  "receiver class " + f.receiver_class);
        c.require(f.receiver_kind == ReceiverKind::MemberVariable,
                  "receiver kind " +
                      std::string(receiver_kind_name(f.receiver_kind)));
        c.require(f.caller_class == "CircleShape",
                  "enclosing class " + f.caller_class);
    }
    c.require(elapsed < 1.0, "took " + fmt_seconds(elapsed));
}

void chain_link(Criterion& c) {
    auto start = std::chrono::steady_clock::now();
    auto dir = islet::test::scratch_dir("accept_chain");
    RunConfig extract;
    extract.command = Command::Extract;
    for (const char* name :
         {"corpus/main.cpp.ast", "corpus/AddressBook.cpp.ast",
          "corpus/Contact.cpp.ast"})
        extract.inputs.push_back((islet::test::fixture_dir() / name).string());
    extract.out_dir = dir;
    std::ostringstream out, err;
    c.require(run(extract, out, err) == kExitOk, "extract failed");

    RunConfig link;
    link.command = Command::Link;
    link.root = "main";
    link.inputs = {dir.string()};
    link.dot_path = dir / "graph.dot";
    link.edges_path = dir / "edges.csv";
    c.require(run(link, out, err) == kExitOk, "link failed");
    double elapsed = seconds_since(start);

    std::string dot = islet::test::read_file(dir / "graph.dot");
    for (const char* label :
         {"[label=\"main\"]", "[label=\"AddressBook::display_book\"]",
          "[label=\"Contact::display\"]",
          "[label=\"Contact::match(Lname, Fname)\"]"})
        c.require(dot.find(label) != std::string::npos,
                  std::string("missing node ") + label);

    // the four labels must sit on one root-down path, not just anywhere
    FactIndex index = merge(detail::read_fact_sets({dir.string()}));
    CallTreeNode tree = build_tree(index, resolve_root(index, "main"));
    const CallTreeNode* book = nullptr;
    for (const CallTreeNode& child : tree.children)
        if (child.qualified.display == "AddressBook::display_book") book = &child;
    c.require(book != nullptr, "main does not call AddressBook::display_book");
    const CallTreeNode* display = nullptr;
    if (book)
        for (const CallTreeNode& child : book->children)
            if (child.qualified.display == "Contact::display") display = &child;
    c.require(display != nullptr,
              "display_book does not call Contact::display");
    const CallTreeNode* match = nullptr;
    if (display)
        for (const CallTreeNode& child : display->children)
            if (child.qualified.display == "Contact::match") match = &child;
    c.require(match != nullptr, "Contact::display does not call Contact::match");
    if (match)
        c.require(match->args == std::vector<std::string>{"Lname", "Fname"},
                  "match arguments are not (Lname, Fname)");
    c.require(elapsed < 1.0, "took " + fmt_seconds(elapsed));
}

void argument_kinds(Criterion& c) {
    Lexicon lex{cpp_lexicon()};
    ExtractionResult r = extract_facts(
        islet::test::read_fixture("corpus/ArgZoo.cpp.ast"), "ArgZoo.cpp", lex);
    struct Expect {
        const char* callee;
        ArgValue::Kind kind;
        const char* display;
    };
    const Expect table[] = {
        {"take_var", ArgValue::Kind::Variable, "count"},
        {"take_str", ArgValue::Kind::StringLit, "\"hi\""},
        {"take_num", ArgValue::Kind::NumberLit, "42"},
        {"take_sub", ArgValue::Kind::Subscript, "vector[0]"},
        {"take_mem", ArgValue::Kind::MemberVar, "obj.field"},
        {"take_nested", ArgValue::Kind::NestedCall, "helper(...)"},
        {"take_bin", ArgValue::Kind::BinaryOp, "2+2"},
        {"take_un", ArgValue::Kind::UnaryOp, "k++"},
    };
    for (const Expect& e : table) {
        const CallFact* found = nullptr;
        for (const CallFact& f : r.facts)
            if (f.callee == e.callee) found = &f;
        if (!found || found->args.size() != 1) {
            c.require(false, std::string(e.callee) + " lacks its argument");
            continue;
        }
        c.require(found->args[0].kind == e.kind,
                  std::string(e.callee) + " kind " +
                      std::string(arg_kind_name(found->args[0].kind)));
        c.require(found->args[0].display == e.display,
                  std::string(e.callee) + " display '" +
                      found->args[0].display + "'");
    }
}

void walk_expected_recursion(const CallTreeNode& node,
                             std::vector<std::string>& path,
                             std::map<int, bool>& expected) {
    for (const CallTreeNode& child : node.children) {
        bool on_path = std::find(path.begin(), path.end(),
                                 child.qualified.display) != path.end();
        expected[child.id] = on_path;
        path.push_back(child.qualified.display);
        walk_expected_recursion(child, path, expected);
        path.pop_back();
    }
}

void recursion_marks(Criterion& c) {
    FactIndex index = merge(extract_corpus());
    CallTreeNode tree = build_tree(index, resolve_root(index, "main"));

    // independent walk: a node is recursive exactly when its display
    // already occurred among its ancestors
    std::map<int, bool> expected;
    std::vector<std::string> path{tree.qualified.display};
    walk_expected_recursion(tree, path, expected);

    int marked = 0, mismatches = 0;
    std::function<void(const CallTreeNode&)> verify =
        [&](const CallTreeNode& node) {
            if (node.id != tree.id) {
                if (node.recursive) ++marked;
                if (node.recursive != expected.at(node.id)) ++mismatches;
            }
            for (const CallTreeNode& child : node.children) verify(child);
        };
    verify(tree);
    c.require(mismatches == 0,
              std::to_string(mismatches) + " nodes disagree with the path walk");
    c.require(marked > 0, "no recursive nodes found in the corpus tree");
    c.require(recursive_names(tree) == std::set<std::string>{"countdown", "ping"},
              "recursive name set is not {countdown, ping}");

    // recursive nodes render dotted
    std::string dot = emit_dot(tree).text;
    c.require(dot.find("style=dotted") != std::string::npos,
              "dot output has no dotted node");
}

void coverage_direction(Criterion& c) {
    FactIndex index = merge(extract_corpus());
    QualifiedName root = resolve_root(index, "main");
    CallTreeNode full_tree = build_tree(index, root);
    std::set<std::string> expected = recursive_names(full_tree);
    GraphMetrics full = graph_metrics(full_tree, expected);

    FactIndex reduced = baseline_filter(index);
    GraphMetrics base =
        graph_metrics(build_tree(reduced, resolve_root(reduced, "main")),
                      expected);

    c.require(full.total_calls >= 2 * base.total_calls,
              "total " + std::to_string(full.total_calls) + " vs baseline " +
                  std::to_string(base.total_calls));
    c.require(full.member_calls > base.member_calls,
              "member " + std::to_string(full.member_calls) + " vs baseline " +
                  std::to_string(base.member_calls));
    c.require(base.library_calls == 0,
              "baseline library calls " + std::to_string(base.library_calls));
    c.note("full " + std::to_string(full.total_calls) + " calls, baseline " +
           std::to_string(base.total_calls));
}

void fuzzing(Criterion& c) {
    auto start = std::chrono::steady_clock::now();
    Lexicon lex{cpp_lexicon()};
    std::vector<std::string> seeds;
    for (const fs::path& path : corpus_files())
        seeds.push_back(islet::test::read_file(path));
    seeds.push_back(islet::test::read_fixture("member_pointer_call.ast"));
    seeds.push_back(islet::test::read_fixture("objc_sample.ast"));

    auto dir = islet::test::scratch_dir("accept_fuzz");
    islet::test::Rng rng(6);
    int crashes = 0, malformed = 0;
    for (int i = 0; i < 1000; ++i) {
        std::string mutant = islet::test::random_mutation(rng, seeds);
        ExtractionResult r;
        try {
            r = extract_facts(mutant, "fuzz", lex);
        } catch (...) {
            ++crashes;
            continue;
        }
        try {
            // round-tripping re-validates every output invariant
            FactFilePair pair = write_facts(r, dir);
            if (read_facts(pair) != canonical(r)) ++malformed;
        } catch (...) {
            ++malformed;
        }
    }
    c.require(crashes == 0, std::to_string(crashes) + " crashes");
    c.require(malformed == 0, std::to_string(malformed) + " malformed outputs");

    // deleting any single pure-water line never changes the result
    int variants = 0, changed = 0;
    for (const fs::path& path : corpus_files()) {
        std::string text = islet::test::read_file(path);
        ExtractionResult base = extract_facts(text, "t", lex);
        std::vector<std::string> lines;
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t nl = text.find('\n', pos);
            if (nl == std::string::npos) nl = text.size();
            lines.push_back(text.substr(pos, nl - pos));
            pos = nl + 1;
        }
        for (std::size_t skip = 0; skip < lines.size(); ++skip) {
            if (scan_line(lines[skip], lex).is_land()) continue;
            std::string variant;
            for (std::size_t i = 0; i < lines.size(); ++i) {
                if (i == skip) continue;
                variant += lines[i];
                variant += '\n';
            }
            ++variants;
            if (extract_facts(variant, "t", lex) != base) ++changed;
        }
    }
    c.require(changed == 0, std::to_string(changed) + " of " +
                                std::to_string(variants) +
                                " water deletions changed the result");
    double elapsed = seconds_since(start);
    c.require(elapsed < 60.0, "took " + fmt_seconds(elapsed));
    c.note(fmt_seconds(elapsed));
}

void performance_shape(Criterion& c) {
    Lexicon lex{cpp_lexicon()};
    islet::test::Rng rng(7);
    islet::test::SynthCounts counts;
    std::string base = islet::test::synth_dump(rng, counts, 300 * 1024);
    c.require(base.size() <= 2 * 1024 * 1024,
              "base dump is " + std::to_string(base.size()) + " bytes");

    double base_median = median_extract_seconds(base, lex);
    c.require(base_median <= 0.5,
              "median " + fmt_seconds(base_median) + " per extraction");

    std::string big;
    for (int i = 0; i < 10; ++i) big += base;
    double big_median = median_extract_seconds(big, lex);
    c.require(big_median <= 12.0 * base_median,
              "10x dump took " + fmt_seconds(big_median) + " vs " +
                  fmt_seconds(base_median));
    std::ostringstream rate;
    rate << (base.size() / 1024) << "KB in " << fmt_seconds(base_median)
         << ", 10x in " << fmt_seconds(big_median);
    c.note(rate.str());

    // corpus dumps all extract comfortably inside the bound too
    for (const fs::path& path : corpus_files()) {
        double t = median_extract_seconds(islet::test::read_file(path), lex, 3);
        c.require(t <= 0.5, path.filename().string() + " took " + fmt_seconds(t));
    }
}

void determinism(Criterion& c) {
    auto dir_a = islet::test::scratch_dir("accept_det_a");
    auto dir_b = islet::test::scratch_dir("accept_det_b");
    for (const fs::path& out : {dir_a, dir_b}) {
        RunConfig extract;
        extract.command = Command::Extract;
        extract.inputs = {(islet::test::fixture_dir() / "corpus").string()};
        extract.out_dir = out;
        std::ostringstream sink, errs;
        c.require(run(extract, sink, errs) == kExitOk, "extract failed");

        RunConfig link;
        link.command = Command::Link;
        link.inputs = {out.string()};
        link.dot_path = out / "graph.dot";
        link.edges_path = out / "edges.csv";
        c.require(run(link, sink, errs) == kExitOk, "link failed");
    }
    int diffs = 0;
    for (const auto& entry : fs::recursive_directory_iterator(dir_a)) {
        if (!entry.is_regular_file()) continue;
        fs::path rel = fs::relative(entry.path(), dir_a);
        if (islet::test::read_file(entry.path()) !=
            islet::test::read_file(dir_b / rel))
            ++diffs;
    }
    c.require(diffs == 0, std::to_string(diffs) + " files differ between runs");

    auto dir = islet::test::scratch_dir("accept_roundtrip");
    islet::test::Rng rng(8);
    int failures = 0;
    for (int i = 0; i < 200; ++i) {
        ExtractionResult r = islet::test::rand_result(rng);
        if (read_facts(write_facts(r, dir)) != r) ++failures;
    }
    c.require(failures == 0,
              std::to_string(failures) + " of 200 round-trips not identity");
}

void oracle_equivalence(Criterion& c) {
    Lexicon lex{cpp_lexicon()};
    islet::test::Rng rng(9);
    int mismatches = 0;
    for (int i = 0; i < 50; ++i) {
        islet::test::SynthCounts written;
        std::string dump = islet::test::synth_dump(rng, written);
        islet::test::OracleCounts oracle = islet::test::oracle_counts(dump);
        ExtractionResult r = extract_facts(dump, "synth", lex);
        int got_args = 0;
        for (const CallFact& f : r.facts)
            got_args += static_cast<int>(f.args.size());
        bool same = static_cast<int>(r.facts.size()) == oracle.calls &&
                    got_args == oracle.args;
        // the generator's own ledger must agree as well
        same = same && oracle.calls == written.calls &&
               oracle.args == written.args;
        if (!same) {
            ++mismatches;
            if (mismatches == 1)
                c.note("dump " + std::to_string(i) + ": extractor " +
                       std::to_string(r.facts.size()) + "/" +
                       std::to_string(got_args) + ", oracle " +
                       std::to_string(oracle.calls) + "/" +
                       std::to_string(oracle.args) + ", generator " +
                       std::to_string(written.calls) + "/" +
                       std::to_string(written.args));
        }
    }
    c.require(mismatches == 0,
              std::to_string(mismatches) + " of 50 dumps disagree");
}

void dialect_extension(Criterion& c) {
    std::string dump = islet::test::read_fixture("objc_sample.ast");
    ExtractionResult with_objc, with_cpp;
    try {
        with_objc = extract_facts(dump, "sample", Lexicon{objc_lexicon()});
    } catch (...) {
        c.require(false, "objc extraction crashed");
        return;
    }
    try {
        with_cpp = extract_facts(dump, "sample", Lexicon{cpp_lexicon()});
    } catch (...) {
        c.require(false, "cpp extraction crashed");
        return;
    }
    auto has_callee = [](const ExtractionResult& r, const std::string& name) {
        for (const CallFact& f : r.facts)
            if (f.callee == name) return true;
        return false;
    };
    // message sends only surface through the objc table
    c.require(has_callee(with_objc, "sayHello"),
              "objc table missed the sayHello message");
    c.require(has_callee(with_objc, "new"), "objc table missed the new message");
    c.require(!has_callee(with_cpp, "sayHello") && !has_callee(with_cpp, "new"),
              "cpp table unexpectedly produced message facts");
    // shared C islands appear either way
    c.require(has_callee(with_objc, "printf") && has_callee(with_cpp, "printf"),
              "printf call missing from one of the runs");
}

} // namespace

int main() {
    struct Entry {
        const char* title;
        void (*body)(Criterion&);
    };
    const Entry entries[] = {
        {"member pointer call resolves enclosing and receiver classes",
         member_pointer_resolution},
        {"three-file link yields the four-node chain", chain_link},
        {"all eight argument kinds render like the source", argument_kinds},
        {"recursive leaves sit exactly at path repeats", recursion_marks},
        {"full view at least doubles the baseline call count",
         coverage_direction},
        {"1000 mutants: no crashes, well-formed output, water-line invariance",
         fuzzing},
        {"extraction stays fast and scales near-linearly", performance_shape},
        {"reruns are byte-identical and round-trips are identity", determinism},
        {"counts match a full-tree oracle on 50 synthetic dumps",
         oracle_equivalence},
        {"objc table extracts message sends the cpp table skips",
         dialect_extension},
    };

    int failures = 0;
    for (std::size_t i = 0; i < std::size(entries); ++i) {
        Criterion c;
        try {
            entries[i].body(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("unhandled exception: ") + e.what());
        }
        std::cout << (c.ok() ? "PASS" : "FAIL") << " criterion " << i + 1
                  << ": " << entries[i].title;
        if (!c.detail().empty()) std::cout << " (" << c.detail() << ")";
        std::cout << "\n";
        if (!c.ok()) ++failures;
    }
    if (failures)
        std::cout << failures << " of " << std::size(entries)
                  << " criteria failed\n";
    else
        std::cout << "all " << std::size(entries) << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
