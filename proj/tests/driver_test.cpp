#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "islet/dot.hpp"
#include "islet/driver.hpp"

#include "support/generators.hpp"
#include "support/paths.hpp"

using namespace islet;
using Catch::Matchers::ContainsSubstring;

namespace {

namespace fs = std::filesystem;

struct RunOutput {
    int code = 0;
    std::string out;
    std::string err;
};

RunOutput run_config(const RunConfig& config) {
    std::ostringstream out, err;
    RunOutput r;
    r.code = run(config, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<fs::path> corpus_files() {
    std::vector<fs::path> files;
    for (const auto& entry :
         fs::directory_iterator(islet::test::fixture_dir() / "corpus"))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

} // namespace

TEST_CASE("dump labels strip one trailing .ast") {
    CHECK(detail::dump_label("fixtures/Contact.cpp.ast") == "Contact.cpp");
    CHECK(detail::dump_label("a/b/main.cpp.ast") == "main.cpp");
    CHECK(detail::dump_label("noext") == "noext");
    CHECK(detail::dump_label(".ast") == ".ast");
}

TEST_CASE("extract writes one fact pair per dump and reports warnings") {
    auto out_dir = islet::test::scratch_dir("drv_extract");
    RunConfig config;
    config.command = Command::Extract;
    config.inputs = {(islet::test::fixture_dir() / "corpus").string()};
    config.out_dir = out_dir;

    RunOutput r = run_config(config);
    CHECK(r.code == kExitOk);
    CHECK(fs::exists(out_dir / "main.cpp" / "calls.csv"));
    CHECK(fs::exists(out_dir / "main.cpp" / "defs.csv"));
    CHECK(fs::exists(out_dir / "Contact.cpp" / "calls.csv"));
    CHECK_THAT(r.out, ContainsSubstring("main.cpp: 11 facts, 1 defs, 0 warnings"));
    CHECK(r.err == "WARN Dispatch.cpp:call through variable 'handler' not resolved\n");
}

TEST_CASE("extract fails with exit 2 on unreadable input") {
    RunConfig config;
    config.command = Command::Extract;
    config.inputs = {"/nonexistent/input.ast"};
    config.out_dir = islet::test::scratch_dir("drv_extract_bad");
    RunOutput r = run_config(config);
    CHECK(r.code == kExitIo);
    CHECK_THAT(r.err, ContainsSubstring("error:"));
}

TEST_CASE("unknown dialect names are a configuration error") {
    RunConfig config;
    config.command = Command::Extract;
    config.dialect = "klingon";
    config.inputs = {(islet::test::fixture_dir() / "member_pointer_call.ast").string()};
    config.out_dir = islet::test::scratch_dir("drv_dialect");
    RunOutput r = run_config(config);
    CHECK(r.code == kExitConfig);
    CHECK_THAT(r.err, ContainsSubstring("unknown dialect 'klingon'"));
}

TEST_CASE("a dialect file path works wherever a builtin name does") {
    auto out_dir = islet::test::scratch_dir("drv_dialect_file");
    RunConfig config;
    config.command = Command::Extract;
    config.dialect = (islet::test::dialect_dir() / "objc.dialect").string();
    config.inputs = {(islet::test::fixture_dir() / "objc_sample.ast").string()};
    config.out_dir = out_dir;
    RunOutput r = run_config(config);
    CHECK(r.code == kExitOk);
    ExtractionResult facts = read_facts({out_dir / "objc_sample" / "calls.csv",
                                         out_dir / "objc_sample" / "defs.csv"});
    bool has_message_call = false;
    for (const CallFact& f : facts.facts)
        if (f.callee == "sayHello") has_message_call = true;
    CHECK(has_message_call);
}

TEST_CASE("link builds the dot and edge files from extracted facts") {
    auto out_dir = islet::test::scratch_dir("drv_link");
    RunConfig extract;
    extract.command = Command::Extract;
    extract.inputs = {(islet::test::fixture_dir() / "corpus").string()};
    extract.out_dir = out_dir;
    REQUIRE(run_config(extract).code == kExitOk);

    RunConfig link;
    link.command = Command::Link;
    link.inputs = {out_dir.string()};
    link.dot_path = out_dir / "graph.dot";
    link.edges_path = out_dir / "edges.csv";
    RunOutput r = run_config(link);
    CHECK(r.code == kExitOk);
    CHECK_THAT(r.out, ContainsSubstring("wrote"));

    std::string dot = islet::test::read_file(out_dir / "graph.dot");
    CHECK_THAT(dot, ContainsSubstring("digraph {"));
    CHECK_THAT(dot, ContainsSubstring("AddressBook::display_book"));
    std::string edges = islet::test::read_file(out_dir / "edges.csv");
    CHECK_THAT(edges, ContainsSubstring("parent_id,child_id"));

    SECTION("an unknown root is a configuration error with candidates") {
        link.root = "not_a_function";
        RunOutput bad = run_config(link);
        CHECK(bad.code == kExitConfig);
        CHECK_THAT(bad.err, ContainsSubstring("unknown root"));
    }
}

TEST_CASE("link fails with exit 2 when inputs are missing") {
    RunConfig link;
    link.command = Command::Link;
    link.inputs = {"/nonexistent/facts"};
    RunOutput r = run_config(link);
    CHECK(r.code == kExitIo);
}

TEST_CASE("fact-set arguments accept files, pair dirs, and dirs of dirs") {
    auto dir = islet::test::scratch_dir("drv_pairs");
    ExtractionResult r;
    r.defs = {{"a.cpp", "main", "", FunctionDef::Kind::Free}};
    write_facts(r, dir / "a.cpp");

    auto one = detail::resolve_fact_pairs(dir / "a.cpp" / "calls.csv");
    REQUIRE(one.size() == 1);
    auto two = detail::resolve_fact_pairs(dir / "a.cpp");
    REQUIRE(two.size() == 1);
    CHECK(one[0].calls_path == two[0].calls_path);
    auto tree = detail::resolve_fact_pairs(dir);
    REQUIRE(tree.size() == 1);

    CHECK_THROWS_WITH(detail::resolve_fact_pairs(dir / "a.cpp" / "defs.csv"),
                      ContainsSubstring("expected a calls.csv"));
    fs::create_directories(dir / "empty");
    CHECK_THROWS_WITH(detail::resolve_fact_pairs(dir / "empty"),
                      ContainsSubstring("no fact files"));
}

TEST_CASE("compare needs exactly two fact sets") {
    RunConfig config;
    config.command = Command::Compare;
    config.inputs = {"just_one"};
    RunOutput r = run_config(config);
    CHECK(r.code == kExitConfig);
    CHECK_THAT(r.err, ContainsSubstring("exactly two"));
}

namespace {

// Parses "name      a       b   delta" rows from the compare table.
bool table_row(const std::string& out, const std::string& name, int& a, int& b,
               int& delta) {
    std::istringstream lines(out);
    std::string line;
    while (std::getline(lines, line)) {
        std::istringstream fields(line);
        std::string label;
        fields >> label;
        if (label != name) continue;
        fields >> a >> b >> delta;
        return !fields.fail();
    }
    return false;
}

} // namespace

TEST_CASE("compare against self is all zero deltas") {
    auto dir = islet::test::scratch_dir("drv_cmp_self");
    RunConfig extract;
    extract.command = Command::Extract;
    extract.inputs = {(islet::test::fixture_dir() / "corpus").string()};
    extract.out_dir = dir;
    REQUIRE(run_config(extract).code == kExitOk);

    RunConfig cmp;
    cmp.command = Command::Compare;
    cmp.inputs = {dir.string(), dir.string()};
    RunOutput r = run_config(cmp);
    CHECK(r.code == kExitOk);
    int a = 0, b = 0, d = 0;
    for (const char* row : {"total_calls", "member_calls", "free_calls",
                            "library_calls", "argument_count"}) {
        REQUIRE(table_row(r.out, row, a, b, d));
        CHECK(a == b);
        CHECK(d == 0);
    }
}

TEST_CASE("baseline mode drops four library calls and two this-calls") {
    // main calls display plus four distinct library functions; display
    // makes two implied-this calls. A library- and this-blind view keeps
    // only main -> display, so the total delta is six.
    auto dir = islet::test::scratch_dir("drv_cmp_delta");
    ExtractionResult r;
    r.defs = {{"t.cpp", "main", "", FunctionDef::Kind::Free},
              {"t.cpp", "display", "Contact", FunctionDef::Kind::Member},
              {"t.cpp", "match", "Contact", FunctionDef::Kind::Member},
              {"t.cpp", "validate", "Contact", FunctionDef::Kind::Member}};
    auto call = [](std::string scope, std::string cls, int seq,
                   std::string callee, std::string rclass, ReceiverKind rk) {
        CallFact f;
        f.file = "t.cpp";
        f.caller_scope = std::move(scope);
        f.caller_class = std::move(cls);
        f.seq = seq;
        f.callee = std::move(callee);
        f.receiver_class = std::move(rclass);
        f.receiver_kind = rk;
        return f;
    };
    r.facts = {
        call("main", "", 0, "display", "Contact", ReceiverKind::NamedObject),
        call("main", "", 1, "printf", "", ReceiverKind::None),
        call("main", "", 2, "fopen", "", ReceiverKind::None),
        call("main", "", 3, "malloc", "", ReceiverKind::None),
        call("main", "", 4, "strlen", "", ReceiverKind::None),
        call("display", "Contact", 0, "match", "Contact",
             ReceiverKind::ThisImplied),
        call("display", "Contact", 1, "validate", "Contact",
             ReceiverKind::ThisImplied),
    };
    write_facts(r, dir / "t.cpp");

    RunConfig cmp;
    cmp.command = Command::Compare;
    cmp.baseline_mode = true;
    cmp.inputs = {(dir / "t.cpp").string(), (dir / "t.cpp").string()};
    RunOutput out = run_config(cmp);
    REQUIRE(out.code == kExitOk);

    int a = 0, b = 0, d = 0;
    REQUIRE(table_row(out.out, "total_calls", a, b, d));
    CHECK(a == 7);
    CHECK(b == 1);
    CHECK(d == 6);
    REQUIRE(table_row(out.out, "library_calls", a, b, d));
    CHECK(a == 4);
    CHECK(b == 0);
    REQUIRE(table_row(out.out, "recursion_correct", a, b, d));
    CHECK(a == 1);
    CHECK(b == 1); // neither side marks recursion, matching expectation
}

TEST_CASE("extract-then-link equals the fused in-memory pipeline") {
    auto dir = islet::test::scratch_dir("drv_fused");
    RunConfig extract;
    extract.command = Command::Extract;
    extract.inputs = {(islet::test::fixture_dir() / "corpus").string()};
    extract.out_dir = dir;
    REQUIRE(run_config(extract).code == kExitOk);

    RunConfig link;
    link.command = Command::Link;
    link.inputs = {dir.string()};
    link.dot_path = dir / "graph.dot";
    link.edges_path = dir / "edges.csv";
    REQUIRE(run_config(link).code == kExitOk);

    Lexicon lex{cpp_lexicon()};
    std::vector<ExtractionResult> results;
    for (const fs::path& path : corpus_files())
        results.push_back(canonical(extract_facts(
            islet::test::read_file(path), detail::dump_label(path), lex)));
    FactIndex index = merge(results);
    CallTreeNode tree = build_tree(index, default_root(index));

    CHECK(islet::test::read_file(dir / "graph.dot") == emit_dot(tree).text);
    CHECK(islet::test::read_file(dir / "edges.csv") == emit_edges_csv(tree));
}

TEST_CASE("bench times every file and counts zero crashes on the corpus") {
    RunConfig config;
    config.command = Command::Bench;
    config.inputs = {
        (islet::test::fixture_dir() / "corpus" / "main.cpp.ast").string(),
        (islet::test::fixture_dir() / "corpus" / "Contact.cpp.ast").string()};
    BenchReport report;
    std::ostringstream out, err;
    int code = run_bench(config, out, err, &report);
    CHECK(code == kExitOk);
    REQUIRE(report.per_file.size() == 2);
    CHECK(report.crashes == 0);
    CHECK(report.mean_seconds >= 0.0);
    CHECK_THAT(out.str(), ContainsSubstring("mean"));
    CHECK_THAT(out.str(), ContainsSubstring("0 crashes"));
}

TEST_CASE("bench medians grow near-linearly with dump size") {
    auto dir = islet::test::scratch_dir("bench_linear");
    islet::test::Rng rng(11);
    islet::test::SynthCounts counts;
    std::string base = islet::test::synth_dump(rng, counts, 512 * 1024);
    {
        std::ofstream f(dir / "base.ast");
        f << base;
        std::ofstream g(dir / "doubled.ast");
        g << base << base;
    }

    RunConfig config;
    config.command = Command::Bench;
    config.inputs = {(dir / "base.ast").string(),
                     (dir / "doubled.ast").string()};
    BenchReport report;
    std::ostringstream out, err;
    REQUIRE(run_bench(config, out, err, &report) == kExitOk);
    REQUIRE(report.per_file.size() == 2);
    CHECK(report.crashes == 0);
    // floor the base so sub-millisecond noise cannot inflate the ratio
    double base_median = std::max(report.per_file[0].second, 0.001);
    CHECK(report.per_file[1].second <= 2.5 * base_median);
}
