// Pipeline orchestration behind the command-line tool: extract dumps to
// fact CSVs, link fact CSVs into DOT/edge outputs, compare six-feature
// metrics between two fact sets, and benchmark extraction.

#pragma once

#include <algorithm>
#include <chrono>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "islet/dot.hpp"
#include "islet/extractor.hpp"
#include "islet/fact_store.hpp"
#include "islet/lexicon.hpp"
#include "islet/linker.hpp"

namespace islet {

enum class Command { Extract, Link, Graph, Compare, Bench };

struct RunConfig {
    Command command = Command::Extract;
    std::vector<std::string> inputs;
    std::string dialect = "cpp";
    std::filesystem::path out_dir = ".";
    std::optional<std::string> root;
    int max_depth = 100;
    bool baseline_mode = false;
    std::filesystem::path dot_path = "graph.dot";
    std::filesystem::path edges_path = "edges.csv";
};

struct BenchReport {
    std::vector<std::pair<std::string, double>> per_file; // (path, median s)
    double mean_seconds = 0.0;
    int crashes = 0;
};

// 0 success, 1 usage or configuration problem, 2 I/O or input-data
// failure. Shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitIo = 2;

namespace detail {

// A dialect name is a builtin table first, a table file second.
inline Lexicon load_dialect(const std::string& name) {
    if (name == "cpp") return Lexicon(cpp_lexicon());
    if (name == "objc") return Lexicon(objc_lexicon());
    std::ifstream in(name);
    if (!in)
        throw std::runtime_error("unknown dialect '" + name +
                                 "' (not builtin, not a readable file)");
    return Lexicon(parse_dialect(in, name));
}

inline std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Dump inputs may be files or directories; directories expand to their
// regular files in sorted order so runs are deterministic.
inline std::vector<std::filesystem::path>
expand_dump_inputs(const std::vector<std::string>& inputs) {
    std::vector<std::filesystem::path> files;
    for (const std::string& input : inputs) {
        std::filesystem::path p(input);
        if (std::filesystem::is_directory(p)) {
            std::vector<std::filesystem::path> inside;
            for (const auto& entry : std::filesystem::directory_iterator(p))
                if (entry.is_regular_file()) inside.push_back(entry.path());
            std::sort(inside.begin(), inside.end());
            files.insert(files.end(), inside.begin(), inside.end());
        } else {
            files.push_back(p);
        }
    }
    return files;
}

// The fact "file" column and the per-dump output directory both use the
// dump's basename with a trailing .ast stripped, so Contact.cpp.ast
// labels its facts Contact.cpp.
inline std::string dump_label(const std::filesystem::path& path) {
    std::string name = path.filename().string();
    if (name.size() > 4 && name.ends_with(".ast"))
        name.resize(name.size() - 4);
    return name;
}

// A fact-set argument is a calls.csv file, a directory holding the
// calls.csv/defs.csv pair, or a directory of such directories.
inline std::vector<FactFilePair>
resolve_fact_pairs(const std::filesystem::path& path) {
    std::vector<FactFilePair> pairs;
    if (std::filesystem::is_regular_file(path)) {
        if (path.filename() != "calls.csv")
            throw std::runtime_error(path.string() +
                                     ": expected a calls.csv file or a "
                                     "directory containing one");
        pairs.push_back({path, path.parent_path() / "defs.csv"});
        return pairs;
    }
    if (!std::filesystem::is_directory(path))
        throw std::runtime_error("cannot open " + path.string());
    if (std::filesystem::exists(path / "calls.csv")) {
        pairs.push_back({path / "calls.csv", path / "defs.csv"});
        return pairs;
    }
    std::vector<std::filesystem::path> subdirs;
    for (const auto& entry : std::filesystem::directory_iterator(path))
        if (entry.is_directory() &&
            std::filesystem::exists(entry.path() / "calls.csv"))
            subdirs.push_back(entry.path());
    std::sort(subdirs.begin(), subdirs.end());
    for (const auto& dir : subdirs)
        pairs.push_back({dir / "calls.csv", dir / "defs.csv"});
    if (pairs.empty())
        throw std::runtime_error("no fact files under " + path.string());
    return pairs;
}

inline std::vector<ExtractionResult>
read_fact_sets(const std::vector<std::string>& inputs) {
    std::vector<ExtractionResult> results;
    for (const std::string& input : inputs)
        for (const FactFilePair& pair : resolve_fact_pairs(input))
            results.push_back(read_facts(pair));
    return results;
}

inline void print_warnings(std::ostream& err, const std::string& file,
                           const std::vector<std::string>& warnings) {
    for (const std::string& w : warnings)
        err << "WARN " << file << ":" << w << "\n";
}

} // namespace detail

/// extract: each dump becomes a calls.csv/defs.csv pair under
/// out_dir/<label>/, with a one-line summary per file on out and
/// warnings on err. Warnings do not affect the exit code.
inline int run_extract(const RunConfig& config, std::ostream& out,
                       std::ostream& err) {
    Lexicon lexicon = [&] { return detail::load_dialect(config.dialect); }();
    std::vector<std::filesystem::path> files;
    try {
        files = detail::expand_dump_inputs(config.inputs);
        for (const auto& path : files)
            if (!std::filesystem::is_regular_file(path))
                throw std::runtime_error("cannot open " + path.string());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    for (const auto& path : files) {
        std::string label = detail::dump_label(path);
        try {
            std::string text = detail::read_text_file(path);
            ExtractionResult result = extract_facts(text, label, lexicon);
            write_facts(result, config.out_dir / label);
            detail::print_warnings(err, label, result.warnings);
            out << label << ": " << result.facts.size() << " facts, "
                << result.defs.size() << " defs, " << result.warnings.size()
                << " warnings\n";
        } catch (const std::exception& e) {
            err << "error: " << path.string() << ": " << e.what() << "\n";
            return kExitIo;
        }
    }
    return kExitOk;
}

/// link/graph: merge fact CSVs, expand the tree from the requested (or
/// default) root, and write the DOT file and edges.csv.
inline int run_link(const RunConfig& config, std::ostream& out,
                    std::ostream& err) {
    std::vector<ExtractionResult> results;
    try {
        results = detail::read_fact_sets(config.inputs);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    FactIndex index = merge(results);
    detail::print_warnings(err, "link", index.warnings);

    CallTreeNode tree;
    try {
        QualifiedName root = resolve_root(index, config.root.value_or(""));
        std::vector<std::string> tree_warnings;
        tree = build_tree(index, root, config.max_depth, &tree_warnings);
        detail::print_warnings(err, "link", tree_warnings);
    } catch (const UnknownRootError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        detail::write_file_atomically(config.dot_path, emit_dot(tree).text);
        detail::write_file_atomically(config.edges_path, emit_edges_csv(tree));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    out << "wrote " << config.dot_path.string() << " and "
        << config.edges_path.string() << "\n";
    return kExitOk;
}

namespace detail {

inline void print_metric_row(std::ostream& out, const char* name, int a,
                             int b, int delta) {
    out << std::left << std::setw(18) << name << std::right << std::setw(8)
        << a << std::setw(8) << b << std::setw(8) << std::showpos << delta
        << std::noshowpos << "\n";
}

} // namespace detail

/// compare: builds both sides' trees, prints the six-feature table and
/// fieldwise deltas (a minus b). With baseline_mode, side b is reduced
/// to what a this-blind, library-blind tool would see. Side a's
/// recursive-name set is the expectation both sides are scored against.
inline int run_compare(const RunConfig& config, std::ostream& out,
                       std::ostream& err) {
    if (config.inputs.size() != 2) {
        err << "error: compare needs exactly two fact sets\n";
        return kExitConfig;
    }
    FactIndex index_a, index_b;
    try {
        index_a = merge(detail::read_fact_sets({config.inputs[0]}));
        index_b = merge(detail::read_fact_sets({config.inputs[1]}));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    if (config.baseline_mode) index_b = baseline_filter(index_b);

    GraphMetrics ma, mb;
    try {
        QualifiedName root_a = resolve_root(index_a, config.root.value_or(""));
        QualifiedName root_b = resolve_root(index_b, config.root.value_or(""));
        CallTreeNode tree_a = build_tree(index_a, root_a, config.max_depth);
        CallTreeNode tree_b = build_tree(index_b, root_b, config.max_depth);
        std::set<std::string> expected = recursive_names(tree_a);
        ma = graph_metrics(tree_a, expected);
        mb = graph_metrics(tree_b, expected);
    } catch (const UnknownRootError& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    MetricsDelta d = compare_metrics(ma, mb);
    out << std::left << std::setw(18) << "feature" << std::right
        << std::setw(8) << "a" << std::setw(8) << "b" << std::setw(8)
        << "delta" << "\n";
    detail::print_metric_row(out, "total_calls", ma.total_calls,
                             mb.total_calls, d.total_calls);
    detail::print_metric_row(out, "member_calls", ma.member_calls,
                             mb.member_calls, d.member_calls);
    detail::print_metric_row(out, "free_calls", ma.free_calls, mb.free_calls,
                             d.free_calls);
    detail::print_metric_row(out, "library_calls", ma.library_calls,
                             mb.library_calls, d.library_calls);
    detail::print_metric_row(out, "argument_count", ma.argument_count,
                             mb.argument_count, d.argument_count);
    detail::print_metric_row(out, "recursion_correct", ma.recursion_correct,
                             mb.recursion_correct, d.recursion_correct);
    return kExitOk;
}

/// bench: per input dump, three timed extractions; the median is
/// reported. An extraction that throws counts as a crash and the run
/// continues.
inline int run_bench(const RunConfig& config, std::ostream& out,
                     std::ostream& err, BenchReport* report = nullptr) {
    Lexicon lexicon = detail::load_dialect(config.dialect);
    std::vector<std::filesystem::path> files;
    try {
        files = detail::expand_dump_inputs(config.inputs);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitIo;
    }
    BenchReport local;
    BenchReport& r = report ? *report : local;
    for (const auto& path : files) {
        std::string text;
        try {
            text = detail::read_text_file(path);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return kExitIo;
        }
        std::vector<double> times;
        for (int run = 0; run < 3; ++run) {
            auto start = std::chrono::steady_clock::now();
            try {
                extract_facts(text, detail::dump_label(path), lexicon);
            } catch (const std::exception&) {
                ++r.crashes;
            }
            auto stop = std::chrono::steady_clock::now();
            times.push_back(std::chrono::duration<double>(stop - start).count());
        }
        std::sort(times.begin(), times.end());
        double median = times[1];
        r.per_file.emplace_back(path.string(), median);
        out << path.string() << ": " << std::fixed << std::setprecision(4)
            << median << " s\n";
    }
    double sum = 0.0;
    for (const auto& [p, t] : r.per_file) sum += t;
    r.mean_seconds = r.per_file.empty() ? 0.0 : sum / r.per_file.size();
    out << "mean " << std::fixed << std::setprecision(4) << r.mean_seconds
        << " s over " << r.per_file.size() << " files, " << r.crashes
        << " crashes\n";
    return kExitOk;
}

/// Dispatch on config.command; returns the process exit code.
inline int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.command) {
            case Command::Extract: return run_extract(config, out, err);
            case Command::Link:
            case Command::Graph: return run_link(config, out, err);
            case Command::Compare: return run_compare(config, out, err);
            case Command::Bench: return run_bench(config, out, err);
        }
    } catch (const std::exception& e) {
        // configuration problems surface here (bad dialect name, ...)
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}

} // namespace islet
