// Command-line front end. All real work lives in the islet headers; this
// file only maps flags onto a RunConfig.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "islet/driver.hpp"

int main(int argc, char** argv) {
    CLI::App app{"call graph extraction from compiler AST dumps"};
    app.require_subcommand(1);

    islet::RunConfig config;
    std::string root;
    std::string out_dir = ".";
    std::string dot_path = "graph.dot";
    std::string edges_path = "edges.csv";

    CLI::App* extract =
        app.add_subcommand("extract", "scan AST dumps into fact CSV files");
    extract->add_option("--dialect", config.dialect,
                        "builtin table (cpp, objc) or a dialect file");
    extract->add_option("--out", out_dir, "output directory for fact files");
    extract->add_option("files", config.inputs, "AST dump files or directories")
        ->required();

    CLI::App* link = app.add_subcommand(
        "link", "merge fact CSVs and write the call tree as DOT and edges");
    link->alias("graph");
    link->add_option("--root", root, "root function (default: main, then "
                                     "first never-called definition)");
    link->add_option("--max-depth", config.max_depth,
                     "truncate tree expansion below this depth");
    link->add_option("--dot", dot_path, "DOT output file");
    link->add_option("--edges", edges_path, "edge list CSV output file");
    link->add_option("inputs", config.inputs,
                     "calls.csv files or directories of fact pairs")
        ->required();

    CLI::App* compare = app.add_subcommand(
        "compare", "print the six-feature table for two fact sets");
    compare->add_flag("--baseline-mode", config.baseline_mode,
                      "reduce side b to a library-blind, this-blind view");
    compare->add_option("inputs", config.inputs, "two fact sets")
        ->required()
        ->expected(2);

    CLI::App* bench =
        app.add_subcommand("bench", "time extraction over dump files");
    bench->add_option("files", config.inputs, "AST dump files or directories")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? islet::kExitOk : islet::kExitConfig;
    }

    if (*extract) {
        config.command = islet::Command::Extract;
        config.out_dir = out_dir;
    } else if (*link) {
        config.command = islet::Command::Link;
        if (!root.empty()) config.root = root;
        config.dot_path = dot_path;
        config.edges_path = edges_path;
    } else if (*compare) {
        config.command = islet::Command::Compare;
    } else if (*bench) {
        config.command = islet::Command::Bench;
    }
    return islet::run(config, std::cout, std::cerr);
}
