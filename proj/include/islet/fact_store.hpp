// CSV interchange for extraction results: calls.csv + defs.csv.
//
// Writing is deterministic (sorted rows, LF endings, temp-file rename);
// reading validates shape and reports the offending file, line, and
// column on malformed input.

#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "islet/extractor.hpp"

namespace islet {

struct FactFilePair {
    std::filesystem::path calls_path;
    std::filesystem::path defs_path;
};

inline constexpr std::string_view kCallsHeader =
    "file,caller_scope,caller_class,seq,callee,receiver_class,receiver_kind,"
    "arg_count,args,warning";
inline constexpr std::string_view kDefsHeader = "file,name,class,kind";

namespace detail {

inline std::string csv_quote(std::string_view field) {
    bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

// The args cell packs `kind=display` entries with '|' between them;
// backslash escapes the separator and itself inside displays.
inline std::string encode_args(const std::vector<ArgValue>& args) {
    std::string cell;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (i) cell += '|';
        cell += arg_kind_name(args[i].kind);
        cell += '=';
        for (char c : args[i].display) {
            if (c == '\\' || c == '|') cell += '\\';
            cell += c;
        }
    }
    return cell;
}

struct CsvRow {
    std::vector<std::string> fields;
    std::size_t line = 0; // 1-based line the row starts on
};

class CsvError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline CsvError csv_error(const std::filesystem::path& path, std::size_t line,
                          std::size_t column, const std::string& what) {
    std::ostringstream msg;
    msg << path.string() << ": line " << line << ", column " << column << ": "
        << what;
    return CsvError(msg.str());
}

inline std::vector<CsvRow> parse_csv(const std::string& text,
                                     const std::filesystem::path& path) {
    std::vector<CsvRow> rows;
    CsvRow row;
    std::string field;
    bool in_quotes = false;
    bool row_dirty = false;
    std::size_t line = 1, column = 1;
    std::size_t row_line = 1;
    std::size_t i = 0;
    // Tolerate a UTF-8 byte-order mark from foreign producers.
    if (text.size() >= 3 && text.compare(0, 3, "\xef\xbb\xbf") == 0) i = 3;

    auto end_field = [&] {
        row.fields.push_back(std::move(field));
        field.clear();
        row_dirty = true;
    };
    auto end_row = [&] {
        end_field();
        row.line = row_line;
        rows.push_back(std::move(row));
        row = CsvRow{};
        row_dirty = false;
        row_line = line;
    };

    for (; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                    column += 2;
                } else {
                    in_quotes = false;
                    ++column;
                }
            } else {
                field += c;
                if (c == '\n') {
                    ++line;
                    column = 1;
                } else {
                    ++column;
                }
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty())
                    throw csv_error(path, line, column,
                                    "quote inside unquoted field");
                in_quotes = true;
                ++column;
                break;
            case ',':
                end_field();
                ++column;
                break;
            case '\r':
                ++column;
                break; // paired with the \n that follows
            case '\n':
                ++line;
                column = 1;
                end_row();
                row_line = line;
                break;
            default:
                field += c;
                ++column;
                break;
        }
    }
    if (in_quotes)
        throw csv_error(path, line, column, "unterminated quoted field");
    if (!field.empty() || row_dirty) end_row();
    return rows;
}

inline std::vector<ArgValue> decode_args(const std::string& cell,
                                         const std::filesystem::path& path,
                                         std::size_t line) {
    std::vector<ArgValue> args;
    if (cell.empty()) return args;
    std::vector<std::string> parts;
    std::string part;
    for (std::size_t i = 0; i < cell.size(); ++i) {
        char c = cell[i];
        if (c == '\\' && i + 1 < cell.size()) {
            part += cell[++i];
        } else if (c == '|') {
            parts.push_back(std::move(part));
            part.clear();
        } else {
            part += c;
        }
    }
    parts.push_back(std::move(part));
    for (const std::string& p : parts) {
        auto eq = p.find('=');
        if (eq == std::string::npos)
            throw csv_error(path, line, 9, "argument entry without '=': " + p);
        auto kind = arg_kind_from_name(p.substr(0, eq));
        if (!kind)
            throw csv_error(path, line, 9,
                            "unknown argument kind: " + p.substr(0, eq));
        ArgValue v;
        v.kind = *kind;
        v.display = p.substr(eq + 1);
        if (v.kind == ArgValue::Kind::MemberVar) {
            auto dot = v.display.rfind('.');
            v.object = dot == std::string::npos ? v.display
                                                : v.display.substr(0, dot);
        }
        args.push_back(std::move(v));
    }
    return args;
}

inline void write_file_atomically(const std::filesystem::path& path,
                                  const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out)
            throw std::runtime_error("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec)
        throw std::runtime_error("cannot rename " + tmp.string() + " to " +
                                 path.string() + ": " + ec.message());
}

} // namespace detail

/// Sorted, deduplication-free canonical ordering: calls by
/// (file, caller_scope, seq), defs by (file, class, name), warnings
/// rebuilt from fact warnings. read_facts returns results in this form.
inline ExtractionResult canonical(ExtractionResult result) {
    std::stable_sort(result.facts.begin(), result.facts.end(),
                     [](const CallFact& a, const CallFact& b) {
                         return std::tie(a.file, a.caller_scope, a.seq) <
                                std::tie(b.file, b.caller_scope, b.seq);
                     });
    std::stable_sort(result.defs.begin(), result.defs.end(),
                     [](const FunctionDef& a, const FunctionDef& b) {
                         return std::tie(a.file, a.class_name, a.name) <
                                std::tie(b.file, b.class_name, b.name);
                     });
    result.warnings.clear();
    for (const CallFact& f : result.facts)
        if (!f.warning.empty()) result.warnings.push_back(f.warning);
    return result;
}

/// Writes calls.csv and defs.csv under out_dir. Deterministic: identical
/// results produce byte-identical files. Throws std::runtime_error on
/// I/O failure; never leaves partial files behind.
inline FactFilePair write_facts(const ExtractionResult& result,
                                const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    ExtractionResult sorted = canonical(result);

    std::string calls(kCallsHeader);
    calls += '\n';
    for (const CallFact& f : sorted.facts) {
        calls += detail::csv_quote(f.file);
        calls += ',';
        calls += detail::csv_quote(f.caller_scope);
        calls += ',';
        calls += detail::csv_quote(f.caller_class);
        calls += ',';
        calls += std::to_string(f.seq);
        calls += ',';
        calls += detail::csv_quote(f.callee);
        calls += ',';
        calls += detail::csv_quote(f.receiver_class);
        calls += ',';
        calls += std::string(receiver_kind_name(f.receiver_kind));
        calls += ',';
        calls += std::to_string(f.args.size());
        calls += ',';
        calls += detail::csv_quote(detail::encode_args(f.args));
        calls += ',';
        calls += detail::csv_quote(f.warning);
        calls += '\n';
    }

    std::string defs(kDefsHeader);
    defs += '\n';
    for (const FunctionDef& d : sorted.defs) {
        defs += detail::csv_quote(d.file);
        defs += ',';
        defs += detail::csv_quote(d.name);
        defs += ',';
        defs += detail::csv_quote(d.class_name);
        defs += ',';
        defs += (d.kind == FunctionDef::Kind::Member ? "member" : "free");
        defs += '\n';
    }

    FactFilePair pair{out_dir / "calls.csv", out_dir / "defs.csv"};
    detail::write_file_atomically(pair.calls_path, calls);
    detail::write_file_atomically(pair.defs_path, defs);
    return pair;
}

/// Reads a calls/defs pair back into an ExtractionResult (canonical
/// ordering). Throws std::runtime_error naming file, line, and column on
/// malformed input.
inline ExtractionResult read_facts(const FactFilePair& pair) {
    auto slurp = [](const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw std::runtime_error("cannot open " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };

    ExtractionResult result;

    std::vector<detail::CsvRow> rows =
        detail::parse_csv(slurp(pair.calls_path), pair.calls_path);
    if (rows.empty())
        throw detail::csv_error(pair.calls_path, 1, 1, "missing header");
    {
        std::ostringstream joined;
        for (std::size_t i = 0; i < rows[0].fields.size(); ++i)
            joined << (i ? "," : "") << rows[0].fields[i];
        if (joined.str() != kCallsHeader)
            throw detail::csv_error(pair.calls_path, rows[0].line, 1,
                                    "unexpected header: " + joined.str());
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const detail::CsvRow& row = rows[r];
        if (row.fields.size() != 10)
            throw detail::csv_error(
                pair.calls_path, row.line, 1,
                "expected 10 columns, got " + std::to_string(row.fields.size()));
        CallFact f;
        f.file = row.fields[0];
        f.caller_scope = row.fields[1];
        f.caller_class = row.fields[2];
        try {
            std::size_t used = 0;
            f.seq = std::stoi(row.fields[3], &used);
            if (used != row.fields[3].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw detail::csv_error(pair.calls_path, row.line, 4,
                                    "seq is not an integer: " + row.fields[3]);
        }
        f.callee = row.fields[4];
        f.receiver_class = row.fields[5];
        auto kind = receiver_kind_from_name(row.fields[6]);
        if (!kind)
            throw detail::csv_error(pair.calls_path, row.line, 7,
                                    "unknown receiver kind: " + row.fields[6]);
        f.receiver_kind = *kind;
        f.args = detail::decode_args(row.fields[8], pair.calls_path, row.line);
        std::size_t declared = 0;
        try {
            declared = static_cast<std::size_t>(std::stoul(row.fields[7]));
        } catch (const std::exception&) {
            throw detail::csv_error(pair.calls_path, row.line, 8,
                                    "arg_count is not an integer: " +
                                        row.fields[7]);
        }
        if (declared != f.args.size())
            throw detail::csv_error(
                pair.calls_path, row.line, 8,
                "arg_count " + row.fields[7] + " does not match " +
                    std::to_string(f.args.size()) + " parsed arguments");
        f.warning = row.fields[9];
        result.facts.push_back(std::move(f));
    }

    rows = detail::parse_csv(slurp(pair.defs_path), pair.defs_path);
    if (rows.empty())
        throw detail::csv_error(pair.defs_path, 1, 1, "missing header");
    {
        std::ostringstream joined;
        for (std::size_t i = 0; i < rows[0].fields.size(); ++i)
            joined << (i ? "," : "") << rows[0].fields[i];
        if (joined.str() != kDefsHeader)
            throw detail::csv_error(pair.defs_path, rows[0].line, 1,
                                    "unexpected header: " + joined.str());
    }
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const detail::CsvRow& row = rows[r];
        if (row.fields.size() != 4)
            throw detail::csv_error(
                pair.defs_path, row.line, 1,
                "expected 4 columns, got " + std::to_string(row.fields.size()));
        FunctionDef d;
        d.file = row.fields[0];
        d.name = row.fields[1];
        d.class_name = row.fields[2];
        if (row.fields[3] == "member") d.kind = FunctionDef::Kind::Member;
        else if (row.fields[3] == "free") d.kind = FunctionDef::Kind::Free;
        else
            throw detail::csv_error(pair.defs_path, row.line, 4,
                                    "unknown def kind: " + row.fields[3]);
        if ((d.kind == FunctionDef::Kind::Member) == d.class_name.empty())
            throw detail::csv_error(pair.defs_path, row.line, 3,
                                    "kind does not match class column");
        result.defs.push_back(std::move(d));
    }

    for (const CallFact& f : result.facts)
        if (!f.warning.empty()) result.warnings.push_back(f.warning);
    return result;
}

} // namespace islet
