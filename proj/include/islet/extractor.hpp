// Call-fact extraction over the scanned token stream.
//
// A depth-keyed context stack tracks open class definitions, function
// definitions, and call expressions. Only land lines (lines carrying a
// keyword token) can change state; water lines are skipped outright, which
// is what makes the extraction insensitive to unknown node kinds.

#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "islet/lexer.hpp"
#include "islet/lexicon.hpp"
#include "islet/token.hpp"

namespace islet {

enum class ReceiverKind { None, ThisImplied, MemberVariable, NamedObject };

inline std::string_view receiver_kind_name(ReceiverKind kind) {
    switch (kind) {
        case ReceiverKind::None: return "none";
        case ReceiverKind::ThisImplied: return "this_implied";
        case ReceiverKind::MemberVariable: return "member_variable";
        case ReceiverKind::NamedObject: return "named_object";
    }
    return "none";
}

inline std::optional<ReceiverKind> receiver_kind_from_name(std::string_view name) {
    if (name == "none") return ReceiverKind::None;
    if (name == "this_implied") return ReceiverKind::ThisImplied;
    if (name == "member_variable") return ReceiverKind::MemberVariable;
    if (name == "named_object") return ReceiverKind::NamedObject;
    return std::nullopt;
}

// One classified call argument. `object` is filled for MemberVar only
// (the owning object as displayed, e.g. "this" for implied-this members).
struct ArgValue {
    enum class Kind {
        Variable,
        StringLit,
        NumberLit,
        Subscript,
        MemberVar,
        NestedCall,
        BinaryOp,
        UnaryOp,
    };
    Kind kind = Kind::Variable;
    std::string display;
    std::string object;

    friend bool operator==(const ArgValue&, const ArgValue&) = default;
};

inline std::string_view arg_kind_name(ArgValue::Kind kind) {
    switch (kind) {
        case ArgValue::Kind::Variable: return "Variable";
        case ArgValue::Kind::StringLit: return "StringLit";
        case ArgValue::Kind::NumberLit: return "NumberLit";
        case ArgValue::Kind::Subscript: return "Subscript";
        case ArgValue::Kind::MemberVar: return "MemberVar";
        case ArgValue::Kind::NestedCall: return "NestedCall";
        case ArgValue::Kind::BinaryOp: return "BinaryOp";
        case ArgValue::Kind::UnaryOp: return "UnaryOp";
    }
    return "Variable";
}

inline std::optional<ArgValue::Kind> arg_kind_from_name(std::string_view name) {
    static constexpr ArgValue::Kind kAll[] = {
        ArgValue::Kind::Variable,  ArgValue::Kind::StringLit,
        ArgValue::Kind::NumberLit, ArgValue::Kind::Subscript,
        ArgValue::Kind::MemberVar, ArgValue::Kind::NestedCall,
        ArgValue::Kind::BinaryOp,  ArgValue::Kind::UnaryOp,
    };
    for (auto k : kAll)
        if (arg_kind_name(k) == name) return k;
    return std::nullopt;
}

struct CallFact {
    std::string file;
    std::string caller_scope;          // enclosing function or "<toplevel>"
    std::string caller_class;          // empty outside member functions
    int seq = 0;                       // 0-based within (file, scope, class)
    std::string callee;
    std::string receiver_class;        // empty iff receiver_kind == None
    ReceiverKind receiver_kind = ReceiverKind::None;
    std::vector<ArgValue> args;
    std::string warning;

    friend bool operator==(const CallFact&, const CallFact&) = default;
};

struct FunctionDef {
    enum class Kind { Free, Member };
    std::string file;
    std::string name;
    std::string class_name;            // nonempty iff kind == Member
    Kind kind = Kind::Free;

    friend bool operator==(const FunctionDef&, const FunctionDef&) = default;
};

struct ExtractionResult {
    std::vector<CallFact> facts;
    std::vector<FunctionDef> defs;
    std::vector<std::string> warnings; // nonempty fact warnings, in fact order

    friend bool operator==(const ExtractionResult&, const ExtractionResult&) = default;
};

namespace detail {

inline bool is_loc_word(std::string_view w) {
    std::size_t i = 0;
    if (w.rfind("line", 0) == 0) i = 4;
    else if (w.rfind("col", 0) == 0) i = 3;
    else return false;
    if (i >= w.size() || w[i] != ':') return false;
    bool digits = false;
    for (; i < w.size(); ++i) {
        if (w[i] == ':') { digits = false; continue; }
        if (w[i] < '0' || w[i] > '9') return false;
        digits = true;
    }
    return digits;
}

inline bool is_numeric_word(std::string_view w) {
    bool digit = false;
    for (char c : w) {
        if (c >= '0' && c <= '9') digit = true;
        else if (c != '.') return false;
    }
    return digit;
}

// Attribute words the dump prints around names; never a name themselves.
inline bool is_noise_word(std::string_view w) {
    static const std::unordered_set<std::string_view> kNoise = {
        "lvalue", "rvalue", "xvalue", "prvalue", "used", "implicit",
        "referenced", "prev", "parent", "class", "struct", "union", "enum",
        "definition", "const", "volatile", "static", "virtual", "inline",
        "constexpr", "extern", "noexcept", "default", "delete", "pure",
        "trivial", "this", "postfix", "prefix", "selector", "instance",
        "invalid", "sloc", "cinit", "callinit", "listinit", "nrvo",
        "Var", "ParmVar", "Function", "CXXMethod", "Field", "EnumConstant",
        "ImplicitParam", "NonTypeTemplateParm", "depth", "index", "pack",
        "cannot", "overload", "adjusted", "part", "Text",
    };
    return kNoise.count(w) > 0;
}

inline bool is_name_word(std::string_view w) {
    return !w.empty() && !is_hex_id(w) && !is_loc_word(w) &&
           !is_numeric_word(w) && !is_noise_word(w);
}

// Last plausible name on the line; when `before_type` is set, only words
// left of the first type annotation count (node lines put trailing
// attribute words after the type).
inline std::string salient_name(const LineEvent& ev, bool before_type) {
    std::string name;
    for (const Token& t : ev.tokens) {
        if (t.cls == TokenClass::TypeText && before_type) break;
        if (t.cls == TokenClass::Word && is_name_word(t.lexeme)) name = t.lexeme;
    }
    if (name.empty() && before_type) return salient_name(ev, false);
    return name;
}

// Name of the referenced declaration: the word following a decl-kind
// marker (node ids in between are skipped).
inline std::string name_after_marker(const LineEvent& ev) {
    bool armed = false;
    for (const Token& t : ev.tokens) {
        if (t.cls != TokenClass::Word) continue;
        if (armed && !is_hex_id(t.lexeme)) return t.lexeme;
        if (is_decl_marker(t.lexeme)) armed = true;
    }
    return "";
}

inline std::string first_type_text(const LineEvent& ev) {
    for (const Token& t : ev.tokens)
        if (t.cls == TokenClass::TypeText) return t.lexeme;
    return "";
}

inline std::string last_type_text(const LineEvent& ev) {
    std::string text;
    for (const Token& t : ev.tokens)
        if (t.cls == TokenClass::TypeText) text = t.lexeme;
    return text;
}

inline std::string string_payload(const LineEvent& ev) {
    for (const Token& t : ev.tokens)
        if (t.cls == TokenClass::String && !t.lexeme.empty() && t.lexeme[0] == '"')
            return t.lexeme;
    return "";
}

inline bool is_builtin_type_name(std::string_view t) {
    static const std::unordered_set<std::string_view> kBuiltins = {
        "void", "bool", "char", "int", "long", "short", "float", "double",
        "signed", "unsigned", "wchar_t", "size_t", "auto", "char8_t",
        "char16_t", "char32_t",
    };
    return kBuiltins.count(t) > 0;
}

// Reduces a type annotation to the class name it mentions, or "" when it
// does not name a class: 'class DrawingAPI *' → DrawingAPI,
// 'vector<Contact>' → vector, '<bound member function type>' → "".
inline std::string class_of_type(std::string_view type) {
    std::vector<std::string_view> parts;
    std::size_t i = 0;
    while (i < type.size()) {
        while (i < type.size() && type[i] == ' ') ++i;
        std::size_t j = i;
        while (j < type.size() && type[j] != ' ') ++j;
        if (j > i) parts.push_back(type.substr(i, j - i));
        i = j;
    }
    std::string name;
    for (std::string_view p : parts) {
        if (p == "class" || p == "struct" || p == "union" || p == "enum" ||
            p == "const" || p == "volatile")
            continue;
        name = std::string(p);
        break;
    }
    while (!name.empty() && (name.back() == '*' || name.back() == '&' ||
                             name.back() == ' '))
        name.pop_back();
    if (auto lt = name.find('<'); lt != std::string::npos) {
        if (lt == 0) return "";
        name.resize(lt);
    }
    if (name.empty() || name.find('(') != std::string::npos) return "";
    for (char c : name) {
        bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
                  (c >= '0' && c <= '9') || c == '_' || c == ':' || c == '~';
        if (!ok) return "";
    }
    if (is_builtin_type_name(name)) return "";
    return name;
}

// One node of an argument subtree under construction. Children attach in
// dump order; arity() bounds how many operands each kind takes so sibling
// arguments at equal depth split correctly.
struct ArgNode {
    TokenClass cls = TokenClass::Word;
    int root_depth = 0;
    std::string text;    // name / literal / member, by kind
    std::string op;      // operator spelling for BINARY_OP / UNARY_OP
    bool postfix = false;
    std::string pending_render; // nested call display, filled when it closes
    std::vector<std::unique_ptr<ArgNode>> kids;

    std::size_t arity() const {
        switch (cls) {
            case TokenClass::Subscript:
            case TokenClass::BinaryOp: return 2;
            case TokenClass::UnaryOp:
            case TokenClass::MemberRef: return 1;
            default: return 0;
        }
    }
};

inline std::unique_ptr<ArgNode> make_arg_node(const LineEvent& ev, TokenClass cls) {
    auto node = std::make_unique<ArgNode>();
    node->cls = cls;
    node->root_depth = ev.depth;
    switch (cls) {
        case TokenClass::Argument: {
            node->text = name_after_marker(ev);
            if (node->text.empty()) node->text = salient_name(ev, true);
            break;
        }
        case TokenClass::ThisRef:
            node->text = "this";
            break;
        case TokenClass::String:
            node->text = string_payload(ev);
            break;
        case TokenClass::Number: {
            // The value is the line's final field. Floats print in
            // scientific notation ("3.500000e+00"), which the word
            // tokenizer would split at the sign, so read it from the raw
            // text instead.
            std::string_view raw = ev.raw;
            while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\t' ||
                                    raw.back() == '\r'))
                raw.remove_suffix(1);
            auto sp = raw.find_last_of(" \t");
            std::string_view last =
                sp == std::string_view::npos ? raw : raw.substr(sp + 1);
            if (!last.empty() && !is_hex_id(last) &&
                ((last[0] >= '0' && last[0] <= '9') || last[0] == '.'))
                node->text = std::string(last);
            if (node->text.empty())
                for (const Token& t : ev.tokens)
                    if (t.cls == TokenClass::Word && is_numeric_word(t.lexeme))
                        node->text = t.lexeme;
            break;
        }
        case TokenClass::MemberRef:
            node->text = salient_name(ev, false);
            break;
        case TokenClass::BinaryOp:
        case TokenClass::UnaryOp: {
            std::string op = last_type_text(ev);
            node->op = op;
            for (const Token& t : ev.tokens)
                if (t.cls == TokenClass::Word && t.lexeme == "postfix")
                    node->postfix = true;
            break;
        }
        default:
            break;
    }
    return node;
}

// Attaches a new node produced by `ev` somewhere on the rightmost spine of
// `node`, respecting depth and arity. Returns the created node, or null if
// the subtree cannot accept it (the caller then starts a fresh argument).
inline ArgNode* feed_arg(ArgNode& node, const LineEvent& ev, TokenClass cls) {
    if (ev.depth <= node.root_depth) return nullptr;
    if (!node.kids.empty())
        if (ArgNode* taken = feed_arg(*node.kids.back(), ev, cls)) return taken;
    if (node.kids.size() < node.arity()) {
        node.kids.push_back(make_arg_node(ev, cls));
        return node.kids.back().get();
    }
    return nullptr;
}

inline ArgValue render_arg(const ArgNode& node, std::vector<std::string>& warnings);

inline std::string child_display(const ArgNode& node, std::size_t i,
                                 std::vector<std::string>& warnings) {
    if (i < node.kids.size()) return render_arg(*node.kids[i], warnings).display;
    warnings.push_back("argument operand missing");
    return "<unknown>";
}

inline ArgValue render_arg(const ArgNode& node, std::vector<std::string>& warnings) {
    ArgValue value;
    switch (node.cls) {
        case TokenClass::Argument:
        case TokenClass::ThisRef:
            value.kind = ArgValue::Kind::Variable;
            value.display = node.text;
            break;
        case TokenClass::String:
            value.kind = ArgValue::Kind::StringLit;
            value.display = node.text;
            break;
        case TokenClass::Number:
            value.kind = ArgValue::Kind::NumberLit;
            value.display = node.text;
            break;
        case TokenClass::Subscript:
            value.kind = ArgValue::Kind::Subscript;
            value.display = child_display(node, 0, warnings) + "[" +
                            child_display(node, 1, warnings) + "]";
            break;
        case TokenClass::MemberRef: {
            value.kind = ArgValue::Kind::MemberVar;
            std::string member = node.text.empty() ? "<unknown>" : node.text;
            value.object = node.kids.empty()
                               ? "this"
                               : render_arg(*node.kids[0], warnings).display;
            value.display = value.object + "." + member;
            break;
        }
        case TokenClass::Call:
        case TokenClass::MemberCall:
            value.kind = ArgValue::Kind::NestedCall;
            value.display = node.pending_render;
            break;
        case TokenClass::BinaryOp:
            value.kind = ArgValue::Kind::BinaryOp;
            value.display = child_display(node, 0, warnings) + node.op +
                            child_display(node, 1, warnings);
            break;
        case TokenClass::UnaryOp: {
            value.kind = ArgValue::Kind::UnaryOp;
            std::string operand = child_display(node, 0, warnings);
            value.display = node.postfix ? operand + node.op : node.op + operand;
            break;
        }
        default:
            value.kind = ArgValue::Kind::Variable;
            break;
    }
    if (value.display.empty()) {
        value.display = "<unknown>";
        warnings.push_back("unclassifiable argument");
    }
    return value;
}

// The extraction state machine. Lives for one dump.
class Extractor {
public:
    Extractor(std::string file, const Lexicon& lex)
        : file_(std::move(file)), lex_(lex) {}

    ExtractionResult run(std::string_view dump) {
        for (const LineEvent& ev : scan_text(dump, lex_)) process(ev);
        while (!stack_.empty()) pop_frame();
        for (const CallFact& f : out_.facts)
            if (!f.warning.empty()) out_.warnings.push_back(f.warning);
        return std::move(out_);
    }

private:
    enum class FrameKind { Class, Func, Call };
    enum class ReceiverMode { NoReceiver, DepthRegion, FirstChild };

    struct Frame {
        FrameKind kind;
        int depth = 0;
        // Class / Func
        std::string name;
        std::string class_name;
        // Call
        std::size_t fact_index = 0;
        bool callee_set = false;
        bool args_started = false;
        int callee_line_depth = -1;
        // Root depth of the receiver expression (first land line below the
        // callee member line). Lines strictly deeper are receiver internals;
        // a land line at or above this depth starts the arguments.
        int region_root_depth = -1;
        ReceiverMode receiver_mode = ReceiverMode::NoReceiver;
        bool member_call = false;
        std::unique_ptr<ArgNode> open_arg;
        ArgNode* fill_slot = nullptr; // render target in the parent's arg tree
    };

    void process(const LineEvent& ev) {
        if (!ev.is_land()) return;
        while (!stack_.empty() && ev.depth <= stack_.back().depth) pop_frame();
        TokenClass cls = ev.land_token().cls;
        switch (cls) {
            case TokenClass::ClassDef:
                if (!in_call()) open_class(ev);
                break;
            case TokenClass::FuncDef:
            case TokenClass::MethodDef:
                if (!in_call()) open_func(ev);
                break;
            case TokenClass::Call:
            case TokenClass::MemberCall:
                open_call(ev, cls);
                break;
            default:
                if (in_call()) call_child(ev, cls);
                break;
        }
    }

    bool in_call() const {
        return !stack_.empty() && stack_.back().kind == FrameKind::Call;
    }

    Frame* innermost_func() {
        for (auto it = stack_.rbegin(); it != stack_.rend(); ++it)
            if (it->kind == FrameKind::Func) return &*it;
        return nullptr;
    }

    void open_class(const LineEvent& ev) {
        Frame f;
        f.kind = FrameKind::Class;
        f.depth = ev.depth;
        f.name = salient_name(ev, true);
        // Out-of-line method definitions refer back to their class through
        // its node id, so remember which id names which class.
        if (!f.name.empty())
            for (const Token& t : ev.tokens)
                if (t.cls == TokenClass::Word && is_hex_id(t.lexeme)) {
                    record_ids_[t.lexeme] = f.name;
                    break;
                }
        stack_.push_back(std::move(f));
    }

    // `CXXMethodDecl ... parent 0x<record id> prev ...` lines define a
    // method outside its class body; the class is the record the parent
    // id points at.
    std::string parent_record_class(const LineEvent& ev) const {
        for (std::size_t i = 0; i + 1 < ev.tokens.size(); ++i) {
            if (ev.tokens[i].cls != TokenClass::Word ||
                ev.tokens[i].lexeme != "parent")
                continue;
            const Token& id = ev.tokens[i + 1];
            if (id.cls != TokenClass::Word || !is_hex_id(id.lexeme)) continue;
            if (auto it = record_ids_.find(id.lexeme); it != record_ids_.end())
                return it->second;
        }
        return "";
    }

    void open_func(const LineEvent& ev) {
        std::string name = salient_name(ev, true);
        std::string class_name;
        if (auto sep = name.rfind("::"); sep != std::string::npos) {
            class_name = name.substr(0, sep);
            name = name.substr(sep + 2);
        } else {
            for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) {
                if (it->kind == FrameKind::Class) {
                    class_name = it->name;
                    break;
                }
            }
        }
        if (class_name.empty() &&
            ev.land_token().cls == TokenClass::MethodDef)
            class_name = parent_record_class(ev);
        if (!name.empty()) record_def(name, class_name);
        Frame f;
        f.kind = FrameKind::Func;
        f.depth = ev.depth;
        f.name = name.empty() ? "<anonymous>" : name;
        f.class_name = class_name;
        stack_.push_back(std::move(f));
    }

    void record_def(const std::string& name, const std::string& class_name) {
        std::string key = class_name + '\x1f' + name;
        if (!def_keys_.insert(key).second) return;
        FunctionDef def;
        def.file = file_;
        def.name = name;
        def.class_name = class_name;
        def.kind = class_name.empty() ? FunctionDef::Kind::Free
                                      : FunctionDef::Kind::Member;
        out_.defs.push_back(std::move(def));
    }

    void open_call(const LineEvent& ev, TokenClass cls) {
        // A call in a parent call's receiver position reveals the parent's
        // receiver class through its printed result type.
        if (in_call()) {
            Frame& parent = stack_.back();
            if (in_receiver_region(parent, ev)) {
                // Chained receiver: the inner call's printed result type
                // names the class the outer method belongs to.
                set_receiver(parent, class_of_type(first_type_text(ev)),
                             ReceiverKind::NamedObject);
                note_region_line(parent, ev);
            } else if (parent.callee_set) {
                begin_argument(parent, ev, cls);
            }
        }

        Frame f;
        f.kind = FrameKind::Call;
        f.depth = ev.depth;
        f.member_call = (cls == TokenClass::MemberCall);
        if (in_call() && stack_.back().open_arg) {
            // Argument position: the freshly added node renders later.
            ArgNode* spine = find_pending(stack_.back().open_arg.get());
            f.fill_slot = spine;
        }

        CallFact fact;
        fact.file = file_;
        if (Frame* fn = innermost_func()) {
            fact.caller_scope = fn->name;
            fact.caller_class = fn->class_name;
        } else {
            fact.caller_scope = "<toplevel>";
        }
        fact.seq = next_seq(fact.caller_class, fact.caller_scope);
        // Message-send style dumps name the callee on the call line itself.
        if (f.member_call) {
            std::string inline_name = salient_name(ev, false);
            if (!inline_name.empty()) {
                fact.callee = inline_name;
                f.callee_set = true;
                f.callee_line_depth = ev.depth;
                f.receiver_mode = ReceiverMode::FirstChild;
            }
        }
        f.fact_index = out_.facts.size();
        out_.facts.push_back(std::move(fact));
        stack_.push_back(std::move(f));
    }

    // The newest node with an unfilled nested-call render, rightmost spine.
    ArgNode* find_pending(ArgNode* node) {
        while (!node->kids.empty()) node = node->kids.back().get();
        return node;
    }

    bool in_receiver_region(const Frame& f, const LineEvent& ev) const {
        if (f.args_started) return false;
        if (f.receiver_mode == ReceiverMode::DepthRegion) {
            if (ev.depth <= f.callee_line_depth) return false;
            return f.region_root_depth < 0 || ev.depth > f.region_root_depth;
        }
        return f.receiver_mode == ReceiverMode::FirstChild;
    }

    void note_region_line(Frame& f, const LineEvent& ev) {
        if (f.receiver_mode == ReceiverMode::FirstChild)
            f.receiver_mode = ReceiverMode::NoReceiver;
        else if (f.region_root_depth < 0)
            f.region_root_depth = ev.depth;
    }

    void set_receiver(Frame& f, const std::string& cls, ReceiverKind kind) {
        CallFact& fact = out_.facts[f.fact_index];
        if (fact.receiver_kind != ReceiverKind::None || cls.empty()) return;
        fact.receiver_class = cls;
        fact.receiver_kind = kind;
    }

    void call_child(const LineEvent& ev, TokenClass cls) {
        Frame& f = stack_.back();
        CallFact& fact = out_.facts[f.fact_index];

        if (!f.callee_set && !f.args_started) {
            if (cls == TokenClass::MemberRef) {
                fact.callee = salient_name(ev, false);
                if (fact.callee.empty()) fact.callee = "<unresolved>";
                f.callee_set = true;
                f.callee_line_depth = ev.depth;
                f.receiver_mode = ReceiverMode::DepthRegion;
                return;
            }
            if (cls == TokenClass::Argument) {
                std::string name = name_after_marker(ev);
                if (name.empty()) name = salient_name(ev, true);
                bool is_function = false;
                for (const Token& t : ev.tokens)
                    if (t.cls == TokenClass::Word &&
                        (t.lexeme == "Function" || t.lexeme == "CXXMethod"))
                        is_function = true;
                if (is_function) {
                    fact.callee = name.empty() ? "<unresolved>" : name;
                } else {
                    fact.callee = "<unresolved>";
                    add_warning(fact, name.empty()
                                          ? "callee could not be resolved"
                                          : "call through variable '" + name +
                                                "' not resolved");
                }
                f.callee_set = true;
                f.callee_line_depth = ev.depth;
                return;
            }
            // Literal-like first child: no callee information ahead, fall
            // through to argument handling.
        }

        if (cls == TokenClass::ThisRef) {
            adopt_caller_class(f, class_of_type(first_type_text(ev)));
            if (in_receiver_region(f, ev)) {
                set_receiver(f, class_of_type(first_type_text(ev)),
                             ReceiverKind::ThisImplied);
                note_region_line(f, ev);
                return;
            }
        }

        if (in_receiver_region(f, ev)) {
            bool first_child_mode = f.receiver_mode == ReceiverMode::FirstChild;
            switch (cls) {
                case TokenClass::MemberRef:
                    set_receiver(f, class_of_type(first_type_text(ev)),
                                 ReceiverKind::MemberVariable);
                    note_region_line(f, ev);
                    return;
                case TokenClass::Argument:
                    set_receiver(f, class_of_type(first_type_text(ev)),
                                 ReceiverKind::NamedObject);
                    note_region_line(f, ev);
                    return;
                case TokenClass::Subscript:
                    // Element access: the printed element type is the class.
                    set_receiver(f, class_of_type(first_type_text(ev)),
                                 ReceiverKind::NamedObject);
                    note_region_line(f, ev);
                    return;
                default:
                    // Literals and operators carry no class. In a depth
                    // region they are receiver internals; as the sole
                    // message-send receiver slot they fall through to the
                    // arguments instead.
                    note_region_line(f, ev);
                    if (!first_child_mode) return;
                    break;
            }
        }

        begin_argument(f, ev, cls);
    }

    void begin_argument(Frame& f, const LineEvent& ev, TokenClass cls) {
        f.args_started = true;
        if (f.open_arg && feed_arg(*f.open_arg, ev, cls)) return;
        finalize_open_arg(f);
        f.open_arg = make_arg_node(ev, cls);
    }

    void finalize_open_arg(Frame& f) {
        if (!f.open_arg) return;
        CallFact& fact = out_.facts[f.fact_index];
        std::vector<std::string> warnings;
        fact.args.push_back(render_arg(*f.open_arg, warnings));
        for (const std::string& w : warnings) add_warning(fact, w);
        f.open_arg.reset();
    }

    // Out-of-line method bodies reveal their class only through a this
    // expression. Re-file the current group's facts under the class and
    // renumber so sequence values stay consecutive per group.
    void adopt_caller_class(Frame& call_frame, const std::string& cls) {
        if (cls.empty()) return;
        CallFact& anchor = out_.facts[call_frame.fact_index];
        if (!anchor.caller_class.empty()) return;
        std::string scope = anchor.caller_scope;
        int moved = 0;
        for (std::size_t i = call_frame.fact_index; i < out_.facts.size(); ++i) {
            CallFact& fact = out_.facts[i];
            if (fact.caller_scope != scope || !fact.caller_class.empty()) continue;
            fact.caller_class = cls;
            fact.seq = next_seq(cls, scope);
            ++moved;
        }
        seq_counters_[{std::string(), scope}] -= moved;
        if (Frame* fn = innermost_func())
            if (fn->name == scope && fn->class_name.empty())
                fn->class_name = cls;
    }

    int next_seq(const std::string& cls, const std::string& scope) {
        return seq_counters_[{cls, scope}]++;
    }

    static void add_warning(CallFact& fact, const std::string& message) {
        if (fact.warning.empty()) fact.warning = message;
        else fact.warning += "; " + message;
    }

    void pop_frame() {
        Frame f = std::move(stack_.back());
        stack_.pop_back();
        if (f.kind != FrameKind::Call) return;
        finalize_open_arg(f);
        CallFact& fact = out_.facts[f.fact_index];
        if (!f.callee_set && fact.callee.empty()) {
            fact.callee = "<unresolved>";
            add_warning(fact, "callee could not be resolved");
        }
        if (f.member_call && fact.receiver_kind == ReceiverKind::None)
            add_warning(fact, "receiver of '" + fact.callee + "' not resolved");
        if (f.fill_slot) f.fill_slot->pending_render = fact.callee + "(...)";
    }

    std::string file_;
    const Lexicon& lex_;
    ExtractionResult out_;
    std::vector<Frame> stack_;
    std::map<std::pair<std::string, std::string>, int> seq_counters_;
    std::unordered_set<std::string> def_keys_;
    std::unordered_map<std::string, std::string> record_ids_;
};

} // namespace detail

/// Extracts call facts and function definitions from one AST dump.
/// Total: any byte sequence yields a well-formed result.
inline ExtractionResult extract_facts(std::string_view dump, std::string_view file,
                                      const Lexicon& lexicon) {
    return detail::Extractor(std::string(file), lexicon).run(dump);
}

inline ExtractionResult extract_facts(std::string_view dump, std::string_view file,
                                      const LexiconTable& table) {
    Lexicon lexicon(table);
    return extract_facts(dump, file, lexicon);
}

} // namespace islet
