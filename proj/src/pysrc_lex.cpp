#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "pysrc_internal.hpp"

namespace robusteval::pysrc {

namespace {

const std::unordered_set<std::string>& keyword_set() {
    static const std::unordered_set<std::string> kws = {
        "False", "None",   "True",   "and",    "as",     "assert", "async",
        "await", "break",  "class",  "continue", "def",  "del",    "elif",
        "else",  "except", "finally", "for",   "from",   "global", "if",
        "import", "in",    "is",     "lambda", "nonlocal", "not",  "or",
        "pass",  "raise",  "return", "try",    "while",  "with",   "yield",
    };
    return kws;
}

// dir(builtins) of a stock interpreter, minus dunder module attributes.
const std::unordered_set<std::string>& builtin_set() {
    static const std::unordered_set<std::string> names = {
        "ArithmeticError", "AssertionError", "AttributeError", "BaseException",
        "BaseExceptionGroup", "BlockingIOError", "BrokenPipeError", "BufferError",
        "BytesWarning", "ChildProcessError", "ConnectionAbortedError",
        "ConnectionError", "ConnectionRefusedError", "ConnectionResetError",
        "DeprecationWarning", "EOFError", "EncodingWarning", "EnvironmentError",
        "Exception", "ExceptionGroup", "FileExistsError", "FileNotFoundError",
        "FloatingPointError", "FutureWarning", "GeneratorExit", "IOError",
        "ImportError", "ImportWarning", "IndentationError", "IndexError",
        "InterruptedError", "IsADirectoryError", "KeyError", "KeyboardInterrupt",
        "LookupError", "MemoryError", "ModuleNotFoundError", "NameError",
        "NotADirectoryError", "NotImplemented", "NotImplementedError", "OSError",
        "OverflowError", "PendingDeprecationWarning", "PermissionError",
        "ProcessLookupError", "RecursionError", "ReferenceError", "ResourceWarning",
        "RuntimeError", "RuntimeWarning", "StopAsyncIteration", "StopIteration",
        "SyntaxError", "SyntaxWarning", "SystemError", "SystemExit", "TabError",
        "TimeoutError", "TypeError", "UnboundLocalError", "UnicodeDecodeError",
        "UnicodeEncodeError", "UnicodeError", "UnicodeTranslateError",
        "UnicodeWarning", "UserWarning", "ValueError", "Warning",
        "ZeroDivisionError", "abs", "aiter", "all", "anext", "any", "ascii",
        "bin", "bool", "breakpoint", "bytearray", "bytes", "callable", "chr",
        "classmethod", "compile", "complex", "copyright", "credits", "delattr",
        "dict", "dir", "divmod", "enumerate", "eval", "exec", "exit", "filter",
        "float", "format", "frozenset", "getattr", "globals", "hasattr", "hash",
        "help", "hex", "id", "input", "int", "isinstance", "issubclass", "iter",
        "len", "license", "list", "locals", "map", "max", "memoryview", "min",
        "next", "object", "oct", "open", "ord", "pow", "print", "property",
        "quit", "range", "repr", "reversed", "round", "set", "setattr", "slice",
        "sorted", "staticmethod", "str", "sum", "super", "tuple", "type", "vars",
        "zip",
    };
    return names;
}

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_ident_cont(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
}

bool is_string_prefix(const std::string& s) {
    if (s.size() > 2) return false;
    std::string l;
    for (char c : s) l += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    static const std::array<const char*, 9> valid = {"", "r", "b", "u", "f",
                                                     "rb", "br", "fr", "rf"};
    return std::find(valid.begin(), valid.end(), l) != valid.end();
}

struct LexState {
    std::string_view src;
    size_t pos = 0;
    int line = 1;
    int col = 1;
    int paren_depth = 0;
    std::vector<int> indents{0};
    std::vector<Tok> out;
    bool at_line_start = true;
    bool emitted_on_line = false;

    [[noreturn]] void err(const std::string& msg) { throw ParseError(msg, line, col); }

    char peek(size_t ahead = 0) const {
        return pos + ahead < src.size() ? src[pos + ahead] : '\0';
    }

    void bump() {
        if (pos < src.size()) {
            if (src[pos] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++pos;
        }
    }

    void push(TokKind k, std::string text, size_t offset) {
        Tok t;
        t.kind = k;
        t.text = std::move(text);
        t.line = line;
        t.col = col;
        t.offset = offset;
        out.push_back(std::move(t));
        if (k != TokKind::Newline && k != TokKind::Indent && k != TokKind::Dedent)
            emitted_on_line = true;
    }

    void handle_indent() {
        // Measure leading whitespace of a fresh logical line; skip blank and
        // comment-only lines entirely.
        while (true) {
            size_t start = pos;
            int width = 0;
            while (pos < src.size() && (src[pos] == ' ' || src[pos] == '\t')) {
                width = (src[pos] == '\t') ? (width / 8 + 1) * 8 : width + 1;
                bump();
            }
            if (pos >= src.size()) return;
            if (src[pos] == '\n') {
                bump();
                continue;
            }
            if (src[pos] == '#') {
                while (pos < src.size() && src[pos] != '\n') bump();
                continue;
            }
            if (src[pos] == '\r') {
                bump();
                continue;
            }
            (void)start;
            if (width > indents.back()) {
                indents.push_back(width);
                push(TokKind::Indent, "", pos);
            } else {
                while (width < indents.back()) {
                    indents.pop_back();
                    push(TokKind::Dedent, "", pos);
                }
                if (width != indents.back()) err("inconsistent dedent");
            }
            return;
        }
    }

    void lex_string(const std::string& prefix, size_t tok_offset) {
        bool raw = false;
        for (char c : prefix) {
            char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (l == 'r') raw = true;
        }
        char quote = peek();
        bool triple = peek(1) == quote && peek(2) == quote;
        bump();
        if (triple) {
            bump();
            bump();
        }
        size_t body_start = pos;
        std::string body;
        while (true) {
            if (pos >= src.size()) err("unterminated string literal");
            char c = peek();
            if (!triple && c == '\n') err("newline inside string literal");
            if (c == quote) {
                if (!triple) {
                    bump();
                    break;
                }
                if (peek(1) == quote && peek(2) == quote) {
                    bump();
                    bump();
                    bump();
                    break;
                }
                body += c;
                bump();
                continue;
            }
            if (c == '\\') {
                // Keep escapes raw; they matter to the printer only as text.
                body += c;
                bump();
                if (pos >= src.size()) err("dangling escape");
                body += peek();
                bump();
                continue;
            }
            body += c;
            bump();
        }
        (void)raw;
        Tok t;
        t.kind = TokKind::String;
        t.line = line;
        t.col = col;
        t.offset = tok_offset;
        t.str_prefix = prefix;
        t.str_quote = quote;
        t.str_triple = triple;
        t.str_body = std::move(body);
        t.str_body_offset = body_start;
        out.push_back(std::move(t));
        emitted_on_line = true;
    }

    void lex_number(size_t tok_offset) {
        size_t start = pos;
        if (peek() == '0' && (peek(1) == 'x' || peek(1) == 'X' || peek(1) == 'o' ||
                              peek(1) == 'O' || peek(1) == 'b' || peek(1) == 'B')) {
            bump();
            bump();
            while (is_ident_cont(peek())) bump();
        } else {
            while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') bump();
            if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
                bump();
                while (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '_') bump();
            } else if (peek() == '.' && !is_ident_start(peek(1))) {
                bump();  // "1." form
            }
            if (peek() == 'e' || peek() == 'E') {
                size_t save = pos;
                int save_line = line, save_col = col;
                bump();
                if (peek() == '+' || peek() == '-') bump();
                if (std::isdigit(static_cast<unsigned char>(peek()))) {
                    while (std::isdigit(static_cast<unsigned char>(peek()))) bump();
                } else {
                    pos = save;
                    line = save_line;
                    col = save_col;
                }
            }
            if (peek() == 'j' || peek() == 'J') err("imaginary literals unsupported");
        }
        push(TokKind::Number, std::string(src.substr(start, pos - start)), tok_offset);
    }

    void run() {
        while (pos < src.size()) {
            if (at_line_start && paren_depth == 0) {
                at_line_start = false;
                emitted_on_line = false;
                handle_indent();
                if (pos >= src.size()) break;
            }
            char c = peek();
            if (c == '\n') {
                bump();
                if (paren_depth == 0) {
                    if (emitted_on_line) push(TokKind::Newline, "", pos);
                    at_line_start = true;
                }
                continue;
            }
            if (c == ' ' || c == '\t' || c == '\r') {
                bump();
                continue;
            }
            if (c == '#') {
                while (pos < src.size() && peek() != '\n') bump();
                continue;
            }
            if (c == '\\' && peek(1) == '\n') {
                bump();
                bump();
                continue;
            }
            size_t tok_offset = pos;
            if (is_ident_start(c)) {
                size_t start = pos;
                while (is_ident_cont(peek())) bump();
                std::string word(src.substr(start, pos - start));
                if ((peek() == '\'' || peek() == '"') && is_string_prefix(word)) {
                    lex_string(word, tok_offset);
                    continue;
                }
                if (keyword_set().count(word)) {
                    if (word == "async" || word == "await" || word == "class")
                        err("'" + word + "' is outside the supported grammar");
                    push(TokKind::Keyword, word, tok_offset);
                } else {
                    push(TokKind::Name, word, tok_offset);
                }
                continue;
            }
            if (c == '\'' || c == '"') {
                lex_string("", tok_offset);
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
                lex_number(tok_offset);
                continue;
            }
            static const char* multi3[] = {"**=", "//=", ">>=", "<<=", "..."};
            static const char* multi2[] = {"**", "//", ">>", "<<", "<=", ">=", "==",
                                           "!=", "->", ":=", "+=", "-=", "*=", "/=",
                                           "%=", "&=", "|=", "^=", "@="};
            bool matched = false;
            for (const char* op : multi3) {
                if (src.substr(pos, 3) == op) {
                    push(TokKind::Op, op, tok_offset);
                    bump();
                    bump();
                    bump();
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            for (const char* op : multi2) {
                if (src.substr(pos, 2) == op) {
                    push(TokKind::Op, op, tok_offset);
                    bump();
                    bump();
                    matched = true;
                    break;
                }
            }
            if (matched) continue;
            if (std::strchr("+-*/%@&|^~<>()[]{},:.;=", c)) {
                if (c == '(' || c == '[' || c == '{') ++paren_depth;
                if (c == ')' || c == ']' || c == '}') {
                    if (paren_depth == 0) err("unbalanced bracket");
                    --paren_depth;
                }
                push(TokKind::Op, std::string(1, c), tok_offset);
                bump();
                continue;
            }
            err(std::string("unexpected character '") + c + "'");
        }
        if (emitted_on_line) push(TokKind::Newline, "", pos);
        while (indents.size() > 1) {
            indents.pop_back();
            push(TokKind::Dedent, "", pos);
        }
        push(TokKind::End, "", pos);
    }
};

}  // namespace

std::vector<Tok> tokenize(std::string_view source) {
    LexState st;
    st.src = source;
    st.run();
    return std::move(st.out);
}

bool is_keyword(std::string_view word) {
    return keyword_set().count(std::string(word)) > 0;
}

bool is_builtin_name(std::string_view word) {
    return builtin_set().count(std::string(word)) > 0;
}

}  // namespace robusteval::pysrc
