#include "robusteval/pyval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace robusteval::pyval {

std::string_view type_name(Type t) {
    switch (t) {
        case Type::None: return "NoneType";
        case Type::Bool: return "bool";
        case Type::Int: return "int";
        case Type::Float: return "float";
        case Type::Str: return "str";
        case Type::Bytes: return "bytes";
        case Type::List: return "list";
        case Type::Tuple: return "tuple";
        case Type::Dict: return "dict";
        case Type::Set: return "set";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Construction

Value Value::boolean(bool b) {
    Value v;
    v.type_ = Type::Bool;
    v.b_ = b;
    return v;
}

Value Value::integer(std::int64_t i) {
    Value v;
    v.type_ = Type::Int;
    v.i_ = i;
    return v;
}

Value Value::big_integer(std::string digits) {
    bool neg = !digits.empty() && digits[0] == '-';
    std::string mag = neg ? digits.substr(1) : digits;
    size_t nz = mag.find_first_not_of('0');
    mag = (nz == std::string::npos) ? "0" : mag.substr(nz);
    if (mag == "0") neg = false;

    // Collapse to a machine int when it fits.
    if (mag.size() <= 19) {
        errno = 0;
        std::string text = (neg ? "-" : "") + mag;
        char* end = nullptr;
        long long parsed = std::strtoll(text.c_str(), &end, 10);
        if (errno == 0 && end && *end == '\0') return integer(parsed);
    }
    Value v;
    v.type_ = Type::Int;
    v.big_ = (neg ? "-" : "") + mag;
    return v;
}

Value Value::floating(double d) {
    Value v;
    v.type_ = Type::Float;
    v.f_ = d;
    return v;
}

Value Value::str(std::string utf8) {
    Value v;
    v.type_ = Type::Str;
    v.s_ = std::move(utf8);
    return v;
}

Value Value::bytes(std::string raw) {
    Value v;
    v.type_ = Type::Bytes;
    v.s_ = std::move(raw);
    return v;
}

Value Value::list(ValueVec items) {
    Value v;
    v.type_ = Type::List;
    v.items_ = std::move(items);
    return v;
}

Value Value::tuple(ValueVec items) {
    Value v;
    v.type_ = Type::Tuple;
    v.items_ = std::move(items);
    return v;
}

static bool sort_key_less(const Value& a, const Value& b) {
    auto ta = type_name(a.type()), tb = type_name(b.type());
    if (ta != tb) return ta < tb;
    return a.repr() < b.repr();
}

Value Value::dict(DictEntries entries) {
    // Python literal semantics: later duplicate keys overwrite earlier
    // values while the first key object is kept. Keys collide under ==,
    // which coerces across numeric types.
    DictEntries dedup;
    for (auto& [k, val] : entries) {
        bool merged = false;
        for (auto& [ek, ev] : dedup) {
            if (ek.equals_lenient(k)) {
                ev = val;
                merged = true;
                break;
            }
        }
        if (!merged) dedup.emplace_back(k, val);
    }
    std::stable_sort(dedup.begin(), dedup.end(),
                     [](const auto& x, const auto& y) { return sort_key_less(x.first, y.first); });
    Value v;
    v.type_ = Type::Dict;
    v.entries_ = std::move(dedup);
    return v;
}

Value Value::set(ValueVec items) {
    ValueVec dedup;
    for (auto& x : items) {
        bool seen = false;
        for (auto& e : dedup) {
            if (e.equals_lenient(x)) {
                seen = true;
                break;
            }
        }
        if (!seen) dedup.push_back(x);
    }
    std::stable_sort(dedup.begin(), dedup.end(), sort_key_less);
    Value v;
    v.type_ = Type::Set;
    v.items_ = std::move(dedup);
    return v;
}

// ---------------------------------------------------------------------------
// Repr

std::string float_repr(double d) {
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d < 0 ? "-inf" : "inf";

    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), d, std::chars_format::scientific);
    std::string sci(buf, res.ptr);

    bool neg = false;
    size_t pos = 0;
    if (sci[0] == '-') {
        neg = true;
        pos = 1;
    }
    size_t epos = sci.find('e', pos);
    std::string mant = sci.substr(pos, epos - pos);
    int exp10 = std::atoi(sci.c_str() + epos + 1);

    std::string digits;
    for (char c : mant)
        if (c != '.') digits.push_back(c);

    std::string out;
    // CPython's repr: fixed notation for 1e-4 <= |v| < 1e16, else scientific.
    if (exp10 >= -4 && exp10 < 16) {
        if (exp10 >= 0) {
            size_t ip = static_cast<size_t>(exp10) + 1;
            if (digits.size() <= ip) {
                out = digits + std::string(ip - digits.size(), '0') + ".0";
            } else {
                out = digits.substr(0, ip) + "." + digits.substr(ip);
            }
        } else {
            out = "0." + std::string(static_cast<size_t>(-exp10) - 1, '0') + digits;
        }
    } else {
        out = digits.substr(0, 1);
        if (digits.size() > 1) out += "." + digits.substr(1);
        out += "e";
        out += (exp10 < 0) ? '-' : '+';
        std::string e = std::to_string(std::abs(exp10));
        if (e.size() < 2) e = "0" + e;
        out += e;
    }
    return neg ? "-" + out : out;
}

static void escape_common(std::string& out, unsigned char c, char quote) {
    switch (c) {
        case '\\': out += "\\\\"; return;
        case '\n': out += "\\n"; return;
        case '\r': out += "\\r"; return;
        case '\t': out += "\\t"; return;
        default: break;
    }
    if (c == static_cast<unsigned char>(quote)) {
        out += '\\';
        out += quote;
        return;
    }
    char hex[8];
    std::snprintf(hex, sizeof(hex), "\\x%02x", c);
    out += hex;
}

static char pick_quote(const std::string& s) {
    if (s.find('\'') != std::string::npos && s.find('"') == std::string::npos) return '"';
    return '\'';
}

static std::string str_repr(const std::string& s) {
    char q = pick_quote(s);
    std::string out(1, q);
    for (unsigned char c : s) {
        if (c < 0x20 || c == 0x7f || c == '\\' || c == static_cast<unsigned char>(q)) {
            escape_common(out, c, q);
        } else {
            out += static_cast<char>(c);  // non-ASCII UTF-8 kept verbatim
        }
    }
    out += q;
    return out;
}

static std::string bytes_repr(const std::string& s) {
    char q = pick_quote(s);
    std::string out = "b";
    out += q;
    for (unsigned char c : s) {
        if (c < 0x20 || c >= 0x7f || c == '\\' || c == static_cast<unsigned char>(q)) {
            escape_common(out, c, q);
        } else {
            out += static_cast<char>(c);
        }
    }
    out += q;
    return out;
}

std::string Value::repr() const {
    switch (type_) {
        case Type::None: return "None";
        case Type::Bool: return b_ ? "True" : "False";
        case Type::Int: return big_.empty() ? std::to_string(i_) : big_;
        case Type::Float: return float_repr(f_);
        case Type::Str: return str_repr(s_);
        case Type::Bytes: return bytes_repr(s_);
        case Type::List: {
            std::string out = "[";
            for (size_t i = 0; i < items_.size(); ++i) {
                if (i) out += ", ";
                out += items_[i].repr();
            }
            return out + "]";
        }
        case Type::Tuple: {
            if (items_.empty()) return "()";
            if (items_.size() == 1) return "(" + items_[0].repr() + ",)";
            std::string out = "(";
            for (size_t i = 0; i < items_.size(); ++i) {
                if (i) out += ", ";
                out += items_[i].repr();
            }
            return out + ")";
        }
        case Type::Dict: {
            std::string out = "{";
            for (size_t i = 0; i < entries_.size(); ++i) {
                if (i) out += ", ";
                out += entries_[i].first.repr() + ": " + entries_[i].second.repr();
            }
            return out + "}";
        }
        case Type::Set: {
            if (items_.empty()) return "set()";
            std::string out = "{";
            for (size_t i = 0; i < items_.size(); ++i) {
                if (i) out += ", ";
                out += items_[i].repr();
            }
            return out + "}";
        }
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Equality

static std::string int_digits(const Value& v) {
    return v.is_big_int() ? v.big_digits() : std::to_string(v.as_int());
}

bool Value::equals_strict(const Value& other) const {
    if (type_ != other.type_) return false;
    switch (type_) {
        case Type::None: return true;
        case Type::Bool: return b_ == other.b_;
        case Type::Int: return int_digits(*this) == int_digits(other);
        case Type::Float:
            if (std::isnan(f_) && std::isnan(other.f_)) return true;
            return f_ == other.f_;
        case Type::Str:
        case Type::Bytes: return s_ == other.s_;
        case Type::List:
        case Type::Tuple:
        case Type::Set: {
            if (items_.size() != other.items_.size()) return false;
            for (size_t i = 0; i < items_.size(); ++i)
                if (!items_[i].equals_strict(other.items_[i])) return false;
            return true;
        }
        case Type::Dict: {
            if (entries_.size() != other.entries_.size()) return false;
            for (size_t i = 0; i < entries_.size(); ++i) {
                if (!entries_[i].first.equals_strict(other.entries_[i].first)) return false;
                if (!entries_[i].second.equals_strict(other.entries_[i].second)) return false;
            }
            return true;
        }
    }
    return false;
}

static bool is_numeric(Type t) {
    return t == Type::Bool || t == Type::Int || t == Type::Float;
}

// Exact integer text of an integral double, e.g. 1e3 -> "1000".
static std::optional<std::string> integral_float_digits(double f) {
    if (!std::isfinite(f) || std::floor(f) != f) return std::nullopt;
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%.0f", f);
    std::string s(buf);
    if (s == "-0") s = "0";
    return s;
}

bool Value::equals_lenient(const Value& other) const {
    if (is_numeric(type_) && is_numeric(other.type_)) {
        auto digits = [](const Value& v) -> std::optional<std::string> {
            switch (v.type()) {
                case Type::Bool: return std::string(v.as_bool() ? "1" : "0");
                case Type::Int: return int_digits(v);
                case Type::Float: return integral_float_digits(v.as_float());
                default: return std::nullopt;
            }
        };
        if (type_ == Type::Float && other.type_ == Type::Float) return equals_strict(other);
        if (type_ == Type::Float || other.type_ == Type::Float) {
            auto a = digits(*this), b = digits(other);
            return a && b && *a == *b;
        }
        return *digits(*this) == *digits(other);
    }
    if (type_ != other.type_) return false;
    switch (type_) {
        case Type::List:
        case Type::Tuple:
        case Type::Set: {
            if (items_.size() != other.items_.size()) return false;
            for (size_t i = 0; i < items_.size(); ++i)
                if (!items_[i].equals_lenient(other.items_[i])) return false;
            return true;
        }
        case Type::Dict: {
            if (entries_.size() != other.entries_.size()) return false;
            for (size_t i = 0; i < entries_.size(); ++i) {
                if (!entries_[i].first.equals_lenient(other.entries_[i].first)) return false;
                if (!entries_[i].second.equals_lenient(other.entries_[i].second)) return false;
            }
            return true;
        }
        default: return equals_strict(other);
    }
}

// ---------------------------------------------------------------------------
// Tokenizer for the literal grammar

namespace {

enum class Tok { Num, Str, Name, Punct, End };

struct Token {
    Tok kind = Tok::End;
    std::string text;    // punct/op text or name
    std::string payload; // decoded string payload
    bool is_bytes = false;
    bool is_float = false;
};

struct Lexer {
    std::string_view src;
    size_t pos = 0;
    std::string error;

    bool fail(const std::string& msg) {
        if (error.empty()) error = msg;
        return false;
    }

    void skip_ws() {
        while (pos < src.size()) {
            char c = src[pos];
            if (c == '#') {
                while (pos < src.size() && src[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++pos;
            } else {
                break;
            }
        }
    }

    bool lex_string(Token& t, std::string_view prefix) {
        bool raw = false, is_bytes = false, is_fstr = false;
        for (char c : prefix) {
            char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (l == 'r') raw = true;
            else if (l == 'b') is_bytes = true;
            else if (l == 'f') is_fstr = true;
            else if (l == 'u') {}
            else return fail("bad string prefix");
        }
        char quote = src[pos];
        bool triple = src.substr(pos, 3) == std::string(3, quote);
        pos += triple ? 3 : 1;
        std::string out;
        while (true) {
            if (pos >= src.size()) return fail("unterminated string");
            char c = src[pos];
            if (!triple && (c == '\n')) return fail("newline in string");
            if (c == quote && (!triple || src.substr(pos, 3) == std::string(3, quote))) {
                pos += triple ? 3 : 1;
                break;
            }
            if (c == '\\' && !raw) {
                ++pos;
                if (pos >= src.size()) return fail("dangling escape");
                char e = src[pos++];
                switch (e) {
                    case 'n': out += '\n'; break;
                    case 't': out += '\t'; break;
                    case 'r': out += '\r'; break;
                    case '\\': out += '\\'; break;
                    case '\'': out += '\''; break;
                    case '"': out += '"'; break;
                    case 'a': out += '\a'; break;
                    case 'b': out += '\b'; break;
                    case 'f': out += '\f'; break;
                    case 'v': out += '\v'; break;
                    case '0': out += '\0'; break;
                    case '\n': break;  // line continuation
                    case 'x': {
                        if (pos + 1 >= src.size()) return fail("bad \\x escape");
                        auto hexv = [](char h) -> int {
                            if (h >= '0' && h <= '9') return h - '0';
                            if (h >= 'a' && h <= 'f') return h - 'a' + 10;
                            if (h >= 'A' && h <= 'F') return h - 'A' + 10;
                            return -1;
                        };
                        int hi = hexv(src[pos]), lo = hexv(src[pos + 1]);
                        if (hi < 0 || lo < 0) return fail("bad \\x escape");
                        out += static_cast<char>(hi * 16 + lo);
                        pos += 2;
                        break;
                    }
                    case 'u':
                    case 'U': {
                        if (is_bytes) {  // not an escape in bytes literals
                            out += '\\';
                            out += e;
                            break;
                        }
                        size_t n = (e == 'u') ? 4 : 8;
                        if (pos + n > src.size()) return fail("bad unicode escape");
                        unsigned long cp = 0;
                        for (size_t i = 0; i < n; ++i) {
                            char h = src[pos + i];
                            int v = (h >= '0' && h <= '9')   ? h - '0'
                                    : (h >= 'a' && h <= 'f') ? h - 'a' + 10
                                    : (h >= 'A' && h <= 'F') ? h - 'A' + 10
                                                             : -1;
                            if (v < 0) return fail("bad unicode escape");
                            cp = cp * 16 + static_cast<unsigned long>(v);
                        }
                        pos += n;
                        // UTF-8 encode
                        if (cp < 0x80) {
                            out += static_cast<char>(cp);
                        } else if (cp < 0x800) {
                            out += static_cast<char>(0xc0 | (cp >> 6));
                            out += static_cast<char>(0x80 | (cp & 0x3f));
                        } else if (cp < 0x10000) {
                            out += static_cast<char>(0xe0 | (cp >> 12));
                            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
                            out += static_cast<char>(0x80 | (cp & 0x3f));
                        } else if (cp < 0x110000) {
                            out += static_cast<char>(0xf0 | (cp >> 18));
                            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3f));
                            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3f));
                            out += static_cast<char>(0x80 | (cp & 0x3f));
                        } else {
                            return fail("unicode escape out of range");
                        }
                        break;
                    }
                    default:
                        // Python keeps unknown escapes verbatim.
                        out += '\\';
                        out += e;
                        break;
                }
            } else {
                out += c;
                ++pos;
            }
        }
        if (is_fstr) {
            // Only constant f-strings qualify as literals.
            std::string folded;
            for (size_t i = 0; i < out.size(); ++i) {
                if (out[i] == '{' || out[i] == '}') {
                    if (i + 1 < out.size() && out[i + 1] == out[i]) {
                        folded += out[i];
                        ++i;
                    } else {
                        return fail("f-string with interpolation is not a literal");
                    }
                } else {
                    folded += out[i];
                }
            }
            out = folded;
        }
        t.kind = Tok::Str;
        t.is_bytes = is_bytes;
        t.payload = std::move(out);
        return true;
    }

    bool next(Token& t) {
        skip_ws();
        t = Token{};
        if (pos >= src.size()) {
            t.kind = Tok::End;
            return true;
        }
        char c = src[pos];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = pos;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                ++pos;
            std::string name(src.substr(start, pos - start));
            if (pos < src.size() && (src[pos] == '\'' || src[pos] == '"') && name.size() <= 2) {
                return lex_string(t, name);
            }
            t.kind = Tok::Name;
            t.text = std::move(name);
            return true;
        }
        if (c == '\'' || c == '"') return lex_string(t, "");
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && pos + 1 < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[pos + 1])))) {
            size_t start = pos;
            bool is_float = false;
            if (c == '0' && pos + 1 < src.size() &&
                (src[pos + 1] == 'x' || src[pos + 1] == 'X' || src[pos + 1] == 'o' ||
                 src[pos + 1] == 'O' || src[pos + 1] == 'b' || src[pos + 1] == 'B')) {
                pos += 2;
                while (pos < src.size() &&
                       (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                    ++pos;
            } else {
                while (pos < src.size() &&
                       (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                    ++pos;
                if (pos < src.size() && src[pos] == '.') {
                    is_float = true;
                    ++pos;
                    while (pos < src.size() &&
                           (std::isdigit(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
                        ++pos;
                }
                if (pos < src.size() && (src[pos] == 'e' || src[pos] == 'E')) {
                    size_t save = pos;
                    ++pos;
                    if (pos < src.size() && (src[pos] == '+' || src[pos] == '-')) ++pos;
                    if (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) {
                        is_float = true;
                        while (pos < src.size() &&
                               std::isdigit(static_cast<unsigned char>(src[pos])))
                            ++pos;
                    } else {
                        pos = save;
                    }
                }
            }
            t.kind = Tok::Num;
            t.is_float = is_float;
            t.text = std::string(src.substr(start, pos - start));
            return true;
        }
        // Multi-char operators first.
        for (std::string_view op : {"**", "//"}) {
            if (src.substr(pos, 2) == op) {
                t.kind = Tok::Punct;
                t.text = std::string(op);
                pos += 2;
                return true;
            }
        }
        if (std::strchr("+-*/%(),[]{}:", c)) {
            t.kind = Tok::Punct;
            t.text = std::string(1, c);
            ++pos;
            return true;
        }
        return fail(std::string("unexpected character '") + c + "'");
    }
};

// ---------------------------------------------------------------------------
// Recursive-descent parser with constant folding

struct Parser {
    Lexer lex;
    Token cur;
    std::string error;

    explicit Parser(std::string_view text) { lex.src = text; }

    bool fail(const std::string& msg) {
        if (error.empty()) error = msg;
        return false;
    }

    bool advance() {
        if (!lex.next(cur)) return fail(lex.error);
        return true;
    }

    bool accept_punct(std::string_view p) {
        if (cur.kind == Tok::Punct && cur.text == p) return advance();
        return false;
    }

    bool expect_punct(std::string_view p) {
        if (cur.kind == Tok::Punct && cur.text == p) return advance();
        return fail("expected '" + std::string(p) + "'");
    }

    std::optional<Value> parse_number(const Token& t) {
        std::string text;
        for (char c : t.text)
            if (c != '_') text += c;
        if (t.is_float) {
            errno = 0;
            char* end = nullptr;
            double d = std::strtod(text.c_str(), &end);
            if (end != text.c_str() + text.size()) {
                fail("bad float literal");
                return std::nullopt;
            }
            return Value::floating(d);
        }
        int base = 10;
        std::string digits = text;
        if (text.size() > 2 && text[0] == '0') {
            char b = static_cast<char>(std::tolower(static_cast<unsigned char>(text[1])));
            if (b == 'x') base = 16, digits = text.substr(2);
            else if (b == 'o') base = 8, digits = text.substr(2);
            else if (b == 'b') base = 2, digits = text.substr(2);
        }
        errno = 0;
        char* end = nullptr;
        long long v = std::strtoll(digits.c_str(), &end, base);
        if (end != digits.c_str() + digits.size() || digits.empty()) {
            fail("bad int literal");
            return std::nullopt;
        }
        if (errno == ERANGE) {
            if (base != 10) {
                fail("non-decimal literal out of range");
                return std::nullopt;
            }
            return Value::big_integer(digits);
        }
        return Value::integer(v);
    }

    // Arithmetic helpers; nullopt = fold failure (unparseable prediction).
    static std::optional<double> as_double(const Value& v) {
        switch (v.type()) {
            case Type::Bool: return v.as_bool() ? 1.0 : 0.0;
            case Type::Int:
                if (v.is_big_int()) return std::nullopt;
                return static_cast<double>(v.as_int());
            case Type::Float: return v.as_float();
            default: return std::nullopt;
        }
    }

    static std::optional<std::int64_t> as_small_int(const Value& v) {
        if (v.type() == Type::Bool) return v.as_bool() ? 1 : 0;
        if (v.type() == Type::Int && !v.is_big_int()) return v.as_int();
        return std::nullopt;
    }

    std::optional<Value> fold_binary(const std::string& op, const Value& a, const Value& b) {
        Type ta = a.type(), tb = b.type();
        bool nums = is_numeric(ta) && is_numeric(tb);
        if (nums) {
            bool anyf = ta == Type::Float || tb == Type::Float;
            if (op == "/") anyf = true;
            if (anyf) {
                auto x = as_double(a), y = as_double(b);
                if (!x || !y) return fold_fail("big integer arithmetic");
                if (op == "+") return Value::floating(*x + *y);
                if (op == "-") return Value::floating(*x - *y);
                if (op == "*") return Value::floating(*x * *y);
                if (op == "/") {
                    if (*y == 0.0) return fold_fail("division by zero");
                    return Value::floating(*x / *y);
                }
                if (op == "//") {
                    if (*y == 0.0) return fold_fail("division by zero");
                    return Value::floating(std::floor(*x / *y));
                }
                if (op == "%") {
                    if (*y == 0.0) return fold_fail("modulo by zero");
                    double r = std::fmod(*x, *y);
                    if (r != 0.0 && ((r < 0) != (*y < 0))) r += *y;
                    return Value::floating(r);
                }
                if (op == "**") {
                    if (*x == 0.0 && *y < 0) return fold_fail("zero to negative power");
                    return Value::floating(std::pow(*x, *y));
                }
            }
            auto x = as_small_int(a), y = as_small_int(b);
            if (!x || !y) return fold_fail("big integer arithmetic");
            std::int64_t r = 0;
            if (op == "+") {
                if (__builtin_add_overflow(*x, *y, &r)) return fold_fail("overflow");
                return Value::integer(r);
            }
            if (op == "-") {
                if (__builtin_sub_overflow(*x, *y, &r)) return fold_fail("overflow");
                return Value::integer(r);
            }
            if (op == "*") {
                if (__builtin_mul_overflow(*x, *y, &r)) return fold_fail("overflow");
                return Value::integer(r);
            }
            if (op == "//" || op == "%") {
                if (*y == 0) return fold_fail("division by zero");
                if (*x == INT64_MIN && *y == -1) return fold_fail("overflow");
                std::int64_t q = *x / *y;
                if ((*x % *y != 0) && ((*x < 0) != (*y < 0))) --q;
                if (op == "//") return Value::integer(q);
                return Value::integer(*x - q * *y);
            }
            if (op == "**") {
                if (*y < 0) {
                    if (*x == 0) return fold_fail("zero to negative power");
                    return Value::floating(std::pow(static_cast<double>(*x),
                                                    static_cast<double>(*y)));
                }
                std::int64_t base = *x, acc = 1;
                for (std::int64_t i = 0; i < *y; ++i)
                    if (__builtin_mul_overflow(acc, base, &acc)) return fold_fail("overflow");
                return Value::integer(acc);
            }
        }
        if (op == "+") {
            if (ta == Type::Str && tb == Type::Str)
                return Value::str(a.text() + b.text());
            if (ta == Type::Bytes && tb == Type::Bytes)
                return Value::bytes(a.text() + b.text());
            if ((ta == Type::List && tb == Type::List) ||
                (ta == Type::Tuple && tb == Type::Tuple)) {
                ValueVec items = a.items();
                items.insert(items.end(), b.items().begin(), b.items().end());
                return ta == Type::List ? Value::list(std::move(items))
                                        : Value::tuple(std::move(items));
            }
        }
        if (op == "*") {
            const Value* seq = nullptr;
            const Value* num = nullptr;
            if (is_numeric(ta)) num = &a, seq = &b;
            else if (is_numeric(tb)) num = &b, seq = &a;
            if (seq && num && num->type() != Type::Float) {
                auto n = as_small_int(*num);
                if (!n) return fold_fail("big repetition count");
                std::int64_t count = std::max<std::int64_t>(0, *n);
                Type ts = seq->type();
                auto unit = (ts == Type::Str || ts == Type::Bytes) ? seq->text().size()
                                                                   : seq->items().size();
                if (static_cast<std::uint64_t>(count) * std::max<size_t>(unit, 1) > 1000000)
                    return fold_fail("repetition too large");
                if (ts == Type::Str || ts == Type::Bytes) {
                    std::string out;
                    for (std::int64_t i = 0; i < count; ++i) out += seq->text();
                    return ts == Type::Str ? Value::str(out) : Value::bytes(out);
                }
                if (ts == Type::List || ts == Type::Tuple) {
                    ValueVec out;
                    for (std::int64_t i = 0; i < count; ++i)
                        out.insert(out.end(), seq->items().begin(), seq->items().end());
                    return ts == Type::List ? Value::list(std::move(out))
                                            : Value::tuple(std::move(out));
                }
            }
        }
        return fold_fail("unsupported operand types for '" + op + "'");
    }

    std::optional<Value> fold_fail(const std::string& msg) {
        fail(msg);
        return std::nullopt;
    }

    std::optional<Value> parse_expr() { return parse_addsub(); }

    std::optional<Value> parse_addsub() {
        auto left = parse_muldiv();
        if (!left) return std::nullopt;
        while (cur.kind == Tok::Punct && (cur.text == "+" || cur.text == "-")) {
            std::string op = cur.text;
            if (!advance()) return std::nullopt;
            auto right = parse_muldiv();
            if (!right) return std::nullopt;
            left = fold_binary(op, *left, *right);
            if (!left) return std::nullopt;
        }
        return left;
    }

    std::optional<Value> parse_muldiv() {
        auto left = parse_unary();
        if (!left) return std::nullopt;
        while (cur.kind == Tok::Punct &&
               (cur.text == "*" || cur.text == "/" || cur.text == "//" || cur.text == "%")) {
            std::string op = cur.text;
            if (!advance()) return std::nullopt;
            auto right = parse_unary();
            if (!right) return std::nullopt;
            left = fold_binary(op, *left, *right);
            if (!left) return std::nullopt;
        }
        return left;
    }

    std::optional<Value> parse_unary() {
        if (cur.kind == Tok::Punct && (cur.text == "+" || cur.text == "-")) {
            bool neg = cur.text == "-";
            if (!advance()) return std::nullopt;
            auto v = parse_unary();
            if (!v) return std::nullopt;
            if (!neg) {
                if (v->type() == Type::Bool) return Value::integer(v->as_bool() ? 1 : 0);
                if (is_numeric(v->type())) return v;
                return fold_fail("bad operand for unary +");
            }
            switch (v->type()) {
                case Type::Bool: return Value::integer(v->as_bool() ? -1 : 0);
                case Type::Int:
                    if (v->is_big_int()) {
                        const std::string& d = v->big_digits();
                        return Value::big_integer(d[0] == '-' ? d.substr(1) : "-" + d);
                    }
                    if (v->as_int() == INT64_MIN) return fold_fail("overflow");
                    return Value::integer(-v->as_int());
                case Type::Float: return Value::floating(-v->as_float());
                default: return fold_fail("bad operand for unary -");
            }
        }
        return parse_power();
    }

    std::optional<Value> parse_power() {
        auto base = parse_atom();
        if (!base) return std::nullopt;
        if (cur.kind == Tok::Punct && cur.text == "**") {
            if (!advance()) return std::nullopt;
            auto exp = parse_unary();  // right-assoc; unary binds into the exponent
            if (!exp) return std::nullopt;
            return fold_binary("**", *base, *exp);
        }
        return base;
    }

    std::optional<Value> parse_strings(Token first) {
        bool is_bytes = first.is_bytes;
        std::string payload = first.payload;
        if (!advance()) return std::nullopt;
        while (cur.kind == Tok::Str) {
            if (cur.is_bytes != is_bytes) return fold_fail("cannot mix str and bytes");
            payload += cur.payload;
            if (!advance()) return std::nullopt;
        }
        return is_bytes ? Value::bytes(payload) : Value::str(payload);
    }

    std::optional<Value> parse_atom() {
        if (cur.kind == Tok::Num) {
            Token t = cur;
            if (!advance()) return std::nullopt;
            return parse_number(t);
        }
        if (cur.kind == Tok::Str) return parse_strings(cur);
        if (cur.kind == Tok::Name) {
            std::string name = cur.text;
            if (!advance()) return std::nullopt;
            if (name == "None") return Value::none();
            if (name == "True") return Value::boolean(true);
            if (name == "False") return Value::boolean(false);
            if (name == "inf") return Value::floating(HUGE_VAL);
            if (name == "nan") return Value::floating(NAN);
            if (name == "set") {
                if (!expect_punct("(")) return std::nullopt;
                if (!expect_punct(")")) return std::nullopt;
                return Value::set({});
            }
            return fold_fail("name '" + name + "' is not a literal");
        }
        if (accept_punct("[")) {
            ValueVec items;
            if (!accept_punct("]")) {
                while (true) {
                    auto v = parse_expr();
                    if (!v) return std::nullopt;
                    items.push_back(std::move(*v));
                    if (accept_punct(",")) {
                        if (accept_punct("]")) break;
                        continue;
                    }
                    if (!expect_punct("]")) return std::nullopt;
                    break;
                }
            }
            return Value::list(std::move(items));
        }
        if (accept_punct("(")) {
            if (accept_punct(")")) return Value::tuple({});
            auto first = parse_expr();
            if (!first) return std::nullopt;
            if (accept_punct(")")) return first;  // grouping
            ValueVec items;
            items.push_back(std::move(*first));
            while (accept_punct(",")) {
                if (accept_punct(")")) return Value::tuple(std::move(items));
                auto v = parse_expr();
                if (!v) return std::nullopt;
                items.push_back(std::move(*v));
            }
            if (!expect_punct(")")) return std::nullopt;
            return Value::tuple(std::move(items));
        }
        if (accept_punct("{")) {
            if (accept_punct("}")) return Value::dict({});
            auto first = parse_expr();
            if (!first) return std::nullopt;
            if (accept_punct(":")) {
                auto hashable = [](const Value& v) {
                    Type t = v.type();
                    return t != Type::List && t != Type::Dict && t != Type::Set;
                };
                if (!hashable(*first)) return fold_fail("unhashable dict key");
                DictEntries entries;
                auto val = parse_expr();
                if (!val) return std::nullopt;
                entries.emplace_back(std::move(*first), std::move(*val));
                while (accept_punct(",")) {
                    if (accept_punct("}")) return Value::dict(std::move(entries));
                    auto k = parse_expr();
                    if (!k) return std::nullopt;
                    if (!hashable(*k)) return fold_fail("unhashable dict key");
                    if (!expect_punct(":")) return std::nullopt;
                    auto v = parse_expr();
                    if (!v) return std::nullopt;
                    entries.emplace_back(std::move(*k), std::move(*v));
                }
                if (!expect_punct("}")) return std::nullopt;
                return Value::dict(std::move(entries));
            }
            ValueVec items;
            auto hashable = [](const Value& v) {
                Type t = v.type();
                return t != Type::List && t != Type::Dict && t != Type::Set;
            };
            if (!hashable(*first)) return fold_fail("unhashable set element");
            items.push_back(std::move(*first));
            while (accept_punct(",")) {
                if (accept_punct("}")) return Value::set(std::move(items));
                auto v = parse_expr();
                if (!v) return std::nullopt;
                if (!hashable(*v)) return fold_fail("unhashable set element");
                items.push_back(std::move(*v));
            }
            if (!expect_punct("}")) return std::nullopt;
            return Value::set(std::move(items));
        }
        return fold_fail("expected a literal");
    }
};

}  // namespace

std::optional<Value> parse_literal(std::string_view text, std::string* error) {
    Parser p(text);
    if (!p.advance()) {
        if (error) *error = p.error;
        return std::nullopt;
    }
    auto v = p.parse_expr();
    if (v && p.cur.kind != Tok::End) {
        p.fail("trailing content after literal");
        v = std::nullopt;
    }
    if (!v && error) *error = p.error.empty() ? "parse error" : p.error;
    return v;
}

std::optional<ValueVec> parse_args(std::string_view text, std::string* error) {
    Parser p(text);
    if (!p.advance()) {
        if (error) *error = p.error;
        return std::nullopt;
    }
    ValueVec args;
    while (true) {
        auto v = p.parse_expr();
        if (!v) {
            if (error) *error = p.error.empty() ? "parse error" : p.error;
            return std::nullopt;
        }
        args.push_back(std::move(*v));
        if (p.cur.kind == Tok::End) break;
        if (!p.accept_punct(",")) {
            if (error) *error = "expected ',' between arguments";
            return std::nullopt;
        }
        if (p.cur.kind == Tok::End) break;  // trailing comma
    }
    return args;
}

std::string args_repr(const ValueVec& args) {
    std::string out;
    for (size_t i = 0; i < args.size(); ++i) {
        if (i) out += ", ";
        out += args[i].repr();
    }
    return out;
}

std::optional<std::string> normalize_literal(std::string_view text) {
    auto v = parse_literal(text);
    if (!v) return std::nullopt;
    return v->repr();
}

std::optional<std::string> normalize_args(std::string_view text) {
    auto v = parse_args(text);
    if (!v) return std::nullopt;
    return args_repr(*v);
}

}  // namespace robusteval::pyval
