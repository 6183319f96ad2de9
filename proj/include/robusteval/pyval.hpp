#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace robusteval::pyval {

// Value universe of the restricted literal grammar: what benchmark inputs
// and outputs are made of. Integers wider than 64 bits are kept as
// normalized digit strings; they compare but do not fold.
enum class Type {
    None,
    Bool,
    Int,
    Float,
    Str,
    Bytes,
    List,
    Tuple,
    Dict,
    Set,
};

std::string_view type_name(Type t);  // matches Python's type(v).__name__

class Value;
using ValueVec = std::vector<Value>;
using DictEntries = std::vector<std::pair<Value, Value>>;

class Value {
public:
    Value() : type_(Type::None) {}

    static Value none() { return Value(); }
    static Value boolean(bool b);
    static Value integer(std::int64_t i);
    static Value big_integer(std::string normalized_digits);  // "-123...", no leading zeros
    static Value floating(double d);
    static Value str(std::string utf8);
    static Value bytes(std::string raw);
    static Value list(ValueVec items);
    static Value tuple(ValueVec items);
    static Value dict(DictEntries entries);
    static Value set(ValueVec items);

    Type type() const { return type_; }
    bool is_big_int() const { return type_ == Type::Int && !big_.empty(); }

    bool as_bool() const { return b_; }
    std::int64_t as_int() const { return i_; }
    const std::string& big_digits() const { return big_; }
    double as_float() const { return f_; }
    const std::string& text() const { return s_; }  // Str payload (UTF-8) or Bytes payload
    const ValueVec& items() const { return items_; }
    ValueVec& items() { return items_; }
    const DictEntries& entries() const { return entries_; }
    DictEntries& entries() { return entries_; }

    // Canonical literal form: single-quoted strings, minimal float repr,
    // dict/set elements ordered by (type name, element repr). Injective on
    // the value universe, so repr equality is type-strict value equality.
    std::string repr() const;

    // Type-strict structural equality (True != 1, 1 != 1.0). NaN compares
    // equal to itself so that oracle round trips are stable.
    bool equals_strict(const Value& other) const;
    // Python-style ==: numeric cross-type coercion (1 == 1.0 == True).
    bool equals_lenient(const Value& other) const;

    bool operator==(const Value& other) const { return equals_strict(other); }

private:
    Type type_;
    bool b_ = false;
    std::int64_t i_ = 0;
    double f_ = 0.0;
    std::string s_;    // str/bytes payload
    std::string big_;  // big-int digits when i_ does not fit
    ValueVec items_;
    DictEntries entries_;
};

// Python-repr-compatible float formatting ('1.0', '1e+16', 'inf', '-0.0').
std::string float_repr(double d);

// Parse a single literal expression. Admits literals of the value universe
// plus constant folding of + - * / // % ** and unary +/- on literal
// operands; no names, no calls (except the empty-set spelling "set()").
// Returns nullopt and fills `error` on any parse or fold failure.
std::optional<Value> parse_literal(std::string_view text, std::string* error = nullptr);

// Parse a top-level comma-separated argument list ("[1, 2], 4" -> 2 args).
std::optional<ValueVec> parse_args(std::string_view text, std::string* error = nullptr);

// Canonical text for an argument tuple, "arg0, arg1, ...". Two input
// expressions denote the same input iff their normalized forms are equal.
std::string args_repr(const ValueVec& args);

// Convenience: parse then re-serialize. nullopt if the text does not parse.
std::optional<std::string> normalize_literal(std::string_view text);
std::optional<std::string> normalize_args(std::string_view text);

}  // namespace robusteval::pyval
