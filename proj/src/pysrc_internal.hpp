#pragma once

#include <string>
#include <vector>

#include "robusteval/pysrc.hpp"

namespace robusteval::pysrc {

enum class TokKind {
    Name,
    Keyword,
    Number,
    String,
    Op,
    Newline,
    Indent,
    Dedent,
    End,
};

struct Tok {
    TokKind kind = TokKind::End;
    std::string text;      // name/keyword/op text, or number verbatim
    int line = 1;
    int col = 1;
    size_t offset = 0;     // byte offset of the token start

    // String-token details.
    std::string str_prefix;
    char str_quote = '\'';
    bool str_triple = false;
    std::string str_body;     // raw body
    size_t str_body_offset = 0;
};

// Tokenizes a whole module; throws ParseError. The final tokens are
// Newline (if pending), balancing Dedents, then End.
std::vector<Tok> tokenize(std::string_view source);

}  // namespace robusteval::pysrc
