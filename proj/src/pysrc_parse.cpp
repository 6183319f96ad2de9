#include <cstring>

#include "pysrc_internal.hpp"

namespace robusteval::pysrc {

namespace {

struct Parser {
    std::vector<Tok> toks;
    size_t idx = 0;
    int last_content_line = 1;

    const Tok& cur() const { return toks[idx]; }
    const Tok& peek(size_t ahead = 1) const {
        size_t i = idx + ahead;
        return i < toks.size() ? toks[i] : toks.back();
    }

    [[noreturn]] void err(const std::string& msg) const {
        throw ParseError(msg, cur().line, cur().col);
    }

    void advance() {
        TokKind k = cur().kind;
        if (k != TokKind::Newline && k != TokKind::Indent && k != TokKind::Dedent &&
            k != TokKind::End)
            last_content_line = cur().line;
        if (idx + 1 < toks.size()) ++idx;
    }

    bool at_op(std::string_view t) const { return cur().kind == TokKind::Op && cur().text == t; }
    bool at_kw(std::string_view t) const {
        return cur().kind == TokKind::Keyword && cur().text == t;
    }

    bool accept_op(std::string_view t) {
        if (at_op(t)) {
            advance();
            return true;
        }
        return false;
    }

    bool accept_kw(std::string_view t) {
        if (at_kw(t)) {
            advance();
            return true;
        }
        return false;
    }

    void expect_op(std::string_view t) {
        if (!accept_op(t)) err("expected '" + std::string(t) + "'");
    }

    void expect_kw(std::string_view t) {
        if (!accept_kw(t)) err("expected '" + std::string(t) + "'");
    }

    void expect_newline() {
        if (cur().kind == TokKind::Newline) {
            advance();
            return;
        }
        if (cur().kind == TokKind::End) return;
        err("expected end of line");
    }

    NameSlot expect_name() {
        if (cur().kind != TokKind::Name) err("expected an identifier");
        NameSlot s{cur().text, cur().offset, false};
        advance();
        return s;
    }

    template <typename T>
    std::unique_ptr<T> make() {
        auto node = std::make_unique<T>();
        node->line = cur().line;
        return node;
    }

    // ----- expressions -------------------------------------------------

    ExprPtr parse_expression() {
        if (at_kw("lambda")) return parse_lambda();
        ExprPtr e = parse_ternary();
        if (at_op(":=")) {
            if (e->kind != ExprKind::Name) err("walrus target must be a name");
            auto w = std::make_unique<Walrus>();
            w->line = e->line;
            w->target = static_cast<Name*>(e.get())->slot;
            advance();
            w->value = parse_expression();
            return w;
        }
        return e;
    }

    ExprPtr parse_lambda() {
        auto lam = make<LambdaExpr>();
        expect_kw("lambda");
        if (!at_op(":")) lam->params = parse_params(false);
        expect_op(":");
        lam->body = parse_expression();
        return lam;
    }

    ExprPtr parse_ternary() {
        ExprPtr body = parse_or();
        if (at_kw("if")) {
            auto t = std::make_unique<Ternary>();
            t->line = body->line;
            advance();
            t->body = std::move(body);
            t->cond = parse_or();
            expect_kw("else");
            t->orelse = parse_expression();
            return t;
        }
        return body;
    }

    ExprPtr parse_or() {
        ExprPtr first = parse_and();
        if (!at_kw("or")) return first;
        auto node = std::make_unique<Bool>();
        node->line = first->line;
        node->op = BoolOpKind::Or;
        node->values.push_back(std::move(first));
        while (accept_kw("or")) node->values.push_back(parse_and());
        return node;
    }

    ExprPtr parse_and() {
        ExprPtr first = parse_not();
        if (!at_kw("and")) return first;
        auto node = std::make_unique<Bool>();
        node->line = first->line;
        node->op = BoolOpKind::And;
        node->values.push_back(std::move(first));
        while (accept_kw("and")) node->values.push_back(parse_not());
        return node;
    }

    ExprPtr parse_not() {
        if (at_kw("not")) {
            auto u = make<Unary>();
            advance();
            u->op = UnaryOp::Not;
            u->operand = parse_not();
            return u;
        }
        return parse_comparison();
    }

    ExprPtr parse_comparison() {
        ExprPtr first = parse_bitor();
        std::vector<std::pair<CmpOp, ExprPtr>> rest;
        while (true) {
            CmpOp op;
            if (at_op("<")) op = CmpOp::Lt;
            else if (at_op("<=")) op = CmpOp::Le;
            else if (at_op(">")) op = CmpOp::Gt;
            else if (at_op(">=")) op = CmpOp::Ge;
            else if (at_op("==")) op = CmpOp::Eq;
            else if (at_op("!=")) op = CmpOp::Ne;
            else if (at_kw("in")) op = CmpOp::In;
            else if (at_kw("not") && peek().kind == TokKind::Keyword && peek().text == "in") {
                advance();
                op = CmpOp::NotIn;
            } else if (at_kw("is")) {
                advance();
                if (accept_kw("not")) {
                    rest.emplace_back(CmpOp::IsNot, parse_bitor());
                } else {
                    rest.emplace_back(CmpOp::Is, parse_bitor());
                }
                continue;
            } else {
                break;
            }
            advance();
            rest.emplace_back(op, parse_bitor());
        }
        if (rest.empty()) return first;
        auto cmp = std::make_unique<Compare>();
        cmp->line = first->line;
        cmp->first = std::move(first);
        cmp->rest = std::move(rest);
        return cmp;
    }

    ExprPtr binary_level(ExprPtr (Parser::*next)(),
                         std::initializer_list<std::pair<const char*, BinaryOp>> ops) {
        ExprPtr left = (this->*next)();
        while (true) {
            bool matched = false;
            for (auto& [text, op] : ops) {
                if (at_op(text)) {
                    advance();
                    auto bin = std::make_unique<Binary>();
                    bin->line = left->line;
                    bin->op = op;
                    bin->left = std::move(left);
                    bin->right = (this->*next)();
                    left = std::move(bin);
                    matched = true;
                    break;
                }
            }
            if (!matched) return left;
        }
    }

    ExprPtr parse_bitor() { return binary_level(&Parser::parse_bitxor, {{"|", BinaryOp::BitOr}}); }
    ExprPtr parse_bitxor() { return binary_level(&Parser::parse_bitand, {{"^", BinaryOp::BitXor}}); }
    ExprPtr parse_bitand() { return binary_level(&Parser::parse_shift, {{"&", BinaryOp::BitAnd}}); }
    ExprPtr parse_shift() {
        return binary_level(&Parser::parse_arith,
                            {{"<<", BinaryOp::LShift}, {">>", BinaryOp::RShift}});
    }
    ExprPtr parse_arith() {
        return binary_level(&Parser::parse_term, {{"+", BinaryOp::Add}, {"-", BinaryOp::Sub}});
    }
    ExprPtr parse_term() {
        return binary_level(&Parser::parse_factor,
                            {{"*", BinaryOp::Mul},
                             {"/", BinaryOp::TrueDiv},
                             {"//", BinaryOp::FloorDiv},
                             {"%", BinaryOp::Mod},
                             {"@", BinaryOp::MatMul}});
    }

    ExprPtr parse_factor() {
        if (at_op("+") || at_op("-") || at_op("~")) {
            auto u = make<Unary>();
            u->op = at_op("+") ? UnaryOp::Pos : at_op("-") ? UnaryOp::Neg : UnaryOp::Invert;
            advance();
            u->operand = parse_factor();
            return u;
        }
        return parse_power();
    }

    ExprPtr parse_power() {
        ExprPtr base = parse_postfix();
        if (at_op("**")) {
            advance();
            auto bin = std::make_unique<Binary>();
            bin->line = base->line;
            bin->op = BinaryOp::Pow;
            bin->left = std::move(base);
            bin->right = parse_factor();
            return bin;
        }
        return base;
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_atom();
        while (true) {
            if (at_op("(")) {
                auto call = std::make_unique<CallExpr>();
                call->line = e->line;
                call->func = std::move(e);
                advance();
                parse_call_args(*call);
                e = std::move(call);
            } else if (at_op("[")) {
                auto sub = std::make_unique<Sub>();
                sub->line = e->line;
                sub->value = std::move(e);
                advance();
                sub->index = parse_subscript();
                expect_op("]");
                e = std::move(sub);
            } else if (at_op(".")) {
                advance();
                auto attr = std::make_unique<Attr>();
                attr->line = e->line;
                attr->value = std::move(e);
                if (cur().kind != TokKind::Name) err("expected attribute name");
                attr->attr = cur().text;
                advance();
                e = std::move(attr);
            } else {
                return e;
            }
        }
    }

    void parse_call_args(CallExpr& call) {
        if (accept_op(")")) return;
        bool first = true;
        while (true) {
            CallArg arg;
            if (accept_op("*")) {
                arg.stars = 1;
                arg.value = parse_expression();
            } else if (accept_op("**")) {
                arg.stars = 2;
                arg.value = parse_expression();
            } else if (cur().kind == TokKind::Name && peek().kind == TokKind::Op &&
                       peek().text == "=") {
                arg.keyword = NameSlot{cur().text, cur().offset, false};
                advance();
                advance();
                arg.value = parse_expression();
            } else {
                arg.value = parse_expression();
                if (first && at_kw("for")) {
                    // sole-argument generator expression: f(x for x in y)
                    auto gen = std::make_unique<Comp>();
                    gen->line = arg.value->line;
                    gen->comp = CompKind::Generator;
                    gen->element = std::move(arg.value);
                    gen->clauses = parse_comp_clauses();
                    arg.value = std::move(gen);
                    call.args.push_back(std::move(arg));
                    expect_op(")");
                    return;
                }
            }
            call.args.push_back(std::move(arg));
            first = false;
            if (accept_op(",")) {
                if (accept_op(")")) return;
                continue;
            }
            expect_op(")");
            return;
        }
    }

    ExprPtr parse_subscript() {
        auto slice_part = [&]() -> ExprPtr {
            if (at_op(":") || at_op("]")) return nullptr;
            return parse_expression();
        };
        ExprPtr lower = slice_part();
        if (at_op(":")) {
            auto sl = make<SliceExpr>();
            advance();
            sl->lower = std::move(lower);
            if (!at_op(":") && !at_op("]")) sl->upper = parse_expression();
            if (accept_op(":")) {
                if (!at_op("]")) sl->step = parse_expression();
            }
            return sl;
        }
        if (!lower) err("expected subscript");
        if (at_op(",")) {
            auto tup = std::make_unique<TupleDisplay>();
            tup->line = lower->line;
            tup->elements.push_back(std::move(lower));
            while (accept_op(",")) {
                if (at_op("]")) break;
                tup->elements.push_back(parse_expression());
            }
            return tup;
        }
        return lower;
    }

    std::vector<CompClause> parse_comp_clauses() {
        std::vector<CompClause> clauses;
        while (at_kw("for")) {
            advance();
            CompClause c;
            c.target = parse_target_list();
            expect_kw("in");
            c.iter = parse_or();  // no bare ternary/lambda in iter position
            while (at_kw("if")) {
                advance();
                c.ifs.push_back(parse_or());
            }
            clauses.push_back(std::move(c));
        }
        return clauses;
    }

    ExprPtr parse_star_or_expr() {
        if (at_op("*")) {
            auto st = make<Star>();
            advance();
            st->value = parse_or();
            return st;
        }
        return parse_expression();
    }

    ExprPtr parse_atom() {
        const Tok& t = cur();
        switch (t.kind) {
            case TokKind::Name: {
                auto n = make<Name>();
                n->slot = NameSlot{t.text, t.offset, false};
                advance();
                return n;
            }
            case TokKind::Number: {
                auto n = make<Number>();
                n->text = t.text;
                advance();
                return n;
            }
            case TokKind::String: return parse_string_like();
            case TokKind::Keyword: {
                if (t.text == "True" || t.text == "False" || t.text == "None") {
                    auto n = make<Name>();
                    n->slot = NameSlot{t.text, t.offset, false};
                    advance();
                    return n;
                }
                if (t.text == "lambda") return parse_lambda();
                if (t.text == "yield") {
                    auto y = make<YieldExpr>();
                    advance();
                    if (accept_kw("from")) {
                        y->is_from = true;
                        y->value = parse_expression();
                    } else if (!at_op(")") && !at_op("]") && !at_op("}") && !at_op(",") &&
                               cur().kind != TokKind::Newline) {
                        y->value = parse_expr_list();
                    }
                    return y;
                }
                err("unexpected keyword '" + t.text + "'");
            }
            case TokKind::Op: break;
            default: err("unexpected token");
        }

        if (at_op("(")) {
            int open_line = cur().line;
            advance();
            if (accept_op(")")) {
                auto tup = std::make_unique<TupleDisplay>();
                tup->line = open_line;
                return tup;
            }
            ExprPtr first = parse_star_or_expr();
            if (at_kw("for")) {
                auto gen = std::make_unique<Comp>();
                gen->line = open_line;
                gen->comp = CompKind::Generator;
                gen->element = std::move(first);
                gen->clauses = parse_comp_clauses();
                expect_op(")");
                return gen;
            }
            if (at_op(",")) {
                auto tup = std::make_unique<TupleDisplay>();
                tup->line = open_line;
                tup->elements.push_back(std::move(first));
                while (accept_op(",")) {
                    if (at_op(")")) break;
                    tup->elements.push_back(parse_star_or_expr());
                }
                expect_op(")");
                return tup;
            }
            expect_op(")");
            return first;
        }

        if (at_op("[")) {
            int open_line = cur().line;
            advance();
            auto lst = std::make_unique<ListDisplay>();
            lst->line = open_line;
            if (accept_op("]")) return lst;
            ExprPtr first = parse_star_or_expr();
            if (at_kw("for")) {
                auto comp = std::make_unique<Comp>();
                comp->line = open_line;
                comp->comp = CompKind::List;
                comp->element = std::move(first);
                comp->clauses = parse_comp_clauses();
                expect_op("]");
                return comp;
            }
            lst->elements.push_back(std::move(first));
            while (accept_op(",")) {
                if (at_op("]")) break;
                lst->elements.push_back(parse_star_or_expr());
            }
            expect_op("]");
            return lst;
        }

        if (at_op("{")) {
            int open_line = cur().line;
            advance();
            if (accept_op("}")) {
                auto d = std::make_unique<DictDisplay>();
                d->line = open_line;
                return d;
            }
            if (at_op("**")) {
                auto d = std::make_unique<DictDisplay>();
                d->line = open_line;
                parse_dict_items(*d, nullptr);
                return d;
            }
            ExprPtr first = parse_star_or_expr();
            if (accept_op(":")) {
                ExprPtr value = parse_expression();
                if (at_kw("for")) {
                    auto comp = std::make_unique<Comp>();
                    comp->line = open_line;
                    comp->comp = CompKind::Dict;
                    comp->element = std::move(first);
                    comp->value = std::move(value);
                    comp->clauses = parse_comp_clauses();
                    expect_op("}");
                    return comp;
                }
                auto d = std::make_unique<DictDisplay>();
                d->line = open_line;
                d->items.push_back(DictItem{std::move(first), std::move(value)});
                if (accept_op(",")) {
                    parse_dict_items(*d, nullptr);
                } else {
                    expect_op("}");
                }
                return d;
            }
            if (at_kw("for")) {
                auto comp = std::make_unique<Comp>();
                comp->line = open_line;
                comp->comp = CompKind::Set;
                comp->element = std::move(first);
                comp->clauses = parse_comp_clauses();
                expect_op("}");
                return comp;
            }
            auto s = std::make_unique<SetDisplay>();
            s->line = open_line;
            s->elements.push_back(std::move(first));
            while (accept_op(",")) {
                if (at_op("}")) break;
                s->elements.push_back(parse_star_or_expr());
            }
            expect_op("}");
            return s;
        }

        err("expected an expression");
    }

    void parse_dict_items(DictDisplay& d, ExprPtr /*unused*/) {
        while (!at_op("}")) {
            if (accept_op("**")) {
                DictItem item;
                item.value = parse_or();
                d.items.push_back(std::move(item));
            } else {
                DictItem item;
                item.key = parse_expression();
                expect_op(":");
                item.value = parse_expression();
                d.items.push_back(std::move(item));
            }
            if (!accept_op(",")) break;
        }
        expect_op("}");
    }

    ExprPtr parse_string_like() {
        // One or more adjacent string tokens; an f-string piece turns the
        // whole expression into an FString (plain neighbors become literal
        // parts).
        std::vector<Tok> pieces;
        while (cur().kind == TokKind::String) {
            pieces.push_back(cur());
            advance();
        }
        bool any_f = false;
        for (auto& p : pieces) {
            for (char c : p.str_prefix)
                if (c == 'f' || c == 'F') any_f = true;
        }
        if (!any_f) {
            auto s = std::make_unique<Strings>();
            s->line = pieces.front().line;
            for (auto& p : pieces)
                s->pieces.push_back(StringPiece{p.str_prefix, p.str_quote, p.str_triple, p.str_body});
            return s;
        }
        if (pieces.size() > 1) err("adjacent f-string concatenation unsupported");
        return parse_fstring(pieces.front());
    }

    ExprPtr parse_fstring(const Tok& t) {
        auto fs = std::make_unique<FString>();
        fs->line = t.line;
        fs->prefix = t.str_prefix;
        fs->quote = t.str_quote;
        fs->triple = t.str_triple;
        const std::string& body = t.str_body;
        size_t i = 0;
        std::string lit;
        auto flush_lit = [&]() {
            if (!lit.empty()) {
                FStringPart part;
                part.is_field = false;
                part.literal = lit;
                fs->parts.push_back(std::move(part));
                lit.clear();
            }
        };
        while (i < body.size()) {
            char c = body[i];
            if (c == '{' && i + 1 < body.size() && body[i + 1] == '{') {
                lit += "{{";
                i += 2;
                continue;
            }
            if (c == '}' && i + 1 < body.size() && body[i + 1] == '}') {
                lit += "}}";
                i += 2;
                continue;
            }
            if (c == '}') throw ParseError("single '}' in f-string", t.line, t.col);
            if (c != '{') {
                lit += c;
                ++i;
                continue;
            }
            flush_lit();
            ++i;  // past '{'
            size_t expr_start = i;
            int depth = 0;
            char in_quote = 0;
            size_t expr_end = std::string::npos;
            size_t bang = std::string::npos, colon = std::string::npos;
            for (; i < body.size(); ++i) {
                char b = body[i];
                if (in_quote) {
                    if (b == '\\') {
                        ++i;
                        continue;
                    }
                    if (b == in_quote) in_quote = 0;
                    continue;
                }
                if (b == '\'' || b == '"') {
                    in_quote = b;
                    continue;
                }
                if (b == '(' || b == '[' || b == '{') ++depth;
                else if (b == ')' || b == ']') --depth;
                else if (b == '}') {
                    if (depth == 0) {
                        expr_end = i;
                        break;
                    }
                    --depth;
                } else if (depth == 0 && b == '!' && i + 1 < body.size() &&
                           body[i + 1] != '=' && bang == std::string::npos &&
                           colon == std::string::npos) {
                    bang = i;
                } else if (depth == 0 && b == ':' && colon == std::string::npos) {
                    colon = i;
                }
            }
            if (expr_end == std::string::npos)
                throw ParseError("unterminated f-string field", t.line, t.col);
            size_t expr_stop = std::min({expr_end, bang, colon});
            std::string expr_text = body.substr(expr_start, expr_stop - expr_start);
            FStringField field;
            if (bang != std::string::npos && bang < expr_end)
                field.conversion = body[bang + 1];
            if (colon != std::string::npos && colon < expr_end) {
                field.has_spec = true;
                field.spec = body.substr(colon + 1, expr_end - colon - 1);
            }
            field.value = parse_embedded_expr(expr_text, t.str_body_offset + expr_start, t.line);
            FStringPart part;
            part.is_field = true;
            part.field = std::move(field);
            fs->parts.push_back(std::move(part));
            ++i;  // past '}'
        }
        flush_lit();
        return fs;
    }

    static ExprPtr parse_embedded_expr(const std::string& text, size_t abs_offset, int line);

    ExprPtr parse_expr_list() {
        // testlist: expr (',' expr)* [','] -> bare tuple when comma present
        ExprPtr first = parse_star_or_expr();
        if (!at_op(",")) return first;
        auto tup = std::make_unique<TupleDisplay>();
        tup->line = first->line;
        tup->elements.push_back(std::move(first));
        while (accept_op(",")) {
            if (cur().kind == TokKind::Newline || cur().kind == TokKind::End || at_op("=") ||
                at_op(")") || at_op("]") || at_op("}") || at_op(":"))
                break;
            tup->elements.push_back(parse_star_or_expr());
        }
        return tup;
    }

    ExprPtr parse_target_list() {
        ExprPtr first = parse_target_atom();
        if (!at_op(",")) return first;
        auto tup = std::make_unique<TupleDisplay>();
        tup->line = first->line;
        tup->elements.push_back(std::move(first));
        while (accept_op(",")) {
            if (at_kw("in") || at_op("=") || cur().kind == TokKind::Newline || at_op(")") ||
                at_op("]"))
                break;
            tup->elements.push_back(parse_target_atom());
        }
        return tup;
    }

    ExprPtr parse_target_atom() {
        if (at_op("*")) {
            auto st = make<Star>();
            advance();
            st->value = parse_target_atom();
            return st;
        }
        if (at_op("(") || at_op("[")) {
            bool paren = at_op("(");
            advance();
            ExprPtr inner = parse_target_list();
            expect_op(paren ? ")" : "]");
            if (!paren && inner->kind == ExprKind::TupleDisplay) {
                // [a, b] target behaves like a tuple target
                return inner;
            }
            return inner;
        }
        // name with optional trailers (attribute / subscript targets)
        ExprPtr e = parse_postfix();
        return e;
    }

    // ----- statements ---------------------------------------------------

    std::vector<Param> parse_params(bool allow_annotations) {
        std::vector<Param> params;
        bool done = false;
        while (!done) {
            if (at_op(")") || at_op(":")) break;
            Param p;
            if (accept_op("*")) {
                p.stars = 1;
                if (cur().kind == TokKind::Name) p.name = expect_name();
            } else if (accept_op("**")) {
                p.stars = 2;
                p.name = expect_name();
            } else {
                p.name = expect_name();
                if (allow_annotations && accept_op(":")) p.annotation = parse_expression();
                if (accept_op("=")) p.def_value = parse_expression();
            }
            params.push_back(std::move(p));
            if (!accept_op(",")) done = true;
        }
        return params;
    }

    Suite parse_suite() {
        expect_op(":");
        if (cur().kind != TokKind::Newline) {
            // inline suite: simple statements separated by ';'
            Suite body;
            while (true) {
                body.push_back(parse_simple_stmt());
                if (accept_op(";")) {
                    if (cur().kind == TokKind::Newline || cur().kind == TokKind::End) break;
                    continue;
                }
                break;
            }
            expect_newline();
            return body;
        }
        advance();  // newline
        if (cur().kind != TokKind::Indent) err("expected an indented block");
        advance();
        Suite body;
        while (cur().kind != TokKind::Dedent && cur().kind != TokKind::End)
            body.push_back(parse_statement());
        if (cur().kind == TokKind::Dedent) advance();
        return body;
    }

    StmtPtr finish(StmtPtr s, int start_line) {
        s->line = start_line;
        s->end_line = last_content_line;
        return s;
    }

    StmtPtr parse_statement() {
        int start_line = cur().line;
        if (at_kw("def")) return finish(parse_def(), start_line);
        if (at_kw("if")) return finish(parse_if(false), start_line);
        if (at_kw("while")) return finish(parse_while(), start_line);
        if (at_kw("for")) return finish(parse_for(), start_line);
        if (at_kw("try")) return finish(parse_try(), start_line);
        if (at_kw("with")) return finish(parse_with(), start_line);
        StmtPtr s = parse_simple_stmt();
        // further simple statements on the same line
        if (at_op(";")) {
            err("';'-joined statements are only supported in inline suites");
        }
        expect_newline();
        return finish(std::move(s), start_line);
    }

    StmtPtr parse_def() {
        auto fn = std::make_unique<FunctionDef>();
        fn->line = cur().line;
        expect_kw("def");
        fn->name = expect_name();
        expect_op("(");
        fn->params = parse_params(true);
        expect_op(")");
        if (accept_op("->")) fn->returns = parse_expression();
        fn->body = parse_suite();
        return fn;
    }

    StmtPtr parse_if(bool as_elif) {
        auto node = std::make_unique<If>();
        node->line = cur().line;
        node->elif_form = as_elif;
        advance();  // if / elif
        node->cond = parse_expression();
        node->body = parse_suite();
        if (at_kw("elif")) {
            int ln = cur().line;
            StmtPtr nested = parse_if(true);
            nested->line = ln;
            nested->end_line = last_content_line;
            node->orelse.push_back(std::move(nested));
        } else if (accept_kw("else")) {
            node->orelse = parse_suite();
        }
        return node;
    }

    StmtPtr parse_while() {
        auto node = std::make_unique<While>();
        node->line = cur().line;
        expect_kw("while");
        node->cond = parse_expression();
        node->body = parse_suite();
        if (accept_kw("else")) node->orelse = parse_suite();
        return node;
    }

    StmtPtr parse_for() {
        auto node = std::make_unique<For>();
        node->line = cur().line;
        expect_kw("for");
        node->target = parse_target_list();
        expect_kw("in");
        node->iter = parse_expr_list();
        node->body = parse_suite();
        if (accept_kw("else")) node->orelse = parse_suite();
        return node;
    }

    StmtPtr parse_try() {
        auto node = std::make_unique<Try>();
        node->line = cur().line;
        expect_kw("try");
        node->body = parse_suite();
        while (at_kw("except")) {
            advance();
            ExceptHandler h;
            if (!at_op(":")) {
                h.type = parse_expression();
                if (accept_kw("as")) h.name = expect_name();
            }
            h.body = parse_suite();
            node->handlers.push_back(std::move(h));
        }
        if (accept_kw("else")) node->orelse = parse_suite();
        if (accept_kw("finally")) node->finalbody = parse_suite();
        if (node->handlers.empty() && node->finalbody.empty())
            err("try needs except or finally");
        return node;
    }

    StmtPtr parse_with() {
        auto node = std::make_unique<With>();
        node->line = cur().line;
        expect_kw("with");
        while (true) {
            WithItem item;
            item.ctx = parse_expression();
            if (accept_kw("as")) item.target = parse_target_atom();
            node->items.push_back(std::move(item));
            if (!accept_op(",")) break;
        }
        node->body = parse_suite();
        return node;
    }

    StmtPtr parse_simple_stmt() {
        int ln = cur().line;
        auto simple = [&](StmtPtr s) {
            s->line = ln;
            s->end_line = last_content_line;
            return s;
        };
        if (accept_kw("return")) {
            auto r = std::make_unique<Return>();
            if (cur().kind != TokKind::Newline && cur().kind != TokKind::End && !at_op(";"))
                r->value = parse_expr_list();
            return simple(std::move(r));
        }
        if (accept_kw("pass")) return simple(std::make_unique<Pass>());
        if (accept_kw("break")) return simple(std::make_unique<Break>());
        if (accept_kw("continue")) return simple(std::make_unique<Continue>());
        if (accept_kw("raise")) {
            auto r = std::make_unique<Raise>();
            if (cur().kind != TokKind::Newline && cur().kind != TokKind::End && !at_op(";")) {
                r->exc = parse_expression();
                if (accept_kw("from")) r->from_ = parse_expression();
            }
            return simple(std::move(r));
        }
        if (accept_kw("assert")) {
            auto a = std::make_unique<Assert>();
            a->test = parse_expression();
            if (accept_op(",")) a->msg = parse_expression();
            return simple(std::move(a));
        }
        if (accept_kw("global") || (cur().kind == TokKind::Keyword && cur().text == "nonlocal")) {
            bool glob = toks[idx - 1].kind == TokKind::Keyword && toks[idx - 1].text == "global";
            if (!glob) advance();  // consume 'nonlocal'
            std::vector<NameSlot> names;
            names.push_back(expect_name());
            while (accept_op(",")) names.push_back(expect_name());
            if (glob) {
                auto g = std::make_unique<Global>();
                g->names = std::move(names);
                return simple(std::move(g));
            }
            auto n = std::make_unique<Nonlocal>();
            n->names = std::move(names);
            return simple(std::move(n));
        }
        if (accept_kw("del")) {
            auto d = std::make_unique<Del>();
            d->targets.push_back(parse_target_atom());
            while (accept_op(",")) d->targets.push_back(parse_target_atom());
            return simple(std::move(d));
        }
        if (accept_kw("import")) {
            auto imp = std::make_unique<Import>();
            while (true) {
                ImportItem item;
                NameSlot first = expect_name();
                item.module = first.id;
                item.binding = first;
                while (accept_op(".")) {
                    NameSlot part = expect_name();
                    item.module += "." + part.id;
                }
                if (accept_kw("as")) {
                    item.alias = expect_name();
                    item.binding = *item.alias;
                }
                imp->items.push_back(std::move(item));
                if (!accept_op(",")) break;
            }
            return simple(std::move(imp));
        }
        if (accept_kw("from")) {
            auto imp = std::make_unique<ImportFrom>();
            NameSlot first = expect_name();
            imp->module = first.id;
            while (accept_op(".")) {
                NameSlot part = expect_name();
                imp->module += "." + part.id;
            }
            expect_kw("import");
            while (true) {
                ImportItem item;
                NameSlot nm = expect_name();
                item.module = nm.id;
                item.binding = nm;
                if (accept_kw("as")) {
                    item.alias = expect_name();
                    item.binding = *item.alias;
                }
                imp->items.push_back(std::move(item));
                if (!accept_op(",")) break;
            }
            return simple(std::move(imp));
        }

        // expression / assignment statements
        ExprPtr first = parse_expr_list();
        static const std::pair<const char*, BinaryOp> aug_ops[] = {
            {"+=", BinaryOp::Add},     {"-=", BinaryOp::Sub},
            {"*=", BinaryOp::Mul},     {"/=", BinaryOp::TrueDiv},
            {"//=", BinaryOp::FloorDiv}, {"%=", BinaryOp::Mod},
            {"**=", BinaryOp::Pow},    {"&=", BinaryOp::BitAnd},
            {"|=", BinaryOp::BitOr},   {"^=", BinaryOp::BitXor},
            {">>=", BinaryOp::RShift}, {"<<=", BinaryOp::LShift},
        };
        for (auto& [text, op] : aug_ops) {
            if (at_op(text)) {
                advance();
                auto a = std::make_unique<AugAssign>();
                a->target = std::move(first);
                a->op = op;
                a->value = parse_expr_list();
                return simple(std::move(a));
            }
        }
        if (at_op(":")) {
            advance();
            auto a = std::make_unique<AnnAssign>();
            a->target = std::move(first);
            a->annotation = parse_expression();
            if (accept_op("=")) a->value = parse_expr_list();
            return simple(std::move(a));
        }
        if (at_op("=")) {
            auto a = std::make_unique<Assign>();
            a->targets.push_back(std::move(first));
            while (accept_op("=")) a->targets.push_back(parse_expr_list());
            a->value = std::move(a->targets.back());
            a->targets.pop_back();
            return simple(std::move(a));
        }
        auto e = std::make_unique<ExprStmt>();
        e->value = std::move(first);
        return simple(std::move(e));
    }

    Module parse() {
        Module mod;
        while (cur().kind != TokKind::End) {
            if (cur().kind == TokKind::Newline) {
                advance();
                continue;
            }
            mod.body.push_back(parse_statement());
        }
        return mod;
    }
};

}  // namespace

ExprPtr Parser::parse_embedded_expr(const std::string& text, size_t abs_offset, int line) {
    Parser sub;
    sub.toks = tokenize(text);
    for (auto& t : sub.toks) {
        t.offset += abs_offset;
        t.line = line;
    }
    ExprPtr e = sub.parse_expression();
    if (sub.cur().kind != TokKind::Newline && sub.cur().kind != TokKind::End)
        throw ParseError("trailing content in f-string field", line, 1);
    return e;
}

Module parse_module(std::string_view source) {
    Parser p;
    p.toks = tokenize(source);
    Module mod = p.parse();
    mod.source = std::string(source);
    return mod;
}

bool parses(std::string_view source, std::string* error) {
    try {
        parse_module(source);
        return true;
    } catch (const ParseError& e) {
        if (error) *error = e.what();
        return false;
    }
}

FunctionDef* find_function(Module& mod, const std::string& name) {
    for (auto& s : mod.body) {
        if (s->kind == StmtKind::FunctionDef) {
            auto* fn = static_cast<FunctionDef*>(s.get());
            if (fn->name.id == name) return fn;
        }
    }
    return nullptr;
}

}  // namespace robusteval::pysrc
