#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "robusteval/common.hpp"

// Lexer, AST, parser and printer for the subject-language subset the
// benchmark programs are written in. The grammar covers the constructs
// found in small standalone functions: defs, control flow, try/except,
// comprehensions, f-strings, lambdas, slices. Classes, async, decorators
// and match statements are out of scope and fail to parse.
namespace robusteval::pysrc {

class ParseError : public Error {
public:
    ParseError(const std::string& msg, int line, int col)
        : Error("line " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line),
          col(col) {}
    int line;
    int col;
};

// An identifier occurrence with its byte position in the original source,
// so renaming can splice text without reformatting.
struct NameSlot {
    std::string id;
    size_t offset = 0;  // npos-like 0 when synthetic
    bool synthetic = false;
};

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind {
    Name,
    Number,
    Strings,
    FString,
    TupleDisplay,
    ListDisplay,
    SetDisplay,
    DictDisplay,
    Unary,
    Binary,
    Bool,
    Compare,
    CallExpr,
    Attr,
    Sub,
    SliceExpr,
    LambdaExpr,
    Ternary,
    Comp,
    Star,
    YieldExpr,
    Walrus,
};

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    explicit Expr(ExprKind k) : kind(k) {}
    virtual ~Expr() = default;
    ExprKind kind;
    int line = 0;
};

struct Name : Expr {
    Name() : Expr(ExprKind::Name) {}
    NameSlot slot;
};

struct Number : Expr {
    Number() : Expr(ExprKind::Number) {}
    std::string text;  // verbatim token
};

struct StringPiece {
    std::string prefix;  // as written (may be empty, "r", "b", ...)
    char quote = '\'';
    bool triple = false;
    std::string body;  // raw chars between the quotes, escapes untouched
};

struct Strings : Expr {
    Strings() : Expr(ExprKind::Strings) {}
    std::vector<StringPiece> pieces;  // adjacent literal concatenation
};

struct FStringField {
    ExprPtr value;
    char conversion = 0;   // 0 or one of r s a
    std::string spec;      // raw format spec, may be empty
    bool has_spec = false;
};

struct FStringPart {
    bool is_field = false;
    std::string literal;  // raw text including doubled braces
    FStringField field;
};

struct FString : Expr {
    FString() : Expr(ExprKind::FString) {}
    std::string prefix;  // as written, contains f/F
    char quote = '\'';
    bool triple = false;
    std::vector<FStringPart> parts;
};

struct TupleDisplay : Expr {
    TupleDisplay() : Expr(ExprKind::TupleDisplay) {}
    std::vector<ExprPtr> elements;
};

struct ListDisplay : Expr {
    ListDisplay() : Expr(ExprKind::ListDisplay) {}
    std::vector<ExprPtr> elements;
};

struct SetDisplay : Expr {
    SetDisplay() : Expr(ExprKind::SetDisplay) {}
    std::vector<ExprPtr> elements;
};

struct DictItem {
    ExprPtr key;  // null for ** expansion
    ExprPtr value;
};

struct DictDisplay : Expr {
    DictDisplay() : Expr(ExprKind::DictDisplay) {}
    std::vector<DictItem> items;
};

enum class UnaryOp { Not, Neg, Pos, Invert };

struct Unary : Expr {
    Unary() : Expr(ExprKind::Unary) {}
    UnaryOp op = UnaryOp::Not;
    ExprPtr operand;
    bool force_parens = false;  // print the operand as (x) even when atomic
};

enum class BinaryOp { Add, Sub, Mul, TrueDiv, FloorDiv, Mod, Pow, MatMul, LShift, RShift, BitAnd, BitOr, BitXor };

struct Binary : Expr {
    Binary() : Expr(ExprKind::Binary) {}
    BinaryOp op = BinaryOp::Add;
    ExprPtr left;
    ExprPtr right;
};

enum class BoolOpKind { And, Or };

struct Bool : Expr {
    Bool() : Expr(ExprKind::Bool) {}
    BoolOpKind op = BoolOpKind::And;
    std::vector<ExprPtr> values;
};

enum class CmpOp { Lt, Le, Gt, Ge, Eq, Ne, In, NotIn, Is, IsNot };

struct Compare : Expr {
    Compare() : Expr(ExprKind::Compare) {}
    ExprPtr first;
    std::vector<std::pair<CmpOp, ExprPtr>> rest;
};

struct CallArg {
    ExprPtr value;
    int stars = 0;  // 0 plain, 1 *args, 2 **kwargs
    std::optional<NameSlot> keyword;
};

struct CallExpr : Expr {
    CallExpr() : Expr(ExprKind::CallExpr) {}
    ExprPtr func;
    std::vector<CallArg> args;
};

struct Attr : Expr {
    Attr() : Expr(ExprKind::Attr) {}
    ExprPtr value;
    std::string attr;
};

struct Sub : Expr {
    Sub() : Expr(ExprKind::Sub) {}
    ExprPtr value;
    ExprPtr index;  // may be SliceExpr or TupleDisplay
};

struct SliceExpr : Expr {
    SliceExpr() : Expr(ExprKind::SliceExpr) {}
    ExprPtr lower, upper, step;  // each may be null
};

struct Param {
    NameSlot name;      // empty id for a bare '*' separator
    ExprPtr annotation; // may be null
    ExprPtr def_value;  // may be null
    int stars = 0;      // 1 for *args / bare *, 2 for **kwargs
};

struct LambdaExpr : Expr {
    LambdaExpr() : Expr(ExprKind::LambdaExpr) {}
    std::vector<Param> params;
    ExprPtr body;
};

struct Ternary : Expr {
    Ternary() : Expr(ExprKind::Ternary) {}
    ExprPtr body, cond, orelse;
};

struct CompClause {
    ExprPtr target;
    ExprPtr iter;
    std::vector<ExprPtr> ifs;
};

enum class CompKind { List, Set, Dict, Generator };

struct Comp : Expr {
    Comp() : Expr(ExprKind::Comp) {}
    CompKind comp = CompKind::List;
    ExprPtr element;     // list/set/generator element, or dict key
    ExprPtr value;       // dict value
    std::vector<CompClause> clauses;
};

struct Star : Expr {
    Star() : Expr(ExprKind::Star) {}
    ExprPtr value;
};

struct YieldExpr : Expr {
    YieldExpr() : Expr(ExprKind::YieldExpr) {}
    ExprPtr value;     // may be null
    bool is_from = false;
};

struct Walrus : Expr {
    Walrus() : Expr(ExprKind::Walrus) {}
    NameSlot target;
    ExprPtr value;
};

// ---------------------------------------------------------------------------
// Statements

enum class StmtKind {
    FunctionDef,
    Return,
    Assign,
    AugAssign,
    AnnAssign,
    ExprStmt,
    If,
    While,
    For,
    Break,
    Continue,
    Pass,
    Raise,
    Try,
    Assert,
    Global,
    Nonlocal,
    Del,
    Import,
    ImportFrom,
    With,
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;
using Suite = std::vector<StmtPtr>;

struct Stmt {
    explicit Stmt(StmtKind k) : kind(k) {}
    virtual ~Stmt() = default;
    StmtKind kind;
    int line = 0;      // first line, 1-based
    int end_line = 0;  // last line of the whole statement incl. nested suites
};

struct FunctionDef : Stmt {
    FunctionDef() : Stmt(StmtKind::FunctionDef) {}
    NameSlot name;
    std::vector<Param> params;
    ExprPtr returns;  // may be null
    Suite body;
};

struct Return : Stmt {
    Return() : Stmt(StmtKind::Return) {}
    ExprPtr value;  // may be null
};

struct Assign : Stmt {
    Assign() : Stmt(StmtKind::Assign) {}
    std::vector<ExprPtr> targets;
    ExprPtr value;
};

struct AugAssign : Stmt {
    AugAssign() : Stmt(StmtKind::AugAssign) {}
    ExprPtr target;
    BinaryOp op = BinaryOp::Add;
    ExprPtr value;
};

struct AnnAssign : Stmt {
    AnnAssign() : Stmt(StmtKind::AnnAssign) {}
    ExprPtr target;
    ExprPtr annotation;
    ExprPtr value;  // may be null
};

struct ExprStmt : Stmt {
    ExprStmt() : Stmt(StmtKind::ExprStmt) {}
    ExprPtr value;
};

struct If : Stmt {
    If() : Stmt(StmtKind::If) {}
    ExprPtr cond;
    Suite body;
    Suite orelse;        // empty, [If] for elif, or else-branch statements
    bool elif_form = false;  // this node was written as an elif
};

struct While : Stmt {
    While() : Stmt(StmtKind::While) {}
    ExprPtr cond;
    Suite body;
    Suite orelse;
};

struct For : Stmt {
    For() : Stmt(StmtKind::For) {}
    ExprPtr target;
    ExprPtr iter;
    Suite body;
    Suite orelse;
};

struct Break : Stmt {
    Break() : Stmt(StmtKind::Break) {}
};
struct Continue : Stmt {
    Continue() : Stmt(StmtKind::Continue) {}
};
struct Pass : Stmt {
    Pass() : Stmt(StmtKind::Pass) {}
};

struct Raise : Stmt {
    Raise() : Stmt(StmtKind::Raise) {}
    ExprPtr exc;   // may be null (bare raise)
    ExprPtr from_; // may be null
};

struct ExceptHandler {
    ExprPtr type;                  // may be null (bare except)
    std::optional<NameSlot> name;  // except ... as name
    Suite body;
};

struct Try : Stmt {
    Try() : Stmt(StmtKind::Try) {}
    Suite body;
    std::vector<ExceptHandler> handlers;
    Suite orelse;
    Suite finalbody;
};

struct Assert : Stmt {
    Assert() : Stmt(StmtKind::Assert) {}
    ExprPtr test;
    ExprPtr msg;  // may be null
};

struct Global : Stmt {
    Global() : Stmt(StmtKind::Global) {}
    std::vector<NameSlot> names;
};

struct Nonlocal : Stmt {
    Nonlocal() : Stmt(StmtKind::Nonlocal) {}
    std::vector<NameSlot> names;
};

struct Del : Stmt {
    Del() : Stmt(StmtKind::Del) {}
    std::vector<ExprPtr> targets;
};

struct ImportItem {
    std::string module;            // dotted
    std::optional<NameSlot> alias;
    NameSlot binding;              // the name actually bound
};

struct Import : Stmt {
    Import() : Stmt(StmtKind::Import) {}
    std::vector<ImportItem> items;
};

struct ImportFrom : Stmt {
    ImportFrom() : Stmt(StmtKind::ImportFrom) {}
    std::string module;
    std::vector<ImportItem> items;  // item.module holds the imported name
};

struct WithItem {
    ExprPtr ctx;
    ExprPtr target;  // may be null
};

struct With : Stmt {
    With() : Stmt(StmtKind::With) {}
    std::vector<WithItem> items;
    Suite body;
};

// ---------------------------------------------------------------------------

struct Module {
    Suite body;
    std::string source;  // original text, used by splice-based rewrites
};

// Throws ParseError.
Module parse_module(std::string_view source);

// True when the source is inside the supported grammar.
bool parses(std::string_view source, std::string* error = nullptr);

// Canonical reprint: 4-space indents, normalized spacing, minimal parens.
std::string print_module(const Module& mod);
std::string print_stmt(const Stmt& stmt, int indent = 0);
std::string print_expr(const Expr& expr);

// All identifier texts occurring anywhere in the module (names, params,
// defs, attributes excluded), used for fresh-name collision checks.
std::vector<std::string> all_identifiers(const Module& mod);

// A name not colliding with anything in the module.
std::string fresh_name(const Module& mod, const std::string& stem);

// The top-level function definition with the given name, or null.
FunctionDef* find_function(Module& mod, const std::string& name);

bool is_keyword(std::string_view word);
bool is_builtin_name(std::string_view word);

}  // namespace robusteval::pysrc
