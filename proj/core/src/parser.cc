#include "chcmq/parser.hpp"

#include "chcmq/unify.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <set>

namespace chcmq {

ParseError::ParseError(ParseErrorKind kind, int line, int col, const std::string& msg)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
      kind_(kind),
      line_(line),
      col_(col) {}

namespace {

enum class Tok : std::uint8_t { Ident, Var, Int, Punct, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_space();
            if (pos_ >= src_.size()) {
                out.push_back({Tok::End, "", line_, col_});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    void skip_space() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '%') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    Token next() {
        const int line = line_, col = col_;
        const char c = src_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                advance();
            std::string text(src_.substr(start, pos_ - start));
            if (text.find("__") != std::string::npos)
                throw ParseError(ParseErrorKind::Syntax, line, col, "'__' is reserved in names: " + text);
            const bool var = std::isupper(static_cast<unsigned char>(c)) || c == '_';
            return {var ? Tok::Var : Tok::Ident, std::move(text), line, col};
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t start = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) advance();
            return {Tok::Int, std::string(src_.substr(start, pos_ - start)), line, col};
        }
        static const char* const kPuncts[] = {"<=>", ":-", "<-", "=<", "<=", ">=", "=>", "!=", "\\/", "(", ")",
                                              "[",   "]",  "|",  ",",  ".",  ":",  "=",  "<",  ">",   "+", "-",
                                              "*",   "~",  "&"};
        for (const char* p : kPuncts) {
            std::string_view pv(p);
            if (src_.substr(pos_, pv.size()) == pv) {
                for (std::size_t i = 0; i < pv.size(); ++i) advance();
                return {Tok::Punct, std::string(pv), line, col};
            }
        }
        throw ParseError(ParseErrorKind::Syntax, line, col, std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

// Untyped syntax tree produced by the first pass.
struct Raw {
    enum Kind : std::uint8_t { Var, Int, App, List, Unary, Binary } kind = Var;
    std::string text;
    std::int64_t value = 0;
    std::vector<Raw> args;
    bool has_tail = false;  // List: last element of args is the tail
    int line = 0;
    int col = 0;
};

struct RawSortDecl {
    std::string name;
    std::vector<std::pair<std::string, std::vector<Raw>>> ctors;
    int line, col;
};

struct RawPredDecl {
    std::string name;
    bool cata = false;
    std::vector<Raw> sorts;
    std::vector<ArgRole> roles;
    int line, col;
};

struct RawClause {
    Raw head;
    std::vector<Raw> body;
};

struct RawFile {
    std::vector<RawSortDecl> sorts;
    std::vector<RawPredDecl> preds;
    std::vector<RawClause> clauses;
};

class RawParser {
public:
    explicit RawParser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    RawFile run() {
        RawFile f;
        while (peek().kind != Tok::End) {
            const Token& t = peek();
            const bool decl = t.kind == Tok::Ident && peek(1).kind == Tok::Ident &&
                              (t.text == "sort" || t.text == "pred" || t.text == "cata");
            if (decl && t.text == "sort") {
                f.sorts.push_back(sort_decl());
            } else if (decl) {
                f.preds.push_back(pred_decl());
            } else {
                f.clauses.push_back(clause());
            }
        }
        return f;
    }

private:
    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    Token take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool is(const char* p) const { return peek().kind == Tok::Punct && peek().text == p; }
    bool accept(const char* p) {
        if (!is(p)) return false;
        ++pos_;
        return true;
    }
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(ParseErrorKind::Syntax, peek().line, peek().col,
                         msg + (peek().kind == Tok::End ? " at end of input" : " near '" + peek().text + "'"));
    }
    void expect(const char* p) {
        if (!accept(p)) fail(std::string("expected '") + p + "'");
    }
    Token expect_ident() {
        if (peek().kind != Tok::Ident) fail("expected an identifier");
        return take();
    }

    Raw sort_expr() {
        Token t = expect_ident();
        Raw r;
        r.kind = Raw::App;
        r.text = t.text;
        r.line = t.line;
        r.col = t.col;
        if (accept("(")) {
            r.args.push_back(sort_expr());
            expect(")");
        }
        return r;
    }

    RawSortDecl sort_decl() {
        take();
        Token name = expect_ident();
        RawSortDecl d{name.text, {}, name.line, name.col};
        expect("=");
        do {
            Token c = expect_ident();
            std::vector<Raw> args;
            if (accept("(")) {
                do args.push_back(sort_expr());
                while (accept(","));
                expect(")");
            }
            d.ctors.emplace_back(c.text, std::move(args));
        } while (accept("|"));
        expect(".");
        return d;
    }

    RawPredDecl pred_decl() {
        const bool cata = take().text == "cata";
        Token name = expect_ident();
        RawPredDecl d{name.text, cata, {}, {}, name.line, name.col};
        expect("(");
        if (!is(")")) {
            do {
                if (cata) {
                    Token role = expect_ident();
                    if (role.text == "in") d.roles.push_back(ArgRole::In);
                    else if (role.text == "adt") d.roles.push_back(ArgRole::Adt);
                    else if (role.text == "out") d.roles.push_back(ArgRole::Out);
                    else throw ParseError(ParseErrorKind::Declaration, role.line, role.col,
                                          "argument role must be in, adt or out");
                    expect(":");
                }
                d.sorts.push_back(sort_expr());
            } while (accept(","));
        }
        expect(")");
        expect(".");
        return d;
    }

    RawClause clause() {
        RawClause c{expr(), {}};
        if (accept(":-") || accept("<-")) {
            do c.body.push_back(expr());
            while (accept(","));
        }
        expect(".");
        return c;
    }

    Raw node(Raw::Kind k, std::string text, const Token& at) {
        Raw r;
        r.kind = k;
        r.text = std::move(text);
        r.line = at.line;
        r.col = at.col;
        return r;
    }

    Raw binary(const Token& at, std::string op, Raw l, Raw r) {
        Raw b = node(Raw::Binary, std::move(op), at);
        b.args.push_back(std::move(l));
        b.args.push_back(std::move(r));
        return b;
    }

    Raw expr() {
        Raw l = implies();
        while (is("<=>")) {
            Token at = take();
            l = binary(at, "<=>", std::move(l), implies());
        }
        return l;
    }

    Raw implies() {
        Raw l = disj();
        if (is("=>")) {
            Token at = take();
            return binary(at, "=>", std::move(l), implies());
        }
        return l;
    }

    Raw disj() {
        Raw l = conj();
        while (is("\\/")) {
            Token at = take();
            l = binary(at, "\\/", std::move(l), conj());
        }
        return l;
    }

    Raw conj() {
        Raw l = neg();
        while (is("&")) {
            Token at = take();
            l = binary(at, "&", std::move(l), neg());
        }
        return l;
    }

    Raw neg() {
        if (is("~")) {
            Token at = take();
            Raw r = node(Raw::Unary, "~", at);
            r.args.push_back(neg());
            return r;
        }
        return relation();
    }

    Raw relation() {
        Raw l = sum();
        for (const char* op : {"=", "!=", "<", "=<", "<=", ">=", ">"}) {
            if (is(op)) {
                Token at = take();
                return binary(at, op, std::move(l), sum());
            }
        }
        return l;
    }

    Raw sum() {
        Raw l = product();
        while (is("+") || is("-")) {
            Token at = take();
            l = binary(at, at.text, std::move(l), product());
        }
        return l;
    }

    Raw product() {
        Raw l = unary();
        while (is("*")) {
            Token at = take();
            l = binary(at, "*", std::move(l), unary());
        }
        return l;
    }

    Raw unary() {
        if (is("-")) {
            Token at = take();
            Raw r = node(Raw::Unary, "-", at);
            r.args.push_back(unary());
            return r;
        }
        return primary();
    }

    Raw primary() {
        const Token& t = peek();
        if (t.kind == Tok::Int) {
            Token at = take();
            Raw r = node(Raw::Int, at.text, at);
            auto [ptr, ec] = std::from_chars(at.text.data(), at.text.data() + at.text.size(), r.value);
            if (ec != std::errc()) throw ParseError(ParseErrorKind::Syntax, at.line, at.col, "integer out of range");
            return r;
        }
        if (t.kind == Tok::Var) {
            Token at = take();
            return node(Raw::Var, at.text, at);
        }
        if (t.kind == Tok::Ident) {
            Token at = take();
            Raw r = node(Raw::App, at.text, at);
            if (accept("(")) {
                if (!is(")")) {
                    do r.args.push_back(expr());
                    while (accept(","));
                }
                expect(")");
            }
            return r;
        }
        if (is("(")) {
            take();
            Raw r = expr();
            expect(")");
            return r;
        }
        if (is("[")) {
            Token at = take();
            Raw r = node(Raw::List, "", at);
            if (!is("]")) {
                do r.args.push_back(expr());
                while (accept(","));
                if (accept("|")) {
                    r.args.push_back(expr());
                    r.has_tail = true;
                }
            }
            expect("]");
            return r;
        }
        fail("expected a term");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

const std::set<std::string>& reserved_names() {
    static const std::set<std::string> names = {
        "true", "false", "ite",    "and",  "or",   "not",  "distinct", "let", "forall", "exists", "xor",
        "div",  "mod",   "abs",    "int",  "bool", "list", "tree",     "nil", "cons",   "leaf",   "node",
        "sort", "pred",  "cata",   "match"};
    return names;
}

[[noreturn]] void fail_at(ParseErrorKind k, const Raw& r, const std::string& msg) {
    throw ParseError(k, r.line, r.col, msg);
}

class Elaborator {
public:
    Elaborator(Problem& p, NameSupply& names) : p_(p), names_(names) {}

    Sort resolve_sort(const Raw& r) {
        if (r.text == "int" && r.args.empty()) return Sort::integer();
        if (r.text == "bool" && r.args.empty()) return Sort::boolean();
        if (r.text == "list" && r.args.size() == 1) return p_.sorts.list_of(resolve_sort(r.args[0]));
        if (r.text == "tree" && r.args.size() == 1) return p_.sorts.tree_of(resolve_sort(r.args[0]));
        if (r.args.empty())
            if (auto s = p_.sorts.find_user(r.text)) return *s;
        fail_at(ParseErrorKind::Declaration, r, "unknown sort '" + r.text + "'");
    }

    void clause(const RawClause& rc) {
        env_.clear();
        RawClause c = rc;
        rename_anonymous(c.head);
        for (auto& b : c.body) rename_anonymous(b);

        const bool query = c.head.kind == Raw::App && c.head.text == "false" && c.head.args.empty();
        if (!query) check_atom_shape(c.head, "head");

        for (int pass = 0; pass < 16; ++pass) {
            changed_ = false;
            if (!query) infer_atom(c.head);
            for (const auto& item : c.body) {
                if (is_atom(item)) infer_atom(item);
                else infer(item, Sort::boolean());
            }
            if (!changed_) break;
        }
        std::vector<std::string> untyped;
        collect_untyped(c.head, untyped);
        for (const auto& b : c.body) collect_untyped(b, untyped);
        for (const auto& v : untyped) env_.emplace(v, Sort::integer());

        Clause out;
        std::vector<Expr> extra;
        if (!query) out.head = normalize_head(build_atom(c.head), extra);
        std::vector<Expr> constraints;
        for (const auto& item : c.body) {
            if (is_atom(item)) {
                out.body.push_back(normalize_body_atom(build_atom(item), extra));
            } else {
                constraints.push_back(build(item, Sort::boolean()));
            }
        }
        for (auto& e : extra) constraints.push_back(std::move(e));
        std::vector<Expr> flat;
        for (const auto& k : constraints)
            for (auto& j : conjuncts(k)) flat.push_back(std::move(j));
        out.constraint = Expr::and_(std::move(flat));
        place(std::move(out), rc.head);
    }

    void finish_queries() {
        std::map<std::string, bool> seen;
        for (std::size_t i = 0; i < p_.queries.size(); ++i) {
            for (const auto& a : p_.queries[i].body) {
                if (p_.kind(a.pred) != PredKind::Program) continue;
                if (seen[a.pred])
                    throw ParseError(ParseErrorKind::DuplicateQuery, query_pos_[i].first, query_pos_[i].second,
                                     "second query for predicate '" + a.pred + "'");
                seen[a.pred] = true;
            }
        }
    }

private:
    void place(Clause c, const Raw& head_pos) {
        c.id = next_id_++;
        if (!c.head) {
            query_pos_.emplace_back(head_pos.line, head_pos.col);
            p_.queries.push_back(std::move(c));
        } else if (p_.kind(c.head->pred) == PredKind::Cata) {
            p_.property.push_back(std::move(c));
        } else {
            p_.program.push_back(std::move(c));
        }
    }

    void rename_anonymous(Raw& r) {
        if (r.kind == Raw::Var && r.text == "_") r.text = names_.fresh("V");
        for (auto& a : r.args) rename_anonymous(a);
    }

    bool is_atom(const Raw& r) const { return r.kind == Raw::App && p_.find(r.text) != nullptr; }

    void check_atom_shape(const Raw& r, const char* where) {
        if (r.kind != Raw::App) fail_at(ParseErrorKind::Syntax, r, std::string("expected an atom as ") + where);
        const PredDecl* d = p_.find(r.text);
        if (d == nullptr) fail_at(ParseErrorKind::UndeclaredPredicate, r, "undeclared predicate '" + r.text + "'");
        if (d->args.size() != r.args.size())
            fail_at(ParseErrorKind::Sort, r,
                    "predicate '" + r.text + "' expects " + std::to_string(d->args.size()) + " arguments");
    }

    void infer_atom(const Raw& r) {
        check_atom_shape(r, "atom");
        const PredDecl& d = p_.pred(r.text);
        for (std::size_t i = 0; i < r.args.size(); ++i) infer(r.args[i], d.args[i]);
    }

    Atom build_atom(const Raw& r) {
        const PredDecl& d = p_.pred(r.text);
        Atom a{r.text, {}};
        for (std::size_t i = 0; i < r.args.size(); ++i) a.args.push_back(build(r.args[i], d.args[i]));
        return a;
    }

    void collect_untyped(const Raw& r, std::vector<std::string>& out) const {
        if (r.kind == Raw::Var && !env_.count(r.text)) out.push_back(r.text);
        for (const auto& a : r.args) collect_untyped(a, out);
    }

    std::optional<Sort> element_of(std::optional<Sort> s, AdtShape shape) const {
        if (!s || !s->is_adt()) return std::nullopt;
        const AdtDecl& d = p_.sorts.adt(*s);
        if (d.shape != shape) return std::nullopt;
        return d.element;
    }

    static bool is_arith(const std::string& op) { return op == "+" || op == "-" || op == "*"; }
    static bool is_compare(const std::string& op) {
        return op == "<" || op == "=<" || op == "<=" || op == ">=" || op == ">";
    }
    static bool is_connective(const std::string& op) {
        return op == "&" || op == "\\/" || op == "=>" || op == "<=>";
    }

    std::optional<Sort> infer(const Raw& r, std::optional<Sort> expected) {
        switch (r.kind) {
        case Raw::Var: {
            if (auto it = env_.find(r.text); it != env_.end()) return it->second;
            if (expected) {
                env_.emplace(r.text, *expected);
                changed_ = true;
            }
            return expected;
        }
        case Raw::Int: return Sort::integer();
        case Raw::Unary:
            if (r.text == "-") {
                infer(r.args[0], Sort::integer());
                return Sort::integer();
            }
            infer(r.args[0], Sort::boolean());
            return Sort::boolean();
        case Raw::Binary: {
            const std::string& op = r.text;
            if (is_arith(op)) {
                infer(r.args[0], Sort::integer());
                infer(r.args[1], Sort::integer());
                return Sort::integer();
            }
            if (is_compare(op)) {
                infer(r.args[0], Sort::integer());
                infer(r.args[1], Sort::integer());
                return Sort::boolean();
            }
            if (is_connective(op)) {
                infer(r.args[0], Sort::boolean());
                infer(r.args[1], Sort::boolean());
                return Sort::boolean();
            }
            auto s = infer(r.args[0], std::nullopt);
            if (!s) s = infer(r.args[1], std::nullopt);
            if (s) {
                infer(r.args[0], s);
                infer(r.args[1], s);
            }
            return Sort::boolean();
        }
        case Raw::List: {
            auto elem = element_of(expected, AdtShape::List);
            const std::size_t n = r.args.size() - (r.has_tail ? 1 : 0);
            for (std::size_t i = 0; i < n && !elem; ++i) elem = infer(r.args[i], std::nullopt);
            if (!elem && r.has_tail) elem = element_of(infer(r.args.back(), std::nullopt), AdtShape::List);
            if (!elem) return std::nullopt;
            for (std::size_t i = 0; i < n; ++i) infer(r.args[i], elem);
            const Sort ls = p_.sorts.list_of(*elem);
            if (r.has_tail) infer(r.args.back(), ls);
            return ls;
        }
        case Raw::App: return infer_app(r, expected);
        }
        return std::nullopt;
    }

    std::optional<Sort> infer_app(const Raw& r, std::optional<Sort> expected) {
        if ((r.text == "true" || r.text == "false") && r.args.empty()) return Sort::boolean();
        if (r.text == "ite" && r.args.size() == 3) {
            infer(r.args[0], Sort::boolean());
            auto s = expected;
            if (!s) s = infer(r.args[1], std::nullopt);
            if (!s) s = infer(r.args[2], std::nullopt);
            if (s) {
                infer(r.args[1], s);
                infer(r.args[2], s);
            }
            return s;
        }
        if (r.text == "leaf" && r.args.empty()) {
            auto elem = element_of(expected, AdtShape::Tree);
            return elem ? std::optional(p_.sorts.tree_of(*elem)) : std::nullopt;
        }
        if (r.text == "node" && r.args.size() == 3) {
            auto elem = element_of(expected, AdtShape::Tree);
            if (!elem) elem = infer(r.args[1], std::nullopt);
            if (!elem) elem = element_of(infer(r.args[0], std::nullopt), AdtShape::Tree);
            if (!elem) elem = element_of(infer(r.args[2], std::nullopt), AdtShape::Tree);
            if (!elem) return std::nullopt;
            const Sort ts = p_.sorts.tree_of(*elem);
            infer(r.args[0], ts);
            infer(r.args[1], elem);
            infer(r.args[2], ts);
            return ts;
        }
        if (auto ctor = p_.sorts.find_user_ctor(r.text)) {
            const CtorDecl& cd = p_.sorts.adt(ctor->first).ctors[ctor->second];
            if (cd.args.size() == r.args.size())
                for (std::size_t i = 0; i < r.args.size(); ++i) infer(r.args[i], cd.args[i]);
            return ctor->first;
        }
        if (p_.find(r.text)) fail_at(ParseErrorKind::Syntax, r, "predicate '" + r.text + "' used inside a term");
        fail_at(ParseErrorKind::UndeclaredPredicate, r, "undeclared predicate or constructor '" + r.text + "'");
    }

    void expect_sort(const Raw& r, Sort actual, std::optional<Sort> expected) {
        if (expected && *expected != actual)
            fail_at(ParseErrorKind::Sort, r,
                    "sort mismatch: expected " + p_.sorts.name(*expected) + ", found " + p_.sorts.name(actual));
    }

    Expr build(const Raw& r, std::optional<Sort> expected) {
        try {
            return build_unchecked(r, expected);
        } catch (const std::invalid_argument& e) {
            fail_at(ParseErrorKind::Sort, r, e.what());
        }
    }

    Expr build_unchecked(const Raw& r, std::optional<Sort> expected) {
        switch (r.kind) {
        case Raw::Var: {
            const Sort s = env_.at(r.text);
            expect_sort(r, s, expected);
            return Expr::var(r.text, s);
        }
        case Raw::Int:
            expect_sort(r, Sort::integer(), expected);
            return Expr::int_const(r.value);
        case Raw::Unary:
            if (r.text == "-") {
                expect_sort(r, Sort::integer(), expected);
                Expr a = build(r.args[0], Sort::integer());
                return linear_or_fail(r, [&] { return Expr::scale(-1, a); });
            }
            expect_sort(r, Sort::boolean(), expected);
            return Expr::not_(build(r.args[0], Sort::boolean()));
        case Raw::Binary: return build_binary(r, expected);
        case Raw::List: {
            auto elem = element_of(expected, AdtShape::List);
            if (!elem) elem = element_of(infer(r, std::nullopt), AdtShape::List);
            if (!elem) elem = Sort::integer();
            const Sort ls = p_.sorts.list_of(*elem);
            expect_sort(r, ls, expected);
            const std::size_t n = r.args.size() - (r.has_tail ? 1 : 0);
            Expr tail = r.has_tail ? build(r.args.back(), ls) : Expr::ctor(ls, SortTable::kNil, "nil", {});
            for (std::size_t i = n; i-- > 0;)
                tail = Expr::ctor(ls, SortTable::kCons, "cons", {build(r.args[i], *elem), tail});
            return tail;
        }
        case Raw::App: return build_app(r, expected);
        }
        fail_at(ParseErrorKind::Syntax, r, "unsupported term");
    }

    template <class F>
    Expr linear_or_fail(const Raw& r, F&& f) {
        try {
            return f();
        } catch (const std::invalid_argument&) {
            fail_at(ParseErrorKind::Sort, r, "non-linear or unsupported arithmetic");
        }
    }

    Expr build_binary(const Raw& r, std::optional<Sort> expected) {
        const std::string& op = r.text;
        if (is_arith(op)) {
            expect_sort(r, Sort::integer(), expected);
            Expr a = build(r.args[0], Sort::integer());
            Expr b = build(r.args[1], Sort::integer());
            if (op == "+") return linear_or_fail(r, [&] { return Expr::add(a, b); });
            if (op == "-") return linear_or_fail(r, [&] { return Expr::add(a, Expr::scale(-1, b)); });
            if (a.op() == Op::IntConst) return linear_or_fail(r, [&] { return Expr::scale(a.value(), b); });
            if (b.op() == Op::IntConst) return linear_or_fail(r, [&] { return Expr::scale(b.value(), a); });
            fail_at(ParseErrorKind::Sort, r, "non-linear multiplication");
        }
        expect_sort(r, Sort::boolean(), expected);
        if (is_compare(op)) {
            Expr a = build(r.args[0], Sort::integer());
            Expr b = build(r.args[1], Sort::integer());
            Op o = op == "<" ? Op::Lt : op == ">" ? Op::Gt : op == ">=" ? Op::Ge : Op::Le;
            return Expr::rel(o, a, b);
        }
        if (op == "&" || op == "\\/") {
            const Op o = op == "&" ? Op::And : Op::Or;
            std::vector<Expr> parts;
            for (const auto& side : r.args) {
                Expr e = build(side, Sort::boolean());
                if (e.op() == o) parts.insert(parts.end(), e.args().begin(), e.args().end());
                else parts.push_back(e);
            }
            return o == Op::And ? Expr::and_(std::move(parts)) : Expr::or_(std::move(parts));
        }
        if (op == "=>") return Expr::implies(build(r.args[0], Sort::boolean()), build(r.args[1], Sort::boolean()));
        if (op == "<=>") return Expr::iff(build(r.args[0], Sort::boolean()), build(r.args[1], Sort::boolean()));
        auto s = infer(r.args[0], std::nullopt);
        if (!s) s = infer(r.args[1], std::nullopt);
        if (!s) s = Sort::integer();
        Expr eq = Expr::eq(build(r.args[0], s), build(r.args[1], s));
        return op == "!=" ? Expr::not_(eq) : eq;
    }

    Expr build_app(const Raw& r, std::optional<Sort> expected) {
        if ((r.text == "true" || r.text == "false") && r.args.empty()) {
            expect_sort(r, Sort::boolean(), expected);
            return Expr::bool_const(r.text == "true");
        }
        if (r.text == "ite" && r.args.size() == 3) {
            auto s = expected ? expected : infer(r, std::nullopt);
            if (!s) s = Sort::integer();
            return Expr::ite(build(r.args[0], Sort::boolean()), build(r.args[1], s), build(r.args[2], s));
        }
        if ((r.text == "leaf" && r.args.empty()) || (r.text == "node" && r.args.size() == 3)) {
            auto elem = element_of(expected, AdtShape::Tree);
            if (!elem) elem = element_of(infer(r, std::nullopt), AdtShape::Tree);
            if (!elem) elem = Sort::integer();
            const Sort ts = p_.sorts.tree_of(*elem);
            expect_sort(r, ts, expected);
            if (r.text == "leaf") return Expr::ctor(ts, SortTable::kLeaf, "leaf", {});
            return Expr::ctor(ts, SortTable::kNode, "node",
                              {build(r.args[0], ts), build(r.args[1], *elem), build(r.args[2], ts)});
        }
        if (auto ctor = p_.sorts.find_user_ctor(r.text)) {
            const CtorDecl& cd = p_.sorts.adt(ctor->first).ctors[ctor->second];
            expect_sort(r, ctor->first, expected);
            if (cd.args.size() != r.args.size())
                fail_at(ParseErrorKind::Sort, r,
                        "constructor '" + r.text + "' expects " + std::to_string(cd.args.size()) + " arguments");
            std::vector<Expr> args;
            for (std::size_t i = 0; i < r.args.size(); ++i) args.push_back(build(r.args[i], cd.args[i]));
            return Expr::ctor(ctor->first, ctor->second, r.text, std::move(args));
        }
        infer_app(r, expected);  // reports the error
        fail_at(ParseErrorKind::Syntax, r, "unsupported term");
    }

    Expr displace(const Expr& term, std::vector<Expr>& extra) {
        Expr v = names_.fresh_var("V", term.sort());
        extra.push_back(Expr::eq(v, term));
        return v;
    }

    Expr normalize_pattern(const Expr& t, std::vector<Expr>& extra) {
        if (t.is_var()) return t;
        if (t.op() == Op::Ctor) {
            std::vector<Expr> args;
            for (const auto& a : t.args()) args.push_back(normalize_pattern(a, extra));
            return Expr::ctor(t.sort(), t.ctor_index(), t.name(), std::move(args));
        }
        return displace(t, extra);
    }

    Atom normalize_head(Atom a, std::vector<Expr>& extra) {
        for (auto& x : a.args) x = normalize_pattern(x, extra);
        return a;
    }

    Atom normalize_body_atom(Atom a, std::vector<Expr>& extra) {
        std::set<std::string> seen;
        for (auto& x : a.args) {
            if (x.is_var() && seen.insert(x.name()).second) continue;
            x = displace(x, extra);
        }
        return a;
    }

    Problem& p_;
    NameSupply& names_;
    std::map<std::string, Sort> env_;
    bool changed_ = false;
    int next_id_ = 1;
    std::vector<std::pair<int, int>> query_pos_;
};

void check_name(const std::string& name, int line, int col, const char* what) {
    if (reserved_names().count(name) || name.rfind("true_", 0) == 0)
        throw ParseError(ParseErrorKind::Declaration, line, col, std::string(what) + " name '" + name + "' is reserved");
}

}  // namespace

Problem parse_problem(std::string_view text) {
    RawFile raw = RawParser(Lexer(text).run()).run();
    Problem p;
    NameSupply names;
    Elaborator elab(p, names);

    std::vector<Sort> user;
    for (const auto& d : raw.sorts) {
        check_name(d.name, d.line, d.col, "sort");
        if (d.name.rfind("list_", 0) == 0 || d.name.rfind("tree_", 0) == 0)
            throw ParseError(ParseErrorKind::Declaration, d.line, d.col, "sort name '" + d.name + "' is reserved");
        try {
            user.push_back(p.sorts.declare_user(d.name));
        } catch (const std::invalid_argument& e) {
            throw ParseError(ParseErrorKind::Declaration, d.line, d.col, e.what());
        }
    }
    std::set<std::string> ctor_names;
    for (std::size_t i = 0; i < raw.sorts.size(); ++i) {
        for (const auto& [name, args] : raw.sorts[i].ctors) {
            check_name(name, raw.sorts[i].line, raw.sorts[i].col, "constructor");
            if (!ctor_names.insert(name).second)
                throw ParseError(ParseErrorKind::Declaration, raw.sorts[i].line, raw.sorts[i].col,
                                 "constructor '" + name + "' declared twice");
            std::vector<Sort> sorts;
            for (const auto& a : args) sorts.push_back(elab.resolve_sort(a));
            p.sorts.add_ctor(user[i], name, std::move(sorts));
        }
    }
    for (const auto& d : raw.preds) {
        check_name(d.name, d.line, d.col, "predicate");
        if (ctor_names.count(d.name))
            throw ParseError(ParseErrorKind::Declaration, d.line, d.col, "'" + d.name + "' is a constructor");
        PredDecl decl{d.name, {}, d.cata ? PredKind::Cata : PredKind::Program, d.roles};
        for (const auto& s : d.sorts) decl.args.push_back(elab.resolve_sort(s));
        if (d.cata) {
            int adt = 0;
            for (std::size_t i = 0; i < decl.args.size(); ++i) {
                const bool is_adt = decl.roles[i] == ArgRole::Adt;
                adt += is_adt ? 1 : 0;
                if (is_adt != decl.args[i].is_adt())
                    throw ParseError(ParseErrorKind::Declaration, d.line, d.col,
                                     "catamorphism '" + d.name + "': the adt argument must be the only ADT-sorted one");
            }
            if (adt != 1)
                throw ParseError(ParseErrorKind::Declaration, d.line, d.col,
                                 "catamorphism '" + d.name + "' needs exactly one adt argument");
        }
        try {
            p.declare(std::move(decl));
        } catch (const std::invalid_argument& e) {
            throw ParseError(ParseErrorKind::Declaration, d.line, d.col, e.what());
        }
    }
    for (const auto& c : raw.clauses) elab.clause(c);
    elab.finish_queries();
    return p;
}

}  // namespace chcmq
