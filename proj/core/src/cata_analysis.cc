#include "chcmq/cata_analysis.hpp"

#include "chcmq/smtlib.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace chcmq {

QueryError::QueryError(std::string condition, const std::string& msg)
    : AnalysisError("query condition (" + condition + "): " + msg), condition_(std::move(condition)) {}

std::map<std::string, PredKind> classify_predicates(const Problem& p) {
    std::map<std::string, PredKind> out;
    for (const auto& d : p.preds()) out.emplace(d.name, d.kind);
    for (const auto& c : p.program) {
        auto check = [&](const Atom& a) {
            if (out.at(a.pred) == PredKind::Cata)
                throw AnalysisError("catamorphism '" + a.pred + "' occurs in program clause " + to_string(c));
        };
        if (c.head) check(*c.head);
        for (const auto& b : c.body) check(b);
    }
    return out;
}

CataAtomSpec io_split(const Problem& p, const Atom& a) {
    CataArgs ca = p.cata_args(a);
    return {a, std::move(ca.in), std::move(ca.adt), std::move(ca.out)};
}

namespace {

[[noreturn]] void schema_error(const std::string& pred, const std::string& msg) {
    throw AnalysisError("catamorphism '" + pred + "': " + msg);
}

bool distinct_vars(const std::vector<Expr>& xs) {
    std::set<std::string> seen;
    for (const auto& x : xs)
        if (!x.is_var() || !seen.insert(x.name()).second) return false;
    return true;
}

std::vector<Sort> sorts_of(const PredDecl& d, ArgRole role) {
    std::vector<Sort> out;
    for (std::size_t i = 0; i < d.args.size(); ++i)
        if (d.roles[i] == role) out.push_back(d.args[i]);
    return out;
}

class SchemaChecker {
public:
    explicit SchemaChecker(const Problem& p) : p_(p) {}

    CatamorphismSchema check(const std::string& pred) {
        if (auto it = done_.find(pred); it != done_.end()) return it->second;
        if (!active_.insert(pred).second) schema_error(pred, "mutually recursive with its inner catamorphism");
        CatamorphismSchema s = shape(pred);
        if (!s.inner.empty()) {
            const CatamorphismSchema inner = check(s.inner);
            if (inner.inputs != s.inputs || inner.adt != s.adt)
                schema_error(pred, "inner catamorphism '" + s.inner + "' has different input sorts");
        }
        s.functionality_obligation = functionality(s);
        s.totality_obligation = totality(s);
        active_.erase(pred);
        done_.emplace(pred, s);
        return s;
    }

private:
    CatamorphismSchema shape(const std::string& pred) {
        const PredDecl* d = p_.find(pred);
        if (d == nullptr || d->kind != PredKind::Cata) schema_error(pred, "not declared as a catamorphism");
        CatamorphismSchema s;
        s.pred = pred;
        s.inputs = sorts_of(*d, ArgRole::In);
        s.adt = d->args[static_cast<std::size_t>(d->adt_position())];
        s.outputs = sorts_of(*d, ArgRole::Out);
        const AdtDecl& adt = p_.sorts.adt(s.adt);
        if (adt.shape == AdtShape::User) schema_error(pred, "the ADT argument must be a list or a tree");
        s.shape = adt.shape == AdtShape::List ? SchemaShape::List : SchemaShape::Tree;

        for (const auto& c : p_.property) {
            if (c.head->pred != pred) continue;
            const Expr adt_arg = p_.cata_args(*c.head).adt;
            if (adt_arg.op() != Op::Ctor) schema_error(pred, "head ADT argument must be a constructor pattern");
            const Clause*& slot = adt_arg.ctor_index() == 0 ? s.base : s.recursive;
            if (slot != nullptr)
                schema_error(pred, adt_arg.ctor_index() == 0 ? "more than one base clause"
                                                             : "more than one recursive clause");
            slot = &c;
        }
        if (s.base == nullptr) schema_error(pred, "missing base clause");
        if (s.recursive == nullptr) schema_error(pred, "missing recursive clause");
        check_base(s);
        check_recursive(s);
        s.combine = s.recursive->constraint;
        return s;
    }

    std::set<std::string> head_vars(const CatamorphismSchema& s, const Clause& c) {
        const CataArgs ca = p_.cata_args(*c.head);
        std::vector<Expr> xy = ca.in;
        xy.insert(xy.end(), ca.out.begin(), ca.out.end());
        if (!distinct_vars(xy)) schema_error(s.pred, "head inputs and outputs must be distinct variables");
        std::set<std::string> out;
        for (const auto& v : xy) out.insert(v.name());
        return out;
    }

    void check_base(const CatamorphismSchema& s) {
        head_vars(s, *s.base);
        if (!s.base->body.empty()) schema_error(s.pred, "base clause must not call other predicates");
    }

    void check_recursive(CatamorphismSchema& s) {
        const Clause& c = *s.recursive;
        std::set<std::string> taken = head_vars(s, c);
        const CataArgs head = p_.cata_args(*c.head);
        const Expr& pattern = head.adt;
        for (const auto& a : pattern.args()) {
            if (!a.is_var() || !taken.insert(a.name()).second)
                schema_error(s.pred, "recursive pattern arguments must be fresh distinct variables");
        }
        std::vector<std::string> subs;  // structural sub-ADT variables
        for (const auto& a : pattern.args())
            if (a.sort() == s.adt) subs.push_back(a.name());

        std::map<std::pair<std::string, std::string>, int> calls;  // (pred, sub) -> count
        for (const auto& b : c.body) {
            const PredDecl& bd = p_.pred(b.pred);
            if (bd.kind != PredKind::Cata) schema_error(s.pred, "recursive clause calls non-catamorphism '" + b.pred + "'");
            const CataArgs ca = p_.cata_args(b);
            if (!ca.adt.is_var() || std::find(subs.begin(), subs.end(), ca.adt.name()) == subs.end())
                schema_error(s.pred, "call '" + to_string(b) + "' is not on a direct sub-structure");
            if (ca.in != head.in) schema_error(s.pred, "call '" + to_string(b) + "' must pass the head inputs unchanged");
            for (const auto& y : ca.out)
                if (!y.is_var() || !taken.insert(y.name()).second)
                    schema_error(s.pred, "call '" + to_string(b) + "' must return fresh distinct variables");
            if (++calls[{b.pred, ca.adt.name()}] > 1)
                schema_error(s.pred, "repeated call of '" + b.pred + "' on " + ca.adt.name());
            if (b.pred != s.pred) {
                if (!s.inner.empty() && s.inner != b.pred)
                    schema_error(s.pred, "more than one inner catamorphism ('" + s.inner + "', '" + b.pred + "')");
                s.inner = b.pred;
            }
        }
    }

    // Property clauses of `pred` and of every catamorphism it depends on.
    std::vector<Clause> closure(const CatamorphismSchema& s) {
        std::vector<Clause> out;
        std::string cur = s.pred;
        std::set<std::string> seen;
        while (!cur.empty() && seen.insert(cur).second) {
            std::string next;
            for (const auto& c : p_.property)
                if (c.head->pred == cur) {
                    out.push_back(c);
                    for (const auto& b : c.body)
                        if (b.pred != cur) next = b.pred;
                }
            cur = next;
        }
        return out;
    }

    struct Probe {
        std::vector<Expr> in;
        Expr adt;
        std::vector<Expr> out1, out2;
    };

    Probe probe_vars(const CatamorphismSchema& s) {
        Probe pr;
        for (std::size_t i = 0; i < s.inputs.size(); ++i) pr.in.push_back(Expr::var("X" + std::to_string(i), s.inputs[i]));
        pr.adt = Expr::var("T", s.adt);
        for (std::size_t i = 0; i < s.outputs.size(); ++i) {
            pr.out1.push_back(Expr::var("Y" + std::to_string(i), s.outputs[i]));
            pr.out2.push_back(Expr::var("Z" + std::to_string(i), s.outputs[i]));
        }
        return pr;
    }

    Atom probe_atom(const CatamorphismSchema& s, const Probe& pr, const std::vector<Expr>& out) {
        const PredDecl& d = p_.pred(s.pred);
        Atom a{s.pred, {}};
        std::size_t in = 0, o = 0;
        for (auto role : d.roles) {
            if (role == ArgRole::In) a.args.push_back(pr.in[in++]);
            else if (role == ArgRole::Adt) a.args.push_back(pr.adt);
            else a.args.push_back(out[o++]);
        }
        return a;
    }

    std::string functionality(const CatamorphismSchema& s) {
        const Probe pr = probe_vars(s);
        std::vector<Expr> same;
        for (std::size_t i = 0; i < pr.out1.size(); ++i) same.push_back(Expr::eq(pr.out1[i], pr.out2[i]));
        Clause q;
        q.constraint = Expr::not_(Expr::and_(same));
        q.body = {probe_atom(s, pr, pr.out1), probe_atom(s, pr, pr.out2)};
        std::vector<Clause> clauses = closure(s);
        clauses.push_back(q);
        return emit_smtlib(p_, clauses);
    }

    std::string totality(const CatamorphismSchema& s) {
        const Probe pr = probe_vars(s);
        std::ostringstream os;
        os << emit_clause_assertions(p_, closure(s));
        auto binders = [&](const std::vector<Expr>& vs) {
            std::string b;
            for (const auto& v : vs) b += (b.empty() ? "(" : " (") + smt_symbol(v.name()) + " " + p_.sorts.smt_name(v.sort()) + ")";
            return b;
        };
        std::vector<Expr> inputs = pr.in;
        inputs.push_back(pr.adt);
        std::string body = "(not " + smt_atom(p_.sorts, probe_atom(s, pr, pr.out1)) + ")";
        if (!pr.out1.empty()) body = "(forall (" + binders(pr.out1) + ") " + body + ")";
        os << "(assert (exists (" << binders(inputs) << ") " << body << "))\n(check-sat)\n";
        return os.str();
    }

    const Problem& p_;
    std::map<std::string, CatamorphismSchema> done_;
    std::set<std::string> active_;
};

}  // namespace

CatamorphismSchema check_schema(const Problem& p, const std::string& pred) { return SchemaChecker(p).check(pred); }

std::vector<CatamorphismSchema> check_all_schemas(const Problem& p) {
    SchemaChecker checker(p);
    std::vector<CatamorphismSchema> out;
    for (const auto& d : p.preds())
        if (d.kind == PredKind::Cata) out.push_back(checker.check(d.name));
    return out;
}

Clause QuerySpec::reassemble() const {
    Clause c;
    c.constraint = constraint;
    for (const auto& a : catas) c.body.push_back(a.atom);
    c.body.push_back(program_atom);
    return c;
}

QuerySpec validate_query(const Problem& p, const Clause& q) {
    if (!q.is_query()) throw AnalysisError("not a query: " + to_string(q));
    QuerySpec spec;
    spec.query = &q;
    spec.constraint = q.constraint;
    std::vector<const Atom*> program;
    for (const auto& b : q.body) {
        const PredKind k = p.kind(b.pred);
        if (k == PredKind::Program || k == PredKind::True) program.push_back(&b);
        else if (k == PredKind::Cata) spec.catas.push_back(io_split(p, b));
        else throw QueryError("iii", "'" + b.pred + "' is neither a program predicate nor a catamorphism");
    }
    if (program.size() != 1)
        throw QueryError("i", "expected exactly one program atom, found " + std::to_string(program.size()));
    spec.program_atom = *program.front();
    if (!distinct_vars(spec.program_atom.args))
        throw QueryError("i", "arguments of " + to_string(spec.program_atom) + " must be distinct variables");

    std::set<std::string> z, xs, allowed;
    for (const auto& v : spec.program_atom.args) z.insert(v.name());
    allowed = z;
    for (const auto& c : spec.catas) {
        for (const auto& x : c.in) {
            for (const auto& v : free_vars(x)) xs.insert(v.name());
            if (!x.is_var()) throw QueryError("ii", "catamorphism input " + to_string(x) + " is not a variable");
        }
        for (const auto& y : c.out)
            if (y.is_var()) allowed.insert(y.name());
    }
    allowed.insert(xs.begin(), xs.end());
    for (const auto& v : free_vars(q.constraint))
        if (!allowed.count(v.name()))
            throw QueryError("ii", "constraint variable " + v.name() + " is not an input, output or program argument");

    std::set<std::string> outputs;
    for (const auto& c : spec.catas)
        for (const auto& y : c.out) {
            if (!y.is_var() || !y.sort().is_basic())
                throw QueryError("iv", "output " + to_string(y) + " of " + to_string(c.atom) + " must be a basic variable");
            if (!outputs.insert(y.name()).second)
                throw QueryError("iv", "output variable " + y.name() + " occurs twice");
            if (xs.count(y.name()) || z.count(y.name()))
                throw QueryError("iv", "output variable " + y.name() + " also occurs as an input or program argument");
        }
    for (const auto& c : spec.catas)
        if (!c.adt.is_var() || !z.count(c.adt.name()))
            throw QueryError("v", "ADT argument of " + to_string(c.atom) + " does not occur in " +
                                      to_string(spec.program_atom));
    return spec;
}

std::vector<QuerySpec> validate_queries(const Problem& p) {
    std::vector<QuerySpec> out;
    for (const auto& q : p.queries) out.push_back(validate_query(p, q));
    return out;
}

}  // namespace chcmq
