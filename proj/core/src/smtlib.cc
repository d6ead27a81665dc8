#include "chcmq/smtlib.hpp"

#include <set>
#include <sstream>

namespace chcmq {

std::string smt_symbol(const std::string& name) {
    static const std::set<std::string> reserved = {"and", "or",     "not", "ite",   "distinct", "let", "forall",
                                                   "exists", "xor", "div", "mod",   "abs",      "true", "false",
                                                   "match", "par",  "_",   "as",    "assert",   "Int",  "Bool"};
    return reserved.count(name) ? "|" + name + "|" : name;
}

std::string smt_sort(const SortTable& sorts, Sort s) { return sorts.smt_name(s); }

std::string smt_datatypes(const SortTable& sorts) {
    if (sorts.adt_count() == 0) return "";
    std::ostringstream os;
    os << "(declare-datatypes (";
    for (std::size_t i = 0; i < sorts.adt_count(); ++i)
        os << (i ? " " : "") << '(' << sorts.adt(sorts.adt_sort(i)).smt_name << " 0)";
    os << ") (";
    for (std::size_t i = 0; i < sorts.adt_count(); ++i) {
        const AdtDecl& d = sorts.adt(sorts.adt_sort(i));
        os << (i ? " " : "") << '(';
        for (std::size_t c = 0; c < d.ctors.size(); ++c) {
            const CtorDecl& cd = d.ctors[c];
            os << (c ? " " : "") << '(' << cd.smt_name;
            for (std::size_t k = 0; k < cd.args.size(); ++k)
                os << " (" << cd.selectors[k] << ' ' << sorts.smt_name(cd.args[k]) << ')';
            os << ')';
        }
        os << ')';
    }
    os << "))\n";
    return os.str();
}

namespace {

void int_literal(std::ostream& os, std::int64_t v) {
    if (v < 0) os << "(- " << -v << ')';
    else os << v;
}

// Constructor SMT names live in the sort table; terms only keep the index.
struct Printer {
    const SortTable* sorts;

    void print(std::ostream& os, const Expr& e) const {
        switch (e.op()) {
        case Op::Var: os << smt_symbol(e.name()); return;
        case Op::IntConst: int_literal(os, e.value()); return;
        case Op::BoolConst: os << (e.value() ? "true" : "false"); return;
        case Op::Linear: {
            const bool wrap = e.args().size() + (e.value() != 0 ? 1 : 0) > 1;
            if (wrap) os << "(+";
            for (std::size_t i = 0; i < e.args().size(); ++i) {
                os << (wrap ? " " : "");
                if (e.coeffs()[i] == 1) {
                    os << smt_symbol(e.args()[i].name());
                } else {
                    os << "(* ";
                    int_literal(os, e.coeffs()[i]);
                    os << ' ' << smt_symbol(e.args()[i].name()) << ')';
                }
            }
            if (e.value() != 0) {
                os << ' ';
                int_literal(os, e.value());
            }
            if (wrap) os << ')';
            return;
        }
        case Op::Ctor: {
            const std::string name = sorts ? sorts->adt(e.sort()).ctors[e.ctor_index()].smt_name : e.name();
            if (e.args().empty()) {
                os << name;
                return;
            }
            os << '(' << name;
            for (const auto& a : e.args()) {
                os << ' ';
                print(os, a);
            }
            os << ')';
            return;
        }
        default: break;
        }
        const char* head = "";
        switch (e.op()) {
        case Op::Ite: head = "ite"; break;
        case Op::Not: head = "not"; break;
        case Op::And: head = "and"; break;
        case Op::Or: head = "or"; break;
        case Op::Implies: head = "=>"; break;
        case Op::Iff:
        case Op::Eq: head = "="; break;
        case Op::Lt: head = "<"; break;
        case Op::Le: head = "<="; break;
        case Op::Ge: head = ">="; break;
        case Op::Gt: head = ">"; break;
        default: break;
        }
        os << '(' << head;
        for (const auto& a : e.args()) {
            os << ' ';
            print(os, a);
        }
        os << ')';
    }
};

std::string term_text(const SortTable* sorts, const Expr& e) {
    std::ostringstream os;
    Printer{sorts}.print(os, e);
    return os.str();
}

std::string atom_text(const SortTable& sorts, const Atom& a) {
    if (a.args.empty()) return smt_symbol(a.pred);
    std::ostringstream os;
    os << '(' << smt_symbol(a.pred);
    for (const auto& x : a.args) os << ' ' << term_text(&sorts, x);
    os << ')';
    return os.str();
}

}  // namespace

std::string smt_term(const Expr& e) { return term_text(nullptr, e); }
std::string smt_term(const SortTable& sorts, const Expr& e) { return term_text(&sorts, e); }
std::string smt_atom(const SortTable& sorts, const Atom& a) { return atom_text(sorts, a); }

std::string emit_smtlib(const Problem& p) {
    std::vector<Clause> all;
    for (const auto* set : {&p.program, &p.property, &p.queries}) all.insert(all.end(), set->begin(), set->end());
    return emit_smtlib(p, all);
}

std::string emit_smtlib(const Problem& p, const std::vector<Clause>& clauses) {
    return "(set-logic HORN)\n" + emit_clause_assertions(p, clauses) + "(check-sat)\n";
}

std::string emit_clause_assertions(const Problem& p, const std::vector<Clause>& clauses) {
    std::ostringstream os;
    os << smt_datatypes(p.sorts);
    for (const auto& d : p.preds()) {
        os << "(declare-fun " << smt_symbol(d.name) << " (";
        for (std::size_t i = 0; i < d.args.size(); ++i) os << (i ? " " : "") << p.sorts.smt_name(d.args[i]);
        os << ") Bool)\n";
    }
    for (const auto& c : clauses) {
        std::vector<std::string> premises;
        for (const auto& k : conjuncts(c.constraint)) premises.push_back(term_text(&p.sorts, k));
        for (const auto& b : c.body) premises.push_back(atom_text(p.sorts, b));
        const std::string head = c.head ? atom_text(p.sorts, *c.head) : "false";
        std::string body;
        if (premises.empty()) {
            body = head;
        } else {
            std::string lhs = premises.size() == 1 ? premises[0] : "(and";
            if (premises.size() > 1) {
                for (const auto& x : premises) lhs += " " + x;
                lhs += ")";
            }
            body = "(=> " + lhs + " " + head + ")";
        }
        const VarList vars = vars_of(c);
        os << "(assert ";
        if (vars.empty()) {
            os << body;
        } else {
            os << "(forall (";
            bool first = true;
            for (const auto& v : vars) {
                os << (first ? "" : " ") << '(' << smt_symbol(v.name()) << ' ' << p.sorts.smt_name(v.sort()) << ')';
                first = false;
            }
            os << ") " << body << ')';
        }
        os << ")\n";
    }
    return os.str();
}

std::string smt_query_body(const SortTable& sorts, const Expr& formula) {
    std::ostringstream os;
    os << smt_datatypes(sorts);
    for (const auto& v : free_vars(formula))
        os << "(declare-const " << smt_symbol(v.name()) << ' ' << sorts.smt_name(v.sort()) << ")\n";
    os << "(assert " << term_text(&sorts, formula) << ")\n";
    return os.str();
}

}  // namespace chcmq
