#pragma once

// Insertion sort fixture: the derived predicates and the clauses of the
// reference derivation, written against corpus/isort.chc.

#include "support.hpp"

#include <set>
#include <utility>

namespace chcmq::test {

inline const char* const kDerivedDecls =
    "pred new1(list(int), bool, list(int), bool, list(int)).\n"
    "pred new2(list(int), bool, list(int), bool, list(int), bool, bool, int, bool, int, int, list(int)).\n"
    "pred new6(list(int), bool, bool, int).\n"
    "pred new7(list(int), bool, int, bool, list(int), bool, int, list(int), bool, int, bool, bool, int, bool).\n"
    "pred new13(list(int), bool, bool, int, list(int), bool, bool, int, int, bool, int, bool, int).\n"
    "pred new17(list(int), bool).\n"
    "pred new19(list(int), bool, bool, int).\n";

// Clauses written against the insertion sort declarations plus the derived
// predicates, in source order.
inline std::vector<Clause> clauses_in(const std::string& text, const std::string& decls = "") {
    const Problem base = load("isort.chc");
    Problem p = parse_problem(read_file(corpus_dir() / "isort.chc") + kDerivedDecls + decls + text);
    std::vector<Clause> out(p.program.begin() + static_cast<std::ptrdiff_t>(base.program.size()), p.program.end());
    out.insert(out.end(), p.queries.begin() + static_cast<std::ptrdiff_t>(base.queries.size()), p.queries.end());
    return out;
}

inline Clause clause_in(const std::string& text) { return clauses_in(text).at(0); }

inline const Clause& with_program_atom(const std::vector<Clause>& cls, const std::string& pred) {
    for (const auto& c : cls)
        for (const auto& b : c.body)
            if (b.pred == pred) return c;
    throw std::runtime_error("no clause calls " + pred);
}

// (program predicate, catamorphisms keyed by the argument position of their
// ADT variable); a definition without program atom is keyed by "true".
using Signature = std::pair<std::string, std::multiset<std::pair<std::string, int>>>;

inline Signature signature(const Problem& p, const Clause& def) {
    Signature s{"true", {}};
    const Atom* program = nullptr;
    for (const auto& b : def.body)
        if (!p.is_cata(b)) program = &b;
    if (program && p.kind(program->pred) == PredKind::Program) s.first = program->pred;
    for (const auto& b : def.body) {
        if (!p.is_cata(b)) continue;
        int pos = 0;
        if (s.first != "true")
            for (std::size_t i = 0; i < program->args.size(); ++i)
                if (program->args[i] == p.cata_args(b).adt) pos = static_cast<int>(i) + 1;
        s.second.insert({b.pred, pos});
    }
    return s;
}

inline const char* const kInsSortDefinition =
    "new1(A,B,C,D,E) :- ordered(A,B), ordered(C,D), ins_sort(A,E,C).\n";
inline const char* const kOrdInsDefinition =
    "new2(A,B,C,D,E,F,G,H,I,J,K,L) :- ordered(A,B), ordered(C,D), ordered(E,F), last(A,G,H), first(C,I,J), "
    "ord_ins(K,A,C,L,E).\n";
inline const char* const kInsSortUnfolded =
    "new1(A,B,A,C,[]) :- B = C, ordered(A,B).\n"
    "new1(A,B,C,D,[E|F]) :- ordered(A,B), ordered(C,D), empty_list(G), ord_ins(E,G,A,F,C).\n";
inline const char* const kStrengthenedRecursive =
    "new1(A,B,C,D,[E|F]) :- (L & B & ((J & H) => K =< I) & (J => K =< E)) => D,\n"
    "    ordered(A,B), ordered(C,D), ordered(G,L), last(G,J,K), first(A,H,I),\n"
    "    empty_list(G), ord_ins(E,G,A,F,C).\n";
inline const char* const kFoldedClauseAndQuery =
    "new1(A,B,C,D,[E|F]) :- (G & B & ((H & I) => J =< K) & (H => J =< E)) => D,\n"
    "    new2(L,G,A,B,C,D,H,J,I,K,E,F), new19(L,G,H,J).\n"
    "false :- ~(A => B), new1(C,A,D,B,E).\n";
inline const char* const kFixpointDefinitions =
    "new1(A,B,C,D,E) :- ordered(A,B), ordered(C,D), ins_sort(A,E,C).\n"
    "new2(A,B,C,D,E,F,G,H,I,J,K,L) :- ordered(A,B), ordered(C,D), ordered(E,F), last(A,G,H), first(C,I,J),\n"
    "    ord_ins(K,A,C,L,E).\n"
    "new6(A,B,C,D) :- ordered(A,B), first(A,C,D).\n"
    "new7(A,B,C,D,E,F,G,H,I,J,K,L,M,N) :- first(A,B,C), ordered(A,D), last(E,F,G), first(H,I,J),\n"
    "    ordered(H,K), first(E,L,M), ordered(E,N), append(E,A,H).\n"
    "new13(A,B,C,D,E,F,G,H,I,J,K,L,M) :- ordered(A,B), last(A,C,D), ordered(E,F), last(E,G,H),\n"
    "    first(E,J,K), first(A,L,M), snoc(A,I,E).\n"
    "new17(A,B) :- ordered(A,B).\n"
    "new19(A,B,C,D) :- ordered(A,B), last(A,C,D), empty_list(A).\n";

}  // namespace chcmq::test
