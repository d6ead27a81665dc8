#include "chcmq/transformer.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace chcmq {

namespace {

Expr conjoin(const Expr& a, const Expr& b) {
    std::vector<Expr> parts = conjuncts(a);
    for (auto& x : conjuncts(b)) parts.push_back(std::move(x));
    if (parts.empty()) return Expr::tt();
    if (parts.size() == 1) return parts.front();
    return Expr::and_(std::move(parts));
}

Expr conjoin_all(const std::vector<Expr>& parts) {
    Expr out = Expr::tt();
    for (const auto& p : parts) out = conjoin(out, p);
    return out;
}

std::set<std::string> adt_names(const Atom& a) { return vars_of(a, VarFilter::Adt).names(); }

bool intersects(const std::set<std::string>& a, const std::set<std::string>& b) {
    return std::any_of(a.begin(), a.end(), [&](const std::string& x) { return b.count(x) != 0; });
}

// Binds every variable of `vars` not yet bound in `s` to a fresh one.
void bind_fresh(Substitution& s, const VarList& vars, NameSupply& names) {
    for (const auto& v : vars)
        if (!s.contains(v.name())) s.bind(v, names.fresh_var(base_name(v.name()), v.sort()));
}

}  // namespace

Clause Definition::clause() const {
    Clause c;
    c.head = head;
    c.constraint = constraint;
    c.body = catas;
    c.body.push_back(atom);
    c.origin = Origin::R1;
    c.id = clause_id;
    return c;
}

const Definition* DefinitionSet::for_pred(const std::string& pred) const {
    for (const auto& d : defs_)
        if (d.atom.pred == pred) return &d;
    return nullptr;
}

std::vector<const Definition*> DefinitionSet::for_true(const std::string& true_pred) const {
    std::vector<const Definition*> out;
    for (const auto& d : defs_)
        if (d.atom.pred == true_pred) out.push_back(&d);
    return out;
}

const Definition* DefinitionSet::by_name(const std::string& name) const {
    for (const auto& d : defs_)
        if (d.name() == name) return &d;
    return nullptr;
}

void DefinitionSet::put(Definition d) {
    if (d.atom.pred.rfind("true_", 0) != 0)
        for (auto& old : defs_)
            if (old.atom.pred == d.atom.pred) {
                old = std::move(d);
                return;
            }
    defs_.push_back(std::move(d));
}

std::vector<const Definition*> DefinitionSet::all() const {
    std::vector<const Definition*> out;
    for (const auto& d : defs_) out.push_back(&d);
    std::sort(out.begin(), out.end(), [](const Definition* a, const Definition* b) { return a->serial < b->serial; });
    return out;
}

bool DefinitionSet::is_monovariant(const Problem& p) const {
    std::set<std::string> seen;
    for (const auto& d : defs_)
        if (p.kind(d.atom.pred) == PredKind::Program && !seen.insert(d.atom.pred).second) return false;
    return true;
}

const char* define_case_name(DefineCase c) {
    switch (c) {
    case DefineCase::Skip: return "skip";
    case DefineCase::Extend: return "extend";
    case DefineCase::Project: return "project";
    }
    return "?";
}

std::string DerivationLog::text() const {
    std::ostringstream out;
    out << "% exploration: " << iterations << " iterations\n";
    for (const auto& e : exploration) {
        out << "%  [" << e.iteration << "] " << define_case_name(e.kind) << ' ' << e.pred << " -> " << e.definition;
        if (!e.replaced.empty()) out << " (replaces " << e.replaced << ')';
        out << '\n';
    }
    for (const auto& w : warnings) out << "% warning: " << w << '\n';
    for (const auto& s : steps) {
        out << origin_name(s.rule);
        if (!s.inputs.empty()) {
            out << " on";
            for (int id : s.inputs) out << " #" << id;
        }
        if (!s.definitions.empty()) {
            out << " using";
            for (const auto& d : s.definitions) out << ' ' << d;
        }
        out << '\n';
        for (const auto& c : s.outputs) out << "  #" << c.id << "  " << to_string(canonical(c)) << '\n';
    }
    return out.str();
}

std::string DerivationLog::json() const {
    using nlohmann::json;
    json j;
    j["iterations"] = iterations;
    j["exploration"] = json::array();
    for (const auto& e : exploration)
        j["exploration"].push_back({{"iteration", e.iteration},
                                    {"case", define_case_name(e.kind)},
                                    {"pred", e.pred},
                                    {"definition", e.definition},
                                    {"replaced", e.replaced},
                                    {"clause", e.clause}});
    j["warnings"] = warnings;
    j["steps"] = json::array();
    for (const auto& s : steps) {
        json outs = json::array();
        for (const auto& c : s.outputs) outs.push_back({{"id", c.id}, {"clause", to_string(canonical(c))}});
        j["steps"].push_back(
            {{"rule", origin_name(s.rule)}, {"inputs", s.inputs}, {"definitions", s.definitions}, {"outputs", outs}});
    }
    return j.dump(2) + "\n";
}

Transformer::Transformer(Problem& p, ConstraintEngine& engine, TransformOptions options)
    : p_(p), engine_(engine), options_(options) {
    classify_predicates(p_);
    check_all_schemas(p_);
    queries_ = validate_queries(p_);
    for (const auto& q : queries_) {
        if (query_of_.count(q.program_atom.pred))
            throw TransformError("two queries for '" + q.program_atom.pred + "'");
        query_of_[q.program_atom.pred] = &q;
    }
    for (const auto* set : {&p_.program, &p_.property, &p_.queries})
        for (const auto& c : *set) {
            names_.reserve(c);
            next_id_ = std::max(next_id_, c.id + 1);
        }
}

bool Transformer::is_program_atom(const Atom& a) const {
    const PredKind k = p_.kind(a.pred);
    return k == PredKind::Program || k == PredKind::True;
}

std::string Transformer::fresh_pred() {
    std::string name;
    do name = "new" + std::to_string(++pred_counter_);
    while (p_.find(name));
    return name;
}

std::vector<std::pair<Clause, std::size_t>> Transformer::resolvents(const Clause& c, std::size_t atom_index) {
    const Atom a = c.body.at(atom_index);
    std::vector<Clause> defining;
    for (const Clause* k : p_.clauses_of(a.pred)) defining.push_back(*k);
    std::vector<std::pair<Clause, std::size_t>> out;
    for (const auto& k : defining) {
        const Clause kr = rename_fresh(k, names_);
        const auto theta = mgu(a, *kr.head);
        if (!theta) continue;
        const Substitution s = theta->resolved();
        Clause r;
        if (c.head) r.head = s.apply(*c.head);
        r.constraint = conjoin(s.apply(c.constraint), s.apply(kr.constraint));
        for (std::size_t i = 0; i < atom_index; ++i) r.body.push_back(s.apply(c.body[i]));
        for (const auto& b : kr.body) r.body.push_back(s.apply(b));
        for (std::size_t i = atom_index + 1; i < c.body.size(); ++i) r.body.push_back(s.apply(c.body[i]));
        if (!engine_.maybe_satisfiable(r.constraint)) continue;
        r.origin = Origin::R2;
        out.emplace_back(std::move(r), kr.body.size());
    }
    return out;
}

std::vector<Clause> Transformer::one_step_unfold(const Clause& c, std::size_t atom_index) {
    std::vector<Clause> out;
    for (auto& [r, n] : resolvents(c, atom_index)) {
        r.id = fresh_clause_id();
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

// Keeps the first of two catamorphism atoms with equal inputs and ADT
// argument and equates their outputs.
void merge_functional(const Problem& p, Clause& c) {
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t i = 0; i < c.body.size() && !changed; ++i) {
            if (!p.is_cata(c.body[i])) continue;
            const CataArgs ai = p.cata_args(c.body[i]);
            for (std::size_t j = i + 1; j < c.body.size(); ++j) {
                if (c.body[j].pred != c.body[i].pred) continue;
                const CataArgs aj = p.cata_args(c.body[j]);
                if (ai.adt != aj.adt || ai.in != aj.in) continue;
                std::vector<Expr> eqs;
                for (std::size_t k = 0; k < ai.out.size(); ++k)
                    if (ai.out[k] != aj.out[k]) eqs.push_back(Expr::eq(ai.out[k], aj.out[k]));
                c.constraint = conjoin(c.constraint, conjoin_all(eqs));
                c.body.erase(c.body.begin() + static_cast<std::ptrdiff_t>(j));
                changed = true;
                break;
            }
        }
    }
}

}  // namespace

std::vector<Clause> Transformer::unfold_rule(const Definition& d) {
    const Clause dc = d.clause();
    std::vector<Clause> out;
    std::function<void(Clause)> settle = [&](Clause e) {
        std::size_t idx = e.body.size();
        for (std::size_t i = 0; i < e.body.size(); ++i)
            if (p_.is_cata(e.body[i]) && !p_.cata_args(e.body[i]).adt.is_var()) {
                idx = i;
                break;
            }
        if (idx == e.body.size()) {
            merge_functional(p_, e);
            e.id = fresh_clause_id();
            out.push_back(std::move(e));
            return;
        }
        const int depth = ctor_depth(p_.cata_args(e.body[idx]).adt);
        for (auto& [r, n] : resolvents(e, idx)) {
            for (std::size_t i = idx; i < idx + n; ++i)
                if (p_.is_cata(r.body[i]) && ctor_depth(p_.cata_args(r.body[i]).adt) >= depth)
                    throw TransformError("unfolding " + to_string(e.body[idx]) + " does not decrease its ADT argument");
            settle(std::move(r));
        }
    };
    for (auto& [r, n] : resolvents(dc, dc.body.size() - 1)) settle(std::move(r));
    return out;
}

std::vector<Atom> Transformer::catas_of(const Clause& c, const Atom& a) const {
    const std::set<std::string> vs = adt_names(a);
    std::vector<Atom> out;
    for (const auto& b : c.body)
        if (p_.is_cata(b) && intersects(vs, free_vars(p_.cata_args(b).adt).names())) out.push_back(b);
    return out;
}

std::vector<Atom> Transformer::anchors(const Clause& c) {
    std::vector<Atom> out;
    std::set<std::string> covered;
    for (const auto& b : c.body)
        if (is_program_atom(b)) {
            out.push_back(b);
            for (const auto& v : adt_names(b)) covered.insert(v);
        }
    std::set<std::string> orphan_vars;
    for (const auto& b : c.body) {
        if (!p_.is_cata(b)) continue;
        const Expr adt = p_.cata_args(b).adt;
        if (intersects(free_vars(adt).names(), covered)) continue;
        if (!adt.is_var())
            throw TransformError("catamorphism " + to_string(b) + " has a non-variable ADT argument in " + to_string(c));
        if (orphan_vars.insert(adt.name()).second) out.push_back(Atom{p_.true_pred(adt.sort()).name, {adt}});
    }
    return out;
}

Clause Transformer::strengthen_clause(const Clause& c) {
    if (c.origin != Origin::R2) throw TransformError("strengthening applies to unfolded clauses only");
    Clause out = c;
    out.origin = Origin::R3;
    out.id = fresh_clause_id();
    std::vector<Atom> program;
    for (const auto& b : c.body)
        if (is_program_atom(b)) program.push_back(b);

    for (const auto& a : program) {
        const auto it = query_of_.find(a.pred);
        if (it == query_of_.end()) continue;
        const QuerySpec& q = *it->second;
        Substitution s;
        for (std::size_t i = 0; i < a.args.size(); ++i) s.bind(q.program_atom.args[i], a.args[i]);
        const std::vector<Atom> local = catas_of(out, a);

        // Each query catamorphism either matches a distinct local one (B1) or
        // has no local counterpart on the same predicate and ADT term (B2).
        std::vector<bool> used(local.size(), false);
        std::vector<std::size_t> added;
        std::function<bool(std::size_t, Substitution&)> place = [&](std::size_t i, Substitution& cur) {
            if (i == q.catas.size()) return true;
            const CataAtomSpec& qc = q.catas[i];
            const Expr adt = cur.apply(qc.adt);
            bool slot = false;
            for (std::size_t j = 0; j < local.size(); ++j) {
                if (local[j].pred != qc.atom.pred || p_.cata_args(local[j]).adt != adt) continue;
                slot = true;
                if (used[j]) continue;
                const CataArgs la = p_.cata_args(local[j]);
                if (!std::all_of(la.out.begin(), la.out.end(), [](const Expr& y) { return y.is_var(); })) continue;
                Substitution trial = cur;
                if (!match(qc.atom, local[j], trial)) continue;
                used[j] = true;
                if (place(i + 1, trial)) {
                    cur = trial;
                    return true;
                }
                used[j] = false;
            }
            if (slot) return false;
            added.push_back(i);
            if (place(i + 1, cur)) return true;
            added.pop_back();
            return false;
        };
        if (!place(0, s)) {
            log_.warnings.push_back("query for '" + a.pred + "' not applicable to " + to_string(a) + " in clause #" +
                                    std::to_string(c.id));
            continue;
        }
        bind_fresh(s, vars_of(q.reassemble()), names_);
        out.constraint = conjoin(out.constraint, simplify(Expr::not_(s.apply(q.constraint))));
        std::size_t at = 0;
        while (at < out.body.size() && !is_program_atom(out.body[at])) ++at;
        std::vector<Atom> b2;
        for (std::size_t i : added) b2.push_back(s.apply(q.catas[i].atom));
        out.body.insert(out.body.begin() + static_cast<std::ptrdiff_t>(at), b2.begin(), b2.end());
    }
    return out;
}

std::optional<DefinitionMatch> Transformer::match_definition(const Definition& d, const Atom& atom,
                                                             const std::vector<Atom>& catas, const Expr& c) {
    Substitution base;
    if (!match(d.atom, atom, base)) return std::nullopt;
    const VarList dvars = vars_of(d.clause());
    std::vector<bool> used(d.catas.size(), false);
    int budget = options_.match_budget;
    std::optional<DefinitionMatch> found;
    std::function<bool(std::size_t, const Substitution&)> go = [&](std::size_t i, const Substitution& s) {
        if (i == catas.size()) {
            if (--budget < 0) return true;
            Substitution full = s;
            bind_fresh(full, dvars, names_);
            if (!d.constraint.is_true() && !engine_.entails(c, full.apply(d.constraint))) return false;
            found = DefinitionMatch{&d, std::move(full)};
            return true;
        }
        for (std::size_t j = 0; j < d.catas.size(); ++j) {
            if (used[j] || d.catas[j].pred != catas[i].pred) continue;
            Substitution trial = s;
            if (!match(d.catas[j], catas[i], trial)) continue;
            used[j] = true;
            const bool stop = go(i + 1, trial);
            used[j] = false;
            if (stop) return true;
        }
        return false;
    };
    go(0, base);
    return found;
}

bool Transformer::def_extends(const Definition& d1, const Definition& d2) {
    return match_definition(d2, d1.atom, d1.catas, d1.constraint).has_value();
}

Definition Transformer::make_definition(std::vector<Atom> catas, Atom atom, Expr constraint) {
    // Definition atoms take distinct variables; repeats become equalities.
    std::set<std::string> seen;
    for (auto& x : atom.args) {
        if (x.is_var() && seen.insert(x.name()).second) continue;
        const Expr v = names_.fresh_var(x.is_var() ? base_name(x.name()) : "T", x.sort());
        constraint = conjoin(constraint, Expr::eq(v, x));
        x = v;
    }
    Clause tmp;
    tmp.constraint = constraint;
    tmp.body = std::move(catas);
    tmp.body.push_back(std::move(atom));
    tmp = rename_fresh(tmp, names_);

    Definition d;
    d.atom = tmp.body.back();
    tmp.body.pop_back();
    d.catas = std::move(tmp.body);
    d.constraint = tmp.constraint;
    VarList head;
    for (const auto& b : d.catas)
        for (const auto& v : vars_of(b)) head.add(v);
    for (const auto& v : vars_of(d.atom)) head.add(v);
    for (const auto& v : free_vars(d.constraint))
        if (!head.contains(v.name()))
            throw TransformError("definition constraint mentions " + v.name() + " outside its atoms");
    const std::set<std::string> atom_adts = adt_names(d.atom);
    for (const auto& b : d.catas)
        if (const auto own = adt_names(b);
            own.empty() || !std::includes(atom_adts.begin(), atom_adts.end(), own.begin(), own.end()))
            throw TransformError("catamorphism " + to_string(b) + " is not over " + to_string(d.atom));

    PredDecl decl;
    decl.name = fresh_pred();
    decl.kind = PredKind::Definition;
    for (const auto& v : head) decl.args.push_back(v.sort());
    p_.declare(decl);
    d.head = Atom{decl.name, head.vars()};
    d.serial = serial_++;
    d.clause_id = fresh_clause_id();
    introduced_.push_back(d);
    return d;
}

std::optional<Definition> Transformer::extend(const Definition& d, const Atom& atom, const std::vector<Atom>& catas,
                                              const Expr& c) {
    Substitution s;
    if (!match(d.atom, atom, s)) throw TransformError("cannot align " + to_string(atom) + " with " + to_string(d.atom));
    // Clause variables back to definition variables.
    Substitution back;
    for (const auto& v : d.atom.args) {
        const Expr x = s.apply(v);
        if (x.is_var() && !back.contains(x.name())) back.bind(x, v);
    }
    std::vector<Atom> merged = d.catas;
    const std::size_t original = merged.size();
    for (const auto& f : catas) {
        const CataArgs fa = p_.cata_args(f);
        for (const auto& x : fa.in) bind_fresh(back, free_vars(x), names_);
        bind_fresh(back, free_vars(fa.adt), names_);
        std::vector<Expr> in;
        for (const auto& x : fa.in) in.push_back(back.apply(x));
        const Expr adt = back.apply(fa.adt);
        bool duplicate = false;
        for (const auto& g : merged) {
            if (g.pred != f.pred) continue;
            const CataArgs ga = p_.cata_args(g);
            if (ga.adt != adt || ga.in != in) continue;
            for (std::size_t k = 0; k < fa.out.size(); ++k)
                if (fa.out[k].is_var() && !back.contains(fa.out[k].name())) back.bind(fa.out[k], ga.out[k]);
            duplicate = true;
            break;
        }
        if (duplicate) continue;
        for (const auto& y : fa.out) bind_fresh(back, free_vars(y), names_);
        merged.push_back(back.apply(f));
    }
    bind_fresh(back, free_vars(c), names_);
    const Expr widened = engine_.generalize(d.constraint, back.apply(c));
    if (merged.size() == original && engine_.equivalent(widened, d.constraint)) return std::nullopt;
    return make_definition(std::move(merged), d.atom, widened);
}

DefinitionSet Transformer::define_fn(const std::vector<Clause>& cls, DefinitionSet defs, int iteration) {
    for (const auto& c : cls) {
        for (const auto& a : anchors(c)) {
            const std::vector<Atom> local = catas_of(c, a);
            DefineEvent ev;
            ev.iteration = iteration;
            ev.pred = a.pred;
            ev.clause = to_string(canonical(c));
            const Definition* cover = nullptr;
            const Definition* current = nullptr;
            if (p_.kind(a.pred) == PredKind::True) {
                // Only a definition over exactly these catamorphisms is reused.
                for (const Definition* d : defs.for_true(a.pred))
                    if (d->catas.size() == local.size() && match_definition(*d, a, local, c.constraint)) {
                        cover = d;
                        break;
                    }
            } else {
                current = defs.for_pred(a.pred);
                if (current && match_definition(*current, a, local, c.constraint)) cover = current;
            }
            if (cover) {
                ev.kind = DefineCase::Skip;
                ev.definition = cover->name();
            } else if (current) {
                auto ext = extend(*current, a, local, c.constraint);
                if (!ext) {
                    ev.kind = DefineCase::Skip;
                    ev.definition = current->name();
                    log_.warnings.push_back("definition " + current->name() + " kept although it does not cover " +
                                            to_string(a) + " in clause #" + std::to_string(c.id));
                } else {
                    ev.kind = DefineCase::Extend;
                    ev.replaced = current->name();
                    ev.definition = ext->name();
                    defs.put(std::move(*ext));
                }
            } else {
                std::set<std::string> inputs;
                for (const auto& b : local)
                    for (const auto& x : p_.cata_args(b).in)
                        for (const auto& v : free_vars(x, VarFilter::Basic)) inputs.insert(v.name());
                Definition d = make_definition(local, a, engine_.project(c.constraint, inputs));
                ev.kind = DefineCase::Project;
                ev.definition = d.name();
                defs.put(std::move(d));
            }
            log_.exploration.push_back(std::move(ev));
        }
    }
    return defs;
}

const Transformer::Expansion& Transformer::expand(const Definition& d) {
    if (auto it = expansions_.find(d.name()); it != expansions_.end()) return it->second;
    Expansion e;
    e.unfolded = unfold_rule(d);
    for (const auto& c : e.unfolded) e.strengthened.push_back(strengthen_clause(c));
    return expansions_.emplace(d.name(), std::move(e)).first->second;
}

DefinitionSet Transformer::tau(const DefinitionSet& defs, int iteration) {
    if (defs.empty()) return define_fn(p_.queries, defs, iteration);
    std::vector<Clause> cls;
    const auto all = defs.all();
    for (auto it = all.rbegin(); it != all.rend(); ++it) {
        const auto& e = expand(**it);
        cls.insert(cls.end(), e.strengthened.begin(), e.strengthened.end());
    }
    return define_fn(cls, defs, iteration);
}

bool Transformer::content_equal(const DefinitionSet& a, const DefinitionSet& b) {
    if (a.size() != b.size()) return false;
    std::set<std::string> na, nb;
    for (const Definition* d : a.all()) na.insert(d->name());
    for (const Definition* d : b.all()) nb.insert(d->name());
    if (na == nb) return true;
    for (const Definition* d : a.all()) {
        bool found = false;
        for (const Definition* e : b.all())
            if (e->atom.pred == d->atom.pred && e->catas.size() == d->catas.size() && def_extends(*d, *e) &&
                def_extends(*e, *d)) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

DefinitionSet Transformer::lfp_tau(std::vector<DefinitionSet>* history) {
    DefinitionSet cur;
    if (history) history->push_back(cur);
    for (int i = 1; i <= options_.max_iterations; ++i) {
        DefinitionSet next = tau(cur, i);
        if (history) history->push_back(next);
        const bool done = content_equal(cur, next);
        cur = std::move(next);
        if (done) {
            log_.iterations = i;
            return cur;
        }
    }
    throw TransformError("no fixpoint of the definition operator within " + std::to_string(options_.max_iterations) +
                         " iterations");
}

Clause Transformer::fold_clause(const Clause& c, const DefinitionSet& defs) {
    if (c.origin == Origin::R1) throw TransformError("a definition is never folded");
    Clause out;
    out.head = c.head;
    out.constraint = c.constraint;
    out.origin = Origin::R4;
    out.id = fresh_clause_id();
    for (const auto& a : anchors(c)) {
        const std::vector<Atom> local = catas_of(c, a);
        std::vector<const Definition*> candidates;
        if (p_.kind(a.pred) == PredKind::True) {
            candidates = defs.for_true(a.pred);
            std::stable_sort(candidates.begin(), candidates.end(), [](const Definition* x, const Definition* y) {
                return x->catas.size() < y->catas.size();
            });
        } else if (const Definition* d = defs.for_pred(a.pred)) {
            candidates.push_back(d);
        }
        std::optional<DefinitionMatch> m;
        for (const Definition* d : candidates)
            if ((m = match_definition(*d, a, local, c.constraint))) break;
        if (!m) throw TransformError("no definition folds " + to_string(a) + " in " + to_string(c));
        out.body.push_back(m->renaming.apply(m->definition->head));
    }
    return out;
}

TransformResult transform_all(const Problem& p, ConstraintEngine& engine, TransformOptions options) {
    TransformResult r;
    r.problem = p;
    if (p.queries.empty()) return r;
    Transformer t(r.problem, engine, options);
    r.definitions = t.lfp_tau(&r.history);
    DerivationLog& log = t.log();

    std::vector<Clause> folded;
    for (const Definition* d : r.definitions.all()) log.steps.push_back({Origin::R1, {}, {d->name()}, {d->clause()}});
    for (const Definition* d : r.definitions.all()) {
        const auto& e = t.expand(*d);
        log.steps.push_back({Origin::R2, {d->clause_id}, {d->name()}, e.unfolded});
        for (std::size_t i = 0; i < e.unfolded.size(); ++i)
            log.steps.push_back({Origin::R3, {e.unfolded[i].id}, {}, {e.strengthened[i]}});
    }
    auto fold = [&](const Clause& c) {
        Clause f = t.fold_clause(c, r.definitions);
        std::vector<std::string> used;
        for (const auto& b : f.body) used.push_back(b.pred);
        log.steps.push_back({Origin::R4, {c.id}, used, {f}});
        folded.push_back(std::move(f));
    };
    for (const Definition* d : r.definitions.all())
        for (const auto& c : t.expand(*d).strengthened) fold(c);
    for (const auto& q : p.queries) fold(q);

    // Superseded definitions and the builtin true predicates do not occur
    // in the folded clauses.
    std::set<std::string> used;
    for (const auto& c : folded) {
        if (c.head) used.insert(c.head->pred);
        for (const auto& b : c.body) used.insert(b.pred);
    }
    Problem out;
    out.sorts = r.problem.sorts;
    for (const auto& d : r.problem.preds())
        if ((d.kind != PredKind::Definition && d.kind != PredKind::True) || used.count(d.name)) out.declare(d);
    for (auto& c : folded) (c.is_query() ? out.queries : out.program).push_back(std::move(c));
    r.problem = std::move(out);
    r.log = log;
    return r;
}

}  // namespace chcmq
