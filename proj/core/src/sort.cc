#include "chcmq/sort.hpp"

#include <stdexcept>

namespace chcmq {

std::string SortTable::element_suffix(Sort elem) const {
    switch (elem.kind()) {
    case SortKind::Int: return "int";
    case SortKind::Bool: return "bool";
    case SortKind::Adt: return adt(elem).smt_name;
    }
    return "?";
}

Sort SortTable::instance(AdtShape shape, Sort elem) {
    for (std::size_t i = 0; i < adts_.size(); ++i) {
        if (adts_[i].shape == shape && adts_[i].element == elem) return adt_sort(i);
    }
    const Sort self = adt_sort(adts_.size());
    const std::string suffix = element_suffix(elem);
    // list(int) and tree(int) get the short constructor names; every other
    // instance carries the element sort as a suffix so SMT names stay unique.
    const std::string tag = elem.is_int() ? "" : "_" + suffix;

    AdtDecl decl;
    decl.shape = shape;
    decl.element = elem;
    if (shape == AdtShape::List) {
        decl.name = "list(" + name(elem) + ")";
        decl.smt_name = "list_" + suffix;
        decl.ctors.push_back({"nil", "nil" + tag, {}, {}});
        decl.ctors.push_back({"cons", "cons" + tag, {elem, self}, {"head" + tag, "tail" + tag}});
    } else {
        decl.name = "tree(" + name(elem) + ")";
        decl.smt_name = "tree_" + suffix;
        decl.ctors.push_back({"leaf", "leaf" + tag, {}, {}});
        decl.ctors.push_back(
            {"node", "node" + tag, {self, elem, self}, {"left" + tag, "value" + tag, "right" + tag}});
    }
    adts_.push_back(std::move(decl));
    return self;
}

Sort SortTable::list_of(Sort elem) { return instance(AdtShape::List, elem); }
Sort SortTable::tree_of(Sort elem) { return instance(AdtShape::Tree, elem); }

Sort SortTable::declare_user(const std::string& name) {
    if (find_user(name)) throw std::invalid_argument("sort '" + name + "' declared twice");
    AdtDecl decl;
    decl.name = name;
    decl.smt_name = name;
    decl.shape = AdtShape::User;
    adts_.push_back(std::move(decl));
    return adt_sort(adts_.size() - 1);
}

void SortTable::add_ctor(Sort s, const std::string& name, std::vector<Sort> args) {
    auto& decl = adts_.at(s.adt_id());
    CtorDecl ctor{name, name, std::move(args), {}};
    for (std::size_t i = 0; i < ctor.args.size(); ++i)
        ctor.selectors.push_back(name + "_" + std::to_string(i));
    decl.ctors.push_back(std::move(ctor));
}

const AdtDecl& SortTable::adt(Sort s) const {
    if (!s.is_adt()) throw std::logic_error("not an ADT sort");
    return adts_.at(s.adt_id());
}

std::string SortTable::name(Sort s) const {
    switch (s.kind()) {
    case SortKind::Int: return "int";
    case SortKind::Bool: return "bool";
    case SortKind::Adt: return adt(s).name;
    }
    return "?";
}

std::string SortTable::smt_name(Sort s) const {
    switch (s.kind()) {
    case SortKind::Int: return "Int";
    case SortKind::Bool: return "Bool";
    case SortKind::Adt: return adt(s).smt_name;
    }
    return "?";
}

std::optional<Sort> SortTable::find_user(const std::string& name) const {
    for (std::size_t i = 0; i < adts_.size(); ++i)
        if (adts_[i].shape == AdtShape::User && adts_[i].name == name) return adt_sort(i);
    return std::nullopt;
}

std::optional<std::pair<Sort, int>> SortTable::find_user_ctor(const std::string& name) const {
    for (std::size_t i = 0; i < adts_.size(); ++i) {
        if (adts_[i].shape != AdtShape::User) continue;
        const auto& ctors = adts_[i].ctors;
        for (std::size_t c = 0; c < ctors.size(); ++c)
            if (ctors[c].name == name) return std::pair{adt_sort(i), static_cast<int>(c)};
    }
    return std::nullopt;
}

}  // namespace chcmq
