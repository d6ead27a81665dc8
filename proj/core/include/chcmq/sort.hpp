#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chcmq {

enum class SortKind : std::uint8_t { Int, Bool, Adt };

/// A sort is either one of the two basic sorts or a reference into a SortTable.
class Sort {
public:
    static constexpr Sort integer() { return Sort(SortKind::Int, 0); }
    static constexpr Sort boolean() { return Sort(SortKind::Bool, 0); }
    static constexpr Sort adt(std::uint32_t id) { return Sort(SortKind::Adt, id); }

    constexpr SortKind kind() const { return kind_; }
    constexpr std::uint32_t adt_id() const { return id_; }
    constexpr bool is_int() const { return kind_ == SortKind::Int; }
    constexpr bool is_bool() const { return kind_ == SortKind::Bool; }
    constexpr bool is_basic() const { return kind_ != SortKind::Adt; }
    constexpr bool is_adt() const { return kind_ == SortKind::Adt; }

    friend constexpr bool operator==(Sort, Sort) = default;
    friend constexpr auto operator<=>(Sort, Sort) = default;

private:
    constexpr Sort(SortKind k, std::uint32_t id) : kind_(k), id_(id) {}
    SortKind kind_;
    std::uint32_t id_;
};

struct CtorDecl {
    std::string name;      // surface name ("nil", "cons", "leaf", "node", or user name)
    std::string smt_name;  // name used in SMT-LIB output
    std::vector<Sort> args;
    std::vector<std::string> selectors;
};

enum class AdtShape : std::uint8_t { List, Tree, User };

struct AdtDecl {
    std::string name;      // surface spelling, e.g. "list(int)"
    std::string smt_name;  // e.g. "list_int"
    AdtShape shape = AdtShape::User;
    std::optional<Sort> element;  // for list/tree instances
    std::vector<CtorDecl> ctors;
};

/// Owns every algebraic data type of a problem. Builtin `list(S)` and
/// `tree(S)` instances are created on first use.
class SortTable {
public:
    Sort list_of(Sort elem);
    Sort tree_of(Sort elem);

    /// Declares a user ADT with no constructors yet; constructors are added
    /// with add_ctor once every sort name is known (allows recursion).
    Sort declare_user(const std::string& name);
    void add_ctor(Sort adt, const std::string& name, std::vector<Sort> args);

    const AdtDecl& adt(Sort s) const;
    std::size_t adt_count() const { return adts_.size(); }
    Sort adt_sort(std::size_t i) const { return Sort::adt(static_cast<std::uint32_t>(i)); }

    std::string name(Sort s) const;
    std::string smt_name(Sort s) const;

    std::optional<Sort> find_user(const std::string& name) const;
    /// Looks up a user constructor by surface name.
    std::optional<std::pair<Sort, int>> find_user_ctor(const std::string& name) const;

    /// Index of the nullary / recursive constructor for list and tree shapes.
    static constexpr int kNil = 0, kCons = 1, kLeaf = 0, kNode = 1;

private:
    Sort instance(AdtShape shape, Sort elem);
    std::string element_suffix(Sort elem) const;

    std::vector<AdtDecl> adts_;
};

}  // namespace chcmq
