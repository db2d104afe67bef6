#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fellgpd {

/// Index of an arrow inside one particular FiniteGroupoid.
enum class Arrow : std::uint32_t {};

constexpr std::size_t idx(Arrow a) noexcept { return static_cast<std::size_t>(a); }
constexpr Arrow arrow_at(std::size_t i) noexcept { return static_cast<Arrow>(i); }

class FiniteGroupoid;
using GroupoidPtr = std::shared_ptr<const FiniteGroupoid>;

/// Groupoid tables keyed by arrow names, as read from a file.
struct RawGroupoid {
  std::vector<std::string> arrows;
  std::vector<std::string> units;
  std::map<std::string, std::string> src;
  std::map<std::string, std::string> rng;
  std::map<std::string, std::string> inv;
  std::vector<std::array<std::string, 3>> comp;
};

/// Same tables, index based. `comp` lists (g1, g2, g1 g2).
struct GroupoidTables {
  std::vector<std::string> names;
  std::vector<bool> is_unit;
  std::vector<std::uint32_t> src;
  std::vector<std::uint32_t> rng;
  std::vector<std::uint32_t> inv;
  std::vector<std::array<std::uint32_t, 3>> comp;
};

/// A validated finite groupoid. Composition convention: (g, h) is
/// composable iff src(g) == rng(h), and then g·h runs from src(h) to rng(g).
/// Units are arrows. Immutable once built.
class FiniteGroupoid {
 public:
  std::size_t size() const noexcept { return names_.size(); }
  std::size_t unit_count() const noexcept { return units_.size(); }

  const std::string& name(Arrow a) const { return names_[idx(a)]; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::optional<Arrow> find(std::string_view name) const;
  /// Like find() but throws a Parse error naming the id.
  Arrow at(std::string_view name) const;

  Arrow src(Arrow a) const { return src_[idx(a)]; }
  Arrow rng(Arrow a) const { return rng_[idx(a)]; }
  Arrow inv(Arrow a) const { return inv_[idx(a)]; }
  bool is_unit(Arrow a) const { return is_unit_[idx(a)]; }

  std::span<const Arrow> units() const noexcept { return units_; }
  /// Arrows g with src(g) == u (the basis G_u of the regular representation).
  std::span<const Arrow> with_source(Arrow u) const { return with_source_[idx(u)]; }
  /// Arrows g with rng(g) == u.
  std::span<const Arrow> with_range(Arrow u) const { return with_range_[idx(u)]; }

  bool composable(Arrow g, Arrow h) const { return src(g) == rng(h); }
  std::optional<Arrow> compose(Arrow g, Arrow h) const;
  /// g·h; the pair must be composable.
  Arrow mul(Arrow g, Arrow h) const { return products_[pair_index(g, h)]; }

  /// Composable pairs are numbered 0..pair_count()-1; tables over G² (cocycles,
  /// bundle multiplication) are indexed this way.
  std::size_t pair_count() const noexcept { return products_.size(); }
  std::size_t pair_index(Arrow g, Arrow h) const {
    return pair_offset_[idx(g)] + pos_in_range_[idx(h)];
  }

  /// Calls f(g, h, g·h, pair_index) for every composable pair, g-major.
  template <class F>
  void for_each_pair(F&& f) const {
    for (std::size_t gi = 0; gi < size(); ++gi) {
      const Arrow g = arrow_at(gi);
      const auto right = with_range(src(g));
      for (std::size_t k = 0; k < right.size(); ++k) {
        const std::size_t p = pair_offset_[gi] + k;
        f(g, right[k], products_[p], p);
      }
    }
  }

  bool is_group() const noexcept { return units_.size() == 1; }
  GroupoidTables tables() const;

 private:
  friend GroupoidPtr build_groupoid(GroupoidTables tables);

  std::vector<std::string> names_;
  std::unordered_map<std::string, Arrow> index_;
  std::vector<bool> is_unit_;
  std::vector<Arrow> units_;
  std::vector<Arrow> src_;
  std::vector<Arrow> rng_;
  std::vector<Arrow> inv_;
  std::vector<std::vector<Arrow>> with_source_;
  std::vector<std::vector<Arrow>> with_range_;
  std::vector<std::size_t> pos_in_range_;
  std::vector<std::size_t> pair_offset_;
  std::vector<Arrow> products_;
};

/// Exhaustive validation of name-keyed tables. Throws Error with kinds
/// MissingComposite, IllegalComposite, UnitFailure, InverseFailure or
/// AssociativityFailure, and the offending arrows as witness.
GroupoidPtr validate_groupoid(const RawGroupoid& raw);

/// Exhaustive validation of index tables.
GroupoidPtr build_groupoid(GroupoidTables tables);

/// Builds the comp table by calling `compose(g, h)` on every composable pair,
/// then validates.
using ComposeFn = std::function<std::optional<std::size_t>(std::size_t, std::size_t)>;
GroupoidPtr make_groupoid(std::vector<std::string> names, std::vector<bool> is_unit,
                          std::vector<std::uint32_t> src, std::vector<std::uint32_t> rng,
                          std::vector<std::uint32_t> inv, const ComposeFn& compose);

/// A subgroupoid together with its embedding.
struct Subgroupoid {
  GroupoidPtr groupoid;
  std::vector<Arrow> to_parent;
  std::vector<std::optional<Arrow>> from_parent;
};

/// Restricts G to a subset closed under composition and inversion that also
/// contains the source and range units of its members. Throws NotASubgroupoid.
Subgroupoid restrict_to(const FiniteGroupoid& g, std::span<const Arrow> arrows);

/// Orbits of the unit space (units joined by an arrow), each sorted, ordered by
/// smallest member.
std::vector<std::vector<Arrow>> unit_orbits(const FiniteGroupoid& g);

/// Checks that `map` (indexed by arrows of a) is a groupoid isomorphism a -> b.
/// Returns a witness on failure.
std::optional<std::vector<std::string>> isomorphism_defect(const FiniteGroupoid& a,
                                                           const FiniteGroupoid& b,
                                                           std::span<const Arrow> map);

/// Backtracking search for an isomorphism a -> b. Intended for desk-scale inputs.
std::optional<std::vector<Arrow>> find_isomorphism(const FiniteGroupoid& a,
                                                   const FiniteGroupoid& b);

}  // namespace fellgpd
