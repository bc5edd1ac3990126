#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace exlift {

using AtomId = std::uint32_t;

/// A total 0/1 assignment over the atom index.
class World {
 public:
  World() = default;
  explicit World(std::size_t n) : bits_(n, 0) {}

  /// "101" -> atom 0 = 1, atom 1 = 0, atom 2 = 1.
  static World from_string(std::string_view s);
  /// Bit i of `bits` is atom i.
  static World from_bits(std::uint64_t bits, std::size_t n);

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool v) { bits_[i] = v ? 1 : 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }
  std::string to_string() const;

  bool operator==(const World&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// A partial assignment. Each atom may be assigned at most once.
class Evidence {
 public:
  using Map = std::map<AtomId, bool>;

  Evidence() = default;
  Evidence(std::initializer_list<std::pair<const AtomId, bool>> init);

  /// Throws std::invalid_argument if the atom is already assigned.
  void assign(AtomId atom, bool value);
  std::optional<bool> find(AtomId atom) const;
  bool contains(AtomId atom) const { return values_.count(atom) != 0; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  Map::const_iterator begin() const { return values_.begin(); }
  Map::const_iterator end() const { return values_.end(); }

  bool operator==(const Evidence&) const = default;

 private:
  Map values_;
};

/// Union of two assignments; nullopt if they disagree on a shared atom.
std::optional<Evidence> merge(const Evidence& a, const Evidence& b);

/// True iff `world` agrees with `e` on every assigned atom.
bool compatible(const World& world, const Evidence& e);

}  // namespace exlift
