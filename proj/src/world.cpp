#include "exlift/world.hpp"

#include <stdexcept>

namespace exlift {

World World::from_string(std::string_view s) {
  World w(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') throw std::invalid_argument("world strings are over {0,1}");
    w.set(i, s[i] == '1');
  }
  return w;
}

World World::from_bits(std::uint64_t bits, std::size_t n) {
  World w(n);
  for (std::size_t i = 0; i < n; ++i) w.set(i, (bits >> i) & 1u);
  return w;
}

std::string World::to_string() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) s[i] = '1';
  return s;
}

Evidence::Evidence(std::initializer_list<std::pair<const AtomId, bool>> init) {
  for (const auto& [atom, value] : init) assign(atom, value);
}

void Evidence::assign(AtomId atom, bool value) {
  if (!values_.emplace(atom, value).second)
    throw std::invalid_argument("atom " + std::to_string(atom) + " assigned twice");
}

std::optional<bool> Evidence::find(AtomId atom) const {
  auto it = values_.find(atom);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::optional<Evidence> merge(const Evidence& a, const Evidence& b) {
  Evidence out = a;
  for (const auto& [atom, value] : b) {
    if (auto prev = out.find(atom)) {
      if (*prev != value) return std::nullopt;
      continue;
    }
    out.assign(atom, value);
  }
  return out;
}

bool compatible(const World& world, const Evidence& e) {
  for (const auto& [atom, value] : e) {
    if (atom >= world.size() || world[atom] != value) return false;
  }
  return true;
}

}  // namespace exlift
