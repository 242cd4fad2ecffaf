#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

#include <boost/container/flat_map.hpp>
#include <boost/container/flat_set.hpp>

namespace inspectre {

using Word = std::uint64_t;

// Identifies the j-th microinstruction produced by the i-th fetched
// instruction.  Instruction 0 is the bootstrap that holds initial values.
struct Name {
    std::uint32_t instr = 0;
    std::uint32_t micro = 0;

    constexpr auto operator<=>(const Name&) const = default;

    constexpr std::uint64_t key() const {
        return (static_cast<std::uint64_t>(instr) << 32) | micro;
    }
};

std::string to_string(Name n);

using NameSet = boost::container::flat_set<Name>;
using Storage = boost::container::flat_map<Name, Word>;

// Storage restricted to the given names.
Storage restrict_to(const Storage& s, const NameSet& names);

inline bool defined(const Storage& s, Name n) { return s.find(n) != s.end(); }

}  // namespace inspectre

template <>
struct std::hash<inspectre::Name> {
    std::size_t operator()(inspectre::Name n) const noexcept {
        return std::hash<std::uint64_t>{}(n.key());
    }
};
