#include "inspectre/name.hpp"

namespace inspectre {

std::string to_string(Name n) {
    return "t" + std::to_string(n.instr) + "_" + std::to_string(n.micro);
}

Storage restrict_to(const Storage& s, const NameSet& names) {
    Storage out;
    out.reserve(std::min(s.size(), names.size()));
    auto it = s.begin();
    for (Name n : names) {
        it = s.lower_bound(n);
        if (it != s.end() && it->first == n) out.emplace_hint(out.end(), n, it->second);
    }
    return out;
}

}  // namespace inspectre
