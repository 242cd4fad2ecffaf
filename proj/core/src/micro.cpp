#include "inspectre/micro.hpp"

namespace inspectre {

const char* resource_name(Resource r) {
    switch (r) {
    case Resource::Pc: return "PC";
    case Resource::Reg: return "R";
    case Resource::Mem: return "M";
    }
    return "?";
}

NameSet Micro::op_names() const {
    NameSet out;
    switch (kind) {
    case MicroKind::Internal: value.collect_names(out); break;
    case MicroKind::Load:
        if (has_addr()) addr.collect_names(out);
        break;
    case MicroKind::Store:
        if (has_addr()) addr.collect_names(out);
        value.collect_names(out);
        break;
    }
    return out;
}

NameSet Micro::free_names() const {
    NameSet out = op_names();
    guard.collect_names(out);
    return out;
}

bool operator==(const Micro& a, const Micro& b) {
    if (a.name != b.name || a.kind != b.kind || a.tags != b.tags || a.link != b.link) return false;
    if (!(a.guard == b.guard)) return false;
    if (a.kind != MicroKind::Internal && a.res != b.res) return false;
    if (a.has_addr() && !(a.addr == b.addr)) return false;
    if (a.kind != MicroKind::Load && !(a.value == b.value)) return false;
    return true;
}

std::string to_string(const Micro& m) {
    return to_string(m, [](Name n) { return to_string(n); });
}

std::string to_string(const Micro& m, const std::function<std::string(Name)>& show) {
    std::string out = show(m.name) + " : ";
    out += (m.guard.is_lit() && m.guard.literal() == 1) ? "true" : m.guard.to_string(show);
    out += " ? ";
    switch (m.kind) {
    case MicroKind::Internal: out += m.value.to_string(show); break;
    case MicroKind::Load:
        out += "ld ";
        out += resource_name(m.res);
        if (m.has_addr()) out += " " + m.addr.to_string(show);
        break;
    case MicroKind::Store:
        out += "st ";
        out += resource_name(m.res);
        out += " ";
        if (m.has_addr()) out += m.addr.to_string(show) + ", ";
        out += m.value.to_string(show);
        break;
    }
    if (m.has_tag(kTagIndirectJump)) out += " @ijmp";
    if (m.has_tag(kTagCall)) out += " @call(" + show(m.link) + ")";
    if (m.has_tag(kTagReturn)) out += " @ret";
    if (m.has_tag(kTagFence)) out += " @fence";
    if (m.has_tag(kTagHalt)) out += " @halt";
    if (m.has_tag(kTagReturnAddress)) out += " @ra";
    return out;
}

}  // namespace inspectre
