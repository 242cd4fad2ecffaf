#include "program_io.hpp"

#include <algorithm>
#include <cctype>

#include "inspectre/errors.hpp"
#include "inspectre/mil_text.hpp"

namespace inspectre::cli {

namespace {

std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
}

std::optional<Word> parse_word(const std::string& s) {
    if (s.empty() || !std::isdigit(static_cast<unsigned char>(s.front()))) return std::nullopt;
    std::size_t used = 0;
    Word v = std::stoull(s, &used, 0);
    if (used != s.size()) return std::nullopt;
    return v;
}

bool ends_with(const std::string& s, std::string_view suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

Word LoadedProgram::resolve(std::string_view text) const {
    const std::string t = trim(text);
    if (auto plus = t.find('+'); plus != std::string::npos) {
        return resolve(std::string_view(t).substr(0, plus)) + resolve(std::string_view(t).substr(plus + 1));
    }
    if (auto v = parse_word(t)) return *v;
    if (isa) {
        if (auto v = isa->symbol(t)) return *v;
    }
    throw Error("unknown symbol '" + t + "' in " + path);
}

Location LoadedProgram::location(std::string_view text) const {
    const std::string t = trim(text);
    if (t.size() > 2 && t.front() == '[' && t.back() == ']') {
        return {Resource::Mem, resolve(std::string_view(t).substr(1, t.size() - 2))};
    }
    if (auto r = register_id(t)) return {Resource::Reg, *r};
    throw Error("expected a register or [address], got '" + t + "'");
}

Observation LoadedProgram::observation(std::string_view text) const {
    const std::string t = trim(text);
    const auto open = t.find('(');
    if (open == std::string::npos || t.back() != ')') throw Error("expected an observation like DL(0x40), got '" + t + "'");
    const std::string kind = t.substr(0, open);
    const Word v = resolve(std::string_view(t).substr(open + 1, t.size() - open - 2));
    if (kind == "DL") return Observation::dl(v);
    if (kind == "DS") return Observation::ds(v);
    if (kind == "IL") return Observation::il(v);
    throw Error("unknown observation kind '" + kind + "'");
}

Assignment LoadedProgram::assignment(const std::vector<std::string>& overrides) const {
    Assignment out;
    for (const auto& s : scenario.policy.secrets) out[s.loc] = s.candidates.front();
    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error("expected LOCATION=VALUE, got '" + item + "'");
        const Location loc = location(std::string_view(item).substr(0, eq));
        if (!out.count(loc)) throw Error(to_string(loc) + " is not a secret location of " + path);
        out[loc] = resolve(std::string_view(item).substr(eq + 1));
    }
    return out;
}

LoadedProgram load_program(const std::string& path) {
    if (ends_with(path, ".mil")) {
        return {path, std::nullopt, Scenario::from_mil(load_mil_file(path))};
    }
    IsaProgram prog = load_isa_file(path);
    Scenario sc = Scenario::from_isa(prog);
    return {path, std::move(prog), std::move(sc)};
}

bool has_fence(const LoadedProgram& prog) {
    if (prog.isa) {
        return std::any_of(prog.isa->code.begin(), prog.isa->code.end(),
                           [](const auto& entry) { return entry.second.op == Opcode::Lfence; });
    }
    for (const auto& block : prog.scenario.image.decoded) {
        for (const auto& m : block) {
            if (m.has_tag(kTagFence)) return true;
        }
    }
    return false;
}

Semantics AnalysisConfig::build(const LoadedProgram& prog) const {
    if (semantics == "inorder") return Semantics::inorder();
    if (semantics == "ooo") return Semantics::out_of_order();
    if (semantics != "spec") throw Error("unknown semantics '" + semantics + "' (expected inorder, ooo or spec)");
    PredictorOptions opts;
    opts.rsb_capacity = rsb_capacity;
    if (!btb_candidates.empty()) {
        opts.btb_candidates.emplace();
        for (const auto& c : btb_candidates) opts.btb_candidates->push_back(prog.resolve(c));
    }
    std::vector<std::string> with_fences = constraints;
    if (honor_fences && has_fence(prog) &&
        std::find(with_fences.begin(), with_fences.end(), "lfence") == with_fences.end()) {
        with_fences.push_back("lfence");
    }
    return Semantics::speculative(make_config(predictors, with_fences, opts));
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const auto& item : items) {
        std::size_t start = 0;
        while (start <= item.size()) {
            auto comma = item.find(',', start);
            if (comma == std::string::npos) comma = item.size();
            auto piece = trim(std::string_view(item).substr(start, comma - start));
            if (!piece.empty()) out.push_back(piece);
            start = comma + 1;
        }
    }
    return out;
}

}  // namespace inspectre::cli
