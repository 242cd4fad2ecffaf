#include "inspectre/errors.hpp"

namespace inspectre {

namespace {

std::string hex(Word v) {
    static const char digits[] = "0123456789abcdef";
    if (v == 0) return "0x0";
    std::string out;
    while (v != 0) {
        out.insert(out.begin(), digits[v & 0xf]);
        v >>= 4;
    }
    return "0x" + out;
}

}  // namespace

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

UndecodableAddress::UndecodableAddress(Word addr)
    : Error("no instruction at address " + hex(addr)), addr_(addr) {}

NotAMemoryOp::NotAMemoryOp(Name n)
    : Error(to_string(n) + " is not a load or store") {}

NotInProgram::NotInProgram(Name n) : Error(to_string(n) + " is not bound in the state") {}

ExplosionBudgetExceeded::ExplosionBudgetExceeded(std::size_t budget)
    : Error("exploration exceeded the budget of " + std::to_string(budget) + " states") {}

}  // namespace inspectre
