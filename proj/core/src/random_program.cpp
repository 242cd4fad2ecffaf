#include "inspectre/random_program.hpp"

#include <sstream>

namespace inspectre {

namespace {

class Generator {
public:
    Generator(std::mt19937_64& rng, const RandomProgramOptions& opts) : rng_(rng), opts_(opts) {}

    std::string run() {
        const std::size_t most = std::max<std::size_t>(1, opts_.max_instructions);
        const std::size_t n = pick(std::min<std::size_t>(3, most), most);
        std::ostringstream out;
        out << ".array D 0x40 4";
        for (int i = 0; i < 4; ++i) out << " " << pick(0, 7);
        out << "\n";
        for (int r = 0; r < 4; ++r) out << ".reg r" << r << " " << pick(0, 5) << "\n";
        out << ".reg r8 " << pick(0, 3) << "\n";
        if (opts_.with_secret) {
            const Word a = pick(0, 3);
            const Word b = (a + pick(1, 3)) % 4;
            if (pick(0, 1) == 0) {
                out << ".secret r" << pick(0, 3) << " " << a << " " << b << "\n";
            } else {
                out << ".secret [0x4" << pick(0, 3) << "] " << a << " " << b << "\n";
            }
        }
        for (std::size_t i = 0; i + 1 < n; ++i) out << "L" << i << ": " << instruction(i, n - 1) << "\n";
        out << "L" << n - 1 << ": halt\n";
        return out.str();
    }

private:
    Word pick(Word lo, Word hi) { return std::uniform_int_distribution<Word>(lo, hi)(rng_); }

    std::string reg() { return "r" + std::to_string(pick(0, 3)); }

    std::string cell() {
        if (pick(0, 1) == 0) return "[D + r8]";
        return "[D + " + std::to_string(pick(0, 3)) + "]";
    }

    std::string label_after(std::size_t i, std::size_t last) { return "L" + std::to_string(pick(i + 1, last)); }

    std::string instruction(std::size_t i, std::size_t last) {
        for (;;) {
            switch (pick(0, 13)) {
            case 0: return "loadi " + reg() + ", " + std::to_string(pick(0, 7));
            case 1: return "mov " + reg() + ", " + reg();
            case 2: return "add " + reg() + ", " + reg() + ", " + reg();
            case 3: return "addi " + reg() + ", " + reg() + ", " + std::to_string(pick(1, 3));
            case 4: return "andi r8, " + reg() + ", 3";
            case 5: return (pick(0, 1) ? "setlt " : "seteq ") + reg() + ", " + reg() + ", " + reg();
            case 6:
            case 7: return "load " + reg() + ", " + cell();
            case 8:
            case 9: return "store " + cell() + ", " + reg();
            case 10: return (pick(0, 1) ? "cmov " : "csel ") + reg() + ", " + reg() + ", " + reg();
            case 11:
                if (!opts_.allow_branches) break;
                if (pick(0, 1) == 0) return "beq " + reg() + ", " + label_after(i, last);
                return "blt " + reg() + ", " + reg() + ", " + label_after(i, last);
            case 12:
                if (!opts_.allow_branches) break;
                return "jmp " + label_after(i, last);
            case 13:
                if (!opts_.allow_fences) break;
                return "lfence";
            }
        }
    }

    std::mt19937_64& rng_;
    const RandomProgramOptions& opts_;
};

}  // namespace

std::string random_program_text(std::mt19937_64& rng, const RandomProgramOptions& opts) {
    return Generator(rng, opts).run();
}

IsaProgram random_program(std::mt19937_64& rng, const RandomProgramOptions& opts) {
    return parse_isa(random_program_text(rng, opts));
}

}  // namespace inspectre
