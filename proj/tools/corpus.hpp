#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace inspectre::cli {

// One expected result of a corpus program.  `params` keeps the raw
// expectation; symbols in it are resolved against the program when the
// check runs.
struct CorpusCheck {
    std::string kind;
    std::string label;
    nlohmann::json params;
};

struct CorpusEntry {
    std::string id;
    std::string file;
    std::string description;
    std::vector<CorpusCheck> checks;
};

struct Corpus {
    std::filesystem::path dir;
    std::vector<CorpusEntry> entries;
};

// Reads `expectations.json` from `dir`.  Entries come back sorted by id.
Corpus load_corpus(const std::filesystem::path& dir);

struct CheckOutcome {
    std::string entry;
    std::string label;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

std::vector<CheckOutcome> verify_entry(const Corpus& corpus, const CorpusEntry& entry);

// Verifies entries on up to `jobs` threads; results keep the entry order.
std::vector<CheckOutcome> verify_corpus(const Corpus& corpus, unsigned jobs = 0);

}  // namespace inspectre::cli
