#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "inspectre/spec.hpp"

namespace inspectre {

struct PredictorOptions {
    // Return stack buffer capacity.
    unsigned rsb_capacity = 4;
    // Jump targets guessed for unresolved indirect jumps; the code labels
    // of the program when absent.
    std::optional<std::vector<Word>> btb_candidates;
};

// Guesses the guards of PC stores whose target is already known.
class BranchPredictor final : public Predictor {
public:
    std::string name() const override { return "br"; }
    PredictionMap predict(const OooState& st) const override;
};

// Guesses targets of indirect jumps that are still unresolved.
class BtbPredictor final : public Predictor {
public:
    explicit BtbPredictor(std::optional<std::vector<Word>> candidates = std::nullopt)
        : candidates_(std::move(candidates)) {}
    std::string name() const override { return "btb"; }
    PredictionMap predict(const OooState& st) const override;
    std::vector<Word> candidates(const OooState& st) const;

private:
    std::optional<std::vector<Word>> candidates_;
};

// Predicts returns from the return addresses of earlier calls, looking
// back at most `capacity` nested calls.  With `btb_fallback` returns nested
// deeper than the capacity fall back to the jump target candidates.
class RsbPredictor final : public Predictor {
public:
    RsbPredictor(unsigned capacity, bool btb_fallback, std::optional<std::vector<Word>> candidates = std::nullopt)
        : capacity_(capacity), fallback_(btb_fallback), btb_(std::move(candidates)) {}
    std::string name() const override { return fallback_ ? "rsb_btb" : "rsb"; }
    PredictionMap predict(const OooState& st) const override;

private:
    unsigned capacity_;
    bool fallback_;
    BtbPredictor btb_;
};

// Guesses the address of a store that an already resolved younger load may
// read from.  The bypass flavour guesses every other footprint address;
// the dependency flavour guesses the load's own address.
class StorePredictor final : public Predictor {
public:
    enum class Mode { Bypass, Dependency };
    explicit StorePredictor(Mode mode) : mode_(mode) {}
    std::string name() const override { return mode_ == Mode::Bypass ? "stl" : "stld"; }
    PredictionMap predict(const OooState& st) const override;

private:
    Mode mode_;
};

// Call/ret nesting depths from the call `call` up to (excluding) `ret`,
// one per prefix of the program-ordered names in between.
std::set<long> rsb_depths(const OooState& st, Name call, Name ret);

// Loads and stores other than PC accesses execute only when no older name
// is speculative.
class FetchOnlyConstraint final : public Constraint {
public:
    std::string name() const override { return "fetch_only"; }
    bool allows(const SpecState& h, const SpecStep& p) const override;
};

// A fence executes after all older memory loads retire, and younger memory
// accesses and register stores execute after the fence retires.
class LfenceConstraint final : public Constraint {
public:
    std::string name() const override { return "lfence"; }
    bool allows(const SpecState& h, const SpecStep& p) const override;
};

// A load may not execute while a predicted store-address source disagrees
// with the load address.
class SsbsConstraint final : public Constraint {
public:
    std::string name() const override { return "ssbs"; }
    bool allows(const SpecState& h, const SpecStep& p) const override;
};

// Throws std::invalid_argument for unknown names.
std::shared_ptr<const Predictor> make_predictor(const std::string& name, const PredictorOptions& opts = {});
std::shared_ptr<const Constraint> make_constraint(const std::string& name);

const std::vector<std::string>& predictor_names();
const std::vector<std::string>& constraint_names();

SpecConfig make_config(const std::vector<std::string>& predictors, const std::vector<std::string>& constraints,
                       const PredictorOptions& opts = {});

}  // namespace inspectre
