#pragma once
// errors.hpp -- error taxonomy shared by every module.
//
// CLI exit-code mapping: contract/hypothesis violations -> 2, verification
// mismatches are ordinary return values (CLI maps them to exit 1),
// checkpoint problems -> 3.

#include <stdexcept>
#include <string>
#include <utility>

namespace lucasrank {

// An operation was called outside its contract (bad argument, unsupported
// range, inconsistent state).
struct contract_error : std::runtime_error {
    explicit contract_error(const std::string& what) : std::runtime_error(what) {}
};

// A named mathematical hypothesis failed (degenerate sequence, d outside the
// density theorem's conditions, ...).  `hypothesis` is a short stable name
// suitable for matching in scripts, e.g. "square discriminant".
struct hypothesis_error : contract_error {
    std::string hypothesis;
    hypothesis_error(std::string name, const std::string& what)
        : contract_error(what), hypothesis(std::move(name)) {}
};

// Checkpoint file missing/corrupt/incompatible with the requested run.
struct checkpoint_error : std::runtime_error {
    explicit checkpoint_error(const std::string& what) : std::runtime_error(what) {}
};

// A root-extraction decision could not be settled at maximum working
// precision.  Never silently mapped to "no root exists".
struct undecided_error : std::runtime_error {
    explicit undecided_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lucasrank
