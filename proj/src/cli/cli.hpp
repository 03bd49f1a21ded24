#pragma once

#include <iosfwd>

namespace sleec::cli {

/// Process exit codes; stable across releases.
enum Exit : int {
    kOk = 0,
    kConflicts = 1,  // check: blocking verdicts; fmt --check: file not canonical
    kInvalid = 2,    // syntax, naming or type errors
    kNoInput = 64,
    kBadIndex = 65,
    kUnavailable = 69,  // LLM provider failed
    kBadReport = 70,    // LLM answer failed validation twice
};

int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sleec::cli
