#pragma once

#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>

#include "sleec/checker.hpp"

namespace sleec::test {

inline std::string source_path(const std::string& rel) { return std::string(SLEEC_SOURCE_DIR) + "/" + rel; }

inline std::string read_fixture(const std::string& rel) {
    std::ifstream in(source_path(rel), std::ios::binary);
    REQUIRE_MESSAGE(in.good(), rel);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Parses text that is expected to be free of errors.
inline Spec load(const std::string& text) {
    auto parsed = parse(text);
    REQUIRE_MESSAGE(parsed.ok(), text);
    return parsed.spec;
}

inline const char* const kCorpus[] = {
    "fixtures/r1_r2.sleec",
    "fixtures/almi.sleec",
    "fixtures/corpus/canonical.sleec",
    "fixtures/corpus/divergence.sleec",
    "fixtures/corpus/mixed_units.sleec",
    "fixtures/corpus/r1_guarded.sleec",
    "fixtures/corpus/redundant_deadlines.sleec",
    "fixtures/corpus/typo.sleec",
};

}  // namespace sleec::test
