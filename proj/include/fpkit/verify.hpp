#pragma once

// Randomized property suites over the transforms, the MM driver and the
// three applications. Every suite draws from a fixed seed, so a failure is
// reproducible from the printed counterexample alone.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpkit::verify {

enum class Suite { Core, Matrix, Lagrangian, Apps, All };

inline constexpr std::uint64_t kDefaultSeed = 20240607;

std::optional<Suite> parse_suite(std::string_view name);
std::string_view suite_name(Suite suite);

struct PropertyResult {
  std::string suite;
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string counterexample;  // first failing input, empty when passed

  bool passed() const noexcept { return failures == 0 && cases > 0; }
};

std::vector<PropertyResult> run_suite(Suite suite, std::uint64_t seed = kDefaultSeed);

/// Prints one PASS/FAIL line per property; returns 0 when all pass, else 3.
int run_verify(Suite suite, std::ostream& out, std::uint64_t seed = kDefaultSeed);

}  // namespace fpkit::verify
