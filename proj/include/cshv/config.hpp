// Run configuration: declarative JSON with complex numbers written as
// "x+yi", round-tripping exactly through emit/parse, plus the manifest
// helpers used by the command-line driver.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cshv/torus.hpp"

namespace cshv {

struct RangeSpec {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

// A point entry may carry multiplicity 0: it then contributes no vortex and
// only serves as a concentration position.
struct RunConfig {
  cx omega1{1.0, 0.0};
  cx omega2{0.0, 1.0};
  std::vector<cx> positions;
  std::vector<int> mults;              // >= 0, aligned with positions
  std::vector<int> concentration;      // indices into positions
  int grid = 128;
  double tol = 1e-10;
  double rho = 0.0;                    // sigma-plane carve radius (0: auto)
  double gamma = 0.5;                  // weighted-norm exponent
  RangeSpec eps_range{0.0, 0.0, 6};    // max 0: start from solvability bound
  RangeSpec delta_range{1e-3, 1e-1, 9};
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  void validate() const;               // ConfigInvalid on malformed fields
  VortexConfig vortex_config() const;  // validated translation
};

std::string format_complex(cx z);        // "x+yi" with %.17g parts
cx parse_complex(const std::string& s);  // inverse; ConfigInvalid on garbage

RunConfig parse_config(const std::string& json_text);
std::string emit_config(const RunConfig& c);  // canonical; exact round-trip

// FNV-1a over the canonical text: a manifest identity, not a cryptographic
// commitment.
std::uint64_t config_hash(const RunConfig& c);

}  // namespace cshv
