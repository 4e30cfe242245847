#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "driftscan/shape.hpp"
#include "driftscan/snapshot.hpp"

namespace driftscan {

// Fixed, documented generator so datasets reproduce across implementations:
// SplitMix64 for the uniform stream, Box-Muller for Gaussians.
inline constexpr const char* kGeneratorId = "splitmix64-boxmuller-v1";

struct SplitMix64 {
    uint64_t state;
    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ULL;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // Uniform in [0,1) with 53 bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double next_gaussian();

private:
    bool have_spare_ = false;
    double spare_ = 0.0;
};

enum class DriftPattern { Stable, SuddenPeak, Gradual, Seasonal };
DriftPattern drift_pattern_from_name(const std::string& name);
const char* drift_pattern_name(DriftPattern p);

struct DriftSpec {
    std::string token;
    DriftPattern pattern = DriftPattern::Stable;
    Month onset;           // first month the pattern acts
    double magnitude = 1.0;  // interpolation weight toward the B prototype
    int period = 6;          // seasonal only: months per on/off block
};

struct SyntheticConfig {
    Month start{2012, 1};
    int months = 60;
    int vocab_size = 500;
    int dim = 32;
    uint64_t seed = 1;
    // Distractors per prototype subset, and how tightly they cluster around
    // the subset center. Subsets are allocated exclusively per planted token
    // so members really are that token's nearest neighbors.
    int prototype_size = 8;
    double prototype_spread = 0.25;
};

struct SyntheticDataset {
    TemporalDataset data;
    std::map<std::string, DriftSpec> labels;
    std::map<std::string, std::vector<std::string>> prototype_a;  // token -> subset members
    std::map<std::string, std::vector<std::string>> prototype_b;
    SyntheticConfig config;
};

// Distractors are fixed random unit vectors; each planted token moves between
// two prototypes (subset means) on the normalized interpolation
// (1-w(t))*A + w(t)*B with w(t) following the pattern:
//   Stable      w = 0
//   SuddenPeak  w = magnitude for 3 months from onset, else 0
//   Gradual     w ramps linearly from 0 at onset to magnitude at the end
//   Seasonal    w alternates magnitude/0 in blocks of `period` months from onset
SyntheticDataset generate(const std::vector<DriftSpec>& specs, const SyntheticConfig& config);

// Pattern weight, exposed for the oracle tests.
double drift_weight(const DriftSpec& spec, Month at, Month last);

// Pairwise agreement in [0,1]: fraction of labeled token pairs correctly
// co-clustered or correctly separated according to pattern labels.
double evaluate_recovery(const std::map<std::string, DriftSpec>& labels,
                         const ClusterReport& report);

// Writes YYYY-MM.vec snapshot files plus labels.json and manifest.json.
void write_synthetic(const SyntheticDataset& dataset, const std::filesystem::path& dir);

// JSON spec file for the CLI: {start_month, months, vocab_size, dim, seed,
// tokens:[{name, pattern, onset, magnitude, period}]}.
std::pair<std::vector<DriftSpec>, SyntheticConfig> parse_synth_spec(const std::string& json_text);

}  // namespace driftscan
