#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace driftscan::cli {

struct ScoreArgs {
    std::string dataset;
    std::string targets = "auto";  // token-list file, or "auto" for classified targets
    std::string out;
    int k = 25;
    int pool = 500;
    int min_components = 2;
    bool keep_hashtags = false;
    bool keep_targets = false;
    bool serial = false;
};

struct ClusterArgs {
    std::string series_dir;
    std::string out;
    int n_clusters = 0;  // required
    int window = 5;
    int degree = 3;
    int shape_neighbors = 10;
    std::string linkage = "average";
    std::string labels;  // optional labels.json; adds recovery agreement
    bool serial = false;
};

struct CohortsArgs {
    std::string series_dir;
    std::string out;
    std::vector<double> cuts = {50, 75, 90, 95, 99};
    std::string groups;  // optional token<TAB>group tag file
};

struct ConcretenessArgs {
    std::string series_dir;
    std::string senses;
    std::string lexicon;
    std::string out;
    double fraction = 0.10;
};

struct NeighborsArgs {
    std::string dataset;
    std::string token;
    std::string month;
    std::string out;  // optional; stdout listing always happens
    int k = 25;
    int pool = 500;
    int min_components = 2;
    bool keep_hashtags = false;
    bool keep_targets = false;
};

struct SynthArgs {
    std::string spec_file;
    std::string out;
    std::optional<uint64_t> seed;  // overrides the spec file seed
};

int cmd_score(const ScoreArgs& args, std::ostream& log);
int cmd_cluster(const ClusterArgs& args, std::ostream& log);
int cmd_cohorts(const CohortsArgs& args, std::ostream& log);
int cmd_concreteness(const ConcretenessArgs& args, std::ostream& log);
int cmd_neighbors(const NeighborsArgs& args, std::ostream& log);
int cmd_synth(const SynthArgs& args, std::ostream& log);

// Full argv interface; returns the process exit code.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // without argv[0]

}  // namespace driftscan::cli
