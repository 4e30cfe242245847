#include "driftscan/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "driftscan/cohorts.hpp"
#include "driftscan/concreteness.hpp"
#include "driftscan/error.hpp"
#include "driftscan/ioutil.hpp"
#include "driftscan/pipeline.hpp"
#include "driftscan/scoring.hpp"
#include "driftscan/shape.hpp"
#include "driftscan/snapshot.hpp"
#include "driftscan/synthetic.hpp"

namespace driftscan::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Collects outputs, hashes them, and writes the manifest last. Paths in the
// manifest are relative to the output root so identical configs rerun to
// identical bytes.
class OutputWriter {
public:
    explicit OutputWriter(fs::path root) : root_(std::move(root)) {}

    void write(const std::string& rel, const std::string& content) {
        io::write_file(root_ / rel, content);
        hashes_[rel] = io::hash_hex(io::fnv1a64(content));
    }

    void finish(const std::string& command, const json& config, const json& inputs,
                json extra = json::object()) {
        json manifest;
        manifest["command"] = command;
        manifest["config"] = config;
        manifest["config_hash"] = io::hash_hex(io::fnv1a64(config.dump()));
        manifest["inputs"] = inputs;
        manifest["outputs"] = hashes_;
        for (auto& [k, v] : extra.items()) manifest[k] = v;
        io::write_file(root_ / "manifest.json", manifest.dump(2) + "\n");
    }

private:
    fs::path root_;
    json hashes_ = json::object();
};

json hash_dataset_files(const fs::path& dir) {
    json out = json::object();
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".vec") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files)
        out[p.filename().string()] = io::hash_hex(io::fnv1a64(io::read_file(p)));
    return out;
}

json hash_one_file(const fs::path& p) {
    json out = json::object();
    out[p.filename().string()] = io::hash_hex(io::fnv1a64(io::read_file(p)));
    return out;
}

std::vector<std::string> resolve_targets(const TemporalDataset& dataset,
                                         const std::string& targets) {
    std::vector<std::string> out;
    if (targets == "auto") {
        std::set<std::string> found;
        for (const auto& snap : dataset.snapshots)
            for (const auto& tok : snap.tokens())
                if (is_target_token(tok)) found.insert(tok);
        out.assign(found.begin(), found.end());
        if (out.empty()) throw Error("targets=auto matched no tokens in the dataset");
        return out;
    }
    std::istringstream in(io::read_file(targets));
    std::string line;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (seen.insert(line).second) out.push_back(line);
    }
    if (out.empty()) throw Error("target file " + targets + " lists no tokens");
    return out;
}

// Reads every *.csv series export in a directory, sorted by token.
std::vector<ChangeSeries> read_series_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no series CSV files in " + dir.string());
    std::vector<ChangeSeries> out;
    out.reserve(files.size());
    for (const auto& p : files) out.push_back(series_from_csv(io::read_file(p)));
    std::sort(out.begin(), out.end(),
              [](const ChangeSeries& a, const ChangeSeries& b) { return a.token < b.token; });
    for (size_t i = 1; i < out.size(); ++i)
        if (out[i].token == out[i - 1].token)
            throw Error("duplicate series for token '" + out[i].token + "'");
    return out;
}

json series_inputs_json(const fs::path& dir) {
    json out = json::object();
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& p : files)
        out[p.filename().string()] = io::hash_hex(io::fnv1a64(io::read_file(p)));
    return out;
}

ScoringConfig make_scoring_config(int k, int pool, int min_components, bool keep_hashtags,
                                  bool keep_targets) {
    ScoringConfig cfg;
    cfg.k = k;
    cfg.pool = pool;
    cfg.min_components = min_components;
    cfg.filter.exclude_hashtags = !keep_hashtags;
    cfg.filter.exclude_targets = !keep_targets;
    cfg.validate();
    return cfg;
}

}  // namespace

int cmd_score(const ScoreArgs& args, std::ostream& log) {
    ScoringConfig cfg = make_scoring_config(args.k, args.pool, args.min_components,
                                            args.keep_hashtags, args.keep_targets);
    TemporalDataset dataset = load_dataset(args.dataset);
    std::vector<std::string> targets = resolve_targets(dataset, args.targets);

    auto results = score_all(dataset, targets, cfg, !args.serial);

    OutputWriter out(args.out);
    std::string errors = "token,error\n";
    int scored = 0, failed = 0;
    for (const auto& r : results) {
        if (r.series) {
            out.write("series/" + io::encode_token_filename(r.token) + ".csv",
                      series_to_csv(*r.series));
            ++scored;
        } else {
            errors += io::csv_field(r.token) + ',' + io::csv_field(r.error) + '\n';
            ++failed;
        }
    }
    out.write("errors.csv", errors);

    json config;
    config["command"] = "score";
    config["dataset"] = args.dataset;
    config["targets"] = args.targets;
    config["k"] = cfg.k;
    config["pool"] = cfg.pool;
    config["min_components"] = cfg.min_components;
    config["exclude_hashtags"] = cfg.filter.exclude_hashtags;
    config["exclude_targets"] = cfg.filter.exclude_targets;
    json inputs;
    inputs["dataset"] = hash_dataset_files(args.dataset);
    if (args.targets != "auto") inputs["targets"] = hash_one_file(args.targets);
    json extra;
    extra["scored"] = scored;
    extra["failed"] = failed;
    out.finish("score", config, inputs, extra);

    log << "score: " << scored << " series written to " << args.out << "/series";
    if (failed > 0) log << " (warning: " << failed << " targets failed, see errors.csv)";
    log << "\n";
    return 0;
}

int cmd_cluster(const ClusterArgs& args, std::ostream& log) {
    SmootherConfig smoother{args.window, args.degree};
    smoother.validate();
    if (args.n_clusters < 1) throw Error("--clusters must be >= 1");
    Linkage linkage = linkage_from_name(args.linkage);

    std::vector<ChangeSeries> series = read_series_dir(args.series_dir);
    std::vector<ShapeProfile> profiles;
    std::vector<std::string> skipped;
    for (const auto& s : series) {
        ShapeProfile p = run_pipeline(s, smoother);
        if (p.values.empty()) {
            skipped.push_back(s.token);
            continue;
        }
        profiles.push_back(std::move(p));
    }
    if (profiles.size() < 2)
        throw Error("need >= 2 usable series, have " + std::to_string(profiles.size()));
    if (args.n_clusters > static_cast<int>(profiles.size()))
        throw Error("--clusters " + std::to_string(args.n_clusters) + " exceeds usable series " +
                    std::to_string(profiles.size()));

    ShapeDistanceMatrix matrix = distance_matrix(profiles, !args.serial);
    auto features = nearest_shape_features(matrix, args.shape_neighbors);
    ClusterReport report = hierarchical_cluster(features, args.n_clusters, linkage);
    auto curves = characteristic_shapes(report, profiles, series);

    OutputWriter out(args.out);
    out.write("assignments.csv", assignments_to_csv(report));
    out.write("linkage.csv", linkage_to_csv(report));
    out.write("distance_matrix.csv", distance_matrix_to_csv(matrix));
    out.write("shapes.csv", shapes_to_csv(curves));
    std::string profiles_csv = "token,month,value,interpolated_flag\n";
    for (const auto& p : profiles) {
        std::string one = profile_to_csv(p);
        profiles_csv += one.substr(one.find('\n') + 1);
    }
    out.write("profiles.csv", profiles_csv);

    json config;
    config["command"] = "cluster";
    config["series"] = args.series_dir;
    config["clusters"] = args.n_clusters;
    config["window"] = smoother.window;
    config["degree"] = smoother.degree;
    config["shape_neighbors"] = args.shape_neighbors;
    config["linkage"] = linkage_name(linkage);
    json inputs;
    inputs["series"] = series_inputs_json(args.series_dir);
    json extra;
    extra["skipped"] = skipped;
    extra["sizes"] = report.sizes;

    double agreement = -1.0;
    if (!args.labels.empty()) {
        json labels_json = json::parse(io::read_file(args.labels));
        std::map<std::string, DriftSpec> labels;
        for (auto& [token, j] : labels_json.items()) {
            DriftSpec spec;
            spec.token = token;
            spec.pattern = drift_pattern_from_name(j.at("pattern"));
            labels[token] = spec;
        }
        agreement = evaluate_recovery(labels, report);
        extra["recovery_agreement"] = agreement;
        inputs["labels"] = hash_one_file(args.labels);
    }
    out.finish("cluster", config, inputs, extra);

    log << "cluster: " << report.n_clusters << " clusters over " << profiles.size()
        << " series, sizes";
    for (int s : report.sizes) log << ' ' << s;
    if (!skipped.empty()) log << " (skipped " << skipped.size() << " unusable)";
    if (agreement >= 0.0) log << ", recovery agreement " << io::fmt_real(agreement);
    log << "\n";
    return 0;
}

int cmd_cohorts(const CohortsArgs& args, std::ostream& log) {
    std::vector<ChangeSeries> series = read_series_dir(args.series_dir);
    VolatilityTable table = volatility_table(series);
    if (table.entries.empty()) throw Error("no series has >= 2 scored points");
    CohortAssignment cohorts = percentile_cohorts(table, args.cuts);

    std::map<std::string, const ChangeSeries*> by_token;
    for (const auto& s : series) by_token[s.token] = &s;

    std::vector<std::pair<std::string, std::vector<CurvePoint>>> curves;
    {
        std::vector<const ChangeSeries*> all;
        for (const auto& e : table.entries) all.push_back(by_token.at(e.token));
        curves.emplace_back("all", aggregate_curve(all));
    }
    for (const auto& label : cohorts.labels) {
        const auto& members = cohorts.members.at(label);
        if (members.empty()) continue;
        std::vector<const ChangeSeries*> group;
        for (const auto& t : members) group.push_back(by_token.at(t));
        curves.emplace_back(label, aggregate_curve(group));
    }

    OutputWriter out(args.out);
    out.write("volatility.csv", volatility_to_csv(table, cohorts));
    out.write("curves.csv", cohort_curves_to_csv(curves));
    std::string excluded = "token,n_points\n";
    for (const auto& [token, n] : table.excluded)
        excluded += io::csv_field(token) + ',' + std::to_string(n) + '\n';
    out.write("excluded.csv", excluded);

    json config;
    config["command"] = "cohorts";
    config["series"] = args.series_dir;
    config["cuts"] = args.cuts;
    json inputs;
    inputs["series"] = series_inputs_json(args.series_dir);

    if (!args.groups.empty()) {
        auto tags = parse_group_tags(io::read_file(args.groups));
        std::map<std::string, std::vector<const ChangeSeries*>> groups;
        for (const auto& s : series) {
            auto it = tags.find(s.token);
            if (it != tags.end()) groups[it->second].push_back(&s);
        }
        std::vector<std::pair<std::string, std::vector<CurvePoint>>> group_curves;
        for (const auto& [name, members] : groups)
            group_curves.emplace_back(name, aggregate_curve(members));
        out.write("group_curves.csv", cohort_curves_to_csv(group_curves));
        config["groups"] = args.groups;
        inputs["groups"] = hash_one_file(args.groups);
    }
    out.finish("cohorts", config, inputs);

    log << "cohorts: " << table.entries.size() << " tokens across " << cohorts.labels.size()
        << " cohorts (" << table.excluded.size() << " excluded)\n";
    return 0;
}

int cmd_concreteness(const ConcretenessArgs& args, std::ostream& log) {
    std::vector<ChangeSeries> series = read_series_dir(args.series_dir);
    VolatilityTable table = volatility_table(series);
    SenseMap senses = parse_sense_map(io::read_file(args.senses));
    ConcretenessLexicon lexicon = parse_lexicon(io::read_file(args.lexicon));

    ConcretenessReport report = concreteness_report(table, senses, lexicon, args.fraction);

    OutputWriter out(args.out);
    out.write("report.json", report_to_json(report));

    json config;
    config["command"] = "concreteness";
    config["series"] = args.series_dir;
    config["senses"] = args.senses;
    config["lexicon"] = args.lexicon;
    config["fraction"] = args.fraction;
    json inputs;
    inputs["series"] = series_inputs_json(args.series_dir);
    inputs["senses"] = hash_one_file(args.senses);
    inputs["lexicon"] = hash_one_file(args.lexicon);
    out.finish("concreteness", config, inputs);

    log << "concreteness: n=" << report.test.n << " t=" << io::fmt_real(report.test.t_statistic)
        << " p=" << io::fmt_real(report.test.p_value) << " ("
        << report.unmatched.size() << " unmatched)\n";
    return 0;
}

int cmd_neighbors(const NeighborsArgs& args, std::ostream& log) {
    ScoringConfig cfg = make_scoring_config(args.k, args.pool, args.min_components,
                                            args.keep_hashtags, args.keep_targets);
    TemporalDataset dataset = load_dataset(args.dataset);
    Month month = Month::parse(args.month);
    const EmbeddingSnapshot* snap = dataset.find(month);
    if (!snap) throw Error("no snapshot for month " + month.str());
    NeighborList nn = top_k_neighbors(*snap, args.token, cfg);

    std::string csv = "rank,token,similarity\n";
    for (size_t i = 0; i < nn.neighbors.size(); ++i)
        csv += std::to_string(i + 1) + ',' + io::csv_field(nn.neighbors[i].token) + ',' +
               io::fmt_real(nn.neighbors[i].similarity) + '\n';
    log << csv;

    if (!args.out.empty()) {
        OutputWriter out(args.out);
        out.write("neighbors.csv", csv);
        json config;
        config["command"] = "neighbors";
        config["dataset"] = args.dataset;
        config["token"] = args.token;
        config["month"] = month.str();
        config["k"] = cfg.k;
        config["pool"] = cfg.pool;
        config["min_components"] = cfg.min_components;
        config["exclude_hashtags"] = cfg.filter.exclude_hashtags;
        config["exclude_targets"] = cfg.filter.exclude_targets;
        json inputs;
        inputs["dataset"] = hash_dataset_files(args.dataset);
        out.finish("neighbors", config, inputs);
    }
    return 0;
}

int cmd_synth(const SynthArgs& args, std::ostream& log) {
    auto [specs, config] = parse_synth_spec(io::read_file(args.spec_file));
    if (args.seed) config.seed = *args.seed;
    SyntheticDataset dataset = generate(specs, config);
    write_synthetic(dataset, args.out);
    log << "synth: " << config.months << " snapshots, vocab " << config.vocab_size << ", "
        << specs.size() << " planted tokens -> " << args.out << "\n";
    return 0;
}

namespace {

void add_filter_flags(CLI::App* cmd, int& k, int& pool, int& min_components, bool& keep_hashtags,
                      bool& keep_targets) {
    cmd->add_option("--k", k, "neighbors per second-order vector");
    cmd->add_option("--pool", pool, "candidate pool ranked before filtering");
    cmd->add_option("--min-components", min_components, "minimum shared components per score");
    cmd->add_flag("--keep-hashtags", keep_hashtags, "do not filter hashtag neighbors");
    cmd->add_flag("--keep-targets", keep_targets, "do not filter target-class (emoji) neighbors");
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"driftscan: semantic change scoring over timestamped embedding snapshots"};
    app.require_subcommand(1);

    ScoreArgs score;
    auto* sc = app.add_subcommand("score", "score change series for target tokens");
    sc->add_option("--dataset", score.dataset, "snapshot directory (YYYY-MM.vec)")->required();
    sc->add_option("--targets", score.targets, "token list file, or 'auto'");
    sc->add_option("--out", score.out, "output directory")->required();
    add_filter_flags(sc, score.k, score.pool, score.min_components, score.keep_hashtags,
                     score.keep_targets);
    sc->add_flag("--serial", score.serial, "disable the parallel kernel");

    ClusterArgs cluster;
    auto* cl = app.add_subcommand("cluster", "cluster change-series shapes");
    cl->add_option("--series", cluster.series_dir, "series CSV directory (score output)")
        ->required();
    cl->add_option("--clusters", cluster.n_clusters, "number of clusters")->required();
    cl->add_option("--out", cluster.out, "output directory")->required();
    cl->add_option("--window", cluster.window, "smoother window (odd)");
    cl->add_option("--degree", cluster.degree, "smoother polynomial degree");
    cl->add_option("--shape-neighbors", cluster.shape_neighbors,
                   "most-similar series per feature vector");
    cl->add_option("--linkage", cluster.linkage, "average|single|complete");
    cl->add_option("--labels", cluster.labels, "labels.json for recovery agreement");
    cl->add_flag("--serial", cluster.serial, "disable the parallel kernel");

    CohortsArgs cohorts;
    auto* co = app.add_subcommand("cohorts", "volatility table and percentile cohort curves");
    co->add_option("--series", cohorts.series_dir, "series CSV directory")->required();
    co->add_option("--out", cohorts.out, "output directory")->required();
    co->add_option("--cuts", cohorts.cuts, "percentile cuts")->delimiter(',');
    co->add_option("--groups", cohorts.groups, "token<TAB>group tag file for grouped curves");

    ConcretenessArgs conc;
    auto* cc = app.add_subcommand("concreteness", "concreteness t-test for high-change tokens");
    cc->add_option("--series", conc.series_dir, "series CSV directory")->required();
    cc->add_option("--senses", conc.senses, "token<TAB>lemmas TSV")->required();
    cc->add_option("--lexicon", conc.lexicon, "lemma<TAB>rating TSV")->required();
    cc->add_option("--out", conc.out, "output directory")->required();
    cc->add_option("--fraction", conc.fraction, "top volatility fraction");

    NeighborsArgs nb;
    auto* nc = app.add_subcommand("neighbors", "ranked nearest neighbors for a token at a month");
    nc->add_option("--dataset", nb.dataset, "snapshot directory")->required();
    nc->add_option("--token", nb.token, "target token")->required();
    nc->add_option("--month", nb.month, "YYYY-MM")->required();
    nc->add_option("--out", nb.out, "optional output directory");
    add_filter_flags(nc, nb.k, nb.pool, nb.min_components, nb.keep_hashtags, nb.keep_targets);

    SynthArgs synth;
    auto* sy = app.add_subcommand("synth", "generate a labeled synthetic drift dataset");
    sy->add_option("--spec", synth.spec_file, "drift spec JSON")->required();
    sy->add_option("--out", synth.out, "output directory")->required();
    uint64_t seed_opt = 0;
    auto* seed_flag = sy->add_option("--seed", seed_opt, "override the spec file seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (sc->parsed()) return cmd_score(score, std::cout);
        if (cl->parsed()) return cmd_cluster(cluster, std::cout);
        if (co->parsed()) return cmd_cohorts(cohorts, std::cout);
        if (cc->parsed()) return cmd_concreteness(conc, std::cout);
        if (nc->parsed()) return cmd_neighbors(nb, std::cout);
        if (sy->parsed()) {
            if (seed_flag->count() > 0) synth.seed = seed_opt;
            return cmd_synth(synth, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}

int run(const std::vector<std::string>& args) {
    std::vector<std::string> full;
    full.emplace_back("driftscan");
    full.insert(full.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(full.size());
    for (const auto& s : full) argv.push_back(s.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

}  // namespace driftscan::cli
