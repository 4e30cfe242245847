// Wall-clock comparison of the serial reference kernels against the OpenMP
// ones on a generated dataset. Also checks the outputs agree bit for bit,
// since that is the whole contract.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "driftscan/pipeline.hpp"
#include "driftscan/scoring.hpp"
#include "driftscan/shape.hpp"
#include "driftscan/synthetic.hpp"

using namespace driftscan;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool same_series(const std::vector<ScoredToken>& a, const std::vector<ScoredToken>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].series.has_value() != b[i].series.has_value()) return false;
        if (!a[i].series) continue;
        if (series_to_csv(*a[i].series) != series_to_csv(*b[i].series)) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    int vocab = 1200;
    int months = 48;
    if (argc > 1) vocab = std::atoi(argv[1]);
    if (argc > 2) months = std::atoi(argv[2]);

    SyntheticConfig cfg;
    cfg.months = months;
    cfg.vocab_size = vocab;
    cfg.dim = 32;
    cfg.seed = 99;

    std::vector<DriftSpec> specs;
    const char* patterns[] = {"stable", "sudden_peak", "gradual", "seasonal"};
    for (int f = 0; f < 4; ++f) {
        for (int i = 0; i < 8; ++i) {
            DriftSpec s;
            s.token = std::string("bench_") + patterns[f] + "_" + std::to_string(i);
            s.pattern = drift_pattern_from_name(patterns[f]);
            s.onset = cfg.start.plus(std::min(6 + 3 * i, months - 1));
            s.magnitude = 1.0;
            s.period = 6;
            specs.push_back(s);
        }
    }
    SyntheticDataset data = generate(specs, cfg);

    std::vector<std::string> targets;
    for (const auto& [token, spec] : data.labels) targets.push_back(token);
    // Widen the workload: score a slice of distractors too. Tokens are
    // sorted, and the w-named distractors sort after the bench_ tokens.
    const auto& snap0 = data.data.snapshots[0];
    for (int i = snap0.size() - vocab / 4; i < snap0.size(); ++i)
        targets.push_back(snap0.token_at(i));

    ScoringConfig scoring;
    scoring.filter.exclude_targets = false;  // bench tokens are plain words

#ifdef _OPENMP
    std::printf("openmp threads: %d\n", omp_get_max_threads());
#else
    std::printf("openmp: not enabled\n");
#endif
    std::printf("scoring %zu tokens over %d months, vocab %d, dim %d\n", targets.size(), months,
                vocab, cfg.dim);

    auto t0 = std::chrono::steady_clock::now();
    auto serial = score_all_serial(data.data, targets, scoring);
    double t_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto parallel = score_all_parallel(data.data, targets, scoring);
    double t_parallel = seconds_since(t0);

    std::printf("score_all        serial %8.3fs   parallel %8.3fs   speedup %5.2fx   bitwise %s\n",
                t_serial, t_parallel, t_serial / t_parallel,
                same_series(serial, parallel) ? "equal" : "DIFFERENT");

    std::vector<ShapeProfile> profiles;
    SmootherConfig smoother;
    for (const auto& r : serial)
        if (r.series) {
            ShapeProfile p = run_pipeline(*r.series, smoother);
            if (!p.values.empty()) profiles.push_back(std::move(p));
        }

    t0 = std::chrono::steady_clock::now();
    auto m_serial = distance_matrix_serial(profiles);
    double d_serial = seconds_since(t0);

    t0 = std::chrono::steady_clock::now();
    auto m_parallel = distance_matrix_parallel(profiles);
    double d_parallel = seconds_since(t0);

    std::printf("distance_matrix  serial %8.3fs   parallel %8.3fs   speedup %5.2fx   bitwise %s\n",
                d_serial, d_parallel, d_serial / d_parallel,
                m_serial.values == m_parallel.values ? "equal" : "DIFFERENT");
    return 0;
}
