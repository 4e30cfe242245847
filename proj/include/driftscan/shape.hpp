#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "driftscan/pipeline.hpp"

namespace driftscan {

// Classic DTW: local cost |a_i - b_j|, symmetric step pattern
// (match/insert/delete), no window, boundary-to-boundary alignment.
// Returns the accumulated cost. Throws on an empty profile.
double dtw_distance(std::span<const double> a, std::span<const double> b);

struct ShapeDistanceMatrix {
    std::vector<std::string> tokens;  // canonical (lexicographic) order
    std::vector<double> values;       // n*n, symmetric, zero diagonal

    size_t size() const { return tokens.size(); }
    double at(size_t i, size_t j) const { return values[i * tokens.size() + j]; }
    int index_of(const std::string& token) const;
};

// All pairwise DTW distances, computed once per unordered pair. The parallel
// kernel splits the flattened upper triangle across threads; each cell is
// independent, so it is bit-identical to the serial reference.
ShapeDistanceMatrix distance_matrix_serial(const std::vector<ShapeProfile>& profiles);
ShapeDistanceMatrix distance_matrix_parallel(const std::vector<ShapeProfile>& profiles);
ShapeDistanceMatrix distance_matrix(const std::vector<ShapeProfile>& profiles, bool parallel);

struct NearestShapeFeatures {
    std::string token;
    std::vector<std::string> neighbors;    // m smallest DTW distances, tie by token
    std::vector<uint8_t> feature_vector;   // one-hot over the canonical token order
};

std::vector<NearestShapeFeatures> nearest_shape_features(const ShapeDistanceMatrix& matrix,
                                                         int m = 10);

enum class Linkage { Average, Single, Complete };
Linkage linkage_from_name(const std::string& name);
const char* linkage_name(Linkage l);

// One agglomerative merge. Leaves are 0..n-1 in canonical token order;
// merged clusters get ids n, n+1, ... in merge order (left < right by the
// smallest member token).
struct LinkageRow {
    int step;
    int left;
    int right;
    double distance;
    int size;
};

struct ClusterReport {
    std::vector<std::string> tokens;  // canonical order
    std::vector<int> assignments;     // parallel to tokens; ids 0..n_clusters-1
    int n_clusters = 0;
    std::vector<int> sizes;           // by cluster id
    std::vector<LinkageRow> linkage;  // full merge tree

    int cluster_of(const std::string& token) const;
};

// Agglomerative clustering over Euclidean distance between feature vectors,
// cut to n_clusters. Merge ties break on the smallest member token, so the
// result is invariant under permutation of the input order. Cluster ids are
// assigned by (size desc, smallest member token asc).
ClusterReport hierarchical_cluster(const std::vector<NearestShapeFeatures>& features,
                                   int n_clusters, Linkage linkage = Linkage::Average);

struct CurvePoint {
    Month month;
    double mean = 0.0;
    double stddev = 0.0;
    int count = 0;
};

struct ClusterCurve {
    int cluster = -1;  // -1 = overall
    std::vector<CurvePoint> znormed;
    std::vector<CurvePoint> raw;
};

// Per-cluster characteristic shapes aligned on the calendar-month axis: the
// z-normed curve comes from the pipelined profiles, the raw curve from the
// observed (non-missing) scores. Index 0 is the overall curve.
std::vector<ClusterCurve> characteristic_shapes(const ClusterReport& report,
                                                const std::vector<ShapeProfile>& profiles,
                                                const std::vector<ChangeSeries>& raw_series);

std::string distance_matrix_to_csv(const ShapeDistanceMatrix& matrix);
std::string assignments_to_csv(const ClusterReport& report);
std::string linkage_to_csv(const ClusterReport& report);
std::string shapes_to_csv(const std::vector<ClusterCurve>& curves);

}  // namespace driftscan
