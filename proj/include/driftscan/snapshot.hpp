#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "driftscan/month.hpp"

namespace driftscan {

// One timestamped vocabulary -> vector table of fixed dimension. Immutable
// after construction; safe for concurrent reads. Tokens are kept sorted
// lexicographically so index order doubles as token order.
class EmbeddingSnapshot {
public:
    // Validates everything the format promises: vectors of length dim, no
    // duplicate tokens, no zero vector.
    EmbeddingSnapshot(Month month, int dim,
                      std::vector<std::pair<std::string, std::vector<double>>> entries);

    Month month() const { return month_; }
    int dim() const { return dim_; }
    int size() const { return static_cast<int>(tokens_.size()); }

    const std::vector<std::string>& tokens() const { return tokens_; }
    const std::string& token_at(int i) const { return tokens_[i]; }
    int find_index(const std::string& token) const;
    bool contains(const std::string& token) const { return find_index(token) >= 0; }

    std::span<const double> vector_at(int i) const {
        return {values_.data() + static_cast<size_t>(i) * dim_, static_cast<size_t>(dim_)};
    }
    std::span<const double> vector_of(const std::string& token) const;  // throws if absent
    double norm_at(int i) const { return norms_[i]; }

private:
    Month month_;
    int dim_ = 0;
    std::vector<std::string> tokens_;
    std::vector<double> values_;  // row-major, aligned with tokens_
    std::vector<double> norms_;
    std::unordered_map<std::string, int> index_;
};

// Input format: first line "V D", then V lines "token x1 ... xD",
// whitespace-separated. Throws Error on header/body count mismatch, wrong
// row arity, duplicate token, non-numeric component, or zero vector.
EmbeddingSnapshot parse_snapshot(std::istream& in, Month month);
EmbeddingSnapshot parse_snapshot(const std::string& text, Month month);

// Inverse of parse_snapshot at the declared 9-significant-digit precision;
// rows come out in token order.
std::string serialize_snapshot(const EmbeddingSnapshot& s);

struct TemporalDataset {
    std::vector<EmbeddingSnapshot> snapshots;  // strictly ascending months
    int dim = 0;

    const EmbeddingSnapshot* find(Month m) const;
    std::vector<Month> months() const;
};

// Sorts by month and validates shared dimension / distinct months.
TemporalDataset make_dataset(std::vector<EmbeddingSnapshot> snapshots);

// Loads every "YYYY-MM.vec" file in the directory; other files are ignored
// (synthetic dataset directories also hold labels.json / manifest.json).
// Missing months are gaps, not errors.
TemporalDataset load_dataset(const std::filesystem::path& dir);

// dot(u,v) / (|u||v|), clamped to [-1,1]. Element-wise identical inputs
// short-circuit to exactly 1 so that anchor self-comparisons score exactly
// zero downstream. Throws on length mismatch or zero-norm input.
double cosine(std::span<const double> u, std::span<const double> v);

// Token classified as the target class (emoji) when every codepoint sits in
// an emoji block or is a joiner/modifier, with at least one non-modifier.
bool is_target_token(const std::string& token);

// Pure predicate deciding which tokens may appear in neighbor lists.
struct TokenFilter {
    bool exclude_hashtags = true;
    bool exclude_targets = true;
    std::unordered_set<std::string> custom_exclusions;

    bool rejects(const std::string& token) const;
};

}  // namespace driftscan
