#include "driftscan/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <sstream>

#include "driftscan/error.hpp"
#include "driftscan/ioutil.hpp"

namespace driftscan {

EmbeddingSnapshot::EmbeddingSnapshot(
    Month month, int dim, std::vector<std::pair<std::string, std::vector<double>>> entries)
    : month_(month), dim_(dim) {
    if (dim <= 0) throw Error("snapshot dimension must be positive");
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    tokens_.reserve(entries.size());
    values_.reserve(entries.size() * static_cast<size_t>(dim));
    norms_.reserve(entries.size());
    index_.reserve(entries.size());
    for (auto& [token, vec] : entries) {
        if (token.empty()) throw Error("empty token in snapshot " + month.str());
        if (!tokens_.empty() && tokens_.back() == token)
            throw Error("duplicate token '" + token + "' in snapshot " + month.str());
        if (static_cast<int>(vec.size()) != dim)
            throw Error("vector for '" + token + "' has length " + std::to_string(vec.size()) +
                        ", expected " + std::to_string(dim));
        double sq = 0.0;
        for (double x : vec) {
            if (!std::isfinite(x)) throw Error("non-finite component for token '" + token + "'");
            sq += x * x;
        }
        double norm = std::sqrt(sq);
        if (norm == 0.0) throw Error("zero vector for token '" + token + "' in snapshot " + month.str());
        index_.emplace(token, static_cast<int>(tokens_.size()));
        tokens_.push_back(std::move(token));
        values_.insert(values_.end(), vec.begin(), vec.end());
        norms_.push_back(norm);
    }
}

int EmbeddingSnapshot::find_index(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? -1 : it->second;
}

std::span<const double> EmbeddingSnapshot::vector_of(const std::string& token) const {
    int i = find_index(token);
    if (i < 0) throw Error("token '" + token + "' not in snapshot " + month_.str());
    return vector_at(i);
}

namespace {

// Splits on runs of spaces/tabs; tolerates a trailing '\r'.
std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
        size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

double parse_component(const std::string& s, const std::string& token) {
    const char* begin = s.c_str();
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end != begin + s.size() || s.empty() || !std::isfinite(v))
        throw Error("non-numeric component '" + s + "' for token '" + token + "'");
    return v;
}

long parse_header_int(const std::string& s) {
    const char* begin = s.c_str();
    char* end = nullptr;
    long v = std::strtol(begin, &end, 10);
    if (end != begin + s.size() || s.empty() || v <= 0)
        throw Error("malformed snapshot header field '" + s + "'");
    return v;
}

}  // namespace

EmbeddingSnapshot parse_snapshot(std::istream& in, Month month) {
    std::string line;
    if (!std::getline(in, line)) throw Error("empty snapshot stream for " + month.str());
    auto header = split_ws(line);
    if (header.size() != 2)
        throw Error("snapshot header must be 'V D', got '" + line + "'");
    long vocab = parse_header_int(header[0]);
    long dim = parse_header_int(header[1]);

    std::vector<std::pair<std::string, std::vector<double>>> entries;
    entries.reserve(vocab);
    long rows = 0;
    while (std::getline(in, line)) {
        auto fields = split_ws(line);
        if (fields.empty()) continue;  // stray blank line
        ++rows;
        if (rows > vocab)
            throw Error("snapshot " + month.str() + " declares " + std::to_string(vocab) +
                        " rows but has more");
        if (static_cast<long>(fields.size()) != dim + 1)
            throw Error("row for token '" + fields[0] + "' has " +
                        std::to_string(fields.size() - 1) + " components, expected " +
                        std::to_string(dim));
        std::vector<double> vec(dim);
        for (long d = 0; d < dim; ++d) vec[d] = parse_component(fields[d + 1], fields[0]);
        entries.emplace_back(std::move(fields[0]), std::move(vec));
    }
    if (rows != vocab)
        throw Error("snapshot " + month.str() + " declares " + std::to_string(vocab) +
                    " rows but has " + std::to_string(rows));
    return EmbeddingSnapshot(month, static_cast<int>(dim), std::move(entries));
}

EmbeddingSnapshot parse_snapshot(const std::string& text, Month month) {
    std::istringstream ss(text);
    return parse_snapshot(ss, month);
}

std::string serialize_snapshot(const EmbeddingSnapshot& s) {
    std::string out = std::to_string(s.size()) + " " + std::to_string(s.dim()) + "\n";
    for (int i = 0; i < s.size(); ++i) {
        out += s.token_at(i);
        auto vec = s.vector_at(i);
        for (double x : vec) {
            out += ' ';
            out += io::fmt_real(x);
        }
        out += '\n';
    }
    return out;
}

const EmbeddingSnapshot* TemporalDataset::find(Month m) const {
    auto it = std::lower_bound(snapshots.begin(), snapshots.end(), m,
                               [](const EmbeddingSnapshot& s, Month mm) { return s.month() < mm; });
    if (it == snapshots.end() || it->month() != m) return nullptr;
    return &*it;
}

std::vector<Month> TemporalDataset::months() const {
    std::vector<Month> out;
    out.reserve(snapshots.size());
    for (const auto& s : snapshots) out.push_back(s.month());
    return out;
}

TemporalDataset make_dataset(std::vector<EmbeddingSnapshot> snapshots) {
    if (snapshots.empty()) throw Error("dataset has no snapshots");
    std::sort(snapshots.begin(), snapshots.end(),
              [](const EmbeddingSnapshot& a, const EmbeddingSnapshot& b) {
                  return a.month() < b.month();
              });
    int dim = snapshots.front().dim();
    for (size_t i = 0; i < snapshots.size(); ++i) {
        if (snapshots[i].dim() != dim)
            throw Error("snapshot " + snapshots[i].month().str() + " has dim " +
                        std::to_string(snapshots[i].dim()) + ", expected " + std::to_string(dim));
        if (i > 0 && snapshots[i].month() == snapshots[i - 1].month())
            throw Error("duplicate month " + snapshots[i].month().str());
    }
    return TemporalDataset{std::move(snapshots), dim};
}

TemporalDataset load_dataset(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw Error("not a directory: " + dir.string());
    std::vector<std::pair<Month, std::filesystem::path>> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto name = entry.path().filename().string();
        if (name.size() != 11 || name.substr(7) != ".vec") continue;
        Month m;
        try {
            m = Month::parse(name.substr(0, 7));
        } catch (const Error&) {
            continue;
        }
        files.emplace_back(m, entry.path());
    }
    if (files.empty()) throw Error("no YYYY-MM.vec snapshot files in " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<EmbeddingSnapshot> snaps;
    snaps.reserve(files.size());
    for (auto& [m, path] : files) {
        std::string text = io::read_file(path);
        snaps.push_back(parse_snapshot(text, m));
    }
    return make_dataset(std::move(snaps));
}

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw Error("cosine: length mismatch");
    if (u.empty()) throw Error("cosine: empty vectors");
    if (std::equal(u.begin(), u.end(), v.begin())) {
        // Identity law must hold exactly; verify the input is usable first.
        double sq = 0.0;
        for (double x : u) sq += x * x;
        if (sq == 0.0) throw Error("cosine: zero-norm input");
        return 1.0;
    }
    double dot = 0.0, uu = 0.0, vv = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        uu += u[i] * u[i];
        vv += v[i] * v[i];
    }
    double nu = std::sqrt(uu), nv = std::sqrt(vv);
    if (nu == 0.0 || nv == 0.0) throw Error("cosine: zero-norm input");
    double c = dot / (nu * nv);
    return std::clamp(c, -1.0, 1.0);
}

namespace {

// Decodes one UTF-8 codepoint; returns false on malformed input.
bool next_codepoint(const std::string& s, size_t& i, uint32_t& cp) {
    if (i >= s.size()) return false;
    unsigned char c = s[i];
    int extra;
    if (c < 0x80) {
        cp = c;
        extra = 0;
    } else if ((c & 0xE0) == 0xC0) {
        cp = c & 0x1F;
        extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
        cp = c & 0x0F;
        extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
        cp = c & 0x07;
        extra = 3;
    } else {
        return false;
    }
    if (i + extra >= s.size()) return false;
    for (int k = 1; k <= extra; ++k) {
        unsigned char cc = s[i + k];
        if ((cc & 0xC0) != 0x80) return false;
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += extra + 1;
    return true;
}

bool in_emoji_block(uint32_t cp) {
    return (cp >= 0x1F000 && cp <= 0x1FAFF) ||  // pictographs, emoticons, transport, extensions
           (cp >= 0x2600 && cp <= 0x27BF) ||    // misc symbols, dingbats
           (cp >= 0x2B00 && cp <= 0x2BFF) ||    // arrows/stars used as emoji
           cp == 0x00A9 || cp == 0x00AE || cp == 0x2122 || cp == 0x203C || cp == 0x2049 ||
           cp == 0x2139 || cp == 0x3030 || cp == 0x303D || cp == 0x3297 || cp == 0x3299;
}

bool is_emoji_modifier(uint32_t cp) {
    return cp == 0x200D ||                     // zero-width joiner
           (cp >= 0xFE00 && cp <= 0xFE0F) ||   // variation selectors
           cp == 0x20E3;                       // keycap
}

}  // namespace

bool is_target_token(const std::string& token) {
    if (token.empty()) return false;
    size_t i = 0;
    uint32_t cp = 0;
    bool any_emoji = false;
    while (i < token.size()) {
        if (!next_codepoint(token, i, cp)) return false;
        if (in_emoji_block(cp)) {
            any_emoji = true;
        } else if (!is_emoji_modifier(cp)) {
            return false;
        }
    }
    return any_emoji;
}

bool TokenFilter::rejects(const std::string& token) const {
    if (exclude_hashtags && !token.empty() && token.front() == '#') return true;
    if (exclude_targets && is_target_token(token)) return true;
    return custom_exclusions.contains(token);
}

}  // namespace driftscan
