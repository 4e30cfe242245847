#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace driftscan::io {

// Fixed 9-significant-digit decimal rendering for every numeric value the
// tool writes; reruns must diff clean across platforms.
std::string fmt_real(double v);

// Minimal RFC-4180 quoting: fields containing ',', '"', '\n' or '\r' are
// quoted, embedded quotes doubled. Tokens are opaque Unicode, so this is
// not optional.
std::string csv_field(const std::string& s);
std::vector<std::string> split_csv_line(const std::string& line);

// Percent-encodes every byte outside [A-Za-z0-9_-]; injective, so distinct
// tokens never collide as filenames.
std::string encode_token_filename(const std::string& token);

uint64_t fnv1a64(const void* data, size_t n);
uint64_t fnv1a64(const std::string& s);
std::string hash_hex(uint64_t h);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, const std::string& content);

}  // namespace driftscan::io
