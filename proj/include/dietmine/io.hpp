#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace dietmine::io {

/// Splits on tabs, keeping empty fields ("a\t\tb" -> {"a", "", "b"}).
std::vector<std::string> split_tsv(const std::string& line);

/// Reads a `key = value` config file. `#` starts a comment, blank lines are
/// skipped, keys and values are trimmed. Later keys overwrite earlier ones.
std::map<std::string, std::string> read_kv(const std::string& path);

/// Lowercase hex SHA-256 of the file contents. Throws on open failure.
std::string sha256_file(const std::string& path);

/// Shortest round-trip-safe decimal form of v ("%.17g", trimmed to the
/// shortest form that parses back exactly). Stable across platforms.
std::string fmt_double(double v);

/// Fixed-precision form, e.g. fmt_fixed(1.0 / 3, 3) == "0.333".
std::string fmt_fixed(double v, int digits);

/// Runs fn(i) for i in [0, n) across up to `jobs` threads. Work is split into
/// contiguous blocks so per-index outputs written to preallocated slots land
/// deterministically. jobs <= 1 runs inline. Exceptions propagate.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)>& fn);

bool file_exists(const std::string& path);

std::string read_file(const std::string& path);

void write_file(const std::string& path, const std::string& content);

} // namespace dietmine::io
