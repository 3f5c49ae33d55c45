#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dietmine/corpus.hpp"
#include "dietmine/taxonomy.hpp"

namespace testsupport {

/// Fixture directory passed by ctest (DIETMINE_DATA).
std::string data_dir();

/// Self-cleaning unique temporary directory.
class TempDir {
  public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::string& path() const { return path_; }
    std::string file(const std::string& name) const;

  private:
    std::string path_;
};

/// Adjusted Rand index between two labelings of the same points.
double adjusted_rand(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b);

/// Exhaustive all-substrings reference matcher with the same per-main
/// strict-containment suppression and ancestor closure as annotate().
dietmine::taxonomy::Annotation oracle_annotate(const std::string& text,
                                               const dietmine::taxonomy::Taxonomy& tax);

/// One-entry-per-day diary with a constant goal; days start at `start` and
/// advance one calendar day per element of `actuals`.
dietmine::corpus::UserDiary make_diary(const std::string& user, dietmine::Date start,
                                       const std::vector<long>& actuals, long goal,
                                       const std::string& text = "grilled chicken");

} // namespace testsupport
