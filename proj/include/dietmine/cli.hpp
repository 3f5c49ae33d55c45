#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dietmine::cli {

/// Effective configuration of a run, merged from defaults, the optional
/// `--config` key=value file, and command-line overrides (strongest last).
struct RunConfig {
    std::string corpus_path;
    std::string taxonomy_path;
    std::string spec_path;  // synth input
    std::string model_path; // optional pre-trained model
    std::string out_dir = "out";

    std::string space = "token"; // token | category
    std::size_t support = 500;
    std::size_t min_days = 30;
    long min_kcal = 100;
    double below_margin = 0.2;
    bool symmetric = false;
    std::string tie_priority = "above,below,ontarget";

    double C = 1.0;
    std::size_t folds = 10;
    std::uint64_t seed = 1;
    bool normalize = false; // 2-norm vectors before the SVM

    std::size_t k_min = 2;
    std::size_t k_max = 10;
    std::size_t rank_cap = 40;
    std::size_t groups = 20;
    std::size_t buckets = 10;

    unsigned jobs = 1;
};

/// Entry point used by main() and by tests. `args` excludes the program
/// name: {"label", "--corpus", "x.tsv", "--out", "dir"}. Returns the process
/// exit status; failures print a diagnostic to stderr and leave no partial
/// outputs behind.
int run(const std::vector<std::string>& args);

} // namespace dietmine::cli
