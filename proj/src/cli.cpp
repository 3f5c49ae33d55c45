#include "dietmine/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "dietmine/cluster.hpp"
#include "dietmine/corpus.hpp"
#include "dietmine/features.hpp"
#include "dietmine/io.hpp"
#include "dietmine/labeling.hpp"
#include "dietmine/learn.hpp"
#include "dietmine/synth.hpp"
#include "dietmine/taxonomy.hpp"

namespace dietmine::cli {

namespace {

namespace fs = std::filesystem;

std::string basename_of(const std::string& path) {
    return fs::path(path).filename().string();
}

labeling::LabelPolicy make_policy(const RunConfig& cfg) {
    labeling::LabelPolicy policy;
    policy.below_margin = cfg.below_margin;
    policy.symmetric = cfg.symmetric;
    policy.min_day_kcal = cfg.min_kcal;

    std::array<labeling::DayLabel, 3> order{};
    std::array<bool, 3> seen{};
    std::istringstream ss(cfg.tie_priority);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ',')) {
        labeling::DayLabel l;
        if (part == "above") l = labeling::DayLabel::Above;
        else if (part == "below") l = labeling::DayLabel::Below;
        else if (part == "ontarget" || part == "on-target") l = labeling::DayLabel::OnTarget;
        else throw std::invalid_argument("tie_priority: unknown class '" + part + "'");
        if (i >= 3 || seen[static_cast<int>(l)])
            throw std::invalid_argument("tie_priority must list each class once");
        seen[static_cast<int>(l)] = true;
        order[i++] = l;
    }
    if (i != 3) throw std::invalid_argument("tie_priority must list all three classes");
    policy.tie_priority = order;
    return policy;
}

void validate_config(const RunConfig& cfg) {
    auto bad = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
    if (cfg.space != "token" && cfg.space != "category")
        bad("space must be 'token' or 'category'");
    if (cfg.below_margin <= 0 || cfg.below_margin >= 1)
        bad("below_margin must lie in (0,1)");
    if (cfg.min_kcal < 0) bad("min_kcal must be non-negative");
    if (cfg.C <= 0) bad("C must be positive");
    if (cfg.folds < 2) bad("folds must be at least 2");
    if (cfg.k_min < 1 || cfg.k_min > cfg.k_max) bad("require 1 <= k_min <= k_max");
    if (cfg.groups == 0) bad("groups must be positive");
    if (cfg.buckets == 0) bad("buckets must be positive");
    if (cfg.jobs == 0) bad("jobs must be positive");
}

void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv,
              const std::string& path) {
    for (const auto& [key, value] : kv) {
        try {
            if (key == "corpus") cfg.corpus_path = value;
            else if (key == "taxonomy") cfg.taxonomy_path = value;
            else if (key == "spec") cfg.spec_path = value;
            else if (key == "model") cfg.model_path = value;
            else if (key == "out") cfg.out_dir = value;
            else if (key == "space") cfg.space = value;
            else if (key == "support") cfg.support = std::stoul(value);
            else if (key == "min_days") cfg.min_days = std::stoul(value);
            else if (key == "min_kcal") cfg.min_kcal = std::stol(value);
            else if (key == "below_margin") cfg.below_margin = std::stod(value);
            else if (key == "symmetric") cfg.symmetric = (value == "1" || value == "true");
            else if (key == "tie_priority") cfg.tie_priority = value;
            else if (key == "C") cfg.C = std::stod(value);
            else if (key == "folds") cfg.folds = std::stoul(value);
            else if (key == "seed") cfg.seed = std::stoull(value);
            else if (key == "normalize") cfg.normalize = (value == "1" || value == "true");
            else if (key == "k_min") cfg.k_min = std::stoul(value);
            else if (key == "k_max") cfg.k_max = std::stoul(value);
            else if (key == "rank_cap") cfg.rank_cap = std::stoul(value);
            else if (key == "groups") cfg.groups = std::stoul(value);
            else if (key == "buckets") cfg.buckets = std::stoul(value);
            else if (key == "jobs") cfg.jobs = static_cast<unsigned>(std::stoul(value));
            else throw std::invalid_argument(path + ": unknown config key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            std::string what = e.what();
            if (what.rfind(path, 0) == 0) throw;
            throw std::invalid_argument(path + ": key '" + key + "' has bad value '" +
                                        value + "'");
        }
    }
}

/// Removes everything registered unless commit() was called, so failed
/// commands leave no partial outputs.
class OutputGuard {
  public:
    explicit OutputGuard(std::string dir) : dir_(std::move(dir)) {
        fs::create_directories(dir_);
    }
    ~OutputGuard() {
        if (committed_) return;
        for (const auto& f : files_) {
            std::error_code ec;
            fs::remove(f, ec);
        }
    }
    std::string path(const std::string& name) {
        auto full = (fs::path(dir_) / name).string();
        files_.push_back(full);
        return full;
    }
    const std::vector<std::string>& files() const { return files_; }
    void commit() { committed_ = true; }

  private:
    std::string dir_;
    std::vector<std::string> files_;
    bool committed_ = false;
};

void write_manifest(OutputGuard& guard, const RunConfig& cfg, const std::string& command,
                    const std::vector<std::string>& inputs) {
    std::vector<std::string> outputs = guard.files(); // before adding the manifest
    auto path = guard.path(command + ".manifest");
    std::ostringstream out;
    out << "command\t" << command << '\n';
    out << "config\tC\t" << io::fmt_double(cfg.C) << '\n';
    out << "config\tbelow_margin\t" << io::fmt_double(cfg.below_margin) << '\n';
    out << "config\tbuckets\t" << cfg.buckets << '\n';
    out << "config\tcorpus\t" << basename_of(cfg.corpus_path) << '\n';
    out << "config\tfolds\t" << cfg.folds << '\n';
    out << "config\tgroups\t" << cfg.groups << '\n';
    out << "config\tjobs\t" << cfg.jobs << '\n';
    out << "config\tk_max\t" << cfg.k_max << '\n';
    out << "config\tk_min\t" << cfg.k_min << '\n';
    out << "config\tmin_days\t" << cfg.min_days << '\n';
    out << "config\tmin_kcal\t" << cfg.min_kcal << '\n';
    out << "config\tmodel\t" << basename_of(cfg.model_path) << '\n';
    out << "config\tnormalize\t" << (cfg.normalize ? 1 : 0) << '\n';
    out << "config\trank_cap\t" << cfg.rank_cap << '\n';
    out << "config\tseed\t" << cfg.seed << '\n';
    out << "config\tspace\t" << cfg.space << '\n';
    out << "config\tspec\t" << basename_of(cfg.spec_path) << '\n';
    out << "config\tsupport\t" << cfg.support << '\n';
    out << "config\tsymmetric\t" << (cfg.symmetric ? 1 : 0) << '\n';
    out << "config\ttaxonomy\t" << basename_of(cfg.taxonomy_path) << '\n';
    out << "config\ttie_priority\t" << cfg.tie_priority << '\n';
    for (const auto& in : inputs)
        out << "input\t" << basename_of(in) << '\t' << io::sha256_file(in) << '\n';
    for (const auto& f : outputs)
        out << "output\t" << basename_of(f) << '\t' << io::sha256_file(f) << '\n';
    io::write_file(path, out.str());
}

struct Pipeline {
    corpus::Corpus corpus;
    std::optional<taxonomy::Taxonomy> tax;
    std::optional<taxonomy::AnnotationIndex> index;
    labeling::LabelPolicy policy;
    features::FeatureVocabulary vocab;
    std::vector<std::string> eligible;
    std::vector<features::FeatureVector> vectors; // eligible users only
    std::vector<labeling::UserLabel> labels;
};

const taxonomy::AnnotationIndex* index_ptr(const Pipeline& p) {
    return p.index ? &*p.index : nullptr;
}

void require(bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument(what);
}

Pipeline load_pipeline(const RunConfig& cfg, bool need_features) {
    Pipeline p;
    require(!cfg.corpus_path.empty(), "a corpus path is required (--corpus)");
    p.corpus = corpus::load_corpus(cfg.corpus_path);
    p.policy = make_policy(cfg);

    bool category = cfg.space == "category";
    if (!cfg.taxonomy_path.empty()) {
        p.tax = taxonomy::load_taxonomy(cfg.taxonomy_path);
        p.index = taxonomy::annotate_corpus(p.corpus, *p.tax, cfg.jobs);
    } else if (need_features && category) {
        throw std::invalid_argument("category space requires --taxonomy");
    }

    if (need_features) {
        auto space = features::parse_space(cfg.space);
        p.vocab =
            features::build_vocabulary(p.corpus, space, cfg.support, index_ptr(p), cfg.jobs);
        p.eligible = features::eligible_users(p.corpus, p.vocab, index_ptr(p), cfg.min_days,
                                              cfg.min_kcal);
        corpus::Corpus eligible_corpus;
        eligible_corpus.reserve(p.eligible.size());
        for (const auto& uid : p.eligible)
            eligible_corpus.push_back(*corpus::find_user(p.corpus, uid));
        p.vectors = features::featurize_corpus(eligible_corpus, p.vocab, index_ptr(p),
                                               cfg.min_kcal, cfg.jobs);
        if (cfg.normalize)
            for (auto& v : p.vectors) v = features::normalize(std::move(v));
    }

    p.labels = labeling::label_corpus(p.corpus, p.policy);
    return p;
}

std::vector<std::string> pipeline_inputs(const RunConfig& cfg) {
    std::vector<std::string> inputs{cfg.corpus_path};
    if (!cfg.taxonomy_path.empty()) inputs.push_back(cfg.taxonomy_path);
    return inputs;
}

learn::LinearModel obtain_model(const RunConfig& cfg, const Pipeline& p,
                                learn::Dataset* balanced_out = nullptr) {
    learn::TrainOptions opts;
    opts.C = cfg.C;
    opts.seed = cfg.seed;
    if (!cfg.model_path.empty()) {
        auto saved = learn::load_model(cfg.model_path);
        require(saved.space == features::parse_space(cfg.space),
                "model space does not match configured space");
        require(saved.names == p.vocab.names,
                "model features do not match the corpus vocabulary");
        return saved.model;
    }
    auto data = learn::make_dataset(p.vectors, p.labels, p.vocab.size());
    auto balanced = learn::balance(data, cfg.seed);
    auto model = learn::train(balanced, opts);
    if (balanced_out) *balanced_out = std::move(balanced);
    return model;
}

std::string pct1(double fraction) { return io::fmt_fixed(100.0 * fraction, 1); }

const char* kWeekdayNames[7] = {"Mon", "Tue", "Wed", "Thu", "Fri", "Sat", "Sun"};

void write_weekly(const std::array<labeling::WeekdayRow, 7>& rows, const std::string& path) {
    std::ostringstream out;
    out << "weekday\ttotal\tabove_pct\tontarget_pct\tbelow_pct\n";
    for (const auto& row : rows)
        out << kWeekdayNames[row.weekday - 1] << '\t' << row.total << '\t'
            << io::fmt_fixed(row.percent(labeling::DayLabel::Above), 1) << '\t'
            << io::fmt_fixed(row.percent(labeling::DayLabel::OnTarget), 1) << '\t'
            << io::fmt_fixed(row.percent(labeling::DayLabel::Below), 1) << '\n';
    io::write_file(path, out.str());
}

void write_buckets(const std::vector<labeling::BucketRow>& rows, const std::string& path,
                   const std::string& plot_path) {
    std::ostringstream out;
    out << "bucket\tusers\tbelow_pct\tontarget_pct\tabove_pct\n";
    for (const auto& row : rows)
        out << row.bucket << '\t' << row.users << '\t' << pct1(row.fraction[0]) << '\t'
            << pct1(row.fraction[1]) << '\t' << pct1(row.fraction[2]) << '\n';
    io::write_file(path, out.str());

    std::ostringstream plot;
    plot << "bucket\tbelow\tontarget\tabove\n";
    for (const auto& row : rows)
        plot << row.bucket << '\t' << io::fmt_double(row.fraction[0]) << '\t'
             << io::fmt_double(row.fraction[1]) << '\t' << io::fmt_double(row.fraction[2])
             << '\n';
    io::write_file(plot_path, plot.str());
}

int cmd_stats(const RunConfig& cfg) {
    require(!cfg.corpus_path.empty(), "a corpus path is required (--corpus)");
    auto corpus = corpus::load_corpus(cfg.corpus_path);
    auto st = corpus::corpus_stats(corpus);

    OutputGuard guard(cfg.out_dir);
    std::ostringstream out;
    out << "key\tvalue\n";
    out << "users\t" << st.users << '\n';
    out << "total_days\t" << st.total_days << '\n';
    out << "median_days_per_user\t" << st.median_days_per_user << '\n';
    out << "total_entries\t" << st.total_entries << '\n';
    if (!cfg.taxonomy_path.empty()) {
        auto tax = taxonomy::load_taxonomy(cfg.taxonomy_path);
        out << "coverage\t" << io::fmt_double(taxonomy::coverage_report(corpus, tax))
            << '\n';
    }
    io::write_file(guard.path("stats.tsv"), out.str());
    write_manifest(guard, cfg, "stats", pipeline_inputs(cfg));
    guard.commit();
    return 0;
}

int cmd_annotate(const RunConfig& cfg) {
    require(!cfg.corpus_path.empty(), "a corpus path is required (--corpus)");
    require(!cfg.taxonomy_path.empty(), "a taxonomy path is required (--taxonomy)");
    auto corpus = corpus::load_corpus(cfg.corpus_path);
    auto tax = taxonomy::load_taxonomy(cfg.taxonomy_path);
    auto index = taxonomy::annotate_corpus(corpus, tax, cfg.jobs);

    std::vector<std::string> texts;
    texts.reserve(index.by_text.size());
    for (const auto& [text, ann] : index.by_text) texts.push_back(text);
    std::sort(texts.begin(), texts.end());

    OutputGuard guard(cfg.out_dir);
    std::ostringstream out;
    out << "text\tpaths\n";
    std::size_t matched = 0;
    for (const auto& text : texts) {
        const auto& ann = index.by_text.at(text);
        if (!ann.empty()) ++matched;
        out << text << '\t';
        bool first = true;
        for (const auto& p : ann) {
            if (!first) out << '|';
            out << taxonomy::path_str(p);
            first = false;
        }
        out << '\n';
    }
    io::write_file(guard.path("annotations.tsv"), out.str());

    std::ostringstream cov;
    cov << "unique_texts\tmatched\tfraction\n";
    cov << texts.size() << '\t' << matched << '\t'
        << io::fmt_double(texts.empty() ? 0.0
                                        : static_cast<double>(matched) /
                                              static_cast<double>(texts.size()))
        << '\n';
    io::write_file(guard.path("coverage.tsv"), cov.str());
    write_manifest(guard, cfg, "annotate", pipeline_inputs(cfg));
    guard.commit();
    return 0;
}

int cmd_featurize(const RunConfig& cfg) {
    auto p = load_pipeline(cfg, true);
    OutputGuard guard(cfg.out_dir);
    features::save_vocabulary(p.vocab, guard.path("vocabulary.tsv"));
    features::save_vectors(p.vectors, guard.path("vectors.tsv"));
    std::ostringstream users;
    for (const auto& uid : p.eligible) users << uid << '\n';
    io::write_file(guard.path("eligible.txt"), users.str());
    write_manifest(guard, cfg, "featurize", pipeline_inputs(cfg));
    guard.commit();
    return 0;
}

int cmd_label(const RunConfig& cfg) {
    require(!cfg.corpus_path.empty(), "a corpus path is required (--corpus)");
    auto corpus = corpus::load_corpus(cfg.corpus_path);
    auto policy = make_policy(cfg);
    auto labels = labeling::label_corpus(corpus, policy);
    auto counts = labeling::class_counts(labels);

    OutputGuard guard(cfg.out_dir);
    labeling::save_labeled_days(corpus, policy, guard.path("labeled_days.tsv"));
    labeling::save_user_labels(labels, guard.path("user_labels.tsv"));

    std::ostringstream cc;
    cc << "label\tusers\n";
    cc << "below\t" << counts.counts[0] << '\n';
    cc << "on-target\t" << counts.counts[1] << '\n';
    cc << "above\t" << counts.counts[2] << '\n';
    io::write_file(guard.path("class_counts.tsv"), cc.str());

    write_weekly(labeling::weekly_trend(corpus, policy), guard.path("weekly.tsv"));
    write_buckets(labeling::lifetime_buckets(corpus, policy, cfg.buckets),
                  guard.path("buckets.tsv"), guard.path("buckets.plot.tsv"));
    write_manifest(guard, cfg, "label", {cfg.corpus_path});
    guard.commit();
    return 0;
}

int cmd_train(const RunConfig& cfg) {
    auto p = load_pipeline(cfg, true);
    learn::Dataset balanced;
    auto model = obtain_model(cfg, p, &balanced);

    OutputGuard guard(cfg.out_dir);
    learn::save_model(model, p.vocab, guard.path("model.tsv"));
    std::ostringstream info;
    info << "key\tvalue\n";
    info << "eligible_users\t" << p.eligible.size() << '\n';
    info << "balanced_sample\t" << balanced.users.size() << '\n';
    info << "features\t" << p.vocab.size() << '\n';
    info << "epochs\t" << model.epochs << '\n';
    info << "final_objective\t"
         << io::fmt_double(model.objective_history.empty()
                               ? 0.0
                               : model.objective_history.back())
         << '\n';
    info << "bias\t" << io::fmt_double(model.bias) << '\n';
    io::write_file(guard.path("training.tsv"), info.str());
    write_manifest(guard, cfg, "train", pipeline_inputs(cfg));
    guard.commit();
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    auto p = load_pipeline(cfg, true);
    auto data = learn::make_dataset(p.vectors, p.labels, p.vocab.size());
    auto balanced = learn::balance(data, cfg.seed);
    learn::TrainOptions opts;
    opts.C = cfg.C;
    opts.seed = cfg.seed;
    auto report = learn::cross_validate(balanced, cfg.folds, opts);

    OutputGuard guard(cfg.out_dir);
    std::ostringstream out;
    out << "fold\taccuracy\tprecision\trecall\n";
    for (std::size_t f = 0; f < report.folds.size(); ++f) {
        const auto& m = report.folds[f];
        out << (f + 1) << '\t' << io::fmt_fixed(m.accuracy, 4) << '\t';
        out << (m.precision ? io::fmt_fixed(*m.precision, 4) : "-") << '\t';
        out << (m.recall ? io::fmt_fixed(*m.recall, 4) : "-") << '\n';
    }
    out << "mean\t" << io::fmt_fixed(report.accuracy_mean, 4) << '\t'
        << io::fmt_fixed(report.precision_mean, 4) << '\t'
        << io::fmt_fixed(report.recall_mean, 4) << '\n';
    out << "stddev\t" << io::fmt_fixed(report.accuracy_std, 4) << '\t'
        << io::fmt_fixed(report.precision_std, 4) << '\t'
        << io::fmt_fixed(report.recall_std, 4) << '\n';
    out << "defined_folds\t" << report.folds.size() << '\t' << report.precision_folds
        << '\t' << report.recall_folds << '\n';
    io::write_file(guard.path("cv.tsv"), out.str());
    write_manifest(guard, cfg, "evaluate", pipeline_inputs(cfg));
    guard.commit();
    return 0;
}

int cmd_features_report(const RunConfig& cfg) {
    auto p = load_pipeline(cfg, true);
    auto model = obtain_model(cfg, p);
    auto tf = learn::top_features(model, p.vocab, p.corpus, index_ptr(p), 10);

    OutputGuard guard(cfg.out_dir);
    std::ostringstream out;
    out << "side\trank\tfeature\tweight\texample\n";
    for (std::size_t i = 0; i < tf.positive.size(); ++i)
        out << "positive\t" << (i + 1) << '\t' << tf.positive[i].name << '\t'
            << io::fmt_double(tf.positive[i].weight) << '\t' << tf.positive[i].example_text
            << '\n';
    for (std::size_t i = 0; i < tf.negative.size(); ++i)
        out << "negative\t" << (i + 1) << '\t' << tf.negative[i].name << '\t'
            << io::fmt_double(tf.negative[i].weight) << '\t' << tf.negative[i].example_text
            << '\n';
    io::write_file(guard.path("top_features.tsv"), out.str());
    auto inputs = pipeline_inputs(cfg);
    if (!cfg.model_path.empty()) inputs.push_back(cfg.model_path);
    write_manifest(guard, cfg, "features-report", inputs);
    guard.commit();
    return 0;
}

int cmd_cluster(const RunConfig& cfg) {
    auto p = load_pipeline(cfg, true);
    require(!p.vectors.empty(), "no eligible users to cluster");

    std::vector<features::FeatureVector> normed;
    normed.reserve(p.vectors.size());
    for (const auto& v : p.vectors) normed.push_back(features::normalize(v));

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(normed.size()),
                                              static_cast<Eigen::Index>(p.vocab.size()));
    for (std::size_t i = 0; i < normed.size(); ++i)
        for (const auto& [id, val] : normed[i].values)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(id)) = val;

    auto model = cluster::xmeans(X, cfg.k_min, cfg.k_max, cfg.seed);
    auto gains = cluster::rank_gains(model, normed, p.vocab, cfg.rank_cap, 10);
    std::vector<std::string> row_users;
    row_users.reserve(normed.size());
    for (const auto& v : normed) row_users.push_back(v.user_id);
    auto comp = cluster::cluster_composition(model, row_users, p.labels);

    OutputGuard guard(cfg.out_dir);
    std::ostringstream assign;
    assign << "user_id\tcluster\n";
    for (std::size_t i = 0; i < row_users.size(); ++i)
        assign << row_users[i] << '\t' << model.assignment[i] << '\n';
    io::write_file(guard.path("clusters.tsv"), assign.str());

    std::ostringstream comp_out;
    comp_out << "cluster\tsize\tlabeled\tbelow\tbelow_pct\tabove\tabove_pct\n";
    for (std::size_t c = 0; c < comp.size(); ++c)
        comp_out << c << '\t' << comp[c].size << '\t' << comp[c].labeled << '\t'
                 << comp[c].below << '\t' << comp[c].below_pct << '\t' << comp[c].above
                 << '\t' << comp[c].above_pct << '\n';
    io::write_file(guard.path("composition.tsv"), comp_out.str());

    std::ostringstream gout;
    gout << "cluster\ttoken\tglobal_rank\tcluster_rank\tgain\n";
    for (std::size_t c = 0; c < gains.per_cluster.size(); ++c)
        for (const auto& g : gains.per_cluster[c])
            gout << c << '\t' << g.token << '\t' << g.global_rank << '\t' << g.cluster_rank
                 << '\t' << g.gain << '\n';
    io::write_file(guard.path("rank_gains.tsv"), gout.str());
    write_manifest(guard, cfg, "cluster", pipeline_inputs(cfg));
    guard.commit();
    return 0;
}

int cmd_profile(const RunConfig& cfg) {
    auto p = load_pipeline(cfg, true);
    auto model = obtain_model(cfg, p);
    auto profile = learn::margin_profile(model, p.vectors, p.corpus, p.policy, cfg.groups);

    OutputGuard guard(cfg.out_dir);
    std::ostringstream out;
    out << "group\tpct_lo\tpct_hi\tusers\tbelow_pct\tontarget_pct\tabove_pct\tmean_days\n";
    double step = 100.0 / static_cast<double>(cfg.groups);
    for (const auto& g : profile.groups)
        out << g.group << '\t' << io::fmt_fixed(step * static_cast<double>(g.group), 1)
            << '\t' << io::fmt_fixed(step * static_cast<double>(g.group + 1), 1) << '\t'
            << g.users << '\t' << pct1(g.fraction[0]) << '\t' << pct1(g.fraction[1])
            << '\t' << pct1(g.fraction[2]) << '\t' << io::fmt_fixed(g.mean_days, 1)
            << '\n';
    io::write_file(guard.path("profile.tsv"), out.str());

    std::ostringstream plot;
    plot << "group\tbelow\tontarget\tabove\tmean_days\n";
    for (const auto& g : profile.groups)
        plot << g.group << '\t' << io::fmt_double(g.fraction[0]) << '\t'
             << io::fmt_double(g.fraction[1]) << '\t' << io::fmt_double(g.fraction[2])
             << '\t' << io::fmt_double(g.mean_days) << '\n';
    io::write_file(guard.path("profile.plot.tsv"), plot.str());
    auto inputs = pipeline_inputs(cfg);
    if (!cfg.model_path.empty()) inputs.push_back(cfg.model_path);
    write_manifest(guard, cfg, "profile", inputs);
    guard.commit();
    return 0;
}

int cmd_synth(const RunConfig& cfg, bool seed_overridden) {
    require(!cfg.spec_path.empty(), "a generator spec is required (--spec)");
    auto spec = synth::parse_spec(io::read_kv(cfg.spec_path));
    if (seed_overridden) spec.seed = cfg.seed;
    auto result = synth::generate(spec);

    OutputGuard guard(cfg.out_dir);
    corpus::save_corpus(result.corpus, guard.path("corpus.tsv"));
    synth::save_truth(result.truth, guard.path("truth.tsv"));
    write_manifest(guard, cfg, "synth", {cfg.spec_path});
    guard.commit();
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args) {
    RunConfig cfg;
    try {
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            if (args[i] == "--config")
                apply_kv(cfg, io::read_kv(args[i + 1]), args[i + 1]);

        CLI::App app{"food diary mining pipeline"};
        app.require_subcommand(1);

        static const char* kCommands[] = {"stats",    "annotate", "featurize",
                                          "label",    "train",    "evaluate",
                                          "features-report", "cluster", "profile",
                                          "synth"};
        std::string config_path;
        std::vector<CLI::App*> subs;
        for (const char* name : kCommands) {
            auto* sub = app.add_subcommand(name);
            sub->add_option("--config", config_path, "key=value config file");
            sub->add_option("--corpus", cfg.corpus_path, "diary corpus file");
            sub->add_option("--taxonomy", cfg.taxonomy_path, "taxonomy file");
            sub->add_option("--spec", cfg.spec_path, "generator spec file");
            sub->add_option("--model", cfg.model_path, "pre-trained model file");
            sub->add_option("--out", cfg.out_dir, "output directory");
            sub->add_option("--space", cfg.space, "feature space: token|category");
            sub->add_option("--support", cfg.support, "vocabulary user-support threshold");
            sub->add_option("--min-days", cfg.min_days, "eligibility day threshold");
            sub->add_option("--min-kcal", cfg.min_kcal, "minimum logged kcal per day");
            sub->add_option("--below-margin", cfg.below_margin, "Below margin fraction");
            sub->add_flag("--symmetric", cfg.symmetric, "symmetric Above margin");
            sub->add_option("--tie-priority", cfg.tie_priority, "modal tie order");
            sub->add_option("--svm-c", cfg.C, "SVM regularization constant");
            sub->add_option("--folds", cfg.folds, "cross-validation folds");
            sub->add_option("--seed", cfg.seed, "master RNG seed");
            sub->add_flag("--normalize", cfg.normalize, "2-norm vectors before the SVM");
            sub->add_option("--k-min", cfg.k_min, "minimum cluster count");
            sub->add_option("--k-max", cfg.k_max, "maximum cluster count");
            sub->add_option("--rank-cap", cfg.rank_cap, "rank-gain cluster-rank cap");
            sub->add_option("--groups", cfg.groups, "margin profile group count");
            sub->add_option("--buckets", cfg.buckets, "lifetime bucket count");
            sub->add_option("--jobs", cfg.jobs, "worker thread cap");
            subs.push_back(sub);
        }

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            return app.exit(e);
        }

        validate_config(cfg);
        auto* active = app.get_subcommands().at(0);
        const std::string name = active->get_name();
        bool seed_overridden = active->count("--seed") > 0;

        if (name == "stats") return cmd_stats(cfg);
        if (name == "annotate") return cmd_annotate(cfg);
        if (name == "featurize") return cmd_featurize(cfg);
        if (name == "label") return cmd_label(cfg);
        if (name == "train") return cmd_train(cfg);
        if (name == "evaluate") return cmd_evaluate(cfg);
        if (name == "features-report") return cmd_features_report(cfg);
        if (name == "cluster") return cmd_cluster(cfg);
        if (name == "profile") return cmd_profile(cfg);
        if (name == "synth") return cmd_synth(cfg, seed_overridden);
        throw std::logic_error("unhandled command " + name);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace dietmine::cli
