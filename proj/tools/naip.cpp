// naip — confidence-aware review aggregation, debiased pairwise training,
// and ranking evaluation as a pipeline of file-to-file subcommands.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "naip/cluster.hpp"
#include "naip/ingest.hpp"
#include "naip/manifest.hpp"
#include "naip/metrics.hpp"
#include "naip/pairs.hpp"
#include "naip/rts.hpp"
#include "naip/scorer.hpp"
#include "naip/synth.hpp"
#include "naip/train.hpp"
#include "naip/types.hpp"

namespace {

using naip::ValidationError;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("NAIP_SEED")) return std::strtoull(env, nullptr, 10);
    return 42;
}

// Shared venue-scale options: explicit bounds, a config file, or --infer-scale.
struct ScaleOpts {
    naip::VenueScale scale;
    std::string config_path;
    bool infer = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--score-min", scale.score_min, "Venue score lower bound");
        cmd->add_option("--score-max", scale.score_max, "Venue score upper bound");
        cmd->add_option("--conf-min", scale.conf_min, "Venue confidence lower bound");
        cmd->add_option("--conf-max", scale.conf_max, "Venue confidence upper bound");
        cmd->add_option("--scale-config", config_path,
                        "JSON file with the four venue-scale bounds");
        cmd->add_flag("--infer-scale", infer,
                      "Use dataset-wide min/max as the scale bounds");
    }

    naip::VenueScale resolve(const std::string& dataset_path) const {
        if (!config_path.empty()) return naip::load_scale(config_path);
        if (infer) {
            // permissive first pass just to read values
            naip::VenueScale wide{-1e9, 1e9, -1e9, 1e9};
            return naip::infer_scale(naip::load_dataset(dataset_path, wide));
        }
        naip::VenueScale s = scale;
        s.validate();
        return s;
    }
};

naip::BucketRatios parse_ratios(const std::string& spec) {
    if (spec.find(',') == std::string::npos) return naip::bucket_preset(spec);
    naip::BucketRatios r;
    std::stringstream ss(spec);
    std::string tok;
    int i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i >= 9) throw ValidationError("--ratios: expected exactly 9 values");
        r.ratios[i++] = std::stod(tok);
    }
    if (i != 9) throw ValidationError("--ratios: expected exactly 9 values");
    r.validate();
    return r;
}

void write_scores(const std::map<std::string, double>& scores, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write score table: " + path);
    out << std::setprecision(17);
    for (const auto& [id, s] : scores) out << id << '\t' << s << '\n';
}

std::map<std::string, double> load_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open score table: " + path);
    std::map<std::string, double> out;
    std::string id;
    double s;
    while (in >> id >> s) out[id] = s;
    return out;
}

int run_main(const std::vector<std::string>& args);

// ---- subcommand bodies ----------------------------------------------------

void cmd_synth(const naip::SynthConfig& cfg, const std::string& out_path,
               const std::string& truth_path) {
    naip::StageTimer timer;
    const naip::SynthDataset data = naip::generate(cfg);
    naip::write_dataset(data.papers, out_path);
    naip::write_truth(data.truth, truth_path);

    naip::RunManifest m;
    m.subcommand = "synth";
    m.seed = cfg.seed;
    m.config = {{"n_papers", cfg.n_papers},
                {"n_domains", cfg.n_domains},
                {"years", cfg.years},
                {"domain_bias_range", cfg.domain_bias_range},
                {"year_drift", cfg.year_drift},
                {"reviewers_min", cfg.reviewers_min},
                {"reviewers_max", cfg.reviewers_max},
                {"accept_quantile", cfg.accept_quantile},
                {"feature_dim", cfg.feature_dim},
                {"nuisance_dim", cfg.nuisance_dim},
                {"alpha", cfg.alpha},
                {"signal_noise", cfg.signal_noise},
                {"nuisance_noise", cfg.nuisance_noise}};
    m.outputs = {out_path, truth_path};
    m.duration_seconds = timer.seconds();
    m.write(out_path);
}

void cmd_rts(const std::string& in_path, const std::string& out_path, const ScaleOpts& scale_opts,
             const naip::RtsConfig& cfg) {
    naip::StageTimer timer;
    const naip::VenueScale scale = scale_opts.resolve(in_path);
    std::vector<naip::PaperRecord> papers = naip::load_dataset(in_path, scale);
    for (auto& p : papers) p.rts = naip::rts_of(p, scale, cfg);
    naip::write_dataset(papers, out_path);

    naip::RunManifest m;
    m.subcommand = "rts";
    m.config = {{"alpha", cfg.alpha},
                {"sigma_variant", cfg.sigma_variant == naip::SigmaVariant::smooth
                                      ? "smooth"
                                      : "aggressive"},
                {"posterior",
                 cfg.posterior == naip::PosteriorMode::truncated ? "truncated" : "clamped"},
                {"score_min", scale.score_min},
                {"score_max", scale.score_max},
                {"conf_min", scale.conf_min},
                {"conf_max", scale.conf_max}};
    m.inputs = {in_path};
    m.outputs = {out_path};
    m.duration_seconds = timer.seconds();
    m.write(out_path);
}

void cmd_cluster(const std::string& in_path, const std::string& out_path,
                 const ScaleOpts& scale_opts, const naip::ClusterConfig& cfg) {
    naip::StageTimer timer;
    const naip::VenueScale scale = scale_opts.resolve(in_path);
    std::vector<naip::PaperRecord> papers = naip::load_dataset(in_path, scale);
    naip::assign_groups(papers, cfg);
    naip::write_dataset(papers, out_path);

    naip::RunManifest m;
    m.subcommand = "cluster";
    m.config = {{"max_distance", cfg.max_distance},
                {"linkage", cfg.linkage == naip::Linkage::average
                                ? "average"
                                : (cfg.linkage == naip::Linkage::single ? "single" : "complete")},
                {"metric", cfg.metric == naip::DistanceMetric::cosine ? "cosine" : "euclidean"}};
    m.inputs = {in_path};
    m.outputs = {out_path};
    m.duration_seconds = timer.seconds();
    m.write(out_path);
}

void cmd_pairs(const std::string& in_path, const std::string& out_path,
               const ScaleOpts& scale_opts, const naip::PairConfig& cfg,
               const std::string& ratios_spec) {
    naip::StageTimer timer;
    const naip::VenueScale scale = scale_opts.resolve(in_path);
    const std::vector<naip::PaperRecord> papers = naip::load_dataset(in_path, scale);
    std::vector<naip::PairSample> pairs = naip::build_pairs(papers, cfg);
    if (!ratios_spec.empty()) {
        pairs = naip::sample_pairs(pairs, parse_ratios(ratios_spec), cfg.target_pairs,
                                   naip::Rng(cfg.seed).fork(1).next_u64());
    } else if (static_cast<int>(pairs.size()) > cfg.target_pairs) {
        pairs.resize(cfg.target_pairs);
    }
    naip::write_pairs(pairs, out_path);

    naip::RunManifest m;
    m.subcommand = "pairs";
    m.seed = cfg.seed;
    m.config = {{"min_gap", cfg.min_gap},
                {"max_occurrence", cfg.max_occurrence ? nlohmann::json(*cfg.max_occurrence)
                                                      : nlohmann::json(nullptr)},
                {"target_pairs", cfg.target_pairs},
                {"ratios", ratios_spec.empty() ? "none" : ratios_spec}};
    m.inputs = {in_path};
    m.outputs = {out_path};
    m.duration_seconds = timer.seconds();
    m.write(out_path);
}

void cmd_train(const std::string& pairs_path, const std::string& data_path,
               const std::string& out_path, const ScaleOpts& scale_opts,
               naip::ScorerKind scorer_kind, int hidden, const naip::TrainConfig& cfg) {
    naip::StageTimer timer;
    const naip::VenueScale scale = scale_opts.resolve(data_path);
    const std::vector<naip::PaperRecord> papers = naip::load_dataset(data_path, scale);
    const std::vector<naip::PairSample> pairs = naip::load_pairs(pairs_path);
    if (papers.empty()) throw ValidationError("train: empty dataset");

    naip::ScorerModel model =
        naip::init_model(scorer_kind, static_cast<int>(papers.front().features.size()),
                         naip::Rng(cfg.seed).fork(7).next_u64(), cfg.init_scale, hidden);
    const naip::TrainResult result = naip::train(model, pairs, naip::feature_map(papers), cfg);
    naip::save_model(result.model, out_path);

    std::cerr << "train: epoch mean loss:";
    for (double l : result.epoch_mean_loss) std::cerr << ' ' << l;
    std::cerr << '\n';

    naip::RunManifest m;
    m.subcommand = "train";
    m.seed = cfg.seed;
    m.config = {{"loss", naip::to_string(cfg.loss)},
                {"lr", cfg.lr},
                {"batch_size", cfg.batch_size},
                {"epochs", cfg.epochs},
                {"curriculum", cfg.curriculum},
                {"scorer", naip::to_string(scorer_kind)},
                {"hidden", hidden},
                {"init_scale", cfg.init_scale}};
    m.inputs = {pairs_path, data_path};
    m.outputs = {out_path};
    m.duration_seconds = timer.seconds();
    m.write(out_path);
}

void cmd_infer(const std::string& model_path, const std::string& in_path,
               const std::string& out_path, const ScaleOpts& scale_opts) {
    naip::StageTimer timer;
    const naip::VenueScale scale = scale_opts.resolve(in_path);
    const std::vector<naip::PaperRecord> papers = naip::load_dataset(in_path, scale);
    const naip::ScorerModel model = naip::load_model(model_path);
    write_scores(naip::predict_all(model, papers), out_path);

    naip::RunManifest m;
    m.subcommand = "infer";
    m.inputs = {model_path, in_path};
    m.outputs = {out_path};
    m.duration_seconds = timer.seconds();
    m.write(out_path);
}

void cmd_eval(const std::string& scores_path, const std::string& in_path,
              const std::string& out_path, const ScaleOpts& scale_opts, int k,
              naip::TiePolicy tie_policy) {
    naip::StageTimer timer;
    const naip::VenueScale scale = scale_opts.resolve(in_path);
    const std::vector<naip::PaperRecord> papers = naip::load_dataset(in_path, scale);
    const std::map<std::string, double> scores = load_scores(scores_path);

    // ground truth: latent quality when available (synthetic), else RTS
    std::map<std::string, double> truth, relevance;
    std::map<std::string, bool> labels;
    std::map<std::string, naip::Decision> decisions;
    for (const auto& p : papers) {
        if (p.latent_quality) truth[p.id] = *p.latent_quality;
        else if (p.rts) truth[p.id] = *p.rts;
        if (p.rts) relevance[p.id] = *p.rts;
        else if (p.latent_quality) relevance[p.id] = *p.latent_quality;
        if (p.decision != naip::Decision::unknown) {
            labels[p.id] = p.decision != naip::Decision::rejected;
            decisions[p.id] = p.decision;
        }
    }
    if (truth.empty())
        throw ValidationError("eval: dataset has neither latent_quality nor rts fields");

    naip::MetricsReport rep;
    rep.k = k;
    std::vector<double> tx, ty;
    for (const auto& [id, t] : truth) {
        const auto it = scores.find(id);
        if (it == scores.end()) throw ValidationError("eval: no score for id \"" + id + "\"");
        tx.push_back(t);
        ty.push_back(it->second);
    }
    rep.spearman = naip::spearman(tx, ty);
    rep.pair_acc = naip::pair_acc(scores, truth);
    rep.ndcg_at_k = naip::ndcg_at_k(scores, relevance, k);

    std::ostringstream report;
    report << std::fixed << std::setprecision(6);
    report << "spearman        " << rep.spearman << '\n';
    report << "pair_acc        " << rep.pair_acc << '\n';
    report << "ndcg@" << k << "         " << rep.ndcg_at_k << '\n';

    bool has_pos = false, has_neg = false;
    for (const auto& [id, pos] : labels) (pos ? has_pos : has_neg) = true;
    if (has_pos && has_neg) {
        rep.auc = naip::auc(scores, labels, tie_policy);
        const naip::ThresholdResult th = naip::f1_best_threshold(scores, labels);
        rep.best_f1 = th.f1;
        rep.best_threshold = th.threshold;
        rep.acc_at_best_f1 = th.accuracy;
        for (const auto& [id, pos] : labels) (pos ? rep.n_pos : rep.n_neg)++;
        report << "auc             " << rep.auc << '\n';
        report << "best_f1         " << rep.best_f1 << '\n';
        report << "best_threshold  " << rep.best_threshold << '\n';
        report << "acc_at_best_f1  " << rep.acc_at_best_f1 << '\n';
        report << "n_pos           " << rep.n_pos << '\n';
        report << "n_neg           " << rep.n_neg << '\n';
        report << "decision_trend ";
        for (const auto& [dec, mean] : naip::decision_trend(scores, decisions))
            report << ' ' << naip::to_string(dec) << '=' << mean;
        report << '\n';
    } else {
        report << "auc             n/a (labels missing)\n";
    }

    std::cout << report.str();
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw ValidationError("cannot write report: " + out_path);
        out << report.str();

        naip::RunManifest m;
        m.subcommand = "eval";
        m.config = {{"k", k},
                    {"tie_policy", tie_policy == naip::TiePolicy::strict ? "strict" : "half"}};
        m.inputs = {scores_path, in_path};
        m.outputs = {out_path};
        m.duration_seconds = timer.seconds();
        m.write(out_path);
    }
}

int cmd_pipeline(const std::string& config_path) {
    std::ifstream in(config_path);
    if (!in) throw ValidationError("cannot open pipeline config: " + config_path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(config_path + ": malformed pipeline config: " + e.what());
    }
    int stage_no = 0;
    for (const auto& stage : j.at("stages")) {
        ++stage_no;
        const auto args = stage.get<std::vector<std::string>>();
        if (args.empty())
            throw ValidationError("pipeline: stage " + std::to_string(stage_no) + " is empty");
        std::cerr << "pipeline: stage " << stage_no << " (" << args[0] << ")\n";
        const int rc = run_main(args);
        if (rc != 0) {
            std::cerr << "pipeline: stage " << stage_no << " (" << args[0] << ") failed with exit code "
                      << rc << '\n';
            return rc;
        }
    }
    return 0;
}

// ---- argument wiring --------------------------------------------------------

int run_main(const std::vector<std::string>& args) {
    CLI::App app{"naip: review aggregation, debiased pairwise training, evaluation"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with known truth");
    naip::SynthConfig synth_cfg;
    synth_cfg.seed = default_seed();
    std::string synth_out, synth_truth, synth_sigma = "smooth";
    synth->add_option("--out", synth_out, "Output dataset file")->required();
    synth->add_option("--truth-out", synth_truth, "Truth sidecar (default <out>.truth.json)");
    synth->add_option("--n-papers", synth_cfg.n_papers);
    synth->add_option("--n-domains", synth_cfg.n_domains);
    synth->add_option("--years", synth_cfg.years, "Publication years")->delimiter(',');
    synth->add_option("--domain-bias-range", synth_cfg.domain_bias_range);
    synth->add_option("--year-drift", synth_cfg.year_drift);
    synth->add_option("--reviewers-min", synth_cfg.reviewers_min);
    synth->add_option("--reviewers-max", synth_cfg.reviewers_max);
    synth->add_option("--accept-quantile", synth_cfg.accept_quantile);
    synth->add_option("--feature-dim", synth_cfg.feature_dim);
    synth->add_option("--nuisance-dim", synth_cfg.nuisance_dim);
    synth->add_option("--signal-noise", synth_cfg.signal_noise);
    synth->add_option("--nuisance-noise", synth_cfg.nuisance_noise);
    synth->add_option("--alpha", synth_cfg.alpha);
    synth->add_option("--sigma-variant", synth_sigma, "smooth | aggressive");
    synth->add_option("--seed", synth_cfg.seed);

    // rts
    auto* rts_cmd = app.add_subcommand("rts", "Populate the rts field of a dataset");
    std::string rts_in, rts_out, rts_sigma = "smooth", rts_posterior = "truncated";
    naip::RtsConfig rts_cfg;
    ScaleOpts rts_scale;
    rts_cmd->add_option("--in", rts_in)->required();
    rts_cmd->add_option("--out", rts_out)->required();
    rts_cmd->add_option("--alpha", rts_cfg.alpha, "Lowest-confidence mapping (default 0.2)");
    rts_cmd->add_option("--sigma-variant", rts_sigma, "smooth | aggressive");
    rts_cmd->add_option("--posterior", rts_posterior, "truncated | clamped");
    rts_scale.add_to(rts_cmd);

    // cluster
    auto* cluster_cmd = app.add_subcommand("cluster", "Assign hierarchical cluster ids");
    std::string cl_in, cl_out, cl_linkage = "average", cl_metric = "cosine";
    naip::ClusterConfig cl_cfg;
    ScaleOpts cl_scale;
    cluster_cmd->add_option("--in", cl_in)->required();
    cluster_cmd->add_option("--out", cl_out)->required();
    cluster_cmd->add_option("--max-distance", cl_cfg.max_distance);
    cluster_cmd->add_option("--linkage", cl_linkage, "average | single | complete");
    cluster_cmd->add_option("--metric", cl_metric, "cosine | euclidean");
    cl_scale.add_to(cluster_cmd);

    // pairs
    auto* pairs_cmd = app.add_subcommand("pairs", "Build and sample within-group training pairs");
    std::string pr_in, pr_out, pr_ratios;
    int pr_max_occurrence = 0;
    naip::PairConfig pr_cfg;
    pr_cfg.seed = default_seed();
    ScaleOpts pr_scale;
    pairs_cmd->add_option("--in", pr_in)->required();
    pairs_cmd->add_option("--out", pr_out)->required();
    pairs_cmd->add_option("--min-gap", pr_cfg.min_gap);
    pairs_cmd->add_option("--max-occurrence", pr_max_occurrence, "0 = unlimited");
    pairs_cmd->add_option("--target", pr_cfg.target_pairs);
    pairs_cmd->add_option("--ratios", pr_ratios,
                          "Difficulty preset (easiest|easier|moderate|harder|hardest) or 9 "
                          "comma-separated ratios; omit to keep built pairs as-is");
    pairs_cmd->add_option("--seed", pr_cfg.seed);
    pr_scale.add_to(pairs_cmd);

    // train
    auto* train_cmd = app.add_subcommand("train", "Train a pointwise scorer on pairs");
    std::string tr_pairs, tr_data, tr_out, tr_loss = "bce", tr_scorer = "linear";
    std::string tr_cur_start = "easiest", tr_cur_end = "moderate";
    int tr_hidden = 16;
    naip::TrainConfig tr_cfg;
    tr_cfg.seed = default_seed();
    ScaleOpts tr_scale;
    train_cmd->add_option("--pairs", tr_pairs)->required();
    train_cmd->add_option("--data", tr_data)->required();
    train_cmd->add_option("--out", tr_out)->required();
    train_cmd->add_option("--loss", tr_loss, "bce|probit|brier|hinge|huber|rtr");
    train_cmd->add_option("--lr", tr_cfg.lr);
    train_cmd->add_option("--batch", tr_cfg.batch_size);
    train_cmd->add_option("--epochs", tr_cfg.epochs);
    train_cmd->add_flag("--curriculum", tr_cfg.curriculum);
    train_cmd->add_option("--curriculum-start", tr_cur_start);
    train_cmd->add_option("--curriculum-end", tr_cur_end);
    train_cmd->add_option("--scorer", tr_scorer, "linear | mlp1");
    train_cmd->add_option("--hidden", tr_hidden);
    train_cmd->add_option("--init-scale", tr_cfg.init_scale);
    train_cmd->add_option("--tau", tr_cfg.loss_params.tau);
    train_cmd->add_option("--margin", tr_cfg.loss_params.m);
    train_cmd->add_option("--delta-h", tr_cfg.loss_params.delta_h);
    train_cmd->add_option("--kappa", tr_cfg.loss_params.kappa);
    train_cmd->add_option("--lambda", tr_cfg.loss_params.lambda);
    train_cmd->add_option("--seed", tr_cfg.seed);
    tr_scale.add_to(train_cmd);

    // infer
    auto* infer_cmd = app.add_subcommand("infer", "Score every paper with a trained model");
    std::string inf_model, inf_in, inf_out;
    ScaleOpts inf_scale;
    infer_cmd->add_option("--model", inf_model)->required();
    infer_cmd->add_option("--in", inf_in)->required();
    infer_cmd->add_option("--out", inf_out)->required();
    inf_scale.add_to(infer_cmd);

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Metric report for a score table");
    std::string ev_scores, ev_in, ev_out, ev_tie = "strict";
    int ev_k = 20;
    ScaleOpts ev_scale;
    eval_cmd->add_option("--scores", ev_scores)->required();
    eval_cmd->add_option("--in", ev_in)->required();
    eval_cmd->add_option("--out", ev_out, "Also write the report to this file");
    eval_cmd->add_option("--k", ev_k, "NDCG cutoff");
    eval_cmd->add_option("--tie-policy", ev_tie, "strict | half");
    ev_scale.add_to(eval_cmd);

    // pipeline
    auto* pipe_cmd = app.add_subcommand("pipeline", "Run a stage sequence from a config file");
    std::string pipe_config;
    pipe_cmd->add_option("--config", pipe_config)->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*synth) {
            synth_cfg.sigma_variant = naip::sigma_variant_from_string(synth_sigma);
            if (synth_truth.empty()) synth_truth = synth_out + ".truth.json";
            cmd_synth(synth_cfg, synth_out, synth_truth);
        } else if (*rts_cmd) {
            rts_cfg.sigma_variant = naip::sigma_variant_from_string(rts_sigma);
            rts_cfg.posterior = naip::posterior_from_string(rts_posterior);
            cmd_rts(rts_in, rts_out, rts_scale, rts_cfg);
        } else if (*cluster_cmd) {
            cl_cfg.linkage = naip::linkage_from_string(cl_linkage);
            cl_cfg.metric = naip::metric_from_string(cl_metric);
            cmd_cluster(cl_in, cl_out, cl_scale, cl_cfg);
        } else if (*pairs_cmd) {
            if (pr_max_occurrence > 0) pr_cfg.max_occurrence = pr_max_occurrence;
            cmd_pairs(pr_in, pr_out, pr_scale, pr_cfg, pr_ratios);
        } else if (*train_cmd) {
            tr_cfg.loss = naip::loss_from_string(tr_loss);
            tr_cfg.curriculum_start = parse_ratios(tr_cur_start);
            tr_cfg.curriculum_end = parse_ratios(tr_cur_end);
            cmd_train(tr_pairs, tr_data, tr_out, tr_scale,
                      naip::scorer_kind_from_string(tr_scorer), tr_hidden, tr_cfg);
        } else if (*infer_cmd) {
            cmd_infer(inf_model, inf_in, inf_out, inf_scale);
        } else if (*eval_cmd) {
            cmd_eval(ev_scores, ev_in, ev_out, ev_scale, ev_k,
                     naip::tie_policy_from_string(ev_tie));
        } else if (*pipe_cmd) {
            return cmd_pipeline(pipe_config);
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_main(args);
}
