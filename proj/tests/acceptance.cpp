// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
// Criteria 3/4/9/11 share one synthetic-bias experiment over five fixed seeds.

#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "naip/cluster.hpp"
#include "naip/losses.hpp"
#include "naip/math.hpp"
#include "naip/metrics.hpp"
#include "naip/pairs.hpp"
#include "naip/rts.hpp"
#include "naip/scorer.hpp"
#include "naip/synth.hpp"
#include "naip/train.hpp"
#include "oracles.hpp"

using namespace naip;
using clk = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int idx, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d. %-28s %s\n", pass ? "PASS" : "FAIL", idx, name.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

double elapsed(clk::time_point t0) {
    return std::chrono::duration<double>(clk::now() - t0).count();
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---- criterion 1: RTS vs Simpson quadrature --------------------------------

void criterion_rts_oracle() {
    const auto t0 = clk::now();
    Rng rng(2024);
    RtsConfig cfg;  // truncated posterior
    double max_err = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(6));
        std::vector<NormalizedReview> reviews;
        for (int i = 0; i < n; ++i) {
            NormalizedReview r;
            r.s_tilde = rng.uniform();
            r.c_tilde = rng.uniform(0.2, 1.0);
            r.sigma = sigma(r.c_tilde,
                            trial % 2 == 0 ? SigmaVariant::smooth : SigmaVariant::aggressive);
            reviews.push_back(r);
        }
        max_err = std::max(max_err, std::abs(rts(reviews, cfg) - oracle::rts_simpson(reviews)));
    }
    const double secs = elapsed(t0);
    report(1, "rts oracle equivalence", max_err <= 1e-6 && secs < 5.0,
           fmt("max |rts - simpson| = %.3g over 1000 sets in %.2fs (need <= 1e-6, < 5s)",
               max_err, secs));
}

// ---- criterion 2: loss gradients vs finite differences ----------------------

void criterion_loss_gradients() {
    const auto t0 = clk::now();
    Rng rng(7);
    LossParams params;
    double max_rel = 0.0;
    for (LossKind kind : {LossKind::bce, LossKind::probit, LossKind::brier, LossKind::hinge,
                          LossKind::huber, LossKind::rtr}) {
        for (int i = 0; i < 1000; ++i) {
            const double d = rng.uniform(-5.0, 5.0);
            const int z = rng.uniform() < 0.5 ? 1 : 0;
            const double ds = rng.uniform(-1.0, 1.0);
            if (kind == LossKind::hinge && std::abs(params.m - (2.0 * z - 1.0) * d) < 1e-3)
                continue;  // kink neighborhood
            if (kind == LossKind::huber &&
                std::abs(std::abs(d - params.kappa * ds) - params.delta_h) < 1e-3)
                continue;
            const double fd = oracle::central_diff(
                [&](double dd) { return eval_loss(kind, dd, z, ds, params).value; }, d);
            const double an = eval_loss(kind, d, z, ds, params).grad_d;
            max_rel = std::max(max_rel, std::abs(an - fd) / std::max(1.0, std::abs(fd)));
        }
    }
    const double secs = elapsed(t0);
    report(2, "loss gradient suite", max_rel <= 1e-6 && secs < 5.0,
           fmt("max rel err = %.3g over 6 losses x 1000 pts in %.2fs (need <= 1e-6, < 5s)",
               max_rel, secs));
}

// ---- criteria 3, 9, 11: shared debias experiment -----------------------------

// Ordinary least squares with an intercept via normal equations.
std::vector<double> ls_fit(const std::vector<std::vector<double>>& X,
                           const std::vector<double>& y) {
    const int d = static_cast<int>(X[0].size()) + 1;
    std::vector<std::vector<double>> A(d, std::vector<double>(d + 1, 0.0));
    for (std::size_t n = 0; n < X.size(); ++n) {
        std::vector<double> row(X[n]);
        row.push_back(1.0);
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) A[i][j] += row[i] * row[j];
            A[i][d] += row[i] * y[n];
        }
    }
    for (int i = 0; i < d; ++i) A[i][i] += 1e-8;  // tiny ridge for safety
    for (int c = 0; c < d; ++c) {
        int piv = c;
        for (int r = c + 1; r < d; ++r)
            if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
        std::swap(A[c], A[piv]);
        for (int r = 0; r < d; ++r) {
            if (r == c) continue;
            const double f = A[r][c] / A[c][c];
            for (int j = c; j <= d; ++j) A[r][j] -= f * A[c][j];
        }
    }
    std::vector<double> w(d);
    for (int i = 0; i < d; ++i) w[i] = A[i][d] / A[i][i];
    return w;
}

struct DebiasOutcome {
    double gap_mean = 0.0;        // pairwise (curriculum on) - pointwise LS
    double rho_on_mean = 0.0;     // curriculum on
    double rho_off_mean = 0.0;    // curriculum off
    int trend_monotone = 0;       // seeds with non-decreasing decision trend
    double seconds = 0.0;
};

DebiasOutcome run_debias_experiment() {
    const auto t0 = clk::now();
    DebiasOutcome out;
    for (std::uint64_t seed = 101; seed <= 105; ++seed) {
        SynthConfig sc;
        sc.n_papers = 2000;
        sc.n_domains = 10;
        sc.domain_bias_range = 0.2;
        sc.year_drift = 0.1;
        sc.seed = seed;
        SynthDataset data = generate(sc);

        RtsConfig rc;
        for (auto& p : data.papers) p.rts = rts_of(p, sc.scale, rc);

        ClusterConfig cc;
        cc.max_distance = 0.45;
        assign_groups(data.papers, cc);

        PairConfig pc;
        pc.seed = seed;
        std::vector<PairSample> pairs = build_pairs(data.papers, pc);
        if (pairs.size() > 16000) {
            BucketRatios uniform;
            for (double& r : uniform.ratios) r = 1.0 / 9.0;
            pairs = sample_pairs(pairs, uniform, 16000, Rng(seed).fork(3).next_u64());
        }

        TrainConfig tc;
        tc.lr = 0.3;
        tc.epochs = 1;
        tc.batch_size = 32;
        tc.seed = seed;
        tc.curriculum = true;
        const ScorerModel m0 =
            init_model(ScorerKind::linear, static_cast<int>(data.papers[0].features.size()),
                       Rng(seed).fork(7).next_u64(), 0.01);
        const auto feats = feature_map(data.papers);
        const TrainResult on = train(m0, pairs, feats, tc);
        tc.curriculum = false;
        const TrainResult off = train(m0, pairs, feats, tc);
        const auto preds_on = predict_all(on.model, data.papers);
        const auto preds_off = predict_all(off.model, data.papers);

        // pointwise least squares on the raw mean normalized score
        std::vector<std::vector<double>> X;
        std::vector<double> y;
        for (const auto& p : data.papers) {
            X.push_back(p.features);
            double s = 0.0;
            for (double v : p.raw_scores) s += normalize_score(v, sc.scale);
            y.push_back(s / static_cast<double>(p.raw_scores.size()));
        }
        const std::vector<double> w = ls_fit(X, y);
        std::map<std::string, double> preds_ls;
        for (std::size_t i = 0; i < data.papers.size(); ++i) {
            double s = w.back();
            for (std::size_t j = 0; j < X[i].size(); ++j) s += w[j] * X[i][j];
            preds_ls[data.papers[i].id] = s;
        }

        auto rho = [&](const std::map<std::string, double>& pred) {
            std::vector<double> a, b;
            for (const auto& p : data.papers) {
                a.push_back(pred.at(p.id));
                b.push_back(*p.latent_quality);
            }
            return spearman(a, b);
        };
        out.rho_on_mean += rho(preds_on) / 5.0;
        out.rho_off_mean += rho(preds_off) / 5.0;
        out.gap_mean += (rho(preds_on) - rho(preds_ls)) / 5.0;

        std::map<std::string, Decision> decisions;
        for (const auto& p : data.papers) decisions[p.id] = p.decision;
        const auto trend = decision_trend(preds_on, decisions);
        bool mono = true;
        for (std::size_t i = 1; i < trend.size(); ++i)
            if (trend[i].second < trend[i - 1].second) mono = false;
        if (mono) ++out.trend_monotone;
    }
    out.seconds = elapsed(t0);
    return out;
}

// ---- criterion 4: RTS vs plain mean ------------------------------------------

void criterion_rts_vs_mean() {
    int wins = 0;
    double worst_margin = 1.0;
    for (std::uint64_t seed = 101; seed <= 105; ++seed) {
        SynthConfig sc;
        sc.n_papers = 2000;
        sc.domain_bias_range = 0.0;
        sc.year_drift = 0.0;
        sc.seed = seed;
        const SynthDataset data = generate(sc);
        RtsConfig rc;
        std::vector<double> rts_v, mean_v, latent;
        for (const auto& p : data.papers) {
            rts_v.push_back(rts_of(p, sc.scale, rc));
            double s = 0.0;
            for (double v : p.raw_scores) s += normalize_score(v, sc.scale);
            mean_v.push_back(s / static_cast<double>(p.raw_scores.size()));
            latent.push_back(*p.latent_quality);
        }
        const double margin = spearman(rts_v, latent) - spearman(mean_v, latent);
        worst_margin = std::min(worst_margin, margin);
        if (margin > 0.0) ++wins;
    }
    report(4, "rts vs plain mean", wins >= 4,
           fmt("rts beats mean in %d/5 seeds, worst margin %+.4f (need >= 4/5)", wins,
               worst_margin));
}

// ---- criterion 5: sampler fidelity -------------------------------------------

void criterion_sampler_fidelity() {
    std::vector<PaperRecord> papers;
    Rng rng(31);
    for (int i = 0; i < 400; ++i) {
        PaperRecord p;
        p.id = "q" + std::to_string(i);
        p.year = 2025;
        p.cluster_id = 0;
        p.rts = rng.uniform();
        papers.push_back(p);
    }
    PairConfig pc;
    pc.min_gap = 0.0;
    const auto pool = build_pairs(papers, pc);
    const BucketRatios target = bucket_preset("easiest");
    const auto sampled = sample_pairs(pool, target, 10000, 17);
    std::array<double, 9> hist{};
    for (const auto& p : sampled) hist[p.bucket] += 1.0 / 10000.0;
    double l1 = 0.0;
    for (int k = 0; k < 9; ++k) l1 += std::abs(hist[k] - target.ratios[k]);
    report(5, "curriculum sampler fidelity", l1 <= 0.02,
           fmt("L1(empirical, easiest) = %.4f over 10000 draws (need <= 0.02)", l1));
}

// ---- criterion 6: metric oracle equivalence -----------------------------------

void criterion_metric_oracles() {
    Rng rng(12);
    double worst = 0.0;
    auto key = [](int i) { return "m" + std::to_string(i); };
    for (int trial = 0; trial < 100; ++trial) {
        std::map<std::string, double> scores, truth;
        std::map<std::string, bool> labels;
        std::vector<double> xs, ys;
        for (int i = 0; i < 200; ++i) {
            const double s = std::round(rng.uniform() * 40.0) / 40.0;  // force ties
            const double t = std::round(rng.uniform() * 40.0) / 40.0;
            scores[key(i)] = s;
            truth[key(i)] = t;
            labels[key(i)] = rng.uniform() < 0.4;
            xs.push_back(s);
            ys.push_back(t);
        }
        labels[key(0)] = true;
        labels[key(1)] = false;
        truth[key(0)] = 0.0;
        truth[key(1)] = 1.0;
        worst = std::max(worst, std::abs(auc(scores, labels, TiePolicy::strict) -
                                         oracle::auc_brute(scores, labels, false)));
        worst = std::max(worst, std::abs(auc(scores, labels, TiePolicy::half) -
                                         oracle::auc_brute(scores, labels, true)));
        worst = std::max(worst,
                         std::abs(pair_acc(scores, truth) - oracle::pair_acc_brute(scores, truth)));
        worst = std::max(worst, std::abs(spearman(xs, ys) - oracle::spearman_brute(xs, ys)));
    }
    double worst_ndcg = 0.0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng.below(5));
        std::map<std::string, double> pred, rel;
        for (int i = 0; i < n; ++i) {
            pred[key(i)] = std::round(rng.uniform() * 8.0) / 8.0;
            rel[key(i)] = std::round(rng.uniform() * 8.0) / 8.0;
        }
        rel[key(0)] = 1.0;
        const int k = 1 + static_cast<int>(rng.below(n + 1));
        worst_ndcg = std::max(worst_ndcg, std::abs(ndcg_at_k(pred, rel, k) -
                                                   oracle::ndcg_exhaustive(pred, rel, k)));
    }
    report(6, "metric oracle equivalence", worst <= 1e-12 && worst_ndcg <= 1e-12,
           fmt("max |fast - brute| = %.3g (100 x n=200), ndcg = %.3g (60 x n<=6); need <= 1e-12",
               worst, worst_ndcg));
}

// ---- criterion 7: random scorer sanity -----------------------------------------

void criterion_random_scorer() {
    Rng rng(99);
    std::map<std::string, double> scores;
    std::map<std::string, bool> labels;
    for (int i = 0; i < 10000; ++i) {
        scores["r" + std::to_string(i)] = rng.uniform();
        labels["r" + std::to_string(i)] = i % 2 == 0;
    }
    const double a = auc(scores, labels, TiePolicy::strict);
    report(7, "random-scorer sanity", a >= 0.48 && a <= 0.52,
           fmt("auc = %.4f on 10000 balanced random scores (need in [0.48, 0.52])", a));
}

// ---- criterion 8: linear-time inference ----------------------------------------

void criterion_linear_inference() {
    SynthConfig small_cfg, big_cfg;
    small_cfg.n_papers = 1000;
    big_cfg.n_papers = 10000;
    big_cfg.seed = 43;
    const SynthDataset small = generate(small_cfg);
    const SynthDataset big = generate(big_cfg);
    const ScorerModel model = init_model(
        ScorerKind::mlp1, static_cast<int>(small.papers[0].features.size()), 5, 0.01);

    auto best_time = [&](const std::vector<PaperRecord>& papers, int reps) {
        double best = 1e9;
        for (int r = 0; r < reps; ++r) {
            const auto t0 = clk::now();
            volatile double sink = predict_all(model, papers).begin()->second;
            (void)sink;
            best = std::min(best, elapsed(t0));
        }
        return best;
    };
    const double t_small = best_time(small.papers, 10);
    const double t_big = best_time(big.papers, 3);
    const double ratio = t_big / t_small;
    report(8, "linear-time inference", ratio <= 15.0,
           fmt("predict_all wall-time ratio 10^4/10^3 = %.2f (need <= 15)", ratio));
}

// ---- criterion 10: exact bias-gradient cancellation -----------------------------

void criterion_bias_cancellation() {
    SynthConfig sc;
    sc.n_papers = 300;
    const SynthDataset data = generate(sc);
    std::vector<PaperRecord> papers = data.papers;
    RtsConfig rc;
    for (auto& p : papers) p.rts = rts_of(p, sc.scale, rc);
    ClusterConfig cc;
    cc.max_distance = 0.45;
    assign_groups(papers, cc);
    PairConfig pc;
    std::vector<PairSample> pairs = build_pairs(papers, pc);
    if (pairs.size() > 2000) pairs.resize(2000);

    double worst = 0.0;
    for (LossKind kind : {LossKind::bce, LossKind::probit, LossKind::brier, LossKind::hinge,
                          LossKind::huber, LossKind::rtr}) {
        TrainConfig tc;
        tc.loss = kind;
        tc.lr = 0.1;
        tc.epochs = 2;
        const ScorerModel m0 = init_model(
            ScorerKind::linear, static_cast<int>(papers[0].features.size()), 3, 0.01);
        const TrainResult res = train(m0, pairs, feature_map(papers), tc);
        worst = std::max(worst, res.max_abs_output_bias_grad);
    }
    report(10, "bias-gradient cancellation", worst == 0.0,
           fmt("max |dL/db| across all losses and steps = %.17g (need exactly 0)", worst));
}

}  // namespace

int main() {
    criterion_rts_oracle();
    criterion_loss_gradients();

    const DebiasOutcome debias = run_debias_experiment();
    report(3, "debias experiment", debias.gap_mean >= 0.05 && debias.seconds < 120.0,
           fmt("pairwise-vs-pointwise spearman gap = %+.4f over 5 seeds in %.1fs "
               "(need >= 0.05, < 120s)",
               debias.gap_mean, debias.seconds));
    criterion_rts_vs_mean();
    criterion_sampler_fidelity();
    criterion_metric_oracles();
    criterion_random_scorer();
    criterion_linear_inference();
    report(9, "decision-trend monotonicity", debias.trend_monotone >= 4,
           fmt("category means non-decreasing in %d/5 seeds (need >= 4/5)",
               debias.trend_monotone));
    criterion_bias_cancellation();
    report(11, "curriculum ablation", debias.rho_on_mean >= debias.rho_off_mean,
           fmt("mean spearman: curriculum on %.4f vs off %.4f (need on >= off)",
               debias.rho_on_mean, debias.rho_off_mean));

    if (failures == 0) {
        std::printf("acceptance: all 11 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", failures);
    return 1;
}
