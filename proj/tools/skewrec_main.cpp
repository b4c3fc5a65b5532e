// skewrec: prepare implicit-feedback data, train pairwise ranking embeddings,
// evaluate top-N recommendation, sweep hyperparameters, and export estimator
// distribution analyses.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "skewrec/corpus.hpp"
#include "skewrec/embed.hpp"
#include "skewrec/io_util.hpp"
#include "skewrec/metrics.hpp"
#include "skewrec/sampler.hpp"
#include "skewrec/skewopt.hpp"
#include "skewrec/skewstats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace skewrec;

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_compact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

char parse_delimiter(const std::string& s) {
    if (s == "tab" || s == "\\t") return '\t';
    if (s == "space") return ' ';
    if (s == "comma") return ',';
    if (s.size() == 1) return s[0];
    throw std::runtime_error("unrecognized delimiter: " + s);
}

json config_to_json(const SkewOptConfig& c) {
    return json{{"xi", c.xi},         {"omega", c.omega},   {"eta", c.eta},
                {"beta", c.beta},     {"lambda", c.lambda}, {"epochs", c.epochs},
                {"seed", c.seed},     {"threads", c.threads}, {"clip", c.clip}};
}

void write_manifest(const fs::path& dir, json j, double duration_seconds) {
    j["duration_seconds"] = duration_seconds;
    atomic_write_file((dir / "manifest.json").string(),
                      [&](std::ostream& os) { os << j.dump(2) << "\n"; });
}

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

  private:
    std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

std::vector<std::string> load_key_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open ID map file: " + path.string());
    std::vector<std::string> keys;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos)
            throw std::runtime_error("bad ID map line in " + path.string());
        keys.push_back(line.substr(tab + 1));
    }
    return keys;
}

// Accepts either a prep output directory or a bare interactions file.
// With a directory (or sibling map files), the full prep-time ID space is
// used so items that only occur in the held-out test split still get rows.
Interactions load_train_interactions(const std::string& train_arg, const TsvSchema& schema) {
    fs::path train_file(train_arg);
    fs::path map_dir;
    if (fs::is_directory(train_file)) {
        map_dir = train_file;
        train_file /= "train.tsv";
    } else {
        map_dir = train_file.parent_path();
    }
    const auto raw = load_tsv(train_file.string(), schema);
    const auto pairs = binarize(raw, BinarizeMode::binary, 0.0);
    const fs::path user_map = map_dir / "user_map.tsv";
    const fs::path item_map = map_dir / "item_map.tsv";
    if (fs::exists(user_map) && fs::exists(item_map)) {
        std::cerr << "using ID maps from " << map_dir.string() << "\n";
        return build_with_maps(pairs, load_key_file(user_map), load_key_file(item_map));
    }
    std::cerr << "no ID maps next to " << train_file.string()
              << "; assigning IDs from the training file\n";
    return build_interactions(pairs);
}

Interactions load_with_model_maps(const fs::path& file, const EmbeddingModel& model,
                                  const TsvSchema& schema) {
    const auto raw = load_tsv(file.string(), schema);
    const auto pairs = binarize(raw, BinarizeMode::binary, 0.0);
    return build_with_maps(pairs, model.user_keys, model.item_keys);
}

void write_interactions_tsv(const fs::path& path, const Interactions& data) {
    atomic_write_file(path.string(), [&](std::ostream& os) {
        for (std::uint32_t u = 0; u < data.n_users; ++u) {
            for (std::uint32_t i : data.pos[u])
                os << data.user_keys[u] << "\t" << data.item_keys[i] << "\t1\n";
        }
    });
}

void write_key_file(const fs::path& path, const std::vector<std::string>& keys) {
    atomic_write_file(path.string(), [&](std::ostream& os) {
        for (std::size_t id = 0; id < keys.size(); ++id) os << id << "\t" << keys[id] << "\n";
    });
}

struct ConfigFlags {
    std::string config_path;
    double xi = 0, omega = 0, beta = 0, lambda = 0, clip = 0;
    int eta = 0, threads = 0;
    std::int64_t epochs = 0;
    std::uint64_t seed = 0;

    CLI::Option *o_config = nullptr, *o_xi = nullptr, *o_omega = nullptr, *o_eta = nullptr,
                *o_beta = nullptr, *o_lambda = nullptr, *o_epochs = nullptr, *o_seed = nullptr,
                *o_threads = nullptr, *o_clip = nullptr;

    // The sweep grid owns --xi/--omega/--eta, so it skips them here.
    void add_to(CLI::App* cmd, bool with_shape = true) {
        o_config = cmd->add_option("--config", config_path, "config file with key = value lines");
        if (with_shape) {
            o_xi = cmd->add_option("--xi", xi, "location shift (>= 0)");
            o_omega = cmd->add_option("--omega", omega, "scale (> 0)");
            o_eta = cmd->add_option("--eta", eta, "positive odd exponent");
        }
        o_beta = cmd->add_option("--beta", beta, "learning rate");
        o_lambda = cmd->add_option("--lambda", lambda, "L2 regularization strength");
        o_epochs = cmd->add_option("--epochs", epochs, "training epochs");
        o_seed = cmd->add_option("--seed", seed, "RNG seed");
        o_threads = cmd->add_option("--threads", threads, "worker threads");
        o_clip = cmd->add_option("--clip", clip, "per-triple gradient cap");
    }

    // File first, explicit flags on top.
    SkewOptConfig resolve() const {
        SkewOptConfig cfg;
        if (o_config && o_config->count() > 0) cfg = load_config_file(config_path);
        if (o_xi && o_xi->count() > 0) cfg.xi = xi;
        if (o_omega && o_omega->count() > 0) cfg.omega = omega;
        if (o_eta && o_eta->count() > 0) cfg.eta = eta;
        if (o_beta && o_beta->count() > 0) cfg.beta = beta;
        if (o_lambda && o_lambda->count() > 0) cfg.lambda = lambda;
        if (o_epochs && o_epochs->count() > 0) cfg.epochs = epochs;
        if (o_seed && o_seed->count() > 0) cfg.seed = seed;
        if (o_threads && o_threads->count() > 0) cfg.threads = threads;
        if (o_clip && o_clip->count() > 0) cfg.clip = clip;
        cfg.validate();
        return cfg;
    }
};

void print_report(std::ostream& os, const EvalReport& rep) {
    os << "recall@" << rep.n << "\t" << fmt_double(rep.recall) << "\n";
    os << "map@" << rep.n << "\t" << fmt_double(rep.map) << "\n";
    os << "auc_macro\t" << fmt_double(rep.auc_macro) << "\n";
    os << "auc_micro\t" << fmt_double(rep.auc_micro) << "\n";
    os << "users_evaluated\t" << rep.users_evaluated << "\n";
    os << "auc_exact\t" << (rep.auc_exact ? 1 : 0) << "\n";
    os << "auc_negatives\t" << rep.auc_negatives << "\n";
}

json report_to_json(const EvalReport& rep) {
    return json{{"n", rep.n},
                {"recall", rep.recall},
                {"map", rep.map},
                {"auc_macro", rep.auc_macro},
                {"auc_micro", rep.auc_micro},
                {"users_evaluated", rep.users_evaluated},
                {"auc_exact", rep.auc_exact},
                {"auc_negatives", rep.auc_negatives}};
}

int run_prep(const std::string& in_path, const std::string& mode_s, double threshold,
             bool threshold_given, double test_fraction, std::uint64_t seed,
             const std::string& delim_s, bool has_header, const std::string& out_dir) {
    Stopwatch timer;
    BinarizeMode mode;
    if (mode_s == "rating") mode = BinarizeMode::rating;
    else if (mode_s == "count") mode = BinarizeMode::count;
    else if (mode_s == "binary") mode = BinarizeMode::binary;
    else throw std::runtime_error("mode must be rating, count, or binary");
    if (!threshold_given) threshold = mode == BinarizeMode::count ? 3.0 : 3.5;

    TsvSchema schema{parse_delimiter(delim_s), has_header};
    const auto raw = load_tsv(in_path, schema);
    const auto pairs = binarize(raw, mode, threshold);
    if (pairs.empty())
        throw std::runtime_error("binarization kept no interactions (threshold too strict?)");
    const auto data = build_interactions(pairs);
    const auto sp = split(data, test_fraction, seed);

    const fs::path out(out_dir);
    fs::create_directories(out);
    write_interactions_tsv(out / "train.tsv", sp.train);
    write_interactions_tsv(out / "test.tsv", sp.test);
    write_key_file(out / "user_map.tsv", data.user_keys);
    write_key_file(out / "item_map.tsv", data.item_keys);

    std::cerr << "prep: " << raw.size() << " rows -> " << data.pair_count() << " positives, "
              << data.n_users << " users x " << data.n_items << " items; train "
              << sp.train.pair_count() << " / test " << sp.test.pair_count() << "\n";

    json manifest{{"command", "prep"},
                  {"input", in_path},
                  {"mode", mode_s},
                  {"threshold", threshold},
                  {"test_fraction", test_fraction},
                  {"seed", seed},
                  {"delimiter", delim_s},
                  {"has_header", has_header},
                  {"n_users", data.n_users},
                  {"n_items", data.n_items},
                  {"outputs", json::array({"train.tsv", "test.tsv", "user_map.tsv",
                                           "item_map.tsv"})}};
    write_manifest(out, manifest, timer.seconds());
    return 0;
}

int run_train(const std::string& train_arg, const ConfigFlags& flags,
              std::uint32_t d, const std::string& delim_s, const std::string& out_model) {
    Stopwatch timer;
    const SkewOptConfig cfg = flags.resolve();
    TsvSchema schema{parse_delimiter(delim_s), false};
    const Interactions train_data = load_train_interactions(train_arg, schema);

    std::cerr << "train: " << train_data.pair_count() << " positives, " << train_data.n_users
              << " users x " << train_data.n_items << " items, d=" << d << ", epochs="
              << cfg.epochs << ", threads=" << cfg.threads << "\n";
    const EmbeddingModel model =
        train(train_data, cfg, d, [](std::int64_t epoch, double obj) {
            std::cerr << "epoch\t" << epoch << "\tobjective\t" << fmt_double(obj) << "\n";
        });
    save_model(model, out_model);

    json manifest{{"command", "train"}, {"train", train_arg},   {"d", d},
                  {"delimiter", delim_s}, {"config", config_to_json(cfg)},
                  {"seed", cfg.seed},   {"output", out_model}};
    const fs::path model_path(out_model);
    atomic_write_file((model_path.string() + ".manifest.json"), [&](std::ostream& os) {
        manifest["duration_seconds"] = timer.seconds();
        os << manifest.dump(2) << "\n";
    });
    std::cerr << "train: wrote " << out_model << "\n";
    return 0;
}

int run_eval(const std::string& model_path, const std::string& split_dir, int n,
             std::uint64_t seed, const std::string& delim_s, const std::string& out_dir) {
    Stopwatch timer;
    const EmbeddingModel model = load_model(model_path);
    TsvSchema schema{parse_delimiter(delim_s), false};
    const fs::path split(split_dir);
    const Interactions train_data = load_with_model_maps(split / "train.tsv", model, schema);
    const Interactions test_data = load_with_model_maps(split / "test.tsv", model, schema);

    EvalOptions opts;
    opts.n = n;
    opts.seed = seed;
    const EvalReport rep = evaluate(model, train_data, test_data, opts);

    std::ostringstream header;
    header << "# command\teval\n# model\t" << model_path << "\n# split\t" << split_dir
           << "\n# n\t" << n << "\n# seed\t" << seed << "\n";
    std::cout << header.str();
    print_report(std::cout, rep);

    if (!out_dir.empty()) {
        const fs::path out(out_dir);
        fs::create_directories(out);
        atomic_write_file((out / "eval.tsv").string(), [&](std::ostream& os) {
            os << header.str();
            print_report(os, rep);
        });
        json j = report_to_json(rep);
        j["command"] = "eval";
        j["model"] = model_path;
        j["split"] = split_dir;
        j["seed"] = seed;
        atomic_write_file((out / "eval.json").string(),
                          [&](std::ostream& os) { os << j.dump(2) << "\n"; });
        json manifest{{"command", "eval"}, {"model", model_path}, {"split", split_dir},
                      {"n", n},            {"seed", seed},
                      {"outputs", json::array({"eval.tsv", "eval.json"})}};
        write_manifest(out, manifest, timer.seconds());
    }
    return 0;
}

int run_sweep(const std::string& split_dir, const std::vector<double>& xis,
              const std::vector<double>& omegas, const std::vector<int>& etas,
              const ConfigFlags& flags, std::uint32_t d, int n,
              const std::string& delim_s, const std::string& out_dir) {
    Stopwatch timer;
    const SkewOptConfig base = flags.resolve();
    TsvSchema schema{parse_delimiter(delim_s), false};
    const fs::path split(split_dir);
    const Interactions train_data = load_train_interactions(split_dir, schema);
    const Interactions test_data =
        build_with_maps(binarize(load_tsv((split / "test.tsv").string(), schema),
                                 BinarizeMode::binary, 0.0),
                        train_data.user_keys, train_data.item_keys);

    std::vector<std::string> rows;
    for (double xi : xis) {
        for (double omega : omegas) {
            for (int eta : etas) {
                SkewOptConfig cfg = base;
                cfg.xi = xi;
                cfg.omega = omega;
                cfg.eta = eta;
                cfg.validate();
                const EmbeddingModel model = train(train_data, cfg, d);
                EvalOptions opts;
                opts.n = n;
                opts.seed = cfg.seed;
                const EvalReport rep = evaluate(model, train_data, test_data, opts);
                std::ostringstream row;
                row << fmt_compact(xi) << "\t" << fmt_compact(omega) << "\t" << eta << "\t"
                    << fmt_double(rep.recall) << "\t" << fmt_double(rep.map);
                rows.push_back(row.str());
                std::cerr << "sweep cell done: " << rows.back() << "\n";
            }
        }
    }

    const fs::path out(out_dir);
    fs::create_directories(out);
    atomic_write_file((out / "sweep.tsv").string(), [&](std::ostream& os) {
        os << "xi\tomega\teta\trecall\tmap\n";
        for (const auto& r : rows) os << r << "\n";
    });
    for (const auto& r : rows) std::cout << r << "\n";

    json manifest{{"command", "sweep"},
                  {"split", split_dir},
                  {"xi", xis},
                  {"omega", omegas},
                  {"eta", etas},
                  {"d", d},
                  {"n", n},
                  {"config", config_to_json(base)},
                  {"seed", base.seed},
                  {"outputs", json::array({"sweep.tsv"})}};
    write_manifest(out, manifest, timer.seconds());
    return 0;
}

int run_analyze(const std::string& model_path, const std::string& train_arg,
                std::int64_t n_triples, std::uint64_t seed,
                const std::vector<std::string>& curve_specs, const std::string& delim_s,
                const std::string& out_dir) {
    Stopwatch timer;
    const EmbeddingModel model = load_model(model_path);
    TsvSchema schema{parse_delimiter(delim_s), false};
    fs::path train_file(train_arg);
    if (fs::is_directory(train_file)) train_file /= "train.tsv";
    const Interactions train_data = load_with_model_maps(train_file, model, schema);

    const EstimatorSample sample = collect_estimator(model, train_data, n_triples, seed);
    const fs::path out(out_dir);
    fs::create_directories(out);
    atomic_write_file((out / "estimator_hist.tsv").string(), [&](std::ostream& os) {
        write_histogram(os, sample,
                        {{"model", model_path},
                         {"n_triples", std::to_string(n_triples)},
                         {"seed", std::to_string(seed)}});
    });
    std::cerr << "analyze: sample skewness " << fmt_double(sample.skewness) << "\n";

    json curves = json::array();
    for (const auto& spec : curve_specs) {
        SkewNormalParams p;
        if (std::sscanf(spec.c_str(), "%lf,%lf,%lf", &p.xi, &p.omega, &p.alpha) != 3)
            throw std::runtime_error("curve spec must be xi,omega,alpha — got: " + spec);
        std::ostringstream name;
        name << "curve_xi" << fmt_compact(p.xi) << "_omega" << fmt_compact(p.omega) << "_alpha"
             << fmt_compact(p.alpha) << ".tsv";
        atomic_write_file((out / name.str()).string(), [&](std::ostream& os) {
            write_pdf_curve(os, p, p.xi - 6.0 * p.omega, p.xi + 6.0 * p.omega, 481);
        });
        curves.push_back(name.str());
    }

    json manifest{{"command", "analyze"},  {"model", model_path}, {"train", train_arg},
                  {"n_triples", n_triples}, {"seed", seed},        {"curves", curves},
                  {"outputs", json::array({"estimator_hist.tsv"})}};
    write_manifest(out, manifest, timer.seconds());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pairwise ranking embeddings with a location/scale/exponent "
                 "generalized criterion, plus skew-normal distribution analysis"};
    app.require_subcommand(1);

    // prep
    auto* prep = app.add_subcommand("prep", "binarize interactions and write a train/test split");
    std::string prep_in, prep_mode = "rating", prep_delim = "tab", prep_out;
    double prep_threshold = 0.0, prep_fraction = 0.2;
    std::uint64_t prep_seed = 1;
    bool prep_header = false;
    prep->add_option("--in", prep_in, "interactions file")->required();
    prep->add_option("--mode", prep_mode, "rating | count | binary");
    prep->add_option("--threshold", prep_threshold,
                     "binarization threshold (default 3.5 rating, 3 count)");
    prep->add_option("--test-fraction", prep_fraction, "held-out fraction (0, 1)");
    prep->add_option("--seed", prep_seed, "split seed");
    prep->add_option("--delimiter", prep_delim, "tab | space | comma | single char");
    prep->add_flag("--has-header", prep_header, "skip the first line");
    prep->add_option("--out", prep_out, "output directory")->required();

    // train
    auto* train_cmd = app.add_subcommand("train", "train an embedding model");
    std::string train_in, train_delim = "tab", train_out = "model.bin";
    std::uint32_t train_d = 32;
    ConfigFlags train_flags;
    train_cmd->add_option("--train", train_in, "training file or prep directory")->required();
    train_flags.add_to(train_cmd);
    train_cmd->add_option("--d", train_d, "embedding dimension");
    train_cmd->add_option("--delimiter", train_delim, "input delimiter");
    train_cmd->add_option("--out", train_out, "output model file");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "evaluate a model on a split directory");
    std::string eval_model, eval_split, eval_delim = "tab", eval_out;
    int eval_n = 10;
    std::uint64_t eval_seed = 0;
    eval_cmd->add_option("--model", eval_model, "model file")->required();
    eval_cmd->add_option("--split", eval_split, "directory with train.tsv and test.tsv")
        ->required();
    eval_cmd->add_option("--n", eval_n, "cutoff for recall@N / mAP@N");
    eval_cmd->add_option("--seed", eval_seed, "seed for subsampled AUC");
    eval_cmd->add_option("--delimiter", eval_delim, "input delimiter");
    eval_cmd->add_option("--out", eval_out, "optional output directory");

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "train/evaluate a hyperparameter grid");
    std::string sweep_split, sweep_delim = "tab", sweep_out;
    std::vector<double> sweep_xi{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
    std::vector<double> sweep_omega{1, 2, 3};
    std::vector<int> sweep_eta{1, 3, 5};
    std::uint32_t sweep_d = 32;
    int sweep_n = 10;
    ConfigFlags sweep_flags;
    sweep_cmd->add_option("--split", sweep_split, "prep directory")->required();
    sweep_cmd->add_option("--xi", sweep_xi, "grid of xi values")->delimiter(',');
    sweep_cmd->add_option("--omega", sweep_omega, "grid of omega values")->delimiter(',');
    sweep_cmd->add_option("--eta", sweep_eta, "grid of eta values")->delimiter(',');
    sweep_flags.add_to(sweep_cmd, /*with_shape=*/false);
    sweep_cmd->add_option("--d", sweep_d, "embedding dimension");
    sweep_cmd->add_option("--n", sweep_n, "evaluation cutoff");
    sweep_cmd->add_option("--delimiter", sweep_delim, "input delimiter");
    sweep_cmd->add_option("--out", sweep_out, "output directory")->required();

    // analyze
    auto* an_cmd = app.add_subcommand("analyze", "export estimator histogram and density curves");
    std::string an_model, an_train, an_delim = "tab", an_out;
    std::int64_t an_triples = 100000;
    std::uint64_t an_seed = 1;
    std::vector<std::string> an_curves;
    an_cmd->add_option("--model", an_model, "model file")->required();
    an_cmd->add_option("--train", an_train, "training file or prep directory")->required();
    an_cmd->add_option("--n-triples", an_triples, "triples to sample");
    an_cmd->add_option("--seed", an_seed, "sampling seed");
    an_cmd->add_option("--curve", an_curves, "reference density xi,omega,alpha (repeatable)");
    an_cmd->add_option("--delimiter", an_delim, "input delimiter");
    an_cmd->add_option("--out", an_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (prep->parsed())
            return run_prep(prep_in, prep_mode, prep_threshold, prep->count("--threshold") > 0,
                            prep_fraction, prep_seed, prep_delim, prep_header, prep_out);
        if (train_cmd->parsed())
            return run_train(train_in, train_flags, train_d, train_delim, train_out);
        if (eval_cmd->parsed())
            return run_eval(eval_model, eval_split, eval_n, eval_seed, eval_delim, eval_out);
        if (sweep_cmd->parsed())
            return run_sweep(sweep_split, sweep_xi, sweep_omega, sweep_eta,
                             sweep_flags, sweep_d, sweep_n, sweep_delim, sweep_out);
        if (an_cmd->parsed())
            return run_analyze(an_model, an_train, an_triples, an_seed, an_curves, an_delim,
                               an_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
