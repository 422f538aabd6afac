#include "avdb/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "avdb/csv.hpp"
#include "avdb/error.hpp"
#include "avdb/metrics.hpp"
#include "avdb/model_io.hpp"

namespace fs = std::filesystem;

namespace avdb::cli {

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitConfig = 4;
constexpr int kExitContainer = 5;

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::KTooLarge:
            return kExitConfig;
        case ErrorCode::BadModelFile:
        case ErrorCode::DimMismatch:
        case ErrorCode::SizeMismatch:
            return kExitContainer;
        default:
            return kExitData;  // dataset, image and io errors
    }
}

long parse_long(const std::string& key, const std::string& v) {
    char* end = nullptr;
    long x = std::strtol(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        raise(ErrorCode::ConfigError, "bad integer for " + key + ": '" + v + "'");
    return x;
}

double parse_real(const std::string& key, const std::string& v) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        raise(ErrorCode::ConfigError, "bad number for " + key + ": '" + v + "'");
    return x;
}

std::vector<int> parse_channels(const std::string& v) {
    std::vector<int> out;
    std::string cur;
    for (char c : v + "x") {
        if (c == 'x' || c == ',') {
            if (cur.empty()) raise(ErrorCode::ConfigError, "bad conv_channels: " + v);
            out.push_back(static_cast<int>(parse_long("conv_channels", cur)));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (out.size() < 2 || out.size() > 4)
        raise(ErrorCode::ConfigError, "conv_channels needs 2 to 4 entries");
    for (int ch : out)
        if (ch < 1) raise(ErrorCode::ConfigError, "conv_channels must be positive");
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value) {
    const std::string& cls = cfg.classifier;
    if (key == "image_size") {
        long v = parse_long(key, value);
        if (v < 8 || v > 4096) raise(ErrorCode::ConfigError, "image_size out of range");
        cfg.image_size = static_cast<int>(v);
    } else if (key == "feature_mode") {
        if (value == "raw")
            cfg.feature_mode = FeatureMode::RawPixels;
        else if (value == "hog")
            cfg.feature_mode = FeatureMode::Hog;
        else
            raise(ErrorCode::ConfigError, "feature_mode must be raw or hog");
        if (cls == "cnn" && cfg.feature_mode != FeatureMode::RawPixels)
            raise(ErrorCode::ConfigError, "cnn consumes raw pixels, not hog features");
    } else if (key == "train_fraction") {
        double v = parse_real(key, value);
        if (!(v > 0.0 && v < 1.0))
            raise(ErrorCode::ConfigError, "train_fraction must be in (0, 1)");
        cfg.train_fraction = v;
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_long(key, value));
    } else if (key == "k" && cls == "knn") {
        long v = parse_long(key, value);
        if (v < 1) raise(ErrorCode::ConfigError, "k must be >= 1");
        cfg.knn_k = static_cast<std::uint32_t>(v);
    } else if (key == "lambda" && cls == "svm") {
        double v = parse_real(key, value);
        if (!(v > 0.0)) raise(ErrorCode::ConfigError, "lambda must be positive");
        cfg.svm.lambda = v;
    } else if (key == "lr0" && cls == "svm") {
        double v = parse_real(key, value);
        if (!(v > 0.0)) raise(ErrorCode::ConfigError, "lr0 must be positive");
        cfg.svm.lr0 = v;
    } else if (key == "epochs" && cls == "svm") {
        long v = parse_long(key, value);
        if (v < 1) raise(ErrorCode::ConfigError, "epochs must be >= 1");
        cfg.svm.epochs = static_cast<std::uint32_t>(v);
    } else if (key == "epochs" && cls == "cnn") {
        long v = parse_long(key, value);
        if (v < 1) raise(ErrorCode::ConfigError, "epochs must be >= 1");
        cfg.cnn.epochs = static_cast<std::uint32_t>(v);
    } else if (key == "batch" && cls == "cnn") {
        long v = parse_long(key, value);
        if (v < 1) raise(ErrorCode::ConfigError, "batch must be >= 1");
        cfg.cnn.batch = static_cast<std::uint32_t>(v);
    } else if (key == "lr" && cls == "cnn") {
        double v = parse_real(key, value);
        if (!(v > 0.0)) raise(ErrorCode::ConfigError, "lr must be positive");
        cfg.cnn.lr = v;
    } else if (key == "momentum" && cls == "cnn") {
        double v = parse_real(key, value);
        if (v < 0.0 || v >= 1.0) raise(ErrorCode::ConfigError, "momentum must be in [0, 1)");
        cfg.cnn.momentum = v;
    } else if (key == "conv_channels" && cls == "cnn") {
        cfg.cnn.conv_channels = parse_channels(value);
    } else if (key == "fc_hidden" && cls == "cnn") {
        long v = parse_long(key, value);
        if (v < 1) raise(ErrorCode::ConfigError, "fc_hidden must be >= 1");
        cfg.cnn.fc_hidden = static_cast<int>(v);
    } else {
        raise(ErrorCode::ConfigError,
              "unknown config key '" + key + "' for model " + cls);
    }
}

void apply_line(RunConfig& cfg, const std::string& raw_line) {
    std::string line = raw_line;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) return;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
        raise(ErrorCode::ConfigError, "expected key = value, got '" + line + "'");
    apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

}  // namespace

RunConfig parse_run_config(const std::string& classifier,
                           const std::vector<std::string>& sources) {
    if (classifier != "knn" && classifier != "svm" && classifier != "cnn")
        raise(ErrorCode::ConfigError, "model must be knn, svm or cnn");
    RunConfig cfg;
    cfg.classifier = classifier;
    cfg.feature_mode = classifier == "cnn" ? FeatureMode::RawPixels : FeatureMode::Hog;

    for (const std::string& src : sources) {
        if (src.find('=') != std::string::npos) {
            apply_line(cfg, src);
            continue;
        }
        std::ifstream in(src);
        if (!in) raise(ErrorCode::ConfigError, "cannot open config file " + src);
        std::string line;
        while (std::getline(in, line)) apply_line(cfg, line);
    }
    if (cfg.classifier == "cnn") cfg.feature_mode = FeatureMode::RawPixels;
    return cfg;
}

namespace {

using Clock = std::chrono::steady_clock;

void append_csv_row(const fs::path& csv, const std::vector<std::string>& fields) {
    std::error_code ec;
    bool need_header = !fs::exists(csv, ec) || fs::file_size(csv, ec) == 0;
    std::ofstream out(csv, std::ios::app | std::ios::binary);
    if (!out) raise(ErrorCode::IoError, "cannot write csv " + csv.string());
    if (need_header) out << kCsvHeader << '\n';
    out << csv_join(fields) << '\n';
    if (!out) raise(ErrorCode::IoError, "short write to " + csv.string());
}

std::map<std::string, std::string> model_params(const RunConfig& cfg) {
    std::map<std::string, std::string> p;
    if (cfg.classifier == "knn") {
        p["k"] = std::to_string(cfg.knn_k);
    } else if (cfg.classifier == "svm") {
        p["lambda"] = format_double(cfg.svm.lambda);
        p["epochs"] = std::to_string(cfg.svm.epochs);
        p["lr0"] = format_double(cfg.svm.lr0);
    } else {
        std::string chans;
        for (std::size_t i = 0; i < cfg.cnn.conv_channels.size(); ++i)
            chans += (i ? "x" : "") + std::to_string(cfg.cnn.conv_channels[i]);
        p["depth"] = std::to_string(cfg.cnn.conv_channels.size());
        p["epochs"] = std::to_string(cfg.cnn.epochs);
        p["batch"] = std::to_string(cfg.cnn.batch);
        p["lr"] = format_double(cfg.cnn.lr);
        p["momentum"] = format_double(cfg.cnn.momentum);
        p["channels"] = chans;
        p["fc_hidden"] = std::to_string(cfg.cnn.fc_hidden);
    }
    return p;
}

int cmd_gen(const std::string& out_dir, long count, int size, std::uint64_t seed) {
    if (count < 1) {
        std::cerr << "gen: --count must be >= 1\n";
        return kExitUsage;
    }
    if (size < 32) {
        std::cerr << "gen: --size must be >= 32\n";
        return kExitUsage;
    }
    try {
        std::size_t n =
            write_synthetic(out_dir, static_cast<std::uint32_t>(count), size, seed);
        std::cout << "wrote " << n << " images and manifest.csv to " << out_dir << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "gen: " << e.what() << "\n";
        return kExitUsage;
    }
}

int cmd_train(const std::string& model, const std::string& data_dir,
              const std::vector<std::string>& config_sources, const std::string& out) {
    RunConfig cfg;
    try {
        cfg = parse_run_config(model, config_sources);
    } catch (const Error& e) {
        std::cerr << "train: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        Dataset full = load_directory(data_dir, cfg.image_size, cfg.feature_mode);
        auto [train, test] = split_train_test(full, {cfg.train_fraction, cfg.seed});
        std::cout << "loaded " << full.size() << " samples (" << train.size()
                  << " train / " << test.size() << " test), feature_dim "
                  << full.feature_dim << "\n";

        ModelContainer container;
        container.info.kind = cfg.classifier;
        container.info.image_size = cfg.image_size;
        container.info.feature_mode = cfg.feature_mode;
        container.info.train_fraction = cfg.train_fraction;
        container.info.seed = cfg.seed;
        container.info.params = model_params(cfg);

        if (cfg.classifier == "knn") {
            KnnModel m = knn_fit(train, cfg.knn_k);
            std::cout << "stored " << m.train.size() << " training samples, k=" << m.k
                      << "\n";
            container.model = std::move(m);
        } else if (cfg.classifier == "svm") {
            SvmTrainConfig sc = cfg.svm;
            sc.seed = cfg.seed;
            SvmModel m = svm_train(train, sc);
            std::cout << "svm objective " << svm_objective(m, train, sc.lambda)
                      << " after " << sc.epochs << " epochs\n";
            container.model = std::move(m);
        } else {
            CnnTrainConfig cc = cfg.cnn;
            cc.seed = cfg.seed;
            auto [m, log] = cnn_train(train, cc);
            for (std::size_t e = 0; e < log.size(); ++e) {
                char buf[96];
                std::snprintf(buf, sizeof buf, "epoch %zu loss=%.6f acc=%.4f", e + 1,
                              log[e].mean_loss, log[e].accuracy);
                std::cout << buf << "\n";
            }
            if (log.size() < cc.epochs)
                std::cout << "stopped early after " << log.size() << " epochs\n";
            container.model = std::move(m);
        }
        save_model(out, container);
        std::cout << "saved model to " << out << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "train: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_eval(const std::string& model_file, const std::string& data_dir,
             const std::string& csv, int size_override) {
    try {
        ModelContainer c = load_model(model_file);
        int size = size_override > 0 ? size_override : c.info.image_size;
        Dataset full = load_directory(data_dir, size, c.info.feature_mode);

        std::size_t model_dim = 0;
        if (const auto* knn = std::get_if<KnnModel>(&c.model)) model_dim = knn->feature_dim;
        if (const auto* svm = std::get_if<SvmModel>(&c.model)) model_dim = svm->dim();
        if (const auto* cnn = std::get_if<CnnModel>(&c.model))
            model_dim = static_cast<std::size_t>(cnn->input_size) * cnn->input_size;
        if (full.feature_dim != model_dim)
            raise(ErrorCode::DimMismatch,
                  "dataset feature dim " + std::to_string(full.feature_dim) +
                      " != model dim " + std::to_string(model_dim));

        auto [train, test] =
            split_train_test(full, {c.info.train_fraction, c.info.seed});

        std::vector<Label> preds, truth;
        std::vector<std::string> ids;
        auto t0 = Clock::now();
        for (const auto& s : test.samples) {
            preds.push_back(predict_any(c, s.features));
            truth.push_back(s.label);
            ids.push_back(s.id);
        }
        auto wall_ms = static_cast<std::uint64_t>(
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0)
                .count());

        ConfusionMatrix cm = confusion(preds, truth);
        MetricReport rep = report(cm);
        rep.misclassified_ids = misclassified_ids(ids, preds, truth);

        std::cout << "evaluated " << test.size() << " test samples (seed "
                  << c.info.seed << ", fraction "
                  << format_double(c.info.train_fraction) << ")\n";
        std::cout << "tp=" << cm.tp << " tn=" << cm.tn << " fp=" << cm.fp
                  << " fn=" << cm.fn << "\n";
        std::cout << "accuracy=" << format_metric(rep.accuracy)
                  << " sensitivity=" << format_metric(rep.sensitivity)
                  << " precision=" << format_metric(rep.precision) << "\n";
        std::cout << "misclassified:";
        if (rep.misclassified_ids.empty()) std::cout << " none";
        for (const auto& id : rep.misclassified_ids) std::cout << " " << id;
        std::cout << "\n";

        if (!csv.empty()) {
            BenchRow row;
            row.classifier = c.info.kind;
            row.seed = c.info.seed;
            row.params = params_summary(c);
            row.cm = cm;
            row.rep = rep;
            row.wall_time_ms = wall_ms;
            append_csv_row(csv, bench_row_fields(row));
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_bench(const std::string& data_dir, long nseeds, const std::string& csv,
              int image_size, double fraction) {
    if (nseeds < 1) {
        std::cerr << "bench: --seeds must be >= 1\n";
        return kExitUsage;
    }
    try {
        BenchData data = load_bench_data(data_dir, image_size);
        BenchConfig cfg;
        cfg.train_fraction = fraction;
        std::vector<std::uint64_t> seeds;
        for (long s = 1; s <= nseeds; ++s) seeds.push_back(static_cast<std::uint64_t>(s));

        std::vector<BenchRow> rows = bench_all(data, seeds, cfg);
        for (const auto& row : rows) append_csv_row(csv, bench_row_fields(row));
        for (std::uint64_t seed : seeds) std::cout << ranking_line(rows, seed) << "\n";
        std::cout << "wrote " << rows.size() << " rows to " << csv << "\n";
        return 0;
    } catch (const Error& e) {
        std::cerr << "bench: " << e.what() << "\n";
        return exit_code_for(e);
    }
}

int cmd_gradcheck() {
    GradCheckResult r = reference_gradient_check();
    char buf[160];
    std::snprintf(buf, sizeof buf, "max relative error %.3e at %s (analytic %.6e, numeric %.6e)",
                  r.max_rel_err, r.worst_param.c_str(), r.analytic, r.numeric);
    std::cout << buf << "\n";
    if (r.max_rel_err < 1e-4) {
        std::cout << "gradcheck passed\n";
        return 0;
    }
    std::cerr << "gradcheck FAILED at " << r.worst_param << "\n";
    return kExitFailure;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"drone-vs-bird classification toolkit"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate a synthetic drone/bird corpus");
    std::string gen_out;
    long gen_count = 0;
    int gen_size = 64;
    std::uint64_t gen_seed = 42;
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--count", gen_count, "images per class")->required();
    gen->add_option("--size", gen_size, "image side in pixels (>= 32)");
    gen->add_option("--seed", gen_seed, "corpus seed");

    auto* train = app.add_subcommand("train", "train a classifier on a dataset");
    std::string train_model, train_data, train_out;
    std::vector<std::string> train_config;
    train->add_option("--model", train_model, "knn | svm | cnn")->required();
    train->add_option("--data", train_data, "dataset root with drone/ and bird/")
        ->required();
    train->add_option("--config", train_config,
                      "config file, or inline key=value (repeatable)");
    train->add_option("--out", train_out, "model file to write")->required();

    auto* eval = app.add_subcommand("eval", "evaluate a trained model");
    std::string eval_model, eval_data, eval_csv;
    int eval_size = 0;
    eval->add_option("--model-file", eval_model, "model container file")->required();
    eval->add_option("--data", eval_data, "dataset root")->required();
    eval->add_option("--csv", eval_csv, "append one metrics row to this csv");
    eval->add_option("--size", eval_size, "override working resolution");

    auto* bench = app.add_subcommand("bench", "run the classifier comparison benchmark");
    std::string bench_data, bench_csv;
    long bench_seeds = 5;
    int bench_size = 64;
    double bench_fraction = 0.8;
    bench->add_option("--data", bench_data, "dataset root")->required();
    bench->add_option("--seeds", bench_seeds, "number of split/train seeds (1..N)");
    bench->add_option("--csv", bench_csv, "csv output path")->required();
    bench->add_option("--size", bench_size, "working resolution");
    bench->add_option("--fraction", bench_fraction, "train fraction");

    auto* gradcheck = app.add_subcommand(
        "gradcheck", "finite-difference check of the cnn gradients");

    std::vector<const char*> argv;
    argv.push_back("avdb");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (gen->parsed()) return cmd_gen(gen_out, gen_count, gen_size, gen_seed);
    if (train->parsed()) return cmd_train(train_model, train_data, train_config, train_out);
    if (eval->parsed()) return cmd_eval(eval_model, eval_data, eval_csv, eval_size);
    if (bench->parsed())
        return cmd_bench(bench_data, bench_seeds, bench_csv, bench_size, bench_fraction);
    if (gradcheck->parsed()) return cmd_gradcheck();
    return kExitUsage;
}

}  // namespace avdb::cli
