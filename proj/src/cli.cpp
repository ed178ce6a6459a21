#include "mvksc/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>

#include "mvksc/metrics.hpp"

namespace mvksc {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// run records
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv1a_file(std::uint64_t h, const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open '" + path.string() + "'");
    char buf[4096];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ULL;
        }
    }
    return h;
}

json finite_or_string(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double number_or_inf(const json& j) {
    if (j.is_string()) return j.get<std::string>() == "-inf" ? -HUGE_VAL : HUGE_VAL;
    return j.get<double>();
}

}  // namespace

std::string dataset_fingerprint(const fs::path& manifest_path) {
    auto kv = load_key_values(manifest_path);
    fs::path base = manifest_path.parent_path();
    std::uint64_t h = 14695981039346656037ULL;
    h = fnv1a_file(h, manifest_path);
    for (int i = 0;; ++i) {
        auto it = kv.find("view." + std::to_string(i) + ".path");
        if (it == kv.end()) break;
        h = fnv1a_file(h, base / it->second);
    }
    if (auto it = kv.find("labels.path"); it != kv.end()) h = fnv1a_file(h, base / it->second);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void save_run_record(const RunRecord& r, const fs::path& path) {
    json cfg;
    cfg["lambda"] = r.config.lambda;
    cfg["gamma"] = r.config.gamma;
    cfg["theta"] = r.config.theta;
    cfg["k"] = r.config.k;
    json kernels = json::array();
    for (const KernelSpec& spec : r.config.kernel_per_view) kernels.push_back(spec.to_string());
    cfg["kernels"] = kernels;
    cfg["rho0"] = r.config.rho0;
    cfg["rho_mult"] = r.config.rho_mult;
    cfg["rho_cap"] = finite_or_string(r.config.rho_cap);
    cfg["max_iters"] = r.config.max_iters;
    cfg["tol"] = r.config.tol;
    cfg["mode"] = to_string(r.config.mode);
    cfg["enriched"] = r.config.enriched;
    cfg["seed"] = r.config.seed;
    cfg["normalize"] = to_string(r.normalize);

    json trace = json::array();
    for (const TraceRow& row : r.trace)
        trace.push_back({row.objective, row.residual_ca, row.residual_sum1});

    json result;
    result["iterations"] = r.iterations;
    result["converged"] = r.converged;
    result["residual_ca"] = r.residual_ca;
    result["residual_sum1"] = r.residual_sum1;
    if (r.acc) result["acc"] = *r.acc;
    if (r.nmi_score) result["nmi"] = *r.nmi_score;
    result["nmi_normalization"] = "geometric_mean";

    json doc;
    doc["config"] = cfg;
    doc["dataset"] = {{"manifest", r.manifest},
                      {"fingerprint", r.fingerprint},
                      {"views", r.views},
                      {"samples", r.samples}};
    doc["result"] = result;
    doc["trace"] = trace;
    doc["duration_ms"] = r.duration_ms;

    std::ofstream out(path);
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    out << doc.dump(2) << "\n";
}

RunRecord load_run_record(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw data_error("malformed run record '" + path.string() + "': " + e.what());
    }

    RunRecord r;
    try {
        const json& cfg = doc.at("config");
        r.config.lambda = cfg.at("lambda").get<double>();
        r.config.gamma = cfg.at("gamma").get<double>();
        r.config.theta = cfg.at("theta").get<double>();
        r.config.k = cfg.at("k").get<int>();
        for (const json& k : cfg.at("kernels"))
            r.config.kernel_per_view.push_back(parse_kernel_spec(k.get<std::string>()));
        r.config.rho0 = cfg.at("rho0").get<double>();
        r.config.rho_mult = cfg.at("rho_mult").get<double>();
        r.config.rho_cap = number_or_inf(cfg.at("rho_cap"));
        r.config.max_iters = cfg.at("max_iters").get<int>();
        r.config.tol = cfg.at("tol").get<double>();
        r.config.mode = parse_consensus_mode(cfg.at("mode").get<std::string>());
        r.config.enriched = cfg.at("enriched").get<bool>();
        r.config.seed = cfg.at("seed").get<std::uint64_t>();
        r.normalize = parse_normalize_mode(cfg.at("normalize").get<std::string>());

        r.manifest = doc.at("dataset").at("manifest").get<std::string>();
        r.fingerprint = doc.at("dataset").at("fingerprint").get<std::string>();
        r.views = doc.at("dataset").at("views").get<int>();
        r.samples = doc.at("dataset").at("samples").get<long>();

        const json& result = doc.at("result");
        r.iterations = result.at("iterations").get<int>();
        r.converged = result.at("converged").get<bool>();
        r.residual_ca = result.at("residual_ca").get<double>();
        r.residual_sum1 = result.at("residual_sum1").get<double>();
        if (result.contains("acc")) r.acc = result.at("acc").get<double>();
        if (result.contains("nmi")) r.nmi_score = result.at("nmi").get<double>();

        for (const json& row : doc.at("trace"))
            r.trace.push_back(
                {row.at(0).get<double>(), row.at(1).get<double>(), row.at(2).get<double>()});
        r.duration_ms = doc.at("duration_ms").get<double>();
    } catch (const json::exception& e) {
        throw data_error("malformed run record '" + path.string() + "': " + e.what());
    }
    return r;
}

// ---------------------------------------------------------------------------
// heatmap
// ---------------------------------------------------------------------------

void write_pgm_heatmap(const Matrix& m, const fs::path& path) {
    if (m.rows() != m.cols()) throw data_error("heatmap: matrix is not square");
    const double top = m.cwiseAbs().maxCoeff();

    std::FILE* out = std::fopen(path.string().c_str(), "wb");
    if (!out) throw data_error("cannot write '" + path.string() + "'");
    std::fprintf(out, "P5\n%ld %ld\n255\n", static_cast<long>(m.cols()), static_cast<long>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            double shade = top > 0.0 ? 255.0 * (1.0 - std::fabs(m(i, j)) / top) : 255.0;
            int pixel = static_cast<int>(std::lround(shade));
            std::fputc(std::clamp(pixel, 0, 255), out);
        }
    }
    std::fclose(out);
}

// ---------------------------------------------------------------------------
// solver config files
// ---------------------------------------------------------------------------

namespace {

struct FitSettings {
    SolverConfig config;
    NormalizeMode normalize = NormalizeMode::UnitColumn;
};

FitSettings read_config_file(const fs::path& path, int n_views) {
    std::map<std::string, std::string> kv;
    try {
        kv = load_key_values(path);
    } catch (const data_error& e) {
        throw config_error(e.what());
    }

    FitSettings s;
    std::map<int, KernelSpec> per_view;
    auto number = [&](const std::string& value, const std::string& key) {
        try {
            std::size_t pos = 0;
            double v = std::stod(value, &pos);
            if (pos != value.size()) throw std::invalid_argument(value);
            return v;
        } catch (const std::exception&) {
            throw config_error("expected a number for '" + key + "', got '" + value + "'");
        }
    };

    for (const auto& [key, value] : kv) {
        if (key == "lambda") s.config.lambda = number(value, key);
        else if (key == "gamma") s.config.gamma = number(value, key);
        else if (key == "theta") s.config.theta = number(value, key);
        else if (key == "k") s.config.k = static_cast<int>(number(value, key));
        else if (key == "rho0") s.config.rho0 = number(value, key);
        else if (key == "rho_mult") s.config.rho_mult = number(value, key);
        else if (key == "rho_cap") s.config.rho_cap = value == "inf" ? HUGE_VAL : number(value, key);
        else if (key == "iters") s.config.max_iters = static_cast<int>(number(value, key));
        else if (key == "tol") s.config.tol = number(value, key);
        else if (key == "mode") s.config.mode = parse_consensus_mode(value);
        else if (key == "enriched") s.config.enriched = value == "true" || value == "1";
        else if (key == "seed") s.config.seed = static_cast<std::uint64_t>(std::stoull(value));
        else if (key == "normalize") s.normalize = parse_normalize_mode(value);
        else if (key == "kernel") s.config.kernel_per_view = {parse_kernel_spec(value)};
        else if (key.rfind("kernel.", 0) == 0)
            per_view[std::stoi(key.substr(7))] = parse_kernel_spec(value);
        else if (key != "name")
            throw config_error(path.string() + ": unknown config key '" + key + "'");
    }

    if (!per_view.empty()) {
        KernelSpec base =
            s.config.kernel_per_view.size() == 1 ? s.config.kernel_per_view[0] : KernelSpec::linear();
        s.config.kernel_per_view.assign(n_views, base);
        for (const auto& [v, spec] : per_view) {
            if (v < 0 || v >= n_views)
                throw config_error("kernel." + std::to_string(v) + " is out of range");
            s.config.kernel_per_view[v] = spec;
        }
    }
    return s;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

struct FitCli {
    std::string manifest, config_file, out_dir;
    double lambda = 0, gamma = 0, theta = 0, tol = 0, rho0 = 0, rho_mult = 0, rho_cap = 0;
    int k = 0, iters = 0;
    std::uint64_t seed = 0;
    std::string kernel, mode, normalize;
    bool no_enrich = false;

    CLI::Option *o_lambda = nullptr, *o_gamma = nullptr, *o_theta = nullptr, *o_tol = nullptr,
                *o_rho0 = nullptr, *o_rho_mult = nullptr, *o_rho_cap = nullptr, *o_k = nullptr,
                *o_iters = nullptr, *o_seed = nullptr, *o_kernel = nullptr, *o_mode = nullptr,
                *o_normalize = nullptr;
};

int cmd_fit(const FitCli& cli) {
    auto started = std::chrono::steady_clock::now();

    MultiViewDataset dataset = load_dataset(cli.manifest);
    FitSettings settings = read_config_file(cli.config_file, dataset.view_count());

    if (cli.o_lambda->count()) settings.config.lambda = cli.lambda;
    if (cli.o_gamma->count()) settings.config.gamma = cli.gamma;
    if (cli.o_theta->count()) settings.config.theta = cli.theta;
    if (cli.o_k->count()) settings.config.k = cli.k;
    if (cli.o_iters->count()) settings.config.max_iters = cli.iters;
    if (cli.o_tol->count()) settings.config.tol = cli.tol;
    if (cli.o_rho0->count()) settings.config.rho0 = cli.rho0;
    if (cli.o_rho_mult->count()) settings.config.rho_mult = cli.rho_mult;
    if (cli.o_rho_cap->count()) settings.config.rho_cap = cli.rho_cap;
    if (cli.o_seed->count()) settings.config.seed = cli.seed;
    if (cli.o_kernel->count()) settings.config.kernel_per_view = {parse_kernel_spec(cli.kernel)};
    if (cli.o_mode->count()) settings.config.mode = parse_consensus_mode(cli.mode);
    if (cli.o_normalize->count()) settings.normalize = parse_normalize_mode(cli.normalize);
    if (cli.no_enrich) settings.config.enriched = false;

    settings.config.validate(dataset.view_count());

    RunRecord record;
    record.config = settings.config;
    record.normalize = settings.normalize;
    record.manifest = cli.manifest;
    record.fingerprint = dataset_fingerprint(cli.manifest);
    record.views = dataset.view_count();
    record.samples = static_cast<long>(dataset.n());

    ClusteringResult result = fit(normalize(std::move(dataset), settings.normalize), settings.config);

    fs::create_directories(cli.out_dir);
    fs::path out(cli.out_dir);
    save_labels(result.labels, out / "labels.csv");
    save_matrix_csv(result.consensus, out / "consensus.csv");
    save_matrix_csv(result.embedding, out / "embedding.csv");

    {
        std::FILE* trace = std::fopen((out / "trace.csv").string().c_str(), "wb");
        if (!trace) throw data_error("cannot write '" + (out / "trace.csv").string() + "'");
        for (std::size_t i = 0; i < result.trace.size(); ++i)
            std::fprintf(trace, "%zu,%.17g,%.17g,%.17g\n", i + 1, result.trace[i].objective,
                         result.trace[i].residual_ca, result.trace[i].residual_sum1);
        std::fclose(trace);
    }

    if (result.acc) {
        std::ofstream metrics(out / "metrics.txt");
        metrics << "acc = " << std::fixed << std::setprecision(6) << *result.acc << "\n"
                << "nmi = " << *result.nmi_score << "\n"
                << "nmi_normalization = geometric_mean\n";
    }

    record.iterations = result.iterations;
    record.converged = result.converged;
    record.residual_ca = result.residual_ca;
    record.residual_sum1 = result.residual_sum1;
    record.acc = result.acc;
    record.nmi_score = result.nmi_score;
    record.trace = result.trace;
    record.duration_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    save_run_record(record, out / "run.json");

    std::printf("fit: %d iterations, %s (residual_ca=%.3g, residual_sum1=%.3g)\n", result.iterations,
                result.converged ? "converged" : "iteration budget reached", result.residual_ca,
                result.residual_sum1);
    if (result.acc) std::printf("acc=%.4f nmi=%.4f\n", *result.acc, *result.nmi_score);
    return 0;
}

std::vector<double> parse_double_list(const std::string& text, const std::string& flag) {
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t comma = text.find(',', start);
        std::string cell = comma == std::string::npos ? text.substr(start)
                                                      : text.substr(start, comma - start);
        try {
            out.push_back(std::stod(cell));
        } catch (const std::exception&) {
            throw config_error("bad value '" + cell + "' in " + flag);
        }
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

int cmd_synth(const std::string& kind, int n_per, int clusters, const std::string& dims,
              const std::string& radii, double noise, bool noise_set, std::uint64_t seed,
              const std::string& out_dir, bool force) {
    fs::path out(out_dir);
    if (fs::exists(out) && !fs::is_empty(out) && !force)
        throw config_error("output directory '" + out_dir + "' is not empty (use --force)");

    MultiViewDataset ds;
    std::string name;
    if (kind == "subspaces") {
        std::vector<int> dim_list;
        for (double d : parse_double_list(dims, "--dims")) dim_list.push_back(static_cast<int>(d));
        ds = synth_linear_subspaces(n_per, clusters, dim_list, noise_set ? noise : 0.01, seed);
        name = "subspaces";
    } else if (kind == "rings") {
        std::vector<double> radius_list = parse_double_list(radii, "--radii");
        ds = synth_rings(n_per, clusters, radius_list, noise_set ? noise : 0.05, seed);
        name = "rings";
    } else {
        throw config_error("unknown synth kind '" + kind + "' (expected subspaces or rings)");
    }

    fs::path manifest = save_dataset(ds, out, name);
    std::printf("wrote %s (%d views, %ld samples)\n", manifest.string().c_str(), ds.view_count(),
                static_cast<long>(ds.n()));
    return 0;
}

int cmd_heatmap(const std::string& input, const std::string& output) {
    write_pgm_heatmap(load_matrix_csv(input), output);
    return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path) {
    std::vector<int> pred = load_labels(pred_path);
    std::vector<int> truth = load_labels(truth_path);
    std::printf("acc=%.4f nmi=%.4f\n", accuracy(pred, truth), nmi(pred, truth));
    return 0;
}

}  // namespace

// ---------------------------------------------------------------------------
// argument surface
// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"multi-view kernel subspace clustering"};
    app.require_subcommand(1);

    FitCli fit_cli;
    CLI::App* fit_cmd = app.add_subcommand("fit", "run the solver on a dataset manifest");
    fit_cmd->add_option("--manifest", fit_cli.manifest, "dataset manifest path")->required();
    fit_cmd->add_option("--config", fit_cli.config_file, "solver config path")->required();
    fit_cmd->add_option("--out", fit_cli.out_dir, "output directory")->required();
    fit_cli.o_seed = fit_cmd->add_option("--seed", fit_cli.seed, "random seed");
    fit_cli.o_kernel = fit_cmd->add_option("--kernel", fit_cli.kernel, "linear or poly:<c>:<d>");
    fit_cli.o_lambda = fit_cmd->add_option("--lambda", fit_cli.lambda, "consensus weight");
    fit_cli.o_gamma = fit_cmd->add_option("--gamma", fit_cli.gamma, "spectral-coupling weight");
    fit_cli.o_theta = fit_cmd->add_option("--theta", fit_cli.theta, "sparsity weight");
    fit_cli.o_k = fit_cmd->add_option("--k", fit_cli.k, "cluster count");
    fit_cli.o_iters = fit_cmd->add_option("--iters", fit_cli.iters, "iteration budget");
    fit_cli.o_tol = fit_cmd->add_option("--tol", fit_cli.tol, "primal residual tolerance");
    fit_cli.o_rho0 = fit_cmd->add_option("--rho0", fit_cli.rho0, "initial penalty weight");
    fit_cli.o_rho_mult = fit_cmd->add_option("--rho-mult", fit_cli.rho_mult, "penalty growth factor");
    fit_cli.o_rho_cap = fit_cmd->add_option("--rho-cap", fit_cli.rho_cap, "penalty cap");
    fit_cli.o_mode = fit_cmd->add_option("--mode", fit_cli.mode, "consensus mode: l1 or fro");
    fit_cli.o_normalize = fit_cmd->add_option("--normalize", fit_cli.normalize, "none, unit, or zscore");
    fit_cmd->add_flag("--no-enrich", fit_cli.no_enrich, "drop the spectral coupling term");

    std::string synth_kind, synth_dims = "10,12", synth_radii = "1,3", synth_out;
    int synth_n = 0, synth_clusters = 0;
    double synth_noise = 0.0;
    std::uint64_t synth_seed = 7;
    bool synth_force = false;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    synth_cmd->add_option("--kind", synth_kind, "subspaces or rings")->required();
    synth_cmd->add_option("--out", synth_out, "output directory")->required();
    synth_cmd->add_option("--n-per-cluster", synth_n, "samples per cluster (or per ring)");
    synth_cmd->add_option("--k", synth_clusters, "cluster (or ring) count");
    synth_cmd->add_option("--dims", synth_dims, "per-view ambient dimensions, e.g. 10,12");
    synth_cmd->add_option("--radii", synth_radii, "ring radii, e.g. 1,3");
    CLI::Option* o_noise = synth_cmd->add_option("--noise", synth_noise, "noise level");
    synth_cmd->add_option("--seed", synth_seed, "random seed");
    synth_cmd->add_flag("--force", synth_force, "allow writing into a non-empty directory");

    std::string heatmap_in, heatmap_out;
    CLI::App* heatmap_cmd = app.add_subcommand("heatmap", "render a matrix CSV as a PGM image");
    heatmap_cmd->add_option("input", heatmap_in, "square matrix CSV")->required();
    heatmap_cmd->add_option("output", heatmap_out, "PGM path")->required();

    std::string eval_pred, eval_truth;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score predicted labels against ground truth");
    eval_cmd->add_option("pred", eval_pred, "predicted labels file")->required();
    eval_cmd->add_option("truth", eval_truth, "ground-truth labels file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (fit_cmd->parsed()) return cmd_fit(fit_cli);
        if (synth_cmd->parsed()) {
            if (synth_n == 0) synth_n = synth_kind == "rings" ? 50 : 30;
            if (synth_clusters == 0) synth_clusters = synth_kind == "rings" ? 2 : 3;
            return cmd_synth(synth_kind, synth_n, synth_clusters, synth_dims, synth_radii,
                             synth_noise, o_noise->count() > 0, synth_seed, synth_out, synth_force);
        }
        if (heatmap_cmd->parsed()) return cmd_heatmap(heatmap_in, heatmap_out);
        if (eval_cmd->parsed()) return cmd_eval(eval_pred, eval_truth);
    } catch (const config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const data_error& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return 3;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 2;
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<std::string> with_program;
    with_program.reserve(args.size() + 1);
    with_program.push_back("mvksc");
    with_program.insert(with_program.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    argv.reserve(with_program.size());
    for (const std::string& a : with_program) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace mvksc
