#pragma once

// `cursim` command-line front end: synth, cluster and bench subcommands.
//
// Exit codes: 0 success, 2 usage, 3 data error, 4 algorithm failure.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cursim/cluster.hpp"
#include "cursim/error.hpp"
#include "cursim/io.hpp"
#include "cursim/pipeline.hpp"
#include "cursim/simgen.hpp"
#include "cursim/synth.hpp"

namespace cursim::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kOk = 0, kUsage = 2, kDataError = 3, kAlgorithmFailure = 4 };

inline constexpr const char* kReportHeader = "dataset,algo,params,error_pct,r_best,seconds,seed";
inline constexpr const char* kSweepHeader = "sigma,mean_err,median_err,min_err,max_err,n_instances";

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flags shared by `cluster` and `bench`.
struct AlgoOptions {
    std::string algo;
    std::optional<std::size_t> m;
    std::optional<std::size_t> rank;
    std::optional<std::size_t> k;
    std::optional<std::size_t> rows;
    std::optional<std::size_t> cols;
    std::optional<double> alpha;
    std::optional<std::size_t> rmin;
    std::optional<std::size_t> rmax;
    std::optional<std::size_t> dmax;
    std::string backend = "pcc";
    std::string kind = "binary";
    std::uint64_t seed = 0;
    std::size_t retries = kDefaultMaxRetries;
    bool no_timing = false;
};

inline void add_algo_flags(CLI::App& cmd, AlgoOptions& o) {
    cmd.add_option("--algo", o.algo, "Pipeline to run")
        ->required()
        ->check(CLI::IsMember({"proto", "rcur", "sim", "exact"}));
    cmd.add_option("--M", o.m, "Number of subspaces");
    cmd.add_option("--rank", o.rank, "Clean-data rank (proto, sim)");
    cmd.add_option("--k", o.k, "Number of CUR trials (proto: 25, rcur: 50)");
    cmd.add_option("--rows", o.rows, "Rows per CUR trial (proto; default = rank)");
    cmd.add_option("--cols", o.cols, "Columns per CUR trial (proto; default = all)");
    cmd.add_option("--alpha", o.alpha, "Elementwise exponent (rcur)");
    cmd.add_option("--rmin", o.rmin, "Smallest rank of the sweep (rcur)");
    cmd.add_option("--rmax", o.rmax, "Largest rank of the sweep (rcur)");
    cmd.add_option("--dmax", o.dmax, "Largest subspace dimension (exact)");
    cmd.add_option("--backend", o.backend, "Final clustering step (proto, sim)")
        ->check(CLI::IsMember({"pcc", "spectral", "kmeans"}));
    cmd.add_option("--kind", o.kind, "Gram transform for exact: binary or absolute")
        ->check(CLI::IsMember({"binary", "absolute"}));
    cmd.add_option("--seed", o.seed, "Master seed");
    cmd.add_option("--retries", o.retries, "Maximum CUR selection attempts per trial");
    cmd.add_flag("--no-timing", o.no_timing, "Write 0 in the report's seconds column");
}

inline Backend parse_backend(const std::string& s) {
    if (s == "spectral") return Backend::spectral;
    if (s == "kmeans") return Backend::kmeans;
    return Backend::pcc;
}

template <class T>
T require_flag(const std::optional<T>& v, const char* flag, const std::string& algo) {
    if (!v) throw UsageError(std::string(flag) + " is required for --algo " + algo);
    return *v;
}

struct RunOutcome {
    LabelVector labels;
    std::string params;
    std::optional<std::size_t> r_best;
    std::vector<std::pair<std::size_t, double>> ncut_per_rank;
};

/// Runs the selected pipeline. `m_override` and `default_rank` come from a
/// bench manifest; plain `cluster` leaves them unset.
inline RunOutcome run_algorithm(const AlgoOptions& o, const Matrix& w, std::uint64_t seed,
                                std::optional<std::size_t> m_override = std::nullopt,
                                std::optional<std::size_t> default_rank = std::nullopt) {
    RunOutcome out;
    std::ostringstream params;
    const std::optional<std::size_t> m_opt = m_override ? m_override : o.m;

    if (o.algo == "exact") {
        const std::size_t dmax = require_flag(o.dmax, "--dmax", o.algo);
        const auto kind = o.kind == "absolute" ? SimilarityKind::absolute : SimilarityKind::binary;
        out.labels = cluster_noise_free(w, dmax, kind);
        params << "dmax=" << dmax << ";kind=" << o.kind;
    } else if (o.algo == "proto") {
        const std::size_t m = require_flag(m_opt, "--M", o.algo);
        std::optional<std::size_t> rank = o.rank ? o.rank : default_rank;
        ProtoConfig cfg;
        cfg.m_subspaces = m;
        cfg.target_rank = require_flag(rank, "--rank", o.algo);
        cfg.n_trials = o.k.value_or(25);
        cfg.rows_per_trial = o.rows.value_or(cfg.target_rank);
        cfg.cols_per_trial = o.cols;
        cfg.backend = parse_backend(o.backend);
        cfg.seed = seed;
        cfg.max_retries = o.retries;
        out.labels = proto_cluster(w, cfg);
        params << "M=" << m << ";rank=" << cfg.target_rank << ";k=" << cfg.n_trials << ";rows=" << cfg.rows_per_trial
               << ";cols=" << (o.cols ? std::to_string(*o.cols) : std::string("all")) << ";backend=" << o.backend;
    } else if (o.algo == "rcur") {
        const std::size_t m = require_flag(m_opt, "--M", o.algo);
        RcurConfig cfg;
        cfg.r_min = require_flag(o.rmin, "--rmin", o.algo);
        cfg.r_max = require_flag(o.rmax, "--rmax", o.algo);
        cfg.alpha = require_flag(o.alpha, "--alpha", o.algo);
        cfg.n_trials = o.k.value_or(50);
        cfg.seed = seed;
        cfg.max_retries = o.retries;
        RcurResult res = rcur_cluster(w, m, cfg);
        out.labels = std::move(res.labels);
        out.r_best = res.r_best;
        out.ncut_per_rank = std::move(res.ncut_per_rank);
        params << "M=" << m << ";rmin=" << cfg.r_min << ";rmax=" << cfg.r_max << ";k=" << cfg.n_trials
               << ";alpha=" << io::format_double(cfg.alpha);
    } else {  // sim
        const std::size_t m = require_flag(m_opt, "--M", o.algo);
        std::optional<std::size_t> rank = o.rank ? o.rank : default_rank;
        const std::size_t r = require_flag(rank, "--rank", o.algo);
        out.labels = run_backend(parse_backend(o.backend), sim_baseline(w, r), m, seed);
        params << "M=" << m << ";rank=" << r << ";backend=" << o.backend;
    }
    out.params = params.str();
    return out;
}

struct ReportRow {
    std::string dataset;
    std::string algo;
    std::string params;
    std::optional<double> error_pct;
    std::optional<std::size_t> r_best;
    double seconds = 0.0;
    std::uint64_t seed = 0;
};

inline std::string format_row(const ReportRow& r) {
    std::ostringstream s;
    s << r.dataset << ',' << r.algo << ',' << r.params << ',' << (r.error_pct ? io::format_double(*r.error_pct) : "")
      << ',' << (r.r_best ? std::to_string(*r.r_best) : "") << ',' << io::format_double(r.seconds) << ',' << r.seed;
    return s.str();
}

inline void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
}

inline double elapsed_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
    std::optional<int> case_id;
    std::vector<std::size_t> dims;
    std::size_t ambient = 300;
    std::size_t points = 50;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string out;
    bool shuffle = false;
    bool sweep = false;
    std::size_t trials = 100;
    std::vector<double> sigmas;
    std::string backend = "pcc";
    std::size_t k = 25;
};

inline std::vector<std::size_t> resolve_dims(const SynthOptions& o) {
    if (!o.dims.empty()) return o.dims;
    if (!o.case_id) throw UsageError("synth: one of --case or --dims is required");
    if (*o.case_id == 1) return {4, 4};
    return {4, 4, 4};
}

inline int cmd_synth(const SynthOptions& o, std::ostream& out) {
    const auto dims = resolve_dims(o);
    if (o.sweep) {
        ProtoConfig cfg = sweep_proto_config(dims, parse_backend(o.backend));
        cfg.n_trials = o.k;
        const auto& sigmas = o.sigmas.empty() ? default_sigmas() : o.sigmas;
        const auto table = run_sweep(dims, sigmas, o.trials, cfg, o.seed, SweepShape{o.ambient, o.points});
        std::ostringstream csv;
        csv << kSweepHeader << '\n';
        for (const auto& row : table)
            csv << io::format_double(row.sigma) << ',' << io::format_double(row.mean_err) << ','
                << io::format_double(row.median_err) << ',' << io::format_double(row.min_err) << ','
                << io::format_double(row.max_err) << ',' << row.n_instances << '\n';
        if (o.out.empty())
            out << csv.str();
        else
            write_text(o.out, csv.str());
        return kOk;
    }
    if (o.out.empty()) throw UsageError("synth: --out is required unless --sweep is given");
    const UnionModel model = random_union_model(o.ambient, dims, mix_seed(o.seed, 1));
    const std::vector<std::size_t> pts(dims.size(), o.points);
    const SyntheticInstance inst = sample_instance(model, pts, o.sigma, mix_seed(o.seed, 2), o.shuffle);
    io::save_csv(o.out, inst.data);
    io::save_labels(io::labels_path_for(o.out), inst.truth);
    out << "wrote " << inst.data.rows() << "x" << inst.data.cols() << " matrix to " << o.out << '\n';
    return kOk;
}

// ---------------------------------------------------------------- cluster

struct ClusterOptions {
    std::string data;
    std::string out;
    AlgoOptions algo;
};

inline int cmd_cluster(const ClusterOptions& o, std::ostream& out) {
    const io::DatasetFile ds = io::load_csv(o.data);
    const auto t0 = std::chrono::steady_clock::now();
    RunOutcome res = run_algorithm(o.algo, ds.matrix, o.algo.seed);
    const double seconds = o.algo.no_timing ? 0.0 : elapsed_since(t0);

    fs::path prefix = o.out;
    if (prefix.empty()) {
        prefix = fs::path(o.data);
        prefix.replace_extension();
        prefix += "." + o.algo.algo;
    }
    fs::path labels_file = prefix;
    labels_file += ".labels";
    io::save_labels(labels_file, res.labels);

    ReportRow row{fs::path(o.data).stem().string(), o.algo.algo, res.params, std::nullopt, res.r_best, seconds,
                  o.algo.seed};
    if (ds.labels) {
        row.error_pct = clustering_error(res.labels, *ds.labels);
        out << "error_pct=" << io::format_double(*row.error_pct) << '\n';
    }
    if (res.r_best) {
        out << "r_best=" << *res.r_best << '\n';
        std::ostringstream ncut;
        ncut << "rank,ncut\n";
        for (const auto& [r, v] : res.ncut_per_rank) ncut << r << ',' << io::format_double(v) << '\n';
        out << ncut.str();
        fs::path ncut_file = prefix;
        ncut_file += ".ncut.csv";
        write_text(ncut_file, ncut.str());
    }
    fs::path report_file = prefix;
    report_file += ".report.csv";
    write_text(report_file, std::string(kReportHeader) + "\n" + format_row(row) + "\n");
    out << "labels written to " << labels_file.string() << '\n';
    return kOk;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
    std::string dir;
    std::string manifest;
    std::string out = "bench_report.csv";
    std::size_t repeats = 1;
    AlgoOptions algo;
};

struct BenchItem {
    fs::path path;
    std::string category = "all";
    std::optional<std::size_t> m;
};

inline std::vector<BenchItem> bench_items(const BenchOptions& o) {
    if (!fs::is_directory(o.dir)) throw DataError("not a directory: " + o.dir);
    std::vector<BenchItem> items;
    if (!o.manifest.empty()) {
        for (const auto& e : io::load_manifest(o.manifest))
            items.push_back(BenchItem{fs::path(o.dir) / e.filename, e.category, e.m_subspaces});
    } else {
        for (const auto& entry : fs::directory_iterator(o.dir))
            if (entry.is_regular_file() && entry.path().extension() == ".csv") items.push_back(BenchItem{entry.path()});
    }
    if (items.empty()) throw DataError("no datasets found in " + o.dir);
    std::sort(items.begin(), items.end(), [](const BenchItem& a, const BenchItem& b) { return a.path < b.path; });
    return items;
}

inline int cmd_bench(const BenchOptions& o, std::ostream& out) {
    if (o.repeats < 1) throw UsageError("bench: --repeats must be at least 1");
    const auto items = bench_items(o);

    std::ostringstream report;
    report << kReportHeader << '\n';
    std::map<std::string, std::vector<double>> by_category;
    std::vector<double> overall;

    for (const auto& item : items) {
        const io::DatasetFile ds = io::load_csv(item.path);
        std::optional<std::size_t> m = item.m ? item.m : o.algo.m;
        if (!m && ds.labels) m = ds.labels->m_clusters;
        const std::optional<std::size_t> rank = m ? std::optional<std::size_t>(4 * *m) : std::nullopt;

        ReportRow row;
        row.dataset = item.path.stem().string();
        row.algo = o.algo.algo;
        row.seed = o.algo.seed;
        double err_sum = 0.0;
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t rep = 0; rep < o.repeats; ++rep) {
            RunOutcome res = run_algorithm(o.algo, ds.matrix, o.algo.seed + rep, m, rank);
            if (rep == 0) {
                row.params = res.params;
                row.r_best = res.r_best;
            }
            if (ds.labels) err_sum += clustering_error(res.labels, *ds.labels);
        }
        row.seconds = o.algo.no_timing ? 0.0 : elapsed_since(t0) / static_cast<double>(o.repeats);
        if (ds.labels) {
            row.error_pct = err_sum / static_cast<double>(o.repeats);
            by_category[item.category].push_back(*row.error_pct);
            overall.push_back(*row.error_pct);
        }
        report << format_row(row) << '\n';
    }
    write_text(o.out, report.str());

    std::ostringstream summary;
    summary << "category,n_sequences,mean_err,median_err\n";
    auto emit = [&](const std::string& name, const std::vector<double>& errs) {
        const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / static_cast<double>(errs.size());
        summary << name << ',' << errs.size() << ',' << io::format_double(mean) << ','
                << io::format_double(median_of(errs)) << '\n';
    };
    if (by_category.size() > 1 || (by_category.size() == 1 && by_category.begin()->first != "all"))
        for (const auto& [cat, errs] : by_category) emit(cat, errs);
    if (!overall.empty()) emit("all", overall);

    fs::path summary_file = o.out;
    summary_file.replace_extension();
    summary_file += ".summary.csv";
    write_text(summary_file, summary.str());
    out << summary.str();
    return kOk;
}

// ---------------------------------------------------------------- entry

/// Parses `args` (args[0] is the program name) and dispatches.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"CUR-based subspace clustering"};
    app.name("cursim");
    app.require_subcommand(1);

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic union-of-subspaces data or run a noise sweep");
    synth_cmd->add_option("--case", synth.case_id, "1: dims (4,4); 2: dims (4,4,4)")->check(CLI::Range(1, 2));
    synth_cmd->add_option("--dims", synth.dims, "Subspace dimensions, e.g. 4,4")->delimiter(',');
    synth_cmd->add_option("--ambient", synth.ambient, "Ambient dimension");
    synth_cmd->add_option("--points", synth.points, "Points per subspace");
    synth_cmd->add_option("--sigma", synth.sigma, "Noise standard deviation");
    synth_cmd->add_option("--seed", synth.seed, "Master seed");
    synth_cmd->add_option("--out", synth.out, "Output CSV (data, or sweep table)");
    synth_cmd->add_flag("--shuffle", synth.shuffle, "Shuffle columns");
    synth_cmd->add_flag("--sweep", synth.sweep, "Run the sigma sweep instead of writing one instance");
    synth_cmd->add_option("--trials", synth.trials, "Instances per sigma (sweep)");
    synth_cmd->add_option("--sigmas", synth.sigmas, "Noise levels (sweep)")->delimiter(',');
    synth_cmd->add_option("--backend", synth.backend, "Clustering step (sweep)")
        ->check(CLI::IsMember({"pcc", "spectral", "kmeans"}));
    synth_cmd->add_option("--k", synth.k, "CUR trials per instance (sweep)");

    ClusterOptions cluster;
    auto* cluster_cmd = app.add_subcommand("cluster", "Cluster the columns of a data CSV");
    cluster_cmd->add_option("--data", cluster.data, "Data CSV")->required();
    cluster_cmd->add_option("--out", cluster.out, "Output prefix for .labels/.report.csv");
    add_algo_flags(*cluster_cmd, cluster.algo);

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run one pipeline over a directory of datasets");
    bench_cmd->add_option("--dir", bench.dir, "Dataset directory")->required();
    bench_cmd->add_option("--manifest", bench.manifest, "filename,category,M records");
    bench_cmd->add_option("--out", bench.out, "Per-dataset report CSV");
    bench_cmd->add_option("--repeats", bench.repeats, "Runs per dataset (seeds seed..seed+repeats-1)");
    add_algo_flags(*bench_cmd, bench.algo);

    if (args.size() <= 1) {
        err << app.help();
        return kUsage;
    }
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (synth_cmd->parsed()) return cmd_synth(synth, out);
        if (cluster_cmd->parsed()) return cmd_cluster(cluster, out);
        return cmd_bench(bench, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const InputError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const SelectionFailed& e) {
        err << "algorithm failure: " << e.what() << '\n';
        return kAlgorithmFailure;
    } catch (const RankDeficientSelection& e) {
        err << "algorithm failure: " << e.what() << '\n';
        return kAlgorithmFailure;
    }
}

}  // namespace cursim::cli
