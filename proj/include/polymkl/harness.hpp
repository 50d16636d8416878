#pragma once

// Experiment orchestration and the command-line front end. Needs CLI11
// (vendor/CLI11.hpp) on the include path in addition to Eigen.

#include "polymkl/baselines.hpp"
#include "polymkl/common.hpp"
#include "polymkl/dataset.hpp"
#include "polymkl/dual.hpp"
#include "polymkl/kernelset.hpp"
#include "polymkl/optimizer.hpp"
#include "polymkl/rho_schedule.hpp"
#include "polymkl/sparse_theta.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace polymkl {

/// Bad command line. The message is meant for the user.
class UsageError : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// --help was given; what() is the help text.
class HelpRequested : public Error {
public:
    using Error::Error;
};

struct SyntheticConfig {
    SyntheticSpec spec;
    Eigen::Index n_val = 0;
    bool seed_given = false;
};

struct RunConfig {
    std::string algo = "stoch";
    int degree = 3;
    std::vector<double> rho_sq;   // empty: all ones
    double lambda = 1e-5;
    std::vector<double> lambda_grid;
    std::int64_t iterations = 1000;
    std::optional<double> step;
    std::uint64_t seed = 1;
    bool include_constant = true;
    std::string data_path;
    bool csv_header = true;
    std::optional<SyntheticConfig> synthetic;
    std::optional<std::array<Eigen::Index, 3>> split;
    std::string out = "polymkl_out";
    bool overwrite = false;
    std::int64_t checkpoint_every = 0;
    std::vector<int> scaling_r;   // non-empty: run the scaling study instead
    int scaling_seeds = 3;

    /// Prior schedule before lambda is folded in.
    RhoSchedule rho_prior() const
    {
        return rho_sq.empty() ? RhoSchedule::uniform(degree) : RhoSchedule(rho_sq);
    }

    void validate() const
    {
        if (algo != "stoch" && algo != "ucd" && algo != "fullgrad")
            throw UsageError("--algo must be one of stoch, ucd, fullgrad");
        if (degree < 0) throw UsageError("--degree must be >= 0");
        if (!rho_sq.empty() && rho_sq.size() != static_cast<std::size_t>(degree) + 1)
            throw UsageError("--rho-sq needs D+1 = " + std::to_string(degree + 1) + " values");
        for (double v : rho_sq)
            if (!(v > 0.0)) throw UsageError("--rho-sq values must be > 0");
        if (!(lambda > 0.0)) throw UsageError("--lambda must be > 0");
        for (double v : lambda_grid)
            if (!(v > 0.0)) throw UsageError("--lambda-grid values must be > 0");
        if (iterations < 1) throw UsageError("--iters must be >= 1");
        if (step && !(*step > 0.0)) throw UsageError("--step must be > 0");
        if (checkpoint_every < 0) throw UsageError("--checkpoint-every must be >= 0");
        if (scaling_r.empty()) {
            if (data_path.empty() == !synthetic.has_value())
                throw UsageError("give exactly one of --data or --synthetic");
            if (split && synthetic) throw UsageError("--split applies to --data only; use val= with --synthetic");
            if (out.empty()) throw UsageError("--out must not be empty");
        } else {
            if (!data_path.empty()) throw UsageError("--scaling runs on synthetic data only");
            for (int r : scaling_r)
                if (r < 1) throw UsageError("--scaling values must be >= 1");
            if (scaling_seeds < 1) throw UsageError("--scaling-seeds must be >= 1");
        }
    }
};

/// "r=5,train=500,test=1000,terms=10,maxdeg=3[,val=N][,seed=N]"
inline SyntheticConfig parse_synthetic(const std::string& text)
{
    SyntheticConfig cfg;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("--synthetic: expected key=value, got '" + item + "'");
        const std::string key = item.substr(0, eq);
        const std::string val = item.substr(eq + 1);
        long long v = 0;
        try {
            std::size_t used = 0;
            v = std::stoll(val, &used);
            if (used != val.size()) throw std::invalid_argument(val);
        } catch (const std::exception&) {
            throw UsageError("--synthetic: '" + key + "' needs an integer, got '" + val + "'");
        }
        if (v < 0) throw UsageError("--synthetic: '" + key + "' must be >= 0");
        if (key == "r") cfg.spec.r = static_cast<int>(v);
        else if (key == "train") cfg.spec.n_train = v;
        else if (key == "test") cfg.spec.n_test = v;
        else if (key == "terms") cfg.spec.n_terms = static_cast<int>(v);
        else if (key == "maxdeg") cfg.spec.max_degree = static_cast<int>(v);
        else if (key == "val") cfg.n_val = v;
        else if (key == "seed") {
            cfg.spec.seed = static_cast<std::uint64_t>(v);
            cfg.seed_given = true;
        } else
            throw UsageError("--synthetic: unknown key '" + key + "'");
    }
    return cfg;
}

inline RunConfig parse_cli(int argc, const char* const* argv)
{
    RunConfig cfg;
    CLI::App app{"Sparse multiple kernel learning over polynomial product kernels", "polymkl"};
    app.get_formatter()->column_width(34);

    std::string constant = "on", header = "on", synthetic;
    std::vector<Eigen::Index> split_sizes;
    double step = 0.0;

    app.add_option("--algo", cfg.algo, "Solver")->check(CLI::IsMember({"stoch", "ucd", "fullgrad"}))->capture_default_str();
    auto* data_opt = app.add_option("--data", cfg.data_path, "CSV file, last column is the target");
    auto* syn_opt = app.add_option("--synthetic", synthetic,
                                   "Synthetic data: r=..,train=..,test=..,terms=..,maxdeg=..[,val=..][,seed=..]");
    data_opt->excludes(syn_opt);
    auto* deg_opt = app.add_option("--degree", cfg.degree, "Maximum product degree D")->capture_default_str();
    app.add_option("--rho-sq", cfg.rho_sq, "Per-degree rho^2, D+1 comma-separated values (default all 1)")
        ->delimiter(',');
    app.add_option("--lambda", cfg.lambda, "Regularization strength, folded into rho^2")->capture_default_str();
    app.add_option("--lambda-grid", cfg.lambda_grid, "Pick lambda from this list by validation MSE")->delimiter(',');
    app.add_option("--iters", cfg.iterations, "Iterations T (iteration cap for fullgrad)")->capture_default_str();
    auto* step_opt = app.add_option("--step", step, "Step size (default 1/(C0 sqrt(T)))");
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_option("--constant", constant, "Include the constant base kernel")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    app.add_option("--csv-header", header, "Whether the CSV has a header row")
        ->check(CLI::IsMember({"on", "off"}))
        ->capture_default_str();
    app.add_option("--split", split_sizes, "Train,validation,test row counts for --data (default 60/20/20)")
        ->delimiter(',');
    app.add_option("--out", cfg.out, "Output path prefix")->capture_default_str();
    app.add_flag("--overwrite", cfg.overwrite, "Replace existing output files");
    app.add_option("--checkpoint-every", cfg.checkpoint_every, "Rebuild K_theta every N steps and track drift (0 = off)")
        ->capture_default_str();
    app.add_option("--scaling", cfg.scaling_r, "Run the per-iteration scaling study over these r values")
        ->delimiter(',');
    app.add_option("--scaling-seeds", cfg.scaling_seeds, "Data seeds per r in the scaling study")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(std::string(e.what()) + "\nRun with --help for usage.");
    }

    if (!synthetic.empty() || syn_opt->count() > 0) cfg.synthetic = parse_synthetic(synthetic);
    if (cfg.synthetic && !cfg.synthetic->seed_given) cfg.synthetic->spec.seed = cfg.seed;
    if (step_opt->count() > 0) cfg.step = step;
    cfg.include_constant = constant == "on";
    cfg.csv_header = header == "on";
    if (!split_sizes.empty()) {
        if (split_sizes.size() != 3) throw UsageError("--split needs three counts a,b,c");
        cfg.split = std::array<Eigen::Index, 3>{split_sizes[0], split_sizes[1], split_sizes[2]};
    }
    if (!cfg.rho_sq.empty() && deg_opt->count() == 0) cfg.degree = static_cast<int>(cfg.rho_sq.size()) - 1;
    if (!cfg.scaling_r.empty() && !cfg.synthetic) cfg.synthetic = SyntheticConfig{};
    cfg.validate();
    return cfg;
}

inline RunConfig parse_cli(const std::vector<std::string>& args)
{
    std::vector<const char*> argv{"polymkl"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return parse_cli(static_cast<int>(argv.size()), argv.data());
}

// ---------------------------------------------------------------------------
// Artifacts

inline std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

struct OutputPaths {
    std::filesystem::path records, summary, theta, alpha;

    explicit OutputPaths(const std::string& prefix)
        : records(prefix + ".records.csv"), summary(prefix + ".summary.txt"), theta(prefix + ".theta.csv"),
          alpha(prefix + ".alpha.csv")
    {
    }

    void check_free(bool overwrite) const
    {
        if (overwrite) return;
        for (const auto& p : {records, summary, theta, alpha})
            if (std::filesystem::exists(p))
                throw Error("output file exists: " + p.string() + " (use --overwrite or another --out)");
    }
};

inline std::ofstream open_output(const std::filesystem::path& path)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::out | std::ios::trunc);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    return f;
}

class RecordWriter {
public:
    static constexpr const char* kHeader = "iter,wall_time_s,J_value,C_value,support_size,theta_norm";

    explicit RecordWriter(const std::filesystem::path& path) : out_(open_output(path)) { out_ << kHeader << '\n'; }

    void write(const RunRecord& r)
    {
        out_ << r.iter << ',' << format_double(r.wall_time) << ',' << format_double(r.J_value) << ','
             << format_double(r.C_value) << ',' << r.support_size << ',' << format_double(r.theta_norm) << '\n';
        out_.flush();
    }

private:
    std::ofstream out_;
};

inline void write_theta_csv(const std::filesystem::path& path, const SparseTheta& theta)
{
    auto f = open_output(path);
    f << "degree,tuple,weight\n";
    for (const auto& [idx, w] : theta.values()) f << idx.degree() << ',' << idx.to_string() << ',' << format_double(w) << '\n';
}

inline void write_alpha_csv(const std::filesystem::path& path, const Vector& alpha)
{
    auto f = open_output(path);
    f << "alpha\n";
    for (Eigen::Index i = 0; i < alpha.size(); ++i) f << format_double(alpha(i)) << '\n';
}

// ---------------------------------------------------------------------------
// Experiments

struct PreparedData {
    Dataset train, val, test;   // standardized with train statistics
    StandardizerParams params;
};

inline PreparedData prepare_data(const RunConfig& cfg)
{
    Dataset train, val, test;
    if (cfg.synthetic) {
        SyntheticSpec spec = cfg.synthetic->spec;
        const Eigen::Index n_train = spec.n_train;
        spec.n_train += cfg.synthetic->n_val;
        const auto syn = gen_synthetic(spec);
        std::vector<Eigen::Index> tr(static_cast<std::size_t>(n_train)), va;
        for (Eigen::Index i = 0; i < n_train; ++i) tr[static_cast<std::size_t>(i)] = i;
        for (Eigen::Index i = n_train; i < spec.n_train; ++i) va.push_back(i);
        train = syn.train.subset(tr);
        val = syn.train.subset(va);
        test = syn.test;
    } else {
        const Dataset all = load_csv(cfg.data_path, cfg.csv_header);
        std::array<Eigen::Index, 3> sizes{};
        if (cfg.split) {
            sizes = *cfg.split;
        } else {
            sizes[0] = all.n() * 3 / 5;
            sizes[1] = all.n() / 5;
            sizes[2] = all.n() - sizes[0] - sizes[1];
        }
        auto parts = split(all, sizes[0], sizes[1], sizes[2], cfg.seed);
        train = std::move(parts.train);
        val = std::move(parts.val);
        test = std::move(parts.test);
    }
    PreparedData out;
    out.params = fit_standardizer(train);
    out.train = out.params.apply(train);
    out.val = val.n() > 0 ? out.params.apply(val) : val;
    out.test = test.n() > 0 ? out.params.apply(test) : test;
    return out;
}

/// What one solver run leaves behind, whichever algorithm produced it.
struct SolveOutcome {
    SparseTheta theta;        // theta_avg (theta* for fullgrad)
    SparseTheta theta_last;
    DualState final;
    double J_avg = 0.0;
    double J_last = 0.0;
    std::vector<RunRecord> records;
    bool converged = false;
    double C0 = 0.0;
    double step_size = 0.0;
    double max_k_theta_drift = 0.0;
    std::vector<std::int64_t> sampled_degree_counts;
};

inline SolveOutcome solve(const RunConfig& cfg, const Vector& y, const BaseKernelSet& ks, const RhoSchedule& rho,
                          const std::function<void(const RunRecord&)>& on_record)
{
    SolveOutcome o;
    if (cfg.algo == "fullgrad") {
        FullGradientOptions fo;
        fo.max_iterations = cfg.iterations;
        fo.on_record = on_record;
        auto r = run_full_gradient(fo, y, ks, rho);
        o.theta = r.theta_star;
        o.theta_last = r.theta_star;
        o.J_avg = o.J_last = r.J_star;
        o.final = std::move(r.final);
        o.records = std::move(r.records);
        o.converged = r.converged;
        o.C0 = initial_mass(y, ks, rho);
        return o;
    }
    SolverOptions so;
    so.iterations = cfg.iterations;
    so.step = cfg.step;
    so.seed = cfg.seed;
    so.checkpoint_every = cfg.checkpoint_every;
    so.on_record = on_record;
    RunResult r;
    if (cfg.algo == "ucd") {
        auto set = enumerate_index_set(ks.r(), ks.max_degree());
        set.precompute_grams(ks, std::size_t{512} << 20);
        r = run_ucd(so, y, ks, rho, set);
    } else {
        r = run(so, y, ks, rho);
    }
    o.theta = std::move(r.theta_avg);
    o.theta_last = std::move(r.theta_last);
    o.J_avg = r.final.J_value;
    o.J_last = r.J_last;
    o.final = std::move(r.final);
    o.records = std::move(r.records);
    o.converged = r.converged;
    o.C0 = r.C0;
    o.step_size = r.step_size;
    o.max_k_theta_drift = r.max_k_theta_drift;
    o.sampled_degree_counts = std::move(r.sampled_degree_counts);
    return o;
}

struct ExperimentResult {
    SolveOutcome outcome;
    double lambda = 0.0;   // the one used (selected when a grid was given)
    std::vector<std::pair<double, double>> lambda_scores;   // (lambda, validation MSE)
    double val_mse = std::numeric_limits<double>::quiet_NaN();
    double test_mse = std::numeric_limits<double>::quiet_NaN();
    double wall_time = 0.0;
    Eigen::Index n_train = 0, n_val = 0, n_test = 0;
};

inline void write_summary(const std::filesystem::path& path, const RunConfig& cfg, const ExperimentResult& res)
{
    auto f = open_output(path);
    const auto& o = res.outcome;
    const RhoSchedule rho = cfg.rho_prior();
    f << "algo = " << cfg.algo << '\n'
      << "data = " << (cfg.synthetic ? "synthetic" : cfg.data_path) << '\n';
    if (cfg.synthetic) {
        const auto& s = cfg.synthetic->spec;
        f << "synthetic = r=" << s.r << ",train=" << s.n_train << ",test=" << s.n_test << ",terms=" << s.n_terms
          << ",maxdeg=" << s.max_degree << ",val=" << cfg.synthetic->n_val << ",seed=" << s.seed << '\n';
    }
    f << "n_train = " << res.n_train << '\n'
      << "n_val = " << res.n_val << '\n'
      << "n_test = " << res.n_test << '\n'
      << "degree = " << cfg.degree << '\n'
      << "rho_sq = " << join(rho.values()) << '\n'
      << "constant = " << (cfg.include_constant ? "on" : "off") << '\n'
      << "lambda = " << format_double(res.lambda) << '\n';
    if (!res.lambda_scores.empty()) {
        f << "lambda_grid_val_mse =";
        for (const auto& [l, m] : res.lambda_scores) f << ' ' << format_double(l) << ':' << format_double(m);
        f << '\n';
    }
    f << "iters = " << cfg.iterations << '\n'
      << "seed = " << cfg.seed << '\n'
      << "step_size = " << format_double(o.step_size) << '\n'
      << "C0 = " << format_double(o.C0) << '\n'
      << "iterations_run = " << o.records.size() << '\n'
      << "converged = " << (o.converged ? "true" : "false") << '\n'
      << "J_avg = " << format_double(o.J_avg) << '\n'
      << "J_last = " << format_double(o.J_last) << '\n'
      << "val_mse = " << format_double(res.val_mse) << '\n'
      << "test_mse = " << format_double(res.test_mse) << '\n'
      << "support_size = " << o.theta.support_size() << '\n'
      << "max_k_theta_drift = " << format_double(o.max_k_theta_drift) << '\n';
    if (!o.sampled_degree_counts.empty()) {
        f << "sampled_degree_counts = ";
        for (std::size_t d = 0; d < o.sampled_degree_counts.size(); ++d) f << (d ? "," : "") << o.sampled_degree_counts[d];
        f << '\n';
    }
    f << "wall_time_s = " << format_double(res.wall_time) << '\n';
}

/// Loads or generates data, standardizes on train, runs the selected solver
/// (once per grid value if a lambda grid is given) and writes the artifacts.
inline ExperimentResult run_experiment(const RunConfig& cfg, std::ostream* log = nullptr)
{
    cfg.validate();
    const OutputPaths paths(cfg.out);
    paths.check_free(cfg.overwrite);

    const auto start = std::chrono::steady_clock::now();
    const PreparedData data = prepare_data(cfg);
    const BaseKernelSet ks(data.train.inputs, cfg.include_constant, cfg.degree);
    const RhoSchedule prior = cfg.rho_prior();

    ExperimentResult res;
    res.n_train = data.train.n();
    res.n_val = data.val.n();
    res.n_test = data.test.n();

    auto mse_on = [&](const SolveOutcome& o, const Dataset& set, const RhoSchedule& rho) {
        return mean_squared_error(predict(o.final, o.theta, data.train.inputs, set.inputs, rho), set.targets);
    };

    if (cfg.lambda_grid.empty()) {
        RecordWriter writer(paths.records);
        res.lambda = cfg.lambda;
        res.outcome = solve(cfg, data.train.targets, ks, prior.with_lambda(cfg.lambda),
                            [&](const RunRecord& r) { writer.write(r); });
        if (res.n_val > 0) res.val_mse = mse_on(res.outcome, data.val, prior.with_lambda(cfg.lambda));
    } else {
        if (res.n_val == 0) throw UsageError("--lambda-grid needs validation rows (val= or --split)");
        double best = std::numeric_limits<double>::infinity();
        for (double lam : cfg.lambda_grid) {
            auto o = solve(cfg, data.train.targets, ks, prior.with_lambda(lam), {});
            const double m = mse_on(o, data.val, prior.with_lambda(lam));
            res.lambda_scores.emplace_back(lam, m);
            if (log) *log << "lambda " << format_double(lam) << " val_mse " << format_double(m) << '\n';
            if (m < best) {
                best = m;
                res.lambda = lam;
                res.val_mse = m;
                res.outcome = std::move(o);
            }
        }
        RecordWriter writer(paths.records);
        for (const auto& r : res.outcome.records) writer.write(r);
    }
    if (res.n_test > 0) res.test_mse = mse_on(res.outcome, data.test, prior.with_lambda(res.lambda));
    res.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    write_theta_csv(paths.theta, res.outcome.theta);
    write_alpha_csv(paths.alpha, res.outcome.final.alpha);
    write_summary(paths.summary, cfg, res);
    if (log) {
        *log << cfg.algo << ": J(theta_avg) " << format_double(res.outcome.J_avg) << ", test MSE "
             << format_double(res.test_mse) << ", support " << res.outcome.theta.support_size() << ", "
             << res.outcome.records.size() << " iterations, " << format_double(res.wall_time) << " s\n"
             << "wrote " << paths.records.string() << ", " << paths.summary.string() << ", " << paths.theta.string()
             << ", " << paths.alpha.string() << '\n';
    }
    return res;
}

// ---------------------------------------------------------------------------
// Scaling study

struct ScalingRow {
    int r = 0;
    std::uint64_t index_set_size = 0;
    double stoch_median_s = 0.0;
    std::optional<double> fullgrad_median_s;   // empty when |I| is above the guard
};

inline double median(std::vector<double> v)
{
    if (v.empty()) throw InvalidArgument("median of nothing");
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2 == 1) return *mid;
    return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

/// Time between consecutive records, i.e. one iteration each.
inline std::vector<double> iteration_times(const std::vector<RunRecord>& records)
{
    std::vector<double> dt;
    for (std::size_t k = 1; k < records.size(); ++k) dt.push_back(records[k].wall_time - records[k - 1].wall_time);
    return dt;
}

struct ScalingOptions {
    int degree = 3;
    std::int64_t iterations = 200;
    int seeds = 3;
    bool include_constant = false;
    double lambda = 1e-5;
    std::uint64_t guard = kEnumerationGuard;
};

/// Median per-iteration wall time of the sampled solver and of the
/// full-gradient baseline for each r, pooled over data seeds base.seed + s.
/// The base kernel count r here counts input columns only.
inline std::vector<ScalingRow> run_scaling_study(const std::vector<int>& r_values, const SyntheticSpec& base,
                                                 const ScalingOptions& opts, std::ostream* log = nullptr)
{
    std::vector<ScalingRow> rows;
    for (int r : r_values) {
        ScalingRow row;
        row.r = r;
        const int base_count = r + (opts.include_constant ? 1 : 0);
        row.index_set_size = count_index_set(base_count, opts.degree).ordered;
        const bool run_full = row.index_set_size <= opts.guard;
        std::vector<double> stoch_dt, full_dt;
        for (int s = 0; s < opts.seeds; ++s) {
            SyntheticSpec spec = base;
            spec.r = r;
            spec.seed = base.seed + static_cast<std::uint64_t>(s);
            const auto syn = gen_synthetic(spec);
            const auto [train, params] = standardize(syn.train);
            const BaseKernelSet ks(train.inputs, opts.include_constant, opts.degree);
            const RhoSchedule rho = RhoSchedule::uniform(opts.degree).with_lambda(opts.lambda);

            SolverOptions so;
            so.iterations = opts.iterations;
            so.seed = spec.seed;
            const auto sr = run(so, train.targets, ks, rho);
            for (double t : iteration_times(sr.records)) stoch_dt.push_back(t);

            if (run_full) {
                FullGradientOptions fo;
                fo.max_iterations = opts.iterations;
                fo.tol = 0.0;
                const auto fr = run_full_gradient(fo, train.targets, ks, rho, opts.guard);
                for (double t : iteration_times(fr.records)) full_dt.push_back(t);
            }
        }
        row.stoch_median_s = median(stoch_dt);
        if (run_full && !full_dt.empty()) row.fullgrad_median_s = median(full_dt);
        if (log) {
            *log << "r " << r << " |I| " << row.index_set_size << " stoch " << format_double(row.stoch_median_s)
                 << " s/iter fullgrad "
                 << (row.fullgrad_median_s ? format_double(*row.fullgrad_median_s) + " s/iter" : "skipped") << '\n';
        }
        rows.push_back(row);
    }
    return rows;
}

inline void write_scaling_csv(std::ostream& out, const std::vector<ScalingRow>& rows)
{
    out << "r,index_set_size,stoch_median_s,fullgrad_median_s\n";
    for (const auto& row : rows)
        out << row.r << ',' << row.index_set_size << ',' << format_double(row.stoch_median_s) << ','
            << (row.fullgrad_median_s ? format_double(*row.fullgrad_median_s) : "") << '\n';
}

} // namespace polymkl
