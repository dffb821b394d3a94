#include <burstlab/burstlab.hpp>

#include <CLI11.hpp>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using namespace burstlab;

namespace {

enum ExitCode : int { kOk = 0, kValidation = 2, kRuntime = 3, kIo = 4 };

// ---------------------------------------------------------------------------
// Shared option sets

struct SimOptions {
    ModelParams model;
    SdeConfig sde;
    FbmConfig fbm;
    std::uint64_t seed = 1;
    int ensemble = 1;
    unsigned jobs = 1;
    std::string format = "csv";
    std::string out = "out";
};

void add_model_options(CLI::App* app, ModelParams& p) {
    app->add_option("--alpha", p.alpha, "nonlinearity exponent")->capture_default_str();
    app->add_option("--eps1", p.eps1, "idiosyncratic rate towards state 1")->capture_default_str();
    app->add_option("--eps2", p.eps2, "idiosyncratic rate towards state 2")->capture_default_str();
    app->add_option("--h-scale", p.h_scale, "time-scale factor h")->capture_default_str();
    app->add_option("--n-agents", p.n_agents, "number of agents N")->capture_default_str();
}

void add_sde_options(CLI::App* app, SdeConfig& c) {
    app->add_option("--kappa", c.kappa, "relative step accuracy")->capture_default_str();
    app->add_option("--y-min", c.y_min, "lower reflective bound in y")->capture_default_str();
    app->add_option("--y-max", c.y_max, "upper reflective bound in y")->capture_default_str();
    app->add_option("--t-total", c.t_total, "simulated time")->capture_default_str();
    app->add_option("--grid-dt", c.grid_dt, "output sampling step")->capture_default_str();
}

void add_fbm_options(CLI::App* app, FbmConfig& c) {
    app->add_option("--hurst", c.hurst, "Hurst parameter H")->capture_default_str();
    app->add_option("--gamma", c.gamma_damp, "mean-reversion coefficient")->capture_default_str();
    app->add_option("--dt", c.dt, "fBm time step")->capture_default_str();
    app->add_option("--n-steps", c.n_steps, "fBm steps")->capture_default_str();
}

/// Config-file values fill options not given on the command line. Keys containing
/// a dot are provenance records (as written to .meta sidecars) and are skipped.
void apply_config(CLI::App* sub, const fs::path& file) {
    const Metadata kv = read_key_values(file);
    for (const auto& [key, value] : kv) {
        if (key.find('.') != std::string::npos) continue;
        CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (!opt) throw ConfigError("config " + file.string() + ": unknown key '" + key + "' for " + sub->get_name());
        if (opt->count() > 0) continue;
        std::istringstream words(value);
        std::string w;
        while (words >> w) opt->add_result(w);
        opt->run_callback();
    }
}

void apply_env_seed(CLI::App* sub) {
    CLI::Option* opt = sub->get_option_no_throw("--seed");
    const char* env = std::getenv("BURSTLAB_SEED");
    if (!opt || opt->count() > 0 || !env) return;
    opt->add_result(env);
    opt->run_callback();
}

/// Runs f(0..n-1) on up to `jobs` threads; rethrows the first failure.
template <class F>
void run_parallel(std::size_t n, unsigned jobs, F&& f) {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    const auto worker = [&] {
        for (std::size_t i; (i = next++) < n;) {
            try {
                f(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const std::size_t extra = std::min<std::size_t>(std::max(jobs, 1u), n) - (n > 0 ? 1 : 0);
    for (std::size_t j = 0; j < extra; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string fmt(double v) { return format_double(v); }

Metadata provenance(std::string_view command) {
    return {{"burstlab.version", BURSTLAB_VERSION}, {"burstlab.command", std::string(command)}};
}

// ---------------------------------------------------------------------------
// simulate

Metadata model_meta(const ModelParams& p) {
    return {{"alpha", fmt(p.alpha)}, {"eps1", fmt(p.eps1)}, {"eps2", fmt(p.eps2)}, {"h-scale", fmt(p.h_scale)}};
}

Metadata sde_meta(const SdeConfig& c) {
    return {{"kappa", fmt(c.kappa)}, {"y-min", fmt(c.y_min)}, {"y-max", fmt(c.y_max)}, {"t-total", fmt(c.t_total)}, {"grid-dt", fmt(c.grid_dt)}};
}

Metadata fbm_meta(const FbmConfig& c) {
    return {{"hurst", fmt(c.hurst)}, {"gamma", fmt(c.gamma_damp)}, {"dt", fmt(c.dt)}, {"n-steps", std::to_string(c.n_steps)}};
}

void merge(Metadata& into, const Metadata& from) { into.insert(from.begin(), from.end()); }

void write_trajectory(const fs::path& path, const TimeSeries& s, const std::string& format, Metadata meta) {
    if (format == "binary") {
        write_trajectory_binary(path, s);
    } else {
        write_trajectory_csv(path, s, {{"kind", meta["burstlab.kind"]}, {"seed", meta["seed"]}});
    }
    meta["output.file"] = path.filename().string();
    meta["output.n_samples"] = std::to_string(s.size());
    meta["output.t0"] = fmt(s.t0);
    meta["output.dt"] = fmt(s.dt);
    write_key_values(meta_path(path), meta);
}

int cmd_simulate(const std::string& kind, SimOptions o) {
    detail::require(o.ensemble >= 1, "ensemble size must be >= 1");
    detail::require(o.format == "csv" || o.format == "binary", "format must be csv or binary");
    o.model.validate();
    if (kind == "fbm") {
        o.fbm.validate();
    } else {
        for (const auto& w : o.sde.validate()) std::cerr << "warning: " << w << "\n";
    }

    const std::string ext = o.format == "binary" ? ".bin" : ".csv";
    run_parallel(static_cast<std::size_t>(o.ensemble), o.jobs, [&](std::size_t i) {
        const std::uint64_t seed = o.seed + i;
        Metadata meta = provenance("simulate");
        meta["burstlab.kind"] = kind;
        meta["seed"] = std::to_string(seed);
        meta["format"] = o.format;
        TimeSeries s;
        if (kind == "fbm") {
            FbmConfig c = o.fbm;
            c.seed = seed;
            const FbmRun run = simulate_fbm_biased_run(c);
            merge(meta, fbm_meta(c));
            meta["output.clipped_fraction"] = fmt(run.clipped_fraction);
            meta["output.burn_in_steps"] = std::to_string(run.burn_in);
            if (run.clipped_fraction > 0.01) {
                meta["output.warning"] = "eigenvalue clipping above 1%";
                std::cerr << "warning: seed " << seed << ": fGn eigenvalue clipping " << run.clipped_fraction << "\n";
            }
            s = run.series;
        } else {
            SdeConfig c = o.sde;
            c.seed = seed;
            merge(meta, model_meta(o.model));
            if (kind == "agents") {
                meta["n-agents"] = std::to_string(o.model.n_agents);
                meta["t-total"] = fmt(c.t_total);
                meta["grid-dt"] = fmt(c.grid_dt);
                s = simulate_agents(o.model, c.t_total, c.grid_dt, seed);
            } else {
                merge(meta, sde_meta(c));
                s = kind == "sde-x" ? simulate_x(o.model, c) : simulate_y(o.model, c);
            }
        }
        const fs::path path = fs::path(o.out) / (kind + "_seed" + std::to_string(seed) + ext);
        write_trajectory(path, s, o.format, meta);
        std::cout << path.string() << "\n";
    });
    return kOk;
}

// ---------------------------------------------------------------------------
// analyze

struct Input {
    TimeSeries series;
    Metadata meta;
    std::string hash;
};

bool is_binary_trajectory(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    char magic[sizeof detail::traj_magic] = {};
    f.read(magic, sizeof magic);
    return f && std::equal(std::begin(magic), std::end(magic), std::begin(detail::traj_magic));
}

/// Trajectory plus its provenance: the .meta sidecar when present, else the CSV header.
Input load_input(const fs::path& p) {
    if (!fs::exists(p)) throw IoError(p.string() + ": no such file");
    Input in;
    if (fs::exists(meta_path(p))) {
        in.series = read_trajectory(p);
        in.meta = read_key_values(meta_path(p));
    } else if (is_binary_trajectory(p)) {
        in.series = read_trajectory_binary(p);
    } else {
        in.series = read_trajectory_csv(p, &in.meta);
    }
    in.hash = metadata_hash(in.meta);
    return in;
}

Metadata derived_header(const fs::path& input, const Input& in, std::string_view task) {
    Metadata h = provenance("analyze");
    h["task"] = std::string(task);
    h["input"] = input.filename().string();
    h["input_hash"] = in.hash;
    return h;
}

/// Threshold in the units of the stored series; x-space thresholds are mapped
/// through to_y for y trajectories.
double series_threshold(const Input& in, std::optional<double> raw, std::optional<double> in_x) {
    if (raw) return *raw;
    detail::require(in_x.has_value(), "a threshold is required (--threshold or --threshold-x)");
    detail::require(*in_x > 0.0 && *in_x < 1.0, "--threshold-x must lie in (0, 1)");
    const auto it = in.meta.find("burstlab.kind");
    const auto kind = it != in.meta.end() ? it->second : (in.meta.count("kind") ? in.meta.at("kind") : "");
    return kind == "sde-y" ? to_y(*in_x) : *in_x;
}

std::string record(const PowerLawFit& f) {
    std::ostringstream os;
    os << "exponent=" << fmt(f.exponent) << "\nstd_error=" << fmt(f.std_error) << "\nintercept=" << fmt(f.intercept)
       << "\nfit_lo=" << fmt(f.fit_lo) << "\nfit_hi=" << fmt(f.fit_hi) << "\nn_points=" << f.n_points << "\n";
    return os.str();
}

struct AnalyzeOptions {
    std::string task;
    std::vector<std::string> inputs;
    std::size_t segments = 16;
    int bins_per_decade = 8;
    std::optional<double> threshold;
    std::optional<double> threshold_x;
    std::vector<double> window;
    std::string out;
    bool pdfs = false;
};

fs::path output_for(const AnalyzeOptions& o, const fs::path& input, std::string_view suffix) {
    if (!o.out.empty() && o.inputs.size() == 1) return o.out;
    const fs::path dir = o.out.empty() ? input.parent_path() : fs::path(o.out);
    return dir / (input.stem().string() + "." + std::string(suffix) + ".csv");
}

std::optional<FitWindow> window_of(const std::vector<double>& w) {
    if (w.empty()) return std::nullopt;
    detail::require(w.size() == 2 && w[0] > 0.0 && w[1] > w[0], "--window needs two values 0 < lo < hi");
    return FitWindow{w[0], w[1]};
}

PowerLawFit fit_table(const fs::path& p, FitWindow w) {
    std::vector<std::string> cols;
    const auto rows = read_table_csv(p, &cols);
    if (cols.size() >= 2 && cols[0] == "freq" && cols[1] == "power") {
        PsdEstimate psd;
        for (const auto& r : rows) {
            psd.freqs.push_back(r[0]);
            psd.power.push_back(r[1]);
        }
        return fit_powerlaw(psd, w);
    }
    if (cols.size() >= 3 && cols[0] == "bin_lo" && cols[1] == "bin_hi" && cols[2] == "density") {
        LogBinnedPdf pdf;
        for (const auto& r : rows) {
            pdf.bin_lo.push_back(r[0]);
            pdf.bin_hi.push_back(r[1]);
            pdf.density.push_back(r[2]);
            pdf.count.push_back(r.size() > 3 ? static_cast<std::uint64_t>(r[3]) : (r[2] > 0.0 ? 1u : 0u));
        }
        return fit_powerlaw(pdf, w);
    }
    throw IoError(p.string() + ": expected a PSD (freq,power) or PDF (bin_lo,bin_hi,density,...) table");
}

int cmd_analyze(const AnalyzeOptions& o) {
    const auto window = window_of(o.window);
    for (const auto& name : o.inputs) {
        const fs::path input(name);
        if (o.task == "fit") {
            if (!fs::exists(input)) throw IoError(input.string() + ": no such file");
            const PowerLawFit f = fit_table(input, window.value_or(FitWindow{}));
            const std::string rec = record(f);
            std::cout << "input=" << input.string() << "\n" << rec;
            if (!o.out.empty()) {
                Metadata m = provenance("analyze");
                std::istringstream is(rec);
                merge(m, parse_key_values(is));
                m["input"] = input.filename().string();
                write_key_values(output_for(o, input, "fit"), m);
            }
            continue;
        }

        const Input in = load_input(input);
        Metadata header = derived_header(input, in, o.task);
        if (o.task == "psd") {
            const PsdEstimate psd = estimate_psd(in.series, o.segments);
            header["segments"] = std::to_string(o.segments);
            if (window) {
                const PowerLawFit f = fit_powerlaw(psd, *window, o.bins_per_decade);
                header["fit_exponent"] = fmt(f.exponent);
                header["fit_std_error"] = fmt(f.std_error);
                std::cout << "input=" << input.string() << "\n" << record(f);
            }
            const auto out = output_for(o, input, "psd");
            write_psd_csv(out, psd, header);
            std::cout << out.string() << "\n";
        } else if (o.task == "pdf") {
            const LogBinnedPdf pdf = log_binned_pdf(in.series.view(), o.bins_per_decade);
            const auto out = output_for(o, input, "pdf");
            write_pdf_csv(out, pdf, header);
            std::cout << out.string() << "\n";
        } else if (o.task == "bursts") {
            const double h = series_threshold(in, o.threshold, o.threshold_x);
            header["threshold"] = fmt(h);
            const auto d = extract_durations(in.series, h);
            const auto out = output_for(o, input, "bursts");
            write_durations_csv(out, d, header);
            std::cout << out.string() << "\n";
            if (o.pdfs) {
                for (DurationKind k : {DurationKind::Burst, DurationKind::InterBurst}) {
                    const auto pdf = duration_pdf(d, k, o.bins_per_decade);
                    auto p = out;
                    p.replace_extension();
                    p += "." + std::string(to_string(k)) + "_pdf.csv";
                    write_pdf_csv(p, pdf, header);
                    std::cout << p.string() << "\n";
                }
            }
        } else {
            throw ConfigError("unknown analyze task '" + o.task + "'");
        }
    }
    return kOk;
}

// ---------------------------------------------------------------------------
// classify

struct ClassifyOptions {
    std::vector<std::string> inputs;
    ClassifierConfig cfg;
    std::vector<double> thresholds;
    std::vector<double> thresholds_x;
    bool json = false;
};

int cmd_classify(const ClassifyOptions& o) {
    nlohmann::json all = nlohmann::json::array();
    for (const auto& name : o.inputs) {
        const Input in = load_input(name);
        std::vector<double> th = o.thresholds;
        for (double hx : o.thresholds_x) th.push_back(series_threshold(in, std::nullopt, hx));
        const ClassifierVerdict v = classify(in.series, th, o.cfg);
        if (o.json) {
            nlohmann::json j = to_json(v);
            j["input"] = name;
            j["input_hash"] = in.hash;
            all.push_back(std::move(j));
        } else {
            std::cout << "input=" << name << "\ninput_hash=" << in.hash << "\n" << to_text(v) << "\n";
        }
    }
    if (o.json) std::cout << (all.size() == 1 ? all[0] : all).dump(2) << "\n";
    return kOk;
}

// ---------------------------------------------------------------------------
// reproduce

struct ReproduceOptions {
    std::string figure;
    std::string out = "figures";
    std::uint64_t seed = 1;
    unsigned jobs = 1;
    double scale = 1.0;
};

/// Amplitude making c * x^-e pass through the data in the geometric least-squares
/// sense over [lo, hi].
double anchor(const std::vector<double>& xs, const std::vector<double>& ys, double e, FitWindow w) {
    double s = 0.0;
    int n = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < w.lo || xs[i] > w.hi || !(ys[i] > 0.0)) continue;
        s += std::log(ys[i]) + e * std::log(xs[i]);
        ++n;
    }
    return n ? std::exp(s / n) : 1.0;
}

void write_psd_with_overlay(const fs::path& p, const PsdEstimate& psd, double beta, FitWindow w, Metadata h) {
    const double c = anchor(psd.freqs, psd.power, beta, w);
    std::vector<std::vector<double>> rows;
    rows.reserve(psd.freqs.size());
    for (std::size_t i = 0; i < psd.freqs.size(); ++i)
        rows.push_back({psd.freqs[i], psd.power[i], c * std::pow(psd.freqs[i], -beta)});
    h["overlay"] = "f^-" + fmt(beta);
    write_table_csv(p, {"freq", "power", "overlay"}, rows, h);
}

template <class Overlay>
void write_pdf_with_overlay(const fs::path& p, const LogBinnedPdf& pdf, Overlay&& overlay, Metadata h) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < pdf.size(); ++i)
        rows.push_back({pdf.bin_lo[i], pdf.bin_hi[i], pdf.center(i), pdf.density[i], static_cast<double>(pdf.count[i]),
                        overlay(pdf.center(i))});
    write_table_csv(p, {"bin_lo", "bin_hi", "center", "density", "count", "overlay"}, rows, h);
}

/// Power-law overlay anchored on the PDF over a window.
auto power_overlay(const LogBinnedPdf& pdf, double e, FitWindow w) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < pdf.size(); ++i) {
        xs.push_back(pdf.center(i));
        ys.push_back(pdf.density[i]);
    }
    const double c = anchor(xs, ys, e, w);
    return [c, e](double x) { return c * std::pow(x, -e); };
}

void write_excerpt(const fs::path& p, const TimeSeries& s, double t_span, const char* name, Metadata h) {
    const std::size_t n = std::min(s.size(), static_cast<std::size_t>(t_span / s.dt) + 1);
    const std::size_t stride = std::max<std::size_t>(1, n / 20000);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < n; i += stride) rows.push_back({s.time_at(i), s.values[i]});
    write_table_csv(p, {"t", name}, rows, h);
}

/// Summary tables record NaN for runs too short to fit.
double exponent_or_nan(const LogBinnedPdf& pdf, FitWindow w) {
    try {
        return fit_powerlaw(pdf, w).exponent;
    } catch (const InsufficientDataError&) {
        return NAN;
    } catch (const ConfigError&) {
        return NAN;
    }
}

ModelParams symmetric(double eps) {
    ModelParams p;
    p.eps1 = p.eps2 = eps;
    p.alpha = 2.0;
    return p;
}

SdeConfig figure_sde(double y_bound, double grid, double t_total, std::uint64_t seed) {
    SdeConfig c;
    c.y_min = 1.0 / y_bound;
    c.y_max = y_bound;
    c.grid_dt = grid;
    c.t_total = t_total;
    c.seed = seed;
    return c;
}

Metadata run_meta(std::string_view fig, const ModelParams& p, const SdeConfig& c) {
    Metadata m = provenance("reproduce");
    m["figure"] = std::string(fig);
    merge(m, model_meta(p));
    merge(m, sde_meta(c));
    m["seed"] = std::to_string(c.seed);
    return m;
}

void reproduce_fig12(const ReproduceOptions& o) {
    const ModelParams p = symmetric(0.0);
    const SdeConfig c = figure_sde(1e4, 1e-4, std::max(1.0, 10.0 * o.scale), o.seed);
    const TimeSeries y = simulate_y(p, c);
    const TimeSeries x = map_values(y, [](double v) { return from_y(v); });
    const Metadata m = run_meta("fig1,fig2", p, c);
    const fs::path d1 = fs::path(o.out) / "fig1", d2 = fs::path(o.out) / "fig2";

    write_excerpt(d1 / "x_excerpt.csv", x, 1.0, "x", m);
    {
        constexpr int bins = 50;
        std::vector<double> count(bins, 0.0);
        for (double v : x.values) count[std::min(bins - 1, static_cast<int>(v * bins))] += 1.0;
        std::vector<std::vector<double>> rows;
        for (int i = 0; i < bins; ++i) {
            const double mid = (i + 0.5) / bins;
            rows.push_back({mid, count[static_cast<std::size_t>(i)] * bins / static_cast<double>(x.size()), stationary_pdf_x(mid, p)});
        }
        Metadata h = m;
        h["overlay"] = "Beta(2,2)";
        write_table_csv(d1 / "x_pdf.csv", {"x", "density", "overlay"}, rows, h);
    }
    write_psd_with_overlay(d1 / "x_psd.csv", estimate_psd(x, 16), 2.0, {100.0, 1000.0}, m);

    write_excerpt(d2 / "y_excerpt.csv", y, 1.0, "y", m);
    const LogBinnedPdf ypdf = log_binned_pdf(y.view(), 8);
    Metadata hy = m;
    hy["overlay"] = "y^-3";
    write_pdf_with_overlay(d2 / "y_pdf.csv", ypdf, power_overlay(ypdf, 3.0, {10.0, 1000.0}), hy);
    write_psd_with_overlay(d2 / "y_psd.csv", estimate_psd(y, 16), 1.0, {10.0, 1000.0}, m);
}

void reproduce_fig4(const ReproduceOptions& o) {
    const fs::path dir = fs::path(o.out) / "fig4";
    const std::vector<double> eps{0.6, 1.2, 1.8, 2.4, 3.0};
    const std::vector<double> hurst{0.1, 0.2, 0.3, 0.4, 0.5};
    std::vector<std::vector<double>> summary(eps.size() + hurst.size());

    run_parallel(summary.size(), o.jobs, [&](std::size_t i) {
        if (i < eps.size()) {
            const ModelParams p = symmetric(eps[i]);
            const double grid = 1e-6;
            const SdeConfig c = figure_sde(1e3, grid, std::max(0.1, 10.0 * o.scale), o.seed + i);
            const TimeSeries y = simulate_y(p, c);
            const EffectiveParams ep = effective_params(p);
            Metadata m = run_meta("fig4", p, c);
            m["threshold_y"] = "1";
            const std::string tag = "sde_eps" + fmt(eps[i]);
            const PsdEstimate psd = estimate_psd(y, 16);
            write_psd_with_overlay(dir / (tag + "_psd.csv"), psd, ep.beta, {10.0, 1000.0}, m);
            const auto b = durations_of(extract_durations(y, 1.0), DurationKind::Burst);
            const LogBinnedPdf pdf = log_binned_pdf(b, 8);
            const BurstAsymptotics a = burst_asymptotics(1.0, ep);
            const FitWindow w = duration_fit_window(b, grid, a.cutoff_time);
            std::vector<double> xs, ys;
            for (std::size_t k = 0; k < pdf.size(); ++k) {
                xs.push_back(pdf.center(k));
                ys.push_back(pdf.density[k] / theoretical_burst_pdf(pdf.center(k), 1.0, ep));
            }
            const double amp = anchor(xs, ys, 0.0, w);
            Metadata h = m;
            h["overlay"] = "T^-3/2 then exp cutoff";
            h["cutoff_time"] = fmt(a.cutoff_time);
            write_pdf_with_overlay(dir / (tag + "_burst_pdf.csv"), pdf,
                                   [&](double t) { return amp * theoretical_burst_pdf(t, 1.0, ep); }, h);
            const double f = exponent_or_nan(pdf, w);
            summary[i] = {0.0, eps[i], ep.hurst, ep.beta, fit_powerlaw(psd, {10.0, 1000.0}).exponent, f,
                          static_cast<double>(b.size())};
        } else {
            const std::size_t k = i - eps.size();
            FbmConfig fc;
            fc.hurst = hurst[k];
            fc.gamma_damp = 2.0;
            fc.dt = 1e-4;
            fc.n_steps = std::max<std::int64_t>(1 << 12, static_cast<std::int64_t>((1 << 21) * o.scale));
            fc.seed = o.seed + i;
            const FbmRun run = simulate_fbm_biased_run(fc);
            Metadata m = provenance("reproduce");
            m["figure"] = "fig4";
            merge(m, fbm_meta(fc));
            m["seed"] = std::to_string(fc.seed);
            m["clipped_fraction"] = fmt(run.clipped_fraction);
            const std::string tag = "fbm_H" + fmt(hurst[k]);
            const PsdEstimate psd = estimate_psd(run.series, 16);
            const double beta = 2.0 * hurst[k] + 1.0;
            write_psd_with_overlay(dir / (tag + "_psd.csv"), psd, beta, {1.0, 100.0}, m);
            const auto b = durations_of(extract_durations(run.series, 0.0), DurationKind::Burst);
            const LogBinnedPdf pdf = log_binned_pdf(b, 8);
            const FitWindow w = duration_fit_window(b, fc.dt, std::nullopt);
            Metadata h = m;
            h["overlay"] = "T^-(2-H)";
            write_pdf_with_overlay(dir / (tag + "_burst_pdf.csv"), pdf, power_overlay(pdf, 2.0 - hurst[k], w), h);
            const double f = exponent_or_nan(pdf, w);
            summary[i] = {1.0, hurst[k], hurst[k], beta, fit_powerlaw(psd, {1.0, 100.0}).exponent, f,
                          static_cast<double>(b.size())};
        }
    });
    Metadata m = provenance("reproduce");
    m["figure"] = "fig4";
    m["columns"] = "is_fbm: 0 sde, 1 fbm; param: eps2 or H";
    write_table_csv(dir / "summary.csv", {"is_fbm", "param", "hurst", "beta_theory", "psd_slope", "burst_exponent", "n_bursts"},
                    summary, m);
}

void reproduce_fig5(const ReproduceOptions& o) {
    const fs::path dir = fs::path(o.out) / "fig5";
    const ModelParams p = symmetric(0.0);
    const double grid = 1e-7;
    const SdeConfig c = figure_sde(1e3, grid, std::max(0.1, 2.0 * o.scale), o.seed);
    const TimeSeries y = simulate_y(p, c);
    const Metadata m = run_meta("fig5", p, c);
    const std::vector<double> levels{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    std::vector<std::vector<double>> summary(levels.size());
    run_parallel(levels.size(), o.jobs, [&](std::size_t i) {
        const double hx = levels[i];
        const auto d = extract_durations(y, to_y(hx));
        Metadata h = m;
        h["threshold_x"] = fmt(hx);
        h["overlay"] = "T^-3/2";
        summary[i] = {hx, NAN, NAN};
        for (DurationKind k : {DurationKind::Burst, DurationKind::InterBurst}) {
            const auto v = durations_of(d, k);
            if (v.empty()) {
                std::cerr << "warning: no " << to_string(k) << " durations at h_x=" << hx << "\n";
                continue;
            }
            const LogBinnedPdf pdf = log_binned_pdf(v, 8);
            const FitWindow w = duration_fit_window(v, grid, std::nullopt);
            const std::string name = "hx" + fmt(hx) + "_" + std::string(to_string(k)) + "_pdf.csv";
            write_pdf_with_overlay(dir / name, pdf, power_overlay(pdf, 1.5, w), h);
            summary[i][k == DurationKind::Burst ? 1 : 2] = exponent_or_nan(pdf, w);
        }
    });
    write_table_csv(dir / "summary.csv", {"threshold_x", "burst_exponent", "interburst_exponent"}, summary, m);
}

int cmd_reproduce(const ReproduceOptions& o) {
    detail::require(o.scale > 0.0 && o.scale <= 100.0, "--scale must lie in (0, 100]");
    if (o.figure == "fig1" || o.figure == "fig2")
        reproduce_fig12(o);
    else if (o.figure == "fig4")
        reproduce_fig4(o);
    else if (o.figure == "fig5")
        reproduce_fig5(o);
    else
        throw ConfigError("unknown figure '" + o.figure + "'");
    std::cout << (fs::path(o.out)).string() << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"burstlab: burst statistics of herding-model SDEs and fractional Brownian motion"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", BURSTLAB_VERSION);
    std::string config;
    app.add_option("--config", config, "flat key=value file; command-line values take precedence")->check(CLI::ExistingFile);

    SimOptions sim;
    std::string sim_kind;
    auto* simulate = app.add_subcommand("simulate", "simulate trajectories");
    simulate->add_option("kind", sim_kind, "sde-x | sde-y | agents | fbm")->required()->check(CLI::IsMember({"sde-x", "sde-y", "agents", "fbm"}));
    add_model_options(simulate, sim.model);
    add_sde_options(simulate, sim.sde);
    add_fbm_options(simulate, sim.fbm);
    simulate->add_option("--seed", sim.seed, "first seed (default from BURSTLAB_SEED, else 1)");
    simulate->add_option("--ensemble", sim.ensemble, "number of seeds")->capture_default_str();
    simulate->add_option("--jobs", sim.jobs, "concurrent ensemble members")->capture_default_str();
    simulate->add_option("--format", sim.format, "csv | binary")->capture_default_str();
    simulate->add_option("--out", sim.out, "output directory")->capture_default_str();

    AnalyzeOptions an;
    auto* analyze = app.add_subcommand("analyze", "PSD, PDF, burst durations or power-law fits");
    analyze->add_option("task", an.task, "psd | pdf | bursts | fit")->required()->check(CLI::IsMember({"psd", "pdf", "bursts", "fit"}));
    analyze->add_option("inputs", an.inputs, "input files")->required();
    analyze->add_option("--segments", an.segments, "PSD segments")->capture_default_str();
    analyze->add_option("--bins-per-decade", an.bins_per_decade)->capture_default_str();
    analyze->add_option("--threshold", an.threshold, "threshold in the series' own units");
    analyze->add_option("--threshold-x", an.threshold_x, "threshold in x units, mapped for y trajectories");
    analyze->add_option("--window", an.window, "fit window lo hi")->expected(2);
    analyze->add_option("--out", an.out, "output file (one input) or directory");
    analyze->add_flag("--pdfs", an.pdfs, "bursts: also write burst and inter-burst PDFs");

    ClassifyOptions cl;
    auto* classify_cmd = app.add_subcommand("classify", "label the memory signature of trajectories");
    classify_cmd->add_option("inputs", cl.inputs, "trajectory files")->required();
    classify_cmd->add_option("--tol", cl.cfg.tol, "half-width of the 3/2 band")->capture_default_str();
    classify_cmd->add_option("--n-min", cl.cfg.n_min, "bursts required")->capture_default_str();
    classify_cmd->add_option("--stderr-max", cl.cfg.stderr_max)->capture_default_str();
    classify_cmd->add_option("--thresholds", cl.thresholds, "thresholds in series units (default: quantiles)");
    classify_cmd->add_option("--thresholds-x", cl.thresholds_x, "thresholds in x units");
    classify_cmd->add_flag("--json", cl.json, "JSON output");

    ReproduceOptions rp;
    auto* reproduce = app.add_subcommand("reproduce", "write the data and overlay curves of a figure");
    reproduce->add_option("figure", rp.figure, "fig1 | fig2 | fig4 | fig5")->required()->check(CLI::IsMember({"fig1", "fig2", "fig4", "fig5"}));
    reproduce->add_option("--out", rp.out, "output directory")->capture_default_str();
    reproduce->add_option("--seed", rp.seed, "base seed (default from BURSTLAB_SEED, else 1)");
    reproduce->add_option("--jobs", rp.jobs, "concurrent runs")->capture_default_str();
    reproduce->add_option("--scale", rp.scale, "multiplies run lengths")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        if (!config.empty()) apply_config(sub, config);
        apply_env_seed(sub);
        if (sub == simulate) return cmd_simulate(sim_kind, sim);
        if (sub == analyze) return cmd_analyze(an);
        if (sub == classify_cmd) return cmd_classify(cl);
        if (sub == reproduce) return cmd_reproduce(rp);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntime;
    }
    return kRuntime;
}
