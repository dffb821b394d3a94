#pragma once

#include <burstlab/binning.hpp>
#include <burstlab/burst_theory.hpp>
#include <burstlab/durations.hpp>
#include <burstlab/error.hpp>
#include <burstlab/powerlaw.hpp>
#include <burstlab/psd.hpp>
#include <burstlab/series.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

namespace burstlab {

enum class MemoryLabel { Spurious, TrueLongMemory, Inconclusive };

inline std::string_view to_string(MemoryLabel l) noexcept {
    switch (l) {
        case MemoryLabel::Spurious: return "Spurious";
        case MemoryLabel::TrueLongMemory: return "TrueLongMemory";
        case MemoryLabel::Inconclusive: return "Inconclusive";
    }
    return "Inconclusive";
}

struct ClassifierConfig {
    double tol = 0.1;                 ///< half-width of the band around 3/2
    std::size_t n_min = 10000;        ///< bursts required, pooled over thresholds
    double stderr_max = 0.05;
    int bins_per_decade = 8;
    std::vector<double> quantiles{0.6, 0.7, 0.8};  ///< default thresholds when none are given
    DurationWindowRule window{};
    std::size_t psd_segments = 16;
    double h_agreement = 0.1;         ///< |h_from_duration - h_from_psd| counted as agreement

    void validate() const {
        detail::require(tol > 0.0 && tol < 0.5, "ClassifierConfig: tol must lie in (0, 0.5)");
        detail::require(stderr_max > 0.0, "ClassifierConfig: stderr_max must be > 0");
        detail::require(bins_per_decade >= 1, "ClassifierConfig: bins_per_decade must be >= 1");
        detail::require(psd_segments >= 1, "ClassifierConfig: psd_segments must be >= 1");
        for (double q : quantiles) detail::require(q > 0.0 && q < 1.0, "ClassifierConfig: quantiles must lie in (0, 1)");
    }
};

/// Fit at a single threshold.
struct ThresholdFit {
    double threshold = 0.0;
    std::size_t n_bursts = 0;
    std::optional<PowerLawFit> burst;
    std::optional<PowerLawFit> interburst;
    bool pooled = false;      ///< burst and inter-burst fits agreed and were combined
    bool asymmetric = false;  ///< they disagreed; the burst fit was used alone
    double exponent = NAN;
    double std_error = NAN;
};

struct ClassifierVerdict {
    MemoryLabel label = MemoryLabel::Inconclusive;
    std::string reason;
    double exponent_est = NAN;
    double exponent_stderr = NAN;
    std::optional<double> h_from_duration;
    std::optional<double> h_from_psd;
    std::optional<double> psd_beta;
    std::optional<bool> h_agree;
    std::size_t n_bursts = 0;
    std::vector<double> thresholds_used;
    std::vector<ThresholdFit> per_threshold;
    double tol = 0.1;
};

/// Nearest-rank quantile.
inline double quantile_nearest_rank(std::vector<double> v, double q) {
    if (v.empty()) throw InsufficientDataError("quantile: empty input");
    const auto n = static_cast<double>(v.size());
    const auto k = static_cast<std::size_t>(std::clamp(std::ceil(q * n) - 1.0, 0.0, n - 1.0));
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

namespace detail {

inline std::optional<PowerLawFit> fit_kind(std::span<const double> d, double grid_dt, const ClassifierConfig& cfg) {
    if (d.size() < 100) return std::nullopt;
    try {
        const FitWindow w = duration_fit_window(d, grid_dt, std::nullopt, cfg.window);
        if (!(w.lo < w.hi)) return std::nullopt;
        return fit_powerlaw(log_binned_pdf(d, cfg.bins_per_decade), w);
    } catch (const InsufficientDataError&) {
        return std::nullopt;
    }
}

inline std::pair<double, double> inverse_variance(std::span<const double> e, std::span<const double> se) {
    double sw = 0.0, swe = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        const double w = 1.0 / std::max(se[i] * se[i], 1e-12);
        sw += w;
        swe += w * e[i];
    }
    return {swe / sw, 1.0 / std::sqrt(sw)};
}

inline ThresholdFit fit_threshold(const TimeSeries& s, double h, const ClassifierConfig& cfg) {
    ThresholdFit tf;
    tf.threshold = h;
    const auto d = extract_durations(s, h);
    const auto b = durations_of(d, DurationKind::Burst);
    const auto ib = durations_of(d, DurationKind::InterBurst);
    tf.n_bursts = b.size();
    tf.burst = fit_kind(b, s.dt, cfg);
    tf.interburst = fit_kind(ib, s.dt, cfg);
    if (!tf.burst) return tf;
    tf.exponent = tf.burst->exponent;
    tf.std_error = tf.burst->std_error;
    if (tf.interburst) {
        const double gap = std::abs(tf.burst->exponent - tf.interburst->exponent);
        const double band = 2.0 * std::hypot(tf.burst->std_error, tf.interburst->std_error);
        if (gap <= band) {
            const double e[2] = {tf.burst->exponent, tf.interburst->exponent};
            const double se[2] = {tf.burst->std_error, tf.interburst->std_error};
            std::tie(tf.exponent, tf.std_error) = inverse_variance(e, se);
            tf.pooled = true;
        } else {
            tf.asymmetric = true;
        }
    }
    return tf;
}

inline void psd_estimate(const TimeSeries& s, const ClassifierConfig& cfg, ClassifierVerdict& v) {
    try {
        const PsdEstimate psd = estimate_psd(s, cfg.psd_segments);
        const double df = frequency_step(psd);
        const double nyq = 0.5 / s.dt;
        const FitWindow w{10.0 * df, 0.1 * nyq};
        if (!(w.lo < w.hi)) return;
        const PowerLawFit f = fit_powerlaw(psd, w);
        v.psd_beta = f.exponent;
        if (hurst_beta_in_range(f.exponent)) v.h_from_psd = hurst_from_beta(f.exponent);
    } catch (const InsufficientDataError&) {
    } catch (const ConfigError&) {
    }
}

}  // namespace detail

/// Classifies the memory signature of `s` from its burst-duration exponent. An empty
/// threshold list selects the configured quantiles of the series.
inline ClassifierVerdict classify(const TimeSeries& s, std::span<const double> thresholds, const ClassifierConfig& cfg = {}) {
    cfg.validate();
    ClassifierVerdict v;
    v.tol = cfg.tol;
    if (s.size() < 2) {
        v.reason = "series has fewer than 2 samples";
        return v;
    }
    if (thresholds.empty()) {
        for (double q : cfg.quantiles) v.thresholds_used.push_back(quantile_nearest_rank(s.values, q));
    } else {
        v.thresholds_used.assign(thresholds.begin(), thresholds.end());
    }

    std::vector<double> e, se;
    for (double h : v.thresholds_used) {
        ThresholdFit tf = detail::fit_threshold(s, h, cfg);
        v.n_bursts += tf.n_bursts;
        if (std::isfinite(tf.exponent)) {
            e.push_back(tf.exponent);
            se.push_back(tf.std_error);
        }
        v.per_threshold.push_back(std::move(tf));
    }
    detail::psd_estimate(s, cfg, v);

    if (v.n_bursts < cfg.n_min) {
        v.reason = "only " + std::to_string(v.n_bursts) + " bursts, need " + std::to_string(cfg.n_min);
        return v;
    }
    if (e.empty()) {
        v.reason = "no threshold produced a usable fit";
        return v;
    }
    std::tie(v.exponent_est, v.exponent_stderr) = detail::inverse_variance(e, se);
    const double h = 2.0 - v.exponent_est;
    if (h > 0.0 && h < 1.0) v.h_from_duration = h;
    if (v.h_from_duration && v.h_from_psd) v.h_agree = std::abs(*v.h_from_duration - *v.h_from_psd) <= cfg.h_agreement;

    if (v.exponent_stderr > cfg.stderr_max) {
        v.reason = "exponent stderr above stderr_max";
        return v;
    }
    if (std::abs(v.exponent_est - 1.5) <= cfg.tol) {
        v.label = MemoryLabel::Spurious;
        v.reason = "exponent within tol of 3/2";
    } else if (v.exponent_est >= 1.5 + cfg.tol && v.exponent_est < 2.0) {
        v.label = MemoryLabel::TrueLongMemory;
        v.reason = "exponent in [3/2 + tol, 2)";
    } else {
        v.reason = "exponent outside both decision bands";
    }
    return v;
}

inline ClassifierVerdict classify(const TimeSeries& s, const ClassifierConfig& cfg = {}) {
    return classify(s, std::span<const double>{}, cfg);
}

namespace detail {

inline std::string fmt_double(double x) {
    if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

}  // namespace detail

/// Flat key=value report, one pair per line.
inline std::string to_text(const ClassifierVerdict& v) {
    using detail::fmt_double;
    std::string out;
    const auto kv = [&](std::string_view k, const std::string& val) {
        out.append(k).append("=").append(val).append("\n");
    };
    kv("label", std::string(to_string(v.label)));
    kv("reason", v.reason);
    kv("exponent_est", fmt_double(v.exponent_est));
    kv("exponent_stderr", fmt_double(v.exponent_stderr));
    kv("tol", fmt_double(v.tol));
    kv("h_from_duration", v.h_from_duration ? fmt_double(*v.h_from_duration) : "none");
    kv("h_from_psd", v.h_from_psd ? fmt_double(*v.h_from_psd) : "none");
    kv("psd_beta", v.psd_beta ? fmt_double(*v.psd_beta) : "none");
    kv("h_agree", v.h_agree ? (*v.h_agree ? "true" : "false") : "none");
    kv("n_bursts", std::to_string(v.n_bursts));
    std::string th;
    for (std::size_t i = 0; i < v.thresholds_used.size(); ++i) th += (i ? "," : "") + fmt_double(v.thresholds_used[i]);
    kv("thresholds_used", th);
    bool asym = false;
    for (const auto& t : v.per_threshold) asym = asym || t.asymmetric;
    kv("burst_interburst_asymmetry", asym ? "true" : "false");
    return out;
}

/// Same fields as to_text plus the per-threshold fits, as a JSON object.
inline nlohmann::json to_json(const ClassifierVerdict& v) {
    const auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
    const auto opt = [](const auto& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
    nlohmann::json j{
        {"label", to_string(v.label)},
        {"reason", v.reason},
        {"exponent_est", num(v.exponent_est)},
        {"exponent_stderr", num(v.exponent_stderr)},
        {"tol", v.tol},
        {"h_from_duration", opt(v.h_from_duration)},
        {"h_from_psd", opt(v.h_from_psd)},
        {"psd_beta", opt(v.psd_beta)},
        {"h_agree", opt(v.h_agree)},
        {"n_bursts", v.n_bursts},
        {"thresholds_used", v.thresholds_used},
    };
    auto& per = j["per_threshold"] = nlohmann::json::array();
    for (const auto& t : v.per_threshold) {
        per.push_back({
            {"threshold", t.threshold},
            {"n_bursts", t.n_bursts},
            {"burst_exponent", t.burst ? num(t.burst->exponent) : nlohmann::json(nullptr)},
            {"interburst_exponent", t.interburst ? num(t.interburst->exponent) : nlohmann::json(nullptr)},
            {"exponent", num(t.exponent)},
            {"std_error", num(t.std_error)},
            {"pooled", t.pooled},
            {"asymmetric", t.asymmetric},
        });
    }
    return j;
}

}  // namespace burstlab
