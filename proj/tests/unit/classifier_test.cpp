#include <burstlab/classifier.hpp>
#include <burstlab/fbm.hpp>
#include <burstlab/model.hpp>
#include <burstlab/sde.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace burstlab;

namespace {

const TimeSeries& sde_series() {
    static const TimeSeries s = [] {
        ModelParams p;
        p.eps1 = p.eps2 = 1.2;
        SdeConfig c;
        c.t_total = 6.0;
        c.grid_dt = 1e-6;
        c.y_min = 1e-3;
        c.y_max = 1e3;
        c.seed = 3;
        return simulate_y(p, c);
    }();
    return s;
}

const TimeSeries& fbm_series() {
    static const TimeSeries s = [] {
        FbmConfig c;
        c.hurst = 0.2;
        c.gamma_damp = 2.0;
        c.dt = 1e-4;
        c.n_steps = 1 << 21;
        c.seed = 4;
        return simulate_fbm_biased(c);
    }();
    return s;
}

}  // namespace

TEST(Quantile, NearestRank) {
    const std::vector<double> v{5, 1, 4, 2, 3};
    EXPECT_EQ(quantile_nearest_rank(v, 0.6), 3.0);
    EXPECT_EQ(quantile_nearest_rank(v, 0.61), 4.0);
    EXPECT_EQ(quantile_nearest_rank(v, 1e-9), 1.0);
    EXPECT_THROW(quantile_nearest_rank({}, 0.5), InsufficientDataError);
}

TEST(Classify, ConstantSeriesIsInconclusive) {
    const TimeSeries s{0.0, 1.0, std::vector<double>(100000, 2.0)};
    const auto v = classify(s);
    EXPECT_EQ(v.label, MemoryLabel::Inconclusive);
    EXPECT_EQ(v.n_bursts, 0u);
    EXPECT_FALSE(v.reason.empty());
    EXPECT_FALSE(v.h_from_duration.has_value());
}

TEST(Classify, ShortSeriesIsInconclusive) {
    const TimeSeries s{0.0, 1.0, {0.1, 0.9, 0.2, 0.8, 0.3, 0.7, 0.1, 0.9, 0.2, 0.8}};
    const auto v = classify(s);
    EXPECT_EQ(v.label, MemoryLabel::Inconclusive);
    EXPECT_NE(v.reason.find("bursts"), std::string::npos);
}

TEST(Classify, SdeSeriesIsSpurious) {
    const auto v = classify(sde_series());
    EXPECT_EQ(v.label, MemoryLabel::Spurious) << to_text(v);
    EXPECT_NEAR(v.exponent_est, 1.5, 0.1);
    EXPECT_EQ(v.thresholds_used.size(), 3u);
    EXPECT_GE(v.n_bursts, 10000u);
}

TEST(Classify, FbmSeriesIsTrueLongMemory) {
    const auto v = classify(fbm_series());
    EXPECT_EQ(v.label, MemoryLabel::TrueLongMemory) << to_text(v);
    ASSERT_TRUE(v.h_from_duration.has_value());
    EXPECT_NEAR(*v.h_from_duration, 0.2, 0.1);
}

TEST(Classify, InvariantUnderRescaling) {
    const auto& s = sde_series();
    const auto base = classify(s);
    for (double c : {8.0, 0.3}) {
        const auto scaled = map_values(s, [c](double v) { return c * v; });
        std::vector<double> th;
        for (double h : base.thresholds_used) th.push_back(c * h);
        const auto v = classify(scaled, th);
        EXPECT_EQ(v.label, base.label);
        EXPECT_NEAR(v.exponent_est, base.exponent_est, 1e-6) << "c=" << c;
        EXPECT_EQ(v.n_bursts, base.n_bursts);
    }
}

TEST(Classify, InvariantUnderModelTransform) {
    const auto& y = sde_series();
    const auto x = map_values(y, [](double v) { return from_y(v); });
    const double hx[] = {0.4, 0.5, 0.6};
    const double hy[] = {to_y(0.4), to_y(0.5), to_y(0.6)};
    const auto vx = classify(x, hx);
    const auto vy = classify(y, hy);
    EXPECT_EQ(vx.label, vy.label);
    EXPECT_EQ(vx.n_bursts, vy.n_bursts);
    EXPECT_NEAR(vx.exponent_est, vy.exponent_est, 0.02);
}

TEST(Classify, RecordsBothHurstEstimates) {
    const auto v = classify(fbm_series());
    EXPECT_TRUE(v.psd_beta.has_value());
    if (v.h_from_psd && v.h_from_duration) {
        ASSERT_TRUE(v.h_agree.has_value());
        EXPECT_EQ(*v.h_agree, std::abs(*v.h_from_psd - *v.h_from_duration) <= 0.1);
    }
}

TEST(Classify, StrictStderrCapMakesInconclusive) {
    ClassifierConfig cfg;
    cfg.stderr_max = 1e-6;
    const auto v = classify(sde_series(), cfg);
    EXPECT_EQ(v.label, MemoryLabel::Inconclusive);
    EXPECT_TRUE(std::isfinite(v.exponent_est));
}

TEST(Classify, ConfigValidation) {
    ClassifierConfig cfg;
    cfg.tol = 0.0;
    EXPECT_THROW(classify(sde_series(), cfg), ConfigError);
    cfg = ClassifierConfig{};
    cfg.quantiles = {1.5};
    EXPECT_THROW(classify(sde_series(), cfg), ConfigError);
}

TEST(Classify, Serialization) {
    const auto v = classify(sde_series());
    const std::string text = to_text(v);
    EXPECT_NE(text.find("label=Spurious\n"), std::string::npos);
    EXPECT_NE(text.find("tol=0.1\n"), std::string::npos);
    EXPECT_NE(text.find("n_bursts="), std::string::npos);
    const auto j = to_json(v);
    EXPECT_EQ(j["label"], "Spurious");
    EXPECT_EQ(j["thresholds_used"].size(), 3u);
    EXPECT_EQ(j["per_threshold"].size(), 3u);
    EXPECT_EQ(nlohmann::json::parse(j.dump()), j);
}
