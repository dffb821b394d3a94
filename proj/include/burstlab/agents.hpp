#pragma once

#include <burstlab/error.hpp>
#include <burstlab/model.hpp>
#include <burstlab/random.hpp>
#include <burstlab/series.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace burstlab {

/// Event log of the birth-death process: states[i] is n right after event_times[i].
struct JumpTrajectory {
    std::vector<double> event_times;
    std::vector<std::int64_t> states;
    std::int64_t n_agents = 0;
};

/// States the jump process may occupy. For alpha > 0 the walls 0 and N are singular
/// and the engine reflects at 1 and N-1 instead.
struct StateBounds {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

inline StateBounds admissible_states(const ModelParams& p) {
    if (p.alpha > 0.0) return {1, p.n_agents - 1};
    return {0, p.n_agents};
}

struct JumpStep {
    double wait = 0.0;
    std::int64_t n_next = 0;
};

namespace detail {

/// Rates with transitions that would leave [lo, hi] removed (reflection).
inline SystemRates bounded_rates(std::int64_t n, const ModelParams& p, StateBounds bounds) {
    SystemRates r = system_rates(n, p);
    if (n >= bounds.hi) r.up = 0.0;
    if (n <= bounds.lo) r.down = 0.0;
    if (!std::isfinite(r.up) || !std::isfinite(r.down))
        throw NumericError("jump rates overflow at n = " + std::to_string(n));
    return r;
}

inline JumpStep step_with_rates(std::int64_t n, const SystemRates& r, CounterRng& rng) {
    const double total = r.total();
    if (!(total > 0.0)) return {std::numeric_limits<double>::infinity(), n};  // absorbing
    const double wait = rng.exponential(total);
    const bool up = rng.uniform() * total < r.up;
    return {wait, up ? n + 1 : n - 1};
}

}  // namespace detail

/// One exact stochastic-simulation step from state n.
inline JumpStep gillespie_step(std::int64_t n, const ModelParams& p, CounterRng& rng) {
    const StateBounds bounds = admissible_states(p);
    detail::require_domain(n >= bounds.lo && n <= bounds.hi, "gillespie_step: state outside admissible range");
    return detail::step_with_rates(n, detail::bounded_rates(n, p, bounds), rng);
}

/// Exact stationary law of the bounded birth-death chain from detailed balance,
/// pi(n+1)/pi(n) = up(n)/down(n+1). Empty when the chain has an absorbing state.
inline std::vector<double> stationary_states(const ModelParams& p) {
    const StateBounds b = admissible_states(p);
    std::vector<double> logw(static_cast<std::size_t>(b.hi - b.lo + 1), 0.0);
    for (std::int64_t n = b.lo; n < b.hi; ++n) {
        const double up = detail::bounded_rates(n, p, b).up;
        const double down = detail::bounded_rates(n + 1, p, b).down;
        if (!(up > 0.0) || !(down > 0.0)) return {};
        logw[static_cast<std::size_t>(n + 1 - b.lo)] = logw[static_cast<std::size_t>(n - b.lo)] + std::log(up) - std::log(down);
    }
    const double m = *std::max_element(logw.begin(), logw.end());
    double sum = 0.0;
    for (double& w : logw) sum += (w = std::exp(w - m));
    for (double& w : logw) w /= sum;
    return logw;
}

/// Options for simulate_agents; the event log is off unless a cap is given.
struct AgentRunOptions {
    std::size_t event_log_cap = 0;
    JumpTrajectory* event_log = nullptr;
};

/// Uniform-grid series of x = n/N with sample-and-hold between events. Events are
/// streamed into the grid instead of stored, since a run can contain >1e9 of them.
inline TimeSeries simulate_agents(const ModelParams& p, double t_total, double grid_dt, std::uint64_t seed,
                                  const AgentRunOptions& opts = {}) {
    p.validate();
    detail::require(std::isfinite(t_total) && t_total > 0.0, "t_total must be > 0");
    detail::require(std::isfinite(grid_dt) && grid_dt > 0.0 && grid_dt <= t_total, "grid_dt must lie in (0, t_total]");

    const StateBounds bounds = admissible_states(p);
    const double inv_n = 1.0 / static_cast<double>(p.n_agents);

    // Rate table over admissible states; values are bitwise those of system_rates.
    std::vector<SystemRates> table;
    table.reserve(static_cast<std::size_t>(bounds.hi - bounds.lo + 1));
    for (std::int64_t n = bounds.lo; n <= bounds.hi; ++n) table.push_back(detail::bounded_rates(n, p, bounds));

    std::int64_t n = (bounds.lo + bounds.hi) / 2;
    {
        CounterRng init(seed, stream::initial_state);
        const auto law = stationary_states(p);
        if (!law.empty()) {
            double u = init.uniform();
            std::size_t k = 0;
            while (k + 1 < law.size() && u > law[k]) u -= law[k++];
            n = bounds.lo + static_cast<std::int64_t>(k);
        }
    }

    if (opts.event_log) {
        opts.event_log->event_times.clear();
        opts.event_log->states.clear();
        opts.event_log->n_agents = p.n_agents;
    }

    CounterRng rng(seed, stream::jumps);
    const auto n_samples = static_cast<std::size_t>(std::floor(t_total / grid_dt)) + 1;
    TimeSeries out{0.0, grid_dt, {}};
    out.values.reserve(n_samples);

    const double t_end = static_cast<double>(n_samples - 1) * grid_dt;
    double t = 0.0;
    std::size_t k = 0;
    while (k < n_samples) {
        const auto step = detail::step_with_rates(n, table[static_cast<std::size_t>(n - bounds.lo)], rng);
        const double t_event = t + step.wait;
        // Grid instants before the next event see the current state.
        while (k < n_samples && static_cast<double>(k) * grid_dt < t_event) {
            out.values.push_back(static_cast<double>(n) * inv_n);
            ++k;
        }
        t = t_event;
        n = step.n_next;
        if (opts.event_log && t <= t_end && opts.event_log->states.size() < opts.event_log_cap) {
            opts.event_log->event_times.push_back(t);
            opts.event_log->states.push_back(n);
        }
    }
    return out;
}

}  // namespace burstlab
