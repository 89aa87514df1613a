#pragma once

// Multi-start Nelder-Mead maximization with deterministic per-restart
// random streams. Restarts may run on several threads; the reduction is by
// value with ties broken by the lowest restart index, so the result does not
// depend on scheduling.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace trinl {

struct NelderMeadOptions {
    double initial_step = 0.6;
    double tolerance = 1e-10;  // simplex diameter
    int max_iterations = 2000;
    int polish_rounds = 3;  // fresh simplices around the incumbent after convergence
};

struct LocalResult {
    std::vector<double> x;
    double value = -std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

namespace detail {

inline double simplex_diameter(const std::vector<std::vector<double>>& pts) {
    double d = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < pts[0].size(); ++k) s = std::max(s, std::abs(pts[i][k] - pts[0][k]));
        d = std::max(d, s);
    }
    return d;
}

}  // namespace detail

/// One Nelder-Mead run maximizing `f` from `x0`.
template <class F>
LocalResult nelder_mead_once(const F& f, std::vector<double> x0, double step, const NelderMeadOptions& opt) {
    const std::size_t n = x0.size();
    std::vector<std::vector<double>> pts(n + 1, x0);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
    // Minimize g = -f.
    for (std::size_t i = 0; i <= n; ++i) vals[i] = -f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    LocalResult res;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        {
            std::vector<std::vector<double>> p2(n + 1);
            std::vector<double> v2(n + 1);
            for (std::size_t i = 0; i <= n; ++i) {
                p2[i] = std::move(pts[order[i]]);
                v2[i] = vals[order[i]];
            }
            pts = std::move(p2);
            vals = std::move(v2);
        }
        if (detail::simplex_diameter(pts) < opt.tolerance) {
            res.converged = true;
            break;
        }
        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k) centroid[k] += pts[i][k] / static_cast<double>(n);
        const auto& worst = pts[n];
        for (std::size_t k = 0; k < n; ++k) trial[k] = centroid[k] + (centroid[k] - worst[k]);
        const double fr = -f(trial);
        if (fr < vals[0]) {
            for (std::size_t k = 0; k < n; ++k) trial2[k] = centroid[k] + 2.0 * (centroid[k] - worst[k]);
            const double fe = -f(trial2);
            if (fe < fr) {
                pts[n] = trial2;
                vals[n] = fe;
            } else {
                pts[n] = trial;
                vals[n] = fr;
            }
        } else if (fr < vals[n - 1]) {
            pts[n] = trial;
            vals[n] = fr;
        } else {
            const bool outside = fr < vals[n];
            for (std::size_t k = 0; k < n; ++k)
                trial2[k] = outside ? centroid[k] + 0.5 * (trial[k] - centroid[k])
                                    : centroid[k] + 0.5 * (worst[k] - centroid[k]);
            const double fc = -f(trial2);
            if (fc < (outside ? fr : vals[n])) {
                pts[n] = trial2;
                vals[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t k = 0; k < n; ++k) pts[i][k] = pts[0][k] + 0.5 * (pts[i][k] - pts[0][k]);
                    vals[i] = -f(pts[i]);
                }
            }
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    res.x = pts[best];
    res.value = -vals[best];
    res.iterations = it;
    return res;
}

/// Nelder-Mead with polishing restarts around the incumbent.
template <class F>
LocalResult nelder_mead(const F& f, std::vector<double> x0, const NelderMeadOptions& opt = {}) {
    LocalResult best = nelder_mead_once(f, std::move(x0), opt.initial_step, opt);
    double step = 0.1;
    for (int round = 0; round < opt.polish_rounds; ++round) {
        LocalResult next = nelder_mead_once(f, best.x, step, opt);
        next.iterations += best.iterations;
        const bool gained = next.value > best.value + 1e-13;
        if (next.value >= best.value) best = std::move(next);
        if (!gained) break;
        step *= 0.3;
    }
    return best;
}

/// SplitMix64 finalizer; derives independent per-restart seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t restart_seed(std::uint64_t seed, int restart) {
    return splitmix64(splitmix64(seed) ^ (0xD1B54A32D192ED03ull * static_cast<std::uint64_t>(restart + 1)));
}

struct MultiStartOptions {
    int restarts = 64;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: hardware concurrency
    NelderMeadOptions local;
};

struct MultiStartResult {
    LocalResult best;
    std::vector<double> restart_values;  // per restart, in restart order
    int best_index = -1;
};

/// Maximizes f over R^dim from `restarts` random starting points produced by
/// `sample(rng)`.
template <class F, class Sampler>
MultiStartResult multistart_maximize(const F& f, const Sampler& sample, const MultiStartOptions& opt) {
    if (opt.restarts < 1) throw std::invalid_argument("at least one restart is required");
    std::vector<LocalResult> results(static_cast<std::size_t>(opt.restarts));
    std::atomic<int> next{0};
    const auto worker = [&] {
        for (int i = next++; i < opt.restarts; i = next++) {
            std::mt19937_64 rng(restart_seed(opt.seed, i));
            results[static_cast<std::size_t>(i)] = nelder_mead(f, sample(rng), opt.local);
        }
    };
    int threads = opt.threads > 0 ? opt.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, opt.restarts);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    MultiStartResult out;
    out.restart_values.reserve(results.size());
    for (std::size_t i = 0; i < results.size(); ++i) {
        out.restart_values.push_back(results[i].value);
        if (out.best_index < 0 || results[i].value > out.best.value) {
            out.best = results[i];
            out.best_index = static_cast<int>(i);
        }
    }
    return out;
}

}  // namespace trinl
