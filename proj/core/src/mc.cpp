#include <levylmm/mc.hpp>
#include <levylmm/quadrature.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <thread>

namespace levylmm {

namespace {

constexpr std::uint64_t kBrownianStream = 0x57a9d3f0b1c64e25ULL;
constexpr double kExplosionBound = 1e6;
constexpr double kSingularGuard = 1e-6;

std::uint64_t band_key(double lo) { return std::bit_cast<std::uint64_t>(lo); }

} // namespace

double default_epsilon(const LevyMeasure& measure, double z_top) {
    if (!measure.has_jumps()) return z_top;
    const double m2 = measure.raw_moment(2);
    double eps = z_top;
    for (int m = 0; m < 60; ++m) {
        if (measure.small_jump_variance(eps) <= 1e-3 * m2) return eps;
        const double next = eps / 2.0;
        if (measure.tail_mass(next) > 100.0) return eps;
        eps = next;
    }
    return eps;
}

JumpGenerator::JumpGenerator(const LevyMeasure& measure, double epsilon, double z_top)
    : cgmy_([&] {
          const auto* g = std::get_if<CgmyJumps>(&measure.jumps());
          if (!g)
              throw DomainError("JumpGenerator: sampler implemented for tempered power-law jumps");
          return *g;
      }()),
      epsilon_(epsilon) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("JumpGenerator: epsilon must be positive");
    if (!(z_top > epsilon))
        z_top = 2.0 * epsilon;

    auto side_intensity = [&](double lo, double hi, double temper) {
        auto f = [&](double z) {
            return cgmy_.C * std::exp(-temper * z) / std::pow(z, 1.0 + cgmy_.Y);
        };
        if (std::isinf(hi))
            return quad::gauss_kronrod(f, lo, std::numeric_limits<double>::infinity(), 1e-12);
        return quad::gauss_kronrod(f, lo, hi, 1e-12);
    };

    // dyadic magnitude bands anchored at z_top, coarse first
    std::vector<std::pair<double, double>> ranges;
    ranges.emplace_back(z_top, std::numeric_limits<double>::infinity());
    double lo = z_top;
    while (lo > epsilon_) {
        const double next = std::max(lo / 2.0, epsilon_);
        ranges.emplace_back(next, lo);
        lo = next;
    }
    for (auto [blo, bhi] : ranges) {
        Band b;
        b.lo = blo;
        b.hi = bhi;
        b.intensity_pos = side_intensity(blo, bhi, cgmy_.lambda_plus);
        b.intensity_neg = side_intensity(blo, bhi, cgmy_.lambda_minus);
        b.stream_key = band_key(blo);
        bands_.push_back(b);
        total_intensity_ += b.intensity_pos + b.intensity_neg;
    }
    gamma_ = measure.tail_mean(epsilon_);
    sigma2_ = measure.small_jump_variance(epsilon_);
}

double JumpGenerator::sample_mark(const Band& band, Xoshiro256& rng) const {
    const double total = band.intensity_pos + band.intensity_neg;
    const bool positive = rng.uniform() * total < band.intensity_pos;
    const double temper = positive ? cgmy_.lambda_plus : cgmy_.lambda_minus;
    const double y = cgmy_.Y;
    double z;
    if (std::isinf(band.hi)) {
        // proposal lo + Exp(temper), acceptance (lo/z)^{1+Y}
        do {
            z = band.lo + rng.exponential(temper);
        } while (rng.uniform() > std::pow(band.lo / z, 1.0 + y));
    } else {
        // power-law inversion on [lo,hi], acceptance exp(-temper (z - lo))
        const double a = std::pow(band.lo, -y), b = std::pow(band.hi, -y);
        do {
            z = std::pow(a - rng.uniform() * (a - b), -1.0 / y);
        } while (rng.uniform() > std::exp(-temper * (z - band.lo)));
    }
    return positive ? z : -z;
}

double JumpGenerator::sample(Xoshiro256& rng) const {
    double u = rng.uniform() * total_intensity_;
    for (const auto& b : bands_) {
        const double w = b.intensity_pos + b.intensity_neg;
        if (u < w || &b == &bands_.back()) return sample_mark(b, rng);
        u -= w;
    }
    return sample_mark(bands_.back(), rng);
}

namespace {

struct Mesh {
    std::vector<double> nodes;
    std::vector<int> obs_node;            // node index per observation date
    std::vector<int> interval;            // loading interval per mesh segment
    std::vector<std::vector<double>> lam; // [segment][rate-1], d=1 loadings
};

Mesh build_mesh(const MarketModel& market, const SimConfig& config, double horizon,
                std::span<const double> obs_dates) {
    std::vector<double> nodes;
    nodes.push_back(0.0);
    for (double d : obs_dates) {
        if (d < 0.0 || d > horizon + 1e-12)
            throw std::invalid_argument("simulate: observation date outside [0, horizon]");
        nodes.push_back(d);
    }
    for (std::int64_t i = 1; i * config.dt < horizon; ++i) nodes.push_back(i * config.dt);
    for (double d : market.tenor().dates())
        if (d > 0.0 && d < horizon) nodes.push_back(d);
    nodes.push_back(horizon);
    std::sort(nodes.begin(), nodes.end());
    std::vector<double> dedup;
    for (double t : nodes)
        if (dedup.empty() || t - dedup.back() > 1e-10) dedup.push_back(t);

    Mesh mesh;
    mesh.nodes = std::move(dedup);
    for (double d : obs_dates) {
        auto it = std::min_element(mesh.nodes.begin(), mesh.nodes.end(),
                                   [&](double a, double b) {
                                       return std::abs(a - d) < std::abs(b - d);
                                   });
        mesh.obs_node.push_back(static_cast<int>(it - mesh.nodes.begin()));
    }
    const int n = market.n();
    for (std::size_t s = 0; s + 1 < mesh.nodes.size(); ++s) {
        const double mid = 0.5 * (mesh.nodes[s] + mesh.nodes[s + 1]);
        const int iv = market.vols().interval_of(mid);
        mesh.interval.push_back(iv);
        std::vector<double> lam(static_cast<std::size_t>(n));
        for (int k = 1; k <= n; ++k)
            lam[static_cast<std::size_t>(k) - 1] =
                market.vols().dim() == 1 ? market.vols().loading(k, iv)[0] : 0.0;
        mesh.lam.push_back(std::move(lam));
    }
    return mesh;
}

struct PathJump {
    double time;
    double mark;
    double bridge_normal;
};

struct Workspace {
    std::vector<std::vector<PathJump>> band_jumps;  // per band, time sorted
    std::vector<std::size_t> cursor;
    std::vector<double> dw;        // standard BM increment per mesh segment
    std::vector<double> state;
    std::vector<double> drift;
    std::vector<double> knot_t;    // sub-segment decomposition of one segment
    std::vector<double> knot_w;
    std::vector<int> knot_jump;    // index into interval jump list, -1 for mesh ends
    std::vector<const PathJump*> seg_jumps;
};

// simulate one path; returns false when the path hits a guard and is rejected
bool run_one_path(const MarketModel& market, const Mesh& mesh, const JumpGenerator* gen,
                  double s_eff, double gamma, std::uint64_t seed, std::int64_t path,
                  double horizon, Workspace& ws, std::span<double> obs_states,
                  bool& saw_negative) {
    const int n = market.n();

    // jump generation, per band with its own stream
    if (gen) {
        ws.band_jumps.resize(gen->bands().size());
        for (std::size_t b = 0; b < gen->bands().size(); ++b) {
            auto& list = ws.band_jumps[b];
            list.clear();
            const auto& band = gen->bands()[b];
            const double rate = band.intensity_pos + band.intensity_neg;
            if (rate <= 0.0) continue;
            Xoshiro256 rng(seed, static_cast<std::uint64_t>(path), band.stream_key);
            double t = rng.exponential(rate);
            while (t < horizon) {
                PathJump j;
                j.time = t;
                j.mark = gen->sample_mark(band, rng);
                j.bridge_normal = rng.normal();
                list.push_back(j);
                t += rng.exponential(rate);
            }
        }
        ws.cursor.assign(ws.band_jumps.size(), 0);
    }

    // one standard Brownian increment per deterministic mesh segment
    Xoshiro256 rng_w(seed, static_cast<std::uint64_t>(path), kBrownianStream);
    ws.dw.resize(mesh.nodes.size() - 1);
    for (std::size_t s = 0; s + 1 < mesh.nodes.size(); ++s)
        ws.dw[s] = rng_w.normal() * std::sqrt(mesh.nodes[s + 1] - mesh.nodes[s]);

    ws.state = market.initial_state();
    ws.drift.assign(static_cast<std::size_t>(n), 0.0);
    saw_negative = false;

    auto record_obs = [&](int node_idx) {
        for (std::size_t o = 0; o < mesh.obs_node.size(); ++o)
            if (mesh.obs_node[o] == node_idx)
                std::copy(ws.state.begin(), ws.state.end(),
                          obs_states.begin() + static_cast<std::ptrdiff_t>(o * ws.state.size()));
    };
    record_obs(0);

    for (std::size_t s = 0; s + 1 < mesh.nodes.size(); ++s) {
        const double a = mesh.nodes[s], b = mesh.nodes[s + 1];
        const auto& lam = mesh.lam[s];

        // jumps inside (a, b], coarse bands first (stable under eps refinement)
        ws.seg_jumps.clear();
        if (gen)
            for (std::size_t bb = 0; bb < ws.band_jumps.size(); ++bb) {
                auto& cur = ws.cursor[bb];
                const auto& list = ws.band_jumps[bb];
                while (cur < list.size() && list[cur].time <= b)
                    ws.seg_jumps.push_back(&list[cur++]);
            }

        // Brownian-bridge refinement of the segment at the jump times
        ws.knot_t.assign({a, b});
        ws.knot_w.assign({0.0, ws.dw[s]});
        ws.knot_jump.assign({-1, -1});
        for (std::size_t q = 0; q < ws.seg_jumps.size(); ++q) {
            const double t = ws.seg_jumps[q]->time;
            std::size_t pos = 1;
            while (ws.knot_t[pos] < t) ++pos;
            const double u = ws.knot_t[pos - 1], v = ws.knot_t[pos];
            const double wu = ws.knot_w[pos - 1], wv = ws.knot_w[pos];
            const double frac = (t - u) / (v - u);
            const double var = (t - u) * (v - t) / (v - u);
            const double wt = wu + (wv - wu) * frac +
                              ws.seg_jumps[q]->bridge_normal * std::sqrt(std::max(var, 0.0));
            ws.knot_t.insert(ws.knot_t.begin() + static_cast<std::ptrdiff_t>(pos), t);
            ws.knot_w.insert(ws.knot_w.begin() + static_cast<std::ptrdiff_t>(pos), wt);
            ws.knot_jump.insert(ws.knot_jump.begin() + static_cast<std::ptrdiff_t>(pos),
                                static_cast<int>(q));
        }

        for (std::size_t q = 0; q + 1 < ws.knot_t.size(); ++q) {
            const double dt_sub = ws.knot_t[q + 1] - ws.knot_t[q];
            const double dw_sub = ws.knot_w[q + 1] - ws.knot_w[q];

            // guards before drift evaluation
            for (int k = 0; k < n; ++k) {
                if (std::abs(ws.state[static_cast<std::size_t>(k)]) > kExplosionBound) return false;
                if (1.0 + market.tenor().accrual(k + 1) * ws.state[static_cast<std::size_t>(k)] <=
                    kSingularGuard)
                    return false;
            }
            if (dt_sub > 0.0) {
                market.drift_all(ws.knot_t[q], ws.state, 1.0, ws.drift);
                const double common = s_eff * dw_sub - gamma * dt_sub;
                for (int k = 0; k < n; ++k)
                    ws.state[static_cast<std::size_t>(k)] *=
                        1.0 + ws.drift[static_cast<std::size_t>(k)] * dt_sub +
                        lam[static_cast<std::size_t>(k)] * common;
            }
            if (ws.knot_jump[q + 1] >= 0) {
                const double mark = ws.seg_jumps[static_cast<std::size_t>(ws.knot_jump[q + 1])]->mark;
                for (int k = 0; k < n; ++k)
                    ws.state[static_cast<std::size_t>(k)] *=
                        1.0 + lam[static_cast<std::size_t>(k)] * mark;
            }
            for (int k = 0; k < n; ++k)
                if (ws.state[static_cast<std::size_t>(k)] < 0.0) saw_negative = true;
        }
        record_obs(static_cast<int>(s) + 1);
    }
    return true;
}

struct RunOutput {
    std::vector<double> states;        // [path][obs][rate]
    std::vector<std::uint8_t> ok;
    std::vector<std::uint8_t> negative;
};

RunOutput run_paths(const MarketModel& market, const SimConfig& config, double horizon,
                    std::span<const double> obs_dates) {
    if (market.measure().dim() != 1)
        throw DomainError("simulate: the benchmark simulator requires d = 1");
    if (std::holds_alternative<TabulatedJumps>(market.measure().jumps()))
        throw DomainError("simulate: jump sampling implemented for tempered power-law measures");
    if (!(horizon <= market.tenor().date(market.n() - 1) + 1e-12))
        throw std::invalid_argument("simulate: horizon must not exceed T_{n-1}");
    if (config.paths < 1)
        throw std::invalid_argument("simulate: need at least one path");
    if (!(config.dt > 0.0))
        throw std::invalid_argument("simulate: dt must be positive");

    const Mesh mesh = build_mesh(market, config, horizon, obs_dates);

    std::unique_ptr<JumpGenerator> gen;
    double sigma2 = 0.0, gamma = 0.0;
    if (market.measure().has_jumps()) {
        const double eps =
            config.epsilon > 0.0 ? config.epsilon : default_epsilon(market.measure());
        gen = std::make_unique<JumpGenerator>(market.measure(), eps);
        sigma2 = gen->small_jump_sigma2();
        gamma = gen->compensator_mean();
    }
    const double s_eff = std::sqrt(market.measure().diffusion(0, 0) + sigma2);

    const int n = market.n();
    const std::size_t per_path = obs_dates.size() * static_cast<std::size_t>(n);
    RunOutput out;
    out.states.assign(static_cast<std::size_t>(config.paths) * per_path, 0.0);
    out.ok.assign(static_cast<std::size_t>(config.paths), 0);
    out.negative.assign(static_cast<std::size_t>(config.paths), 0);

    int threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    threads = static_cast<int>(std::min<std::int64_t>(threads, config.paths));

    auto worker = [&](std::int64_t begin, std::int64_t end) {
        Workspace ws;
        for (std::int64_t p = begin; p < end; ++p) {
            bool neg = false;
            std::span<double> slot(out.states.data() + static_cast<std::size_t>(p) * per_path,
                                   per_path);
            const bool ok = run_one_path(market, mesh, gen.get(), s_eff, gamma, config.seed, p,
                                         horizon, ws, slot, neg);
            out.ok[static_cast<std::size_t>(p)] = ok ? 1 : 0;
            out.negative[static_cast<std::size_t>(p)] = neg ? 1 : 0;
        }
    };

    if (threads == 1) {
        worker(0, config.paths);
    } else {
        std::vector<std::thread> pool;
        const std::int64_t chunk = (config.paths + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const std::int64_t begin = t * chunk;
            const std::int64_t end = std::min<std::int64_t>(begin + chunk, config.paths);
            if (begin >= end) break;
            pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }
    return out;
}

McResult reduce_payoffs(std::span<const double> payoffs, std::span<const std::uint8_t> ok,
                        std::span<const std::uint8_t> negative) {
    McResult res;
    double sum = 0.0, comp = 0.0;
    std::int64_t used = 0, neg = 0;
    for (std::size_t p = 0; p < payoffs.size(); ++p) {
        if (!ok[p]) {
            ++res.paths_rejected;
            continue;
        }
        ++used;
        neg += negative[p];
        const double y = payoffs[p] - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    res.paths_used = used;
    if (used == 0) return res;
    res.estimate = sum / static_cast<double>(used);
    double var = 0.0;
    for (std::size_t p = 0; p < payoffs.size(); ++p)
        if (ok[p]) var += (payoffs[p] - res.estimate) * (payoffs[p] - res.estimate);
    res.std_error = used > 1
                        ? std::sqrt(var / (static_cast<double>(used) - 1.0) / static_cast<double>(used))
                        : std::numeric_limits<double>::quiet_NaN();
    res.negative_rate_fraction = static_cast<double>(neg) / static_cast<double>(used);
    return res;
}

} // namespace

McResult simulate_terminal_measure(const MarketModel& market, const SimConfig& config,
                                   double horizon, std::span<const double> obs_dates,
                                   const PathPayoff& payoff) {
    const auto run = run_paths(market, config, horizon, obs_dates);
    const std::size_t per_path = obs_dates.size() * static_cast<std::size_t>(market.n());
    std::vector<double> payoffs(static_cast<std::size_t>(config.paths), 0.0);
    for (std::int64_t p = 0; p < config.paths; ++p)
        if (run.ok[static_cast<std::size_t>(p)])
            payoffs[static_cast<std::size_t>(p)] = payoff(std::span<const double>(
                run.states.data() + static_cast<std::size_t>(p) * per_path, per_path));
    return reduce_payoffs(payoffs, run.ok, run.negative);
}

std::vector<std::vector<std::vector<double>>>
sample_paths(const MarketModel& market, const SimConfig& config, double horizon,
             std::span<const double> obs_dates) {
    const auto run = run_paths(market, config, horizon, obs_dates);
    const int n = market.n();
    std::vector<std::vector<std::vector<double>>> out(static_cast<std::size_t>(config.paths));
    for (std::int64_t p = 0; p < config.paths; ++p) {
        auto& rows = out[static_cast<std::size_t>(p)];
        rows.resize(obs_dates.size());
        for (std::size_t o = 0; o < obs_dates.size(); ++o) {
            const double* base = run.states.data() +
                                 (static_cast<std::size_t>(p) * obs_dates.size() + o) *
                                     static_cast<std::size_t>(n);
            rows[o].assign(base, base + n);
        }
    }
    return out;
}

std::vector<McResult> mc_caplet_prices(const MarketModel& market, int k,
                                       std::span<const double> strikes,
                                       const SimConfig& config) {
    if (k < 1 || k > market.n())
        throw std::invalid_argument("mc_caplet_price: rate index out of range");
    const double reset = market.tenor().date(k - 1);
    const double obs[1] = {reset};
    const auto run = run_paths(market, config, reset, obs);

    const int n = market.n();
    const double scale = market.terminal_bond() * market.tenor().accrual(k);
    std::vector<std::vector<double>> payoffs(strikes.size());
    for (auto& v : payoffs) v.assign(static_cast<std::size_t>(config.paths), 0.0);

    for (std::int64_t p = 0; p < config.paths; ++p) {
        if (!run.ok[static_cast<std::size_t>(p)]) continue;
        const double* st = run.states.data() + static_cast<std::size_t>(p) * n;
        double tail = 1.0;
        for (int j = k + 1; j <= n; ++j)
            tail *= 1.0 + market.tenor().accrual(j) * st[j - 1];
        for (std::size_t s = 0; s < strikes.size(); ++s)
            payoffs[s][static_cast<std::size_t>(p)] =
                scale * tail * std::max(st[k - 1] - strikes[s], 0.0);
    }
    std::vector<McResult> out;
    out.reserve(strikes.size());
    for (std::size_t s = 0; s < strikes.size(); ++s)
        out.push_back(reduce_payoffs(payoffs[s], run.ok, run.negative));
    return out;
}

McResult mc_caplet_price(const MarketModel& market, int k, double strike,
                         const SimConfig& config) {
    const double strikes[1] = {strike};
    return mc_caplet_prices(market, k, strikes, config)[0];
}

McResult mc_swaption_price(const MarketModel& market, double strike,
                           const SimConfig& config) {
    const int n = market.n();
    const double expiry = market.tenor().date(0);
    const double obs[1] = {expiry};
    const double disc = market.terminal_bond();
    return simulate_terminal_measure(
        market, config, expiry, obs, [&](std::span<const double> st) {
            // annuity/B(T_n) and swap rate from the simulated Libors by telescoping
            double annuity = 0.0, floating = 0.0, prod = 1.0;
            for (int j = n; j >= 1; --j) {
                const double leg = market.tenor().accrual(j) * prod;
                annuity += leg;
                floating += leg * st[static_cast<std::size_t>(j) - 1];
                prod *= 1.0 + market.tenor().accrual(j) * st[static_cast<std::size_t>(j) - 1];
            }
            const double rate = floating / annuity;
            return disc * annuity * std::max(rate - strike, 0.0);
        });
}

} // namespace levylmm
