#include "phlb/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace phlb {

void SimConfig::validate() const {
    if (n < 1) throw std::invalid_argument("simulate: need at least one server");
    if (d < 1 || d > n) throw std::invalid_argument("simulate: need 1 <= d <= n");
    if (!(lambda > 0.0)) throw std::invalid_argument("simulate: lambda must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate: horizon must be positive");
    if (warmup_time() >= horizon) throw std::invalid_argument("simulate: warmup must precede horizon");
    if (replications < 1) throw std::invalid_argument("simulate: need at least one replication");
    if (tail_depth < 1) throw std::invalid_argument("simulate: tail depth must be >= 1");
}

void sample_choices(int n, int d, Philox& rng, std::vector<int>& perm, std::vector<int>& out) {
    if (d > n || d < 1) throw std::invalid_argument("sample_choices: need 1 <= d <= n");
    if (static_cast<int>(perm.size()) != n) {
        perm.resize(n);
        std::iota(perm.begin(), perm.end(), 0);
    }
    out.resize(d);
    if (d == 1) {
        out[0] = static_cast<int>(rng.below(n));
        return;
    }
    // partial Fisher-Yates; swaps are undone so perm stays the identity
    thread_local std::vector<int> swaps;
    swaps.resize(d);
    for (int i = 0; i < d; ++i) {
        const int j = i + static_cast<int>(rng.below(n - i));
        std::swap(perm[i], perm[j]);
        out[i] = perm[i];
        swaps[i] = j;
    }
    for (int i = d - 1; i >= 0; --i) std::swap(perm[i], perm[swaps[i]]);
}

Simulation::Simulation(const SimConfig& cfg, std::uint64_t stream)
    : cfg_(cfg), warmup_(cfg.warmup_time()), rng_(cfg.seed, stream) {
    cfg_.validate();
    const PhaseType& ph = cfg_.ph;
    const int m = ph.order();

    hold_rate_.resize(m);
    jump_.resize(m);
    for (int i = 0; i < m; ++i) {
        hold_rate_[i] = -ph.T()(i, i);
        double cum = 0.0;
        for (int j = 0; j < m; ++j) {
            if (j == i || ph.T()(i, j) <= 0.0) continue;
            cum += ph.T()(i, j) / hold_rate_[i];
            jump_[i].emplace_back(cum, j);
        }
        if (ph.exit_rates()(i) > 0.0) {
            jump_[i].emplace_back(1.0, -1);
        } else if (!jump_[i].empty()) {
            jump_[i].back().first = 1.0;
        }
    }
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        if (ph.alpha()(i) <= 0.0) continue;
        acc += ph.alpha()(i);
        alpha_cum_.emplace_back(acc, i);
    }
    alpha_cum_.back().first = 1.0;

    len_.assign(cfg_.n, 0);
    phase_.assign(cfg_.n, -1);
    queued_.resize(cfg_.n);
    counts_.assign(cfg_.tail_depth + 1, 0);
    counts_phase_.assign(cfg_.tail_depth + 1, std::vector<int>(m, 0));
    acc_tail_.assign(cfg_.tail_depth + 1, 0.0);
    acc_phase_.assign(cfg_.tail_depth + 1, std::vector<double>(m, 0.0));

    push_event(rng_.exponential(cfg_.n * cfg_.lambda), -1);
}

void Simulation::push_event(double t, int server) { events_.push({t, seq_++, server}); }

void Simulation::advance_accumulators(double t) {
    const double from = std::max(acc_from_, warmup_);
    const double to = std::min(t, cfg_.horizon);
    if (to > from) {
        const double dt = to - from;
        for (int k = 1; k <= cfg_.tail_depth; ++k) {
            if (counts_[k] == 0) break;  // counts are nested
            acc_tail_[k] += counts_[k] * dt;
            const auto& row = counts_phase_[k];
            for (size_t i = 0; i < row.size(); ++i)
                if (row[i]) acc_phase_[k][i] += row[i] * dt;
        }
        acc_jobs_ += static_cast<double>(total_jobs_) * dt;
    }
    acc_from_ = t;
}

void Simulation::start_service(int server) {
    const double u = rng_.uniform();
    int phase = alpha_cum_.back().second;
    for (const auto& [cum, i] : alpha_cum_)
        if (u <= cum) {
            phase = i;
            break;
        }
    phase_[server] = phase;
    push_event(now_ + rng_.exponential(hold_rate_[phase]), server);
}

bool Simulation::step() {
    if (done_ || events_.empty()) return false;
    const Event ev = events_.top();
    if (ev.t > cfg_.horizon) {
        done_ = true;
        return false;
    }
    events_.pop();
    advance_accumulators(ev.t);
    now_ = ev.t;

    if (ev.server < 0) {  // arrival
        ++arrivals_;
        push_event(now_ + rng_.exponential(cfg_.n * cfg_.lambda), -1);

        sample_choices(cfg_.n, cfg_.d, rng_, perm_, probe_);
        int best = probe_[0];
        for (int s : probe_)
            if (len_[s] < len_[best]) best = s;
        int ties = 0;
        for (int s : probe_)
            if (len_[s] == len_[best]) ++ties;
        if (ties > 1) {
            int pick = static_cast<int>(rng_.below(ties));
            for (int s : probe_)
                if (len_[s] == len_[best] && pick-- == 0) {
                    best = s;
                    break;
                }
        }

        const int newlen = ++len_[best];
        ++total_jobs_;
        queued_[best].push_back(now_);
        if (newlen == 1) start_service(best);
        if (newlen <= cfg_.tail_depth) {
            ++counts_[newlen];
            ++counts_phase_[newlen][phase_[best]];
        }
        return true;
    }

    // phase event at a busy server
    const int s = ev.server;
    const int p = phase_[s];
    const double u = rng_.uniform();
    int target = -1;
    for (const auto& [cum, j] : jump_[p])
        if (u <= cum) {
            target = j;
            break;
        }

    if (target >= 0) {  // internal jump
        const int top = std::min(len_[s], cfg_.tail_depth);
        for (int k = 1; k <= top; ++k) {
            --counts_phase_[k][p];
            ++counts_phase_[k][target];
        }
        phase_[s] = target;
        push_event(now_ + rng_.exponential(hold_rate_[target]), s);
        return true;
    }

    // completion
    const double admitted = queued_[s].front();
    queued_[s].pop_front();
    const int oldlen = len_[s];
    if (oldlen <= cfg_.tail_depth) {
        --counts_[oldlen];
        --counts_phase_[oldlen][p];
    }
    len_[s] = oldlen - 1;
    --total_jobs_;
    if (admitted >= warmup_) {
        ++completed_;
        sum_response_ += now_ - admitted;
    }
    if (len_[s] > 0) {
        start_service(s);
        const int q = phase_[s];
        if (q != p) {
            const int top = std::min(len_[s], cfg_.tail_depth);
            for (int k = 1; k <= top; ++k) {
                --counts_phase_[k][p];
                ++counts_phase_[k][q];
            }
        }
    } else {
        phase_[s] = -1;
    }
    return true;
}

std::vector<double> Simulation::census_tails() const {
    std::vector<double> out(cfg_.tail_depth);
    for (int k = 1; k <= cfg_.tail_depth; ++k)
        out[k - 1] = static_cast<double>(counts_[k]) / cfg_.n;
    return out;
}

std::vector<double> Simulation::recount_tails() const {
    std::vector<double> out(cfg_.tail_depth, 0.0);
    for (int s = 0; s < cfg_.n; ++s)
        for (int k = 1; k <= std::min(len_[s], cfg_.tail_depth); ++k) out[k - 1] += 1.0;
    for (double& v : out) v /= cfg_.n;
    return out;
}

ReplicationStats Simulation::finish() {
    while (step()) {
    }
    advance_accumulators(cfg_.horizon);

    ReplicationStats st;
    st.arrivals = arrivals_;
    st.completed = completed_;
    st.mean_response = completed_ > 0 ? sum_response_ / static_cast<double>(completed_) : 0.0;
    const double meas = cfg_.horizon - warmup_;
    st.mean_jobs_per_server = acc_jobs_ / meas / cfg_.n;
    st.tail_fractions.resize(cfg_.tail_depth);
    st.tail_phase.assign(cfg_.tail_depth, std::vector<double>(cfg_.ph.order(), 0.0));
    for (int k = 1; k <= cfg_.tail_depth; ++k) {
        st.tail_fractions[k - 1] = acc_tail_[k] / meas / cfg_.n;
        for (int i = 0; i < cfg_.ph.order(); ++i)
            st.tail_phase[k - 1][i] = acc_phase_[k][i] / meas / cfg_.n;
    }
    st.little_ratio = st.mean_response > 0.0
                          ? st.mean_jobs_per_server / (cfg_.lambda * st.mean_response)
                          : 0.0;
    return st;
}

ReplicationStats run(const SimConfig& cfg, int replication_index) {
    Simulation sim(cfg, static_cast<std::uint64_t>(replication_index));
    return sim.finish();
}

SimStats aggregate(const SimConfig& cfg, std::vector<ReplicationStats> reps) {
    if (reps.empty()) throw std::invalid_argument("aggregate: no replications");
    SimStats out;
    out.overloaded = cfg.lambda / cfg.ph.service_rate() >= 1.0;

    const int r = static_cast<int>(reps.size());
    const int depth = static_cast<int>(reps.front().tail_fractions.size());
    const int m = cfg.ph.order();
    out.tail_fractions.assign(depth, 0.0);
    out.tail_phase.assign(depth, std::vector<double>(m, 0.0));
    for (const auto& rep : reps) {
        out.mean_response += rep.mean_response / r;
        out.little_ratio += rep.little_ratio / r;
        out.completed += rep.completed;
        for (int k = 0; k < depth; ++k) {
            out.tail_fractions[k] += rep.tail_fractions[k] / r;
            for (int i = 0; i < m; ++i) out.tail_phase[k][i] += rep.tail_phase[k][i] / r;
        }
    }
    if (r >= 2) {
        double ss = 0.0;
        for (const auto& rep : reps) {
            const double dev = rep.mean_response - out.mean_response;
            ss += dev * dev;
        }
        const double sd = std::sqrt(ss / (r - 1));
        const boost::math::students_t dist(r - 1);
        out.ci_half = boost::math::quantile(dist, 0.975) * sd / std::sqrt(static_cast<double>(r));
    } else {
        out.ci_infinite = true;
    }
    out.reps = std::move(reps);
    return out;
}

SimStats simulate(const SimConfig& cfg) {
    cfg.validate();
    std::vector<ReplicationStats> reps(cfg.replications);
    const int workers = std::max(1, std::min<int>(cfg.replications,
                                                  std::thread::hardware_concurrency()));
    if (workers == 1) {
        for (int i = 0; i < cfg.replications; ++i) reps[i] = run(cfg, i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < cfg.replications; i = next.fetch_add(1))
                    reps[i] = run(cfg, i);
            });
        for (auto& th : pool) th.join();
    }
    return aggregate(cfg, std::move(reps));
}

}  // namespace phlb
