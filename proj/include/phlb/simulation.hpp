#pragma once

#include <cstdint>
#include <deque>
#include <queue>
#include <vector>

#include "phlb/phase_type.hpp"
#include "phlb/rng.hpp"

namespace phlb {

struct SimConfig {
    int n = 100;
    int d = 2;
    double lambda = 0.9;
    PhaseType ph;
    double horizon = 1000.0;
    double warmup = -1.0;  // < 0: 10% of horizon
    std::uint64_t seed = 1;
    int replications = 1;
    int tail_depth = 16;  // deepest k tracked by the census

    SimConfig(PhaseType ph_) : ph(std::move(ph_)) {}
    void validate() const;
    double warmup_time() const { return warmup < 0 ? 0.1 * horizon : warmup; }
};

// d distinct uniform indices out of n via partial shuffle of a persistent
// identity permutation (swaps are undone afterwards)
void sample_choices(int n, int d, Philox& rng, std::vector<int>& perm, std::vector<int>& out);

struct ReplicationStats {
    std::uint64_t arrivals = 0;
    std::uint64_t completed = 0;
    double mean_response = 0.0;
    double mean_jobs_per_server = 0.0;                // time average
    std::vector<double> tail_fractions;               // k = 1..tail_depth
    std::vector<std::vector<double>> tail_phase;      // [k-1][phase]
    double little_ratio = 0.0;
};

struct SimStats {
    std::vector<ReplicationStats> reps;
    double mean_response = 0.0;
    double ci_half = 0.0;  // 95%, t-distribution over replication means
    bool ci_infinite = false;
    double little_ratio = 0.0;
    std::vector<double> tail_fractions;
    std::vector<std::vector<double>> tail_phase;
    std::uint64_t completed = 0;
    bool overloaded = false;  // rho >= 1
};

// One replication, stepwise. Exposed as a class so tests can audit the
// incremental census against a brute-force recount mid-run.
class Simulation {
public:
    Simulation(const SimConfig& cfg, std::uint64_t stream);

    bool step();  // process one event; false once the horizon is passed
    double now() const { return now_; }
    const std::vector<int>& queue_lengths() const { return len_; }
    // current fraction of queues with >= k customers, k = 1..tail_depth
    std::vector<double> census_tails() const;
    std::vector<double> recount_tails() const;  // from raw state, for audits
    ReplicationStats finish();                  // run to horizon and summarize

private:
    struct Event {
        double t;
        std::uint64_t seq;
        int server;  // -1: arrival
        bool operator>(const Event& o) const {
            return t != o.t ? t > o.t : seq > o.seq;
        }
    };

    void advance_accumulators(double t);
    void start_service(int server);
    void push_event(double t, int server);

    SimConfig cfg_;
    double warmup_;
    Philox rng_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    std::uint64_t seq_ = 0;

    // per-phase outcome tables: cumulative probability, target (-1 completes)
    std::vector<double> hold_rate_;
    std::vector<std::vector<std::pair<double, int>>> jump_;
    std::vector<std::pair<double, int>> alpha_cum_;

    std::vector<int> len_;
    std::vector<int> phase_;                 // -1 when idle
    std::vector<std::deque<double>> queued_; // arrival times, FIFO per server
    std::vector<int> counts_;                 // counts_[k] = #queues >= k, k <= tail_depth
    std::vector<std::vector<int>> counts_phase_;
    long total_jobs_ = 0;

    double now_ = 0.0;
    double acc_from_ = 0.0;
    std::vector<double> acc_tail_;
    std::vector<std::vector<double>> acc_phase_;
    double acc_jobs_ = 0.0;
    std::uint64_t arrivals_ = 0, completed_ = 0;
    double sum_response_ = 0.0;

    std::vector<int> perm_, probe_;
    bool done_ = false;
};

ReplicationStats run(const SimConfig& cfg, int replication_index = 0);
SimStats aggregate(const SimConfig& cfg, std::vector<ReplicationStats> reps);
// all replications (parallel across hardware threads) + aggregate
SimStats simulate(const SimConfig& cfg);

}  // namespace phlb
