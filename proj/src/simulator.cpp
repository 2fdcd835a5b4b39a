#include "bmv/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

namespace bmv {

double StateTimes::total() const {
  return busy + idle + std::accumulate(sleep.begin(), sleep.end(), 0.0);
}

namespace {

using Mode = ServerState::Mode;

// FIFO of arrival timestamps, capacity K.
class ArrivalRing {
 public:
  explicit ArrivalRing(int cap) : slots_(static_cast<std::size_t>(cap)) {}

  int size() const { return count_; }
  void push(double t) {
    slots_[(head_ + static_cast<std::size_t>(count_)) % slots_.size()] = t;
    ++count_;
  }
  double pop() {
    const double t = slots_[head_];
    head_ = (head_ + 1) % slots_.size();
    --count_;
    return t;
  }

 private:
  std::vector<double> slots_;
  std::size_t head_ = 0;
  int count_ = 0;
};

const char* state_label(const ServerState& s) {
  switch (s.mode) {
    case Mode::Sleeping: return "sleep";
    case Mode::Idle: return "idle";
    case Mode::Busy: return "busy";
  }
  return "?";
}

class Run {
 public:
  Run(const ValidatedConfig& config, const SimOptions& options, RandomStream& stream)
      : cfg_(config),
        opt_(options),
        rng_(stream),
        queue_(config.queue_cap()),
        lambda_(config.traffic().lambda),
        mu_(config.traffic().mu) {
    const auto& policy = config.policy();
    const std::size_t stages =
        policy.kind == PolicyKind::NoPolicy ? 0 : std::max<std::size_t>(1, policy.stage_lengths.size());
    out_.per_state_time.sleep.assign(stages, 0.0);
    switch (policy.kind) {
      case PolicyKind::BMV:
        state_ = {Mode::Sleeping, 0};
        timer_end_ = policy.stage_lengths[0];
        break;
      case PolicyKind::NPolicy:
        state_ = {Mode::Sleeping, 0};
        break;
      case PolicyKind::NoPolicy:
        state_ = {Mode::Idle, 0};
        break;
    }
  }

  SimMetrics execute() {
    const double horizon = opt_.horizon;
    next_arrival_ = rng_.exp_sample(lambda_);
    if (opt_.trace) *opt_.trace << "time,event,state,queue_length\n";
    trace("start");
    for (;;) {
      double t_next = next_arrival_;
      enum { Arrival, Departure, Timer } ev = Arrival;
      if (state_.mode == Mode::Busy && departure_ < t_next) {
        t_next = departure_;
        ev = Departure;
      } else if (state_.mode == Mode::Sleeping && cfg_.policy().kind == PolicyKind::BMV &&
                 timer_end_ < t_next) {
        t_next = timer_end_;
        ev = Timer;
      }
      if (t_next > horizon) {
        advance(horizon);
        break;
      }
      advance(t_next);
      switch (ev) {
        case Arrival: on_arrival(); break;
        case Departure: on_departure(); break;
        case Timer: on_timer(); break;
      }
    }
    return finish();
  }

 private:
  double power_now() const {
    const auto& w = cfg_.power();
    switch (state_.mode) {
      case Mode::Busy: return w.p_active;
      case Mode::Idle: return w.p_idle;
      case Mode::Sleeping: return w.stage_powers[static_cast<std::size_t>(state_.stage)];
    }
    return 0.0;
  }

  void advance(double t) {
    const double from = std::max(now_, opt_.warmup);
    if (t > from) {
      const double dt = t - from;
      out_.energy += power_now() * dt;
      area_ += queue_.size() * dt;
      switch (state_.mode) {
        case Mode::Busy: out_.per_state_time.busy += dt; break;
        case Mode::Idle: out_.per_state_time.idle += dt; break;
        case Mode::Sleeping: out_.per_state_time.sleep[static_cast<std::size_t>(state_.stage)] += dt; break;
      }
    }
    now_ = t;
  }

  void start_service() {
    state_ = {Mode::Busy, 0};
    departure_ = now_ + rng_.exp_sample(mu_);
  }

  void on_arrival() {
    const bool counted = now_ >= opt_.warmup;
    if (counted) ++out_.arrivals;
    if (queue_.size() >= cfg_.queue_cap()) {
      if (counted) ++out_.dropped;
      trace("drop");
    } else {
      queue_.push(now_);
      if (state_.mode == Mode::Idle) {
        start_service();
      } else if (state_.mode == Mode::Sleeping && cfg_.policy().kind == PolicyKind::NPolicy &&
                 queue_.size() >= cfg_.policy().n_threshold) {
        start_service();
      }
      trace("arrival");
    }
    next_arrival_ = now_ + rng_.exp_sample(lambda_);
  }

  void on_departure() {
    const double arrived = queue_.pop();
    if (arrived >= opt_.warmup) {
      ++out_.served;
      const double sojourn = now_ - arrived;
      sojourn_sum_ += sojourn;
    }
    if (queue_.size() > 0) {
      departure_ = now_ + rng_.exp_sample(mu_);
    } else {
      switch (cfg_.policy().kind) {
        case PolicyKind::BMV:
          state_ = {Mode::Sleeping, 0};
          timer_end_ = now_ + cfg_.policy().stage_lengths[0];
          break;
        case PolicyKind::NPolicy: state_ = {Mode::Sleeping, 0}; break;
        case PolicyKind::NoPolicy: state_ = {Mode::Idle, 0}; break;
      }
    }
    trace("departure");
  }

  void on_timer() {
    const auto& stages = cfg_.policy().stage_lengths;
    if (queue_.size() > 0) {
      start_service();
    } else if (state_.stage + 1 < static_cast<int>(stages.size())) {
      ++state_.stage;
      timer_end_ = now_ + stages[static_cast<std::size_t>(state_.stage)];
    } else {
      state_ = {Mode::Idle, 0};
    }
    trace("timer");
  }

  void trace(const char* event) {
    if (!opt_.trace) return;
    *opt_.trace << now_ << ',' << event << ',' << state_label(state_);
    if (state_.mode == Mode::Sleeping) *opt_.trace << state_.stage + 1;
    *opt_.trace << ',' << queue_.size() << '\n';
  }

  SimMetrics finish() {
    out_.in_flight = queue_.size();
    out_.observed_time = std::max(0.0, opt_.horizon - opt_.warmup);
    const double t = out_.observed_time;
    out_.ne = t > 0.0 ? out_.energy / (cfg_.power().p_active * t) : 0.0;
    out_.mean_in_system = t > 0.0 ? area_ / t : 0.0;
    out_.w_mean = out_.served > 0 ? sojourn_sum_ / static_cast<double>(out_.served) : 0.0;
    if (lambda_ * t < kMinExpectedArrivals) {
      out_.warnings.push_back("HorizonTooShort: fewer than 1000 expected arrivals");
    }
    return std::move(out_);
  }

  const ValidatedConfig& cfg_;
  const SimOptions& opt_;
  RandomStream& rng_;
  ArrivalRing queue_;
  double lambda_;
  double mu_;

  ServerState state_;
  double now_ = 0.0;
  double next_arrival_ = 0.0;
  double departure_ = 0.0;
  double timer_end_ = 0.0;
  double area_ = 0.0;
  double sojourn_sum_ = 0.0;
  SimMetrics out_;
};

struct MeanCi {
  double mean;
  double half;
};

MeanCi mean_ci(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  // Pairwise sums, always in stream order.
  auto pairwise = [](auto&& self, const double* p, std::size_t len) -> double {
    if (len <= 8) return std::accumulate(p, p + len, 0.0);
    const std::size_t mid = len / 2;
    return self(self, p, mid) + self(self, p + mid, len - mid);
  };
  const double mean = pairwise(pairwise, xs.data(), xs.size()) / n;
  std::vector<double> dev(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) dev[i] = (xs[i] - mean) * (xs[i] - mean);
  const double var = pairwise(pairwise, dev.data(), dev.size()) / (n - 1.0);
  const boost::math::students_t dist(n - 1.0);
  const double tq = boost::math::quantile(boost::math::complement(dist, 0.025));
  return {mean, tq * std::sqrt(var / n)};
}

}  // namespace

SimMetrics simulate(const ValidatedConfig& config, const SimOptions& options, RandomStream& stream) {
  if (!(options.horizon > 0.0) || !std::isfinite(options.horizon)) {
    throw Error(ErrorCode::InvalidArgument, "horizon must be a positive finite time");
  }
  if (!(options.warmup >= 0.0) || options.warmup >= options.horizon) {
    throw Error(ErrorCode::InvalidArgument, "warm-up must lie in [0, horizon)");
  }
  Run run(config, options, stream);
  return run.execute();
}

Replication replicate(const ValidatedConfig& config, const SimOptions& options,
                      std::uint64_t base_seed, int reps, int threads) {
  if (reps < 2) throw Error(ErrorCode::InvalidArgument, "replicate needs reps >= 2");
  if (options.trace) throw Error(ErrorCode::InvalidArgument, "tracing is single-run only");

  Replication out;
  out.runs.resize(static_cast<std::size_t>(reps));
  std::vector<std::string> errors(static_cast<std::size_t>(reps));
  auto work = [&](int first, int stride) {
    for (int r = first; r < reps; r += stride) {
      try {
        RandomStream stream(base_seed, static_cast<std::uint64_t>(r));
        out.runs[static_cast<std::size_t>(r)] = simulate(config, options, stream);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(r)] = e.what();
      }
    }
  };
  const int workers = std::clamp(threads, 1, reps);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw Error(ErrorCode::InvalidArgument, "replication failed: " + e);
  }

  std::vector<double> ne, w, l;
  SimMetrics& s = out.summary;
  s.per_state_time.sleep.assign(out.runs.front().per_state_time.sleep.size(), 0.0);
  for (const auto& run : out.runs) {
    ne.push_back(run.ne);
    w.push_back(run.w_mean);
    l.push_back(run.mean_in_system);
    s.arrivals += run.arrivals;
    s.served += run.served;
    s.dropped += run.dropped;
    s.in_flight += run.in_flight;
    s.energy += run.energy;
    s.observed_time += run.observed_time;
    s.per_state_time.busy += run.per_state_time.busy;
    s.per_state_time.idle += run.per_state_time.idle;
    for (std::size_t i = 0; i < run.per_state_time.sleep.size(); ++i) {
      s.per_state_time.sleep[i] += run.per_state_time.sleep[i];
    }
    for (const auto& warning : run.warnings) {
      if (std::find(s.warnings.begin(), s.warnings.end(), warning) == s.warnings.end()) {
        s.warnings.push_back(warning);
      }
    }
  }
  const auto ne_ci = mean_ci(ne);
  const auto w_ci = mean_ci(w);
  const auto l_ci = mean_ci(l);
  s.ne = ne_ci.mean;
  s.ne_ci_halfwidth = ne_ci.half;
  s.w_mean = w_ci.mean;
  s.w_ci_halfwidth = w_ci.half;
  s.mean_in_system = l_ci.mean;
  s.mean_in_system_ci_halfwidth = l_ci.half;
  s.replications = reps;
  return out;
}

nlohmann::json to_json(const SimMetrics& m) {
  return {{"ne", m.ne},
          {"ne_ci_halfwidth", m.ne_ci_halfwidth},
          {"w_mean", m.w_mean},
          {"w_ci_halfwidth", m.w_ci_halfwidth},
          {"mean_in_system", m.mean_in_system},
          {"arrivals", m.arrivals},
          {"served", m.served},
          {"dropped", m.dropped},
          {"in_flight", m.in_flight},
          {"energy", m.energy},
          {"observed_time", m.observed_time},
          {"per_state_time",
           {{"busy", m.per_state_time.busy},
            {"idle", m.per_state_time.idle},
            {"sleep", m.per_state_time.sleep}}},
          {"replications", m.replications},
          {"w_mean_excludes_dropped", true},
          {"warnings", m.warnings}};
}

}  // namespace bmv
