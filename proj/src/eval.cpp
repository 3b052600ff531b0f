#include "ism/eval.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <variant>

#include "ism/random.hpp"
#include "ism/synthesis.hpp"

namespace ism {

ReplayError::ReplayError(const std::string& what, std::size_t i)
    : std::runtime_error(what + " at script index " + std::to_string(i)), index(i) {}

namespace {

Belief step_belief(const Belief& b, const Observation& o, const GameInstance& g, const SwitchModel& t) {
  try {
    return transform(b, o, g, t);
  } catch (const ZeroProbabilityObservation&) {
    return uniform_belief(g.num_policies());
  }
}

Index act(const PlannerPolicy& p, Index s, Index m) {
  auto a = p.action(s, m);
  return a ? *a : 0;
}

}  // namespace

EpisodeTrace simulate(const GameInstance& g, const Ism& ism, const PlannerPolicy& pol,
                      const SwitchModel& t_actual, std::size_t horizon, std::uint64_t seed,
                      const SimulateOptions& opts) {
  if (t_actual.size() != g.num_policies()) throw std::invalid_argument("simulate: switch size mismatch");
  EpisodeTrace tr;
  tr.reserve(horizon);
  if (horizon == 0) return tr;
  Rng rng(derive_seed(seed, 0));
  const auto& a = g.arena;
  std::uniform_int_distribution<Index> pick(0, g.num_policies() - 1);
  Index s = a.initial_state(), m = ism.initial(), j = pick(rng);
  Belief b = uniform_belief(g.num_policies());
  std::optional<Belief> ba;
  if (opts.track_actual_belief) ba = b;
  for (std::size_t t = 0; t < horizon; ++t) {
    TraceStep st;
    st.state = s;
    st.policy = j;
    st.ism_state = m;
    st.exact = b;
    st.exact_actual = ba;
    st.a2 = sample_index(g.policies[j].at(s), rng);
    st.a1 = act(pol, s, m);
    st.reward = a.reward(s, st.a1, st.a2);
    const Observation o{s, st.a2};
    const Index s2 = sample_index(a.next(s, st.a1, st.a2), rng);
    j = sample_index(t_actual.row(j), rng);
    auto d = advance(ism, m, o);
    st.reset = !d;
    m = d ? *d : ism.initial();
    b = step_belief(b, o, g, g.switching);
    if (ba) ba = step_belief(*ba, o, g, t_actual);
    s = s2;
    tr.push_back(std::move(st));
  }
  return tr;
}

EpisodeTrace replay(const GameInstance& g, const Ism& ism, const PlannerPolicy& pol,
                    const std::vector<Observation>& script, std::size_t horizon) {
  const auto& a = g.arena;
  const std::size_t len = std::min(horizon, script.size());
  EpisodeTrace tr;
  tr.reserve(len);
  Index m = ism.initial();
  Belief b = uniform_belief(g.num_policies());
  for (std::size_t t = 0; t < len; ++t) {
    const Observation o = script[t];
    if (o.state >= a.num_states() || o.action >= a.num_p2_actions())
      throw ReplayError("script observation out of range", t);
    TraceStep st;
    st.state = o.state;
    st.a2 = o.action;
    st.ism_state = m;
    st.exact = b;
    st.a1 = act(pol, o.state, m);
    st.reward = a.reward(o.state, st.a1, st.a2);
    if (t + 1 < len && a.transition(o.state, st.a1, st.a2, script[t + 1].state) <= 0.0)
      throw ReplayError("scripted move has no successor in the arena", t);
    auto d = advance(ism, m, o);
    st.reset = !d;
    m = d ? *d : ism.initial();
    b = step_belief(b, o, g, g.switching);
    tr.push_back(std::move(st));
  }
  return tr;
}

MetricsReport metrics(const EpisodeTrace& trace, const Ism& ism, const GameInstance& g) {
  if (trace.empty()) throw std::invalid_argument("metrics: empty trace");
  MetricsReport r;
  double pp = 0.0;
  std::size_t pp_n = 0;
  for (const auto& st : trace) {
    const Belief& bm = ism.belief(st.ism_state);
    r.r_avg += st.reward;
    r.ap_avg += observation_probability(bm, g.alphas({st.state, st.a2}));
    if (st.policy) {
      pp += bm[*st.policy];
      ++pp_n;
    }
    if (st.reset) ++r.resets;
  }
  r.steps = trace.size();
  r.r_avg /= static_cast<double>(r.steps);
  r.ap_avg /= static_cast<double>(r.steps);
  if (pp_n) r.policy_pred = pp / static_cast<double>(pp_n);
  return r;
}

namespace {

void mean_se(const std::vector<double>& x, double& mean, double& se) {
  const double n = static_cast<double>(x.size());
  mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  se = x.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

}  // namespace

std::vector<GridRow> run_grid(const GameInstance& inst, const GridSpec& spec, Exec exec) {
  using clock = std::chrono::steady_clock;
  std::vector<GridRow> rows;
  const std::size_t n = inst.num_policies();
  for (double lambda : spec.lambdas)
    for (double stay : spec.stays) {
      const GameInstance g = inst.with_switch(build_switch(n, stay));
      SynthesisOptions so;
      so.lambda = lambda;
      so.max_states = spec.max_states;
      so.max_seconds = spec.max_seconds;
      so.exec = exec;
      const auto t0 = clock::now();
      auto out = synthesize(g, so);
      const double synth_s = std::chrono::duration<double>(clock::now() - t0).count();
      auto* ok = std::get_if<SynthesisSuccess>(&out);
      if (!ok) {
        for (double actual : spec.actual_stays) {
          GridRow r;
          r.lambda = lambda;
          r.stay_design = stay;
          r.stay_actual = actual;
          r.status = std::holds_alternative<SynthesisFailure>(out) ? "fail" : "budget";
          r.synth_seconds = synth_s;
          rows.push_back(r);
        }
        continue;
      }
      PlanOptions po;
      po.gamma = spec.gamma;
      po.exec = exec;
      const auto t1 = clock::now();
      const PlannerPolicy pol = plan(g, ok->machine, po);
      const double plan_s = std::chrono::duration<double>(clock::now() - t1).count();

      for (double actual : spec.actual_stays) {
        const SwitchModel ta = build_switch(n, actual);
        const std::size_t ns = spec.seeds.size();
        std::vector<double> ra(ns), ap(ns), pp(ns);
        const auto nsi = static_cast<std::int64_t>(ns);
#pragma omp parallel for schedule(static) if (exec == Exec::parallel)
        for (std::int64_t k = 0; k < nsi; ++k) {
          const auto i = static_cast<std::size_t>(k);
          const auto tr = simulate(g, ok->machine, pol, ta, spec.horizon, spec.seeds[i]);
          const auto mr = metrics(tr, ok->machine, g);
          ra[i] = mr.r_avg;
          ap[i] = mr.ap_avg;
          pp[i] = mr.policy_pred.value_or(0.0);
        }
        GridRow r;
        r.lambda = lambda;
        r.stay_design = stay;
        r.stay_actual = actual;
        r.status = "ok";
        mean_se(ra, r.r_avg, r.r_avg_se);
        mean_se(ap, r.ap_avg, r.ap_avg_se);
        mean_se(pp, r.policy_pred, r.policy_pred_se);
        r.ism_states = ok->machine.num_states();
        r.synth_seconds = synth_s;
        r.plan_seconds = plan_s;
        rows.push_back(r);
      }
    }
  return rows;
}

void write_grid_csv(std::ostream& os, const GridSpec& spec, const std::vector<GridRow>& rows) {
  std::string seeds;
  for (std::size_t i = 0; i < spec.seeds.size(); ++i)
    seeds += (i ? ";" : "") + std::to_string(spec.seeds[i]);
  os << "lambda,stay_design,stay_actual,seed,horizon,r_avg,ap_avg,policy_pred,ism_states,"
        "synth_seconds,plan_seconds,r_avg_se,ap_avg_se,policy_pred_se,status\n";
  char buf[512];
  for (const auto& r : rows) {
    std::string timing = "NA,NA";
    if (spec.timing) {
      std::snprintf(buf, sizeof buf, "%.6f,%.6f", r.synth_seconds, r.plan_seconds);
      timing = buf;
    }
    const bool ok = r.status == "ok";
    if (ok) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu", r.r_avg, r.ap_avg, r.policy_pred,
                    r.ism_states);
    } else {
      std::snprintf(buf, sizeof buf, "NA,NA,NA,NA");
    }
    const std::string metrics_part = buf;
    std::string se = "NA,NA,NA";
    if (ok) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g", r.r_avg_se, r.ap_avg_se, r.policy_pred_se);
      se = buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", r.lambda, r.stay_design, r.stay_actual);
    os << buf << seeds << ',' << spec.horizon << ',' << metrics_part << ',' << timing << ',' << se
       << ',' << r.status << '\n';
  }
}

}  // namespace ism
