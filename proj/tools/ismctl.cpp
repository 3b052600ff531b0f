// ismctl: command-line front end for the ISM solver.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include "CLI11.hpp"
#include "ism/bounds.hpp"
#include "ism/eval.hpp"
#include "ism/io.hpp"
#include "ism/synthesis.hpp"
#include "ism/verify.hpp"

namespace {

using namespace ism;

enum Exit : int { kOk = 0, kValidation = 2, kSynthFail = 3, kBudget = 4, kIo = 5 };

// Thrown to leave main with a specific exit code after printing a message.
struct ExitWith {
  int code;
};

struct SwitchChoice {
  std::optional<double> stay;
  std::optional<double> paper_eps;
  std::string file;
};

void add_switch_options(CLI::App* cmd, SwitchChoice& sw) {
  auto* stay = cmd->add_option("--stay", sw.stay, "Replace T by build_switch(n, stay)");
  auto* eps = cmd->add_option("--paper-eps", sw.paper_eps, "Mixing epsilon; uses stay = 1 - eps");
  auto* file = cmd->add_option("--switch", sw.file, "Replace T by the matrix in this JSON file");
  stay->excludes(eps)->excludes(file);
  eps->excludes(file);
}

GameInstance builtin(const std::string& name) {
  if (name == "rps") return build_rps();
  if (name == "rps-mem") return build_rps_mem();
  if (name.rfind("ant-avoid", 0) == 0) {
    int cells = 25;
    if (auto c = name.find(':'); c != std::string::npos) cells = std::stoi(name.substr(c + 1));
    return build_anticipate_avoid(cells);
  }
  std::cerr << "unknown builtin game '" << name << "' (rps, rps-mem, ant-avoid[:N])\n";
  throw ExitWith{kIo};
}

// A game argument is a JSON file or builtin:<name>.
GameInstance load_game(const std::string& arg, bool strict = true) {
  if (arg.rfind("builtin:", 0) == 0) return builtin(arg.substr(8));
  return parse_game(read_text(arg), strict);
}

GameInstance apply_switch(GameInstance g, const SwitchChoice& sw) {
  const std::size_t n = g.num_policies();
  if (sw.paper_eps) {
    const double stay = 1.0 - *sw.paper_eps;
    std::cerr << "paper eps " << *sw.paper_eps << " -> stay " << stay << "\n";
    return g.with_switch(build_switch(n, stay));
  }
  if (sw.stay) return g.with_switch(build_switch(n, *sw.stay));
  if (!sw.file.empty()) {
    auto t = parse_switch(read_text(sw.file));
    if (t.size() != n) {
      std::cerr << "switch matrix is " << t.size() << "x" << t.size() << " but the game has " << n << " policies\n";
      throw ExitWith{kValidation};
    }
    return g.with_switch(std::move(t));
  }
  return g;
}

void require_valid(const GameInstance& g) {
  const auto rep = validate(g);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  if (rep.ok()) return;
  for (const auto& v : rep.violations) std::cerr << "violation: " << v << "\n";
  throw ExitWith{kValidation};
}

std::string belief_str(const Belief& b) {
  std::string s = "(";
  char buf[32];
  for (std::size_t i = 0; i < b.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6f", b[i]);
    s += (i ? ", " : "") + std::string(buf);
  }
  return s + ")";
}

std::string obs_str(const Observation& o, const GameInstance& g) {
  return "(" + g.arena.state_names()[o.state] + ", " + g.arena.p2_action_names()[o.action] + ")";
}

Exec exec_from(bool serial) { return serial ? Exec::serial : Exec::parallel; }

int report_synthesis(const SynthesisOutcome& out, const GameInstance& g) {
  if (auto* f = std::get_if<SynthesisFailure>(&out)) {
    std::cerr << "Alg. 1 FAIL at state " << f->source_state << " on observation "
              << obs_str(f->observation, g) << "\n"
              << "  source belief " << belief_str(f->source_belief) << "\n"
              << "  fresh target  " << belief_str(f->attempted_target) << "\n"
              << "  witness       " << belief_str(f->witness.witness) << " pre "
              << f->witness.pre_distance << " post " << f->witness.post_distance << "\n";
    return kSynthFail;
  }
  if (auto* b = std::get_if<BudgetExceeded>(&out)) {
    std::cerr << "budget exceeded: " << b->reason << " (" << b->stats.states << " states, "
              << b->stats.elapsed_seconds << " s)\n";
    return kBudget;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Information state machines for games against switching oblivious opponents"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  bool serial = false;
  app.add_flag("--serial", serial, "Run every kernel on one thread");

  // validate
  std::string v_game;
  auto* validate_cmd = app.add_subcommand("validate", "Check a game file against its invariants");
  validate_cmd->add_option("game", v_game, "Game file or builtin:<name>")->required();

  // build-game
  std::string bg_name, bg_out;
  int bg_cells = 25;
  SwitchChoice bg_sw;
  auto* build_cmd = app.add_subcommand("build-game", "Write a builtin benchmark game as JSON");
  build_cmd->add_option("name", bg_name, "rps, rps-mem or ant-avoid")->required();
  build_cmd->add_option("--cells", bg_cells, "Corridor length for ant-avoid");
  build_cmd->add_option("-o,--output", bg_out, "Output file (default: stdout)");
  add_switch_options(build_cmd, bg_sw);

  // bounds
  std::string b_game, b_csv;
  SwitchChoice b_sw;
  auto* bounds_cmd = app.add_subcommand("bounds", "Print kappa, t*, contraction and discrepancy constants");
  bounds_cmd->add_option("game", b_game, "Game file or builtin:<name>")->required();
  bounds_cmd->add_option("--csv", b_csv, "Also write the per-observation table as CSV");
  add_switch_options(bounds_cmd, b_sw);

  // synth
  std::string s_game, s_out, s_dot, s_order = "fifo";
  double s_lambda = 0.1, s_max_seconds = 3600.0;
  std::size_t s_max_states = 100000;
  bool s_floor = false;
  SwitchChoice s_sw;
  auto* synth_cmd = app.add_subcommand("synth", "Build an ISM with the worklist synthesizer");
  synth_cmd->add_option("game", s_game, "Game file or builtin:<name>")->required();
  synth_cmd->add_option("--lambda", s_lambda, "Consistency radius")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--max-states", s_max_states, "State budget")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--max-seconds", s_max_seconds, "Time budget")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--order", s_order, "Worklist order")->check(CLI::IsMember({"fifo", "lifo"}));
  synth_cmd->add_flag("--floor", s_floor, "Restrict edge checks to beliefs >= t*");
  synth_cmd->add_option("-o,--output", s_out, "ISM output file")->required();
  synth_cmd->add_option("--dot", s_dot, "Also write a DOT rendering");
  add_switch_options(synth_cmd, s_sw);

  // check-edge
  std::string c_query;
  auto* check_cmd = app.add_subcommand("check-edge", "Decide consistency of one edge query");
  check_cmd->add_option("query", c_query, "Query JSON file")->required();

  // verify
  std::string vf_game, vf_ism;
  double vf_lambda = 0.1;
  std::size_t vf_seqs = 10000, vf_len = 50;
  std::uint64_t vf_seed = 1;
  SwitchChoice vf_sw;
  auto* verify_cmd = app.add_subcommand("verify", "Re-check every edge and sample belief gaps");
  verify_cmd->add_option("game", vf_game, "Game file or builtin:<name>")->required();
  verify_cmd->add_option("ism", vf_ism, "ISM file")->required();
  verify_cmd->add_option("--lambda", vf_lambda, "Consistency radius")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--sequences", vf_seqs, "Sampled observation sequences");
  verify_cmd->add_option("--max-len", vf_len, "Sequence length");
  verify_cmd->add_option("--seed", vf_seed, "Root seed");
  add_switch_options(verify_cmd, vf_sw);

  // plan
  std::string p_game, p_ism, p_out;
  double p_gamma = 0.95, p_tol = 1e-10;
  SwitchChoice p_sw;
  auto* plan_cmd = app.add_subcommand("plan", "Compose game and ISM, then run policy iteration");
  plan_cmd->add_option("game", p_game, "Game file or builtin:<name>")->required();
  plan_cmd->add_option("ism", p_ism, "ISM file")->required();
  plan_cmd->add_option("--gamma", p_gamma, "Discount factor")->check(CLI::Range(0.0, 1.0));
  plan_cmd->add_option("--tol", p_tol, "Policy evaluation tolerance");
  plan_cmd->add_option("-o,--output", p_out, "Policy output file")->required();
  add_switch_options(plan_cmd, p_sw);

  // simulate
  std::string m_game, m_ism, m_policy, m_trace, m_script;
  std::optional<double> m_stay_actual;
  std::size_t m_horizon = 100000;
  std::uint64_t m_seed = 1;
  SwitchChoice m_sw;
  auto* sim_cmd = app.add_subcommand("simulate", "Play the planner policy against the opponent");
  sim_cmd->add_option("game", m_game, "Game file or builtin:<name>")->required();
  sim_cmd->add_option("ism", m_ism, "ISM file")->required();
  sim_cmd->add_option("policy", m_policy, "Policy file")->required();
  sim_cmd->add_option("--stay-actual", m_stay_actual, "Opponent's true stay probability (default: design T)");
  sim_cmd->add_option("--horizon", m_horizon, "Steps to simulate");
  sim_cmd->add_option("--seed", m_seed, "Root seed");
  sim_cmd->add_option("--script", m_script, "Replay opponent observations from this file instead");
  sim_cmd->add_option("--trace", m_trace, "Write the per-step trace as CSV");
  add_switch_options(sim_cmd, m_sw);

  // bench
  std::string bn_name;
  double bn_lambda = 0.1, bn_gamma = 0.95, bn_max_seconds = 3600.0;
  std::size_t bn_max_states = 100000;
  int bn_cells = 25;
  SwitchChoice bn_sw;
  auto* bench_cmd = app.add_subcommand("bench", "One benchmark row: |M|, synth time, |MDP|, PI time");
  bench_cmd->add_option("name", bn_name, "rps, rps-mem or ant-avoid")
      ->required()
      ->check(CLI::IsMember({"rps", "rps-mem", "ant-avoid"}));
  bench_cmd->add_option("--lambda", bn_lambda, "Consistency radius")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--gamma", bn_gamma, "Discount factor")->check(CLI::Range(0.0, 1.0));
  bench_cmd->add_option("--cells", bn_cells, "Corridor length for ant-avoid");
  bench_cmd->add_option("--max-states", bn_max_states, "State budget");
  bench_cmd->add_option("--max-seconds", bn_max_seconds, "Time budget");
  add_switch_options(bench_cmd, bn_sw);

  // grid
  std::string g_game, g_out;
  GridSpec g_spec;
  g_spec.lambdas = {0.1};
  g_spec.stays = {0.5};
  g_spec.actual_stays = {0.5};
  auto* grid_cmd = app.add_subcommand("grid", "Synthesize, plan and simulate over a parameter grid");
  grid_cmd->add_option("game", g_game, "Game file or builtin:<name>")->required();
  grid_cmd->add_option("--lambdas", g_spec.lambdas, "Lambda values")->delimiter(',');
  grid_cmd->add_option("--stays", g_spec.stays, "Design stay values")->delimiter(',');
  grid_cmd->add_option("--actual", g_spec.actual_stays, "Actual stay values")->delimiter(',');
  grid_cmd->add_option("--horizon", g_spec.horizon, "Steps per episode");
  grid_cmd->add_option("--seeds", g_spec.seeds, "Episode seeds")->delimiter(',');
  grid_cmd->add_option("--gamma", g_spec.gamma, "Discount factor");
  grid_cmd->add_option("--max-states", g_spec.max_states, "State budget per synthesis");
  grid_cmd->add_option("--max-seconds", g_spec.max_seconds, "Time budget per synthesis");
  grid_cmd->add_flag("--timing", g_spec.timing, "Fill the timing columns (output no longer reproducible)");
  grid_cmd->add_option("-o,--output", g_out, "CSV output file (default: stdout)");

  CLI11_PARSE(app, argc, argv);
  const Exec exec = exec_from(serial);

  try {
    if (*validate_cmd) {
      const auto g = load_game(v_game, false);
      const auto rep = validate(g);
      for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
      for (const auto& v : rep.violations) std::cout << "violation: " << v << "\n";
      std::cout << (rep.ok() ? "valid" : "invalid") << " (" << g.arena.num_states() << ", "
                << g.arena.num_p1_actions() << ", " << g.arena.num_p2_actions() << ", "
                << g.num_policies() << ")\n";
      return rep.ok() ? kOk : kValidation;
    }

    if (*build_cmd) {
      std::string name = bg_name == "ant-avoid" ? "ant-avoid:" + std::to_string(bg_cells) : bg_name;
      const auto g = apply_switch(builtin(name), bg_sw);
      const auto text = dump_game(g);
      if (bg_out.empty()) std::cout << text;
      else write_text(bg_out, text);
      return kOk;
    }

    if (*bounds_cmd) {
      const auto g = apply_switch(load_game(b_game), b_sw);
      require_valid(g);
      const auto r = bound_report(g);
      std::printf("t* = %.10g  kappa_max = %.10g  termination guaranteed: %s\n", r.t_star, r.kappa_max,
                  r.termination_guaranteed ? "yes" : "no");
      std::printf("%-24s %12s %12s %12s %14s\n", "observation", "alpha_max", "alpha_sum", "kappa", "contraction");
      std::string csv = "state,action,alpha_max,alpha_sum,kappa,contraction\n";
      char buf[256];
      for (const auto& o : r.observations) {
        const std::string c = o.contraction ? std::to_string(*o.contraction) : "NA";
        std::printf("%-24s %12.6f %12.6f %12.6f %14s\n", obs_str(o.observation, g).c_str(), o.alpha_max,
                    o.alpha_sum, o.kappa, c.c_str());
        std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%.17g,%.17g,",
                      g.arena.state_names()[o.observation.state].c_str(),
                      g.arena.p2_action_names()[o.observation.action].c_str(), o.alpha_max, o.alpha_sum,
                      o.kappa);
        csv += buf + (o.contraction ? std::to_string(*o.contraction) : std::string("NA")) + "\n";
      }
      if (g.arena.num_states() <= 50) {
        std::printf("%-16s %10s %12s\n", "state", "R_max", "alpha_max(s)");
        for (Index s = 0; s < g.arena.num_states(); ++s)
          std::printf("%-16s %10.4f %12.4f\n", g.arena.state_names()[s].c_str(), r.r_max[s], r.alpha_max[s]);
      }
      if (!b_csv.empty()) write_text(b_csv, csv);
      return kOk;
    }

    if (*synth_cmd) {
      const auto g = apply_switch(load_game(s_game), s_sw);
      require_valid(g);
      SynthesisOptions o;
      o.lambda = s_lambda;
      o.max_states = s_max_states;
      o.max_seconds = s_max_seconds;
      o.order = s_order == "lifo" ? WorklistOrder::lifo : WorklistOrder::fifo;
      o.floor_at_min_entry = s_floor;
      o.exec = exec;
      const auto out = synthesize(g, o);
      if (int code = report_synthesis(out, g); code != kOk) return code;
      const auto& ok = std::get<SynthesisSuccess>(out);
      for (const auto& w : ok.stats.warnings) std::cerr << "warning: " << w << "\n";
      write_text(s_out, serialize(ok.machine));
      if (!s_dot.empty()) write_text(s_dot, export_dot(ok.machine, &g));
      std::cout << "states " << ok.stats.states << " edges " << ok.stats.edges << " checks "
                << ok.stats.consistency_checks << " seconds " << ok.stats.elapsed_seconds << "\n";
      return kOk;
    }

    if (*check_cmd) {
      const auto q = parse_query(read_text(c_query), std::filesystem::path(c_query).parent_path());
      const auto v = check_edge(q, exec);
      if (v.consistent()) {
        std::cout << "consistent\n";
      } else {
        const auto& r = *v.refutation;
        std::cout << "refuted\nwitness " << belief_str(r.witness) << "\npre_distance " << r.pre_distance
                  << "\npost_distance " << r.post_distance << "\n";
      }
      return kOk;
    }

    if (*verify_cmd) {
      const auto g = apply_switch(load_game(vf_game), vf_sw);
      require_valid(g);
      const auto ism = deserialize(read_text(vf_ism));
      VerifyOptions o;
      o.lambda = vf_lambda;
      o.num_sequences = vf_seqs;
      o.max_len = vf_len;
      o.seed = vf_seed;
      o.exec = exec;
      const auto r = verify_consistency(ism, g, o);
      std::cout << "edges checked " << r.edges_checked << ", inconsistent " << r.inconsistent_edges.size() << "\n";
      for (const auto& e : r.inconsistent_edges)
        std::cout << "  " << e.source << " -" << obs_str(e.observation, g) << "-> " << e.target << " witness "
                  << belief_str(e.refutation.witness) << " post " << e.refutation.post_distance << "\n";
      std::cout << "sequences " << r.sequences << ", max gap " << r.max_observed_gap << ", violations "
                << r.violations << ", undefined runs " << r.undefined_runs << "\n";
      return r.ok() ? kOk : kSynthFail;
    }

    if (*plan_cmd) {
      const auto g = apply_switch(load_game(p_game), p_sw);
      require_valid(g);
      const auto ism = deserialize(read_text(p_ism));
      PlanOptions o;
      o.gamma = p_gamma;
      o.tol = p_tol;
      o.exec = exec;
      const auto pol = plan(g, ism, o);
      write_text(p_out, serialize_policy(pol, g, p_gamma));
      std::cout << "composed states " << pol.composed.size() << ", improvements " << pol.plan.improvements
                << ", value(s0, m0) " << pol.plan.values[0] << "\n";
      return kOk;
    }

    if (*sim_cmd) {
      const auto g = apply_switch(load_game(m_game), m_sw);
      require_valid(g);
      const auto ism = deserialize(read_text(m_ism));
      const auto pol = deserialize_policy(read_text(m_policy), compose(g, ism), g);
      EpisodeTrace tr;
      if (!m_script.empty()) {
        tr = replay(g, ism, pol, parse_script(read_text(m_script), g), m_horizon);
      } else {
        const SwitchModel ta = m_stay_actual ? build_switch(g.num_policies(), *m_stay_actual) : g.switching;
        tr = simulate(g, ism, pol, ta, m_horizon, m_seed);
      }
      if (!m_trace.empty()) {
        std::ofstream os(m_trace);
        if (!os) throw std::runtime_error("cannot write " + m_trace);
        os << "t,state,policy,a1,a2,reward,ism_state,reset\n";
        for (std::size_t t = 0; t < tr.size(); ++t) {
          const auto& st = tr[t];
          os << t << ',' << g.arena.state_names()[st.state] << ','
             << (st.policy ? std::to_string(*st.policy) : std::string("NA")) << ','
             << g.arena.p1_action_names()[st.a1] << ',' << g.arena.p2_action_names()[st.a2] << ',' << st.reward
             << ',' << st.ism_state << ',' << st.reset << '\n';
        }
      }
      if (tr.empty()) {
        std::cout << "empty trace\n";
        return kOk;
      }
      const auto mr = metrics(tr, ism, g);
      std::printf("steps %zu  r_avg %.6f  ap_avg %.6f  policy_pred %s  resets %zu\n", mr.steps, mr.r_avg,
                  mr.ap_avg, mr.policy_pred ? std::to_string(*mr.policy_pred).c_str() : "NA", mr.resets);
      return kOk;
    }

    if (*bench_cmd) {
      GameInstance g = bn_name == "rps" ? build_rps()
                       : bn_name == "rps-mem" ? build_rps_mem()
                                              : build_anticipate_avoid(bn_cells);
      g = apply_switch(std::move(g), bn_sw);
      require_valid(g);
      SynthesisOptions o;
      o.lambda = bn_lambda;
      o.max_states = bn_max_states;
      o.max_seconds = bn_max_seconds;
      o.exec = exec;
      const auto out = synthesize(g, o);
      std::printf("%-10s lambda %-6g t* %-8.4g ", bn_name.c_str(), bn_lambda, g.switching.min_entry());
      if (auto* f = std::get_if<SynthesisFailure>(&out)) {
        std::printf("|M| Alg. 1 Fail (after %zu states, %.3f s)\n", f->stats.states, f->stats.elapsed_seconds);
        return report_synthesis(out, g);
      }
      if (auto* b = std::get_if<BudgetExceeded>(&out)) {
        std::printf("|M| Timeout (%zu states, %.3f s)\n", b->stats.states, b->stats.elapsed_seconds);
        return kBudget;
      }
      const auto& ok = std::get<SynthesisSuccess>(out);
      PlanOptions po;
      po.gamma = bn_gamma;
      po.exec = exec;
      const auto t0 = std::chrono::steady_clock::now();
      const auto pol = plan(g, ok.machine, po);
      const double pi_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      std::printf("|M| %zu  synth %.3f s  |MDP| %zu  PI %.3f s\n", ok.stats.states, ok.stats.elapsed_seconds,
                  pol.composed.size(), pi_s);
      return kOk;
    }

    if (*grid_cmd) {
      const auto g = load_game(g_game);
      require_valid(g);
      const auto rows = run_grid(g, g_spec, exec);
      if (g_out.empty()) {
        write_grid_csv(std::cout, g_spec, rows);
      } else {
        std::ofstream os(g_out);
        if (!os) throw std::runtime_error("cannot write " + g_out);
        write_grid_csv(os, g_spec, rows);
      }
      return kOk;
    }
  } catch (const ExitWith& e) {
    return e.code;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kIo;
  } catch (const LpFailure& e) {
    std::cerr << "LP failure: " << e.what() << "\n";
    return 1;
  } catch (const IsmMismatch& e) {
    std::cerr << "ISM/game mismatch: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kOk;
}
