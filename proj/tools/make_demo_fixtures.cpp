// Writes the demo replay store: for every (eval demand, strategy, model) cell
// of a bench config, a recorded answer holding the exact optimal dispatch.
//
//   make_demo_fixtures <config.json>
//
// The store named by the config's replay_path is overwritten.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "edbench/config.h"
#include "edbench/errors.h"
#include "edbench/format.h"
#include "edbench/prompt.h"
#include "edbench/replay_store.h"
#include "edbench/solver.h"

namespace {

constexpr const char* kRecordedAt = "2025-01-01T00:00:00Z";

std::string answer_text(const edbench::EdSolution& sol) {
  std::string pg = "[";
  for (std::size_t i = 0; i < sol.dispatch.pg.size(); ++i) {
    if (i > 0) pg += ", ";
    pg += edbench::format_roundtrip(sol.dispatch.pg[i]);
  }
  pg += "]";
  return "PD = " + edbench::format_number(sol.dispatch.pd) + " MW, Cost = " +
         edbench::format_number(sol.cost) + "\nPG = " + pg + "\n";
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_demo_fixtures <config.json>\n";
    return 2;
  }
  try {
    const auto cfg = edbench::load_bench_config(argv[1]);
    const auto sys = edbench::load_system_file(cfg.system_path);
    cfg.scenarios.validate(sys);
    const auto fs = edbench::build_few_shot_set(sys, cfg.scenarios.few_shot_pds);

    std::filesystem::remove(cfg.replay_path);
    edbench::ReplayStore store(cfg.replay_path, edbench::ReplayStore::Mode::kAppend);
    for (double pd : cfg.scenarios.eval_pds) {
      const auto sol = edbench::solve_ed(sys, pd);
      const std::string text = answer_text(sol);
      for (auto strategy : cfg.strategies) {
        const auto fp = edbench::prompt_fingerprint(fs, pd, strategy);
        for (const auto& m : cfg.models) {
          edbench::LlmExchange ex;
          ex.prompt_fingerprint = fp;
          ex.model = m.name;
          ex.raw_response = text;
          ex.latency_s = 0.0;
          ex.recorded_at = kRecordedAt;
          ex.transport_meta["source"] = "exact-solver";
          store.put(ex);
        }
      }
    }
    std::cerr << "wrote " << store.size() << " exchanges to " << cfg.replay_path.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "make_demo_fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
