#include "mdpu/rmax.hpp"

namespace mdpu {

RmaxResult rmax_run(EnvAdapter& env, const RmaxConfig& cfg, TraceLog* trace) {
    if (cfg.num_states == 0 || cfg.num_actions == 0) throw InvalidInput("|S| and |A| must be positive");
    if (!(cfg.rmax > 0.0) || !(cfg.epsilon > 0.0)) throw InvalidInput("Rmax and epsilon must be positive");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    if (cfg.horizon == 0) throw InvalidInput("horizon must be at least 1");

    RmaxResult out;
    out.k1_formula = k1_rmax(static_cast<double>(cfg.num_states), static_cast<double>(cfg.num_actions),
                             static_cast<double>(cfg.horizon), cfg.rmax, cfg.epsilon, cfg.delta);
    out.k1_used = cfg.k1_override ? *cfg.k1_override : out.k1_formula.clamped();

    ModelLearner learner(env, {env.current_state()}, trace);
    LearnerConfig lc;
    lc.horizon = cfg.horizon;
    lc.rmax = cfg.rmax;
    lc.k1 = out.k1_used;
    lc.model_explore = false;
    lc.check_bounds = false;
    lc.step_budget = cfg.step_budget;
    out.report = learner.run(lc);
    return out;
}

}  // namespace mdpu
