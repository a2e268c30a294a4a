#pragma once

#include "shgs/common.hpp"
#include "shgs/config.hpp"
#include "shgs/dataset.hpp"
#include "shgs/engine.hpp"
#include "shgs/metrics.hpp"
#include "shgs/network.hpp"
#include "shgs/optimizer.hpp"
#include "shgs/report.hpp"
#include "shgs/space.hpp"
#include "shgs/splits.hpp"
#include "shgs/training.hpp"

namespace shgs {

struct RunOutputs {
    EncodedDataset data;
    SplitPlan plan;
    HyperparameterSpace space;
    SweepReport report;
};

// The whole pipeline for one configured sweep: load + encode the dataset,
// stratify the holdout and the k folds, build the (possibly overridden)
// space for the training partition, and run the sweep. Deterministic in
// (config, master seed) except for the runtime fields.
inline RunOutputs execute_run(const RunConfig& cfg, const SweepOptions& options = {}) {
    cfg.validate();
    RunOutputs out;
    const auto raw = load_dataset(cfg.dataset, cfg.target_column);
    out.data = encode_one_hot(raw, cfg.positive_label);

    out.plan = stratified_holdout(out.data, cfg.test_fraction,
                                  derive_seed(cfg.master_seed, seed_salt::holdout));
    out.plan = stratified_kfold(std::move(out.plan), out.data.labels, cfg.folds,
                                derive_seed(cfg.master_seed, seed_salt::kfold));

    out.space = HyperparameterSpace::defaults(static_cast<int>(out.plan.n_train()));
    apply_overrides(out.space, cfg.overrides);

    SweepOptions opts = options;
    if (opts.threads <= 1) opts.threads = cfg.threads;
    out.report = run_shgs(out.data, out.plan, out.space, cfg.target, cfg.iterations,
                          cfg.master_seed, opts);
    out.report.dataset_name = cfg.dataset.stem().string();
    return out;
}

}  // namespace shgs
