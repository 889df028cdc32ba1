#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include "dcnn/data.hpp"
#include "dcnn/network.hpp"
#include "dcnn/params.hpp"

namespace dcnn {

/// Optimisation settings. The defaults are working values for this
/// implementation; none of them is prescribed by the model itself.
struct TrainConfig {
  double learning_rate = 0.05;
  double epsilon = 1e-6;
  L2Coefficients l2 = L2Coefficients::uniform(1e-4);
  std::size_t batch_size = 32;
  std::size_t max_epochs = 50;
  std::size_t patience = 5;  // epochs without dev improvement; 0 disables, ignored without a dev split
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  bool deterministic = true;  // forces one thread

  void validate() const;
};

/// Squared-gradient accumulators, one per parameter array.
class AdagradState {
 public:
  explicit AdagradState(const ParameterStore& params);

  std::size_t size() const { return accum_.size(); }
  const Mat& operator[](std::size_t i) const { return accum_[i]; }
  Mat& operator[](std::size_t i) { return accum_[i]; }

 private:
  std::vector<Mat> accum_;
};

/// accum += g^2; theta -= lr * g / (sqrt(accum) + eps); then zero the gradients.
void adagrad_step(ParameterStore& params, AdagradState& state, const TrainConfig& cfg);

/// -log p(label) + sum_g (lambda_g / 2) ||theta_g||^2
double loss(std::span<const double> log_probs, std::size_t label, const ParameterStore& params,
            const L2Coefficients& l2);

struct Evaluation {
  double loss = 0.0;  // mean cross-entropy plus the L2 penalty
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t total = 0;
  std::vector<std::size_t> class_total;
  std::vector<std::size_t> class_correct;
};

/// Inference-mode pass over a corpus. Argmax ties go to the lowest class id.
Evaluation evaluate(const Network& net, const ParameterStore& params, const Corpus& corpus,
                    const L2Coefficients& l2 = {});

struct EpochMetrics {
  std::size_t epoch = 0;  // 0 is the untrained model
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double dev_loss = 0.0;
  double dev_accuracy = 0.0;
};

/// `epoch<TAB>train-loss<TAB>train-acc<TAB>dev-loss<TAB>dev-acc`
void write_metrics_line(std::ostream& out, const EpochMetrics& m);

struct TrainHooks {
  std::function<void(const EpochMetrics&)> on_epoch;
  // Called whenever the selection accuracy strictly improves.
  std::function<void(const ParameterStore&, const EpochMetrics&)> on_improvement;
};

struct TrainResult {
  ParameterStore params;  // best epoch by dev accuracy (train accuracy without a dev split)
  ParameterStore last;    // after the final epoch
  std::vector<EpochMetrics> metrics;
  std::size_t best_epoch = 0;
};

/// Mini-batch training with Adagrad. Each epoch visits the training split in
/// a seeded shuffle; each batch applies the mean per-example gradient plus the
/// L2 gradient. `initial` replaces random initialisation (e.g. preloaded
/// embeddings).
TrainResult train(const NetworkSpec& spec, const Corpus& train_split, const Corpus* dev_split, const TrainConfig& cfg,
                  const TrainHooks& hooks = {}, std::optional<ParameterStore> initial = std::nullopt);

/// Mean-of-batch gradient of the cross-entropy over `batch`, written into grads
/// (not cleared first). Exposed for the batch/per-example equivalence check.
void accumulate_batch_gradient(const Network& net, const ParameterStore& params, const Corpus& corpus,
                               std::span<const std::size_t> batch, std::uint64_t dropout_seed, GradientSet& grads,
                               std::size_t threads = 1);

}  // namespace dcnn
