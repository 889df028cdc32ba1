#include "synthetic.hpp"

#include "dcnn/rng.hpp"

namespace dcnn::synthetic {

NetworkSpec trec_spec(std::size_t vocab_size, std::size_t classes) {
  NetworkSpec spec;
  spec.kind = ModelKind::Dcnn;
  spec.vocab_size = vocab_size;
  spec.embed_dim = 32;
  spec.layers = {ConvLayerSpec{8, 5, true, 0}};
  spec.k_top = 4;
  spec.classes = classes;
  spec.dropout = 0.5;
  return spec;
}

OrderTask order_task(std::uint64_t seed, std::size_t train_size, std::size_t eval_size) {
  constexpr std::size_t kFillers = 20;
  OrderTask task;
  const WordId first_filler = Vocabulary::kUnk + 1;
  task.x = static_cast<WordId>(first_filler + kFillers);
  task.y = task.x + 1;
  task.vocab_size = task.y + 1;

  Rng rng(seed);
  auto make = [&](Corpus& c, Split split, std::size_t n) {
    c.split = split;
    c.label_names = {"yx", "xy"};
    for (std::size_t i = 0; i < n; ++i) {
      Example ex;
      ex.label = i % 2;
      const std::size_t len = 4 + rng.below(9);
      for (std::size_t j = 0; j < len; ++j) ex.words.push_back(static_cast<WordId>(first_filler + rng.below(kFillers)));
      const std::size_t at = rng.below(len + 1);
      const WordId a = ex.label == 1 ? task.x : task.y;
      const WordId b = ex.label == 1 ? task.y : task.x;
      ex.words.insert(ex.words.begin() + static_cast<std::ptrdiff_t>(at), {a, b});
      c.examples.push_back(std::move(ex));
    }
  };
  make(task.train, Split::Train, train_size);
  make(task.dev, Split::Dev, eval_size);
  make(task.test, Split::Test, eval_size);
  return task;
}

}  // namespace dcnn::synthetic
