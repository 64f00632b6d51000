#include "cspipe/norm/seq2seq.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "cspipe/error.hpp"
#include "cspipe/nn/container.hpp"
#include "cspipe/nn/optimizer.hpp"
#include "cspipe/util/text.hpp"

namespace cspipe::norm {

using nn::Expr;
using nn::Graph;
using nn::Mode;
using nlohmann::json;

Seq2SeqHyper Seq2SeqHyper::toy() {
  Seq2SeqHyper h;
  h.hidden = 64;
  h.batch_size = 1;
  h.learning_rate = 0.5;
  h.dropout = 0.0;
  return h;
}

json Seq2SeqHyper::to_json() const {
  return {{"char_dim", char_dim},         {"hidden", hidden},       {"dropout", dropout},
          {"learning_rate", learning_rate}, {"decay_after", decay_after}, {"epochs", epochs},
          {"batch_size", batch_size},     {"clip_norm", clip_norm}, {"seed", seed}};
}

Seq2SeqHyper Seq2SeqHyper::from_json(const json& j) {
  Seq2SeqHyper h;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("char_dim", h.char_dim);
  get("hidden", h.hidden);
  get("dropout", h.dropout);
  get("learning_rate", h.learning_rate);
  get("decay_after", h.decay_after);
  get("epochs", h.epochs);
  get("batch_size", h.batch_size);
  get("clip_norm", h.clip_norm);
  get("seed", h.seed);
  return h;
}

nn::CharVocab CharSeq2Seq::make_vocab(const std::vector<std::string>& words) {
  return nn::CharVocab({"<unk>", "<s>", "</s>"}, words);
}

CharSeq2Seq CharSeq2Seq::for_pairs(const Seq2SeqHyper& hyper, const std::vector<NoisyPair>& pairs) {
  std::vector<std::string> src, tgt;
  for (const auto& p : pairs) {
    src.push_back(p.noisy);
    tgt.push_back(p.clean);
  }
  return CharSeq2Seq(hyper, make_vocab(src), make_vocab(tgt));
}

CharSeq2Seq::CharSeq2Seq(Seq2SeqHyper hyper, nn::CharVocab source, nn::CharVocab target)
    : hyper_(hyper), src_vocab_(std::move(source)), tgt_vocab_(std::move(target)) {
  if (src_vocab_.size() < 3 || tgt_vocab_.size() < 3 || tgt_vocab_.symbol(kEos) != "</s>") {
    throw ArgumentError("seq2seq alphabets must reserve <unk>, <s>, </s>");
  }
  nn::Rng rng(hyper_.seed);
  const int h = hyper_.hidden, e = hyper_.char_dim;
  src_emb_ = nn::Embedding(ps_, "src_emb", src_vocab_.size(), e, 0.1, rng);
  tgt_emb_ = nn::Embedding(ps_, "tgt_emb", tgt_vocab_.size(), e, 0.1, rng);
  encoder_ = nn::BiLstm(ps_, "encoder", {e}, h, rng);
  decoder_ = nn::Lstm(ps_, "decoder", {e, h}, h, rng);
  auto add = [&](const std::string& name, int rows, int cols) -> const nn::Parameter* {
    nn::Parameter& p = ps_.add(name, rows, cols);
    p.value = nn::glorot_init(rows, cols, rng);
    return &p;
  };
  bridge_w_ = add("bridge.w", h, 2 * h);
  nn::Parameter& bb = ps_.add("bridge.b", h, 1);
  bridge_b_ = &bb;
  attn_w_ = add("attn.w", h, 2 * h);
  combine_ctx_ = add("combine.ctx", h, 2 * h);
  combine_h_ = add("combine.h", h, h);
  nn::Parameter& cb = ps_.add("combine.b", h, 1);
  combine_b_ = &cb;
  out_w_ = add("out.w", tgt_vocab_.size(), h);
  nn::Parameter& ob = ps_.add("out.b", tgt_vocab_.size(), 1);
  out_b_ = &ob;
}

std::vector<int> CharSeq2Seq::source_ids(const std::string& source) const { return src_vocab_.encode(source); }

std::vector<int> CharSeq2Seq::target_ids(const std::string& target) const { return tgt_vocab_.encode(target); }

std::string CharSeq2Seq::target_text(const std::vector<int>& ids) const {
  std::string out;
  for (int id : ids) out += tgt_vocab_.symbol(id);
  return out;
}

int CharSeq2Seq::unknown_chars(const std::string& source) const {
  int unknown = 0;
  src_vocab_.encode(source, &unknown);
  return unknown;
}

CharSeq2Seq::Encoded CharSeq2Seq::encode(Graph& g, const std::vector<int>& ids, const Mode& mode) const {
  if (ids.empty()) throw ArgumentError("cannot encode an empty word");
  std::vector<std::vector<Expr>> in;
  in.reserve(ids.size());
  for (int id : ids) in.push_back({nn::dropout(g, src_emb_(g, id), mode)});
  Encoded enc;
  enc.states = encoder_.encode(g, in);
  const int h = hyper_.hidden;
  // [forward last ; backward first] summarises the whole word.
  Expr summary = g.concat({g.slice(enc.states.back(), 0, h), g.slice(enc.states.front(), h, h)});
  enc.init = {g.tanh(g.affine(bridge_b_, {{bridge_w_, summary}})), g.zeros(h)};
  enc.keys.reserve(enc.states.size());
  for (Expr s : enc.states) enc.keys.push_back(g.affine(nullptr, {{attn_w_, s}}));
  return enc;
}

CharSeq2Seq::DecoderState CharSeq2Seq::start(Graph& g, const Encoded& enc) const {
  return {enc.init, g.zeros(hyper_.hidden)};
}

Expr CharSeq2Seq::step(Graph& g, const Encoded& enc, DecoderState& st, int prev, const Mode& mode) const {
  Expr x = nn::dropout(g, tgt_emb_(g, prev), mode);
  Expr inputs[] = {x, st.feed};
  st.lstm = decoder_.step(g, inputs, st.lstm);
  std::vector<Expr> scores;
  scores.reserve(enc.keys.size());
  for (Expr k : enc.keys) scores.push_back(g.dot(st.lstm.h, k));
  Expr alpha = g.softmax(g.concat(scores));
  Expr ctx = g.weighted_sum(alpha, enc.states);
  Expr attentional = g.tanh(g.affine(combine_b_, {{combine_ctx_, ctx}, {combine_h_, st.lstm.h}}));
  attentional = nn::dropout(g, attentional, mode);
  st.feed = attentional;
  return g.affine(out_b_, {{out_w_, attentional}});
}

Expr CharSeq2Seq::loss(Graph& g, const std::string& source, const std::string& target, const Mode& mode) const {
  Encoded enc = encode(g, source_ids(source), mode);
  DecoderState st = start(g, enc);
  std::vector<int> ys = target_ids(target);
  ys.push_back(kEos);
  std::vector<Expr> terms;
  int prev = kBos;
  for (int y : ys) {
    terms.push_back(g.pick_nll(step(g, enc, st, prev, mode), y));
    prev = y;
  }
  return g.sum(terms);
}

double CharSeq2Seq::sequence_log_prob(const std::string& source, const std::string& target) const {
  Graph g;
  return -g.scalar_value(loss(g, source, target, Mode{}));
}

nn::Vec CharSeq2Seq::next_log_probs(const std::string& source, const std::string& prefix) const {
  Graph g;
  Encoded enc = encode(g, source_ids(source), Mode{});
  DecoderState st = start(g, enc);
  int prev = kBos;
  Expr logits;
  for (int y : target_ids(prefix)) {
    step(g, enc, st, prev, Mode{});
    prev = y;
  }
  logits = step(g, enc, st, prev, Mode{});
  return g.value(g.log_softmax(logits));
}

int CharSeq2Seq::max_output_length(const std::string& source) {
  return 3 * static_cast<int>(text::utf8_length(source)) + 5;
}

Hypothesis CharSeq2Seq::greedy(const std::string& source) const {
  auto best = beam(source, 1);
  return best.front();
}

std::vector<Hypothesis> CharSeq2Seq::beam(const std::string& source, int b) const {
  if (b < 1) throw ArgumentError("beam width must be at least 1");
  if (source.empty()) throw ArgumentError("cannot normalize an empty word");
  const int max_len = max_output_length(source);
  Graph g;
  const Mode mode;
  Encoded enc = encode(g, source_ids(source), mode);
  struct Live {
    DecoderState st;
    std::vector<int> ids;
    double score;
  };
  std::vector<Live> live{{start(g, enc), {}, 0.0}};
  std::vector<Hypothesis> done;
  const int vocab = tgt_vocab_.size();
  for (int len = 0; !live.empty(); ++len) {
    struct Expansion {
      double score;
      std::size_t from;
      int symbol;
    };
    std::vector<Expansion> cand;
    std::vector<nn::Vec> dists(live.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
      int prev = live[i].ids.empty() ? kBos : live[i].ids.back();
      Expr logits = step(g, enc, live[i].st, prev, mode);
      dists[i] = g.value(g.log_softmax(logits));
      if (len >= max_len) {
        cand.push_back({live[i].score + dists[i](kEos), i, kEos});
        continue;
      }
      for (int y = kEos; y < vocab; ++y) cand.push_back({live[i].score + dists[i](y), i, y});
    }
    // Best first; ties go to the earlier prefix, then the lower symbol.
    std::stable_sort(cand.begin(), cand.end(), [](const Expansion& a, const Expansion& b) { return a.score > b.score; });
    std::vector<Live> next;
    for (std::size_t k = 0; k < cand.size() && k < static_cast<std::size_t>(b); ++k) {
      const Expansion& e = cand[k];
      if (e.symbol == kEos) {
        done.push_back({target_text(live[e.from].ids), e.score});
      } else {
        Live l{live[e.from].st, live[e.from].ids, e.score};
        l.ids.push_back(e.symbol);
        next.push_back(std::move(l));
      }
    }
    live = std::move(next);
    std::stable_sort(done.begin(), done.end(),
                     [](const Hypothesis& a, const Hypothesis& b) { return a.log_prob > b.log_prob; });
    if (done.size() >= static_cast<std::size_t>(b)) {
      // Scores only fall as prefixes grow, so a live prefix below the b-th
      // completed hypothesis can never enter the result.
      const double bar = done[b - 1].log_prob;
      double best_live = -std::numeric_limits<double>::infinity();
      for (const auto& l : live) best_live = std::max(best_live, l.score);
      if (best_live <= bar) break;
    }
  }
  if (done.size() > static_cast<std::size_t>(b)) done.resize(b);
  return done;
}

json CharSeq2Seq::meta() const {
  return {{"kind", "char_seq2seq"},
          {"hyper", hyper_.to_json()},
          {"source_vocab", src_vocab_.to_json()},
          {"target_vocab", tgt_vocab_.to_json()}};
}

std::unique_ptr<CharSeq2Seq> CharSeq2Seq::from_meta(const json& meta) {
  if (meta.value("kind", "") != "char_seq2seq") throw DataError("not a character seq2seq model");
  return std::make_unique<CharSeq2Seq>(Seq2SeqHyper::from_json(meta.at("hyper")),
                                       nn::CharVocab::from_json(meta.at("source_vocab")),
                                       nn::CharVocab::from_json(meta.at("target_vocab")));
}

void CharSeq2Seq::save(const std::string& path) const { nn::write_container(path, meta(), ps_); }

std::unique_ptr<CharSeq2Seq> CharSeq2Seq::load(const std::string& path) {
  nn::Container c = nn::read_container(path);
  try {
    auto m = from_meta(c.meta);
    nn::assign(m->params(), c);
    return m;
  } catch (const json::exception& e) {
    throw DataError(path + ": bad seq2seq header: " + e.what());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

Seq2SeqReport train_seq2seq(CharSeq2Seq& model, const std::vector<NoisyPair>& train,
                            const std::vector<NoisyPair>& dev,
                            const std::function<void(const Seq2SeqEpoch&)>& on_epoch) {
  if (train.empty()) throw ArgumentError("no training pairs");
  const Seq2SeqHyper& h = model.hyper();
  if (h.batch_size < 1) throw ArgumentError("batch size must be at least 1");
  nn::Rng rng(h.seed ^ 0x5851f42d4c957f2dULL);
  nn::Sgd sgd({nn::OptimizerKind::vanilla_sgd, h.learning_rate, 0.0, h.clip_norm});
  Seq2SeqReport report;
  for (const auto& p : dev) report.unknown_dev_chars += model.unknown_chars(p.noisy);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 1; epoch <= h.epochs; ++epoch) {
    double lr = h.learning_rate;
    for (int e = h.decay_after + 1; e <= epoch; ++e) lr *= 0.5;
    sgd.set_learning_rate(lr);
    std::shuffle(order.begin(), order.end(), rng);
    Mode mode{true, h.dropout, &rng};
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += h.batch_size) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(h.batch_size));
      for (std::size_t k = start; k < end; ++k) {
        const NoisyPair& p = train[order[k]];
        Graph g;
        Expr l = model.loss(g, p.noisy, p.clean, mode);
        total += g.scalar_value(l);
        g.backward(l);
      }
      sgd.update(model.params(), 1.0 / static_cast<double>(end - start));
    }
    Seq2SeqEpoch stats{epoch, lr, total, dev.empty() ? -1.0 : exact_match(model, dev)};
    report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return report;
}

double exact_match(const CharSeq2Seq& model, const std::vector<NoisyPair>& pairs) {
  if (pairs.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& p : pairs) hit += model.greedy(p.noisy).text == p.clean;
  return static_cast<double>(hit) / static_cast<double>(pairs.size());
}

}  // namespace cspipe::norm
