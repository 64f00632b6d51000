#include "cspipe/parser/model.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "cspipe/error.hpp"
#include "cspipe/nn/container.hpp"
#include "cspipe/nn/optimizer.hpp"
#include "cspipe/parser/projective.hpp"
#include "cspipe/treebank/eval.hpp"
#include "cspipe/treebank/tree.hpp"

namespace cspipe::parser {

using nn::Expr;
using nn::Graph;
using nn::Mode;
using nlohmann::json;

// --- hyperparameters and vocabulary ---

ParserHyper ParserHyper::toy() {
  ParserHyper h;
  h.char_dim = 16;
  h.char_hidden = 16;
  h.shared_hidden = 32;
  h.tagger_hidden = 32;
  h.tagger_mlp = 32;
  h.parser_hidden = 48;
  h.parser_mlp = 48;
  h.pos_dim = 16;
  h.dropout = 0.1;
  h.max_epochs = 40;
  h.patience = 8;
  return h;
}

json ParserHyper::to_json() const {
  return {{"char_dim", char_dim},
          {"char_hidden", char_hidden},
          {"shared_hidden", shared_hidden},
          {"tagger_hidden", tagger_hidden},
          {"tagger_mlp", tagger_mlp},
          {"parser_hidden", parser_hidden},
          {"parser_mlp", parser_mlp},
          {"pos_dim", pos_dim},
          {"pipeline", pipeline},
          {"dropout", dropout},
          {"word_dropout", word_dropout},
          {"learning_rate", learning_rate},
          {"momentum", momentum},
          {"max_epochs", max_epochs},
          {"patience", patience},
          {"explore_prob", explore_prob},
          {"explore_from_epoch", explore_from_epoch},
          {"seed", seed}};
}

ParserHyper ParserHyper::from_json(const json& j) {
  ParserHyper h;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("char_dim", h.char_dim);
  get("char_hidden", h.char_hidden);
  get("shared_hidden", h.shared_hidden);
  get("tagger_hidden", h.tagger_hidden);
  get("tagger_mlp", h.tagger_mlp);
  get("parser_hidden", h.parser_hidden);
  get("parser_mlp", h.parser_mlp);
  get("pos_dim", h.pos_dim);
  get("pipeline", h.pipeline);
  get("dropout", h.dropout);
  get("word_dropout", h.word_dropout);
  get("learning_rate", h.learning_rate);
  get("momentum", h.momentum);
  get("max_epochs", h.max_epochs);
  get("patience", h.patience);
  get("explore_prob", h.explore_prob);
  get("explore_from_epoch", h.explore_from_epoch);
  get("seed", h.seed);
  return h;
}

ParserVocab ParserVocab::build(const std::vector<Sentence>& train) {
  ParserVocab v;
  std::vector<std::string> surfaces;
  std::set<std::string> tags;
  for (const auto& s : train) {
    for (const auto& t : s.tokens) {
      surfaces.push_back(t.surface());
      if (!t.upos.empty() && t.upos != "_") tags.insert(t.upos);
    }
  }
  v.chars = nn::CharVocab({"<unk>"}, surfaces);
  v.upos.assign(tags.begin(), tags.end());
  if (v.upos.empty()) v.upos.push_back("X");
  v.labels = LabelSet::from_sentences(train);
  return v;
}

int ParserVocab::upos_index(const std::string& tag) const {
  auto it = std::lower_bound(upos.begin(), upos.end(), tag);
  return it != upos.end() && *it == tag ? static_cast<int>(it - upos.begin()) : -1;
}

json ParserVocab::to_json() const { return {{"chars", chars.to_json()}, {"upos", upos}, {"labels", labels.names()}}; }

ParserVocab ParserVocab::from_json(const json& j) {
  ParserVocab v;
  v.chars = nn::CharVocab::from_json(j.at("chars"));
  v.upos = j.at("upos").get<std::vector<std::string>>();
  v.labels = LabelSet(j.at("labels").get<std::vector<std::string>>());
  return v;
}

namespace {

json dims_json(const StackingDims& d) {
  return {{"tagger_hidden", d.tagger_hidden}, {"parser_state", d.parser_state}, {"parser_mlp", d.parser_mlp}};
}

StackingDims dims_from_json(const json& j) {
  return {j.value("tagger_hidden", 0), j.value("parser_state", 0), j.value("parser_mlp", 0)};
}

std::vector<int> with_extra(std::vector<int> dims, int extra) {
  if (extra > 0) dims.push_back(extra);
  return dims;
}

const nn::Parameter* add_vector(nn::ParameterSet& ps, const std::string& name, int dim, nn::Rng& rng) {
  nn::Parameter& p = ps.add(name, dim, 1);
  p.value = nn::uniform_init(dim, 1, 0.1, rng);
  return &p;
}

}  // namespace

// --- StackPropModel ---

StackPropModel::StackPropModel(ParserHyper hyper, ParserVocab vocab, int word_dim, StackingDims stacking)
    : hyper_(hyper), vocab_(std::move(vocab)), word_dim_(word_dim), stacking_(stacking) {
  if (word_dim_ <= 0) throw ArgumentError("word vector dim must be positive");
  if (vocab_.labels.size() == 0) throw ArgumentError("parser needs at least one dependency label");
  nn::Rng rng(hyper_.seed);
  const auto& h = hyper_;
  chars_ = nn::CharEncoder(ps_, "chars", vocab_.chars, h.char_dim, h.char_hidden, rng);
  unk_ = add_vector(ps_, "unk", word_dim_, rng);
  const int token_dim_char = chars_.output_dim();
  shared_ = nn::BiLstm(ps_, "shared", with_extra({word_dim_, token_dim_char}, stacking_.tagger_hidden),
                       h.shared_hidden, rng);
  tagger_ = nn::BiLstm(ps_, "tagger", {shared_.output_dim()}, h.tagger_hidden, rng);
  tag_mlp_ = nn::Mlp(ps_, "tag_mlp", {tagger_.output_dim()}, {h.tagger_mlp}, static_cast<int>(vocab_.upos.size()),
                     rng);
  std::vector<int> parser_in;
  if (h.pipeline) {
    parser_chars_ = nn::CharEncoder(ps_, "parser_chars", vocab_.chars, h.char_dim, h.char_hidden, rng);
    parser_unk_ = add_vector(ps_, "parser_unk", word_dim_, rng);
    pos_emb_ = nn::Embedding(ps_, "pos", static_cast<int>(vocab_.upos.size()), h.pos_dim, 0.1, rng);
    parser_in = {word_dim_, parser_chars_.output_dim(), h.pos_dim};
  } else {
    parser_in = {shared_.output_dim(), h.tagger_mlp, word_dim_, token_dim_char};
  }
  parser_lstm_ = nn::BiLstm(ps_, "parser", with_extra(parser_in, stacking_.parser_state), h.parser_hidden, rng);
  const int state = parser_lstm_.output_dim();
  parser_mlp_ = nn::Mlp(ps_, "parser_mlp", with_extra({state, state}, stacking_.parser_mlp), {h.parser_mlp},
                        vocab_.labels.num_outputs(), rng);
  root_ = add_vector(ps_, "root", state, rng);
  pad_ = add_vector(ps_, "pad", state, rng);
}

Forward StackPropModel::forward(Graph& g, const Sentence& s, const embed::WordVectors& wv, const Mode& mode,
                                const std::vector<int>* pos, const SourceInputs* src) const {
  const std::size_t n = s.size();
  if (n == 0) throw ArgumentError("cannot encode an empty sentence");
  if (hyper_.pipeline && (!pos || pos->size() != n)) {
    throw ArgumentError("pipeline-mode parser needs one POS tag per token");
  }
  auto src_block = [&](const std::vector<Expr>* v, std::size_t i, int dim) -> Expr {
    if (dim == 0) return Expr{};
    if (!v || v->empty()) return Expr{};
    if (v->size() != n) throw ArgumentError("stacking source length differs from the sentence");
    return (*v)[i];
  };

  // Word vectors are looked up once and shared by both readers.
  std::vector<std::optional<embed::Vec>> vectors(n);
  for (std::size_t i = 0; i < n; ++i) {
    vectors[i] = wv.lookup(s.tokens[i]);
    if (vectors[i] && vectors[i]->size() != word_dim_) {
      throw ArgumentError("word vector dim " + std::to_string(vectors[i]->size()) + " differs from model dim " +
                          std::to_string(word_dim_));
    }
  }
  auto word_expr = [&](std::size_t i, const nn::Parameter* unk) {
    bool drop = mode.training && mode.rng && hyper_.word_dropout > 0.0 &&
                std::uniform_real_distribution<double>(0.0, 1.0)(*mode.rng) < hyper_.word_dropout;
    if (!vectors[i] || drop) return g.param(*unk);
    return g.input(*vectors[i]);
  };

  std::vector<Expr> words(n), chars(n);
  std::vector<std::vector<Expr>> shared_in(n);
  for (std::size_t i = 0; i < n; ++i) {
    words[i] = word_expr(i, unk_);
    chars[i] = chars_.encode(g, s.tokens[i].surface());
    shared_in[i] = {words[i], chars[i]};
    if (stacking_.tagger_hidden) {
      shared_in[i].push_back(src_block(src ? &src->tagger_hidden : nullptr, i, stacking_.tagger_hidden));
    }
  }
  std::vector<Expr> shared = shared_.encode(g, shared_in);
  std::vector<std::vector<Expr>> tagger_in(n);
  for (std::size_t i = 0; i < n; ++i) tagger_in[i] = {nn::dropout(g, shared[i], mode)};
  std::vector<Expr> tagged = tagger_.encode(g, tagger_in);

  Forward f;
  f.tag_hidden.resize(n);
  f.tag_logits.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Expr x = nn::dropout(g, tagged[i], mode);
    f.tag_hidden[i] = tag_mlp_.hidden(g, std::span<const Expr>(&x, 1), mode);
    f.tag_logits[i] = tag_mlp_.output(g, f.tag_hidden[i]);
  }

  std::vector<std::vector<Expr>> parser_in(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (hyper_.pipeline) {
      parser_in[i] = {word_expr(i, parser_unk_), parser_chars_.encode(g, s.tokens[i].surface()),
                      pos_emb_(g, (*pos)[i])};
    } else {
      parser_in[i] = {nn::dropout(g, shared[i], mode), f.tag_hidden[i], words[i], chars[i]};
    }
    if (stacking_.parser_state) {
      parser_in[i].push_back(src_block(src ? &src->parser_states : nullptr, i, stacking_.parser_state));
    }
  }
  f.states = parser_lstm_.encode(g, parser_in);
  for (auto& e : f.states) e = nn::dropout(g, e, mode);
  f.root = g.param(*root_);
  f.pad = g.param(*pad_);
  return f;
}

Expr StackPropModel::mlp_hidden(Graph& g, const Forward& f, const Config& c, const Mode& mode,
                                Expr src_hidden) const {
  const int s0 = c.top();
  Expr top = s0 == 0 ? f.root : f.states[s0 - 1];
  Expr front = c.buffer_empty() ? f.pad : f.states[c.front() - 1];
  std::vector<Expr> in = {top, front};
  if (stacking_.parser_mlp) in.push_back(src_hidden);
  return parser_mlp_.hidden(g, in, mode);
}

Expr StackPropModel::mlp_output(Graph& g, Expr hidden) const { return parser_mlp_.output(g, hidden); }

Expr StackPropModel::transition_logits(Graph& g, const Forward& f, const Config& c, const Mode& mode) const {
  return mlp_output(g, mlp_hidden(g, f, c, mode));
}

json StackPropModel::meta() const {
  return {{"kind", "stackprop"},
          {"hyper", hyper_.to_json()},
          {"vocab", vocab_.to_json()},
          {"word_dim", word_dim_},
          {"stacking", dims_json(stacking_)}};
}

std::unique_ptr<StackPropModel> StackPropModel::from_meta(const json& meta) {
  if (meta.value("kind", "") != "stackprop") throw DataError("not a stack-prop parser model");
  return std::make_unique<StackPropModel>(ParserHyper::from_json(meta.at("hyper")),
                                          ParserVocab::from_json(meta.at("vocab")), meta.at("word_dim").get<int>(),
                                          dims_from_json(meta.value("stacking", json::object())));
}

void StackPropModel::save(const std::string& path) const { nn::write_container(path, meta(), ps_); }

// --- StackedModel ---

StackedModel::StackedModel(std::unique_ptr<StackPropModel> source, ParserHyper hyper, ParserVocab vocab)
    : source_(std::move(source)) {
  if (!source_) throw ArgumentError("stacked model needs a source model");
  StackingDims dims{source_->tagger_hidden_dim(), source_->parser_state_dim(), source_->parser_mlp_dim()};
  target_ = std::make_unique<StackPropModel>(hyper, std::move(vocab), source_->word_dim(), dims);
}

StackedModel::StackedModel(std::unique_ptr<StackPropModel> source, std::unique_ptr<StackPropModel> target)
    : source_(std::move(source)), target_(std::move(target)) {
  if (!source_ || !target_) throw ArgumentError("stacked model needs a source and a target");
  const auto& d = target_->stacking();
  if (d.tagger_hidden != source_->tagger_hidden_dim() || d.parser_state != source_->parser_state_dim() ||
      d.parser_mlp != source_->parser_mlp_dim()) {
    throw ArgumentError("target stacking blocks do not match the source model");
  }
}

std::vector<nn::ParameterSet*> StackedModel::parameter_sets() {
  if (frozen_) return {&target_->params()};
  return {&target_->params(), &source_->params()};
}

Forward StackedModel::forward(Graph& g, const Sentence& s, const embed::WordVectors& wv, const Mode& mode,
                              const std::vector<int>* pos) const {
  if (masked_) return target_->forward(g, s, wv, mode, pos, nullptr);
  auto src = std::make_unique<Forward>(source_->forward(g, s, wv, mode, pos, nullptr));
  SourceInputs in{src->tag_hidden, src->states};
  Forward f = target_->forward(g, s, wv, mode, pos, &in);
  f.source = std::move(src);
  return f;
}

Expr StackedModel::transition_logits(Graph& g, const Forward& f, const Config& c, const Mode& mode) const {
  Expr src_hidden;
  if (!masked_ && f.source) src_hidden = source_->mlp_hidden(g, *f.source, c, mode);
  return target_->mlp_output(g, target_->mlp_hidden(g, f, c, mode, src_hidden));
}

json StackedModel::meta() const {
  return {{"kind", "stacked"},
          {"masked", masked_},
          {"freeze_source", frozen_},
          {"source", source_->meta()},
          {"target", target_->meta()}};
}

std::unique_ptr<StackedModel> StackedModel::from_meta(const json& meta) {
  if (meta.value("kind", "") != "stacked") throw DataError("not a stacked parser model");
  auto m = std::make_unique<StackedModel>(StackPropModel::from_meta(meta.at("source")),
                                          StackPropModel::from_meta(meta.at("target")));
  m->set_masked(meta.value("masked", false));
  m->set_source_frozen(meta.value("freeze_source", false));
  return m;
}

void StackedModel::set_source_frozen(bool f) {
  frozen_ = f;
  source_->params().set_trainable(!f);
}

void StackedModel::save(const std::string& path) const {
  nn::write_container(path, meta(), {{"src.", &source_->params()}, {"tgt.", &target_->params()}});
}

std::unique_ptr<ParserNet> load_parser(const std::string& path) {
  nn::Container c = nn::read_container(path);
  try {
    const std::string kind = c.meta.value("kind", "");
    if (kind == "stackprop") {
      auto m = StackPropModel::from_meta(c.meta);
      nn::assign(m->params(), c);
      return m;
    }
    if (kind == "stacked") {
      auto m = StackedModel::from_meta(c.meta);
      nn::assign(m->source().params(), c, "src.");
      nn::assign(m->target().params(), c, "tgt.");
      return m;
    }
    throw DataError("unknown parser model kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw DataError(path + ": bad parser model header: " + e.what());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

// --- training and decoding ---

namespace {

int argmax_legal(const embed::Vec& scores, const Config& c, const LabelSet& labels) {
  int best = -1;
  for (const auto& t : legal_transitions(c, labels.size())) {
    int o = labels.encode(t);
    if (best < 0 || scores(o) > scores(best)) best = o;
  }
  return best;
}

std::vector<int> upos_ids(const ParserVocab& v, const Sentence& s) {
  std::vector<int> ids;
  for (const auto& t : s.tokens) ids.push_back(std::max(0, v.upos_index(t.upos)));
  return ids;
}

std::vector<int> predicted_upos(const Graph& g, const Forward& f) {
  std::vector<int> ids;
  for (Expr e : f.tag_logits) {
    const auto& v = g.value(e);
    Eigen::Index k;
    v.maxCoeff(&k);  // first maximum on ties
    ids.push_back(static_cast<int>(k));
  }
  return ids;
}

Expr tagging_loss(Graph& g, const ParserNet& net, const Forward& f, const Sentence& s) {
  std::vector<Expr> terms;
  for (std::size_t i = 0; i < s.size(); ++i) {
    int gold = net.vocab().upos_index(s.tokens[i].upos);
    if (gold >= 0) terms.push_back(g.pick_nll(f.tag_logits[i], gold));
  }
  return terms.empty() ? Expr{} : g.sum(terms);
}

void require_projective(const std::vector<Sentence>& train) {
  for (std::size_t k = 0; k < train.size(); ++k) {
    std::vector<int> heads = head_vector(train[k]);
    if (!validate_heads(heads).empty()) {
      throw ArgumentError("training sentence " + std::to_string(k + 1) + " is not a valid tree");
    }
    if (!is_projective(heads)) {
      throw ArgumentError("training sentence " + std::to_string(k + 1) +
                          " has a non-projective arc; projectivize the treebank first");
    }
  }
}

Sentence decode_one(const ParserNet& net, const Sentence& s, const embed::WordVectors& wv) {
  Sentence out = s;
  if (s.empty()) return out;
  const auto& v = net.vocab();
  Graph g;
  Mode mode;
  // Pipeline mode runs the tagger first and feeds its tags to the parser; in
  // joint mode the parser reads the tagger's hidden layer directly.
  std::vector<int> tags;
  Forward f;
  if (net.hyper().pipeline) {
    std::vector<int> dummy(s.size(), 0);
    Graph tg;
    Forward tf = net.forward(tg, s, wv, mode, &dummy);
    tags = predicted_upos(tg, tf);
    f = net.forward(g, s, wv, mode, &tags);
  } else {
    f = net.forward(g, s, wv, mode, nullptr);
    tags = predicted_upos(g, f);
  }
  Config c = Config::initial(static_cast<int>(s.size()));
  const int limit = 2 * static_cast<int>(s.size());
  for (int step = 0; step < limit && !c.terminal(); ++step) {
    Expr logits = net.transition_logits(g, f, c, mode);
    apply(c, v.labels.decode(argmax_legal(g.value(logits), c, v.labels)));
  }
  if (!c.terminal()) throw Error("parser did not terminate within 2n transitions");

  int root_token = 0;
  for (int d = 1; d <= c.n; ++d) {
    if (c.heads[d] == 0) root_token = d;
  }
  for (int d = 1; d <= c.n; ++d) {
    Token& t = out.tokens[d - 1];
    t.upos = v.upos[tags[d - 1]];
    if (c.heads[d] >= 0) {
      t.head = c.heads[d];
      t.deprel = v.labels.name(c.labels[d]);
    } else if (root_token == 0) {
      root_token = d;
      t.head = 0;
      t.deprel = "root";
    } else {
      t.head = root_token;
      t.deprel = "dep";
    }
  }
  return deprojectivize(out).sentence;
}

}  // namespace

TrainReport train_parser(ParserNet& net, const std::vector<Sentence>& train, const std::vector<Sentence>& dev,
                         const embed::WordVectors& wv, const EpochCallback& on_epoch) {
  if (train.empty()) throw ArgumentError("empty training treebank");
  require_projective(train);
  const ParserHyper& h = net.hyper();
  const auto& v = net.vocab();
  std::vector<GoldTree> gold;
  gold.reserve(train.size());
  for (const auto& s : train) gold.push_back(gold_tree(s, v.labels));
  const std::vector<Sentence>& dev_set = dev.empty() ? train : dev;

  nn::Rng rng(h.seed ^ 0x9e3779b97f4a7c15ULL);
  nn::Sgd sgd({nn::OptimizerKind::momentum_sgd, h.learning_rate, h.momentum, std::nullopt});
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  auto sets = net.parameter_sets();
  std::vector<std::vector<nn::Mat>> best;
  for (auto* ps : sets) best.push_back(ps->snapshot());

  TrainReport report;
  report.best_dev_las = -1.0;
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  int since_best = 0;
  double best_pos = -1.0;
  for (int epoch = 1; epoch <= h.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    Mode mode{true, h.dropout, &rng};
    for (std::size_t k : order) {
      const Sentence& s = train[k];
      const GoldTree& gt = gold[k];
      Graph g;
      std::vector<int> pos = upos_ids(v, s);
      Forward f = net.forward(g, s, wv, mode, h.pipeline ? &pos : nullptr);
      std::vector<Expr> terms;
      if (Expr tl = tagging_loss(g, net, f, s); tl.valid()) terms.push_back(tl);

      Config c = Config::initial(static_cast<int>(s.size()));
      while (!c.terminal()) {
        auto legal = legal_transitions(c, v.labels.size());
        Expr logits = net.transition_logits(g, f, c, mode);
        const auto& scores = g.value(logits);
        int predicted = -1, target = -1;
        for (const auto& t : legal) {
          int o = v.labels.encode(t);
          if (predicted < 0 || scores(o) > scores(predicted)) predicted = o;
          if (transition_cost(c, t, gt) == 0 && (target < 0 || scores(o) > scores(target))) target = o;
        }
        if (target < 0) throw Error("dynamic oracle found no zero-cost transition in " + c.summary());
        if (legal.size() > 1) terms.push_back(g.pick_nll(logits, target));
        int next = target;
        if (predicted != target) {
          bool zero_cost = transition_cost(c, v.labels.decode(predicted), gt) == 0;
          if (zero_cost || (epoch >= h.explore_from_epoch && coin(rng) < h.explore_prob)) next = predicted;
        }
        apply(c, v.labels.decode(next));
      }
      if (terms.empty()) continue;
      Expr loss = g.sum(terms);
      total += g.scalar_value(loss);
      g.backward(loss);
      for (auto* ps : sets) sgd.update(*ps);
    }

    std::vector<Sentence> predicted;
    predicted.reserve(dev_set.size());
    for (const auto& s : dev_set) predicted.push_back(decode_one(net, s, wv));
    EvalReport r = attachment_scores(dev_set, predicted);
    EpochStats stats{epoch, total, r.uas, r.las, r.pos_acc};
    report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
    // Tagging accuracy breaks LAS ties.
    if (r.las > report.best_dev_las || (r.las == report.best_dev_las && r.pos_acc > best_pos)) {
      report.best_dev_las = r.las;
      best_pos = r.pos_acc;
      report.best_epoch = epoch;
      for (std::size_t i = 0; i < sets.size(); ++i) best[i] = sets[i]->snapshot();
      since_best = 0;
    } else if (++since_best >= h.patience) {
      report.early_stopped = true;
      break;
    }
  }
  for (std::size_t i = 0; i < sets.size(); ++i) sets[i]->restore(best[i]);
  return report;
}

LossTerms static_losses(Graph& g, const ParserNet& net, const Sentence& s, const embed::WordVectors& wv,
                        const Mode& mode) {
  const auto& v = net.vocab();
  GoldTree gt = gold_tree(s, v.labels);
  std::vector<int> pos = upos_ids(v, s);
  Forward f = net.forward(g, s, wv, mode, net.hyper().pipeline ? &pos : nullptr);
  LossTerms out;
  out.tagging = tagging_loss(g, net, f, s);
  std::vector<Expr> terms;
  Config c = Config::initial(static_cast<int>(s.size()));
  for (const auto& t : static_derivation(gt)) {
    terms.push_back(g.pick_nll(net.transition_logits(g, f, c, mode), v.labels.encode(t)));
    apply(c, t);
  }
  out.parsing = g.sum(terms);
  return out;
}

std::vector<std::string> tag_only(const ParserNet& net, const Sentence& s, const embed::WordVectors& wv) {
  if (s.empty()) return {};
  Graph g;
  std::vector<int> dummy(s.size(), 0);
  Forward f = net.forward(g, s, wv, Mode{}, net.hyper().pipeline ? &dummy : nullptr);
  std::vector<std::string> out;
  for (int id : predicted_upos(g, f)) out.push_back(net.vocab().upos[id]);
  return out;
}

Sentence parse(const ParserNet& net, const Sentence& s, const embed::WordVectors& wv) {
  return decode_one(net, s, wv);
}

}  // namespace cspipe::parser
