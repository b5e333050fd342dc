#include "ares/model/checkpoint.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ares/core/error.hpp"
#include "ares/core/format.hpp"

namespace ares::model {
namespace {

constexpr const char* kMagic = "ares-checkpoint";
constexpr int kVersion = 1;

void write_tensor(std::ostream& out, const char* kind, const std::string& name, const nn::Tensor& t) {
  out << kind << ' ' << name << ' ' << t.rank();
  for (std::size_t d : t.shape()) out << ' ' << d;
  out << '\n';
  for (std::size_t i = 0; i < t.size(); ++i) out << (i ? " " : "") << format_double(t[i]);
  out << '\n';
}

struct LineReader {
  std::istream& in;
  std::size_t line_no = 0;

  std::vector<std::string> next() {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("checkpoint truncated after line " + std::to_string(line_no));
    ++line_no;
    std::istringstream words(line);
    std::vector<std::string> out;
    for (std::string w; words >> w;) out.push_back(w);
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("checkpoint line " + std::to_string(line_no) + ": " + what);
  }

  double number(const std::string& text) const {
    auto v = parse_double(text);
    if (!v) fail("bad number '" + text + "'");
    return *v;
  }

  std::size_t count(const std::string& text) const {
    const double v = number(text);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) fail("bad count '" + text + "'");
    return static_cast<std::size_t>(v);
  }
};

}  // namespace

void save_checkpoint(const AresModel& model, std::ostream& out) {
  const AresConfig& c = model.config();
  out << kMagic << ' ' << kVersion << '\n';
  out << "token_dim " << c.token_dim << '\n';
  out << "h_dim " << c.h_dim << '\n';
  out << "n_blocks " << c.n_blocks << '\n';
  out << "n_heads " << c.n_heads << '\n';
  out << "dropout_p " << format_double(c.dropout_p) << '\n';
  out << "ff_ratio " << c.ff_ratio << '\n';
  out << "max_T " << c.max_T << '\n';
  out << "positional_encoding " << (c.positional_encoding ? 1 : 0) << '\n';
  out << "discrete_vocab";
  for (std::size_t v : c.discrete_vocab) out << ' ' << v;
  out << '\n';
  out << "layer_norm_eps " << format_double(c.layer_norm_eps) << '\n';
  out << "lr " << format_double(c.optimizer.lr) << '\n';
  out << "beta1 " << format_double(c.optimizer.beta1) << '\n';
  out << "beta2 " << format_double(c.optimizer.beta2) << '\n';
  out << "adam_eps " << format_double(c.optimizer.eps) << '\n';
  out << "weight_decay " << format_double(c.optimizer.weight_decay) << '\n';
  out << "amsgrad " << (c.optimizer.amsgrad ? 1 : 0) << '\n';
  out << "epochs " << c.epochs << '\n';
  out << "seed " << c.seed << '\n';

  const auto params = model.parameters();
  const nn::AdamWState& st = model.optimizer().state();
  out << "optimizer_steps " << st.step_count << '\n';
  out << "tensors " << params.size() << ' ' << (st.m.empty() ? 0 : 1) << '\n';
  for (std::size_t i = 0; i < params.size(); ++i) {
    write_tensor(out, "param", params[i]->name, params[i]->value);
    if (!st.m.empty()) {
      write_tensor(out, "adam_m", params[i]->name, st.m[i]);
      write_tensor(out, "adam_v", params[i]->name, st.v[i]);
      if (c.optimizer.amsgrad) write_tensor(out, "adam_vmax", params[i]->name, st.v_max[i]);
    }
  }
  out << "end\n";
  if (!out) throw IoError("failed writing checkpoint");
}

void save_checkpoint(const AresModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  save_checkpoint(model, out);
}

AresModel load_checkpoint(std::istream& in) {
  LineReader reader{in};
  auto header = reader.next();
  if (header.size() != 2 || header[0] != kMagic) reader.fail("not an ARES checkpoint");
  if (header[1] != std::to_string(kVersion)) reader.fail("unsupported checkpoint version " + header[1]);

  auto field = [&](const char* key) {
    auto words = reader.next();
    if (words.empty() || words[0] != key) reader.fail(std::string("expected '") + key + "'");
    if (words.size() != 2) reader.fail(std::string("'") + key + "' takes one value");
    return words[1];
  };

  AresConfig c;
  c.token_dim = reader.count(field("token_dim"));
  c.h_dim = reader.count(field("h_dim"));
  c.n_blocks = reader.count(field("n_blocks"));
  c.n_heads = reader.count(field("n_heads"));
  c.dropout_p = reader.number(field("dropout_p"));
  c.ff_ratio = reader.count(field("ff_ratio"));
  c.max_T = reader.count(field("max_T"));
  c.positional_encoding = reader.count(field("positional_encoding")) != 0;
  {
    auto words = reader.next();
    if (words.empty() || words[0] != "discrete_vocab") reader.fail("expected 'discrete_vocab'");
    for (std::size_t i = 1; i < words.size(); ++i) c.discrete_vocab.push_back(reader.count(words[i]));
  }
  c.layer_norm_eps = reader.number(field("layer_norm_eps"));
  c.optimizer.lr = reader.number(field("lr"));
  c.optimizer.beta1 = reader.number(field("beta1"));
  c.optimizer.beta2 = reader.number(field("beta2"));
  c.optimizer.eps = reader.number(field("adam_eps"));
  c.optimizer.weight_decay = reader.number(field("weight_decay"));
  c.optimizer.amsgrad = reader.count(field("amsgrad")) != 0;
  c.epochs = reader.count(field("epochs"));
  {
    const std::string seed = field("seed");
    try {
      c.seed = std::stoull(seed);
    } catch (const std::exception&) {
      reader.fail("bad seed '" + seed + "'");
    }
  }
  const std::size_t steps = reader.count(field("optimizer_steps"));

  AresModel model(c);
  auto params = model.parameters();
  auto counts = reader.next();
  if (counts.size() != 3 || counts[0] != "tensors") reader.fail("expected 'tensors <n> <has_moments>'");
  if (reader.count(counts[1]) != params.size()) reader.fail("parameter count does not match the architecture");
  const bool has_moments = reader.count(counts[2]) != 0;

  auto read_tensor = [&](const char* kind, const nn::Parameter& p) {
    auto head = reader.next();
    if (head.size() < 3 || head[0] != kind || head[1] != p.name) {
      reader.fail(std::string("expected ") + kind + " " + p.name);
    }
    const std::size_t rank = reader.count(head[2]);
    if (head.size() != 3 + rank) reader.fail("shape does not match rank");
    nn::Shape shape;
    for (std::size_t i = 0; i < rank; ++i) shape.push_back(reader.count(head[3 + i]));
    if (shape != p.value.shape()) reader.fail("shape mismatch for " + p.name);
    auto words = reader.next();
    if (words.size() != p.value.size()) reader.fail("value count mismatch for " + p.name);
    std::vector<double> values;
    values.reserve(words.size());
    for (const auto& w : words) values.push_back(reader.number(w));
    return nn::Tensor(shape, std::move(values));
  };

  nn::AdamWState& st = model.optimizer().state();
  st.step_count = steps;
  for (nn::Parameter* p : params) {
    p->value = read_tensor("param", *p);
    p->grad = nn::Tensor(p->value.shape());
    if (has_moments) {
      st.m.push_back(read_tensor("adam_m", *p));
      st.v.push_back(read_tensor("adam_v", *p));
      if (c.optimizer.amsgrad) st.v_max.push_back(read_tensor("adam_vmax", *p));
    }
  }
  auto end = reader.next();
  if (end.size() != 1 || end[0] != "end") reader.fail("expected 'end'");
  return model;
}

AresModel load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  return load_checkpoint(in);
}

}  // namespace ares::model
